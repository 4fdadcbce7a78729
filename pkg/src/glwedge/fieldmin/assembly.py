"""Discrete Ginzburg-Landau energy with fixed vector potential.

P1 elements on triangles.  The discretized functional is

    G[psi] = sum_T |T| |grad psi_T|^2
           + sum_T (|T|/3) sum_{edges e of T} [ 2 A(m_e) . j_m
                 + |A(m_e)|^2 |psi_m|^2 - (2|psi_m|^2 - |psi_m|^4)/(2b) ]
           + sum_{side edges} sign * w(t_m) * ( j_t-circulation + shift |psi_m|^2 len )

with psi_m the edge-midpoint value, j_m = Im(conj(psi_m) grad psi_T) the
midpoint current, and the line terms realizing the modified (Neumann-type)
functionals: the integrated tangential current along a side edge oriented by
increasing t reduces to Im(conj(psi_a) psi_b).

Everything except the quartic term is a quadratic form in the stacked real
vector u = [Re psi; Im psi]; it is assembled once into a sparse matrix.  The
quartic term lives on unique edges.  Gradient and Hessian are exact, so the
minimizer and the finite-difference oracles agree to rounding.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
import scipy.sparse as sp

from .mesh import BoundaryTag, Mesh2D, _perp
from .potential import PotentialField

__all__ = ["ComplexField", "BoundaryCondition", "BoundaryLineTerm",
           "BoundarySpec", "DiscreteProblem", "assemble_energy",
           "assemble_gradient"]


@dataclass
class ComplexField:
    """Nodal complex order parameter on a mesh."""

    mesh: Mesh2D
    values: np.ndarray

    def __post_init__(self):
        self.values = np.ascontiguousarray(self.values, dtype=complex)
        if self.values.shape != (self.mesh.n_nodes,):
            raise ValueError("field/mesh size mismatch")

    def copy(self) -> "ComplexField":
        return ComplexField(self.mesh, self.values.copy())

    def abs(self) -> np.ndarray:
        return np.abs(self.values)


@dataclass
class BoundaryCondition:
    """Per-tag condition: DIRICHLET with data(points) -> complex, or FREE."""

    kind: str  # "dirichlet" | "free"
    data: Optional[Callable[[np.ndarray], np.ndarray]] = None


@dataclass
class BoundaryLineTerm:
    """-sign * int w(t) (j_t[psi] + shift(t) |psi|^2) dt on one SIDE tag.

    ``param`` maps boundary points to the integration coordinate t (used to
    orient edges by increasing t and to evaluate w and shift).  The sign
    convention matches the evaluation |_{s=-L}^{s=L}: sign=+1 at the upper
    limit, -1 at the lower one; the whole term enters the energy negatively.
    """

    tag: BoundaryTag
    sign: float
    weight: Callable[[np.ndarray], np.ndarray]
    param: Callable[[np.ndarray], np.ndarray]
    shift: Optional[Callable[[np.ndarray], np.ndarray]] = None


@dataclass
class BoundarySpec:
    conditions: dict  # BoundaryTag -> BoundaryCondition
    line_terms: list = field(default_factory=list)

    def condition(self, tag) -> BoundaryCondition:
        return self.conditions.get(BoundaryTag(int(tag)),
                                   BoundaryCondition("free"))


def _cell_geometry(mesh: Mesh2D):
    p = mesh.nodes
    c = mesh.cells
    a = mesh.areas
    v0, v1, v2 = p[c[:, 0]], p[c[:, 1]], p[c[:, 2]]
    g = np.stack([_perp(v2 - v1), _perp(v0 - v2), _perp(v1 - v0)], axis=1)
    g /= (2.0 * a)[:, None, None]
    return g  # (M, 3, 2) barycentric gradients


class DiscreteProblem:
    """Precomputed discrete GL energy on a mesh with fixed potential."""

    def __init__(self, mesh: Mesh2D, A: PotentialField, b: float,
                 bc: BoundarySpec):
        if b <= 0:
            raise ValueError("b must be positive")
        self.mesh = mesh
        self.A = A
        self.b = b
        self.bc = bc
        self._assemble_quadratic()
        self._assemble_quartic_edges()
        self._build_dirichlet()

    # -- assembly ----------------------------------------------------------

    def _assemble_quadratic(self):
        mesh = self.mesh
        n = mesh.n_nodes
        c = mesh.cells
        areas = mesh.areas
        g = _cell_geometry(mesh)

        rows, cols, vals = [], [], []

        def add(r, co, v):
            rows.append(np.asarray(r).ravel())
            cols.append(np.asarray(co).ravel())
            vals.append(np.asarray(v).ravel())

        # kinetic |grad psi|^2: stiffness on both real blocks.  K stores the
        # Hessian of the quadratic part (energy = u^T K u / 2), hence the 2.
        for i in range(3):
            for j in range(3):
                sij = 2.0 * areas * np.einsum("ij,ij->i", g[:, i], g[:, j])
                add(c[:, i], c[:, j], sij)            # xx
                add(c[:, i] + n, c[:, j] + n, sij)    # yy

        # edge-midpoint terms
        w_e = areas / 3.0
        for k in range(3):
            a_idx = c[:, k]
            b_idx = c[:, (k + 1) % 3]
            Am = self.A.at_edge_midpoints(mesh, a_idx, b_idx)  # (M,2)
            # 2 A.j at midpoint: 2 w_e A . sum_j g_j (x_m y_j - y_m x_j)
            for j in range(3):
                cj = 2.0 * w_e * np.einsum("ij,ij->i", Am, g[:, j])
                jn = c[:, j]
                for m_idx in (a_idx, b_idx):
                    # + (cj/2) x_m y_j  - (cj/2) y_m x_j
                    add(m_idx, jn + n, 0.5 * cj)
                    add(jn + n, m_idx, 0.5 * cj)
                    add(m_idx + n, jn, -0.5 * cj)
                    add(jn, m_idx + n, -0.5 * cj)
            # (|A|^2 - 1/b) |psi_m|^2, |psi_m|^2 = ((x_a+x_b)^2+(y_a+y_b)^2)/4
            coef = w_e * (np.einsum("ij,ij->i", Am, Am) - 1.0 / self.b) / 4.0
            for off in (0, n):
                for (r, co) in ((a_idx, a_idx), (b_idx, b_idx)):
                    add(r + off, co + off, 2.0 * coef)
                add(a_idx + off, b_idx + off, 2.0 * coef)
                add(b_idx + off, a_idx + off, 2.0 * coef)

        # boundary line terms (negative sign in the energy)
        for term in self.bc.line_terms:
            edges = mesh.edges_with_tag(term.tag)
            if len(edges) == 0:
                continue
            pa = mesh.nodes[edges[:, 0]]
            pb = mesh.nodes[edges[:, 1]]
            ta = term.param(pa)
            tb = term.param(pb)
            swap = tb < ta
            ea = np.where(swap, edges[:, 1], edges[:, 0])
            eb = np.where(swap, edges[:, 0], edges[:, 1])
            mids = 0.5 * (pa + pb)
            wmid = term.weight(term.param(mids))
            s = -term.sign  # the line integral is subtracted from the energy
            # w * Im(conj(psi_a) psi_b) = w (x_a y_b - y_a x_b)
            add(ea, eb + n, s * wmid)
            add(eb + n, ea, s * wmid)
            add(ea + n, eb, -s * wmid)
            add(eb, ea + n, -s * wmid)
            if term.shift is not None:
                ln = np.abs(tb - ta)
                coef = s * wmid * term.shift(term.param(mids)) * ln / 4.0
                for off in (0, n):
                    add(ea + off, ea + off, 2.0 * coef)
                    add(eb + off, eb + off, 2.0 * coef)
                    add(ea + off, eb + off, 2.0 * coef)
                    add(eb + off, ea + off, 2.0 * coef)

        K = sp.coo_matrix(
            (np.concatenate(vals),
             (np.concatenate(rows), np.concatenate(cols))),
            shape=(2 * n, 2 * n)).tocsr()
        K.sum_duplicates()
        self.K = K

    def _assemble_quartic_edges(self):
        c = self.mesh.cells
        areas = self.mesh.areas
        e_all = np.concatenate([c[:, [0, 1]], c[:, [1, 2]], c[:, [2, 0]]])
        w_all = np.concatenate([areas, areas, areas]) / 3.0
        e_sorted = np.sort(e_all, axis=1)
        uniq, inv = np.unique(e_sorted, axis=0, return_inverse=True)
        w = np.zeros(len(uniq))
        np.add.at(w, inv, w_all)
        self.qe_a = uniq[:, 0]
        self.qe_b = uniq[:, 1]
        self.qe_w = w

    def _build_dirichlet(self):
        n = self.mesh.n_nodes
        mask = np.zeros(n, dtype=bool)
        vals = np.zeros(n, dtype=complex)
        for tag in BoundaryTag:
            cond = self.bc.condition(tag)
            if cond.kind != "dirichlet":
                continue
            nodes = self.mesh.boundary_nodes_with_tag(tag)
            if len(nodes) == 0:
                continue
            mask[nodes] = True
            vals[nodes] = cond.data(self.mesh.nodes[nodes])
        self.dirichlet_mask = mask
        self.dirichlet_values = vals
        free = ~mask
        self.free_mask2 = np.concatenate([free, free])
        self.n_free = int(free.sum())

    # -- evaluation ----------------------------------------------------------

    def _stack(self, psi: np.ndarray) -> np.ndarray:
        return np.concatenate([psi.real, psi.imag])

    def energy(self, psi: np.ndarray) -> float:
        u = self._stack(psi)
        quad = 0.5 * float(u @ (self.K @ u))
        pm2 = np.abs(0.5 * (psi[self.qe_a] + psi[self.qe_b])) ** 2
        quart = float(np.sum(self.qe_w * pm2 * pm2)) / (2.0 * self.b)
        return quad + quart

    def gradient(self, psi: np.ndarray) -> np.ndarray:
        """Exact gradient wrt (Re, Im) nodal values as a complex array.

        Rows at Dirichlet nodes are zeroed: those values are data.
        """
        u = self._stack(psi)
        g = self.K @ u
        pm = 0.5 * (psi[self.qe_a] + psi[self.qe_b])
        coef = self.qe_w * np.abs(pm) ** 2 / (2.0 * self.b)
        gx = np.zeros(self.mesh.n_nodes)
        gy = np.zeros(self.mesh.n_nodes)
        px = coef * 2.0 * pm.real
        py = coef * 2.0 * pm.imag
        np.add.at(gx, self.qe_a, px)
        np.add.at(gx, self.qe_b, px)
        np.add.at(gy, self.qe_a, py)
        np.add.at(gy, self.qe_b, py)
        n = self.mesh.n_nodes
        out = (g[:n] + gx) + 1j * (g[n:] + gy)
        out[self.dirichlet_mask] = 0.0
        return out

    def hessian(self, psi: np.ndarray) -> sp.csr_matrix:
        """Sparse Hessian (full, unreduced) of the discrete energy."""
        n = self.mesh.n_nodes
        a_idx, b_idx, w = self.qe_a, self.qe_b, self.qe_w
        pm = 0.5 * (psi[a_idx] + psi[b_idx])
        p = 2.0 * pm.real
        q = 2.0 * pm.imag
        cc = w / (32.0 * self.b)
        fpp = cc * (4.0 * (p * p + q * q) + 8.0 * p * p)
        fpq = cc * 8.0 * p * q
        fqq = cc * (4.0 * (p * p + q * q) + 8.0 * q * q)
        rows, cols, vals = [], [], []
        for (ra, ca, v) in (
            (a_idx, a_idx, fpp), (a_idx, b_idx, fpp),
            (b_idx, a_idx, fpp), (b_idx, b_idx, fpp),
        ):
            rows.append(ra)
            cols.append(ca)
            vals.append(v)
        for (ra, ca, v) in (
            (a_idx, a_idx, fqq), (a_idx, b_idx, fqq),
            (b_idx, a_idx, fqq), (b_idx, b_idx, fqq),
        ):
            rows.append(ra + n)
            cols.append(ca + n)
            vals.append(v)
        for ra in (a_idx, b_idx):
            for ca in (a_idx, b_idx):
                rows.append(ra)
                cols.append(ca + n)
                vals.append(fpq)
                rows.append(ca + n)
                cols.append(ra)
                vals.append(fpq)
        Hq = sp.coo_matrix(
            (np.concatenate(vals),
             (np.concatenate(rows), np.concatenate(cols))),
            shape=(2 * n, 2 * n)).tocsr()
        return self.K + Hq

    # -- dirichlet handling ----------------------------------------------------

    def apply_dirichlet(self, psi: np.ndarray) -> np.ndarray:
        out = psi.astype(complex).copy()
        out[self.dirichlet_mask] = self.dirichlet_values[self.dirichlet_mask]
        return out


def assemble_energy(psi: ComplexField, A: PotentialField, b: float,
                    bc: BoundarySpec) -> float:
    """One-shot energy of a nodal field (Dirichlet data must be imposed)."""
    return DiscreteProblem(psi.mesh, A, b, bc).energy(psi.values)


def assemble_gradient(psi: ComplexField, A: PotentialField, b: float,
                      bc: BoundarySpec) -> ComplexField:
    """One-shot exact gradient; zero rows at Dirichlet nodes."""
    g = DiscreteProblem(psi.mesh, A, b, bc).gradient(psi.values)
    return ComplexField(psi.mesh, g)
