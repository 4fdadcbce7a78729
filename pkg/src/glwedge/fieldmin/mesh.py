"""Triangle meshes with tagged boundaries.

The 2D solvers run on P1 triangulations.  Strips use a structured
right-triangle pattern; polygonal wedge domains are meshed from a graded
node cloud by Delaunay triangulation and clipping (see glwedge.corner).
Every boundary edge carries exactly one tag from {OUTER, INNER, SIDE_MINUS,
SIDE_PLUS}; OUTER is the physical superconductor surface, INNER the
artificial cut deep in the bulk, and the SIDE tags the lateral cuts where
Dirichlet data or current boundary terms live.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from enum import IntEnum

import numpy as np

__all__ = ["BoundaryTag", "Mesh2D", "MeshQualityError", "strip_mesh",
           "delaunay_mesh", "nodal_gradient"]


class BoundaryTag(IntEnum):
    OUTER = 0
    INNER = 1
    SIDE_MINUS = 2
    SIDE_PLUS = 3


class MeshQualityError(RuntimeError):
    pass


@dataclass
class Mesh2D:
    nodes: np.ndarray          # (N, 2) float
    cells: np.ndarray          # (M, 3) int, positively oriented
    boundary_edges: np.ndarray  # (B, 2) int
    boundary_tags: np.ndarray   # (B,) int (BoundaryTag)
    h: float

    _areas: np.ndarray = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        self.nodes = np.ascontiguousarray(self.nodes, dtype=float)
        self.cells = np.ascontiguousarray(self.cells, dtype=np.int64)
        self.boundary_edges = np.ascontiguousarray(self.boundary_edges,
                                                   dtype=np.int64)
        self.boundary_tags = np.ascontiguousarray(self.boundary_tags,
                                                  dtype=np.int64)
        self._orient()

    # -- geometry ---------------------------------------------------------

    def _orient(self):
        p = self.nodes
        c = self.cells
        cross = np.cross(p[c[:, 1]] - p[c[:, 0]], p[c[:, 2]] - p[c[:, 0]])
        flip = cross < 0
        if np.any(flip):
            c[flip, 1], c[flip, 2] = c[flip, 2].copy(), c[flip, 1].copy()
        self._areas = 0.5 * np.abs(cross)

    @property
    def areas(self) -> np.ndarray:
        return self._areas

    @property
    def n_nodes(self) -> int:
        return self.nodes.shape[0]

    def min_angle_deg(self) -> float:
        p = self.nodes
        c = self.cells
        a = p[c[:, 0]]
        b = p[c[:, 1]]
        d = p[c[:, 2]]
        la = np.linalg.norm(b - d, axis=1)
        lb = np.linalg.norm(a - d, axis=1)
        lc = np.linalg.norm(a - b, axis=1)
        angles = []
        for opp, e1, e2 in ((la, lb, lc), (lb, la, lc), (lc, la, lb)):
            cosang = np.clip((e1 ** 2 + e2 ** 2 - opp ** 2) / (2 * e1 * e2),
                             -1.0, 1.0)
            angles.append(np.arccos(cosang))
        return float(np.degrees(np.min(np.concatenate(angles))))

    def computed_boundary_edges(self) -> np.ndarray:
        """Undirected edges belonging to exactly one triangle."""
        c = self.cells
        e = np.concatenate([c[:, [0, 1]], c[:, [1, 2]], c[:, [2, 0]]])
        e_sorted = np.sort(e, axis=1)
        uniq, counts = np.unique(e_sorted, axis=0, return_counts=True)
        return uniq[counts == 1]

    def validate(self, min_angle: float = 20.0) -> None:
        """Quality gate and boundary-partition check."""
        found = self.computed_boundary_edges()
        declared = np.sort(self.boundary_edges, axis=1)
        if len(declared) != len(found):
            raise ValueError(
                f"boundary partition mismatch: {len(declared)} tagged edges, "
                f"{len(found)} actual boundary edges")
        order_d = np.lexsort(declared.T[::-1])
        if not np.array_equal(declared[order_d], found):
            raise ValueError("tagged edges do not cover the mesh boundary")
        if len(np.unique(declared, axis=0)) != len(declared):
            raise ValueError("a boundary edge carries more than one tag")
        ang = self.min_angle_deg()
        if ang < min_angle:
            raise MeshQualityError(
                f"mesh quality gate: min angle {ang:.2f} deg < {min_angle}")

    def edges_with_tag(self, tag: BoundaryTag) -> np.ndarray:
        return self.boundary_edges[self.boundary_tags == int(tag)]

    def boundary_nodes_with_tag(self, tag: BoundaryTag) -> np.ndarray:
        return np.unique(self.edges_with_tag(tag))

    def content_hash(self) -> str:
        m = hashlib.sha256()
        m.update(np.ascontiguousarray(self.nodes).tobytes())
        m.update(np.ascontiguousarray(self.cells).tobytes())
        m.update(np.ascontiguousarray(self.boundary_edges).tobytes())
        m.update(np.ascontiguousarray(self.boundary_tags).tobytes())
        return m.hexdigest()

    # -- interchange -------------------------------------------------------

    def write_csv(self, prefix: str) -> None:
        np.savetxt(f"{prefix}_nodes.csv", self.nodes, delimiter=",",
                   header="x,y", comments="", fmt="%.17g")
        np.savetxt(f"{prefix}_cells.csv", self.cells, delimiter=",",
                   header="i,j,k", comments="", fmt="%d")
        bt = np.column_stack([self.boundary_edges, self.boundary_tags])
        np.savetxt(f"{prefix}_boundary.csv", bt, delimiter=",",
                   header="a,b,tag", comments="", fmt="%d")

    @classmethod
    def read_csv(cls, prefix: str, h: float) -> "Mesh2D":
        nodes = np.loadtxt(f"{prefix}_nodes.csv", delimiter=",", skiprows=1)
        cells = np.loadtxt(f"{prefix}_cells.csv", delimiter=",", skiprows=1,
                           dtype=np.int64)
        bt = np.loadtxt(f"{prefix}_boundary.csv", delimiter=",", skiprows=1,
                        dtype=np.int64)
        return cls(nodes, cells, bt[:, :2], bt[:, 2], h)


def strip_mesh(L: float, ell: float, h: float, s0: float = 0.0) -> Mesh2D:
    """Structured right-triangle mesh of [s0, s0+L] x [0, ell].

    Boundary tags follow the strip convention: the surface t = 0 is OUTER,
    t = ell is INNER, s = s0 is SIDE_MINUS and s = s0 + L is SIDE_PLUS.
    """
    nx = max(2, int(round(L / h)) + 1)
    ny = max(2, int(round(ell / h)) + 1)
    xs = np.linspace(s0, s0 + L, nx)
    ys = np.linspace(0.0, ell, ny)
    X, Y = np.meshgrid(xs, ys, indexing="ij")
    nodes = np.column_stack([X.ravel(), Y.ravel()])

    def idx(i, j):
        return i * ny + j

    I, J = np.meshgrid(np.arange(nx - 1), np.arange(ny - 1), indexing="ij")
    i = I.ravel()
    j = J.ravel()
    t1 = np.column_stack([idx(i, j), idx(i + 1, j), idx(i + 1, j + 1)])
    t2 = np.column_stack([idx(i, j), idx(i + 1, j + 1), idx(i, j + 1)])
    cells = np.concatenate([t1, t2])

    edges = []
    tags = []
    for i in range(nx - 1):  # t = 0 and t = ell rows
        edges.append((idx(i, 0), idx(i + 1, 0)))
        tags.append(BoundaryTag.OUTER)
        edges.append((idx(i, ny - 1), idx(i + 1, ny - 1)))
        tags.append(BoundaryTag.INNER)
    for j in range(ny - 1):  # s = s0 and s = s0 + L columns
        edges.append((idx(0, j), idx(0, j + 1)))
        tags.append(BoundaryTag.SIDE_MINUS)
        edges.append((idx(nx - 1, j), idx(nx - 1, j + 1)))
        tags.append(BoundaryTag.SIDE_PLUS)

    return Mesh2D(nodes, cells, np.array(edges), np.array(tags, dtype=np.int64),
                  h=max(L / (nx - 1), ell / (ny - 1)))


def delaunay_mesh(points: np.ndarray, inside, boundary_sides, h: float,
                  snap_tol: float = 1e-9) -> Mesh2D:
    """Delaunay-triangulate a node cloud and clip to a polygonal domain.

    ``inside(centroids) -> bool mask`` keeps triangles; ``boundary_sides`` is
    a list of (tag, p0, p1) straight segments used to tag the boundary edges
    of the clipped triangulation.  Nodes not referenced by any kept triangle
    are dropped.
    """
    from scipy.spatial import Delaunay

    points = np.asarray(points, dtype=float)
    tri = Delaunay(points)
    cells = tri.simplices
    cent = points[cells].mean(axis=1)
    # drop slivers and outside cells
    p = points
    cross = np.cross(p[cells[:, 1]] - p[cells[:, 0]],
                     p[cells[:, 2]] - p[cells[:, 0]])
    keep = inside(cent) & (np.abs(cross) > 1e-12 * h * h)
    cells = cells[keep]

    used = np.unique(cells)
    remap = -np.ones(len(points), dtype=np.int64)
    remap[used] = np.arange(len(used))
    nodes = points[used]
    cells = remap[cells]

    mesh = Mesh2D(nodes, cells, np.empty((0, 2), dtype=np.int64),
                  np.empty(0, dtype=np.int64), h=h)
    bedges = mesh.computed_boundary_edges()
    tags = _tag_edges(nodes, bedges, boundary_sides, snap_tol)
    mesh.boundary_edges = bedges
    mesh.boundary_tags = tags
    return mesh


def _tag_edges(nodes, edges, sides, tol) -> np.ndarray:
    tags = np.full(len(edges), -1, dtype=np.int64)
    mids = 0.5 * (nodes[edges[:, 0]] + nodes[edges[:, 1]])
    best = np.full(len(edges), np.inf)
    for tag, p0, p1 in sides:
        p0 = np.asarray(p0, float)
        p1 = np.asarray(p1, float)
        d = _point_segment_distance(mids, p0, p1)
        closer = d < best
        tags[closer] = int(tag)
        best[closer] = d[closer]
    return tags


def _point_segment_distance(pts, p0, p1):
    v = p1 - p0
    L2 = float(v @ v)
    t = np.clip(((pts - p0) @ v) / L2, 0.0, 1.0)
    proj = p0 + t[:, None] * v
    return np.linalg.norm(pts - proj, axis=1)


def nodal_gradient(mesh: Mesh2D, phi: np.ndarray) -> np.ndarray:
    """Area-weighted average of the P1 cell gradients at the nodes."""
    p = mesh.nodes
    c = mesh.cells
    a = mesh.areas
    v0 = p[c[:, 0]]
    v1 = p[c[:, 1]]
    v2 = p[c[:, 2]]
    # grad of barycentric functions
    g0 = _perp(v2 - v1) / (2 * a)[:, None]
    g1 = _perp(v0 - v2) / (2 * a)[:, None]
    g2 = _perp(v1 - v0) / (2 * a)[:, None]
    gcell = (phi[c[:, 0], None] * g0 + phi[c[:, 1], None] * g1
             + phi[c[:, 2], None] * g2)
    out = np.zeros_like(p)
    wsum = np.zeros(len(p))
    for k in range(3):
        np.add.at(out, c[:, k], gcell * a[:, None])
        np.add.at(wsum, c[:, k], a)
    out /= wsum[:, None]
    return out


def _perp(v):
    return np.column_stack([-v[:, 1], v[:, 0]])
