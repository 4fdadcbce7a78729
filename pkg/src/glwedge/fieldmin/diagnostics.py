"""Decay diagnostics and field I/O.

The Agmon-type diagnostic bins max|psi| by the distance to the OUTER
boundary and fits an exponential envelope on the window [2, l-2]; surface
superconductivity shows super-linear (Gaussian-like) decay there, so the
fitted rate is well above the loose acceptance floor 0.2 for b <= 1.6.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass

import numpy as np

from .assembly import ComplexField
from .mesh import BoundaryTag, Mesh2D, _point_segment_distance

__all__ = ["AgmonReport", "agmon_decay_profile", "distance_to_tag",
           "write_field_csv", "read_field_csv"]


@dataclass
class AgmonReport:
    ok: bool
    rate: float
    envelope: float
    n_bins: int
    flagged: str = ""


def distance_to_tag(mesh: Mesh2D, tag: BoundaryTag,
                    pts: np.ndarray | None = None) -> np.ndarray:
    """Distance from nodes (or given points) to the tagged boundary edges."""
    if pts is None:
        pts = mesh.nodes
    edges = mesh.edges_with_tag(tag)
    if len(edges) == 0:
        raise ValueError(f"mesh has no edges tagged {tag!r}")
    d = np.full(len(pts), np.inf)
    for a, b in edges:
        d = np.minimum(d, _point_segment_distance(pts, mesh.nodes[a],
                                                  mesh.nodes[b]))
    return d


def agmon_decay_profile(psi: ComplexField, mesh: Mesh2D | None = None,
                        bin_width: float = 0.25,
                        fit_lo: float = 2.0, fit_margin: float = 2.0,
                        rate_floor: float = 0.2) -> AgmonReport:
    """Fit log max|psi| against distance to the OUTER boundary.

    Returns the fitted decay rate and envelope constant; ``ok`` requires
    rate >= rate_floor.  A vanishing field is flagged, not an error.
    """
    mesh = mesh or psi.mesh
    d = distance_to_tag(mesh, BoundaryTag.OUTER)
    mag = psi.abs()
    if float(mag.max()) <= 0.0:
        return AgmonReport(ok=False, rate=float("nan"), envelope=0.0,
                           n_bins=0, flagged="field identically zero")
    dmax = float(d.max())
    hi = dmax - fit_margin
    if hi - fit_lo < 2 * bin_width:
        raise ValueError("domain too shallow for the decay fit window")
    nb = int(np.ceil(dmax / bin_width))
    which = np.minimum((d / bin_width).astype(int), nb - 1)
    peak = np.zeros(nb)
    np.maximum.at(peak, which, mag)
    centers = (np.arange(nb) + 0.5) * bin_width
    sel = (centers >= fit_lo) & (centers <= hi) & (peak > 0)
    if sel.sum() < 3:
        return AgmonReport(ok=False, rate=float("nan"), envelope=0.0,
                           n_bins=int(sel.sum()), flagged="empty fit window")
    coef = np.polyfit(centers[sel], np.log(peak[sel]), 1)
    rate = float(-coef[0])
    env = float(np.exp(coef[1]))
    return AgmonReport(ok=rate >= rate_floor, rate=rate, envelope=env,
                       n_bins=int(sel.sum()))


def write_field_csv(path: str, psi: ComplexField, metadata: dict) -> None:
    """Dump x,y,re,im,abs rows plus a JSON sidecar with the mesh hash."""
    mesh = psi.mesh
    v = psi.values
    data = np.column_stack([mesh.nodes[:, 0], mesh.nodes[:, 1],
                            v.real, v.imag, np.abs(v)])
    np.savetxt(path, data, delimiter=",", header="x,y,re,im,abs",
               comments="", fmt="%.17g")
    meta = dict(metadata)
    meta["mesh_hash"] = mesh.content_hash()
    with open(path + ".json", "w") as fh:
        json.dump(meta, fh, indent=1, sort_keys=True)
        fh.write("\n")


def read_field_csv(path: str, mesh: Mesh2D) -> ComplexField:
    data = np.loadtxt(path, delimiter=",", skiprows=1)
    return ComplexField(mesh, data[:, 2] + 1j * data[:, 3])
