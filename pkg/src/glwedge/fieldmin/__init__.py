"""Generic 2D machinery: meshes, discrete GL energy, minimizer, diagnostics."""

from .assembly import (BoundaryCondition, BoundaryLineTerm, BoundarySpec,
                       ComplexField, DiscreteProblem, assemble_energy,
                       assemble_gradient)
from .diagnostics import (AgmonReport, agmon_decay_profile, distance_to_tag,
                          read_field_csv, write_field_csv)
from .mesh import (BoundaryTag, Mesh2D, MeshQualityError, delaunay_mesh,
                   nodal_gradient, strip_mesh)
from .minimize import MinimizeReport, minimize, minimize_problem
from .potential import PotentialField, discrete_curl

__all__ = [
    "BoundaryCondition", "BoundaryLineTerm", "BoundarySpec", "BoundaryTag",
    "ComplexField", "DiscreteProblem", "Mesh2D", "MeshQualityError",
    "MinimizeReport", "PotentialField", "AgmonReport",
    "agmon_decay_profile", "assemble_energy", "assemble_gradient",
    "delaunay_mesh", "discrete_curl", "distance_to_tag", "minimize",
    "minimize_problem", "nodal_gradient", "read_field_csv", "strip_mesh",
    "write_field_csv",
]
