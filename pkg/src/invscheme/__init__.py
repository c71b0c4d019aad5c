"""Invariant finite-difference schemes for PDEs with infinite-dimensional symmetry groups."""
from .errors import DegenerateMeshError, DivergenceError, DomainError, StencilError
from .grid import GeneralMesh, RectMesh, ScalarField, StencilCell
from .schemes import SchemeKind, nine_point_update, residual, solve_corner
from .solve import BVProblem, SolveReport, init_bvp, march_ivp, relax, solve_bvp

__all__ = [
    "BVProblem", "DegenerateMeshError", "DivergenceError", "DomainError", "GeneralMesh", "RectMesh",
    "ScalarField", "SchemeKind", "SolveReport", "StencilCell", "StencilError", "init_bvp",
    "march_ivp", "nine_point_update", "relax", "residual", "solve_bvp", "solve_corner",
]
