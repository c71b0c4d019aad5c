"""Corner marching, four-corner initialization and Gauss-Seidel relaxation."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import _kernels
from .errors import DegenerateMeshError, DivergenceError, DomainError
from .grid import RectMesh, ScalarField
from .schemes import CORNERS, NEWTON_MAX_ITER, NEWTON_TOL, SchemeKind, forms_for, newton_scalar

__all__ = ["BVProblem", "SolveReport", "march_ivp", "init_bvp", "relax", "solve_bvp", "newton_scalar"]


def _kind_code(kind):
    return 1 if SchemeKind.parse(kind) is SchemeKind.INVARIANT else 0


def _corner_code(corner):
    try:
        return CORNERS.index(corner)
    except ValueError:
        raise ValueError(f"unknown corner {corner!r}; expected one of {CORNERS}") from None


def _edge_slices(corner, M, N):
    """Row and column (as index tuples) of the two edges meeting at ``corner``."""
    i = 0 if corner in ("BL", "TL") else M - 1
    j = 0 if corner in ("BL", "BR") else N - 1
    return (slice(None), j), (i, slice(None))


def march_ivp(mesh: RectMesh, x_edge, y_edge, kind, corner="BL") -> ScalarField:
    """Fill the mesh cell by cell from ``corner`` given its two adjacent edges.

    ``x_edge`` (length M) holds u along the horizontal edge through the corner,
    ``y_edge`` (length N) along the vertical one.  Each node is the solved
    form of the cell lying towards the starting corner.  Raises
    :class:`DivergenceError` (with ``.index``) at the first non-finite or
    exploding value.
    """
    M, N = mesh.shape
    x_edge = np.asarray(x_edge, dtype=float)
    y_edge = np.asarray(y_edge, dtype=float)
    if x_edge.shape != (M,) or y_edge.shape != (N,):
        raise ValueError("edge lengths must match the mesh")
    _corner_code(corner)
    row, col = _edge_slices(corner, M, N)
    U = np.full((M, N), np.nan)
    U[row] = x_edge
    U[col] = y_edge
    ci, cj = col[0], row[1]
    if x_edge[ci] != y_edge[cj]:
        raise ValueError("the two edges disagree at the corner")
    if np.any(x_edge == 0) or np.any(y_edge == 0):
        raise DomainError("edge values must be nonzero")
    _march(U, mesh, kind, corner, interior=False)
    return ScalarField(U, mesh)


def _march(U, mesh, kind, corner, interior):
    fi, fj = _kernels.fill(U, mesh.xs, mesh.ys, _kind_code(kind), _corner_code(corner),
                           NEWTON_TOL, NEWTON_MAX_ITER, interior)
    if fi >= 0:
        raise DivergenceError(f"{corner} march diverged at {(fi, fj)}", index=(int(fi), int(fj)))


@dataclass(frozen=True, eq=False)
class BVProblem:
    """Dirichlet problem for the nine-point relaxation.

    Only the edge entries of ``boundary`` (shape ``mesh.shape``) are used.
    With ``fallback`` set, corner fills that blow up are dropped from the
    initial average instead of failing the initialization.
    """

    mesh: RectMesh
    boundary: np.ndarray
    kind: SchemeKind
    iterations: int = 100
    tolerance: Optional[float] = None
    forms: int = 4
    fallback: bool = False

    def __post_init__(self):
        b = np.array(self.boundary, dtype=float)
        M, N = self.mesh.shape
        if b.shape != (M, N):
            raise ValueError(f"boundary shape {b.shape} does not match the mesh {(M, N)}")
        if M < 3 or N < 3:
            raise DegenerateMeshError("a boundary value problem needs at least a 3x3 mesh")
        edges = np.concatenate([b[0], b[-1], b[:, 0], b[:, -1]])
        if not np.all(np.isfinite(edges)) or np.any(edges == 0):
            raise DomainError("boundary values must be finite and nonzero")
        if self.iterations < 0:
            raise ValueError("iterations must be non-negative")
        forms_for(self.forms)
        b.setflags(write=False)
        object.__setattr__(self, "boundary", b)
        object.__setattr__(self, "kind", SchemeKind.parse(self.kind))

    @classmethod
    def from_function(cls, mesh, fn, kind, **kw):
        return cls(mesh, fn(*np.meshgrid(mesh.xs, mesh.ys, indexing="ij")), kind, **kw)


@dataclass(frozen=True)
class SolveReport:
    field: ScalarField
    iterations_run: int
    max_update_last_sweep: float
    diverged: bool
    failing_index: Optional[tuple] = None


def _corner_fills(problem):
    """Interior marches from each corner; the far edges are boundary data and are not recomputed."""
    fills, failed = [], []
    for corner in CORNERS:
        U = problem.boundary.copy()
        try:
            _march(U, problem.mesh, problem.kind, corner, interior=True)
            fills.append(U)
        except DivergenceError as exc:
            failed.append((corner, exc.index))
    return fills, failed


def init_bvp(problem: BVProblem) -> ScalarField:
    """Interior = mean of the four corner marches; boundary copied exactly.

    A diverging march raises :class:`DivergenceError` unless
    ``problem.fallback`` is set, in which case the finite marches are
    averaged (all four failing still raises).
    """
    fills, failed = _corner_fills(problem)
    if failed and (not problem.fallback or not fills):
        corner, index = failed[0]
        raise DivergenceError(f"{corner} corner fill diverged at {index}", index=index)
    U = problem.boundary.copy()
    U[1:-1, 1:-1] = np.mean([f[1:-1, 1:-1] for f in fills], axis=0)
    return ScalarField(U, problem.mesh)


def relax(problem: BVProblem, initial: ScalarField) -> SolveReport:
    """Gauss-Seidel sweeps of the nine-point update, left to right then bottom to top.

    On a non-finite or exploding update the sweep stops, the field keeps its
    last finite values and the report is marked diverged.
    """
    if initial.mesh.shape != problem.mesh.shape:
        raise ValueError("initial field does not match the problem mesh")
    U = np.array(initial.values, dtype=float)
    U[0], U[-1], U[:, 0], U[:, -1] = (problem.boundary[0], problem.boundary[-1],
                                      problem.boundary[:, 0], problem.boundary[:, -1])
    xs, ys = problem.mesh.xs, problem.mesh.ys
    kind = _kind_code(problem.kind)
    mx = 0.0
    for it in range(1, problem.iterations + 1):
        mx, fi, fj = _kernels.sweep(U, xs, ys, kind, problem.forms, NEWTON_TOL, NEWTON_MAX_ITER)
        if fi >= 0:
            return SolveReport(ScalarField(U, problem.mesh), it, float(mx), True, (int(fi), int(fj)))
        if problem.tolerance is not None and mx < problem.tolerance:
            break
    else:
        it = problem.iterations
    return SolveReport(ScalarField(U, problem.mesh), it, float(mx), False)


def solve_bvp(problem: BVProblem) -> SolveReport:
    """Initialize then relax; a failed initialization yields a diverged report."""
    try:
        init = init_bvp(problem)
    except DivergenceError as exc:
        U = problem.boundary.copy()
        U[1:-1, 1:-1] = np.nan
        return SolveReport(ScalarField(U, problem.mesh, diverged=True), 0, float("nan"), True, exc.index)
    return relax(problem, init)
