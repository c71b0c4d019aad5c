"""Meshes, scalar fields and forward-difference derivative approximations.

Index convention: ``values[m, n]`` is the sample at ``(x_m, y_n)`` (or
``(x_m, y_{m,n})`` on a :class:`GeneralMesh`); ``m`` runs along x.
Forward differences are written ``Δ`` (in m) and ``δ`` (in n).
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Union

import numpy as np

from .errors import DegenerateMeshError, DomainError, StencilError


def _as_1d(a, name):
    arr = np.array(a, dtype=float)
    if arr.ndim != 1:
        raise DegenerateMeshError(f"{name} must be one-dimensional")
    if not np.all(np.isfinite(arr)):
        raise DegenerateMeshError(f"{name} contains non-finite entries")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class RectMesh:
    """Rectangular mesh ``(x_m, y_n)`` with variable steps.

    Encodes the mesh equations ``δx = 0`` and ``Δy = 0``.  Both coordinate
    arrays must be strictly increasing.
    """

    xs: np.ndarray
    ys: np.ndarray

    def __post_init__(self):
        xs = _as_1d(self.xs, "xs")
        ys = _as_1d(self.ys, "ys")
        if xs.size < 2 or ys.size < 2:
            raise DegenerateMeshError("a mesh needs at least two nodes per direction")
        if np.any(np.diff(xs) <= 0):
            raise DegenerateMeshError("xs must be strictly increasing")
        if np.any(np.diff(ys) <= 0):
            raise DegenerateMeshError("ys must be strictly increasing")
        object.__setattr__(self, "xs", xs)
        object.__setattr__(self, "ys", ys)

    @classmethod
    def uniform(cls, x0, y0, h, k, M, N):
        """``M x N`` mesh with constant steps ``h``, ``k`` starting at ``(x0, y0)``."""
        return cls(x0 + h * np.arange(M), y0 + k * np.arange(N))

    @classmethod
    def square(cls, x0, y0, side, h, k=None):
        """Mesh covering ``[x0, x0+side] x [y0, y0+side]`` with steps ``h``, ``k``."""
        k = h if k is None else k
        M = int(round(side / h)) + 1
        N = int(round(side / k)) + 1
        return cls.uniform(x0, y0, h, k, M, N)

    @property
    def shape(self):
        return (self.xs.size, self.ys.size)

    @property
    def dx(self):
        return np.diff(self.xs)

    @property
    def dy(self):
        return np.diff(self.ys)

    def x_grid(self):
        return np.broadcast_to(self.xs[:, None], self.shape)

    def y_grid(self):
        return np.broadcast_to(self.ys[None, :], self.shape)

    def sample(self, fn):
        """Evaluate ``fn(x, y)`` on every node and wrap it as a :class:`ScalarField`."""
        X, Y = np.meshgrid(self.xs, self.ys, indexing="ij")
        return ScalarField(np.asarray(fn(X, Y), dtype=float), self)


@dataclass(frozen=True, eq=False)
class GeneralMesh:
    """Mesh with ``x_{m,n} = x_m`` and ``y_{m,n} = n*a_m + b_m``.

    This is the general solution of ``δx = 0``, ``δ²y = 0``.  Column ``m``
    is a vertical line with constant spacing ``a_m`` (which may differ from
    column to column), so ``Δy`` need not vanish.
    """

    xs: np.ndarray
    y_slope: np.ndarray
    y_offset: np.ndarray
    N: int

    def __post_init__(self):
        xs = _as_1d(self.xs, "xs")
        a = _as_1d(self.y_slope, "y_slope")
        b = _as_1d(self.y_offset, "y_offset")
        if not (xs.size == a.size == b.size):
            raise DegenerateMeshError("xs, y_slope and y_offset must have equal length")
        if xs.size < 2 or self.N < 2:
            raise DegenerateMeshError("a mesh needs at least two nodes per direction")
        if np.any(np.diff(xs) == 0) or not (np.all(np.diff(xs) > 0) or np.all(np.diff(xs) < 0)):
            raise DegenerateMeshError("Δx_m must be nonzero with a fixed sign")
        if np.any(a == 0):
            raise DegenerateMeshError("y_slope must be nonzero (δy ≠ 0)")
        object.__setattr__(self, "xs", xs)
        object.__setattr__(self, "y_slope", a)
        object.__setattr__(self, "y_offset", b)
        object.__setattr__(self, "N", int(self.N))

    @classmethod
    def from_rect(cls, mesh: RectMesh):
        """View a uniform-in-y :class:`RectMesh` as a general mesh."""
        dy = mesh.dy
        if not np.allclose(dy, dy[0], rtol=1e-12, atol=0):
            raise DegenerateMeshError("only meshes with constant δy are of the form n*a + b")
        M, N = mesh.shape
        return cls(mesh.xs, np.full(M, dy[0]), np.full(M, mesh.ys[0]), N)

    @property
    def shape(self):
        return (self.xs.size, self.N)

    @property
    def dx(self):
        return np.diff(self.xs)

    def x_grid(self):
        return np.broadcast_to(self.xs[:, None], self.shape)

    def y_grid(self):
        n = np.arange(self.N)
        return self.y_slope[:, None] * n[None, :] + self.y_offset[:, None]

    def sample(self, fn):
        return ScalarField(np.asarray(fn(self.x_grid(), self.y_grid()), dtype=float), self)


Mesh = Union[RectMesh, GeneralMesh]


@dataclass(frozen=True, eq=False)
class ScalarField:
    """Values ``u_{m,n}`` on a mesh.  ``diverged`` marks fields allowed to hold NaN/inf."""

    values: np.ndarray
    mesh: Mesh
    diverged: bool = False

    def __post_init__(self):
        vals = np.array(self.values, dtype=float)
        if vals.shape != self.mesh.shape:
            raise ValueError(f"values shape {vals.shape} does not match mesh {self.mesh.shape}")
        if not self.diverged and not np.all(np.isfinite(vals)):
            raise DomainError("field values must be finite unless flagged diverged")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @property
    def shape(self):
        return self.values.shape

    def x_grid(self):
        return self.mesh.x_grid()

    def y_grid(self):
        return self.mesh.y_grid()


@dataclass(frozen=True)
class StencilCell:
    """A 2x2 (or 3x3) window ``window[i, j] = u_{m+i, n+j}`` with its steps."""

    m: int
    n: int
    window: np.ndarray
    h: float
    k: float

    def __post_init__(self):
        w = np.array(self.window, dtype=float)
        if w.shape not in ((2, 2), (3, 3)):
            raise ValueError("window must be 2x2 or 3x3")
        if not (self.h > 0 and self.k > 0):
            raise DegenerateMeshError("cell steps must be positive")
        object.__setattr__(self, "window", w)

    @classmethod
    def from_field(cls, field: ScalarField, m, n, size=2):
        if not isinstance(field.mesh, RectMesh):
            raise TypeError("stencil cells live on rectangular meshes")
        _need(field, m + size - 1, n + size - 1)
        mesh = field.mesh
        return cls(m, n, field.values[m:m + size, n:n + size],
                   mesh.xs[m + 1] - mesh.xs[m], mesh.ys[n + 1] - mesh.ys[n])


def _need(field, m, n):
    M, N = field.shape
    if not 0 <= m < M:
        raise StencilError(f"index m={m} outside 0..{M - 1}")
    if not 0 <= n < N:
        raise StencilError(f"index n={n} outside 0..{N - 1}")


def forward_dx(field: ScalarField, m, n):
    """``Δu_{m,n} = u_{m+1,n} - u_{m,n}``."""
    _need(field, m + 1, n)
    _need(field, m, n)
    u = field.values
    return u[m + 1, n] - u[m, n]


def forward_dy(field: ScalarField, m, n):
    """``δu_{m,n} = u_{m,n+1} - u_{m,n}``."""
    _need(field, m, n + 1)
    _need(field, m, n)
    u = field.values
    return u[m, n + 1] - u[m, n]


class RectDerivatives(NamedTuple):
    ux: float
    uy: float
    uxy: float
    uyy: float


class GeneralDerivatives(NamedTuple):
    ux: float
    uy: float
    uxy: float
    uyy: float
    uyyy: float
    uxyy: float


def discrete_derivatives_rect(field: ScalarField, m, n):
    """Forward-difference ``u_x, u_y, u_xy, u_yy`` at ``(m, n)`` on a rectangular mesh.

    ``uyy`` needs the row ``n+2``; it is NaN when that row is missing.
    """
    mesh = field.mesh
    if not isinstance(mesh, RectMesh):
        raise TypeError("discrete_derivatives_rect needs a RectMesh")
    _need(field, m + 1, n + 1)
    _need(field, m, n)
    u = field.values
    h = mesh.xs[m + 1] - mesh.xs[m]
    k = mesh.ys[n + 1] - mesh.ys[n]
    du = u[m + 1, n] - u[m, n]
    dv = u[m, n + 1] - u[m, n]
    ddv = u[m + 1, n + 1] - u[m + 1, n] - u[m, n + 1] + u[m, n]
    if n + 2 < field.shape[1]:
        uyy = (u[m, n + 2] - 2 * u[m, n + 1] + u[m, n]) / k**2
    else:
        uyy = np.nan
    return RectDerivatives(du / h, dv / k, ddv / (h * k), uyy)


def discrete_derivatives_general(field: ScalarField, m, n):
    """Forward-difference derivatives on a :class:`GeneralMesh`.

    Implements the computational-variable expressions for ``x_t = 0``,
    ``y_tt = 0`` with ``D_s -> Δ`` and ``D_t -> δ``::

        u_y   = δu/δy
        u_x   = (δy Δu - Δy δu) / (Δx δy)
        u_yy  = δ²u/δy²
        u_xy  = (δy Δδu - Δδy δu - Δy δ²u) / (Δx δy²)
        u_yyy = δ³u/δy³
        u_xyy = (δy Δδ²u - 2 δ²u Δδy - Δy δ³u) / (Δx δy³)

    The ``u_xy`` middle term carries ``δu`` (the discrete ``y_st u_t``).
    Requires columns ``m, m+1`` and rows ``n .. n+3``.
    """
    mesh = field.mesh
    if isinstance(mesh, RectMesh):
        mesh = GeneralMesh.from_rect(mesh)
    _need(field, m + 1, n + 3)
    _need(field, m, n)
    u = field.values
    Y = mesh.y_grid()
    dx = mesh.xs[m + 1] - mesh.xs[m]
    if dx == 0:
        raise DegenerateMeshError("Δx_m = 0")
    dy = Y[m, n + 1] - Y[m, n]
    Dy = Y[m + 1, n] - Y[m, n]
    Ddy = (Y[m + 1, n + 1] - Y[m + 1, n]) - dy

    def d(col, order):
        c = u[col, n:n + order + 1]
        return np.diff(c, order)[0]

    Du = u[m + 1, n] - u[m, n]
    du = d(m, 1)
    d2u = d(m, 2)
    d3u = d(m, 3)
    Ddu = d(m + 1, 1) - du
    Dd2u = d(m + 1, 2) - d2u
    return GeneralDerivatives(
        ux=(dy * Du - Dy * du) / (dx * dy),
        uy=du / dy,
        uxy=(dy * Ddu - Ddy * du - Dy * d2u) / (dx * dy**2),
        uyy=d2u / dy**2,
        uyyy=d3u / dy**3,
        uxyy=(dy * Dd2u - 2 * d2u * Ddy - Dy * d3u) / (dx * dy**3),
    )


def require_nonzero(values, what="u"):
    if np.any(np.asarray(values) == 0):
        raise DomainError(f"{what} must be nonzero")
