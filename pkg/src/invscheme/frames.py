"""Joint moving frames, invariantization and joint / differential invariants.

Every frame is a closed-form solution of its normalization equations and is
returned as *samples* of a group element (``f`` at the mesh columns, ``g``
at rows or columns).  Feeding those samples to the discretized action of
:mod:`invscheme.pseudogroup` lands the local jet on the cross-section.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import DomainError, StencilError
from .grid import (GeneralMesh, RectMesh, ScalarField, StencilCell, _need,
                   discrete_derivatives_general)
from .pseudogroup import g1_action, g2_action_raw, g3_action_raw


def _nonzero(*vals):
    for v in vals:
        if v == 0 or not np.isfinite(v):
            raise DomainError("zero or non-finite value in a denominator")


# --------------------------------------------------------------------------
# G1: X = f(x), Y = y, U = u / f_x
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class MovingFrameG1:
    """Frame anchored at ``(m, n)``: ``f_m = 0``, ``f_{m+k} = sum_{l<k} u_{m+l,n} Δx_{m+l}``.

    ``fvals[j]`` is the sample at column ``m + j``.
    """

    m: int
    n: int
    fvals: np.ndarray


def frame_g1(field: ScalarField, m, n) -> MovingFrameG1:
    mesh = field.mesh
    if not isinstance(mesh, RectMesh):
        raise TypeError("the G1 frame lives on rectangular meshes")
    _need(field, m + 1, n)
    row = field.values[m:, n]
    if np.any(row[:-1] == 0):
        raise DomainError("u_{m+k,n} must be nonzero")
    steps = row[:-1] * np.diff(mesh.xs[m:])
    return MovingFrameG1(m, n, np.concatenate([[0.0], np.cumsum(steps)]))


def normalize_g1(field: ScalarField, m, n) -> ScalarField:
    """Image of columns ``m..`` under the frame anchored at ``(m, n)``."""
    frame = frame_g1(field, m, n)
    sub = ScalarField(field.values[m:], RectMesh(field.mesh.xs[m:], field.mesh.ys))
    return g1_action(frame.fvals, sub)


G1_SYMBOLS = ("x", "y", "u", "I1", "J01", "I2", "J02", "J11", "I01", "I02", "I11")


def invariantize_g1(field: ScalarField, m, n, target, k=0, l=0):
    """Joint invariant of the discretized G1 action at base ``(m, n)``.

    ``target`` is one of ``"x"`` (``ι(x_{m+k})``), ``"y"`` (``ι(y_{n+l})``),
    ``"u"`` (``ι(u_{m+k,n+l})``) or a named invariant:

    ==========  ====================================================
    ``I1``      ``ι(Δx_m) = u Δx``
    ``J01``     ``ι(δu) = δu / u``
    ``I2``      ``ι(Δ²x_m) = u_{m+1,n} Δx_{m+1} - u_{m,n} Δx_m``
    ``J02``     ``ι(δ²u) = δ²u / u``
    ``J11``     ``ι(Δδu) = (u Δδu - δu Δu) / (u_{m+1,n} u)``
    ``I01``     ``ι(u_y) = u_y / u``
    ``I02``     ``ι(u_yy) = u_yy / u``
    ``I11``     ``ι(u_xy) = (u_{11} u_{00} - u_{10} u_{01}) / (u_{00}² u_{10} Δx δy)``
    ==========  ====================================================
    """
    mesh = field.mesh
    if not isinstance(mesh, RectMesh):
        raise TypeError("G1 invariants live on rectangular meshes")
    u = field.values
    xs, ys = mesh.xs, mesh.ys
    _need(field, m, n)
    u00 = u[m, n]
    _nonzero(u00)
    if target == "x":
        _need(field, m + k, n)
        if k > 0 and np.any(u[m:m + k, n] == 0):
            raise DomainError("u must be nonzero along the base row")
        return float(np.sum(u[m:m + k, n] * np.diff(xs[m:m + k + 1])))
    if target == "y":
        _need(field, m, n + l)
        return float(ys[n + l])
    if target == "u":
        _need(field, m + k, n + l)
        _nonzero(u[m + k, n])
        return float(u[m + k, n + l] / u[m + k, n])
    if target == "I1":
        _need(field, m + 1, n)
        return float(u00 * (xs[m + 1] - xs[m]))
    if target in ("J01", "I01"):
        _need(field, m, n + 1)
        val = (u[m, n + 1] - u00) / u00
        return float(val if target == "J01" else val / (ys[n + 1] - ys[n]))
    if target == "I2":
        _need(field, m + 2, n)
        return float(u[m + 1, n] * (xs[m + 2] - xs[m + 1]) - u00 * (xs[m + 1] - xs[m]))
    if target in ("J02", "I02"):
        _need(field, m, n + 2)
        val = (u[m, n + 2] - 2 * u[m, n + 1] + u00) / u00
        return float(val if target == "J02" else val / (ys[n + 1] - ys[n]) ** 2)
    if target in ("J11", "I11"):
        _need(field, m + 1, n + 1)
        u10, u01, u11 = u[m + 1, n], u[m, n + 1], u[m + 1, n + 1]
        _nonzero(u10)
        num = u11 * u00 - u10 * u01
        if target == "J11":
            return float(num / (u10 * u00))
        return float(num / (u00**2 * u10 * (xs[m + 1] - xs[m]) * (ys[n + 1] - ys[n])))
    raise ValueError(f"unknown target {target!r}; expected one of {G1_SYMBOLS}")


# --------------------------------------------------------------------------
# G2: X = f(x), Y = g(y), U = u / (f_x g_y)
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class MovingFrameG2:
    """Frame anchored at ``(m, n)``; ``fvals[j]`` at column ``m+j``, ``gvals[j]`` at row ``n+j``."""

    m: int
    n: int
    fvals: np.ndarray
    gvals: np.ndarray
    g1: float


def frame_g2(field: ScalarField, m, n) -> MovingFrameG2:
    """Closed-form G2 frame.

    ``g_{n+1}`` is fixed by the third cross-section relation
    ``ΔX δΔ²U - Δ²X δΔU = (ΔX)³ δY``; the other samples are partial sums::

        f_{m+k} = δy_n / g_{n+1} * sum_{l<k} u_{m+l,n} Δx_{m+l}
        g_{n+k} = g_{n+1} / (u_{m,n} δy_n) * sum_{l<k} u_{m,n+l} δy_{n+l}
    """
    mesh = field.mesh
    if not isinstance(mesh, RectMesh):
        raise TypeError("the G2 frame lives on rectangular meshes")
    _need(field, m + 2, n + 1)
    u = field.values
    xs, ys = mesh.xs, mesh.ys
    dx = np.diff(xs)
    dy = np.diff(ys)
    u00 = u[m, n]
    _nonzero(u00, u[m + 1, n], u[m + 2, n])
    r = u[m:m + 3, n + 1] / u[m:m + 3, n]           # u_{j,n+1} / u_{j,n}
    q = np.diff(r) / (u[m:m + 2, n] * dx[m:m + 2])  # Δr / (u Δx)
    denom = u[m + 1, n] * dx[m + 1] * (q[1] - q[0])
    _nonzero(denom)
    g1 = u[m, n + 1] * u00 * dx[m] ** 2 * dy[n] ** 2 / denom
    _nonzero(g1)
    row = u[m:, n]
    col = u[m, n:]
    if np.any(row[:-1] == 0) or np.any(col[:-1] == 0):
        raise DomainError("u must be nonzero along the base row and column")
    fvals = dy[n] / g1 * np.concatenate([[0.0], np.cumsum(row[:-1] * dx[m:])])
    gvals = g1 / (u00 * dy[n]) * np.concatenate([[0.0], np.cumsum(col[:-1] * dy[n:])])
    return MovingFrameG2(m, n, fvals, gvals, float(g1))


def normalize_g2(field: ScalarField, m, n):
    """``(X, Y, U)`` arrays of the frame-transformed data (columns ``m..``, rows ``n..``)."""
    frame = frame_g2(field, m, n)
    mesh = field.mesh
    return g2_action_raw(frame.fvals, frame.gvals, mesh.xs[m:], mesh.ys[n:], field.values[m:, n:])


def g2_cross_section_residuals(X, Y, U):
    """Deviations from the G2 cross-section at the corner ``(0, 0)`` of transformed data."""
    dX = X[1] - X[0]
    d2X = X[2] - 2 * X[1] + X[0]
    dDU = U[1, 1] - U[0, 1] - U[1, 0] + U[0, 0]
    dD2U = (U[2, 1] - 2 * U[1, 1] + U[0, 1]) - (U[2, 0] - 2 * U[1, 0] + U[0, 0])
    dY = Y[1] - Y[0]
    res = {
        "x_m": X[0],
        "y_n": Y[0],
        "third": dX * dD2U - d2X * dDU - dX**3 * dY,
    }
    for kk in range(U.shape[0]):
        res[f"u_{kk},0"] = U[kk, 0] - 1.0
    for kk in range(U.shape[1]):
        res[f"u_0,{kk}"] = U[0, kk] - 1.0
    return res


def iota_u_g2(field: ScalarField, m, n, k, l):
    """``ι(u_{m+k,n+l}) = u_{m+k,n+l} u_{m,n} / (u_{m+k,n} u_{m,n+l})``."""
    _need(field, m + k, n + l)
    u = field.values
    _nonzero(u[m + k, n], u[m, n + l])
    return float(u[m + k, n + l] * u[m, n] / (u[m + k, n] * u[m, n + l]))


def iota_x_g2(field: ScalarField, m, n, k):
    frame = frame_g2(field, m, n)
    return float(frame.fvals[k])


def iota_y_g2(field: ScalarField, m, n, k):
    frame = frame_g2(field, m, n)
    return float(frame.gvals[k])


def invariant_I11d_g2(cell: StencilCell):
    """``(u11 u00 - u10 u01) / (u00 u10 u01 Δx δy)``: the G2-invariant discretization of ``I_{1,1}``."""
    w = cell.window
    u00, u10, u01, u11 = w[0, 0], w[1, 0], w[0, 1], w[1, 1]
    den = u00 * u10 * u01 * cell.h * cell.k
    _nonzero(den)
    return float((u11 * u00 - u10 * u01) / den)


def naive_F(cell: StencilCell):
    """Non-invariant discretization ``(u11 u00 - u10 u01) / (u00³ Δx δy)``."""
    w = cell.window
    u00, u10, u01, u11 = w[0, 0], w[1, 0], w[0, 1], w[1, 1]
    den = u00**3 * cell.h * cell.k
    _nonzero(den)
    return float((u11 * u00 - u10 * u01) / den)


# --------------------------------------------------------------------------
# G3 (Vessiot): X = f, Y = y f_x + g, U = u + e_x / f_x
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class MovingFrameG3:
    """Frame anchored at ``(m, n)``.

    ``fq[j] = Δf_{m+j}/Δx_{m+j}`` for ``j = 0, 1, 2``; ``fvals`` (4 samples) and
    ``gvals`` (3 samples) at columns ``m..m+3`` and ``m..m+2``.
    """

    m: int
    n: int
    fq: np.ndarray
    fvals: np.ndarray
    gvals: np.ndarray


def _general(field):
    mesh = field.mesh
    if isinstance(mesh, RectMesh):
        mesh = GeneralMesh.from_rect(mesh)
    if not isinstance(mesh, GeneralMesh):
        raise TypeError("G3 computations need a GeneralMesh")
    return mesh


def _sqrt_uyy(uyy):
    if not uyy > 0:
        raise DomainError("u_yy must be positive (cross-section requires U_YY = 1)")
    return np.sqrt(uyy)


def frame_g3(field: ScalarField, m, n) -> MovingFrameG3:
    """Solve ``X = Y = U = U_X = U_Y = U_XY = 0``, ``U_YY = 1`` at ``(m, n)``.

    ::

        F_m     = sqrt(u_yy)
        F_{m+1} = F_m (1 - Δx_m δu_{m,n} / δy_{m+1,n})
        F_{m+2} = F_{m+1} (1 + Δx_{m+1}/δy_{m+2,n} [δy_{m,n}(Δy_{m,n} - Δx_m u_{m,n}) u_yy - δu_{m+1,n}])
        e_{m+j+1,n} = e_{m+j,n} + F_{m+j} (Δy_{m+j,n} - Δx_{m+j} u_{m+j,n}),   e_{m,n} = 0
    """
    mesh = _general(field)
    _need(field, m + 3, n + 2)
    u = field.values
    Y = mesh.y_grid()
    dx = np.diff(mesh.xs)[m:m + 3]
    dy = Y[m:m + 3, n + 1] - Y[m:m + 3, n]          # δy_{m+j,n}
    Dy = Y[m + 1:m + 3, n] - Y[m:m + 2, n]          # Δy_{m+j,n}, j = 0, 1
    du = u[m:m + 2, n + 1] - u[m:m + 2, n]          # δu_{m+j,n}, j = 0, 1
    uyy = (u[m, n + 2] - 2 * u[m, n + 1] + u[m, n]) / dy[0] ** 2
    F0 = _sqrt_uyy(uyy)
    F1 = F0 * (1 - dx[0] * du[0] / dy[1])
    F2 = F1 * (1 + dx[1] / dy[2] * (dy[0] * (Dy[0] - dx[0] * u[m, n]) * uyy - du[1]))
    fq = np.array([F0, F1, F2])
    if np.any(fq == 0):
        raise DomainError("degenerate frame: a difference quotient of f vanishes")
    fvals = np.concatenate([[0.0], np.cumsum(fq * dx)])
    e = np.zeros(3)
    e[1] = F0 * (Dy[0] - dx[0] * u[m, n])
    e[2] = e[1] + F1 * (Dy[1] - dx[1] * u[m + 1, n])
    gvals = e - Y[m:m + 3, n] * fq
    return MovingFrameG3(m, n, fq, fvals, gvals)


def normalize_g3(field: ScalarField, m, n) -> ScalarField:
    """Frame-transformed data on the two columns ``m, m+1`` (as a :class:`GeneralMesh` field)."""
    frame = frame_g3(field, m, n)
    mesh = _general(field)
    Y = mesh.y_grid()[m:m + 4]
    X, E, U = g3_action_raw(frame.fvals, frame.gvals, mesh.xs[m:m + 4], Y, field.values[m:m + 4])
    slope = E[:, 1] - E[:, 0]
    return ScalarField(U, GeneralMesh(X, slope, E[:, 0], mesh.N))


class G3Invariants(NamedTuple):
    I03d: float
    I12d: float
    iota_dx: float
    iota_dy_forward: float
    iota_dy_vertical: float


def invariants_g3(field: ScalarField, m, n) -> G3Invariants:
    """Normalized joint invariants of the discretized Vessiot action at ``(m, n)``."""
    mesh = _general(field)
    d = discrete_derivatives_general(field, m, n)
    s = _sqrt_uyy(d.uyy)
    Y = mesh.y_grid()
    u = field.values[m, n]
    dx = mesh.xs[m + 1] - mesh.xs[m]
    Dy = Y[m + 1, n] - Y[m, n]
    dy = Y[m, n + 1] - Y[m, n]
    return G3Invariants(
        I03d=float(d.uyyy / s**3),
        I12d=float((d.uxyy + u * d.uyyy + 2 * d.uy * d.uyy) / s**3),
        iota_dx=float(dx * s),
        iota_dy_forward=float((Dy - u * dx) * s),
        iota_dy_vertical=float(dy * s),
    )


# --------------------------------------------------------------------------
# continuous differential invariants (limits of the joint invariants)
# --------------------------------------------------------------------------

def continuous_invariant_I11(u, ux, uy, uxy):
    """``(u u_xy - u_x u_y) / u³``."""
    if np.any(np.asarray(u) == 0):
        raise DomainError("u must be nonzero")
    return (u * uxy - ux * uy) / u**3


class G1NormalizedInvariants(NamedTuple):
    I1: float
    I2: float
    J01: float
    J02: float
    J11: float


def continuous_normalized_invariants_g1(u, u_s, u_t, u_tt, u_st, x_s, x_ss):
    """Normalized differential invariants of G1 in computational variables ``(s, t)``."""
    if u == 0:
        raise DomainError("u must be nonzero")
    return G1NormalizedInvariants(
        I1=u * x_s,
        I2=u_s * x_s + u * x_ss,
        J01=u_t / u,
        J02=u_tt / u,
        J11=(u * u_st - u_t * u_s) / u**2,
    )


def continuous_invariants_g3(u, uy, uyy, uyyy, uxyy):
    """``(I_{0,3}, I_{1,2})`` for the Vessiot group."""
    s = _sqrt_uyy(uyy)
    return uyyy / s**3, (uxyy + u * uyyy + 2 * uy * uyy) / s**3


def cell_at(field: ScalarField, m, n) -> StencilCell:
    if m < 0 or n < 0:
        raise StencilError("negative index")
    return StencilCell.from_field(field, m, n)
