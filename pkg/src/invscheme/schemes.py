"""Invariant and standard discretizations of ``(u u_xy - u_x u_y) / u³ = 1``.

On a cell with corners ``u00, u10, u01, u11`` and steps ``h, k``::

    invariant:  (u11 u00 - u10 u01) / (u00 u10 u01 h k) = 1
    standard:   (u11 u00 - u10 u01) / (u00³ h k)        = 1

The centre ``C`` of a 3x3 window sits in four cells.  Each cell equation is
solved for ``C``; the cells are named by their position relative to ``C``
(``BL`` is the cell whose top-right corner is ``C``, and so on).  The
windows here are indexed ``window[i, j]`` with ``i`` along x, centre at
``[1, 1]``.
"""
from __future__ import annotations

import enum
from typing import Callable, NamedTuple

import numpy as np

from .errors import DivergenceError, DomainError
from ._kernels import real_root_near
from .grid import StencilCell


class SchemeKind(enum.Enum):
    STANDARD = "standard"
    INVARIANT = "invariant"

    @classmethod
    def parse(cls, value):
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise ValueError(f"unknown scheme {value!r}; expected 'standard' or 'invariant'") from None


CORNERS = ("BL", "BR", "TL", "TR")
NEWTON_TOL = 1e-12
NEWTON_MAX_ITER = 50


def newton_scalar(f, df, seed, tol=NEWTON_TOL, max_iter=NEWTON_MAX_ITER):
    """Newton iteration stopped once ``|Δu| <= tol (1 + |u|)``."""
    u = float(seed)
    for _ in range(max_iter):
        d = df(u)
        if d == 0 or not np.isfinite(d):
            raise DomainError(f"derivative vanished or overflowed at u={u!r}")
        step = f(u) / d
        u -= step
        if not np.isfinite(u):
            raise DivergenceError("Newton iterate left the reals")
        if abs(step) <= tol * (1 + abs(u)):
            return u
    raise DivergenceError(f"Newton did not converge in {max_iter} iterations")


def _corners(cell: StencilCell):
    w = cell.window
    return w[0, 0], w[1, 0], w[0, 1], w[1, 1]


def residual(kind, cell: StencilCell) -> float:
    """Cell residual of the chosen scheme (zero on an exact discrete solution)."""
    kind = SchemeKind.parse(kind)
    u00, u10, u01, u11 = _corners(cell)
    cross = u11 * u00 - u10 * u01
    if kind is SchemeKind.INVARIANT:
        den = u00 * u10 * u01 * cell.h * cell.k
    else:
        den = u00**3 * cell.h * cell.k
    if den == 0 or not np.isfinite(den):
        raise DomainError("zero denominator in the cell residual")
    return float(cross / den - 1.0)


def _steps(h, k):
    hl, hr = (h, h) if np.isscalar(h) else h
    kb, kt = (k, k) if np.isscalar(k) else k
    return hl, hr, kb, kt


def _cubic_root(hk, d, P, seed):
    """Newton from ``seed``; if that cycles, Newton polish of the nearest closed-form real root."""
    f = lambda u: hk * u**3 - d * u + P  # noqa: E731
    df = lambda u: 3 * hk * u * u - d  # noqa: E731
    try:
        return newton_scalar(f, df, seed)
    except (DivergenceError, DomainError):
        return newton_scalar(f, df, float(real_root_near(hk, d, P, seed)))


def solve_corner(kind, which, window, h, k, seed=None) -> float:
    """Centre value that zeroes the residual of cell ``which``.

    ``h`` and ``k`` are scalars or ``(left, right)`` / ``(bottom, top)`` pairs.
    ``seed`` starts the Newton solve of the standard ``TR`` cubic; it
    defaults to the root of the linear part, ``P / d``.
    """
    kind = SchemeKind.parse(kind)
    w = np.asarray(window, dtype=float)
    if w.shape != (3, 3):
        raise ValueError("window must be 3x3")
    hl, hr, kb, kt = _steps(h, k)
    inv = kind is SchemeKind.INVARIANT
    with np.errstate(divide="raise", invalid="raise", over="raise"):
        try:
            if which == "BL":
                a, b, c, hk = w[0, 0], w[1, 0], w[0, 1], hl * kb
                _check(a)
                return float(b * c * (1 / a + hk) if inv else (b * c + hk * a**3) / a)
            if which == "BR":
                a, r, d, hk = w[1, 0], w[2, 1], w[2, 0], hr * kb
                _check(d, 1 + hk * a if inv else 1)
                return float(a * r / (d * (1 + hk * a)) if inv else (r * a - hk * a**3) / d)
            if which == "TL":
                a, t, l, hk = w[0, 1], w[1, 2], w[0, 2], hl * kt
                _check(l, 1 + hk * a if inv else 1)
                return float(a * t / (l * (1 + hk * a)) if inv else (t * a - hk * a**3) / l)
            if which == "TR":
                r, t, d, hk = w[2, 1], w[1, 2], w[2, 2], hr * kt
                P = r * t
                if inv:
                    _check(d - hk * P)
                    return float(P / (d - hk * P))
                _check(d)
                return _cubic_root(hk, d, P, P / d if seed is None else seed)
        except FloatingPointError as exc:
            raise DomainError(str(exc)) from None
    raise ValueError(f"unknown corner {which!r}; expected one of {CORNERS}")


def _check(*dens):
    for v in dens:
        if v == 0 or not np.isfinite(v):
            raise DomainError("zero pivot in a solved corner form")


class SolvedForms(NamedTuple):
    """The four corner solves of one scheme, with a linearity flag per form."""

    kind: SchemeKind
    evaluators: tuple[Callable, ...]
    linear: tuple[bool, ...]


def solved_forms(kind) -> SolvedForms:
    kind = SchemeKind.parse(kind)

    def make(which):
        def form(window, h, k, seed=None):
            return solve_corner(kind, which, window, h, k, seed)
        form.__name__ = f"{kind.value}_{which}"
        return form

    linear = tuple(not (kind is SchemeKind.STANDARD and w == "TR") for w in CORNERS)
    return SolvedForms(kind, tuple(make(w) for w in CORNERS), linear)


def forms_for(nforms):
    """Corner cells averaged by the nine-point update: all four, or the first three."""
    if nforms == 4:
        return CORNERS
    if nforms == 3:
        return CORNERS[:3]
    raise ValueError("nforms must be 3 or 4")


def nine_point_update(kind, window, h, k, current=None, forms=4) -> float:
    """Mean of the corner solves for the window centre.

    Any failing corner (domain error or Newton failure) raises
    :class:`DivergenceError`.
    """
    w = np.asarray(window, dtype=float)
    if not np.all(np.isfinite(w[np.arange(9).reshape(3, 3) != 4])):
        raise DivergenceError("non-finite neighbour in the nine-point window")
    seed = w[1, 1] if current is None else current
    vals = []
    for which in forms_for(forms):
        try:
            vals.append(solve_corner(kind, which, w, h, k, seed=seed))
        except DomainError as exc:
            raise DivergenceError(f"{which} form failed: {exc}") from None
    return float(np.mean(vals))


def cell_residuals(kind, values, xs, ys) -> np.ndarray:
    """Residuals of every cell of a field, shape ``(M-1, N-1)``."""
    kind = SchemeKind.parse(kind)
    u = np.asarray(values, dtype=float)
    hk = np.diff(xs)[:, None] * np.diff(ys)[None, :]
    u00, u10, u01, u11 = u[:-1, :-1], u[1:, :-1], u[:-1, 1:], u[1:, 1:]
    cross = u11 * u00 - u10 * u01
    den = u00 * u10 * u01 * hk if kind is SchemeKind.INVARIANT else u00**3 * hk
    if np.any(den == 0):
        raise DomainError("zero denominator in a cell residual")
    return cross / den - 1.0


def nine_point_residuals(kind, values, xs, ys, forms=4) -> np.ndarray:
    """``centre - mean(corner solves)`` at every interior node, shape ``(M-2, N-2)``.

    Zero exactly at fixed points of the relaxation.  The standard ``TR``
    cubic is seeded at the centre value.
    """
    u = np.asarray(values, dtype=float)
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    M, N = u.shape
    out = np.empty((M - 2, N - 2))
    for i in range(1, M - 1):
        h = (xs[i] - xs[i - 1], xs[i + 1] - xs[i])
        for j in range(1, N - 1):
            k = (ys[j] - ys[j - 1], ys[j + 1] - ys[j])
            w = u[i - 1:i + 2, j - 1:j + 2]
            out[i - 1, j - 1] = u[i, j] - nine_point_update(kind, w, h, k, forms=forms)
    return out
