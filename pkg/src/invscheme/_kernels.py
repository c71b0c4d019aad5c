"""Compiled inner loops for corner fills and relaxation sweeps.

Corner codes: 0 = BL, 1 = BR, 2 = TL, 3 = TR.  Scheme codes: 0 = standard,
1 = invariant.  Failures are signalled by NaN rather than exceptions.
"""
import numba
import numpy as np

BLOWUP = 1e12


@numba.njit(cache=True)
def real_root_near(hk, d, P, seed):
    """Real root of ``hk u³ - d u + P`` closest to ``seed`` (closed form)."""
    p, q = -d / hk, P / hk
    D = q * q / 4.0 + p**3 / 27.0
    if D >= 0.0:
        s = np.sqrt(D)
        return np.cbrt(-q / 2.0 + s) + np.cbrt(-q / 2.0 - s)
    r = 2.0 * np.sqrt(-p / 3.0)
    phi = np.arccos(min(1.0, max(-1.0, 3.0 * q / (p * r))))
    best = np.nan
    for k in range(3):
        u = r * np.cos((phi - 2.0 * np.pi * k) / 3.0)
        if not np.isfinite(best) or abs(u - seed) < abs(best - seed):
            best = u
    return best


@numba.njit(cache=True)
def newton_cubic(hk, d, P, seed, tol, max_iter):
    """Root of ``hk u³ - d u + P`` near ``seed``, falling back to the closed form; NaN on failure."""
    u = _newton(hk, d, P, seed, tol, max_iter)
    if np.isfinite(u):
        return u
    return _newton(hk, d, P, real_root_near(hk, d, P, seed), tol, max_iter)


@numba.njit(cache=True)
def _newton(hk, d, P, seed, tol, max_iter):
    u = seed
    for _ in range(max_iter):
        f = hk * u**3 - d * u + P
        df = 3.0 * hk * u * u - d
        if df == 0.0 or not np.isfinite(df):
            return np.nan
        step = f / df
        u -= step
        if not np.isfinite(u):
            return np.nan
        if abs(step) <= tol * (1.0 + abs(u)):
            return u
    return np.nan


@numba.njit(cache=True)
def corner(kind, which, U, xs, ys, i, j, seed, tol, max_iter):
    if which == 0:
        hk = (xs[i] - xs[i - 1]) * (ys[j] - ys[j - 1])
        a, b, c = U[i - 1, j - 1], U[i, j - 1], U[i - 1, j]
        if a == 0.0:
            return np.nan
        if kind == 1:
            return b * c * (1.0 / a + hk)
        return (b * c + hk * a**3) / a
    if which == 1:
        hk = (xs[i + 1] - xs[i]) * (ys[j] - ys[j - 1])
        a, r, d = U[i, j - 1], U[i + 1, j], U[i + 1, j - 1]
        if kind == 1:
            den = d * (1.0 + hk * a)
            return a * r / den if den != 0.0 else np.nan
        return (r * a - hk * a**3) / d if d != 0.0 else np.nan
    if which == 2:
        hk = (xs[i] - xs[i - 1]) * (ys[j + 1] - ys[j])
        a, t, l = U[i - 1, j], U[i, j + 1], U[i - 1, j + 1]
        if kind == 1:
            den = l * (1.0 + hk * a)
            return a * t / den if den != 0.0 else np.nan
        return (t * a - hk * a**3) / l if l != 0.0 else np.nan
    hk = (xs[i + 1] - xs[i]) * (ys[j + 1] - ys[j])
    r, t, d = U[i + 1, j], U[i, j + 1], U[i + 1, j + 1]
    P = r * t
    if kind == 1:
        den = d - hk * P
        return P / den if den != 0.0 else np.nan
    if d == 0.0:
        return np.nan
    if not np.isfinite(seed):
        seed = P / d
    return newton_cubic(hk, d, P, seed, tol, max_iter)


@numba.njit(cache=True)
def _bad(v):
    return not np.isfinite(v) or abs(v) > BLOWUP


@numba.njit(cache=True)
def fill(U, xs, ys, kind, which, tol, max_iter, interior):
    """March away from corner ``which`` in place; returns the failing index or (-1, -1).

    With ``interior`` set the far edges are left untouched.
    """
    M, N = U.shape
    lo = 1 if interior else 0
    if which == 0 or which == 1:
        j0, j1, dj = 1, N - lo, 1
    else:
        j0, j1, dj = N - 2, lo - 1, -1
    if which == 0 or which == 2:
        i0, i1, di = 1, M - lo, 1
    else:
        i0, i1, di = M - 2, lo - 1, -1
    for j in range(j0, j1, dj):
        for i in range(i0, i1, di):
            v = corner(kind, which, U, xs, ys, i, j, np.nan, tol, max_iter)
            if _bad(v):
                return i, j
            U[i, j] = v
    return -1, -1


@numba.njit(cache=True)
def sweep(U, xs, ys, kind, nforms, tol, max_iter):
    """One Gauss-Seidel pass; returns (max |update|, fail_i, fail_j)."""
    M, N = U.shape
    mx = 0.0
    for j in range(1, N - 1):
        for i in range(1, M - 1):
            s = 0.0
            for w in range(nforms):
                s += corner(kind, w, U, xs, ys, i, j, U[i, j], tol, max_iter)
            v = s / nforms
            if _bad(v):
                return mx, i, j
            mx = max(mx, abs(v - U[i, j]))
            U[i, j] = v
    return mx, -1, -1
