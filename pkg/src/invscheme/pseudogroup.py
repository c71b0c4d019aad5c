"""Pseudo-group elements and their product / discretized actions.

Three groups act on ``(x, y, u)``:

* G1: ``X = f(x), Y = y, U = u / f'(x)``
* G2: ``X = f(x), Y = g(y), U = u / (f'(x) g'(y))``
* G3: ``X = f(x), Y = y f'(x) + g(x), U = u + (y f''(x) + g'(x)) / f'(x)``

The discretized actions replace every derivative of ``f`` (``g``) by the
forward difference quotient of its samples, e.g. ``f'(x_m) -> Δf_m/Δx_m``.
They depend on the group element only through its samples, so the core
routines (``g1_action`` ...) take arrays of sampled values; moving frames
produce such arrays directly.

Because ``Δf_m`` needs ``x_{m+1}``, the last column (and, for G2, the last
row) of a transformed field is dropped.  G3 drops two columns: ``U_{m,n}``
involves ``Δ(Δf/Δx)_m`` and hence ``f_{m+2}``.
"""
from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from typing import Union

import numpy as np

from .errors import DegenerateMeshError, DomainError
from .grid import GeneralMesh, RectMesh, ScalarField


# --------------------------------------------------------------------------
# one-dimensional maps
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class Diffeo1D:
    """``f(x) = alpha*x + beta + gamma*sin(omega*x)`` with ``f' > 0`` everywhere."""

    alpha: float = 1.0
    beta: float = 0.0
    gamma: float = 0.0
    omega: float = 0.0

    def __post_init__(self):
        if not self.alpha > 0:
            raise DomainError("alpha must be positive")
        if not abs(self.gamma * self.omega) < self.alpha:
            raise DomainError("|gamma*omega| < alpha is required for f' > 0")

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        return self.alpha * x + self.beta + self.gamma * np.sin(self.omega * x)

    def deriv(self, x):
        x = np.asarray(x, dtype=float)
        return self.alpha + self.gamma * self.omega * np.cos(self.omega * x)

    def deriv2(self, x):
        x = np.asarray(x, dtype=float)
        return -self.gamma * self.omega**2 * np.sin(self.omega * x)


@dataclass(frozen=True)
class Composed:
    """``outer o inner``; derivatives follow from the chain rule."""

    outer: "Map1D"
    inner: "Map1D"

    def __call__(self, x):
        return self.outer(self.inner(x))

    def deriv(self, x):
        return self.outer.deriv(self.inner(x)) * self.inner.deriv(x)

    def deriv2(self, x):
        xi = self.inner(x)
        d1 = self.inner.deriv(x)
        return self.outer.deriv2(xi) * d1**2 + self.outer.deriv(xi) * self.inner.deriv2(x)


Map1D = Union[Diffeo1D, Composed]

IDENTITY = Diffeo1D()


def compose(outer: Map1D, inner: Map1D) -> Composed:
    return Composed(outer, inner)


@dataclass(frozen=True)
class SmoothFn:
    """``g(x) = c0 + c1 x + c2 x^2 + c3 x^3 + s*sin(nu*x)``."""

    coeffs: tuple = (0.0, 0.0, 0.0, 0.0)
    s: float = 0.0
    nu: float = 0.0

    def __post_init__(self):
        c = tuple(float(v) for v in self.coeffs)
        if len(c) != 4 or not all(np.isfinite(c)) or not np.isfinite(self.s) or not np.isfinite(self.nu):
            raise DomainError("SmoothFn needs four finite polynomial coefficients")
        object.__setattr__(self, "coeffs", c)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        c0, c1, c2, c3 = self.coeffs
        return c0 + x * (c1 + x * (c2 + x * c3)) + self.s * np.sin(self.nu * x)

    def deriv(self, x):
        x = np.asarray(x, dtype=float)
        _, c1, c2, c3 = self.coeffs
        return c1 + x * (2 * c2 + 3 * c3 * x) + self.s * self.nu * np.cos(self.nu * x)


# --------------------------------------------------------------------------
# group elements
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class GroupElementG1:
    f: Map1D = IDENTITY
    seed: int | None = dc_field(default=None, compare=False)
    kind = "G1"


@dataclass(frozen=True)
class GroupElementG2:
    f: Map1D = IDENTITY
    g: Map1D = IDENTITY
    seed: int | None = dc_field(default=None, compare=False)
    kind = "G2"


@dataclass(frozen=True)
class GroupElementG3:
    f: Map1D = IDENTITY
    g: SmoothFn = SmoothFn()
    seed: int | None = dc_field(default=None, compare=False)
    kind = "G3"


@dataclass(frozen=True)
class DilationElement:
    lam: float

    def __post_init__(self):
        if not self.lam > 0:
            raise DomainError("dilation factor must be positive")


def compose_elements(outer, inner):
    """Group product ``outer . inner`` for G1/G2 (exact, via composition nodes)."""
    if isinstance(outer, GroupElementG1) and isinstance(inner, GroupElementG1):
        return GroupElementG1(compose(outer.f, inner.f))
    if isinstance(outer, GroupElementG2) and isinstance(inner, GroupElementG2):
        return GroupElementG2(compose(outer.f, inner.f), compose(outer.g, inner.g))
    raise TypeError("compose_elements handles G1 and G2; use compose_sampled_g3 for G3")


def random_diffeo(rng: np.random.Generator) -> Diffeo1D:
    alpha = rng.uniform(0.5, 2.0)
    beta = rng.uniform(-1.0, 1.0)
    omega = rng.uniform(0.2, 3.0)
    gamma = rng.uniform(-0.5, 0.5) * alpha / omega
    return Diffeo1D(alpha, beta, gamma, omega)


def random_smooth(rng: np.random.Generator) -> SmoothFn:
    c = rng.uniform(-1, 1, 4) * np.array([1.0, 1.0, 0.5, 0.2])
    return SmoothFn(tuple(c), rng.uniform(-0.5, 0.5), rng.uniform(0.2, 3.0))


def random_element(kind: str, seed: int):
    """Deterministic random element of ``G1``, ``G2`` or ``G3``."""
    rng = np.random.default_rng(seed)
    kind = kind.upper()
    if kind == "G1":
        return GroupElementG1(random_diffeo(rng), seed=seed)
    if kind == "G2":
        return GroupElementG2(random_diffeo(rng), random_diffeo(rng), seed=seed)
    if kind == "G3":
        return GroupElementG3(random_diffeo(rng), random_smooth(rng), seed=seed)
    raise ValueError(f"unknown group {kind!r}")


# --------------------------------------------------------------------------
# plain-text records
# --------------------------------------------------------------------------

def _map_items(prefix, fn):
    if isinstance(fn, Diffeo1D):
        return [(f"{prefix}.type", "diffeo"), (f"{prefix}.alpha", fn.alpha), (f"{prefix}.beta", fn.beta),
                (f"{prefix}.gamma", fn.gamma), (f"{prefix}.omega", fn.omega)]
    if isinstance(fn, Composed):
        return ([(f"{prefix}.type", "compose")] + _map_items(prefix + ".outer", fn.outer)
                + _map_items(prefix + ".inner", fn.inner))
    if isinstance(fn, SmoothFn):
        return ([(f"{prefix}.type", "smooth")] + [(f"{prefix}.c{i}", c) for i, c in enumerate(fn.coeffs)]
                + [(f"{prefix}.s", fn.s), (f"{prefix}.nu", fn.nu)])
    raise TypeError(type(fn))


def _map_from(rec, prefix):
    t = rec[f"{prefix}.type"]
    if t == "diffeo":
        return Diffeo1D(*(float(rec[f"{prefix}.{p}"]) for p in ("alpha", "beta", "gamma", "omega")))
    if t == "compose":
        return Composed(_map_from(rec, prefix + ".outer"), _map_from(rec, prefix + ".inner"))
    if t == "smooth":
        return SmoothFn(tuple(float(rec[f"{prefix}.c{i}"]) for i in range(4)),
                        float(rec[f"{prefix}.s"]), float(rec[f"{prefix}.nu"]))
    raise ValueError(f"unknown map type {t!r}")


def dumps_element(el) -> str:
    """Serialize an element as ``key=value`` lines (floats written with ``repr``)."""
    items = [("kind", el.kind), ("seed", "" if el.seed is None else el.seed)]
    items += _map_items("f", el.f)
    if not isinstance(el, GroupElementG1):
        items += _map_items("g", el.g)
    return "".join(f"{k}={v!r}\n" if isinstance(v, float) else f"{k}={v}\n" for k, v in items)


def loads_element(text: str):
    rec = {}
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        key, _, val = line.partition("=")
        rec[key.strip()] = val.strip()
    seed = int(rec["seed"]) if rec.get("seed") else None
    kind = rec["kind"]
    f = _map_from(rec, "f")
    if kind == "G1":
        return GroupElementG1(f, seed=seed)
    if kind == "G2":
        return GroupElementG2(f, _map_from(rec, "g"), seed=seed)
    if kind == "G3":
        return GroupElementG3(f, _map_from(rec, "g"), seed=seed)
    raise ValueError(f"unknown kind {kind!r}")


# --------------------------------------------------------------------------
# actions
# --------------------------------------------------------------------------

def act_product_g1(el: GroupElementG1, x, y, u):
    """Undiscretized product action on arbitrary sample points ``(x, y, u)``."""
    x = np.asarray(x, dtype=float)
    fp = el.f.deriv(x)
    return el.f(x), np.array(y, dtype=float), np.asarray(u, dtype=float) / fp


def act_product_g3(el: GroupElementG3, x, y, u):
    """Undiscretized product action of G3, ``e = y f' + g``, ``U = u + e_x/f'``."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    fp = el.f.deriv(x)
    e = y * fp + el.g(x)
    ex = y * el.f.deriv2(x) + el.g.deriv(x)
    return el.f(x), e, np.asarray(u, dtype=float) + ex / fp


def act_dilation(el: DilationElement, field: ScalarField) -> ScalarField:
    return ScalarField(el.lam * field.values, field.mesh, field.diverged)


def _quotient(fv, xs):
    df = np.diff(fv)
    if np.any(df == 0):
        raise DegenerateMeshError("Δf_m = 0: sampled map is not injective on the mesh")
    return df / np.diff(xs)


def g1_action(fvals, field: ScalarField) -> ScalarField:
    """Discretized G1 action given samples ``f_m = f(x_m)``; drops the last column."""
    mesh = field.mesh
    if not isinstance(mesh, RectMesh):
        raise TypeError("the G1 action is defined on rectangular meshes")
    if mesh.shape[0] < 3:
        raise DegenerateMeshError("need at least three columns to act")
    fvals = np.asarray(fvals, dtype=float)
    F = _quotient(fvals, mesh.xs)
    X = fvals[:-1]
    U = field.values[:-1] / F[:, None]
    return ScalarField(_orient_values(U, X, mesh.ys), _oriented_rect(X, mesh.ys), field.diverged)


def g2_action(fvals, gvals, field: ScalarField) -> ScalarField:
    """Discretized G2 action from samples ``f(x_m)``, ``g(y_n)``; drops last row and column."""
    mesh = field.mesh
    if not isinstance(mesh, RectMesh):
        raise TypeError("the G2 action is defined on rectangular meshes")
    fvals = np.asarray(fvals, dtype=float)
    gvals = np.asarray(gvals, dtype=float)
    F = _quotient(fvals, mesh.xs)
    G = _quotient(gvals, mesh.ys)
    U = field.values[:-1, :-1] / (F[:, None] * G[None, :])
    X, Y = fvals[:-1], gvals[:-1]
    # frames may produce decreasing samples; re-orient so the mesh stays increasing
    mesh_out = _oriented_rect(X, Y)
    U = _orient_values(U, X, Y)
    return ScalarField(U, mesh_out, field.diverged)


def _oriented_rect(X, Y):
    return RectMesh(X if X[-1] > X[0] else X[::-1], Y if Y[-1] > Y[0] else Y[::-1])


def _orient_values(U, X, Y):
    if X[-1] < X[0]:
        U = U[::-1]
    if Y[-1] < Y[0]:
        U = U[:, ::-1]
    return U


def g2_action_raw(fvals, gvals, xs, ys, u):
    """G2 action on raw arrays without re-orientation: ``(X, Y, U)`` with shapes ``M-1``, ``N-1``."""
    F = _quotient(np.asarray(fvals, float), xs)
    G = _quotient(np.asarray(gvals, float), ys)
    return np.asarray(fvals)[:-1], np.asarray(gvals)[:-1], np.asarray(u)[:-1, :-1] / (F[:, None] * G[None, :])


def g3_action_raw(fvals, gvals, xs, Y, u):
    """G3 action on raw arrays.

    ``Y`` is the ``M x N`` array ``y_{m,n}``; ``fvals`` has length ``M`` and
    ``gvals`` length at least ``M-1``.  Returns ``(X, Ynew, U)`` on columns
    ``0..M-3``.
    """
    xs = np.asarray(xs, float)
    fvals = np.asarray(fvals, float)
    gvals = np.asarray(gvals, float)
    Y = np.asarray(Y, float)
    u = np.asarray(u, float)
    M = xs.size
    if M < 3:
        raise DegenerateMeshError("the G3 action needs at least three columns")
    F = _quotient(fvals, xs)                      # length M-1
    E = Y[:-1] * F[:, None] + gvals[:M - 1, None]  # e_{m,n}, columns 0..M-2
    Df = np.diff(fvals)[:M - 2]
    Dx = np.diff(xs)[:M - 2]
    U = u[:M - 2] + (np.diff(E, axis=0) / Df[:, None] - np.diff(Y[:M - 1], axis=0) / Dx[:, None])
    return fvals[:M - 2], E[:M - 2], U


def g3_action(fvals, gvals, field: ScalarField) -> ScalarField:
    """Discretized G3 action on a :class:`GeneralMesh`; the result is again general."""
    mesh = field.mesh
    if isinstance(mesh, RectMesh):
        mesh = GeneralMesh.from_rect(mesh)
    if not isinstance(mesh, GeneralMesh):
        raise TypeError("the G3 action needs a GeneralMesh")
    fvals = np.asarray(fvals, float)
    gvals = np.asarray(gvals, float)
    X, E, U = g3_action_raw(fvals, gvals, mesh.xs, mesh.y_grid(), field.values)
    F = _quotient(fvals, mesh.xs)[:X.size]
    out = GeneralMesh(X, mesh.y_slope[:X.size] * F, mesh.y_offset[:X.size] * F + gvals[:X.size], mesh.N)
    return ScalarField(U, out, field.diverged)


def sample_g1(el, xs):
    return el.f(xs)


def act_discrete_g1(el: GroupElementG1, field: ScalarField) -> ScalarField:
    return g1_action(el.f(field.mesh.xs), field)


def act_discrete_g2(el: GroupElementG2, field: ScalarField) -> ScalarField:
    return g2_action(el.f(field.mesh.xs), el.g(field.mesh.ys), field)


def act_discrete_g3(el: GroupElementG3, field: ScalarField) -> ScalarField:
    xs = field.mesh.xs
    return g3_action(el.f(xs), el.g(xs), field)


def compose_sampled_g3(outer: GroupElementG3, inner_f, inner_g):
    """Samples of ``outer . inner`` for the discretized G3 law.

    With ``X_m = f_m`` the composite has ``f~(f_m)`` and
    ``G_m = (Δf~_m / Δf_m) g_m + g~(f_m)``; the last column is dropped.
    """
    inner_f = np.asarray(inner_f, float)
    inner_g = np.asarray(inner_g, float)
    ff = outer.f(inner_f)
    ratio = np.diff(ff) / np.diff(inner_f)
    G = ratio * inner_g[:ratio.size] + outer.g(inner_f[:ratio.size])
    return ff, G


def centred_g1_action(fvals, xs, u):
    """G1 action with the centred quotient ``(Δf_m/Δx_m + Δf_{m-1}/Δx_{m-1}) / 2``.

    Only interior columns ``1..M-2`` are returned.  This variant does not
    compose; it exists to exhibit that failure.
    """
    q = np.diff(fvals) / np.diff(xs)
    Fc = 0.5 * (q[1:] + q[:-1])
    return np.asarray(fvals)[1:-1], np.asarray(u)[1:-1] / Fc[:, None]
