"""Seeded property suites: invariance, group laws, normalization, convergence, equivariance."""
from __future__ import annotations

from typing import NamedTuple

import numpy as np

from . import frames as fr
from .bench import SOLUTIONS
from .grid import GeneralMesh, RectMesh, ScalarField, StencilCell, discrete_derivatives_general
from .pseudogroup import (GroupElementG1, GroupElementG2, GroupElementG3, act_discrete_g1,
                          act_discrete_g2, act_discrete_g3, centred_g1_action, compose_elements,
                          compose_sampled_g3, g3_action, random_element)
from .schemes import CORNERS, SchemeKind, cell_residuals, nine_point_residuals, residual, solve_corner
from .solve import BVProblem, init_bvp, march_ivp, relax

GROUPS = ("G1", "G2", "G3")


def relative_drift(before, after):
    """``|a - b| / max(|a|, |b|)``, and 0 when both vanish."""
    before = np.asarray(before, float)
    after = np.asarray(after, float)
    scale = np.maximum(np.abs(before), np.abs(after))
    diff = np.abs(after - before)
    return np.where(scale > 0, diff / np.where(scale > 0, scale, 1), 0.0)


# --------------------------------------------------------------------------
# random data
# --------------------------------------------------------------------------

def random_rect_field(rng, M=7, N=7):
    xs = rng.uniform(-0.5, 0.5) + np.cumsum(rng.uniform(0.05, 0.25, M))
    ys = rng.uniform(-0.5, 0.5) + np.cumsum(rng.uniform(0.05, 0.25, N))
    return ScalarField(rng.uniform(0.5, 2.0, (M, N)), RectMesh(xs, ys))


def random_general_field(rng, M=7, N=6):
    """Field with a strictly convex profile in y so that the G3 chart applies."""
    xs = rng.uniform(-0.5, 0.5) + np.cumsum(rng.uniform(0.05, 0.25, M))
    mesh = GeneralMesh(xs, rng.uniform(0.1, 0.3, M), rng.uniform(-0.5, 0.5, M), N)
    X, Y = mesh.x_grid(), mesh.y_grid()
    c = rng.uniform(0.5, 2.0, 3)
    u = c[0] * Y**2 + c[1] * X * Y + c[2] + rng.uniform(-1, 1, (M, N)) * 1e-3
    return ScalarField(u, mesh)


# --------------------------------------------------------------------------
# invariance
# --------------------------------------------------------------------------

G1_NAMED = ("I1", "J01", "I2", "J02", "J11", "I01", "I02", "I11")


def g1_invariants(field, m=0, n=0):
    vals = [fr.invariantize_g1(field, m, n, t) for t in G1_NAMED]
    vals += [fr.invariantize_g1(field, m, n, "x", k=k) for k in range(4)]
    vals += [fr.invariantize_g1(field, m, n, "y", l=l) for l in range(3)]
    vals += [fr.invariantize_g1(field, m, n, "u", k=k, l=l) for k in range(3) for l in range(3)]
    return np.array(vals)


def g2_invariants(field, m=0, n=0):
    frame = fr.frame_g2(field, m, n)
    vals = [fr.invariant_I11d_g2(StencilCell.from_field(field, m, n)), frame.g1]
    vals += list(frame.fvals[:4]) + list(frame.gvals[:4])
    vals += [fr.iota_u_g2(field, m, n, k, l) for k in range(3) for l in range(3)]
    return np.array(vals)


def g3_invariants(field, m=0, n=0):
    return np.array(fr.invariants_g3(field, m, n))


def _naive(field):
    return fr.naive_F(StencilCell.from_field(field, 0, 0))


def _raw_uyyy(field):
    return discrete_derivatives_general(field, 0, 0).uyyy


_INVARIANCE = {
    "G1": (random_rect_field, act_discrete_g1, g1_invariants, _naive),
    "G2": (random_rect_field, act_discrete_g2, g2_invariants, _naive),
    "G3": (random_general_field, act_discrete_g3, g3_invariants, _raw_uyyy),
}


class InvarianceSummary(NamedTuple):
    group: str
    trials: int
    worst_drift: float
    passed: bool
    control_worst_drift: float
    control_detected: bool


def invariance_trial(group, seed, element=None):
    """``(invariant drifts, control drift)`` for one random field and element."""
    make, act, invariants, control = _INVARIANCE[group]
    rng = np.random.default_rng([seed, 1])
    field = make(rng)
    el = random_element(group, seed) if element is None else element
    moved = act(el, field)
    drift = relative_drift(invariants(field), invariants(moved))
    return drift, float(relative_drift(control(field), control(moved)))


def run_invariance_suite(group, trials=100, seed=0, tol=1e-9, control_tol=1e-3):
    """Joint invariants before and after random discretized actions.

    The control (a non-invariant quantity) must drift by more than
    ``control_tol`` for at least one element.
    """
    group = group.upper()
    if group not in _INVARIANCE:
        raise ValueError(f"unknown group {group!r}")
    worst = control = 0.0
    for t in range(trials):
        d, c = invariance_trial(group, seed + t)
        worst = max(worst, float(d.max()))
        control = max(control, c)
    return InvarianceSummary(group, trials, worst, worst <= tol, control, control > control_tol)


# --------------------------------------------------------------------------
# group laws
# --------------------------------------------------------------------------

def _rel_max(a, b):
    return float(np.max(relative_drift(a, b)))


def closure_residual(group, outer, inner, field):
    """Largest relative mismatch between acting twice and acting by the product."""
    if group == "G1":
        two = act_discrete_g1(outer, act_discrete_g1(inner, field))
        one = act_discrete_g1(compose_elements(outer, inner), field)
        M, N = two.shape
        return max(_rel_max(two.values, one.values[:M]), _rel_max(two.mesh.xs, one.mesh.xs[:M]),
                   _rel_max(two.mesh.ys, one.mesh.ys))
    if group == "G2":
        two = act_discrete_g2(outer, act_discrete_g2(inner, field))
        one = act_discrete_g2(compose_elements(outer, inner), field)
        M, N = two.shape
        return max(_rel_max(two.values, one.values[:M, :N]), _rel_max(two.mesh.xs, one.mesh.xs[:M]),
                   _rel_max(two.mesh.ys, one.mesh.ys[:N]))
    xs = field.mesh.xs
    two = act_discrete_g3(outer, act_discrete_g3(inner, field))
    ff, G = compose_sampled_g3(outer, inner.f(xs), inner.g(xs))
    one = g3_action(ff, G, field)
    M = two.shape[0]
    return max(_rel_max(two.values, one.values[:M]), _rel_max(two.mesh.xs, one.mesh.xs[:M]),
               _rel_max(two.mesh.y_grid(), one.mesh.y_grid()[:M]))


def centred_closure_residual(outer, inner, field):
    """Same comparison for the centred-quotient G1 variant, which is not a group action."""
    xs, u = field.mesh.xs, field.values
    X1, U1 = centred_g1_action(inner.f(xs), xs, u)
    _, U2 = centred_g1_action(outer.f(X1), X1, U1)
    _, Uc = centred_g1_action(outer.f(inner.f(xs)), xs, u)
    return _rel_max(U2, Uc[1:-1])


def identity_residual(group, field):
    """Largest deviation after acting by the identity (expected to be exactly 0)."""
    el = {"G1": GroupElementG1(), "G2": GroupElementG2(), "G3": GroupElementG3()}[group]
    act = _INVARIANCE[group][1]
    moved = act(el, field)
    M, N = moved.shape
    return float(np.max(np.abs(moved.values - field.values[:M, :N])))


class GroupLawSummary(NamedTuple):
    group: str
    pairs: int
    identity_residual: float
    worst_closure: float
    centred_worst_closure: float


def run_group_law_suite(group, pairs=100, seed=0):
    group = group.upper()
    make = _INVARIANCE[group][0]
    ident = worst = centred = 0.0
    for t in range(pairs):
        rng = np.random.default_rng([seed + t, 2])
        field = make(rng)
        outer = random_element(group, 2 * (seed + t))
        inner = random_element(group, 2 * (seed + t) + 1)
        ident = max(ident, identity_residual(group, field))
        worst = max(worst, closure_residual(group, outer, inner, field))
        if group == "G1":
            centred = max(centred, centred_closure_residual(outer, inner, field))
    return GroupLawSummary(group, pairs, ident, worst, centred)


# --------------------------------------------------------------------------
# normalization
# --------------------------------------------------------------------------

def normalization_residual(group, field):
    """Largest deviation of the frame-transformed jet from the cross-section constants.

    The compound third relation of G2 is measured relative to the size of its terms.
    """
    if group == "G1":
        moved = fr.normalize_g1(field, 0, 0)
        return max(abs(moved.mesh.xs[0]), float(np.max(np.abs(moved.values[:, 0] - 1))))
    if group == "G2":
        X, Y, U = fr.normalize_g2(field, 0, 0)
        res = fr.g2_cross_section_residuals(X, Y, U)
        dX, d2X = X[1] - X[0], X[2] - 2 * X[1] + X[0]
        dDU = U[1, 1] - U[0, 1] - U[1, 0] + U[0, 0]
        dD2U = (U[2, 1] - 2 * U[1, 1] + U[0, 1]) - (U[2, 0] - 2 * U[1, 0] + U[0, 0])
        scale = max(abs(dX * dD2U), abs(d2X * dDU), abs(dX**3 * (Y[1] - Y[0])))
        res["third"] = res["third"] / scale
        return float(max(abs(v) for v in res.values()))
    moved = fr.normalize_g3(field, 0, 0)
    d = discrete_derivatives_general(moved, 0, 0)
    vals = [moved.mesh.xs[0], moved.mesh.y_grid()[0, 0], moved.values[0, 0],
            d.ux, d.uy, d.uxy, d.uyy - 1]
    return float(max(abs(v) for v in vals))


def run_normalization_suite(group, trials=100, seed=0):
    """Worst normalization residual over random base jets."""
    group = group.upper()
    make = _INVARIANCE[group][0]
    return max(normalization_residual(group, make(np.random.default_rng([seed + t, 3])))
               for t in range(trials))


# --------------------------------------------------------------------------
# convergence
# --------------------------------------------------------------------------

# generic polynomial used as the G1/G2 oracle (no cancellation of the leading error)
def smooth_u(x, y):
    return 2 + x * x + y + x * y * y + 0.3 * y**3


def smooth_jet(x, y):
    """``(u, u_x, u_y, u_xy, u_yy)`` of :func:`smooth_u`."""
    return smooth_u(x, y), 2 * x + y * y, 1 + 2 * x * y + 0.9 * y * y, 2 * y, 2 * x + 1.8 * y


def phi(s):
    """Computational-to-physical map in x for the G1 study."""
    return s + 0.1 * s * s


def g3_poly(x, y):
    return y**3 + x * y**2


def g3_poly_jet(x, y):
    """``(u, u_y, u_yy, u_yyy, u_xyy)`` of ``y³ + x y²``."""
    return g3_poly(x, y), 3 * y * y + 2 * x * y, 6 * y + 2 * x, 6.0, 2.0


def _g1_levels(h, s0=0.7, t0=0.4, pts=4):
    s = s0 + h * np.arange(pts)
    ys = t0 + h * np.arange(pts)
    mesh = RectMesh(phi(s), ys)
    return mesh.sample(smooth_u)


def _g1_oracles(s0=0.7, t0=0.4):
    x, xs_, xss = phi(s0), 1 + 0.2 * s0, 0.2
    u, ux, uy, uxy, uyy = smooth_jet(x, t0)
    us, ust = ux * xs_, uxy * xs_
    n = fr.continuous_normalized_invariants_g1(u, us, uy, uyy, ust, xs_, xss)
    return {"I1": (n.I1, 1, 0), "I2": (n.I2, 2, 0), "J01": (n.J01, 0, 1), "J02": (n.J02, 0, 2),
            "J11": (n.J11, 1, 1), "I01": (uy / u, 0, 0), "I02": (uyy / u, 0, 0),
            "I11": (fr.continuous_invariant_I11(u, ux, uy, uxy), 0, 0)}


def _g3_field(h, x0=0.5, y0=0.8, pts=4):
    xs = x0 + h * np.arange(pts)
    mesh = GeneralMesh(xs, h * (1 + 0.3 * xs), y0 + 0.2 * np.sin(xs) - 0.2 * np.sin(x0), pts)
    return mesh.sample(g3_poly)


def observed_orders(errors):
    e = np.asarray(errors, float)
    return np.log2(e[:-1] / e[1:])


class ConvergenceRow(NamedTuple):
    name: str
    errors: tuple
    orders: tuple


def run_convergence_suite(h0=0.005, halvings=4):
    """Observed orders of every discrete invariant and scheme residual against its limit."""
    steps = h0 / 2.0 ** np.arange(halvings + 1)
    rows = []

    oracles = _g1_oracles()
    for name, (limit, ph, pk) in oracles.items():
        errs = [abs(fr.invariantize_g1(_g1_levels(h), 0, 0, name) / h ** (ph + pk) - limit) for h in steps]
        rows.append(("G1 " + name, errs))

    x0, y0 = phi(0.7), 0.4
    limit = fr.continuous_invariant_I11(*smooth_jet(x0, y0)[:4])
    for label, fn in (("G2 I11", fr.invariant_I11d_g2), ("G2 naive F", fr.naive_F)):
        errs = []
        for h in steps:
            cell = StencilCell.from_field(RectMesh.uniform(x0, y0, h, h, 2, 2).sample(smooth_u), 0, 0)
            errs.append(abs(fn(cell) - limit))
        rows.append((label, errs))

    gx, gy = 0.5, 0.8
    u, uy, uyy, uyyy, uxyy = g3_poly_jet(gx, gy)
    I03, I12 = fr.continuous_invariants_g3(u, uy, uyy, uyyy, uxyy)
    inv = [fr.invariants_g3(_g3_field(h), 0, 0) for h in steps]
    rows.append(("G3 I03", [abs(v.I03d - I03) for v in inv]))
    rows.append(("G3 I12", [abs(v.I12d - I12) for v in inv]))

    for sname, sol in SOLUTIONS.items():
        for kind in SchemeKind:
            errs = []
            for h in steps:
                cell = StencilCell.from_field(RectMesh.uniform(1.2, 1.3, h, h, 2, 2).sample(sol), 0, 0)
                errs.append(abs(residual(kind, cell)))
            rows.append((f"{kind.value} residual {sname}", errs))

    return [ConvergenceRow(n, tuple(float(x) for x in e), tuple(float(o) for o in observed_orders(e)))
            for n, e in rows]


# --------------------------------------------------------------------------
# scheme equivariance
# --------------------------------------------------------------------------

class EquivarianceSummary(NamedTuple):
    kind: str
    elements: int
    residual_before: float
    worst_after: float


def converged_bvp(kind, solution="secant", h=0.1, iterations=20000, tolerance=1e-15):
    """Relax to a fixed point of the nine-point update (secant data on [1,2]²)."""
    mesh = RectMesh.square(1.0, 1.0, 1.0, h)
    problem = BVProblem.from_function(mesh, SOLUTIONS[solution], kind, iterations=iterations,
                                      tolerance=tolerance)
    return relax(problem, init_bvp(problem))


def run_equivariance_suite(kind, elements=10, seed=0, **kw):
    """Nine-point residual of a converged BVP solution before and after random G2 actions."""
    kind = SchemeKind.parse(kind)
    report = converged_bvp(kind, **kw)
    field = report.field
    before = float(np.max(np.abs(nine_point_residuals(kind, field.values, field.mesh.xs, field.mesh.ys))))
    worst = 0.0
    for t in range(elements):
        moved = act_discrete_g2(random_element("G2", seed + t), field)
        r = nine_point_residuals(kind, moved.values, moved.mesh.xs, moved.mesh.ys)
        worst = max(worst, float(np.max(np.abs(r))))
    return EquivarianceSummary(kind.value, elements, before, worst)


def ivp_equivariance(kind, seed=0, h=0.1):
    """Cell residuals of a corner march before and after one random G2 action."""
    kind = SchemeKind.parse(kind)
    mesh = RectMesh.square(1.0, 1.0, 1.0, h)
    sol = SOLUTIONS["rational"]
    U = mesh.sample(sol).values
    field = march_ivp(mesh, U[:, 0], U[0, :], kind, "BL")
    moved = act_discrete_g2(random_element("G2", seed), field)
    before = np.max(np.abs(cell_residuals(kind, field.values, mesh.xs, mesh.ys)))
    after = np.max(np.abs(cell_residuals(kind, moved.values, moved.mesh.xs, moved.mesh.ys)))
    return float(before), float(after)


# --------------------------------------------------------------------------
# solved-form round trip
# --------------------------------------------------------------------------

_CELL_OF = {"BL": (0, 0), "BR": (1, 0), "TL": (0, 1), "TR": (1, 1)}


class RoundTripSummary(NamedTuple):
    kind: str
    cells: int
    worst_by_corner: dict


def run_round_trip_suite(kind, cells=1000, seed=0, steps=(0.05, 0.2)):
    """Blank each corner of a random exact cell, solve for it, back-substitute.

    Cells have ``u00, u10, u01`` in ``[0.5, 2]``, ``h, k`` drawn from
    ``steps`` and ``u11`` from the explicit form, so every solve has a true
    root.  The residual carries a round-off floor near ``eps / (h k)``
    because its numerator is a difference of two O(1) products.
    """
    kind = SchemeKind.parse(kind)
    rng = np.random.default_rng(seed)
    worst = {c: 0.0 for c in CORNERS}
    for _ in range(cells):
        u00, u10, u01 = rng.uniform(0.5, 2.0, 3)
        h, k = rng.uniform(*steps, 2)
        hk = h * k
        if kind is SchemeKind.INVARIANT:
            u11 = u10 * u01 * (1 / u00 + hk)
        else:
            u11 = (u10 * u01 + hk * u00**3) / u00
        cell = np.array([[u00, u01], [u10, u11]])
        for which in CORNERS:
            ci, cj = _CELL_OF[which]
            # place the cell so that its unknown corner is the window centre
            w = np.ones((3, 3))
            w[ci:ci + 2, cj:cj + 2] = cell
            w[1, 1] = np.nan
            solved = cell.copy()
            solved[1 - ci, 1 - cj] = solve_corner(kind, which, w, h, k)
            r = abs(residual(kind, StencilCell(0, 0, solved, h, k)))
            worst[which] = max(worst[which], r)
    return RoundTripSummary(kind.value, cells, worst)
