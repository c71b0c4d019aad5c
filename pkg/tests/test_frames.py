import numpy as np
import pytest
import sympy as sp

from invscheme import frames as fr
from invscheme import suites
from invscheme.errors import DomainError
from invscheme.grid import GeneralMesh, RectMesh, ScalarField, StencilCell
from invscheme.pseudogroup import act_discrete_g2, g2_action, random_element


def cell(window, h, k):
    return StencilCell(0, 0, np.array(window, float), h, k)


def small_field():
    # u_{m,n} with u00 = 1, u10 = 2, u01 = 3, u11 = 7 on Δx = 0.5, δy = 0.2
    mesh = RectMesh([0.0, 0.5, 1.0], [0.0, 0.2, 0.4])
    return ScalarField([[1.0, 3.0, 4.0], [2.0, 7.0, 5.0], [1.5, 2.5, 3.5]], mesh)


def test_iota_u_base_is_one():
    f = small_field()
    assert fr.invariantize_g1(f, 0, 0, "u") == 1.0
    assert fr.invariantize_g1(f, 1, 1, "u") == 1.0


def test_iota_x_one_term():
    f = ScalarField([[2.0, 1.0], [1.0, 1.0]], RectMesh([0.0, 0.5], [0.0, 1.0]))
    assert fr.invariantize_g1(f, 0, 0, "x", k=1) == 1.0
    assert fr.invariantize_g1(f, 0, 0, "x", k=0) == 0.0


def test_I11_g1_arithmetic():
    assert fr.invariantize_g1(small_field(), 0, 0, "I11") == pytest.approx(5.0, rel=1e-14)


def test_g1_named_invariants_against_hand_arithmetic():
    f = small_field()
    u = f.values
    assert fr.invariantize_g1(f, 0, 0, "I1") == 0.5
    assert fr.invariantize_g1(f, 0, 0, "J01") == 2.0
    assert fr.invariantize_g1(f, 0, 0, "J02") == (4 - 6 + 1) / 1
    assert fr.invariantize_g1(f, 0, 0, "J11") == pytest.approx((7 * 1 - 2 * 3) / (2 * 1))
    assert fr.invariantize_g1(f, 0, 0, "I2") == pytest.approx(2 * 0.5 - 1 * 0.5)
    assert fr.invariantize_g1(f, 0, 0, "I01") == pytest.approx(2.0 / 0.2)
    assert fr.invariantize_g1(f, 0, 0, "y", l=2) == 0.4
    assert fr.invariantize_g1(f, 0, 0, "u", k=1, l=1) == u[1, 1] / u[1, 0]


def test_g1_domain_and_symbols():
    f = ScalarField([[0.0, 1.0], [1.0, 1.0]], RectMesh([0.0, 0.5], [0.0, 1.0]))
    with pytest.raises(DomainError):
        fr.invariantize_g1(f, 0, 0, "J01")
    with pytest.raises(ValueError):
        fr.invariantize_g1(small_field(), 0, 0, "bogus")


def test_I2_matches_invariantized_second_difference():
    # ι(Δ²x_m) = ι(x_{m+2}) - 2 ι(x_{m+1}) + ι(x_m)
    f = suites.random_rect_field(np.random.default_rng(5))
    xs = [fr.invariantize_g1(f, 0, 0, "x", k=k) for k in range(3)]
    assert fr.invariantize_g1(f, 0, 0, "I2") == pytest.approx(xs[2] - 2 * xs[1] + xs[0], rel=1e-13)


def test_I11d_g2_examples():
    assert fr.invariant_I11d_g2(cell([[2, 2], [2, 2]], 0.1, 0.1)) == 0.0
    assert fr.invariant_I11d_g2(cell([[1, 3], [2, 7]], 0.5, 0.2)) == pytest.approx(1 / 0.6, rel=1e-14)
    with pytest.raises(DomainError):
        fr.invariant_I11d_g2(cell([[0, 3], [2, 7]], 0.5, 0.2))


def test_I11d_g2_invariant_under_random_element():
    f = suites.random_rect_field(np.random.default_rng(8))
    before = fr.invariant_I11d_g2(StencilCell.from_field(f, 0, 0))
    moved = act_discrete_g2(random_element("G2", 8), f)
    after = fr.invariant_I11d_g2(StencilCell.from_field(moved, 0, 0))
    assert after == pytest.approx(before, rel=1e-10)


def test_naive_F_not_invariant_while_invariantized_is():
    worst_naive = worst_inv = 0.0
    for seed in range(20):
        f = suites.random_rect_field(np.random.default_rng(seed))
        moved = act_discrete_g2(random_element("G2", seed), f)
        c0, c1 = StencilCell.from_field(f, 0, 0), StencilCell.from_field(moved, 0, 0)
        worst_naive = max(worst_naive, suites.relative_drift(fr.naive_F(c0), fr.naive_F(c1)))
        worst_inv = max(worst_inv, suites.relative_drift(fr.invariant_I11d_g2(c0), fr.invariant_I11d_g2(c1)))
    assert worst_naive > 1e-3
    assert worst_inv < 1e-12


def test_g2_frame_matches_alternative_closed_form():
    # g_{n+1} = δy² u_{m,n+1} u_m² Δx_m³ / (u_m Δx_m Δr_{m+1} - u_{m+1} Δx_{m+1} Δr_m),
    # r = u_{.,n+1}/u_{.,n}
    f = suites.random_rect_field(np.random.default_rng(11))
    u, xs, ys = f.values, f.mesh.xs, f.mesh.ys
    r = u[:3, 1] / u[:3, 0]
    dx = np.diff(xs)
    den = u[0, 0] * dx[0] * (r[2] - r[1]) - u[1, 0] * dx[1] * (r[1] - r[0])
    g1 = (ys[1] - ys[0]) ** 2 * u[0, 1] * u[0, 0] ** 2 * dx[0] ** 3 / den
    frame = fr.frame_g2(f, 0, 0)
    assert frame.g1 == pytest.approx(g1, rel=1e-12)
    assert frame.gvals[1] == pytest.approx(g1, rel=1e-12)


def test_g2_frame_is_a_valid_action():
    f = suites.random_rect_field(np.random.default_rng(2))
    frame = fr.frame_g2(f, 0, 0)
    moved = g2_action(frame.fvals, frame.gvals, ScalarField(f.values, f.mesh))
    assert moved.shape == (f.shape[0] - 1, f.shape[1] - 1)


@pytest.mark.parametrize("group", ["G1", "G2", "G3"])
def test_normalization_lands_on_cross_section(group):
    assert suites.run_normalization_suite(group, trials=100) <= 1e-12


def test_frames_are_deterministic():
    f = suites.random_rect_field(np.random.default_rng(4))
    a, b = fr.frame_g2(f, 1, 1), fr.frame_g2(f, 1, 1)
    assert np.array_equal(a.fvals, b.fvals) and np.array_equal(a.gvals, b.gvals)


def test_invariants_g3_agree_with_normalized_derivatives():
    from invscheme.grid import discrete_derivatives_general
    f = suites.random_general_field(np.random.default_rng(6))
    inv = fr.invariants_g3(f, 0, 0)
    d = discrete_derivatives_general(fr.normalize_g3(f, 0, 0), 0, 0)
    assert d.uyyy == pytest.approx(inv.I03d, rel=1e-9)
    assert d.uxyy == pytest.approx(inv.I12d, rel=1e-9)


def test_invariants_g3_rejects_nonconvex():
    mesh = GeneralMesh([0.0, 0.1], [0.1, 0.1], [0.0, 0.0], 4)
    with pytest.raises(DomainError):
        fr.invariants_g3(mesh.sample(lambda x, y: -y * y), 0, 0)


def test_I03d_vanishes_for_quadratic():
    for h in (0.1, 0.01):
        mesh = GeneralMesh([0.0, h], [h, h], [0.3, 0.3], 4)
        assert abs(fr.invariants_g3(mesh.sample(lambda x, y: y * y / 2), 0, 0).I03d) < 1e-6


@pytest.mark.parametrize("group", ["G1", "G2", "G3"])
def test_exact_invariance(group):
    s = suites.run_invariance_suite(group, trials=100)
    assert s.passed, s
    assert s.control_detected, s


def test_identity_drift_exactly_zero():
    from invscheme.pseudogroup import GroupElementG1, GroupElementG2, GroupElementG3
    for group, el in (("G1", GroupElementG1()), ("G2", GroupElementG2()), ("G3", GroupElementG3())):
        drift, control = suites.invariance_trial(group, 3, element=el)
        assert np.all(drift == 0.0) and control == 0.0


def test_continuous_I11_examples():
    x, y = sp.symbols("x y")
    for expr, expected in ((2 / (x + y) ** 2, 1), (sp.exp(x + y), 0)):
        vals = [float(sp.diff(expr, *d).subs({x: 1, y: 1})) if d else float(expr.subs({x: 1, y: 1}))
                for d in ((), (x,), (y,), (x, y))]
        assert fr.continuous_invariant_I11(*vals) == pytest.approx(expected, abs=1e-14)
    assert fr.continuous_invariant_I11(3.0, 0.0, 0.0, 0.0) == 0.0
    with pytest.raises(DomainError):
        fr.continuous_invariant_I11(0.0, 1.0, 1.0, 1.0)


def test_continuous_normalized_g1_examples():
    # u = e^t
    n = fr.continuous_normalized_invariants_g1(1.0, 0.0, 1.0, 1.0, 0.0, 1.0, 0.0)
    assert n.J01 == 1.0 and n.J02 == 1.0
    # u constant in t
    assert fr.continuous_normalized_invariants_g1(2.0, 0.3, 0.0, 0.0, 0.0, 1.0, 0.0).J01 == 0.0
    # x = s, u = e^{s+t} at s = t = 0
    assert fr.continuous_normalized_invariants_g1(1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 0.0).J11 == 0.0


def test_convergence_oracles_match_sympy():
    x, y = sp.symbols("x y")
    expr = 2 + x**2 + y + x * y**2 + sp.Rational(3, 10) * y**3
    at = {x: 0.7, y: 0.4}
    jet = suites.smooth_jet(0.7, 0.4)
    ref = [expr, sp.diff(expr, x), sp.diff(expr, y), sp.diff(expr, x, y), sp.diff(expr, y, 2)]
    assert np.allclose(jet, [float(e.subs(at)) for e in ref], rtol=1e-14)
    g3 = y**3 + x * y**2
    ref = [g3, sp.diff(g3, y), sp.diff(g3, y, 2), sp.diff(g3, y, 3), sp.diff(g3, x, y, 2)]
    assert np.allclose(suites.g3_poly_jet(0.5, 0.8), [float(e.subs({x: 0.5, y: 0.8})) for e in ref])


def test_convergence_orders():
    for row in suites.run_convergence_suite():
        assert all(0.8 <= o <= 1.2 for o in row.orders), row
        assert len(row.orders) >= 4
