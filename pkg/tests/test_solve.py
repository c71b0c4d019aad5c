import numpy as np
import pytest

from invscheme import bench
from invscheme.errors import DegenerateMeshError, DivergenceError, DomainError
from invscheme.grid import RectMesh, ScalarField
from invscheme.schemes import CORNERS, SchemeKind, cell_residuals, solve_corner
from invscheme.solve import BVProblem, init_bvp, march_ivp, relax, solve_bvp


def exact_edges(mesh, fn, corner="BL"):
    u = mesh.sample(fn).values
    i = 0 if corner in ("BL", "TL") else -1
    j = 0 if corner in ("BL", "BR") else -1
    return u, u[:, j], u[i, :]


@pytest.mark.parametrize("kind", list(SchemeKind))
@pytest.mark.parametrize("corner", CORNERS)
def test_two_by_two_march_is_one_corner_form(kind, corner):
    mesh = RectMesh([0.0, 0.1], [0.0, 0.2])
    u = np.array([[1.0, 1.3], [1.2, 0.9]])
    i = 0 if corner in ("BL", "TL") else 1
    j = 0 if corner in ("BL", "BR") else 1
    out = march_ivp(mesh, u[:, j], u[i, :], kind, corner)
    # the filled node is the far corner; embed the cell in a 3x3 window centred on it
    fi, fj = 1 - i, 1 - j
    w = np.full((3, 3), np.nan)
    w[1 - fi:3 - fi, 1 - fj:3 - fj] = u
    which = {(1, 1): "BL", (0, 1): "BR", (1, 0): "TL", (0, 0): "TR"}[(fi, fj)]
    expected = solve_corner(kind, which, w, 0.1, 0.2)
    assert out.values[fi, fj] == pytest.approx(expected, rel=1e-13)
    # the edges are untouched
    assert out.values[i, 1 - j] == u[i, 1 - j] and out.values[1 - i, j] == u[1 - i, j]


def test_constant_invariant_march_strictly_increases():
    mesh = RectMesh.uniform(0, 0, 0.1, 0.1, 6, 6)
    u = march_ivp(mesh, np.ones(6), np.ones(6), "invariant").values
    assert np.all(np.diff(u[1:, 1:], axis=0) > 0) and np.all(np.diff(u[1:, 1:], axis=1) > 0)
    # direct iteration of u11 = u10 u01 (1/u00 + hk)
    assert u[1, 1] == pytest.approx(1.01, rel=1e-15)
    assert u[2, 1] == pytest.approx(1.01 * (1 / 1 + 0.01), rel=1e-15)
    assert u[2, 2] == pytest.approx(u[2, 1] * u[1, 2] * (1 / u[1, 1] + 0.01), rel=1e-15)


def test_march_fills_every_cell_exactly():
    mesh = RectMesh.uniform(1, 1, 0.1, 0.1, 6, 7)
    for corner in CORNERS:
        _, xe, ye = exact_edges(mesh, bench.get_solution("rational"), corner)
        u = march_ivp(mesh, xe, ye, "invariant", corner).values
        assert np.all(np.abs(cell_residuals("invariant", u, mesh.xs, mesh.ys)) < 1e-12)


def test_rational_march_converges_first_order():
    sol = bench.get_solution("rational")
    errs = []
    for h in (0.1, 0.05, 0.025, 0.0125):
        n = int(round(1 / h)) + 1
        mesh = RectMesh.uniform(1, 1, h, h, n, n)
        exact, xe, ye = exact_edges(mesh, sol)
        errs.append(np.abs(march_ivp(mesh, xe, ye, "invariant").values - exact).max())
    orders = np.log2(np.array(errs[:-1]) / np.array(errs[1:]))
    assert np.all(orders >= 0.9), orders


def test_march_validation():
    mesh = RectMesh.uniform(0, 0, 0.1, 0.1, 3, 3)
    with pytest.raises(ValueError):
        march_ivp(mesh, np.ones(2), np.ones(3), "invariant")
    with pytest.raises(ValueError):
        march_ivp(mesh, np.ones(3), np.full(3, 2.0), "invariant")
    with pytest.raises(DomainError):
        march_ivp(mesh, np.array([1.0, 0.0, 1.0]), np.ones(3), "invariant")
    with pytest.raises(ValueError):
        march_ivp(mesh, np.ones(3), np.ones(3), "invariant", corner="middle")


def test_march_divergence_reports_index():
    # the invariant BL form has a pole once 1/u + hk crosses zero
    mesh = RectMesh.uniform(0, 0, 1.0, 1.0, 4, 4)
    with pytest.raises(DivergenceError) as exc:
        march_ivp(mesh, np.array([1.0, -1.0, 1.0, -1.0]), np.array([1.0, -1.0, 1.0, -1.0]), "invariant")
    assert exc.value.index is not None


def test_problem_validation():
    mesh = RectMesh.uniform(0, 0, 0.1, 0.1, 3, 3)
    with pytest.raises(ValueError):
        BVProblem(mesh, np.ones((3, 4)), "invariant")
    with pytest.raises(DegenerateMeshError):
        BVProblem(RectMesh.uniform(0, 0, 0.1, 0.1, 2, 3), np.ones((2, 3)), "invariant")
    b = np.ones((3, 3))
    b[0, 1] = 0.0
    with pytest.raises(DomainError):
        BVProblem(mesh, b, "invariant")
    with pytest.raises(ValueError):
        BVProblem(mesh, np.ones((3, 3)), "invariant", forms=5)
    b = np.ones((3, 3))
    b[1, 1] = np.nan  # interior entries are ignored
    assert BVProblem(mesh, b, "invariant").kind is SchemeKind.INVARIANT


def test_init_three_by_three_is_mean_of_single_cells():
    mesh = RectMesh([0.0, 0.1, 0.3], [0.0, 0.2, 0.25])
    b = np.array([[1.0, 1.1, 1.2], [0.9, 7.0, 1.3], [1.05, 1.15, 0.95]])
    for kind in SchemeKind:
        init = init_bvp(BVProblem(mesh, b, kind)).values
        vals = [solve_corner(kind, c, b, (0.1, 0.2), (0.2, 0.05)) for c in CORNERS]
        assert init[1, 1] == pytest.approx(np.mean(vals), rel=1e-13)
        assert np.array_equal(np.delete(init.ravel(), 4), np.delete(b.ravel(), 4))


@pytest.mark.parametrize("kind", list(SchemeKind))
def test_init_symmetric_data_gives_symmetric_field(kind):
    mesh = RectMesh.uniform(1, 1, 0.1, 0.1, 11, 11)
    p = BVProblem.from_function(mesh, bench.get_solution("secant"), kind)
    u = init_bvp(p).values
    assert np.all(np.isfinite(u))
    assert np.max(np.abs(u - u.T)) <= 1e-12


def test_init_fallback_drops_failed_corners():
    cfg = bench.ExperimentConfig("secant", 0.84, 0.84, 1, 1, 0.01, 0.01, "standard")
    with pytest.raises(DivergenceError) as exc:
        init_bvp(cfg.problem())
    assert exc.value.index == (98, 88)
    cfg = bench.ExperimentConfig("secant", 0.84, 0.84, 1, 1, 0.01, 0.01, "standard", fallback=True)
    assert np.all(np.isfinite(init_bvp(cfg.problem()).values))


@pytest.mark.parametrize("kind", list(SchemeKind))
def test_exact_discrete_solution_is_fixed_point(kind):
    mesh = RectMesh.uniform(1, 1, 0.1, 0.1, 8, 8)
    _, xe, ye = exact_edges(mesh, bench.get_solution("secant"))
    u = march_ivp(mesh, xe, ye, kind).values
    p = BVProblem(mesh, u, kind, iterations=3)
    report = relax(p, ScalarField(u, mesh))
    assert not report.diverged
    assert report.max_update_last_sweep <= 1e-12
    assert np.max(np.abs(report.field.values - u)) <= 1e-12


def test_relax_is_deterministic():
    cfg = bench.ExperimentConfig("secant", 1, 1, 1, 1, 0.05, scheme="standard", iterations=30)
    a, b = solve_bvp(cfg.problem()), solve_bvp(cfg.problem())
    assert np.array_equal(a.field.values, b.field.values)
    assert a.max_update_last_sweep == b.max_update_last_sweep and a.iterations_run == b.iterations_run


def test_tolerance_stops_early():
    cfg = bench.ExperimentConfig("secant", 1, 1, 1, 1, 0.1, iterations=10000)
    p = BVProblem(cfg.mesh(), cfg.problem().boundary, "invariant", iterations=10000, tolerance=1e-10)
    r = solve_bvp(p)
    assert r.iterations_run < 10000 and r.max_update_last_sweep < 1e-10


def test_relax_shape_check():
    mesh = RectMesh.uniform(0, 0, 0.1, 0.1, 4, 4)
    p = BVProblem(mesh, np.ones((4, 4)), "invariant")
    with pytest.raises(ValueError):
        relax(p, RectMesh.uniform(0, 0, 0.1, 0.1, 3, 3).sample(lambda x, y: 1 + 0 * x))


@pytest.mark.parametrize("h", bench.TABLE1_STEPS)
@pytest.mark.parametrize("kind", list(SchemeKind))
def test_relaxation_improves_on_initialization(h, kind):
    cfg = bench.ExperimentConfig("secant", 1, 1, 1, 1, h, scheme=kind, iterations=100)
    p = cfg.problem()
    exact = p.mesh.sample(bench.get_solution("secant")).values
    init = init_bvp(p)
    report = relax(p, init)
    assert not report.diverged
    assert np.abs(report.field.values - exact).mean() <= np.abs(init.values - exact).mean()


def test_standard_diverges_near_singular_line():
    cfg = bench.ExperimentConfig("secant", 0.84, 0.84, 1, 1, 0.01, scheme="standard")
    report, err = bench.run_experiment(cfg)
    assert report.diverged and err.diverged
    assert report.iterations_run == 0 and report.failing_index == (98, 88)
    assert np.all(np.isnan(report.field.values[1:-1, 1:-1]))


def test_divergence_freezes_last_finite_state():
    cfg = bench.ExperimentConfig("secant", 0.85, 0.85, 1, 1, 0.01, scheme="standard")
    report, _ = bench.run_experiment(cfg)
    assert report.diverged and report.iterations_run >= 1
    assert np.all(np.isfinite(report.field.values))
    assert np.max(np.abs(report.field.values)) <= 1e12
