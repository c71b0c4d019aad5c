import math
import time

import pytest

from invscheme import bench, suites


def test_criterion_1_table1(verdict):
    t0 = time.perf_counter()
    rows = bench.run_table1()
    secs = time.perf_counter() - t0
    got = {(r.scheme, r.h): r.report.mean_abs for r in rows}
    rel = {key: abs(v / bench.TABLE1_REFERENCE[key] - 1) for key, v in got.items()}
    ordered = all(got[("invariant", h)] < got[("standard", h)] for h in bench.TABLE1_STEPS)
    ok = max(rel.values()) <= 0.35 and ordered and secs < 120
    cells = ", ".join(f"{s[0]}{h}={got[(s, h)]:.3e}" for h in bench.TABLE1_STEPS for s in ("standard", "invariant"))
    verdict(1, ok, f"worst relative deviation {max(rel.values()):.1%} (limit 35%), "
                   f"ordering {'holds' if ordered else 'broken'}, {secs:.1f} s; {cells}")
    assert ok


def test_criterion_2_table2(verdict):
    t0 = time.perf_counter()
    rows = bench.run_table2()
    secs = time.perf_counter() - t0
    rep = {(r.scheme, r.x0): r.report for r in rows}
    factor = {x0: rep[("invariant", x0)].max_abs / bench.TABLE2_REFERENCE[("invariant", x0)]
              for x0 in bench.TABLE2_CORNERS}
    inv_ok = all(0.5 <= f <= 2.0 and not rep[("invariant", x0)].diverged for x0, f in factor.items())
    ratio = {x0: (math.nan if rep[("standard", x0)].diverged
                  else rep[("standard", x0)].max_abs / rep[("invariant", x0)].max_abs)
             for x0 in (0.87, 0.86, 0.85)}
    ratio_ok = {x0: r >= 5 for x0, r in ratio.items()}
    unstable = rep[("standard", 0.84)].diverged and math.isfinite(rep[("invariant", 0.84)].max_abs)
    ok = inv_ok and all(ratio_ok.values()) and unstable and secs < 120
    ratios = ", ".join(f"{x0}: {'diverged' if math.isnan(r) else f'{r:.1f}x'}" for x0, r in ratio.items())
    verdict(2, ok, f"invariant factors {', '.join(f'{f:.2f}' for f in factor.values())} (limit 2), "
                   f"standard/invariant {ratios} (need >= 5x), "
                   f"standard at 0.84 {'diverged' if unstable else 'finite'}, {secs:.1f} s")
    assert ok


def test_criterion_3_invariance(verdict):
    res = [suites.run_invariance_suite(g, trials=100) for g in suites.GROUPS]
    ok = all(s.passed and s.control_detected for s in res)
    verdict(3, ok, "; ".join(f"{s.group} drift {s.worst_drift:.1e}, control {s.control_worst_drift:.2f}"
                             for s in res))
    assert ok


def test_criterion_4_group_laws(verdict):
    res = [suites.run_group_law_suite(g, pairs=100) for g in suites.GROUPS]
    ok = (all(s.identity_residual == 0.0 and s.worst_closure <= 1e-12 for s in res)
          and res[0].centred_worst_closure > 1e-6)
    verdict(4, ok, "; ".join(f"{s.group} identity {s.identity_residual:g}, closure {s.worst_closure:.1e}"
                             for s in res) + f"; centred closure {res[0].centred_worst_closure:.1e}")
    assert ok


def test_criterion_5_normalization(verdict):
    res = {g: suites.run_normalization_suite(g, trials=100) for g in suites.GROUPS}
    ok = all(v <= 1e-12 for v in res.values())
    verdict(5, ok, ", ".join(f"{g} {v:.1e}" for g, v in res.items()) + " (limit 1e-12)")
    assert ok


def test_criterion_6_convergence(verdict):
    rows = suites.run_convergence_suite()
    bad = [r.name for r in rows if len(r.orders) < 4 or not all(0.8 <= o <= 1.2 for o in r.orders)]
    lo = min(min(r.orders) for r in rows)
    hi = max(max(r.orders) for r in rows)
    verdict(6, not bad, f"{len(rows)} quantities, orders in [{lo:.3f}, {hi:.3f}] over "
                        f"{len(rows[0].orders)} halvings" + (f"; out of range: {bad}" if bad else ""))
    assert not bad


def test_criterion_7_equivariance(verdict):
    inv = suites.run_equivariance_suite("invariant", elements=10)
    std = suites.run_equivariance_suite("standard", elements=10)
    ivp_inv = max(suites.ivp_equivariance("invariant", seed=s)[1] for s in range(10))
    ivp_std = max(suites.ivp_equivariance("standard", seed=s)[1] for s in range(10))
    ok = inv.worst_after <= 1e-10 and std.worst_after > 1e-3 and ivp_inv <= 1e-10 and ivp_std > 1e-3
    verdict(7, ok, f"converged BVP nine-point residual after G2: invariant {inv.worst_after:.1e}, "
                   f"standard {std.worst_after:.1e}; marched cell residual after G2: "
                   f"invariant {ivp_inv:.1e}, standard {ivp_std:.1e}")
    assert ok


def test_criterion_8_round_trip(verdict):
    res = [suites.run_round_trip_suite(k, cells=1000) for k in ("invariant", "standard")]
    worst = {f"{s.kind} {c}": v for s in res for c, v in s.worst_by_corner.items()}
    ok = all(v <= 1e-12 for v in worst.values())
    verdict(8, ok, f"worst back-substituted residual {max(worst.values()):.1e} over 8 forms x 1000 cells "
                   f"(limit 1e-12)")
    assert ok
