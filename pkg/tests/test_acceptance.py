"""Acceptance criteria at their stated scale and tolerance.

Each test prints one ``[criterion N] PASS|FAIL ...`` line (shown even without
``-s``).  Criterion 3 is known to fail for p = 2: the stated bound lacks a
``|beta!|`` factor.  It runs in full, prints FAIL and is marked as a strict
expected failure so that an unexpected pass would also be reported.
"""

from __future__ import annotations

import time
from fractions import Fraction

import mpmath
import pytest

from ultragood.measure import IFSModel, MeasureModel
from ultragood.padic import Ball
from ultragood.report import SuiteConfig
from ultragood.suites import run_suite

pytestmark = pytest.mark.slow


@pytest.fixture
def line(capsys):
    def emit(n: int, ok: bool, detail: str) -> None:
        with capsys.disabled():
            print(f"\n[criterion {n}] {'PASS' if ok else 'FAIL'} {detail}")
    return emit


def timed(config: SuiteConfig) -> tuple[dict, float]:
    start = time.perf_counter()
    report = run_suite(config)
    return report, time.perf_counter() - start


@pytest.fixture(scope="module")
def polymax():
    return timed(SuiteConfig("verify polymax", p=[2, 3, 5], d=[1, 2], l=[1, 2, 3], n=100, seed=0))


def test_criterion_1_taylor_identity(line):
    report, secs = timed(SuiteConfig("verify taylor", d=[1, 2, 3], l=[4], n=500, seed=0))
    ok = len(report["cases"]) == 500 and not report["violations"] and secs < 60
    line(1, ok, f"{report['summary']['identities_checked']} Taylor identities exact zero, "
                f"{len(report['violations'])} nonzero, {secs:.1f}s (< 60s)")
    assert ok


def test_criterion_2_derivative_and_chain_identities(line):
    taylor = run_suite(SuiteConfig("verify taylor", d=[1, 2, 3], l=[4], n=500, seed=0))
    report = run_suite(SuiteConfig("verify diffquot", d=[1, 2, 3], l=[4], n=500, seed=0))
    same = [c["poly"] for c in taylor["cases"]] == [c["poly"] for c in report["cases"]]
    ok = same and len(report["cases"]) == 500 and not report["violations"]
    line(2, ok, f"{report['summary']['identities_checked']} derivative/part/step/chain identities, "
                f"{len(report['violations'])} nonzero, same corpus as criterion 1: {same}")
    assert ok


@pytest.mark.xfail(strict=True, reason="the stated bound omits |beta!|_p^-1; false when p <= |beta| "
                                       "(e.g. x + 3x^2 on Z_2, beta = 2)")
def test_criterion_3_lemn(line):
    report = run_suite(SuiteConfig("verify lemn", p=[2, 3, 5], d=[1, 2], l=[3], n=200, seed=0))
    by_p = report["summary"]["violations_by_p"]
    fact = report["summary"]["factorial_bound_violations"]
    ok = len(report["cases"]) == 600 and not report["violations"]
    line(3, ok, f"violations by p {by_p} over 200 cases each; "
                f"with the |beta!| factor restored: {fact} violations")
    assert fact == 0
    assert ok


def test_criterion_4_poly_maximal(line, polymax):
    report, secs = polymax
    failed = [c["id"] for c in report["cases"] if not c["conclusion"]]
    ok = len(report["cases"]) == 1800 and not failed and "uncertified" not in report and secs < 300
    line(4, ok, f"1800 unit-norm polynomials, inf |Phi_beta P| > p^(-eta(k)-1) fails in {len(failed)}, "
                f"{secs:.1f}s (< 300s)")
    assert ok


def test_criterion_5_theorem_poly(line, polymax):
    report, _ = polymax
    bad = [c["id"] for c in report["cases"] if c["poly0_violations"] or c["poly2_violations"]
           or not c["poly1"]]
    env = report["constants"]
    ok = not bad and not report["violations"] and len(env) == 18
    worst_S = max(Fraction(e["S_max"]) for e in env.values())
    worst_s = min(Fraction(e["s_min"]) for e in env.values())
    worst_C = max(Fraction(e["C_max"]) for e in env.values())
    line(5, ok, f"(s,S,C) estimates fail in {len(bad)} of 1800; envelope over all (p,d,l): "
                f"S <= {worst_S}, s >= {worst_s}, C <= {worst_C}")
    assert ok


def test_criterion_6_good_theorem(line):
    report = run_suite(SuiteConfig("verify good", p=[2, 3, 5], d=[1, 2], l=[3], n=30, seed=0,
                                   eps_grid="auto"))
    cases = report["cases"]
    rows = report["summary"]["rows"]
    low_slope = [c["id"] for c in cases if c.get("slope_ok") is False]
    ok = (not report["violations"] and not low_slope and rows > 0
          and all(c["status"] == "pass" for c in cases))
    line(6, ok, f"{len(cases)} polynomials, {rows} (eps, ball) rows, bound violated in "
                f"{len(report['violations'])}, slope below eta_k*alpha - 0.01 in {len(low_slope)}, "
                f"min slope margin {report['summary']['min_slope_margin']:.3f}")
    assert ok


def test_criterion_7_ifs_sanity(line):
    full = run_suite(SuiteConfig("ifs measure", p=[2], measure={"kind": "full"},
                                 options={"max_t": 8, "compare_haar": True}))
    balls = len(full["cases"])
    full_ok = balls == 2 ** 9 - 1 and not full["violations"]
    cantor = IFSModel.cantor(3)
    with mpmath.workdps(50):
        dim_err = abs(cantor.sim_dim - mpmath.log(2) / mpmath.log(3))
        dim_ok = dim_err < mpmath.mpf("1e-10")
    mu = MeasureModel.self_similar(cantor)
    cyl_ok = all(mu.measure(Ball((0,), m, 3)) == Fraction(1, 2 ** m) for m in range(9))
    ok = full_ok and dim_ok and cyl_ok
    line(7, ok, f"full partition equals Haar on {balls} balls: {full_ok}; "
                f"Cantor dim error {mpmath.nstr(dim_err, 3)}; mu(B(0,3^-m)) = 2^-m for m<=8: {cyl_ok}")
    assert ok


def test_criterion_8_cantor_federer_and_decay(line):
    fed = run_suite(SuiteConfig("measure federer", p=[3], n=20, seed=0, measure={"kind": "cantor"},
                                options={"max_t": 8}))
    dec = run_suite(SuiteConfig("measure decay", p=[3], n=30, seed=0, measure={"kind": "cantor"}))
    D, alpha = fed["summary"]["D"], dec["summary"]["alpha"]
    ok = D is not None and D < float("inf") and alpha > 0 and not dec["violations"]
    line(8, ok, f"Cantor measure: Federer D = {D} over t <= 8, fitted decay alpha = {alpha:.4f}, "
                f"C = {dec['summary']['C']}")
    assert ok


def test_criterion_9_mainp(line):
    report, secs = timed(SuiteConfig("verify mainp", p=[5], d=[1], l=[2], n=1000, seed=0,
                                     curve="veronese", eps_grid="auto"))
    s = report["summary"]
    # cases are (sample, ball) pairs; ids are chunk:sample:ball
    samples = {c["id"].rsplit(":", 1)[0] for c in report["cases"]}
    ok = (len(samples) == 1000 and not report["violations"] and s["normalisation_identity"]
          and s["min_empirical_exponent"] >= 1 / 6 and "uncertified" not in report and secs < 600)
    line(9, ok, f"{len(samples)} samples ({len(report['cases'])} balls) of (x, x^2) on Z_5: normalisation identity {s['normalisation_identity']}, "
                f"{len(report['violations'])} bound violations, min exponent "
                f"{s['min_empirical_exponent']} (>= 1/6), {secs:.1f}s (< 600s)")
    assert ok


def test_criterion_10_federer_collapse(line):
    found = {}
    for p, d, expected in ((5, 1, 1), (5, 2, 1), (2, 1, 2), (2, 2, 4)):
        rep = run_suite(SuiteConfig("measure federer", p=[p], d=[d], n=10, seed=0,
                                    measure={"kind": "haar"}, options={"max_t": 8, "expect_D": expected}))
        found[(p, d)] = (rep["summary"]["D"], expected, not rep["violations"])
    ok = all(v[2] for v in found.values())
    line(10, ok, "Haar D (found, expected): " + ", ".join(
        f"p={p},d={d}: ({v[0]:g}, {v[1]})" for (p, d), v in found.items()))
    assert ok
