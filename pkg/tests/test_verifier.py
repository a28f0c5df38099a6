from __future__ import annotations

import random
from fractions import Fraction

import pytest

from ultragood.corpus import curve, random_integral_poly, random_unit_poly
from ultragood.measure import MeasureModel
from ultragood.padic import Ball, PreconditionError, unit_ball
from ultragood.poly import MultiPoly
from ultragood.verifier import (
    auto_eps_grid,
    check_good_theorem,
    check_hypotheses,
    check_lemn,
    check_local_estimate,
    check_mainp,
    check_taylor_bound,
    check_theorem_poly,
    derivative_transfer_check,
    digit_margin,
    equicontinuity_modulus,
    eta_good,
    eta_poly,
    good_bound,
    loglog_slope,
    maximal_beta_search,
    nondegeneracy_rank,
    pairs_A,
    transfer_constant,
)

X = MultiPoly.from_univariate


def haar(d, p):
    return MeasureModel.haar(unit_ball(d, p)).with_decay(1, 1)


def test_exponent_tables():
    assert [eta_good(k) for k in (1, 2, 3)] == [Fraction(1, 2), Fraction(1, 6), Fraction(1, 14)]
    assert eta_good(0) is None
    assert digit_margin(1, 2) == 1 and digit_margin(2, 2) == 2 and digit_margin(3, 3) == 2
    assert digit_margin(3, 5) == 1
    assert eta_poly(1, 1) == 3 and eta_poly(2, 1) == 7


def test_pairs_and_transfer_constants():
    pairs = pairs_A((2,))
    assert pairs == [((1,), (0,)), ((2,), (0,)), ((2,), (1,))]
    # C_{beta, beta - e_j} = |i_j|^-1 and C_{beta - e_j, beta - 2e_j} = |i_j - 1|^-1
    assert transfer_constant((2,), (1,), 2) == 2
    assert transfer_constant((1,), (0,), 2) == 1
    assert transfer_constant((3,), (2,), 3) == 3
    assert transfer_constant((1, 1), (0, 1), 5) == 1


def test_lemn_examples():
    for p in (2, 3, 5):
        assert check_lemn(X([0, 0, 1]), unit_ball(1, p), (2,))["passed"]
        assert check_lemn(X([0, p]), unit_ball(1, p), (1,))["passed"]
        r = check_lemn(X([0, 1]), Ball((0,), 1, p), (1,))
        assert r["passed"] and r["grid_inf"] == r["bound"] == "1/1"


def test_lemn_fails_when_p_divides_beta_factorial():
    # x + 3x**2 on Z_2: every second quotient equals 3 while |f| <= 1/2
    r = check_lemn(X([0, 1, 3]), unit_ball(1, 2), (2,))
    assert not r["passed"] and r["factorial_passed"]
    assert r["sup"] == "1/2" and r["grid_inf"] == "1/1"
    r = check_lemn(X([0, -1, 0, 1]), unit_ball(1, 3), (3,))
    assert not r["passed"] and r["factorial_passed"]


def test_lemn_random_factorial_bound_always_holds():
    rng = random.Random(1)
    for _ in range(60):
        p = rng.choice([2, 3, 5])
        f = random_integral_poly(rng, rng.randint(1, 2), rng.randint(1, 3), p)
        ball = Ball(tuple(rng.randrange(p ** 3) for _ in range(f.d)), rng.randint(0, 2), p)
        beta = tuple(rng.randint(0, 2) for _ in range(f.d))
        if sum(beta) > f.degree() + 1 or sum(beta) == 0:
            continue
        r = check_lemn(f, ball, beta)
        assert r["factorial_passed"] and r["progression_identity"]
        if p > sum(beta):
            assert r["passed"]


def test_lem2_examples():
    for p in (2, 3, 5):
        mu = haar(1, p)
        for m in range(1, 4):
            r = check_local_estimate(X([0, 1]), mu, unit_ball(1, p), 1, Fraction(1, p ** m))
            assert r["status"] == "pass" and r["measured"] == f"1/{p ** (m + 1)}"
        r = check_local_estimate(X([0, 1, p]), mu, Ball((0,), 1, p), 1, Fraction(1, p ** 3))
        assert r["status"] == "pass"
        r = check_local_estimate(X([3]), mu, unit_ball(1, p), 1, Fraction(1, p))
        assert r["status"] == "not_applicable"
    with pytest.raises(PreconditionError):
        check_local_estimate(X([0, 1]), MeasureModel.haar(unit_ball(1, 3)), unit_ball(1, 3), 1, Fraction(1, 3))


def test_maximal_beta_examples():
    for p in (2, 3, 5):
        c = maximal_beta_search(X([0, 1]), 1, p)
        assert c.a == 1 and c.k == 1 and c.beta == (1,)
        assert c.inf_beta.value == 1 and c.conclusion_holds
        assert c.s_lower == Fraction(1, p ** (eta_poly(1, 1) + 1))
    c = maximal_beta_search(X([0, 1, 1]), 2, 3)
    assert c.a == 1 and c.k == 2 and c.beta == (2,) and c.s_lower == Fraction(1, 3 ** 8)
    c = maximal_beta_search(MultiPoly.plain(2, {(0, 0): 1}), 2, 5)
    assert c.k == 0 and c.beta == (0, 0) and c.pairs == []
    with pytest.raises(PreconditionError):
        maximal_beta_search(X([0, 3]), 1, 3)


def test_maximal_beta_lex_tiebreak():
    f = MultiPoly.plain(2, {(1, 0): 1, (0, 1): 1})
    c = maximal_beta_search(f, 1, 3)
    assert c.beta == (0, 1)


def test_theorem_poly_on_random_corpus():
    rng = random.Random(8)
    for _ in range(40):
        p = rng.choice([2, 3, 5])
        d = rng.randint(1, 2)
        l = rng.randint(1, 3)
        P = random_unit_poly(rng, d, rng.randint(1, l), p)
        c = maximal_beta_search(P, l, p)
        assert c.conclusion_holds
        est = check_theorem_poly(P, c)
        assert est["passed"], est
        for pair, ratio in est["empirical_transfer"].items():
            assert ratio <= c.transfer[pair]


def test_lem3_examples():
    for p in (3, 5):
        f = X([0, 0, 1])
        c = maximal_beta_search(f, 2, p)
        assert check_hypotheses(f, unit_ball(1, p), c)["holds"]
        assert derivative_transfer_check(f, unit_ball(1, p), c, 0)["status"] == "pass"
    c = maximal_beta_search(X([0, 1]), 1, 3)
    assert derivative_transfer_check(X([0, 1]), unit_ball(1, 3), c, 0)["status"] == "pass"
    f = X([0, 1, 0, 1])
    c = maximal_beta_search(f, 3, 5)
    assert derivative_transfer_check(f, unit_ball(1, 5), c, 0)["status"] == "pass"


def test_good_theorem_linear():
    for p in (2, 3, 5):
        r = check_good_theorem(X([0, 1]), haar(1, p), unit_ball(1, p), eps_grid="auto")
        assert r["status"] == "pass"
        assert r["constants"]["k"] == 1 and r["eta_k"] == "1/2"
        for row in r["rows"]:
            eps = Fraction(row["eps"])
            # the event on the shrunken ball is exactly p**-1 * |{|x| < eps}| inside Z_p
            assert Fraction(row["measured"]) == eps / p
            assert row["margin"] > 1e3
        assert abs(r["slope"] - 1) < 1e-9


def test_good_theorem_square_on_z5():
    r = check_good_theorem(X([0, 0, 1]), haar(1, 5), unit_ball(1, 5), eps_grid="auto")
    assert r["status"] == "pass" and r["violations"] == []
    # the default grid p**-1..p**-6 lies outside the admissible window: reported, not an error
    r = check_good_theorem(X([0, 0, 1]), haar(1, 5), unit_ball(1, 5))
    assert r["rows"] == [] and len(r["skipped_eps"]) == 6 and "note" in r


def test_good_theorem_constant_is_trivially_good():
    r = check_good_theorem(X([1]), haar(1, 3), unit_ball(1, 3), eps_grid="auto")
    assert r["constants"]["k"] == 0
    assert r["status"] == "pass"
    assert all(Fraction(row["measured"]) == 0 for row in r["rows"])


def test_good_bound_structure():
    c = maximal_beta_search(X([0, 1]), 1, 3)
    eps = auto_eps_grid(c)
    assert all(e < c.window() for e in eps)
    b1, b2 = good_bound(c, 1, 1, eps[0]), good_bound(c, 1, 1, eps[1])
    assert abs(float(b1 / b2) - 3 ** 0.5) < 1e-9


def test_loglog_slope():
    pts = [(Fraction(1, 3 ** k), 3.0 ** (-k / 2)) for k in range(1, 6)]
    assert abs(loglog_slope(pts) - 0.5) < 1e-12
    assert loglog_slope([(Fraction(1, 3), 0.0)]) is None


def test_mainp_veronese_small():
    r = check_mainp(curve("veronese"), haar(1, 5), unit_ball(1, 5), 2, 10, seed=3)
    assert r["status"] == "pass", r["violations"][:1]
    assert r["rank"] == 2 and r["target_exponent"] == "1/6"
    assert r["normalisation_identity"]
    assert r["min_empirical_exponent"] >= 1 / 6


def test_mainp_degenerate_curve():
    r = check_mainp(curve("veronese"), haar(1, 5), unit_ball(1, 5), 1, 3, seed=0)
    assert r["status"] == "not_applicable"
    assert nondegeneracy_rank(curve("cubic"), [0], 3) == 3


def test_equicontinuity_examples():
    V = unit_ball(1, 3)
    assert equicontinuity_modulus(curve("veronese"), 2, Fraction(1, 3 ** 4), V) == 0
    assert equicontinuity_modulus(curve("cubic"), 2, Fraction(1, 3 ** 4), V) == 5
    # K = 1 here, so eps must exceed K p**-t: eps = 1 needs one more digit, eps = 2 none
    assert equicontinuity_modulus(curve("cubic"), 2, 1, V) == 1
    assert equicontinuity_modulus(curve("cubic"), 2, 2, V) == 0


def test_taylor_bound_with_equicontinuity():
    rng = random.Random(5)
    cub = curve("cubic")
    eps = Fraction(1, 3 ** 2)
    t = equicontinuity_modulus(cub, 2, eps, unit_ball(1, 3))
    for _ in range(20):
        coeffs = [Fraction(rng.randrange(-27, 28)) for _ in range(4)]
        g = cub[0] * coeffs[1] + cub[1] * coeffs[2] + cub[2] * coeffs[3] + coeffs[0]
        ball = Ball((rng.randrange(27),), t + rng.randint(0, 2), 3)
        r = check_taylor_bound(g, ball, 2)
        assert r["passed"]
        assert Fraction(r["M"]) < eps
