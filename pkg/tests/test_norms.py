from __future__ import annotations

import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ultragood.corpus import random_integral_poly
from ultragood.norms import (
    CertificationError,
    grid_extremes,
    inf_exceeds,
    inf_norm_on_ball,
    normalize_to_unit_ball,
    oscillation_on_ball,
    reduced_function,
    sup_exceeds,
    sup_norm_on_ball,
)
from ultragood.padic import Ball, PreconditionError, unit_ball
from ultragood.poly import MultiPoly, diff_quotient

X = MultiPoly.from_univariate


def test_sup_examples():
    for p in (2, 3, 5):
        r = sup_norm_on_ball(X([0, 1]), unit_ball(1, p))
        assert r.certified and r.value == 1
    assert sup_norm_on_ball(X([0, -1, 0, 1]), unit_ball(1, 3)).require() == Fraction(1, 3)
    assert sup_norm_on_ball(X([25, 5]), unit_ball(1, 5)).require() == Fraction(1, 5)


def test_inf_examples():
    r = inf_norm_on_ball(X([1]), Ball((7,), 3, 3))
    assert r.certified and r.value == 1
    r = inf_norm_on_ball(X([0, 1]), unit_ball(1, 5))
    assert r.certified and r.value == 0 and r.upper == 0
    q = diff_quotient(X([0, 0, 1]), 0)  # x1 + x2 on Z_3^2
    assert inf_norm_on_ball(q, unit_ball(1, 3)).value == 0


def test_reduced_function_detects_fermat():
    # x**3 - x folds to zero over F_3, so the sup is strictly below the Gauss norm
    assert reduced_function(X([0, -1, 0, 1]), 3) == {}
    assert reduced_function(X([0, 1, 1]), 3) != {}


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6), st.sampled_from([2, 3, 5]), st.integers(1, 2))
def test_sup_and_inf_match_brute_force(seed, p, d):
    rng = random.Random(seed)
    f = random_integral_poly(rng, d, rng.randint(0, 3), p)
    t = rng.randint(0, 1)
    ball = Ball(tuple(rng.randrange(p ** 3) for _ in range(d)), t, p)
    depth = 4 if d == 1 else 2
    hi, lo = grid_extremes(f, ball, t + depth)
    sup = sup_norm_on_ball(f, ball)
    assert sup.certified
    assert sup.value >= hi
    # the grid max is exact once the grid is fine enough for this degree
    fine_hi, _ = grid_extremes(f, ball, t + (5 if d == 1 else 3))
    assert sup.value == fine_hi
    inf = inf_norm_on_ball(f, ball)
    assert inf.upper <= lo
    if inf.certified and inf.value > 0:
        assert inf.value == lo


def test_decision_helpers():
    f = X([0, -1, 0, 1])
    ball = unit_ball(1, 3)
    assert sup_exceeds(f, ball, Fraction(1, 9))
    assert not sup_exceeds(f, ball, Fraction(1, 3))
    assert inf_exceeds(X([1, 3]), ball, Fraction(1, 3))
    assert not inf_exceeds(f, ball, Fraction(1, 27))


def test_cap_raises_when_undecidable():
    # x**2 - 2 has an irrational root in Z_7 (3**2 = 2 mod 7): the inf is 0 but never attained
    f = X([-2, 0, 1])
    res = inf_norm_on_ball(f, unit_ball(1, 7), max_res=4)
    assert not res.certified and res.lower == 0 and res.upper <= Fraction(1, 7 ** 4)
    with pytest.raises(CertificationError):
        inf_exceeds(f, unit_ball(1, 7), Fraction(1, 7 ** 8), max_res=4)
    with pytest.raises(CertificationError):
        res.require()


def test_normalize_examples():
    phi = normalize_to_unit_ball(X([0, 1]), [0], 1, 3)
    assert phi == X([0, 1])
    assert sup_norm_on_ball(normalize_to_unit_ball(X([0, 0, 1]), [0], 1, 2), unit_ball(1, 2)).require() == 1
    with pytest.raises(PreconditionError):
        normalize_to_unit_ball(MultiPoly.zero((1,)), [0], 0, 3)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10**6), st.sampled_from([2, 3, 5]))
def test_normalized_has_unit_norm(seed, p):
    rng = random.Random(seed)
    f = random_integral_poly(rng, 2, 3, p)
    y = (rng.randrange(p ** 3), rng.randrange(p ** 3))
    t = rng.randint(0, 3)
    if sup_norm_on_ball(f, Ball(y, t, p)).value == 0:
        return
    phi = normalize_to_unit_ball(f, y, t, p)
    assert sup_norm_on_ball(phi, unit_ball(2, p)).require() == 1


def test_oscillation():
    ball = Ball((0,), 1, 3)
    assert oscillation_on_ball(X([5, 1]), ball).require() == Fraction(1, 3)
    assert oscillation_on_ball(X([5]), ball).require() == 0
