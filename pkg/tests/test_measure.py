from __future__ import annotations

import itertools
import random
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ultragood.corpus import affine_corpus, random_ifs, random_integral_poly
from ultragood.measure import (
    IFSModel,
    MeasureModel,
    PreconditionError,
    SeparationError,
    Similitude,
    estimate_decay,
    estimate_federer,
    event_measure,
    haar_measure,
    ifs_check_osc,
    ifs_sample,
    verify_decay,
)
from ultragood.padic import Ball, norm, unit_ball
from ultragood.poly import MultiPoly

X = MultiPoly.from_univariate


def test_haar_examples():
    assert haar_measure(unit_ball(1, 5), Ball((0,), 1, 5)) == Fraction(1, 5)
    assert haar_measure(unit_ball(2, 3), Ball((0, 0), 2, 3)) == Fraction(1, 81)
    assert haar_measure(unit_ball(1, 2), unit_ball(1, 2)) == 1
    with pytest.raises(PreconditionError):
        haar_measure(Ball((0,), 1, 3), unit_ball(1, 3))


def test_osc_examples():
    ok = IFSModel(2, 1, (Similitude.scalar(2, 1, (0,)), Similitude.scalar(2, 1, (1,))), (unit_ball(1, 2),))
    assert ifs_check_osc(ok).passed
    assert ifs_check_osc(IFSModel.cantor(3)).passed
    bad = IFSModel(2, 1, (Similitude.scalar(2, 1, (0,)), Similitude.scalar(2, 1, (0,))), (unit_ball(1, 2),))
    res = ifs_check_osc(bad)
    assert not res.passed and res.witness is not None
    overlapping = IFSModel(2, 1, tuple(Similitude.scalar(2, 1, (b,)) for b in (0, 1, 3)), (unit_ball(1, 2),))
    assert not ifs_check_osc(overlapping).passed
    with pytest.raises(SeparationError):
        MeasureModel.self_similar(overlapping).measure(Ball((0,), 1, 2))
    # identical maps collapse the attractor to their common fixed point
    assert MeasureModel.self_similar(bad).measure(Ball((0,), 5, 2)) == 1


def test_similarity_dimension_examples():
    assert abs(IFSModel.full_partition(2).sim_dim - 1) < 1e-30
    cantor = IFSModel.cantor(3)
    with mpmath.workdps(50):
        assert abs(cantor.sim_dim - mpmath.log(2) / mpmath.log(3)) < 1e-30
    assert abs(IFSModel.full_partition(5).sim_dim - 1) < 1e-30


def test_unequal_ratios_dimension_root():
    maps = (Similitude.scalar(3, 1, (0,)), Similitude.scalar(3, 2, (1,)), Similitude.scalar(3, 2, (2,)))
    model = IFSModel(3, 1, maps, (unit_ball(1, 3),))
    s = model.sim_dim
    assert abs(3 ** -s + 2 * 9 ** -s - 1) < 1e-40
    assert abs(sum(model.weights) - 1) < 1e-40


def test_full_partition_equals_haar():
    mu = MeasureModel.self_similar(IFSModel.full_partition(2))
    for t in range(0, 7):
        for c in range(2 ** t):
            assert mu.measure(Ball((c,), t, 2)) == Fraction(1, 2 ** t)


def test_cantor_measures():
    mu = MeasureModel.self_similar(IFSModel.cantor(3))
    for m in range(9):
        assert mu.measure(Ball((0,), m, 3)) == Fraction(1, 2 ** m)
    assert mu.measure(Ball((1,), 1, 3)) == Fraction(1, 2)
    assert mu.measure(Ball((2,), 1, 3)) == 0


def test_sampling_coding_property():
    rng = random.Random(4)
    cantor = IFSModel.cantor(3)
    for _ in range(50):
        (x,) = ifs_sample(cantor, rng, 10)
        n = int(x)
        assert x.denominator == 1
        for _ in range(10):
            assert n % 3 in (0, 1)
            n //= 3
    full = IFSModel.full_partition(2)
    ones = sum(int(ifs_sample(full, rng, 16)[0]) & 1 for _ in range(10_000))
    assert abs(ones / 10_000 - 0.5) < 0.05
    single = IFSModel(3, 1, (Similitude.scalar(3, 1, (1,)),))
    (x,) = ifs_sample(single, rng, 12)
    assert norm(x - Fraction(1, -2), 3) <= Fraction(1, 3 ** 12)


def test_event_measure_linear_and_constant():
    for p in (2, 3, 5):
        mu = MeasureModel.haar(unit_ball(1, p))
        for m in range(1, 6):
            ev = event_measure(X([0, 1]), mu, unit_ball(1, p), Fraction(1, p ** m))
            assert ev.exact and ev.value == Fraction(1, p ** (m + 1))
        mu2 = MeasureModel.haar(unit_ball(2, p))
        ev = event_measure(MultiPoly.plain(2, {(1, 0): 1}), mu2, unit_ball(2, p), Fraction(1, p ** 2))
        assert ev.value == Fraction(1, p ** 3)
        ev = event_measure(X([1]), mu, unit_ball(1, p), Fraction(1, p))
        assert ev.value == 0


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6), st.sampled_from([2, 3, 5]), st.integers(1, 2))
def test_event_measure_matches_coset_count(seed, p, d):
    rng = random.Random(seed)
    f = random_integral_poly(rng, d, rng.randint(1, 3), p)
    m = rng.randint(1, 3 if d == 1 else 2)
    T = Fraction(1, p ** m)
    mu = MeasureModel.haar(unit_ball(d, p))
    ev = event_measure(f, mu, unit_ball(d, p), T)
    # integral coefficients make f 1-Lipschitz, so |f| < p**-m is decided by
    # the residue class modulo p**(m+1): the count below is exact
    R = m + 1
    pts = itertools.product(range(p ** R), repeat=d)
    hits = sum(1 for x in pts if norm(f.evaluate(list(x)), p) < T)
    assert ev.exact
    assert ev.value == Fraction(hits, p ** (R * d))


def test_event_measure_square_on_z5():
    mu = MeasureModel.haar(unit_ball(1, 5))
    for m in range(1, 7):
        ev = event_measure(X([0, 0, 1]), mu, unit_ball(1, 5), Fraction(1, 5 ** m))
        assert ev.exact and ev.value == Fraction(1, 5 ** ((m + 2) // 2))


def test_haar_decay_on_affine_corpus():
    for p, d in ((2, 1), (3, 2), (5, 1)):
        mu = MeasureModel.haar(unit_ball(d, p))
        cases = affine_corpus(p, d, 20, seed=p)
        assert verify_decay(mu, cases, [Fraction(1, p ** k) for k in range(1, 5)], 1, 1) == []


def test_cantor_decay_positive():
    mu = MeasureModel.self_similar(IFSModel.cantor(3))
    cases = affine_corpus(3, 1, 15, seed=2, sampler=lambda rng: mu.sample(rng, 14))
    est = estimate_decay(mu, cases, [Fraction(1, 3 ** k) for k in range(1, 6)])
    assert 0 < est.alpha < 2
    assert not est.violations


def test_federer_values():
    rng = random.Random(0)
    mu5 = MeasureModel.haar(unit_ball(2, 5))
    centres = [mu5.sample(rng, 6) for _ in range(5)]
    assert estimate_federer(mu5, centres, range(0, 6)).D == 1
    for d in (1, 2):
        mu2 = MeasureModel.haar(unit_ball(d, 2))
        centres = [mu2.sample(rng, 10) for _ in range(5)]
        assert estimate_federer(mu2, centres, range(1, 9)).D == 2 ** d
    cantor = MeasureModel.self_similar(IFSModel.cantor(3))
    centres = [cantor.sample(rng, 14) for _ in range(10)]
    est = estimate_federer(cantor, centres, range(0, 9))
    assert est.D == 2


def test_ifs_json_roundtrip_and_errors():
    model = random_ifs(random.Random(3), 5)
    again = IFSModel.from_json(model.to_json())
    assert again.to_json() == model.to_json()
    with pytest.raises(PreconditionError):
        IFSModel.from_json({"p": 3})
    with pytest.raises(PreconditionError):
        Similitude(3, 1, ((3,),), (0,))  # linear part not a unit


def test_random_ifs_are_separated():
    rng = random.Random(9)
    for _ in range(20):
        model = random_ifs(rng, rng.choice([2, 3, 5]))
        assert ifs_check_osc(model).passed
        mu = MeasureModel.self_similar(model)
        total = sum(mu.measure(b) for b in mu.support_ball.children())
        assert abs(float(total) - 1) < 1e-12
