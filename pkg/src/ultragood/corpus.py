"""Seeded generators for test corpora: polynomials, balls, affine forms, IFS models."""

from __future__ import annotations

import random
from fractions import Fraction
from typing import Sequence

from .measure import IFSModel, Similitude
from .norms import normalize_to_unit_ball
from .padic import Ball, multi_indices_upto, p_power
from .poly import MultiPoly


def random_rational(rng: random.Random, size: int = 9) -> Fraction:
    num = rng.randint(-size, size)
    den = rng.randint(1, size)
    return Fraction(num, den)


def random_poly(rng: random.Random, d: int, deg: int, density: float = 0.6,
                size: int = 9) -> MultiPoly:
    """General rational coefficients; used for the exact identity suites."""
    terms = {}
    for exp in multi_indices_upto(d, deg):
        if rng.random() < density:
            terms[exp] = random_rational(rng, size)
    if not terms:
        terms[(0,) * d] = Fraction(1)
    return MultiPoly.plain(d, terms)


def random_integral_poly(rng: random.Random, d: int, deg: int, p: int, density: float = 0.7,
                         max_val: int = 2) -> MultiPoly:
    """p-integral coefficients ``u p**v`` with unit Gauss norm (some coefficient is a unit)."""
    exps = multi_indices_upto(d, deg)
    terms = {}
    for exp in exps:
        if rng.random() < density:
            u = rng.randrange(1, p ** 2)
            terms[exp] = Fraction(rng.choice((-1, 1)) * u * p ** rng.randint(0, max_val))
    top = [e for e in exps if sum(e) == deg]
    lead = rng.choice(top if deg > 0 else exps)
    unit = rng.randrange(1, p ** 2)
    while unit % p == 0:
        unit = rng.randrange(1, p ** 2)
    if all(c.numerator % p == 0 for c in terms.values()) or rng.random() < 0.5:
        terms[lead] = Fraction(unit)
    return MultiPoly.plain(d, terms)


def random_unit_poly(rng: random.Random, d: int, deg: int, p: int) -> MultiPoly:
    """Integral polynomial rescaled to sup norm exactly 1 on ``Z_p^d``."""
    f = random_integral_poly(rng, d, deg, p)
    return normalize_to_unit_ball(f, (0,) * d, 0, p)


def random_ball(rng: random.Random, d: int, p: int, max_t: int = 3, digits: int = 4) -> Ball:
    t = rng.randint(0, max_t)
    centre = tuple(Fraction(rng.randrange(p ** digits)) for _ in range(d))
    return Ball(centre, t, p)


def random_beta(rng: random.Random, d: int, max_order: int) -> tuple:
    choices = [b for b in multi_indices_upto(d, max_order) if sum(b) >= 1]
    return rng.choice(choices)


def affine_corpus(p: int, d: int, count: int, seed: int, region: Ball | None = None,
                  max_t: int = 3, sampler=None) -> list[tuple]:
    """``(ball, affine form)`` pairs with balls inside ``region`` (default the unit ball).

    ``sampler(rng)`` may supply ball centres, e.g. points of a fractal support
    so that every ball carries positive measure.
    """
    rng = random.Random(seed)
    region = region or Ball((0,) * d, 0, p)
    out = []
    for _ in range(count):
        t = region.t + rng.randint(0, max_t)
        if sampler is not None:
            centre = tuple(sampler(rng))
        else:
            step = p_power(region.t, p)
            centre = tuple(c + step * rng.randrange(p ** (t - region.t + 1)) for c in region.center)
        ball = Ball(centre, t, p)
        terms = {(0,) * d: Fraction(rng.randrange(-p ** 3, p ** 3 + 1))}
        for j in range(d):
            e = [0] * d
            e[j] = 1
            c = rng.randrange(-p ** 3, p ** 3 + 1)
            if c:
                terms[tuple(e)] = Fraction(c)
        if len(terms) == 1:
            e = [0] * d
            e[rng.randrange(d)] = 1
            terms[tuple(e)] = Fraction(1)
        out.append((ball, MultiPoly.plain(d, terms)))
    return out


def random_ifs(rng: random.Random, p: int, d: int = 1, max_maps: int | None = None) -> IFSModel:
    """Digit-type IFS ``x -> p**k x + b`` with distinct first digits (strongly separated)."""
    max_maps = max_maps or p
    m = rng.randint(2, max(2, min(max_maps, p ** d)))
    digits = rng.sample(range(p ** d), m)
    maps = []
    for code in digits:
        b = []
        for _ in range(d):
            b.append(Fraction(code % p))
            code //= p
        k = rng.randint(1, 2)
        A = [[1 if i == j else 0 for j in range(d)] for i in range(d)]
        maps.append(Similitude(p, k, A, tuple(b)))
    return IFSModel(p, d, tuple(maps), (Ball((0,) * d, 0, p),))


def curve(name: str) -> list[MultiPoly]:
    """Named one-parameter curves: ``veronese`` = (x, x**2), ``cubic`` = (x, x**2, x**3)."""
    x = MultiPoly.from_univariate
    if name in ("veronese", "parabola"):
        return [x([0, 1]), x([0, 0, 1])]
    if name in ("cubic", "twisted_cubic"):
        return [x([0, 1]), x([0, 0, 1]), x([0, 0, 0, 1])]
    raise KeyError(name)


def curve_from_json(obj: Sequence) -> list[MultiPoly]:
    return [MultiPoly.from_json(f) for f in obj]
