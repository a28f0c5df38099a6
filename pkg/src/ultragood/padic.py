"""Exact p-adic scalars, points and clopen balls.

Every scalar is a :class:`fractions.Fraction`; the p-adic absolute value is
computed exactly from the valuation and returned as a Fraction that is an
integral power of ``p`` (or 0).  Nothing here truncates digit expansions.

Radius convention: a ball is ``B(c, p**-t)`` and is stored by its radius
exponent ``t``.  Rescaling a ball of radius ``r = p**-t`` to the unit ball uses
the rational number ``p**t``, whose p-adic norm is ``p**-t = r``.  In other
words the real number ``1/r`` that appears in ``x -> y + x/r`` is realised by a
rational whose *norm* is ``r``, not ``1/r``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence, Union

Rational = Union[int, Fraction]
Point = tuple  # tuple[Fraction, ...]
MultiIndex = tuple  # tuple[int, ...]

INF = math.inf


class PreconditionError(ValueError):
    """An operation was called outside its documented domain."""


# ---------------------------------------------------------------------------
# valuations and norms


def _int_valuation(n: int, p: int) -> int:
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def valuation(x: Rational, p: int) -> int | float:
    """p-adic valuation of a rational; ``math.inf`` for zero."""
    if x == 0:
        return INF
    x = Fraction(x)
    return _int_valuation(x.numerator, p) - _int_valuation(x.denominator, p)


def norm(x: Rational, p: int) -> Fraction:
    """Exact p-adic absolute value ``p**-v(x)`` as a Fraction."""
    v = valuation(x, p)
    if v == INF:
        return Fraction(0)
    return p_power(-v, p)


def p_power(e: int, p: int) -> Fraction:
    """``p**e`` as an exact Fraction (negative exponents allowed)."""
    return Fraction(p) ** e


def norm_exponent(value: Fraction, p: int) -> int | float:
    """Inverse of :func:`norm`: the ``v`` with ``value == p**-v``."""
    if value == 0:
        return INF
    v = -valuation(value, p)
    if p_power(-v, p) != value:
        raise ValueError(f"{value} is not a power of {p}")
    return v


def largest_p_power_below(x: Rational, p: int, strict: bool = False) -> Fraction:
    """Largest ``p**e`` with ``p**e <= x`` (``< x`` when ``strict``)."""
    x = Fraction(x)
    if x <= 0:
        raise PreconditionError("need a positive number")
    e = math.floor(math.log(x.numerator, p) - math.log(x.denominator, p))
    # the float guess is within one of the truth; fix it up exactly
    while p_power(e, p) > x or (strict and p_power(e, p) == x):
        e -= 1
    while p_power(e + 1, p) < x or (not strict and p_power(e + 1, p) == x):
        e += 1
    return p_power(e, p)


def residue(x: Rational, p: int) -> int:
    """Image of a p-integral rational in ``Z/pZ``."""
    x = Fraction(x)
    if x.denominator % p == 0:
        raise ValueError(f"{x} is not {p}-integral")
    return x.numerator * pow(x.denominator, -1, p) % p


@dataclass(frozen=True)
class PAdicScalar:
    """A rational number viewed inside ``Q_p``."""

    prime: int
    value: Fraction

    def __post_init__(self):
        if self.prime < 2:
            raise ValueError("prime must be >= 2")
        object.__setattr__(self, "value", Fraction(self.value))

    def _coerce(self, other) -> Fraction:
        if isinstance(other, PAdicScalar):
            if other.prime != self.prime:
                raise ValueError("mixed primes")
            return other.value
        return Fraction(other)

    def __add__(self, other):
        return PAdicScalar(self.prime, self.value + self._coerce(other))

    __radd__ = __add__

    def __sub__(self, other):
        return PAdicScalar(self.prime, self.value - self._coerce(other))

    def __rsub__(self, other):
        return PAdicScalar(self.prime, self._coerce(other) - self.value)

    def __mul__(self, other):
        return PAdicScalar(self.prime, self.value * self._coerce(other))

    __rmul__ = __mul__

    def __truediv__(self, other):
        return PAdicScalar(self.prime, self.value / self._coerce(other))

    def __neg__(self):
        return PAdicScalar(self.prime, -self.value)

    def valuation(self) -> int | float:
        return valuation(self.value, self.prime)

    def norm(self) -> Fraction:
        return norm(self.value, self.prime)


def point(coords: Sequence[Rational]) -> Point:
    return tuple(Fraction(c) for c in coords)


def sup_norm(x: Sequence[Rational], p: int) -> Fraction:
    """Supremum norm ``max_i |x_i|_p`` of a point of ``Q_p^d``."""
    return max((norm(c, p) for c in x), default=Fraction(0))


def distance(x: Sequence[Rational], y: Sequence[Rational], p: int) -> Fraction:
    return sup_norm([a - b for a, b in zip(x, y)], p)


# ---------------------------------------------------------------------------
# multi-indices


def multi_indices(d: int, k: int) -> list[MultiIndex]:
    """All multi-indices of length ``d`` and total order ``k``, lex-sorted."""
    out = [b for b in itertools.product(range(k + 1), repeat=d) if sum(b) == k]
    return sorted(out)


def multi_indices_upto(d: int, k: int) -> list[MultiIndex]:
    return [b for j in range(k + 1) for b in multi_indices(d, j)]


def unit_index(d: int, j: int) -> MultiIndex:
    """``e_j`` (zero-based ``j``)."""
    return tuple(1 if i == j else 0 for i in range(d))


def plus_one(beta: MultiIndex) -> MultiIndex:
    """``beta(1) = beta + (1, ..., 1)``: the copy counts of ``Phi_beta f``."""
    return tuple(b + 1 for b in beta)


def index_factorial(beta: MultiIndex) -> int:
    return math.prod(math.factorial(b) for b in beta)


def index_leq(a: MultiIndex, b: MultiIndex) -> bool:
    return all(x <= y for x, y in zip(a, b))


# ---------------------------------------------------------------------------
# balls


@dataclass(frozen=True)
class Ball:
    """Closed (hence clopen) ball ``{x : ||x - center|| <= p**-t}`` in ``Q_p^d``."""

    center: Point
    t: int
    p: int

    def __post_init__(self):
        object.__setattr__(self, "center", point(self.center))

    @property
    def d(self) -> int:
        return len(self.center)

    @property
    def radius(self) -> Fraction:
        return p_power(-self.t, self.p)

    def contains_point(self, x: Sequence[Rational]) -> bool:
        return all(valuation(Fraction(a) - c, self.p) >= self.t for a, c in zip(x, self.center))

    def contains_ball(self, other: "Ball") -> bool:
        return other.t >= self.t and self.contains_point(other.center)

    def intersects(self, other: "Ball") -> bool:
        big, small = (self, other) if self.t <= other.t else (other, self)
        return big.contains_point(small.center)

    def with_center(self, center: Sequence[Rational]) -> "Ball":
        return Ball(point(center), self.t, self.p)

    def child(self, digits: Sequence[int]) -> "Ball":
        """Sub-ball of radius ``p**-(t+1)`` around ``center + p**t * digits``."""
        step = p_power(self.t, self.p)
        return Ball(tuple(c + step * a for c, a in zip(self.center, digits)), self.t + 1, self.p)

    def children(self) -> Iterator["Ball"]:
        for digits in itertools.product(range(self.p), repeat=self.d):
            yield self.child(digits)

    def canonical_center(self) -> Point:
        """A deterministic member usable as a hashable key for the ball."""
        step = p_power(self.t, self.p)
        return tuple(_reduce_mod(c, step, self.p) for c in self.center)

    def key(self) -> tuple:
        return (self.p, self.t, self.canonical_center())


def _reduce_mod(c: Fraction, step: Fraction, p: int) -> Fraction:
    """Canonical representative of ``c + step*Z_p`` (p-adic fractional digits kept)."""
    # write c = u / p**m with u p-integral; keep digits of c below p-adic order t
    v = valuation(step, p)
    if c == 0 or valuation(c, p) >= v:
        return Fraction(0)
    # find rational with p-power denominator congruent to c modulo p**v
    m = max(0, -valuation(c, p))
    scaled = c * p ** m  # p-integral
    modulus = p ** (v + m) if v + m > 0 else 1
    r = residue_mod(scaled, modulus, p)
    return Fraction(r, p ** m)


def residue_mod(x: Fraction, modulus: int, p: int) -> int:
    x = Fraction(x)
    if modulus == 1:
        return 0
    return x.numerator * pow(x.denominator, -1, modulus) % modulus


def unit_ball(d: int, p: int) -> Ball:
    return Ball(tuple(Fraction(0) for _ in range(d)), 0, p)


def ball_grid(ball: Ball, resolution: int) -> list[Point]:
    """One representative per sub-ball of radius ``p**-resolution``.

    Representatives are ``center + p**t * k`` with ``0 <= k < p**(resolution - t)``
    in every coordinate, so the list has ``p**(d*(resolution - t))`` entries.
    """
    if resolution < ball.t:
        raise PreconditionError(f"resolution {resolution} is below the radius exponent {ball.t}")
    step = p_power(ball.t, ball.p)
    count = ball.p ** (resolution - ball.t)
    axes = [[c + step * k for k in range(count)] for c in ball.center]
    return [tuple(x) for x in itertools.product(*axes)]


def shrink_real_radius(ball: Ball, c: Union[Rational, float]) -> Ball:
    """The clopen ball ``B(center, c * radius)`` written with a p-power radius.

    In ``Q_p`` the ball of real radius ``R`` equals the ball of radius the
    largest power of ``p`` not exceeding ``R``.  At ``p >= 5`` this makes
    ``B(x, 3r) == B(x, r)``; at ``p == 2`` it is ``B(x, 2r)``.
    """
    if c <= 0:
        raise PreconditionError("scale factor must be positive")
    c = Fraction(c)
    e = -norm_exponent(largest_p_power_below(c, ball.p), ball.p)
    return Ball(ball.center, ball.t - e, ball.p)


# ---------------------------------------------------------------------------
# JSON helpers


def rat_to_str(x: Rational) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def rat_from(obj) -> Fraction:
    if isinstance(obj, (int, Fraction)):
        return Fraction(obj)
    if isinstance(obj, str):
        return Fraction(obj.strip())
    raise ValueError(f"cannot read a rational from {obj!r}")


def ball_to_json(ball: Ball) -> dict:
    return {"center": [rat_to_str(c) for c in ball.center], "t": ball.t, "p": ball.p}


def ball_from_json(obj: dict, p: int | None = None) -> Ball:
    prime = obj.get("p", p)
    if prime is None:
        raise ValueError("ball without a prime")
    return Ball(tuple(rat_from(c) for c in obj["center"]), int(obj["t"]), int(prime))
