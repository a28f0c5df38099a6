"""Certified sup and inf of ``|f|_p`` over clopen (product) balls.

The search works on cells ``a + p**m Z_p^n`` of the unit-normalised ball.  On
each cell the recentred polynomial ``g(w) = f(a + p**m w)`` gives

* ``|g(0)|``: an attained value,
* ``osc``: the largest coefficient norm of the non-constant part, a sound
  bound for ``|g(w) - g(0)|`` (the Lipschitz majorant times the cell radius),
* the reduction of ``g / gauss(g)`` modulo ``p`` read as a function on
  ``F_p^n``; after folding exponents with ``x**p = x`` it is zero iff the sup
  of ``|g|`` on the cell is strictly below the Gauss norm.

A cell with ``|g(0)| > osc`` has ``|g|`` constant.  Cells are refined
(``p**n`` children) only where neither test settles the question, up to a
resolution cap.  Whatever the cap, a result flagged ``certified`` is exact.
"""

from __future__ import annotations

import heapq
import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .padic import Ball, PreconditionError, norm, p_power, residue, valuation
from .poly import MultiPoly

DEFAULT_EXTRA_DIGITS = 6
MAX_CELLS = 200_000


class CertificationError(RuntimeError):
    """A norm needed for a verdict could not be certified within the cap."""


@dataclass(frozen=True)
class NormResult:
    """Outcome of a sup/inf search.

    ``value`` is exact when ``certified``; otherwise ``lower <= true <= upper``
    and ``value`` is the attained estimate (``lower`` for sup, ``upper`` for inf).
    """

    value: Fraction
    certified: bool
    lower: Fraction
    upper: Fraction
    resolution: int
    cells: int
    attained: bool = True

    def require(self) -> Fraction:
        if not self.certified:
            raise CertificationError(f"uncertified norm in [{self.lower}, {self.upper}]")
        return self.value


def variable_centres(f: MultiPoly, ball: Ball) -> list[Fraction]:
    """Centre of every variable of ``f`` (all copies of coordinate j share ``center[j]``)."""
    if ball.d != f.d:
        raise PreconditionError(f"ball has dimension {ball.d}, polynomial has {f.d} coordinates")
    return [ball.center[j] for j in f.coordinate_of_var()]


def to_unit_cell(f: MultiPoly, ball: Ball) -> MultiPoly:
    """``g(u) = f(c + p**t u)`` so the ball becomes ``Z_p^n``."""
    return f.shift_scale(variable_centres(f, ball), p_power(ball.t, ball.p))


def cell_stats(g: MultiPoly, p: int):
    zero = (0,) * g.nvars
    v0 = norm(g.terms.get(zero, 0), p)
    osc = max((norm(c, p) for e, c in g.terms.items() if e != zero), default=Fraction(0))
    return v0, osc


def reduced_function(g: MultiPoly, p: int) -> dict:
    """``g / gauss(g)`` mod p with exponents folded by ``x**p = x``; keys are exponent tuples."""
    vmin = min(valuation(c, p) for c in g.terms.values())
    out: dict = {}
    for exp, c in g.terms.items():
        if valuation(c, p) != vmin:
            continue
        r = residue(c / Fraction(p) ** vmin, p)
        key = tuple(0 if e == 0 else (e - 1) % (p - 1) + 1 for e in exp)
        out[key] = (out.get(key, 0) + r) % p
    return {k: v for k, v in out.items() if v}


def residue_values(red: dict, n: int, p: int):
    """Yield ``(digits, value mod p)`` of the reduced function over ``F_p^n``."""
    terms = list(red.items())
    for digits in itertools.product(range(p), repeat=n):
        total = 0
        for exp, c in terms:
            term = c
            for a, e in zip(digits, exp):
                if e:
                    term = term * pow(a, e, p) % p
                    if not term:
                        break
            total += term
        yield digits, total % p


def _children(g: MultiPoly, p: int, digits_list=None):
    n = g.nvars
    if digits_list is None:
        digits_list = itertools.product(range(p), repeat=n)
    for digits in digits_list:
        yield digits, g.shift_scale(digits, p)


def sup_norm_on_ball(f: MultiPoly, ball: Ball, max_res: int | None = None,
                     exceed: Fraction | None = None) -> NormResult:
    """Certified ``sup_{x in ball} |f(x)|_p`` (copies of a coordinate range independently).

    With ``exceed`` set the search stops as soon as a point with
    ``|f| > exceed`` is found (the result is then a certified lower bound).
    """
    p = ball.p
    cap = (ball.t + DEFAULT_EXTRA_DIGITS if max_res is None else max_res) - ball.t
    g0 = to_unit_cell(f, ball)
    if g0.is_zero():
        return NormResult(Fraction(0), True, Fraction(0), Fraction(0), ball.t, 1)
    lower = Fraction(0)
    open_upper = Fraction(0)
    deepest = 0
    cells = 0
    counter = itertools.count()
    heap = [(-g0.gauss_norm(p), next(counter), 0, g0)]
    while heap:
        neg_bound, _, depth, g = heapq.heappop(heap)
        bound = -neg_bound
        if bound <= lower:
            break
        cells += 1
        deepest = max(deepest, depth)
        v0, osc = cell_stats(g, p)
        lower = max(lower, v0)
        if exceed is not None and lower > exceed:
            return NormResult(lower, False, lower, max(bound, lower), ball.t + deepest, cells)
        if osc <= v0:
            continue
        if reduced_function(g, p):
            lower = max(lower, osc)
            continue
        tight = osc / p
        if tight <= lower:
            continue
        if depth >= cap or cells > MAX_CELLS:
            open_upper = max(open_upper, tight)
            continue
        for _, child in _children(g, p):
            if child.is_zero():
                continue
            cb = child.gauss_norm(p)
            if cb > lower:
                heapq.heappush(heap, (-cb, next(counter), depth + 1, child))
    if open_upper > lower:
        return NormResult(lower, False, lower, open_upper, ball.t + deepest, cells)
    return NormResult(lower, True, lower, lower, ball.t + deepest, cells)


def sup_exceeds(f: MultiPoly, ball: Ball, threshold: Fraction, max_res: int | None = None) -> bool:
    """Decide ``sup |f| > threshold``; raises if the cap leaves it open."""
    res = sup_norm_on_ball(f, ball, max_res, exceed=threshold)
    if res.lower > threshold:
        return True
    if res.upper <= threshold:
        return False
    raise CertificationError(f"cannot decide sup > {threshold}: bounds [{res.lower}, {res.upper}]")


def inf_norm_on_ball(f: MultiPoly, ball: Ball, max_res: int | None = None,
                     above: Fraction | None = None) -> NormResult:
    """Certified ``inf_{x in ball} |f(x)|_p`` where possible.

    A zero at a rational point is exact (``attained``).  If the cap is hit, the
    result carries ``upper`` (an attained value, hence a true upper bound on
    the inf) and ``lower``.  With ``above`` set the search stops as soon as a
    value ``<= above`` is seen.
    """
    p = ball.p
    cap = (ball.t + DEFAULT_EXTRA_DIGITS if max_res is None else max_res) - ball.t
    g0 = to_unit_cell(f, ball)
    if g0.is_zero():
        return NormResult(Fraction(0), True, Fraction(0), Fraction(0), ball.t, 1)
    upper = None
    open_lower = None
    deepest = 0
    cells = 0
    stack = [(0, g0)]
    while stack:
        depth, g = stack.pop()
        cells += 1
        deepest = max(deepest, depth)
        v0, osc = cell_stats(g, p)
        upper = v0 if upper is None else min(upper, v0)
        if v0 == 0:
            return NormResult(Fraction(0), True, Fraction(0), Fraction(0), ball.t + deepest, cells)
        if above is not None and upper <= above:
            return NormResult(upper, False, Fraction(0), upper, ball.t + deepest, cells)
        if v0 > osc:
            continue  # |g| is constant v0 on this cell
        # here gauss(g) == osc >= v0; residues where the reduction is nonzero have |g| == osc
        if depth >= cap or cells > MAX_CELLS:
            open_lower = Fraction(0)
            continue
        red = reduced_function(g, p)
        zeros = [digits for digits, val in residue_values(red, g.nvars, p) if val == 0]
        for _, child in _children(g, p, zeros):
            stack.append((depth + 1, child))
    if open_lower is not None:
        return NormResult(upper, False, open_lower, upper, ball.t + deepest, cells)
    return NormResult(upper, True, upper, upper, ball.t + deepest, cells)


def inf_exceeds(f: MultiPoly, ball: Ball, threshold: Fraction, max_res: int | None = None) -> bool:
    """Decide ``inf |f| > threshold``; raises if the cap leaves it open."""
    res = inf_norm_on_ball(f, ball, max_res, above=threshold)
    if res.upper <= threshold:
        return False
    if res.lower > threshold:
        return True
    raise CertificationError(f"cannot decide inf > {threshold}: bounds [{res.lower}, {res.upper}]")


def grid_extremes(f: MultiPoly, ball: Ball, resolution: int) -> tuple[Fraction, Fraction]:
    """Brute-force (max, min) of ``|f|`` over the ball grid of every variable.

    The max is a lower bound on the sup and the min an upper bound on the inf.
    """
    p = ball.p
    centres = variable_centres(f, ball)
    step = p_power(ball.t, p)
    count = p ** (resolution - ball.t)
    axes = [[c + step * k for k in range(count)] for c in centres]
    hi, lo = Fraction(0), None
    for pt in itertools.product(*axes):
        v = norm(f.evaluate(pt), p)
        hi = max(hi, v)
        lo = v if lo is None else min(lo, v)
    return hi, lo


def oscillation_on_ball(f: MultiPoly, ball: Ball, max_res: int | None = None) -> NormResult:
    """``sup |f(w1) - f(w2)|`` over the ball, which equals ``sup |f(w) - f(centre)|``."""
    centre_value = f.evaluate(variable_centres(f, ball))
    return sup_norm_on_ball(f - centre_value, ball, max_res)


def normalize_to_unit_ball(g: MultiPoly, y: Sequence, t: int, p: int,
                           max_res: int | None = None) -> MultiPoly:
    """``phi(x) = |g|_B * g(y + r**-1 x)`` read with rational scalars.

    ``B = B(y, p**-t)``; the real number ``|g|_B = p**-v`` is realised by the
    rational ``p**-v`` (norm ``p**v``) and ``r**-1 = p**t`` by the rational
    ``p**t`` (norm ``r``).  Hence ``|phi|_{B(0,1)} == 1`` exactly.
    """
    ball = Ball(tuple(y), t, p)
    size = sup_norm_on_ball(g, ball, max_res).require()
    if size == 0:
        raise PreconditionError("cannot normalise the zero function")
    return g.shift_scale(ball.center, p_power(t, p)) * size
