"""Checkable predicates for the good-function estimates and constant extraction.

Every "pass" below rests on certified sup/inf norms (see :mod:`norms`) and
exact event measures (see :mod:`measure`).  A norm that cannot be certified
within the resolution cap raises :class:`CertificationError`; a violated
inequality is returned as a witness, never raised.

Symbol note: ``alpha`` for a decay exponent of a measure is a real number,
while multi-indices are tuples; the two never share a variable here.
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import mpmath

from . import linalg
from .measure import MeasureModel, event_measure
from .norms import (
    CertificationError,
    NormResult,
    inf_exceeds,
    inf_norm_on_ball,
    normalize_to_unit_ball,
    oscillation_on_ball,
    sup_norm_on_ball,
)
from .padic import (
    Ball,
    MultiIndex,
    PreconditionError,
    ball_to_json,
    index_factorial,
    index_leq,
    largest_p_power_below,
    multi_indices,
    multi_indices_upto,
    norm,
    p_power,
    rat_to_str,
    unit_ball,
    unit_index,
)
from .poly import (
    MultiPoly,
    QuotientTable,
    coefficient_combination,
    diff_quotient_multi,
    evaluate_repeated,
    partial_derivative,
    taylor_poly,
)

DPS = 50


def _mp(x) -> mpmath.mpf:
    if isinstance(x, Fraction):
        return mpmath.mpf(x.numerator) / x.denominator
    return mpmath.mpf(x)


def leq(a, b) -> bool:
    """``a <= b`` exactly for rationals, at 50 digits otherwise."""
    if isinstance(a, (int, Fraction)) and isinstance(b, (int, Fraction)):
        return Fraction(a) <= Fraction(b)
    with mpmath.workdps(DPS):
        return _mp(a) <= _mp(b)


def _num(x):
    """JSON-friendly number: exact rationals as strings, others as floats."""
    if isinstance(x, (int, Fraction)):
        return rat_to_str(x)
    return float(x)


# ---------------------------------------------------------------------------
# constants of the polynomial argument


def digit_margin(l: int, p: int) -> int:
    """Smallest ``a >= 1`` with ``p**-a < |i|_p`` for ``i = 1..l``, i.e. ``p**a > l``."""
    a = 1
    while p ** a <= l:
        a += 1
    return a


def eta_poly(n: int, a: int) -> int:
    """``eta(n) = n**2 a + n a + 1``."""
    return n * n * a + n * a + 1


def eta_good(k: int) -> Fraction | None:
    """Exponent ``1 / (2**(k+1) - 2)``; ``None`` (infinite) for ``k = 0``."""
    if k < 0:
        raise PreconditionError("k must be >= 0")
    if k == 0:
        return None
    return Fraction(1, 2 ** (k + 1) - 2)


def pairs_A(beta: MultiIndex) -> list[tuple]:
    """All ``(a1, a1')`` with ``a1 + a2 = beta = a1' + a2'`` and ``|a1| > |a1'|``."""
    subs = [a for a in itertools.product(*(range(b + 1) for b in beta))]
    subs.sort()
    return [(a, b) for a in subs for b in subs if sum(a) > sum(b)]


def transfer_constant(a1: MultiIndex, a1p: MultiIndex, p: int) -> Fraction:
    """``max(1, |a1'!|_p / |a1!|_p)``.

    For ``a1' = a1 - e_m`` this is ``|(a1)_m|_p**-1``, the constant obtained by
    expanding ``(a1)_m Phi_{a1} P`` through ``Phi_{a1'} d_{a2'} P``; chaining
    such steps multiplies the constants, which gives the factorial ratio.
    """
    ratio = norm(index_factorial(a1p), p) / norm(index_factorial(a1), p)
    return max(Fraction(1), ratio)


@dataclass
class GoodConstants:
    p: int
    d: int
    l: int
    k: int
    beta: MultiIndex
    a: int
    s_lower: Fraction
    S_upper: Fraction
    transfer: dict
    sup_beta: Fraction = Fraction(0)
    inf_beta: NormResult | None = None
    conclusion_holds: bool = True
    resolution: int = 0

    def eta(self, n: int) -> int:
        return eta_poly(n, self.a)

    @property
    def pairs(self) -> list[tuple]:
        return pairs_A(self.beta)

    @property
    def transfer_product(self) -> Fraction:
        out = Fraction(1)
        for c in self.transfer.values():
            out *= c
        return out

    def window(self) -> Fraction:
        """Upper end of the admissible ``eps`` range: ``min(s, s/S)``."""
        return min(self.s_lower, self.s_lower / self.S_upper)

    def to_json(self) -> dict:
        return {
            "p": self.p, "d": self.d, "l": self.l, "k": self.k, "beta": list(self.beta), "a": self.a,
            "eta_k_poly": self.eta(self.k),
            "s": rat_to_str(self.s_lower), "S": rat_to_str(self.S_upper),
            "transfer": [{"a1": list(a), "a1p": list(b), "C": rat_to_str(c)}
                         for (a, b), c in sorted(self.transfer.items())],
            "sup_beta": rat_to_str(self.sup_beta),
            "inf_beta": None if self.inf_beta is None else {
                "lower": rat_to_str(self.inf_beta.lower), "upper": rat_to_str(self.inf_beta.upper),
                "certified": self.inf_beta.certified},
            "conclusion_holds": self.conclusion_holds,
            "resolution": self.resolution,
        }


def maximal_beta_search(P: MultiPoly, l: int, p: int, max_res: int | None = None) -> GoodConstants:
    """Largest ``k`` (and lex-smallest ``beta``, ``|beta| = k``) with ``sup |Phi_beta P| > p**-eta(k)``.

    Requires ``||P||_{B(0,1)^d} = 1``.  The conclusion ``inf |Phi_beta P| >
    p**(-eta(k)-1)`` is then certified; ``S`` is ``p`` times the largest
    certified ``sup |Phi_alpha P|`` over ``|alpha| <= l`` so that the upper
    estimate is strict.
    """
    d = P.d
    ball = unit_ball(d, p)
    size = sup_norm_on_ball(P, ball, max_res).require()
    if size != 1:
        raise PreconditionError(f"polynomial must have unit sup norm on the unit ball, got {size}")
    a = digit_margin(l, p)
    table = QuotientTable(P)
    sups = {}
    res = 0
    for alpha in multi_indices_upto(d, l):
        r = sup_norm_on_ball(table(alpha), ball, max_res)
        sups[alpha] = r.require()
        res = max(res, r.resolution)
    beta = None
    for k in range(l, -1, -1):
        thr = p_power(-eta_poly(k, a), p)
        found = [b for b in multi_indices(d, k) if sups[b] > thr]
        if found:
            beta = found[0]
            break
    assert beta is not None, "unit-norm polynomial must have k >= 0"
    k = sum(beta)
    s = p_power(-eta_poly(k, a) - 1, p)
    inf_res = inf_norm_on_ball(table(beta), ball, max_res, above=s)
    if inf_res.upper <= s:
        holds = False
    elif inf_res.lower > s:
        holds = True
    else:
        raise CertificationError(f"cannot certify inf |Phi_{beta} P| > {s}")
    S = p * max(sups.values())
    transfer = {(a1, a1p): transfer_constant(a1, a1p, p) for a1, a1p in pairs_A(beta)}
    return GoodConstants(p, d, l, k, beta, a, s, S, transfer, sups[beta], inf_res, holds,
                         max(res, inf_res.resolution))


def _mixed_quotient(P: MultiPoly, a1: MultiIndex, beta: MultiIndex) -> MultiPoly:
    """``Phi_{a1} d_{beta - a1} P``."""
    a2 = tuple(b - x for b, x in zip(beta, a1))
    return diff_quotient_multi(partial_derivative(P, a2), a1)


def check_transfer_inequalities(f: MultiPoly, ball: Ball, consts: GoodConstants,
                                max_res: int | None = None, infs: dict | None = None) -> list[dict]:
    """``inf Phi_{a1} d_{a2} f <= C inf Phi_{a1'} d_{a2'} f`` over all pairs; returns violations."""
    infs = {} if infs is None else infs
    bad = []

    def inf_of(a1):
        if a1 not in infs:
            infs[a1] = inf_norm_on_ball(_mixed_quotient(f, a1, consts.beta), ball, max_res)
        return infs[a1]

    for (a1, a1p), C in sorted(consts.transfer.items()):
        lhs, rhs = inf_of(a1), inf_of(a1p)
        if lhs.upper <= C * rhs.lower:
            continue
        if lhs.lower > C * rhs.upper:
            bad.append({"a1": list(a1), "a1p": list(a1p), "C": rat_to_str(C),
                        "inf_a1": rat_to_str(lhs.value), "inf_a1p": rat_to_str(rhs.value)})
            continue
        raise CertificationError(f"cannot decide transfer inequality for {a1}, {a1p}")
    return bad


def check_theorem_poly(P: MultiPoly, consts: GoodConstants, max_res: int | None = None) -> dict:
    """The three estimates on the unit ball with the extracted constants.

    poly0: transfer inequalities over ``A_beta``; poly1: ``max_{|b|<=l} inf
    |Phi_b P| > s ||P||`` (witnessed by ``beta``); poly2: ``sup |Phi_a P| < S ||P||``
    for ``|a| <= l + 1`` (higher quotients vanish).
    """
    p = consts.p
    ball = unit_ball(P.d, p)
    size = sup_norm_on_ball(P, ball, max_res).require()
    infs: dict = {}
    poly0 = check_transfer_inequalities(P, ball, consts, max_res, infs)
    beta_inf = inf_norm_on_ball(diff_quotient_multi(P, consts.beta), ball, max_res,
                                above=consts.s_lower * size)
    poly1 = beta_inf.lower > consts.s_lower * size
    if not poly1 and beta_inf.upper > consts.s_lower * size:
        raise CertificationError("cannot decide the lower estimate")
    table = QuotientTable(P)
    poly2_bad = []
    for alpha in multi_indices_upto(P.d, consts.l + 1):
        sup = sup_norm_on_ball(table(alpha), ball, max_res).require()
        if not sup < consts.S_upper * size:
            poly2_bad.append({"alpha": list(alpha), "sup": rat_to_str(sup)})
    empirical = {}
    for (a1, a1p) in consts.transfer:
        lo, hi = infs.get(a1), infs.get(a1p)
        if lo is not None and hi is not None and hi.value > 0:
            empirical[(a1, a1p)] = lo.value / hi.value
    return {
        "poly0_violations": poly0,
        "poly1": poly1,
        "poly2_violations": poly2_bad,
        "passed": not poly0 and poly1 and not poly2_bad,
        "empirical_transfer": empirical,
    }


def check_hypotheses(f: MultiPoly, ball: Ball, consts: GoodConstants, max_res: int | None = None) -> dict:
    """The transfer, lower and upper hypotheses on a ball of radius ``r``.

    Lower: ``inf |Phi_beta f| > s r**-k ||f||``.  Upper, in the stronger form
    covering every ``|alpha| <= k + 1``: ``sup |Phi_alpha f| <= S r**-|alpha| ||f||``.
    """
    p = ball.p
    r_inv = p_power(ball.t, p)  # 1/r as a real number
    size = sup_norm_on_ball(f, ball, max_res).require()
    k = consts.k
    out = {"norm": size}
    out["transfer_violations"] = check_transfer_inequalities(f, ball, consts, max_res)
    thr = consts.s_lower * r_inv ** k * size
    out["lower"] = inf_exceeds(diff_quotient_multi(f, consts.beta), ball, thr, max_res)
    table = QuotientTable(f) if f.is_plain else None
    upper_bad = []
    for alpha in multi_indices_upto(f.d, k + 1):
        q = table(alpha) if table else diff_quotient_multi(f, alpha)
        sup = sup_norm_on_ball(q, ball, max_res).require()
        if sup > consts.S_upper * r_inv ** sum(alpha) * size:
            upper_bad.append(list(alpha))
    out["upper_violations"] = upper_bad
    out["holds"] = not out["transfer_violations"] and out["lower"] and not upper_bad
    return out


# ---------------------------------------------------------------------------
# individual lemmas


def check_lemn(f: MultiPoly, ball: Ball, beta: MultiIndex, max_res: int | None = None,
               grid_budget: int = 4096) -> dict:
    """``inf |Phi_beta f| <= r**-|beta| ||f||_B`` over the product ball.

    The inf is bounded above by values at evaluated points: the arithmetic
    progressions ``x_j, x_j + p**t, ..., x_j + i_j p**t`` from the centre and
    a small grid of other base points.  Each progression value also equals
    ``D_beta f(x) / (beta! p**(-t|beta|))`` exactly (iterated forward differences),
    which is checked as a secondary certificate.

    The inequality fails when ``p <= |beta|``: the progression values carry
    the factor ``1 / beta!``, whose norm exceeds 1 then (``x + 3x**2`` on
    ``Z_2`` with ``beta = (2,)`` is the smallest case).  The result therefore
    also reports the bound weakened by ``|beta!|_p**-1``, which always holds.
    """
    p, t = ball.p, ball.t
    beta = tuple(beta)
    if sum(beta) > max(f.degree(), 0) + 1:
        raise PreconditionError("need |beta| <= deg f + 1")
    size = sup_norm_on_ball(f, ball, max_res).require()
    bound = p_power(t * sum(beta), p) * size
    phi = diff_quotient_multi(f, beta)
    step = p_power(t, p)

    def progression(x):
        return [[x[j] + step * m for m in range(beta[j] + 1)] for j in range(f.d)]

    def forward_difference(x):
        total = Fraction(0)
        for shifts in itertools.product(*(range(b + 1) for b in beta)):
            sign = (-1) ** (sum(beta) - sum(shifts))
            coef = math.prod(math.comb(b, s) for b, s in zip(beta, shifts))
            total += sign * coef * f.evaluate([x[j] + step * shifts[j] for j in range(f.d)])
        return total

    per_axis = max(1, int(round(grid_budget ** (1 / max(f.d, 1)))))
    per_axis = min(per_axis, p ** 3)
    bases = [tuple(c + step * m for c, m in zip(ball.center, ms))
             for ms in itertools.product(range(per_axis), repeat=f.d)]
    grid_inf = None
    ap_ok = True
    centre_value = None
    for x in bases:
        val = phi.evaluate_blocks(progression(x))
        if val * step ** sum(beta) * index_factorial(beta) != forward_difference(x):
            ap_ok = False
        v = norm(val, p)
        if centre_value is None:
            centre_value = v
        grid_inf = v if grid_inf is None else min(grid_inf, v)
    # the progression argument only yields the bound up to the factor |beta!|_p**-1
    factorial_bound = bound / norm(index_factorial(beta), p)
    passed = grid_inf <= bound and ap_ok
    return {
        "beta": list(beta), "ball": ball_to_json(ball), "sup": rat_to_str(size),
        "bound": rat_to_str(bound), "grid_inf": rat_to_str(grid_inf),
        "factorial_bound": rat_to_str(factorial_bound), "factorial_passed": grid_inf <= factorial_bound,
        "progression_value": rat_to_str(centre_value), "progression_identity": ap_ok,
        "points": len(bases), "passed": passed,
    }


def check_local_estimate(f: MultiPoly, mu: MeasureModel, ball: Ball, c, eps,
                         max_res: int | None = None) -> dict:
    """``mu{x in B : |f| < eps} <= C (eps / (c r))**alpha mu(B)`` under its hypotheses.

    Hypotheses: ``max_j |d_j f(y)| >= c`` at the centre ``y`` and
    ``sup |Phi_beta f| <= eps / r**2`` on ``B^{beta(1)}`` for ``|beta| = 2``.
    Failing hypotheses give status ``not_applicable``.
    """
    if mu.decay is None:
        raise PreconditionError("measure needs verified decay parameters")
    C_mu, alpha = mu.decay
    p = ball.p
    c, eps = Fraction(c), Fraction(eps)
    r = ball.radius
    grad = max(norm(partial_derivative(f, unit_index(f.d, j)).evaluate(list(ball.center)), p)
               for j in range(f.d))
    out = {"ball": ball_to_json(ball), "c": rat_to_str(c), "eps": rat_to_str(eps),
           "gradient_norm": rat_to_str(grad)}
    if grad < c:
        out.update(status="not_applicable", reason="gradient below c")
        return out
    table = QuotientTable(f)
    for beta in multi_indices(f.d, 2):
        sup = sup_norm_on_ball(table(beta), ball, max_res).require()
        if sup > eps / r ** 2:
            out.update(status="not_applicable", reason=f"second quotient {list(beta)} too large",
                       sup=rat_to_str(sup))
            return out
    ev = event_measure(f, mu, ball, eps)
    total = mu.measure(ball)
    with mpmath.workdps(DPS):
        bound = _mp(C_mu) * (_mp(eps) / (_mp(c) * _mp(r))) ** _mp(alpha) * _mp(total)
        ok = leq(ev.upper, bound)
    out.update(status="pass" if ok else "violation", measured=_num(ev.upper), bound=float(bound),
               exact=ev.exact)
    return out


def derivative_transfer_check(f: MultiPoly, ball: Ball, consts: GoodConstants, j: int,
                              max_res: int | None = None) -> dict:
    """Inheritance of the hypotheses by ``d_j f`` and the two-sided estimate for ``||d_j f||``.

    Lower side accepted non-strictly (equality is logged).
    """
    beta = consts.beta
    if beta[j] <= 0:
        raise PreconditionError("need beta_j > 0")
    p = ball.p
    r_inv = p_power(ball.t, p)
    hyp = check_hypotheses(f, ball, consts, max_res)
    if not hyp["holds"]:
        return {"status": "not_applicable", "hypotheses": _jsonable(hyp)}
    size = hyp["norm"]
    g = partial_derivative(f, unit_index(f.d, j))
    gsize = sup_norm_on_ball(g, ball, max_res).require()
    lower_beta = tuple(b - (1 if i == j else 0) for i, b in enumerate(beta))
    C = consts.transfer.get((beta, lower_beta), Fraction(1))
    lo = consts.s_lower / C * r_inv * size
    hi = consts.S_upper * r_inv * size
    lower_ok = lo <= gsize
    equality = lo == gsize
    upper_ok = gsize < hi
    inherited = GoodConstants(p, consts.d, consts.l, consts.k - 1, lower_beta, consts.a,
                              consts.s_lower / (C * consts.S_upper), C * consts.S_upper / consts.s_lower,
                              {pair: consts.transfer[pair] for pair in pairs_A(lower_beta)})
    if consts.k - 1 >= 0 and gsize > 0:
        hyp2 = check_hypotheses(g, ball, inherited, max_res)
    else:
        hyp2 = {"holds": True}
    passed = lower_ok and upper_ok and hyp2["holds"]
    return {
        "status": "pass" if passed else "violation", "j": j, "norm": rat_to_str(size),
        "derivative_norm": rat_to_str(gsize), "lower_bound": rat_to_str(lo),
        "upper_bound": rat_to_str(hi), "lower_equality": equality,
        "inherited_hypotheses": hyp2["holds"],
    }


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, Fraction):
        return rat_to_str(obj)
    return obj


# ---------------------------------------------------------------------------
# the good-function estimate


def auto_eps_grid(consts: GoodConstants, count: int = 6) -> list[Fraction]:
    """The ``count`` largest powers of ``p`` strictly inside the admissible window."""
    top = largest_p_power_below(consts.window(), consts.p, strict=True)
    return [top / consts.p ** i for i in range(count)]


def default_eps_grid(p: int) -> list[Fraction]:
    return [p_power(-i, p) for i in range(1, 7)]


def good_bound(consts: GoodConstants, C_mu, alpha, eps) -> mpmath.mpf:
    """``C (prod C_pair)**(2**k alpha) (S/s)**(2**k alpha) eps**(eta_k alpha)`` (0 when ``k = 0``)."""
    with mpmath.workdps(DPS):
        if consts.k == 0:
            return mpmath.mpf(0)
        e = (2 ** consts.k) * _mp(alpha)
        eta = eta_good(consts.k)
        return (_mp(C_mu) * _mp(consts.transfer_product) ** e
                * (_mp(consts.S_upper) / _mp(consts.s_lower)) ** e
                * _mp(Fraction(eps)) ** (_mp(eta) * _mp(alpha)))


def loglog_slope(points: Sequence[tuple]) -> float | None:
    """Least-squares slope of ``log ratio`` against ``log eps`` over positive ratios."""
    pts = [(math.log(float(e)), math.log(float(r))) for e, r in points if r > 0]
    if len({x for x, _ in pts}) < 2:
        return None
    n = len(pts)
    mx = sum(x for x, _ in pts) / n
    my = sum(y for _, y in pts) / n
    sxx = sum((x - mx) ** 2 for x, _ in pts)
    sxy = sum((x - mx) * (y - my) for x, y in pts)
    return sxy / sxx


SLOPE_SLACK = 0.01


def check_good_theorem(f: MultiPoly, mu: MeasureModel, ball: Ball, consts: GoodConstants | None = None,
                       eps_grid: Sequence | str | None = None, l: int | None = None,
                       max_res: int | None = None) -> dict:
    """Event measure on the shrunken ball against the good-function bound.

    ``consts`` default to :func:`maximal_beta_search` on ``f`` normalised to
    the ball, after re-checking the unit-ball estimates.  ``eps_grid`` may be
    a list, ``"auto"`` (powers of ``p`` inside the window) or ``None`` (the
    default powers ``p**-1..p**-6`` intersected with the window).
    """
    if mu.decay is None:
        raise PreconditionError("measure needs verified decay parameters")
    C_mu, alpha = mu.decay
    p = ball.p
    l = max(f.degree(), 0) if l is None else l
    out: dict = {"ball": ball_to_json(ball), "poly": f.to_json()}
    if consts is None:
        phi = normalize_to_unit_ball(f, ball.center, ball.t, p, max_res)
        consts = maximal_beta_search(phi, l, p, max_res)
        hyp = check_theorem_poly(phi, consts, max_res)
        out["unit_ball_estimates"] = hyp["passed"]
        if not hyp["passed"] or not consts.conclusion_holds:
            out.update(status="not_applicable", constants=consts.to_json(),
                       reason="estimates fail on the unit ball")
            return out
    out["constants"] = consts.to_json()
    window = consts.window()
    if eps_grid == "auto":
        grid = auto_eps_grid(consts)
    elif eps_grid is None:
        grid = default_eps_grid(p)
    else:
        grid = [Fraction(e) for e in eps_grid]
    used = [e for e in grid if 0 < e < window]
    out["window"] = rat_to_str(window)
    out["skipped_eps"] = [rat_to_str(e) for e in grid if not 0 < e < window]
    eta = eta_good(consts.k)
    out["eta_k"] = None if eta is None else rat_to_str(eta)
    size = sup_norm_on_ball(f, ball, max_res).require()
    inner = Ball(ball.center, ball.t + 1, p)
    total = mu.measure(ball)
    rows, violations, pts = [], [], []
    for eps in used:
        ev = event_measure(f, mu, inner, eps * size)
        bound = good_bound(consts, C_mu, alpha, eps) * _mp(total)
        ok = leq(ev.upper, bound)
        ratio = ev.upper / total
        row = {"eps": rat_to_str(eps), "measured": _num(ev.upper), "bound": float(bound),
               "ratio": float(ratio), "exact": ev.exact, "passed": ok}
        if ok and ev.upper > 0:
            row["margin"] = float(bound / _mp(ev.upper))
        rows.append(row)
        pts.append((eps, float(ratio)))
        if not ok:
            violations.append(row)
    slope = loglog_slope(pts)
    target = None if eta is None else float(eta) * float(alpha) - SLOPE_SLACK
    slope_ok = slope is None or target is None or slope >= target
    out.update(rows=rows, violations=violations, slope=slope, slope_target=target, slope_ok=slope_ok,
               status="pass" if not violations and slope_ok else "violation")
    if not used:
        out["note"] = "no eps inside the admissible window"
    return out


# ---------------------------------------------------------------------------
# curves, normalisation and the end-to-end estimate


def nondegeneracy_rank(curve: Sequence[MultiPoly], x0: Sequence, l: int) -> int:
    """Rank of the vectors ``(d_beta f_1(x0), ..., d_beta f_n(x0))`` for ``1 <= |beta| <= l``."""
    d = curve[0].d
    rows = []
    for k in range(1, l + 1):
        for beta in multi_indices(d, k):
            rows.append([partial_derivative(f, beta).evaluate(list(x0)) for f in curve])
    return linalg.rank(rows)


def equicontinuity_modulus(curve: Sequence[MultiPoly], l: int, eps, V: Ball,
                           max_res: int | None = None) -> int:
    """Radius exponent ``t >= t_V`` making the top quotients ``eps``-equicontinuous.

    For ``g = c_0 + sum c_i f_i`` with ``|c_i| <= 1`` and ``|beta| = l``,
    ``|Phi_beta g(w) - Phi_beta g(w')| <= K |w - w'|`` where ``K`` is the
    largest certified sup over ``V`` of ``Phi_{beta'} f_i`` with
    ``|beta'| = l + 1``.  The returned ``t`` is the least with ``K p**-t < eps``.
    """
    eps = Fraction(eps)
    if eps <= 0:
        raise PreconditionError("eps must be positive")
    p = V.p
    K = Fraction(0)
    for f in curve:
        table = QuotientTable(f)
        for beta in multi_indices(f.d, l + 1):
            K = max(K, sup_norm_on_ball(table(beta), V, max_res).require())
    t = V.t
    if K == 0:
        return t
    while K * p_power(-t, p) >= eps:
        t += 1
    return t


def check_taylor_bound(g: MultiPoly, ball: Ball, l: int, max_res: int | None = None) -> dict:
    """``sup |Phi_eta g - Phi_eta P_{g,y,l}| <= r**(l-|eta|) M`` for ``|eta| <= l``.

    ``M`` is the largest oscillation of ``Phi_beta g`` (``|beta| = l``) over
    the product ball.  Returns the per-``eta`` sides and the verdict.
    """
    y = list(ball.center)
    p = ball.p
    P = taylor_poly(g, y, l)
    gt, pt = QuotientTable(g), QuotientTable(P)
    M = Fraction(0)
    for beta in multi_indices(g.d, l):
        M = max(M, oscillation_on_ball(gt(beta), ball, max_res).require())
    rows, ok = [], True
    for eta in multi_indices_upto(g.d, l):
        lhs = sup_norm_on_ball(gt(eta) - pt(eta), ball, max_res).require()
        rhs = ball.radius ** (l - sum(eta)) * M
        good = lhs <= rhs
        ok = ok and good
        rows.append({"eta": list(eta), "lhs": rat_to_str(lhs), "rhs": rat_to_str(rhs), "passed": good})
    return {"M": rat_to_str(M), "rows": rows, "passed": ok}


def sample_unit_coefficients(rng: random.Random, n: int, p: int, digits: int = 3) -> list[Fraction]:
    """``n + 1`` p-integral coefficients with ``max |c_i|_p = 1``."""
    coeffs = [Fraction(rng.randrange(-p ** digits, p ** digits + 1)) for _ in range(n + 1)]
    u = rng.randrange(n + 1)
    while coeffs[u] % p == 0:
        coeffs[u] = Fraction(rng.randrange(-p ** digits, p ** digits + 1))
    return coeffs


def mainp_balls(V: Ball, rng: random.Random, depth: int = 2) -> list[Ball]:
    """``V`` plus one random sub-ball at each relative depth ``1..depth``."""
    balls = [V]
    cur = V
    for _ in range(depth):
        cur = cur.child([rng.randrange(V.p) for _ in range(V.d)])
        balls.append(cur)
    return balls


def check_mainp(curve: Sequence[MultiPoly], mu: MeasureModel, V: Ball, l: int, n_samples: int,
                seed: int, eps_grid: Sequence | str | None = "auto", good_eps: Sequence | None = None,
                sub_depth: int = 2, max_res: int | None = None) -> dict:
    """End-to-end goodness of sampled ``g = c_0 + sum c_i f_i`` with ``max |c_i| = 1``.

    For each ``g`` and each tested ball ``B`` of the family: the Taylor
    normalisation ``||P_{g,y,l}||_B == ||g||_B`` (both certified), the lower
    estimate ``||g||_B / r**l`` (its minimum is reported), the good-function
    bound through :func:`check_good_theorem` on ``g`` normalised to ``B``, and
    the empirical exponent ``min log(ratio) / log(eps)`` of the direct event
    ratios for ``eps`` in ``good_eps``.
    """
    if mu.decay is None:
        raise PreconditionError("measure needs verified decay parameters")
    C_mu, alpha = mu.decay
    p = V.p
    n = len(curve)
    rank = nondegeneracy_rank(curve, V.center, l)
    target = Fraction(alpha) / (2 ** (l + 1) - 2) if isinstance(alpha, (int, Fraction)) \
        else float(alpha) / (2 ** (l + 1) - 2)
    report = {"rank": rank, "n": n, "target_exponent": _num(target), "cases": [], "violations": []}
    if rank < n:
        report["status"] = "not_applicable"
        report["reason"] = "curve is degenerate at the centre"
        return report
    rng = random.Random(seed)
    good_eps = [Fraction(e) for e in (good_eps or default_eps_grid(p))]
    eta_low = None
    min_exponent = math.inf
    normalisation_ok = True
    for idx in range(n_samples):
        coeffs = sample_unit_coefficients(rng, n, p)
        g = coefficient_combination(curve, coeffs)
        for B in mainp_balls(V, rng, sub_depth):
            case = {"id": f"{idx}:{B.t}", "coeffs": [rat_to_str(c) for c in coeffs], "ball": ball_to_json(B)}
            y = list(B.center)
            gsize = sup_norm_on_ball(g, B, max_res).require()
            psize = sup_norm_on_ball(taylor_poly(g, y, l), B, max_res).require()
            case["norm_identity"] = psize == gsize
            normalisation_ok = normalisation_ok and psize == gsize
            low = gsize / B.radius ** l
            eta_low = low if eta_low is None else min(eta_low, low)
            good = check_good_theorem(g, mu, B, None, eps_grid, l, max_res)
            case["good_status"] = good["status"]
            case["k"] = good.get("constants", {}).get("k")
            total = mu.measure(B)
            exps = []
            for eps in good_eps:
                ev = event_measure(g, mu, B, eps * gsize)
                ratio = ev.upper / total
                if ratio > 0:
                    exps.append(math.log(float(ratio)) / math.log(float(eps)))
            exp_case = min(exps) if exps else math.inf
            case["empirical_exponent"] = exp_case if exps else None
            min_exponent = min(min_exponent, exp_case)
            ok = case["norm_identity"] and good["status"] == "pass" and exp_case >= float(target) - 1e-12
            if not ok:
                case["good"] = good
                report["violations"].append(case)
            report["cases"].append(case)
    report.update(
        eta_low=None if eta_low is None else rat_to_str(eta_low),
        normalisation_identity=normalisation_ok,
        min_empirical_exponent=None if min_exponent == math.inf else min_exponent,
        status="pass" if not report["violations"] else "violation",
    )
    return report
