"""Haar and self-similar measures on Q_p^d, event measures, decay and Federer estimates.

Similitudes are restricted to ``x -> p**k A x + b`` with ``A`` an isometry of
``Z_p^d`` (p-integral entries, unit determinant), so the image of a ball is a
ball and every separation question is decided exactly.

The self-similar measure is the probability measure with cylinder weights
``rho_i**s``.  Under strong separation it is a constant multiple of the
s-dimensional Hausdorff measure on the attractor; all ratios computed here are
unaffected by that constant.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Sequence, Union

import mpmath

from . import linalg
from .padic import (
    Ball,
    PreconditionError,
    ball_from_json,
    ball_to_json,
    distance,
    largest_p_power_below,
    norm,
    p_power,
    point,
    rat_from,
    rat_to_str,
    shrink_real_radius,
    valuation,
)
from .norms import (
    CertificationError,
    cell_stats,
    reduced_function,
    residue_values,
    sup_norm_on_ball,
    to_unit_cell,
)
from .poly import MultiPoly

Mass = Union[Fraction, mpmath.mpf]
WORK_DPS = 50
WEIGHT_ERROR = 1e-40


class SeparationError(PreconditionError):
    """Cylinder balls of the attractor overlap, so cylinder sums are not exact."""

    def __init__(self, message: str, witness: dict):
        super().__init__(message)
        self.witness = witness


# ---------------------------------------------------------------------------
# similitudes and IFS models


@dataclass(frozen=True)
class Similitude:
    """``h(x) = p**k A x + b`` with contraction ratio ``p**-k``."""

    p: int
    k: int
    A: tuple
    b: tuple

    def __post_init__(self):
        A = tuple(tuple(Fraction(v) for v in row) for row in self.A)
        b = point(self.b)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "b", b)
        d = len(b)
        if len(A) != d or any(len(row) != d for row in A):
            raise PreconditionError("linear part must be a square matrix matching the translation")
        if self.k < 0:
            raise PreconditionError("contraction exponent must be >= 0")
        if any(valuation(v, self.p) < 0 for row in A for v in row):
            raise PreconditionError("linear part must be p-integral")
        if valuation(linalg.det(A), self.p) != 0:
            raise PreconditionError("linear part must have unit determinant")

    @classmethod
    def scalar(cls, p: int, k: int, b: Sequence) -> "Similitude":
        d = len(b)
        eye = tuple(tuple(1 if i == j else 0 for j in range(d)) for i in range(d))
        return cls(p, k, eye, tuple(b))

    @property
    def d(self) -> int:
        return len(self.b)

    @property
    def ratio(self) -> Fraction:
        return p_power(-self.k, self.p)

    def __call__(self, x: Sequence) -> tuple:
        s = p_power(self.k, self.p)
        return tuple(
            s * sum((a * Fraction(v) for a, v in zip(row, x)), Fraction(0)) + bi
            for row, bi in zip(self.A, self.b)
        )

    def image_ball(self, ball: Ball) -> Ball:
        return Ball(self(ball.center), ball.t + self.k, self.p)

    def preimage_ball(self, ball: Ball) -> Ball:
        """``h^{-1}(ball)`` as a ball of ``Q_p^d``."""
        shifted = [c - bi for c, bi in zip(ball.center, self.b)]
        x = linalg.solve(self.A, shifted)
        s = p_power(-self.k, self.p)
        return Ball(tuple(v * s for v in x), ball.t - self.k, self.p)

    def compose(self, inner: "Similitude") -> "Similitude":
        """``self o inner``."""
        d = self.d
        AA = tuple(
            tuple(sum((self.A[i][m] * inner.A[m][j] for m in range(d)), Fraction(0)) for j in range(d))
            for i in range(d)
        )
        s = p_power(self.k, self.p)
        bb = tuple(
            s * sum((self.A[i][m] * inner.b[m] for m in range(d)), Fraction(0)) + self.b[i]
            for i in range(d)
        )
        return Similitude(self.p, self.k + inner.k, AA, bb)

    def fixed_point(self) -> tuple:
        d = self.d
        s = p_power(self.k, self.p)
        rows = [[(1 if i == j else 0) - s * self.A[i][j] for j in range(d)] for i in range(d)]
        return tuple(linalg.solve(rows, list(self.b)))

    def to_json(self) -> dict:
        return {
            "k": self.k,
            "A": [[rat_to_str(v) for v in row] for row in self.A],
            "b": [rat_to_str(v) for v in self.b],
        }

    @classmethod
    def from_json(cls, obj: dict, p: int, d: int) -> "Similitude":
        b = [rat_from(v) for v in obj["b"]]
        if len(b) != d:
            raise PreconditionError("translation has the wrong dimension")
        if "A" in obj:
            A = [[rat_from(v) for v in row] for row in obj["A"]]
        else:
            A = [[1 if i == j else 0 for j in range(d)] for i in range(d)]
        return cls(p, int(obj["k"]), tuple(map(tuple, A)), tuple(b))


@dataclass(frozen=True)
class OSCResult:
    passed: bool
    witness: dict | None = None

    def to_json(self) -> dict:
        return {"passed": self.passed, "witness": self.witness}


def _covered(ball: Ball, balls: Sequence[Ball]) -> bool:
    """Is ``ball`` contained in the union of ``balls``?"""
    if any(b.contains_ball(ball) for b in balls):
        return True
    inner = [b for b in balls if ball.contains_ball(b)]
    if not inner:
        return False
    return all(_covered(child, inner) for child in ball.children())


@dataclass(frozen=True)
class IFSModel:
    """A finite family of contracting similitudes with a ball-union open set."""

    p: int
    d: int
    maps: tuple
    open_set: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "maps", tuple(self.maps))
        object.__setattr__(self, "open_set", tuple(self.open_set))
        if not self.maps:
            raise PreconditionError("an IFS needs at least one map")
        for h in self.maps:
            if h.p != self.p or h.d != self.d:
                raise PreconditionError("maps must share the prime and dimension")

    # -- construction ------------------------------------------------------

    @classmethod
    def digits(cls, p: int, digits: Sequence[int], k: int = 1) -> "IFSModel":
        """Maps ``x -> p**k x + a`` for ``a`` in ``digits`` on ``Z_p``, open set ``Z_p``."""
        maps = [Similitude.scalar(p, k, (a,)) for a in digits]
        return cls(p, 1, tuple(maps), (Ball((0,), 0, p),))

    @classmethod
    def full_partition(cls, p: int, d: int = 1) -> "IFSModel":
        import itertools

        maps = [Similitude.scalar(p, 1, digs) for digs in itertools.product(range(p), repeat=d)]
        return cls(p, d, tuple(maps), (Ball((0,) * d, 0, p),))

    @classmethod
    def cantor(cls, p: int = 3) -> "IFSModel":
        return cls.digits(p, [0, 1])

    def to_json(self) -> dict:
        return {
            "p": self.p,
            "d": self.d,
            "maps": [h.to_json() for h in self.maps],
            "open_set": [ball_to_json(b) for b in self.open_set],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "IFSModel":
        try:
            p, d = int(obj["p"]), int(obj["d"])
            maps = [Similitude.from_json(m, p, d) for m in obj["maps"]]
            open_set = [ball_from_json(b, p) for b in obj.get("open_set", [])]
        except (KeyError, TypeError) as exc:
            raise PreconditionError(f"malformed IFS description: {exc}") from exc
        return cls(p, d, tuple(maps), tuple(open_set))

    # -- derived data ------------------------------------------------------

    @cached_property
    def sim_dim(self) -> mpmath.mpf:
        return similarity_dimension(self)

    @cached_property
    def _weights(self):
        return _compute_weights(self)

    @property
    def weights(self) -> list:
        return self._weights[0]

    @property
    def weights_exact(self) -> bool:
        return self._weights[1]

    @property
    def weight_error(self) -> float:
        return 0.0 if self.weights_exact else WEIGHT_ERROR

    @cached_property
    def anchor(self) -> tuple:
        """Fixed point of the first map; it lies on the attractor."""
        return self.maps[0].fixed_point()

    @cached_property
    def hull(self) -> Ball | None:
        """Smallest ball around the anchor mapped into itself by every map.

        ``None`` when every map fixes the anchor (the attractor is a point).
        """
        x = self.anchor
        radius = max(distance(h(x), x, self.p) for h in self.maps)
        if radius == 0:
            return None
        return Ball(x, -valuation(radius, self.p), self.p)

    @cached_property
    def separation_witness(self) -> dict | None:
        hull = self.hull
        if hull is None:
            return None if len(self.maps) == 1 else {"maps": [0, 1], "reason": "common fixed point"}
        images = [h.image_ball(hull) for h in self.maps]
        for i in range(len(images)):
            for j in range(i + 1, len(images)):
                if images[i].intersects(images[j]):
                    return {"maps": [i, j], "reason": "cylinder balls overlap"}
        return None


def ifs_check_osc(model: IFSModel) -> OSCResult:
    """Exact open set condition check for a ball-union witness ``U``."""
    U = list(model.open_set)
    if not U:
        if model.hull is None:
            return OSCResult(False, {"reason": "no open set and degenerate hull"})
        U = [model.hull]
    for i, h in enumerate(model.maps):
        for b in U:
            if not _covered(h.image_ball(b), U):
                return OSCResult(False, {"map": i, "reason": "image not inside the open set",
                                         "ball": ball_to_json(h.image_ball(b))})
    for i in range(len(model.maps)):
        for j in range(i + 1, len(model.maps)):
            for a in U:
                for b in U:
                    A, B = model.maps[i].image_ball(a), model.maps[j].image_ball(b)
                    if A.intersects(B):
                        return OSCResult(False, {"maps": [i, j], "reason": "images overlap",
                                                 "balls": [ball_to_json(A), ball_to_json(B)]})
    return OSCResult(True)


def similarity_dimension(model: IFSModel) -> mpmath.mpf:
    """Root ``s`` of ``sum_i p**(-k_i s) = 1``."""
    ks = [h.k for h in model.maps]
    if not ks:
        raise PreconditionError("empty map list")
    if any(k < 1 for k in ks):
        raise PreconditionError("every map must contract (k >= 1)")
    p = model.p
    with mpmath.workdps(WORK_DPS):
        if len(set(ks)) == 1:
            s = mpmath.log(len(ks)) / (ks[0] * mpmath.log(p))
        else:
            x = _weight_base(ks)
            s = -mpmath.log(x) / mpmath.log(p)
        return +s


def _weight_base(ks: Sequence[int]) -> mpmath.mpf:
    """``x in (0, 1]`` with ``sum x**k_i = 1`` (strictly decreasing, so bisection is safe)."""
    fn = lambda x: mpmath.fsum(x ** k for k in ks) - 1
    lo, hi = mpmath.mpf(0), mpmath.mpf(1)
    for _ in range(4 * WORK_DPS):
        mid = (lo + hi) / 2
        if fn(mid) > 0:
            hi = mid
        else:
            lo = mid
    return (lo + hi) / 2


def _compute_weights(model: IFSModel):
    ks = [h.k for h in model.maps]
    m = len(ks)
    if len(set(ks)) == 1:
        return [Fraction(1, m)] * m, True
    with mpmath.workdps(WORK_DPS):
        x = _weight_base(ks)
        guess = Fraction(str(mpmath.nstr(x, 40))).limit_denominator(10 ** 9)
        if sum(guess ** k for k in ks) == 1:
            return [guess ** k for k in ks], True
        return [x ** k for k in ks], False


# ---------------------------------------------------------------------------
# measures of balls


def haar_measure(region: Ball, ball: Ball) -> Fraction:
    """Normalised Haar measure of a ball inside ``region``."""
    if not region.contains_ball(ball):
        raise PreconditionError("ball is not inside the region")
    return p_power(-region.d * (ball.t - region.t), region.p)


def ifs_measure_of_ball(model: IFSModel, ball: Ball) -> Mass:
    """Self-similar probability measure of a ball, by cylinder recursion."""
    if ball.p != model.p or ball.d != model.d:
        raise PreconditionError("ball and model disagree on prime or dimension")
    hull = model.hull
    if hull is None:
        return Fraction(1 if ball.contains_point(model.anchor) else 0)
    witness = model.separation_witness
    if witness is not None:
        raise SeparationError("cylinder separation fails", witness)
    weights = model.weights
    zero = weights[0] * 0

    def rec(h: Similitude | None, cyl: Ball, w):
        if ball.contains_ball(cyl):
            return w
        if not ball.intersects(cyl):
            return zero
        total = zero
        for hi, wi in zip(model.maps, weights):
            g = hi if h is None else h.compose(hi)
            total = total + rec(g, g.image_ball(hull), w * wi)
        return total

    with mpmath.workdps(WORK_DPS):
        return rec(None, hull, weights[0] * 0 + 1)


def ifs_sample(model: IFSModel, rng: random.Random, depth: int) -> tuple:
    """``h_{w_1} o ... o h_{w_depth}(anchor)`` with letters drawn by weight."""
    if depth < 1:
        raise PreconditionError("depth must be >= 1")
    probs = [float(w) for w in model.weights]
    word = rng.choices(range(len(model.maps)), weights=probs, k=depth)
    x = model.anchor
    for letter in reversed(word):
        x = model.maps[letter](x)
    return x


@dataclass(frozen=True)
class MeasureModel:
    """Either normalised Haar measure on a region ball or a self-similar measure."""

    kind: str
    p: int
    d: int
    region: Ball | None = None
    ifs: IFSModel | None = None
    decay: tuple | None = None  # (C, alpha) once verified
    federer_D: float | None = None

    @classmethod
    def haar(cls, region: Ball) -> "MeasureModel":
        return cls("haar", region.p, region.d, region=region)

    @classmethod
    def self_similar(cls, model: IFSModel) -> "MeasureModel":
        return cls("ifs", model.p, model.d, ifs=model)

    def with_decay(self, C, alpha) -> "MeasureModel":
        return MeasureModel(self.kind, self.p, self.d, self.region, self.ifs, (C, alpha), self.federer_D)

    @property
    def is_exact(self) -> bool:
        return self.kind == "haar" or self.ifs.weights_exact

    @property
    def support_ball(self) -> Ball:
        if self.kind == "haar":
            return self.region
        if self.ifs.hull is None:
            return Ball(self.ifs.anchor, 0, self.p)
        return self.ifs.hull

    def measure(self, ball: Ball) -> Mass:
        if self.kind == "haar":
            if self.region.contains_ball(ball):
                return haar_measure(self.region, ball)
            return Fraction(1 if ball.contains_ball(self.region) else 0)
        return ifs_measure_of_ball(self.ifs, ball)

    def sample(self, rng: random.Random, depth: int = 12) -> tuple:
        """A point of the support (a grid point for Haar, a deep cylinder point otherwise)."""
        if self.kind == "haar":
            step = p_power(self.region.t, self.p)
            return tuple(c + step * rng.randrange(self.p ** depth) for c in self.region.center)
        return ifs_sample(self.ifs, rng, depth)

    def describe(self) -> dict:
        if self.kind == "haar":
            return {"kind": "haar", "region": ball_to_json(self.region)}
        return {"kind": "self_similar", "ifs": self.ifs.to_json(), "sim_dim": float(self.ifs.sim_dim)}


def to_float(x: Mass) -> float:
    return float(x)


# ---------------------------------------------------------------------------
# event measures


@dataclass(frozen=True)
class EventMeasure:
    """``mu{x in B : |f(x)| < T}`` bracketed by ``lower <= value <= upper``."""

    lower: Mass
    upper: Mass
    cells: int
    depth: int

    @property
    def exact(self) -> bool:
        return self.lower == self.upper

    @property
    def value(self) -> Mass:
        return self.lower if self.exact else (self.lower + self.upper) / 2


MAX_EVENT_CELLS = 400_000


def _linear_split(g: MultiPoly, p: int):
    """(max norm of degree-1 coefficients, Gauss norm of the degree >= 2 part)."""
    A = Fraction(0)
    H = Fraction(0)
    for exp, c in g.terms.items():
        deg = sum(exp)
        if deg == 1:
            A = max(A, norm(c, p))
        elif deg >= 2:
            H = max(H, norm(c, p))
    return A, H


def event_measure(f: MultiPoly, mu: MeasureModel, ball: Ball, threshold, max_depth: int = 60,
                  rel_tol: float = 0.0) -> EventMeasure:
    """Measure of ``{x in ball : |f(x)|_p < threshold}``.

    Cells are classified exactly: a cell is wholly inside when the Gauss norm
    of the recentred polynomial is at most ``T'`` (the largest power of ``p``
    strictly below the threshold), wholly outside at residues where the
    reduced polynomial does not vanish, and, for Haar measure, measured in
    closed form when the linear part dominates (the map is then a
    measure-preserving isometry onto ``Z_p`` in one direction).  Remaining
    cells are refined.  Refinement stops early once the unresolved mass is
    at most ``rel_tol`` times the resolved mass; ``rel_tol=0`` insists on the
    exact value (up to ``max_depth`` and a cell budget).
    """
    p = ball.p
    if not f.is_plain or f.d != ball.d:
        raise PreconditionError("event measures are taken of plain polynomials on matching balls")
    threshold = Fraction(threshold)
    zero_mass = mu.measure(ball) * 0
    if threshold <= 0:
        return EventMeasure(zero_mass, zero_mass, 0, 0)
    tp = largest_p_power_below(threshold, p, strict=True)
    haar = mu.kind == "haar"
    inside = zero_mass
    unresolved = zero_mass
    work = [(ball, to_unit_cell(f, ball))]
    cells = 0
    depth = 0
    with mpmath.workdps(WORK_DPS):
        while work:
            nxt = []
            for cell, g in work:
                m = mu.measure(cell)
                if m == 0:
                    continue
                cells += 1
                if g.is_zero():
                    inside += m
                    continue
                v0, osc = cell_stats(g, p)
                G = max(v0, osc)
                if G <= tp:
                    inside += m
                    continue
                if osc < v0:
                    continue  # constant norm v0 > T'
                if haar:
                    A, H = _linear_split(g, p)
                    if A > H and v0 <= A:
                        inside += m * (tp / A)
                        continue
                if depth >= max_depth or cells > MAX_EVENT_CELLS:
                    unresolved += m
                    continue
                red = reduced_function(g, p)
                for digits, val in residue_values(red, g.nvars, p):
                    if val == 0:
                        nxt.append((cell.child(digits), g.shift_scale(digits, p)))
            work = nxt
            depth += 1
            if work and rel_tol > 0 and inside > 0:
                pending = sum((mu.measure(c) for c, _ in work), zero_mass)
                if pending <= rel_tol * inside:
                    unresolved += pending
                    break
    return EventMeasure(inside, inside + unresolved, cells, depth)


def event_ratio(f: MultiPoly, mu: MeasureModel, ball: Ball, threshold, **kw) -> tuple:
    """``(lower, upper)`` of ``mu{|f| < threshold} / mu(ball)``; requires ``mu(ball) > 0``."""
    total = mu.measure(ball)
    if total == 0:
        raise PreconditionError("ball has zero measure")
    ev = event_measure(f, mu, ball, threshold, **kw)
    return ev.lower / total, ev.upper / total, ev


# ---------------------------------------------------------------------------
# decay and Federer estimates


@dataclass
class DecayEstimate:
    C: float
    alpha: float
    rows: list = field(default_factory=list)
    sweep: list = field(default_factory=list)
    violations: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {"C": self.C, "alpha": self.alpha, "sweep": self.sweep,
                "cases": self.rows, "violations": self.violations}


def decay_rows(mu: MeasureModel, cases: Sequence[tuple], eps_grid: Sequence) -> list[dict]:
    """Exact event ratios for every (ball, affine form, eps) triple.

    ``x = eps / ||f||_B`` uses the sup over the whole ball (the absolute notion).
    """
    rows = []
    for idx, (ball, f) in enumerate(cases):
        size = sup_norm_on_ball(f, ball).require()
        if size == 0:
            raise PreconditionError("affine form vanishes identically on the ball")
        for eps in eps_grid:
            eps = Fraction(eps)
            lo, hi, ev = event_ratio(f, mu, ball, eps)
            rows.append({
                "case": idx, "ball": ball_to_json(ball), "form": f.to_json(),
                "eps": rat_to_str(eps), "x": rat_to_str(eps / size),
                "ratio": float(hi), "ratio_lower": float(lo), "exact": ev.exact,
            })
            if isinstance(hi, Fraction) and ev.exact:
                rows[-1]["ratio_exact"] = rat_to_str(hi)
    return rows


def fit_alpha(rows: Sequence[dict], C: float) -> float:
    """Largest ``alpha`` with ``ratio <= C x**alpha`` on every row with ``x < 1``."""
    best = math.inf
    for r in rows:
        x = float(Fraction(r["x"]))
        if x >= 1 or r["ratio"] == 0:
            continue
        if r["ratio"] > C:
            return 0.0
        best = min(best, math.log(r["ratio"] / C) / math.log(x))
    return best


def estimate_decay(mu: MeasureModel, cases: Sequence[tuple], eps_grid: Sequence, C: float = 1.0,
                   alpha_grid: Sequence[float] | None = None) -> DecayEstimate:
    """Fit ``(C, alpha)`` so that every case satisfies ``ratio <= C (eps/||f||)**alpha``.

    ``alpha`` is the best exponent for the given ``C``; the sweep lists, for
    each candidate exponent, the smallest constant that covers every case.
    """
    rows = decay_rows(mu, cases, eps_grid)
    alpha = fit_alpha(rows, C)
    alpha_grid = alpha_grid or [0.25, 0.5, 0.75, 1.0]
    sweep = []
    for a in alpha_grid:
        need = 0.0
        for r in rows:
            x = float(Fraction(r["x"]))
            need = max(need, r["ratio"] / x ** a)
        sweep.append({"alpha": a, "C": need})
    violations = [r for r in rows if r["ratio"] > C * float(Fraction(r["x"])) ** alpha * (1 + 1e-12)]
    return DecayEstimate(C, alpha, rows, sweep, violations)


def verify_decay(mu: MeasureModel, cases: Sequence[tuple], eps_grid: Sequence, C, alpha) -> list[dict]:
    """Rows violating ``ratio <= C x**alpha``; exact for rational ratios, integer ``alpha`` and rational ``C``."""
    exact_params = isinstance(C, (int, Fraction)) and isinstance(alpha, (int, Fraction)) \
        and Fraction(alpha).denominator == 1
    bad = []
    for r in decay_rows(mu, cases, eps_grid):
        x = Fraction(r["x"])
        if exact_params and "ratio_exact" in r:
            ok = Fraction(r["ratio_exact"]) <= Fraction(C) * x ** int(alpha)
        else:
            ok = r["ratio"] <= float(C) * float(x) ** float(alpha) * (1 + 1e-12)
        if not ok:
            bad.append(r)
    return bad


@dataclass
class FedererEstimate:
    D: float
    cases: list = field(default_factory=list)
    excluded: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {"D": self.D, "cases": self.cases, "excluded": self.excluded}


def estimate_federer(mu: MeasureModel, centers: Sequence, t_range: Sequence[int]) -> FedererEstimate:
    """``max mu(B(x, 3r)) / mu(B(x, r))`` over centres and radius exponents.

    ``3r`` is resolved to the clopen ball it describes.  Balls of zero measure
    and, for Haar measure, enlarged balls leaving the region are excluded and
    listed.
    """
    D = 0.0
    rows, excluded = [], []
    for x in centers:
        for t in t_range:
            B = Ball(tuple(x), t, mu.p)
            B3 = shrink_real_radius(B, 3)
            if mu.kind == "haar" and not mu.region.contains_ball(B3):
                excluded.append({"center": [rat_to_str(c) for c in B.center], "t": t,
                                 "reason": "enlarged ball leaves the region"})
                continue
            small = mu.measure(B)
            if small == 0:
                excluded.append({"center": [rat_to_str(c) for c in B.center], "t": t,
                                 "reason": "zero measure"})
                continue
            ratio = mu.measure(B3) / small
            rows.append({"center": [rat_to_str(c) for c in B.center], "t": t, "t_enlarged": B3.t,
                         "ratio": rat_to_str(ratio) if isinstance(ratio, Fraction) else float(ratio)})
            D = max(D, float(ratio))
    return FedererEstimate(D, rows, excluded)
