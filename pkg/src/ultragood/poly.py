"""Exact multivariate polynomials over Q with per-coordinate variable copies.

A :class:`MultiPoly` lives in a ring whose variables are grouped by
coordinate: coordinate ``j`` carries ``copies[j]`` variables
``x_{j,1}, ..., x_{j,copies[j]}``.  A plain function of ``d`` variables has
``copies == (1,) * d``; the difference quotient ``Phi_beta f`` lives in the
ring with ``copies == beta(1)``.  Exponent vectors are flattened
coordinate-major, so variable ``(j, c)`` sits at position
``sum(copies[:j]) + c``.

Difference quotients are computed symbolically.  ``Phi_j`` always splits the
*last* copy of coordinate ``j`` into two (new copy appended), using
``(u**n - v**n) / (u - v) = sum_{a+b=n-1} u**a v**b``; since divided
differences are symmetric in their arguments this agrees with any other
splitting convention.
"""

from __future__ import annotations

import itertools
import math
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping, Sequence

from .padic import (
    MultiIndex,
    PreconditionError,
    Rational,
    index_factorial,
    multi_indices,
    multi_indices_upto,
    norm,
    plus_one,
    rat_from,
    rat_to_str,
    unit_index,
)


class MultiPoly:
    """Immutable sparse polynomial with exact rational coefficients."""

    __slots__ = ("copies", "terms", "_offsets", "_hash")

    def __init__(self, copies: Sequence[int], terms: Mapping[tuple, Rational] | None = None):
        self.copies = tuple(int(c) for c in copies)
        if any(c < 1 for c in self.copies):
            raise ValueError("every coordinate needs at least one copy")
        n = sum(self.copies)
        clean = {}
        for exp, coeff in (terms or {}).items():
            exp = tuple(exp)
            if len(exp) != n:
                raise ValueError(f"exponent {exp} has wrong length for copies {self.copies}")
            if coeff:
                clean[exp] = Fraction(coeff)
        self.terms = clean
        self._offsets = None
        self._hash = None

    # -- construction ------------------------------------------------------

    @classmethod
    def zero(cls, copies: Sequence[int]) -> "MultiPoly":
        return cls(copies)

    @classmethod
    def const(cls, copies: Sequence[int], c: Rational) -> "MultiPoly":
        return cls(copies, {(0,) * sum(copies): c})

    @classmethod
    def var(cls, copies: Sequence[int], j: int, c: int = 0) -> "MultiPoly":
        """The variable ``x_{j, c}`` (both indices zero-based)."""
        n = sum(copies)
        exp = [0] * n
        exp[sum(copies[:j]) + c] = 1
        return cls(copies, {tuple(exp): 1})

    @classmethod
    def plain(cls, d: int, terms: Mapping[tuple, Rational]) -> "MultiPoly":
        return cls((1,) * d, terms)

    @classmethod
    def from_univariate(cls, coeffs: Sequence[Rational]) -> "MultiPoly":
        """``coeffs[i]`` is the coefficient of ``x**i``."""
        return cls((1,), {(i,): c for i, c in enumerate(coeffs)})

    # -- basic structure ---------------------------------------------------

    @property
    def d(self) -> int:
        return len(self.copies)

    @property
    def nvars(self) -> int:
        return sum(self.copies)

    @property
    def is_plain(self) -> bool:
        return all(c == 1 for c in self.copies)

    def offsets(self) -> tuple:
        if self._offsets is None:
            acc, out = 0, []
            for c in self.copies:
                out.append(acc)
                acc += c
            self._offsets = tuple(out)
        return self._offsets

    def coordinate_of_var(self) -> list[int]:
        return [j for j, c in enumerate(self.copies) for _ in range(c)]

    def is_zero(self) -> bool:
        return not self.terms

    def degree(self) -> int:
        return max((sum(e) for e in self.terms), default=-1)

    def constant_term(self) -> Fraction:
        return self.terms.get((0,) * self.nvars, Fraction(0))

    def sorted_terms(self) -> list:
        return sorted(self.terms.items())

    def __eq__(self, other) -> bool:
        if not isinstance(other, MultiPoly):
            return NotImplemented
        return self.copies == other.copies and self.terms == other.terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.copies, frozenset(self.terms.items())))
        return self._hash

    def __repr__(self) -> str:
        if not self.terms:
            return f"MultiPoly({self.copies}, 0)"
        names = _var_names(self.copies)
        parts = []
        for exp, c in self.sorted_terms():
            mono = "*".join(n if e == 1 else f"{n}^{e}" for n, e in zip(names, exp) if e)
            parts.append(f"{c}" if not mono else (mono if c == 1 else f"{c}*{mono}"))
        return f"MultiPoly({self.copies}, " + " + ".join(parts) + ")"

    # -- arithmetic --------------------------------------------------------

    def _check_ring(self, other: "MultiPoly"):
        if self.copies != other.copies:
            raise ValueError(f"ring mismatch {self.copies} vs {other.copies}")

    def __add__(self, other):
        if not isinstance(other, MultiPoly):
            other = MultiPoly.const(self.copies, other)
        self._check_ring(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = out.get(e, 0) + c
        return MultiPoly(self.copies, out)

    __radd__ = __add__

    def __neg__(self):
        return MultiPoly(self.copies, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        if not isinstance(other, MultiPoly):
            other = MultiPoly.const(self.copies, other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, MultiPoly):
            c = Fraction(other)
            return MultiPoly(self.copies, {e: v * c for e, v in self.terms.items()})
        self._check_ring(other)
        out: dict = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = out.get(e, 0) + c1 * c2
        return MultiPoly(self.copies, out)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative power")
        result = MultiPoly.const(self.copies, 1)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    # -- evaluation and substitution --------------------------------------

    def evaluate(self, values: Sequence[Rational]) -> Fraction:
        """Evaluate at a full assignment of the flattened variables."""
        if len(values) != self.nvars:
            raise ValueError("wrong number of values")
        vals = [Fraction(v) for v in values]
        total = Fraction(0)
        for exp, c in self.terms.items():
            term = c
            for v, e in zip(vals, exp):
                if e:
                    term *= v ** e
            total += term
        return total

    def evaluate_blocks(self, blocks: Sequence[Sequence[Rational]]) -> Fraction:
        """Evaluate with one sequence of values per coordinate."""
        flat = [v for block in blocks for v in block]
        return self.evaluate(flat)

    def substitute(self, images: Sequence["MultiPoly | Rational"], target: Sequence[int]) -> "MultiPoly":
        """Replace variable ``i`` by ``images[i]`` (a polynomial of ring ``target`` or a constant)."""
        target = tuple(target)
        if len(images) != self.nvars:
            raise ValueError("need one image per variable")
        imgs = [im if isinstance(im, MultiPoly) else MultiPoly.const(target, im) for im in images]
        for im in imgs:
            if im.copies != target:
                raise ValueError("image in the wrong ring")
        power_cache: dict = {}

        def pw(i: int, e: int) -> MultiPoly:
            key = (i, e)
            if key not in power_cache:
                power_cache[key] = imgs[i] ** e
            return power_cache[key]

        out: dict = {}
        for exp, c in self.terms.items():
            term = MultiPoly.const(target, c)
            for i, e in enumerate(exp):
                if e:
                    term = term * pw(i, e)
            for e2, c2 in term.terms.items():
                out[e2] = out.get(e2, 0) + c2
        return MultiPoly(target, out)

    def shift_scale(self, shifts: Sequence[Rational], scale: Rational) -> "MultiPoly":
        """``f(shifts + scale * x)`` in the same ring, one variable at a time."""
        scale = Fraction(scale)
        terms = dict(self.terms)
        for i, s in enumerate(shifts):
            s = Fraction(s)
            if s == 0 and scale == 1:
                continue
            new: dict = {}
            for exp, c in terms.items():
                e = exp[i]
                if e == 0:
                    new[exp] = new.get(exp, 0) + c
                    continue
                lst = list(exp)
                for k in range(e + 1):
                    if s == 0 and k != e:
                        continue
                    coeff = c * math.comb(e, k) * (s ** (e - k)) * (scale ** k)
                    if coeff:
                        lst[i] = k
                        key = tuple(lst)
                        new[key] = new.get(key, 0) + coeff
            terms = {e: c for e, c in new.items() if c}
        return MultiPoly(self.copies, terms)

    def embed(self, copies: Sequence[int]) -> "MultiPoly":
        """View in a ring with at least as many copies (extra copies appended, unused)."""
        copies = tuple(copies)
        if len(copies) != self.d or any(a < b for a, b in zip(copies, self.copies)):
            raise ValueError("target ring is not larger")
        out = {}
        for exp, c in self.terms.items():
            new = []
            pos = 0
            for old, nc in zip(self.copies, copies):
                new.extend(exp[pos:pos + old])
                new.extend([0] * (nc - old))
                pos += old
            out[tuple(new)] = c
        return MultiPoly(copies, out)

    def diagonal(self) -> "MultiPoly":
        """Identify all copies of each coordinate: a plain polynomial in ``d`` variables."""
        out: dict = {}
        offs = self.offsets()
        for exp, c in self.terms.items():
            key = tuple(sum(exp[o:o + n]) for o, n in zip(offs, self.copies))
            out[key] = out.get(key, 0) + c
        return MultiPoly((1,) * self.d, out)

    def at_blocks(self, blocks: Sequence[Sequence["MultiPoly | Rational"]], target: Sequence[int]) -> "MultiPoly":
        """Substitute with one image sequence per coordinate (``len(blocks[j]) == copies[j]``)."""
        flat = [im for block in blocks for im in block]
        return self.substitute(flat, target)

    # -- p-adic quantities -------------------------------------------------

    def gauss_norm(self, p: int) -> Fraction:
        return max((norm(c, p) for c in self.terms.values()), default=Fraction(0))

    # -- JSON --------------------------------------------------------------

    def to_json(self, p: int | None = None) -> dict:
        obj = {"d": self.d}
        if p is not None:
            obj = {"p": p, "d": self.d}
        if not self.is_plain:
            obj["copies"] = list(self.copies)
        obj["terms"] = [{"exp": list(e), "coeff": rat_to_str(c)} for e, c in self.sorted_terms()]
        return obj

    @classmethod
    def from_json(cls, obj: Mapping) -> "MultiPoly":
        d = int(obj["d"])
        copies = tuple(obj.get("copies", (1,) * d))
        return cls(copies, {tuple(t["exp"]): rat_from(t["coeff"]) for t in obj["terms"]})


def _var_names(copies: Sequence[int]) -> list[str]:
    letters = "xyzwuv"
    names = []
    for j, c in enumerate(copies):
        base = letters[j] if j < len(letters) else f"x{j + 1}"
        names.extend([base] if c == 1 else [f"{base}{k + 1}" for k in range(c)])
    return names


# ---------------------------------------------------------------------------
# difference quotients and derivatives


@lru_cache(maxsize=None)
def _power_sum_split(e: int) -> tuple:
    """Exponent pairs of ``(u**e - v**e)/(u - v)``."""
    return tuple((a, e - 1 - a) for a in range(e))


def diff_quotient(f: MultiPoly, j: int) -> MultiPoly:
    """``Phi_j f``: one divided difference in coordinate ``j`` (zero-based)."""
    if not 0 <= j < f.d:
        raise ValueError(f"coordinate {j} out of range")
    new_copies = list(f.copies)
    new_copies[j] += 1
    pos = f.offsets()[j] + f.copies[j] - 1  # last copy of coordinate j
    out: dict = {}
    for exp, c in f.terms.items():
        e = exp[pos]
        if e == 0:
            continue
        head, tail = exp[:pos], exp[pos + 1:]
        for a, b in _power_sum_split(e):
            key = head + (a, b) + tail
            out[key] = out.get(key, 0) + c
    return MultiPoly(new_copies, out)


class QuotientTable:
    """Memoised ``Phi_beta f`` for one base polynomial."""

    def __init__(self, f: MultiPoly):
        if not f.is_plain:
            raise ValueError("base polynomial must be plain")
        self.f = f
        self._cache: dict = {(0,) * f.d: f}

    def __call__(self, beta: MultiIndex) -> MultiPoly:
        beta = tuple(beta)
        hit = self._cache.get(beta)
        if hit is not None:
            return hit
        # peel the last nonzero coordinate so the coordinate order is fixed
        j = max(i for i, b in enumerate(beta) if b)
        prev = beta[:j] + (beta[j] - 1,) + beta[j + 1:]
        out = diff_quotient(self(prev), j)
        self._cache[beta] = out
        return out


def diff_quotient_multi(f: MultiPoly, beta: MultiIndex, order: Sequence[int] | None = None) -> MultiPoly:
    """``Phi_beta f``; ``order`` lists coordinates in application order (default 1..d)."""
    beta = tuple(beta)
    if len(beta) != f.d:
        raise ValueError("multi-index length mismatch")
    if order is None:
        order = [j for j in range(f.d) for _ in range(beta[j])]
    elif sorted(order) != sorted(j for j in range(f.d) for _ in range(beta[j])):
        raise ValueError("order does not match beta")
    out = f
    for j in order:
        out = diff_quotient(out, j)
    return out


def partial_derivative(f: MultiPoly, beta: MultiIndex) -> MultiPoly:
    """``d^beta f`` of a plain polynomial, by the power rule."""
    if not f.is_plain:
        raise ValueError("partial derivatives are taken of plain polynomials")
    beta = tuple(beta)
    out: dict = {}
    for exp, c in f.terms.items():
        if any(e < b for e, b in zip(exp, beta)):
            continue
        coeff = c
        for e, b in zip(exp, beta):
            coeff *= math.perm(e, b)
        key = tuple(e - b for e, b in zip(exp, beta))
        out[key] = out.get(key, 0) + coeff
    return MultiPoly(f.copies, out)


def evaluate_repeated(g: MultiPoly, y: Sequence[Rational]) -> Fraction:
    """``g(ybar)``: every copy of coordinate ``j`` set to ``y[j]``."""
    return g.evaluate_blocks([[y[j]] * c for j, c in enumerate(g.copies)])


# ---------------------------------------------------------------------------
# Taylor polynomials and the identities around them


def L_poly(beta: MultiIndex, y: Sequence[Rational]) -> MultiPoly:
    """``L_{beta,y}(x) = prod_j (x_j - y_j)**beta_j``."""
    d = len(beta)
    out = MultiPoly.const((1,) * d, 1)
    for j, b in enumerate(beta):
        if b:
            out = out * (MultiPoly.var((1,) * d, j) - Fraction(y[j])) ** b
    return out


def taylor_poly(f: MultiPoly, y: Sequence[Rational], l: int, table: QuotientTable | None = None) -> MultiPoly:
    """``P_{f,y,l}(x) = sum_{|beta| <= l} Phi_beta f(ybar_beta) L_{beta,y}(x)``."""
    if l < 0:
        raise PreconditionError("Taylor order must be >= 0")
    table = table or QuotientTable(f)
    out = MultiPoly.zero(f.copies)
    for beta in multi_indices_upto(f.d, l):
        c = evaluate_repeated(table(beta), y)
        if c:
            out = out + L_poly(beta, y) * c
    return out


def taylor_remainder_identity(f: MultiPoly, y: Sequence[Rational], k: int,
                              table: QuotientTable | None = None) -> MultiPoly:
    """``f - P_{f,y,k} - (remainder groups)``; identically zero when the formula holds.

    Group ``j`` sums, over ``|beta| = k+1`` with ``beta_m = 0`` for ``m < j`` and
    ``beta_j > 0``, the quotient ``Phi_beta f`` evaluated with coordinates before
    ``j`` at ``x``, coordinate ``j`` at ``(x_j, y_j, ..., y_j)`` and later
    coordinates all at ``y``, times ``L_{beta,y}(x)``.
    """
    table = table or QuotientTable(f)
    d = f.d
    plain = (1,) * d
    xs = [MultiPoly.var(plain, m) for m in range(d)]
    rhs = MultiPoly.zero(plain)
    for beta in multi_indices(d, k + 1):
        j = next(i for i, b in enumerate(beta) if b)
        blocks = []
        for m in range(d):
            n = beta[m] + 1
            if m < j:
                blocks.append([xs[m]])
            elif m == j:
                blocks.append([xs[m]] + [Fraction(y[m])] * (n - 1))
            else:
                blocks.append([Fraction(y[m])] * n)
        rhs = rhs + table(beta).at_blocks(blocks, plain) * L_poly(beta, y)
    return f - taylor_poly(f, y, k, table) - rhs


def derivative_identity(f: MultiPoly, beta: MultiIndex, table: QuotientTable | None = None) -> MultiPoly:
    """``d^beta f - beta! * diagonal(Phi_beta f)``; zero polynomial expected."""
    table = table or QuotientTable(f)
    return partial_derivative(f, beta) - table(beta).diagonal() * index_factorial(beta)


def part_identity(f: MultiPoly, beta: MultiIndex, j: int) -> MultiPoly:
    """``Phi_{beta-e_j}(d_j f) - sum_n Phi_beta f(.., x_{j,n} doubled, ..)``.

    Requires ``beta[j] > 0``.  The sum runs over the ``beta[j]`` ways of
    doubling one of the copies of coordinate ``j``.
    """
    if beta[j] <= 0:
        raise PreconditionError("need beta_j > 0")
    lower = tuple(b - (1 if i == j else 0) for i, b in enumerate(beta))
    lhs = diff_quotient_multi(partial_derivative(f, unit_index(f.d, j)), lower)
    target = plus_one(lower)
    phi = diff_quotient_multi(f, beta)
    rhs = MultiPoly.zero(target)
    for n in range(beta[j]):
        blocks = []
        for m in range(f.d):
            own = [MultiPoly.var(target, m, c) for c in range(target[m])]
            if m == j:
                own = own[:n + 1] + own[n:]
            blocks.append(own)
        rhs = rhs + phi.at_blocks(blocks, target)
    return lhs - rhs


def step_identity(f: MultiPoly, beta: MultiIndex, i: int, y: Sequence[Rational]) -> MultiPoly:
    """One-step Newton recursion in coordinate ``i``, as a polynomial in a free copy ``z``.

    ``Phi_{beta+e_i} f(z, ybar_beta) - Phi_{beta+e_i} f(ybar_{beta+e_i})
    - (z - y_i) Phi_{beta+2e_i} f(z, ybar_{beta+e_i})``.
    """
    d = f.d
    table = QuotientTable(f)
    b1 = tuple(b + (1 if m == i else 0) for m, b in enumerate(beta))
    b2 = tuple(b + (2 if m == i else 0) for m, b in enumerate(beta))
    ring = (1,)
    z = MultiPoly.var(ring, 0)

    def blocks_with_z(gamma):
        out = []
        for m in range(d):
            n = gamma[m] + 1
            vals = [Fraction(y[m])] * n
            if m == i:
                vals = [z] + vals[1:]
            out.append(vals)
        return out

    left = table(b1).at_blocks(blocks_with_z(b1), ring)
    const = evaluate_repeated(table(b1), y)
    right = table(b2).at_blocks(blocks_with_z(b2), ring) * (z - Fraction(y[i]))
    return left - const - right


def first_quotient_slice(f: MultiPoly, i: int, a: Rational) -> MultiPoly:
    """``f^i_a(x) = Phi_{e_i} f(a, x)``: one copy of coordinate ``i`` pinned at ``a``."""
    phi = diff_quotient(f, i)
    plain = f.copies
    blocks = []
    for m in range(f.d):
        xm = MultiPoly.var(plain, m)
        blocks.append([Fraction(a), xm] if m == i else [xm])
    return phi.at_blocks(blocks, plain)


def chain_identity(f: MultiPoly, y: Sequence[Rational], l: int, i: int, alpha: MultiIndex,
                   p_table: QuotientTable | None = None, q_table: QuotientTable | None = None) -> MultiPoly:
    """Leibniz-type identity for ``Phi_{alpha+e_i}`` of a Taylor polynomial.

    Returns ``Phi_{alpha+e_i} P_{f,y,l} - (z - y_i) Phi_{alpha+e_i} Q - Phi_alpha Q``
    with ``Q = P_{f^i_{y_i}, y, l-1}``, in the ring with copies ``alpha(1) + e_i``
    whose last copy of coordinate ``i`` plays the role of ``z``.  The optional
    tables memoise the quotients of ``P_{f,y,l}`` and ``Q`` across calls.
    """
    alpha = tuple(alpha)
    if sum(alpha) > l - 1:
        raise PreconditionError("need |alpha| <= l - 1")
    up = tuple(a + (1 if m == i else 0) for m, a in enumerate(alpha))
    ring = plus_one(up)
    p_table = p_table or QuotientTable(taylor_poly(f, y, l))
    q_table = q_table or QuotientTable(taylor_poly(first_quotient_slice(f, i, y[i]), y, l - 1))
    z = MultiPoly.var(ring, i, ring[i] - 1)
    term1 = (z - Fraction(y[i])) * q_table(up)
    term2 = q_table(alpha).embed(ring)
    return p_table(up) - term1 - term2


def chain_identities(f: MultiPoly, y: Sequence[Rational], l: int):
    """Yield ``(i, alpha, residual)`` for every coordinate and ``|alpha| <= l - 1``."""
    p_table = QuotientTable(taylor_poly(f, y, l))
    for i in range(f.d):
        q_table = QuotientTable(taylor_poly(first_quotient_slice(f, i, y[i]), y, l - 1))
        for alpha in multi_indices_upto(f.d, l - 1):
            yield i, alpha, chain_identity(f, y, l, i, alpha, p_table, q_table)


# ---------------------------------------------------------------------------
# rescalings


def recentre(g: MultiPoly, y: Sequence[Rational]) -> MultiPoly:
    """``x -> g(x + y)`` (the map ``Q_{g,y}`` when applied to a Taylor polynomial)."""
    return g.shift_scale(list(y), 1)


def rescale_homogeneous(q: MultiPoly, R: int, l: int, p: int) -> MultiPoly:
    """``Q^R(x) = s * Q(p**R x)`` with ``|s|_p = p**(l*R)``, i.e. ``s = p**(-l*R)``.

    The real factor ``nu**(lR)`` is realised by the rational whose p-adic norm
    is that real number, so ``|Q^R|_{B(0,1)} = r**-l * |Q|_{B(0,p**-R)}``.
    """
    return q.shift_scale([0] * q.nvars, Fraction(p) ** R) * (Fraction(p) ** (-l * R))


def coefficient_combination(curve: Sequence[MultiPoly], coeffs: Sequence[Rational]) -> MultiPoly:
    """``c_0 + sum_i c_i f_i``."""
    if len(coeffs) != len(curve) + 1:
        raise ValueError("need n+1 coefficients for n functions")
    out = MultiPoly.const(curve[0].copies, coeffs[0])
    for c, f in zip(coeffs[1:], curve):
        out = out + f * c
    return out


def parse_monomials(d: int, spec: Iterable[tuple]) -> MultiPoly:
    """Build a plain polynomial from ``(coeff, exps)`` pairs."""
    return MultiPoly.plain(d, {tuple(e): Fraction(c) for c, e in spec})
