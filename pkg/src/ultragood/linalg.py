"""Exact rational linear algebra, delegated to sympy."""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

import sympy


def _to_sympy(x) -> sympy.Rational:
    x = Fraction(x)
    return sympy.Rational(x.numerator, x.denominator)


def _from_sympy(x) -> Fraction:
    x = sympy.Rational(x)
    return Fraction(int(x.p), int(x.q))


def matrix(rows: Sequence[Sequence]) -> sympy.Matrix:
    return sympy.Matrix([[_to_sympy(v) for v in row] for row in rows])


def rank(rows: Sequence[Sequence]) -> int:
    if not rows:
        return 0
    return matrix(rows).rank()


def det(rows: Sequence[Sequence]) -> Fraction:
    return _from_sympy(matrix(rows).det())


def solve(rows: Sequence[Sequence], rhs: Sequence) -> list[Fraction]:
    """Unique solution of ``rows @ x = rhs``; raises ``ValueError`` if singular."""
    m = matrix(rows)
    if m.det() == 0:
        raise ValueError("singular system")
    sol = m.LUsolve(sympy.Matrix([_to_sympy(v) for v in rhs]))
    return [_from_sympy(v) for v in sol]
