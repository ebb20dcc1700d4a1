"""Exact rational scalars and the number-theoretic helpers built on them.

Rationals are `fractions.Fraction` values: arbitrary precision, always in
lowest terms with a positive denominator, zero canonically 0/1. The alias
`BigRational` names that role. Text form is `p` or `p/q` with an optional
leading minus and a positive denominator.
"""

from __future__ import annotations

import math
import re
from fractions import Fraction

from .errors import DivisionByZero

BigRational = Fraction

_RATIONAL_RE = re.compile(r"^(-?\d+)(?:/(\d+))?$")


def rat_arith(a: Fraction, b: Fraction, op: str) -> Fraction:
    """Apply one of {add, sub, mul, div} to two rationals, exactly.

    Division by zero raises DivisionByZero; there is no 0/0 = 0 convention
    anywhere in this package.
    """
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        if b == 0:
            raise DivisionByZero(f"{a} / 0")
        return a / b
    raise ValueError(f"unknown rational operation {op!r}")


def divisors(n: int) -> list[int]:
    """All positive divisors of n >= 1, ascending.

    Trial division up to sqrt(n); coefficients here are desk-scale, so
    factorization speed is irrelevant.
    """
    if n < 1:
        raise ValueError(f"divisors requires n >= 1, got {n}")
    small, large = [], []
    d = 1
    while d * d <= n:
        if n % d == 0:
            small.append(d)
            if d != n // d:
                large.append(n // d)
        d += 1
    return small + large[::-1]


def is_perfect_square(n: int) -> bool:
    """Whether the integer n is a perfect square (exact isqrt + check)."""
    if n < 0:
        return False
    r = math.isqrt(n)
    return r * r == n


def rational_square_root(q: Fraction) -> Fraction | None:
    """The exact nonnegative square root of q, or None if q is not a
    square in the rationals.

    q = n/d in lowest terms is a rational square iff q >= 0 and both n and
    d are perfect squares; then sqrt(q) = isqrt(n)/isqrt(d) exactly.
    """
    q = Fraction(q)
    if q < 0:
        return None
    num, den = q.numerator, q.denominator
    rn = math.isqrt(num)
    if rn * rn != num:
        return None
    rd = math.isqrt(den)
    if rd * rd != den:
        return None
    return Fraction(rn, rd)


def parse_rational(text: str) -> Fraction:
    """Parse the rational text form `p` or `p/q` (leading `-` allowed).

    Input need not be in lowest terms; the result always is. The
    denominator must be a positive integer literal.
    """
    m = _RATIONAL_RE.match(text.strip())
    if m is None:
        raise ValueError(f"not a rational: {text!r}")
    num = int(m.group(1))
    den = int(m.group(2)) if m.group(2) is not None else 1
    if den == 0:
        raise ValueError(f"zero denominator: {text!r}")
    return Fraction(num, den)


def format_rational(q: Fraction) -> str:
    """Canonical text form: lowest terms, positive denominator, `p` or `p/q`."""
    return str(q)
