"""Towers of real quadratic field extensions and exact arithmetic on them.

A tower is a chain Q = K0 < K1 < ... < Kn where each level adjoins the
positive square root g_i of some positive non-square element s_i of the
level below. The tower stores, for each level i, the 2^(i-1) coordinates
of s_i = g_i^2 in the level-(i-1) basis.

Elements of level k are vectors of 2^k rationals over the all-products
basis: coordinate j multiplies the product of the generators g_i selected
by the set bits of j (bit i-1 selects g_i). The top generator owns the
highest bit, so the first half of a coordinate vector is the subfield
part a and the second half the extension part b in the unique
decomposition x = a + b*g_k.

Towers and elements are immutable; every operation is a pure function, so
values are safe to share across threads.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import mpmath

from .errors import (
    DivisionByZero,
    InvalidTower,
    LevelMismatch,
    NonRealExtension,
    NotAProperExtension,
    TowerFormatError,
)
from .exactnum import format_rational, parse_rational, rational_square_root

_ZERO = Fraction(0)
_HALF = Fraction(1, 2)


def _as_fractions(coords) -> tuple[Fraction, ...]:
    return tuple(Fraction(c) for c in coords)


def _add(a, b):
    return tuple(x + y for x, y in zip(a, b))


def _sub(a, b):
    return tuple(x - y for x, y in zip(a, b))


def _neg(a):
    return tuple(-x for x in a)


def _scale(a, q):
    return tuple(q * x for x in a)


def _is_zero(a):
    return all(x == 0 for x in a)


@dataclass(frozen=True)
class TowerElement:
    """An element of tower level `level`: 2^level rational coordinates."""

    level: int
    coords: tuple[Fraction, ...]

    def __post_init__(self):
        if self.level < 0:
            raise ValueError(f"negative level {self.level}")
        coords = _as_fractions(self.coords)
        if len(coords) != 1 << self.level:
            raise ValueError(
                f"level {self.level} needs {1 << self.level} coordinates, "
                f"got {len(coords)}"
            )
        object.__setattr__(self, "coords", coords)

    @classmethod
    def zero(cls, level: int) -> TowerElement:
        return cls(level, (_ZERO,) * (1 << level))

    @property
    def is_zero(self) -> bool:
        return _is_zero(self.coords)

    @property
    def is_rational(self) -> bool:
        """True when all coordinates beyond the constant one vanish."""
        return _is_zero(self.coords[1:])

    @property
    def rational_value(self) -> Fraction:
        if not self.is_rational:
            raise ValueError("element is not rational")
        return self.coords[0]

    def _halves(self):
        h = 1 << (self.level - 1)
        return self.coords[:h], self.coords[h:]

    def subfield_part(self) -> TowerElement:
        """The a in x = a + b*g relative to the top generator."""
        if self.level == 0:
            raise LevelMismatch("level 0 has no subfield part")
        return TowerElement(self.level - 1, self._halves()[0])

    def extension_part(self) -> TowerElement:
        """The b in x = a + b*g relative to the top generator."""
        if self.level == 0:
            raise LevelMismatch("level 0 has no extension part")
        return TowerElement(self.level - 1, self._halves()[1])

    def conjugate(self) -> TowerElement:
        """a + b*g -> a - b*g: negate the extension-half coordinates."""
        if self.level == 0:
            raise LevelMismatch("conjugation needs a top generator (level >= 1)")
        a, b = self._halves()
        return TowerElement(self.level, a + _neg(b))

    def scale(self, q) -> TowerElement:
        return TowerElement(self.level, _scale(self.coords, Fraction(q)))

    def _check_level(self, other):
        if self.level != other.level:
            raise LevelMismatch(
                f"levels {self.level} and {other.level} differ; lift explicitly"
            )

    def __add__(self, other: TowerElement) -> TowerElement:
        self._check_level(other)
        return TowerElement(self.level, _add(self.coords, other.coords))

    def __sub__(self, other: TowerElement) -> TowerElement:
        self._check_level(other)
        return TowerElement(self.level, _sub(self.coords, other.coords))

    def __neg__(self) -> TowerElement:
        return TowerElement(self.level, _neg(self.coords))

    def __repr__(self):
        inner = ", ".join(str(c) for c in self.coords)
        return f"TowerElement({self.level}, [{inner}])"


def _brief(x: TowerElement) -> str:
    """Compact display for messages: plain rational when possible."""
    if x.is_rational:
        return str(x.coords[0])
    return "[" + ", ".join(str(c) for c in x.coords) + "]"


@dataclass(frozen=True)
class BasisDescriptor:
    """The all-products basis of a level: mask j is the product of the
    generators on the set bits of j, in ascending numeric order."""

    masks: tuple[int, ...]

    def __len__(self):
        return len(self.masks)

    def label(self, j: int) -> str:
        mask = self.masks[j]
        if mask == 0:
            return "1"
        parts = [f"g{i + 1}" for i in range(mask.bit_length()) if mask >> i & 1]
        return "*".join(parts)


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    level: int | None = None
    error: Exception | None = None

    def __bool__(self):
        return self.ok

    @property
    def message(self) -> str:
        if self.ok:
            return "valid tower"
        return f"level {self.level}: {type(self.error).__name__}: {self.error}"


@dataclass(frozen=True)
class Tower:
    """An ordered chain of quadratic extension levels over Q.

    `levels[i-1]` holds the coordinates, in the level-(i-1) basis, of the
    square of generator g_i. An empty tuple of levels is Q itself.
    """

    levels: tuple[tuple[Fraction, ...], ...] = ()

    def __post_init__(self):
        object.__setattr__(
            self, "levels", tuple(_as_fractions(sq) for sq in self.levels)
        )

    @property
    def depth(self) -> int:
        return len(self.levels)

    def __repr__(self):
        squares = ", ".join(
            "[" + ", ".join(str(c) for c in sq) + "]" for sq in self.levels
        )
        return f"Tower([{squares}])"

    # -- construction -----------------------------------------------------

    def square(self, i: int) -> TowerElement:
        """g_i^2 as an element of level i-1."""
        if not 1 <= i <= self.depth:
            raise LevelMismatch(f"no generator g{i} in a depth-{self.depth} tower")
        return TowerElement(i - 1, self.levels[i - 1])

    def generator(self, i: int) -> TowerElement:
        """g_i as an element of level i (a single basis coordinate)."""
        if not 1 <= i <= self.depth:
            raise LevelMismatch(f"no generator g{i} in a depth-{self.depth} tower")
        coords = [_ZERO] * (1 << i)
        coords[1 << (i - 1)] = Fraction(1)
        return TowerElement(i, tuple(coords))

    def all_products(self, k: int) -> BasisDescriptor:
        if not 0 <= k <= self.depth:
            raise LevelMismatch(f"level {k} out of range 0..{self.depth}")
        return BasisDescriptor(tuple(range(1 << k)))

    def embed(self, q, level: int | None = None) -> TowerElement:
        """The rational q as an element of the given level (default: top)."""
        level = self.depth if level is None else level
        if not 0 <= level <= self.depth:
            raise LevelMismatch(f"level {level} out of range 0..{self.depth}")
        coords = [_ZERO] * (1 << level)
        coords[0] = Fraction(q)
        return TowerElement(level, tuple(coords))

    def one(self, level: int | None = None) -> TowerElement:
        return self.embed(1, level)

    def lift(self, x: TowerElement) -> TowerElement:
        """Zero-pad x one level up; the value it denotes is unchanged."""
        if x.level >= self.depth:
            raise LevelMismatch(
                f"cannot lift above the top level (depth {self.depth})"
            )
        return TowerElement(x.level + 1, x.coords + (_ZERO,) * len(x.coords))

    def lift_to(self, x: TowerElement, level: int) -> TowerElement:
        if not x.level <= level <= self.depth:
            raise LevelMismatch(
                f"cannot lift level {x.level} to level {level} (depth {self.depth})"
            )
        while x.level < level:
            x = self.lift(x)
        return x

    def _as_top(self, s) -> TowerElement:
        if isinstance(s, TowerElement):
            if s.level != self.depth:
                raise LevelMismatch(
                    f"expected an element of the top level {self.depth}, "
                    f"got level {s.level}"
                )
            return s
        return self.embed(Fraction(s))

    def adjoin_sqrt(self, s) -> Tower:
        """Extend by the positive square root of s (an element of the top
        level, or a rational).

        s must be positive (NonRealExtension otherwise) and must not be a
        square in the current top field (NotAProperExtension, carrying the
        in-field witness, otherwise).
        """
        s = self._as_top(s)
        if self.exact_sign(s) <= 0:
            raise NonRealExtension(
                f"cannot adjoin sqrt({_brief(s)}): value is not positive"
            )
        w = self.is_square(s)
        if w is not None:
            if self.exact_sign(w) < 0:
                w = -w
            raise NotAProperExtension(
                f"{_brief(s)} is a square (witness {_brief(w)})", witness=w
            )
        return Tower(self.levels + (s.coords,))

    def adjoin_quadratic_root(self, coeffs, branch: str) -> tuple[Tower, TowerElement]:
        """Extend by a root of c0 + c1*x + c2*x^2 with coefficients in the
        top level, reducing to square-root adjunction by completing the
        square. `branch` picks the root shift +sqrt(e) or -sqrt(e) where
        e = (c1^2 - 4*c0*c2) / (2*c2)^2.

        Returns the extended tower and the exact root. If the quadratic
        already splits in the field, raises NotAProperExtension carrying
        the in-field root for the requested branch.
        """
        if branch not in ("+", "-"):
            raise ValueError(f"branch must be '+' or '-', got {branch!r}")
        c0, c1, c2 = (self._as_top(c) for c in coeffs)
        if c2.is_zero:
            raise ValueError("leading coefficient is zero; not a quadratic")
        disc = self.mul(c1, c1) - self.mul(c0, c2).scale(4)
        if self.exact_sign(disc) <= 0:
            raise NonRealExtension(
                f"discriminant {_brief(disc)} is not positive; no real proper root"
            )
        e = self.mul(disc, self.inv(self.mul(c2, c2).scale(4)))
        shift = -self.mul(c1, self.inv(c2.scale(2)))
        w = self.is_square(e)
        if w is not None:
            if self.exact_sign(w) < 0:
                w = -w
            root = shift + w if branch == "+" else shift - w
            raise NotAProperExtension(
                f"quadratic splits in the current field (root {_brief(root)})",
                witness=root,
            )
        ext = Tower(self.levels + (e.coords,))
        g = ext.generator(ext.depth)
        root = ext.lift(shift) + g if branch == "+" else ext.lift(shift) - g
        # Horner check; by construction this is exact, so a failure means
        # a broken invariant in the tower we extended.
        acc = ext.lift(c2)
        for c in (c1, c0):
            acc = ext.mul(acc, root) + ext.lift(c)
        if not acc.is_zero:
            raise InvalidTower("completed-square root fails to satisfy the quadratic")
        return ext, root

    def validate(self) -> ValidationReport:
        """Check every level: coordinate count, positive square, proper
        extension. Reports the first failing level."""
        prefix = Tower(())
        for i, sq in enumerate(self.levels, start=1):
            expected = 1 << (i - 1)
            if len(sq) != expected:
                return ValidationReport(
                    False,
                    i,
                    InvalidTower(
                        f"level {i}: expected {expected} square coordinates, "
                        f"got {len(sq)}"
                    ),
                )
            try:
                prefix = prefix.adjoin_sqrt(TowerElement(i - 1, sq))
            except (NonRealExtension, NotAProperExtension) as exc:
                return ValidationReport(False, i, exc)
        return ValidationReport(True)

    # -- arithmetic --------------------------------------------------------

    def _check_member(self, x: TowerElement):
        if x.level > self.depth:
            raise LevelMismatch(
                f"element at level {x.level} exceeds tower depth {self.depth}"
            )

    def mul(self, x: TowerElement, y: TowerElement) -> TowerElement:
        """Exact product. Recursively: with x = a1 + b1*g, y = a2 + b2*g
        and s = g^2 one level down, the product is
        (a1*a2 + s*b1*b2) + (a1*b2 + a2*b1)*g."""
        self._check_member(x)
        x._check_level(y)
        return TowerElement(x.level, self._mul(x.coords, y.coords, x.level))

    def _mul(self, a, b, k):
        if k == 0:
            return (a[0] * b[0],)
        h = 1 << (k - 1)
        a1, b1 = a[:h], a[h:]
        a2, b2 = b[:h], b[h:]
        s = self.levels[k - 1]
        low = _add(
            self._mul(a1, a2, k - 1),
            self._mul(s, self._mul(b1, b2, k - 1), k - 1),
        )
        high = _add(self._mul(a1, b2, k - 1), self._mul(a2, b1, k - 1))
        return low + high

    def inv(self, x: TowerElement) -> TowerElement:
        """Exact multiplicative inverse via the conjugate: 1/(a + b*g) =
        (a - b*g) / N with norm N = a^2 - s*b^2 inverted one level down.

        N = 0 for nonzero x is impossible in a valid tower; hitting it
        raises InvalidTower.
        """
        self._check_member(x)
        if x.is_zero:
            raise DivisionByZero("inverse of zero")
        return TowerElement(x.level, self._inv(x.coords, x.level))

    def _inv(self, a, k):
        if k == 0:
            return (1 / a[0],)
        h = 1 << (k - 1)
        sub, ext = a[:h], a[h:]
        s = self.levels[k - 1]
        norm = _sub(self._mul(sub, sub, k - 1), self._mul(s, self._mul(ext, ext, k - 1), k - 1))
        if _is_zero(norm):
            raise InvalidTower("norm of a nonzero element vanished")
        ninv = self._inv(norm, k - 1)
        return self._mul(sub, ninv, k - 1) + _neg(self._mul(ext, ninv, k - 1))

    def div(self, x: TowerElement, y: TowerElement) -> TowerElement:
        return self.mul(x, self.inv(y))

    def power(self, x: TowerElement, n: int) -> TowerElement:
        """x^n by repeated multiplication; negative n inverts first."""
        if n == 0:
            return self.one(x.level)
        if n < 0:
            return self.power(self.inv(x), -n)
        acc = x
        for _ in range(n - 1):
            acc = self.mul(acc, x)
        return acc

    def exact_sign(self, x: TowerElement) -> int:
        """The sign (-1, 0, +1) of the real number x denotes, decided
        exactly. With x = a + b*g, g > 0: equal signs of a and b win
        outright; otherwise the part with the larger magnitude wins, and
        a^2 versus s*b^2 is compared one level down."""
        self._check_member(x)
        return self._sign(x.coords, x.level)

    def _sign(self, a, k):
        if k == 0:
            v = a[0]
            return (v > 0) - (v < 0)
        h = 1 << (k - 1)
        sub, ext = a[:h], a[h:]
        sign_ext = self._sign(ext, k - 1)
        if sign_ext == 0:
            return self._sign(sub, k - 1)
        sign_sub = self._sign(sub, k - 1)
        if sign_sub == 0 or sign_sub == sign_ext:
            return sign_ext
        s = self.levels[k - 1]
        cmp = self._sign(
            _sub(self._mul(sub, sub, k - 1), self._mul(s, self._mul(ext, ext, k - 1), k - 1)),
            k - 1,
        )
        if cmp == 0:
            raise InvalidTower("|a| = |b*g| with opposite signs: generator lies in the subfield")
        return sign_sub if cmp > 0 else sign_ext

    def is_square(self, x: TowerElement) -> TowerElement | None:
        """A witness w with w*w = x exactly, or None when x is not a
        square at its level.

        For x = a + b*g with b != 0, any root c + d*g forces
        c^2 = (a +- r)/2 with r^2 = a^2 - s*b^2 and d = b/(2c); both
        branches are tried and every candidate is verified by squaring,
        so a returned witness is sound unconditionally.
        """
        self._check_member(x)
        w = self._sqrt(x.coords, x.level)
        return None if w is None else TowerElement(x.level, w)

    def _sqrt(self, a, k):
        if k == 0:
            w = rational_square_root(a[0])
            return None if w is None else (w,)
        h = 1 << (k - 1)
        sub, ext = a[:h], a[h:]
        s = self.levels[k - 1]
        zeros = (_ZERO,) * h
        if _is_zero(ext):
            # x = a: either c^2 = a, or x = (d*g)^2 with d^2 = a/s
            w = self._sqrt(sub, k - 1)
            if w is not None:
                return w + zeros
            d2 = self._mul(sub, self._inv(s, k - 1), k - 1)
            d = self._sqrt(d2, k - 1)
            if d is not None:
                return zeros + d
            return None
        norm = _sub(self._mul(sub, sub, k - 1), self._mul(s, self._mul(ext, ext, k - 1), k - 1))
        r = self._sqrt(norm, k - 1)
        if r is None:
            return None
        for csq in (_scale(_add(sub, r), _HALF), _scale(_sub(sub, r), _HALF)):
            c = self._sqrt(csq, k - 1)
            if c is None or _is_zero(c):
                continue
            d = self._mul(ext, self._inv(_scale(c, 2), k - 1), k - 1)
            w = c + d
            if self._mul(w, w, k) == tuple(a):
                return w
        return None

    def member_of_level(self, x: TowerElement, j: int) -> TowerElement | None:
        """Project x down to level j if every extension part above j is
        zero; the result lifts back to x. None otherwise."""
        self._check_member(x)
        if not 0 <= j <= x.level:
            raise LevelMismatch(f"target level {j} out of range 0..{x.level}")
        cur = x
        while cur.level > j:
            if not cur.extension_part().is_zero:
                return None
            cur = cur.subfield_part()
        return cur

    def approx(self, x: TowerElement, precision: int = 113):
        """Binary floating approximation of x at the given working
        precision (bits, round to nearest). Each generator evaluates as
        the positive square root of its recursively approximated square;
        x is then the dot product of its coordinates with the basis.

        Diagnostic only: no exact decision in this package consults it.
        """
        self._check_member(x)
        if precision < 1:
            raise ValueError("precision must be a positive number of bits")
        with mpmath.workprec(precision):
            gens = []
            for sq in self.levels[: x.level]:
                gens.append(mpmath.sqrt(_approx_coords(sq, gens)))
            return +_approx_coords(x.coords, gens)


def _approx_coords(coords, gens):
    total = mpmath.mpf(0)
    for j, c in enumerate(coords):
        if c == 0:
            continue
        term = mpmath.mpf(c.numerator) / c.denominator
        mask, i = j, 0
        while mask:
            if mask & 1:
                term *= gens[i]
            mask >>= 1
            i += 1
        total += term
    return total


# -- text formats -----------------------------------------------------------

_MAGIC = "QTOWER 1"


def dumps_tower(tower: Tower) -> str:
    """Serialize to the line-based tower format (deterministic bytes)."""
    lines = [_MAGIC, f"levels {tower.depth}"]
    for i, sq in enumerate(tower.levels, start=1):
        lines.append(f"square {i}: " + " ".join(format_rational(c) for c in sq))
    return "\n".join(lines) + "\n"


def loads_tower(text: str) -> Tower:
    """Parse and validate a tower file. Structural problems raise
    TowerFormatError; a well-formed file describing an invalid tower
    raises the validation error (e.g. NotAProperExtension)."""
    lines = []
    for raw in text.splitlines():
        stripped = raw.split("#", 1)[0].strip()
        if stripped:
            lines.append(stripped)
    if not lines or lines[0] != _MAGIC:
        raise TowerFormatError(f"missing '{_MAGIC}' header")
    if len(lines) < 2 or not lines[1].startswith("levels "):
        raise TowerFormatError("missing 'levels <n>' line")
    try:
        n = int(lines[1][len("levels "):])
    except ValueError:
        raise TowerFormatError(f"bad level count: {lines[1]!r}") from None
    if n < 0:
        raise TowerFormatError(f"negative level count {n}")
    body = lines[2:]
    if len(body) != n:
        raise TowerFormatError(f"expected {n} square lines, found {len(body)}")
    squares = []
    for i, line in enumerate(body, start=1):
        prefix = f"square {i}:"
        if not line.startswith(prefix):
            raise TowerFormatError(f"expected {prefix!r}, got {line!r}")
        try:
            coords = [parse_rational(tok) for tok in line[len(prefix):].split()]
        except ValueError as exc:
            raise TowerFormatError(f"square {i}: {exc}") from None
        squares.append(tuple(coords))
    tower = Tower(tuple(squares))
    report = tower.validate()
    if not report.ok:
        err = report.error
        if isinstance(err, NotAProperExtension):
            raise NotAProperExtension(report.message, witness=err.witness)
        raise type(err)(report.message)
    return tower


def save_tower(tower: Tower, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(dumps_tower(tower))


def load_tower(path) -> Tower:
    with open(path, "r", encoding="utf-8") as fh:
        return loads_tower(fh.read())


def format_element_text(x: TowerElement) -> str:
    """Element text form: `elt <level>: <r0> <r1> ...`."""
    return f"elt {x.level}: " + " ".join(format_rational(c) for c in x.coords)


def parse_element_text(line: str) -> TowerElement:
    stripped = line.split("#", 1)[0].strip()
    if not stripped.startswith("elt "):
        raise TowerFormatError(f"expected 'elt <level>: ...', got {line!r}")
    head, sep, rest = stripped[len("elt "):].partition(":")
    if not sep:
        raise TowerFormatError(f"missing ':' in element line {line!r}")
    try:
        level = int(head)
        coords = [parse_rational(tok) for tok in rest.split()]
    except ValueError as exc:
        raise TowerFormatError(f"bad element line: {exc}") from None
    if level < 0 or len(coords) != 1 << level:
        raise TowerFormatError(
            f"level {level} needs {1 << max(level, 0)} coordinates, got {len(coords)}"
        )
    return TowerElement(level, tuple(coords))
