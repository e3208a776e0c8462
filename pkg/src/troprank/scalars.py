"""Exact scalars: rational exponents and the coefficient fields.

Exponents and tropical entries are :class:`fractions.Fraction`.  Coefficient
fields are small immutable objects that carry the arithmetic; their elements
are plain canonical Python values so that equality is structural:

* ``Fp``  -- residues ``0 .. p-1`` (``int``)
* ``GF4`` -- ``int`` bit vectors ``a + 2b`` standing for ``a + b*x`` with
  ``x**2 = x + 1``
* ``Q``   -- ``Fraction``
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator


class FieldError(ValueError):
    """Arithmetic outside a field's domain (e.g. inverting zero)."""


class CapacityError(FieldError):
    """The field is too small to supply an admissible element."""


def parse_rational(text) -> Fraction:
    if isinstance(text, Fraction):
        return text
    if isinstance(text, int):
        return Fraction(text)
    if isinstance(text, str):
        try:
            return Fraction(text.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"not a rational: {text!r}") from exc
    raise ValueError(f"not a rational: {text!r}")


def format_rational(q: Fraction) -> str:
    q = Fraction(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    return all(n % d for d in range(2, int(n**0.5) + 1))


@dataclass(frozen=True)
class Field:
    """Base class; concrete fields override the arithmetic."""

    @property
    def name(self) -> str:
        raise NotImplementedError

    @property
    def cardinality(self) -> int | None:
        """Number of elements, or ``None`` for an infinite field."""
        raise NotImplementedError

    @property
    def is_finite(self) -> bool:
        return self.cardinality is not None

    zero = 0
    one = 1

    def sub(self, a, b):
        return self.add(a, self.neg(b))

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    def is_zero(self, a) -> bool:
        return a == self.zero

    def element(self, a):
        """Canonical representative of an element given in this field's encoding.

        Unlike :meth:`coerce` (the ring map from the integers), this reads
        ``a`` as an element code: residues for F_p, ``0..3`` for GF4.
        """
        return self.coerce(a)

    def iter_units(self) -> Iterator:
        """Nonzero elements in canonical order (unbounded for Q)."""
        raise NotImplementedError

    def units(self) -> tuple:
        if not self.is_finite:
            raise FieldError(f"{self.name} has infinitely many units")
        return tuple(self.iter_units())

    def elements(self) -> tuple:
        return (self.zero,) + self.units()

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class PrimeField(Field):
    p: int

    def __post_init__(self):
        if not _is_prime(self.p):
            raise FieldError(f"F{self.p}: modulus must be prime")

    @property
    def name(self) -> str:
        return f"F{self.p}"

    @property
    def cardinality(self) -> int:
        return self.p

    @property
    def characteristic(self) -> int:
        return self.p

    def coerce(self, n) -> int:
        if isinstance(n, Fraction):
            return self.div(n.numerator % self.p, n.denominator % self.p)
        return int(n) % self.p

    def add(self, a, b):
        return (a + b) % self.p

    def neg(self, a):
        return (-a) % self.p

    def mul(self, a, b):
        return (a * b) % self.p

    def inv(self, a):
        if a % self.p == 0:
            raise FieldError(f"inverse of zero in {self.name}")
        return pow(a, self.p - 2, self.p)

    def iter_units(self):
        return iter(range(1, self.p))

    def parse(self, text) -> int:
        return self.coerce(int(str(text).strip()))

    def format(self, a) -> str:
        return str(a)


# GF(4) = F2[x]/(x^2 + x + 1); element a + b*x stored as a | (b << 1).
_GF4_MUL = (
    (0, 0, 0, 0),
    (0, 1, 2, 3),
    (0, 2, 3, 1),
    (0, 3, 1, 2),
)
_GF4_INV = {1: 1, 2: 3, 3: 2}
_GF4_NAMES = ("0", "1", "x", "x+1")


@dataclass(frozen=True)
class GF4Field(Field):
    @property
    def name(self) -> str:
        return "GF4"

    @property
    def cardinality(self) -> int:
        return 4

    @property
    def characteristic(self) -> int:
        return 2

    def coerce(self, n) -> int:
        if isinstance(n, Fraction):
            if n.denominator % 2 == 0:
                raise FieldError("denominator vanishes in GF4")
            n = n.numerator
        return int(n) & 1

    def element(self, a) -> int:
        if isinstance(a, bool) or not isinstance(a, int) or not 0 <= a <= 3:
            raise FieldError(f"not a GF4 element code: {a!r}")
        return a

    def add(self, a, b):
        return a ^ b

    def neg(self, a):
        return a

    def mul(self, a, b):
        return _GF4_MUL[a][b]

    def inv(self, a):
        try:
            return _GF4_INV[a]
        except KeyError:
            raise FieldError("inverse of zero in GF4") from None

    def iter_units(self):
        return iter((1, 2, 3))

    def parse(self, text) -> int:
        key = str(text).replace(" ", "")
        if key in ("x+1", "1+x"):
            return 3
        if key in _GF4_NAMES:
            return _GF4_NAMES.index(key)
        raise ValueError(f"not a GF4 element: {text!r}")

    def format(self, a) -> str:
        return _GF4_NAMES[a]


@dataclass(frozen=True)
class RationalField(Field):
    zero = Fraction(0)
    one = Fraction(1)

    @property
    def name(self) -> str:
        return "Q"

    @property
    def cardinality(self) -> None:
        return None

    @property
    def characteristic(self) -> int:
        return 0

    def coerce(self, n) -> Fraction:
        return Fraction(n)

    def add(self, a, b):
        return a + b

    def neg(self, a):
        return -a

    def mul(self, a, b):
        return a * b

    def inv(self, a):
        if a == 0:
            raise FieldError("inverse of zero in Q")
        return 1 / Fraction(a)

    def iter_units(self):
        # 1, 2, 3, ...: any fixed enumeration keeps choices reproducible
        return (Fraction(k) for k in itertools.count(1))

    def parse(self, text) -> Fraction:
        return parse_rational(text)

    def format(self, a) -> str:
        return format_rational(a)


Q = RationalField()
GF4 = GF4Field()

_SPEC_RE = re.compile(r"^F(\d+)$")


def field_from_spec(spec) -> Field:
    """Parse ``"Q"``, ``"GF4"`` or ``"F<p>"``; fields pass through."""
    if isinstance(spec, Field):
        return spec
    text = str(spec).strip()
    if text == "Q":
        return Q
    if text.upper() == "GF4":
        return GF4
    m = _SPEC_RE.match(text)
    if m:
        return PrimeField(int(m.group(1)))
    raise FieldError(f"unknown field spec {spec!r}")


def field_ops(f) -> Field:
    """The arithmetic bundle of ``f``; fields are their own bundle."""
    return field_from_spec(f)


def field_units(f) -> tuple:
    return field_from_spec(f).units()


def pick_excluding(f, forbidden: Iterable):
    """First unit of ``f`` in canonical order that is not in ``forbidden``.

    Raises :class:`CapacityError` when every unit is forbidden.
    """
    f = field_from_spec(f)
    banned = set(forbidden)
    if f.is_finite:
        for u in f.iter_units():
            if u not in banned:
                return u
        raise CapacityError(
            f"{f.name} has no unit outside {sorted(f.format(x) for x in banned)}"
        )
    # finitely many banned values, so the scan terminates
    for u in f.iter_units():
        if u not in banned:
            return u
    raise AssertionError("unreachable")
