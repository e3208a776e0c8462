"""Finite-support generalized power series over a coefficient field.

A :class:`GenPoly` is a finite sum ``sum c_e t**e`` with rational exponents
``e`` (negative allowed), i.e. an element of the subring of Hahn series whose
support is finite.  :class:`GenFrac` is a ratio of two of them.  Degrees are
valuations: the least exponent, ``math.inf`` for zero.

Matrices over these rings live in :class:`SeriesMatrix`; rank is computed by
fraction-free (Bareiss) elimination after clearing column denominators, and
determinants by memoized cofactor expansion, so the two are independent.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from functools import reduce
from typing import Iterable, Sequence

from .scalars import Field, FieldError, field_from_spec, format_rational, parse_rational
from .tropical import TropMatrix

INF = math.inf


class SeriesError(ValueError):
    """Domain error in series arithmetic or series linear algebra."""


def _frac(e) -> Fraction:
    return e if isinstance(e, Fraction) else Fraction(e)


def _power(e: Fraction) -> str:
    if e == 1:
        return "t"
    text = format_rational(e)
    # parenthesize negative or fractional exponents
    return f"t^{text}" if e.denominator == 1 and e > 0 else f"t^({text})"


class GenPoly:
    """Immutable finite generalized polynomial; terms sorted by exponent."""

    __slots__ = ("field", "terms")

    def __init__(self, field: Field, terms=()):
        self.field = field
        if isinstance(terms, dict):
            items = terms.items()
        else:
            items = terms
        acc: dict = {}
        add, element = field.add, field.element
        for e, c in items:
            e, c = _frac(e), element(c)
            if e in acc:
                acc[e] = add(acc[e], c)
            else:
                acc[e] = c
        zero = field.zero
        self.terms = tuple(sorted((e, c) for e, c in acc.items() if c != zero))

    @classmethod
    def _raw(cls, field, terms: tuple) -> "GenPoly":
        # terms already canonical
        obj = cls.__new__(cls)
        obj.field = field
        obj.terms = terms
        return obj

    @classmethod
    def zero(cls, field) -> "GenPoly":
        return cls._raw(field, ())

    @classmethod
    def one(cls, field) -> "GenPoly":
        return cls._raw(field, ((Fraction(0), field.one),))

    @classmethod
    def monomial(cls, field, exponent, coeff=None) -> "GenPoly":
        c = field.one if coeff is None else field.element(coeff)
        if c == field.zero:
            return cls.zero(field)
        return cls._raw(field, ((_frac(exponent), c),))

    @classmethod
    def constant(cls, field, coeff) -> "GenPoly":
        return cls.monomial(field, 0, coeff)

    # -- inspection -------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def deg(self):
        return self.terms[0][0] if self.terms else INF

    def max_exponent(self):
        return self.terms[-1][0] if self.terms else -INF

    def leading(self):
        if not self.terms:
            raise SeriesError("the zero series has no leading term")
        return self.terms[0]

    def lead_coeff(self):
        return self.leading()[1]

    def const_term(self):
        for e, c in self.terms:
            if e == 0:
                return c
            if e > 0:
                break
        return self.field.zero

    def coeff(self, exponent):
        exponent = _frac(exponent)
        for e, c in self.terms:
            if e == exponent:
                return c
        return self.field.zero

    def support(self) -> tuple:
        return tuple(e for e, _ in self.terms)

    def is_monomial(self) -> bool:
        return len(self.terms) == 1

    # -- arithmetic -------------------------------------------------------
    def _check(self, other: "GenPoly"):
        if other.field != self.field:
            raise SeriesError(f"field mismatch: {self.field} vs {other.field}")

    def _coerce(self, other):
        if isinstance(other, GenPoly):
            self._check(other)
            return other
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return GenPoly.constant(self.field, self.field.coerce(other))
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if not other.terms:
            return self
        if not self.terms:
            return other
        f = self.field
        acc = dict(self.terms)
        for e, c in other.terms:
            if e in acc:
                s = f.add(acc[e], c)
                if s == f.zero:
                    del acc[e]
                else:
                    acc[e] = s
            else:
                acc[e] = c
        return GenPoly._raw(f, tuple(sorted(acc.items())))

    __radd__ = __add__

    def __neg__(self):
        neg = self.field.neg
        return GenPoly._raw(self.field, tuple((e, neg(c)) for e, c in self.terms))

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other + (-self)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if not self.terms or not other.terms:
            return GenPoly.zero(self.field)
        f = self.field
        mul, add, zero = f.mul, f.add, f.zero
        if len(other.terms) == 1:
            e2, c2 = other.terms[0]
            return GenPoly._raw(
                f, tuple((e + e2, mul(c, c2)) for e, c in self.terms)
            )
        if len(self.terms) == 1:
            return other * self
        acc: dict = {}
        for e1, c1 in self.terms:
            for e2, c2 in other.terms:
                e = e1 + e2
                p = mul(c1, c2)
                if e in acc:
                    acc[e] = add(acc[e], p)
                else:
                    acc[e] = p
        return GenPoly._raw(f, tuple(sorted((e, c) for e, c in acc.items() if c != zero)))

    __rmul__ = __mul__

    def scale(self, c) -> "GenPoly":
        """Multiply by a field element."""
        f = self.field
        if c == f.zero:
            return GenPoly.zero(f)
        return GenPoly._raw(f, tuple((e, f.mul(x, c)) for e, x in self.terms))

    def shift(self, exponent) -> "GenPoly":
        """Multiply by ``t**exponent``."""
        exponent = _frac(exponent)
        if exponent == 0:
            return self
        return GenPoly._raw(self.field, tuple((e + exponent, c) for e, c in self.terms))

    def divexact(self, other: "GenPoly") -> "GenPoly":
        """Quotient of an exact division; raises if ``other`` does not divide."""
        self._check(other)
        if not other.terms:
            raise SeriesError("division by the zero series")
        if not self.terms:
            return self
        f = self.field
        if len(other.terms) == 1:
            e0, c0 = other.terms[0]
            inv = f.inv(c0)
            return GenPoly._raw(f, tuple((e - e0, f.mul(c, inv)) for e, c in self.terms))
        e0, c0 = other.terms[0]
        inv = f.inv(c0)
        top = self.terms[-1][0] - other.terms[-1][0]
        rem = dict(self.terms)
        quot = []
        while rem:
            e = min(rem)
            qe = e - e0
            if qe > top:
                raise SeriesError("inexact division")
            qc = f.mul(rem[e], inv)
            quot.append((qe, qc))
            for eb, cb in other.terms:
                k = qe + eb
                v = f.sub(rem.get(k, f.zero), f.mul(qc, cb))
                if v == f.zero:
                    rem.pop(k, None)
                else:
                    rem[k] = v
        return GenPoly._raw(f, tuple(quot))

    def __pow__(self, k: int) -> "GenPoly":
        if k < 0:
            raise SeriesError("negative power of a GenPoly; use GenFrac")
        out = GenPoly.one(self.field)
        for _ in range(k):
            out = out * self
        return out

    # -- comparison / display ---------------------------------------------
    def __eq__(self, other):
        if isinstance(other, GenPoly):
            return self.field == other.field and self.terms == other.terms
        if isinstance(other, GenFrac):
            return other == self
        if isinstance(other, int) and not isinstance(other, bool):
            return self == GenPoly.constant(self.field, self.field.coerce(other))
        return NotImplemented

    def __hash__(self):
        return hash((self.field, self.terms))

    def __repr__(self):
        return f"GenPoly({self.field}, {self})"

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for e, c in self.terms:
            cs = self.field.format(c)
            if e == 0:
                parts.append(cs)
                continue
            es = _power(e)
            parts.append(es if cs == "1" else f"{cs}*{es}")
        return " + ".join(parts)

    # -- serialization ----------------------------------------------------
    def to_json(self) -> list:
        return [[format_rational(e), self.field.format(c)] for e, c in self.terms]

    @classmethod
    def from_json(cls, field, data) -> "GenPoly":
        field = field_from_spec(field)
        return cls(field, [(parse_rational(e), field.parse(c)) for e, c in data])


class GenFrac:
    """Ratio of generalized polynomials, kept with a degree-0 monic denominator."""

    __slots__ = ("num", "den")

    def __init__(self, num: GenPoly, den: GenPoly | None = None, *, _canonical=False):
        if den is None:
            den = GenPoly.one(num.field)
        if num.field != den.field:
            raise SeriesError("field mismatch in fraction")
        if den.is_zero():
            raise SeriesError("zero denominator")
        if not _canonical:
            e0, c0 = den.terms[0]
            f = den.field
            if e0 != 0 or c0 != f.one:
                inv = f.inv(c0)
                if len(den.terms) == 1:
                    den = GenPoly.one(f)
                else:
                    den = GenPoly._raw(f, tuple((e - e0, f.mul(c, inv)) for e, c in den.terms))
                num = GenPoly._raw(f, tuple((e - e0, f.mul(c, inv)) for e, c in num.terms))
        self.num = num
        self.den = den

    @property
    def field(self) -> Field:
        return self.num.field

    @classmethod
    def of(cls, x, field: Field | None = None) -> "GenFrac":
        if isinstance(x, GenFrac):
            return x
        if isinstance(x, GenPoly):
            return cls(x, GenPoly.one(x.field), _canonical=True)
        if field is None:
            raise SeriesError(f"cannot lift {x!r} without a field")
        return cls(GenPoly.constant(field, field.coerce(x)), GenPoly.one(field), _canonical=True)

    @classmethod
    def monomial(cls, field, exponent, coeff=None) -> "GenFrac":
        return cls.of(GenPoly.monomial(field, exponent, coeff))

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def __bool__(self):
        return not self.num.is_zero()

    def is_poly(self) -> bool:
        return len(self.den.terms) == 1

    def deg(self):
        return self.num.deg() - self.den.deg()

    def leading(self):
        """Leading exponent and coefficient of the series expansion."""
        e, c = self.num.leading()
        # den is monic of degree 0
        return e, c

    def lead_coeff(self):
        return self.leading()[1]

    def _coerce(self, other):
        if isinstance(other, GenFrac):
            if other.field != self.field:
                raise SeriesError(f"field mismatch: {self.field} vs {other.field}")
            return other
        if isinstance(other, GenPoly):
            if other.field != self.field:
                raise SeriesError(f"field mismatch: {self.field} vs {other.field}")
            return GenFrac.of(other)
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return GenFrac.of(other, self.field)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if self.den == other.den:
            return GenFrac(self.num + other.num, self.den, _canonical=True)
        return GenFrac(self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __add__

    def __neg__(self):
        return GenFrac(-self.num, self.den, _canonical=True)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other + (-self)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return GenFrac(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def inv(self) -> "GenFrac":
        if self.num.is_zero():
            raise SeriesError("inverse of zero")
        return GenFrac(self.den, self.num)

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self * other.inv()

    def __rtruediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other * self.inv()

    def shift(self, exponent) -> "GenFrac":
        return GenFrac(self.num.shift(exponent), self.den, _canonical=True)

    def scale(self, c) -> "GenFrac":
        return GenFrac(self.num.scale(c), self.den, _canonical=True)

    def __eq__(self, other):
        try:
            other = self._coerce(other)
        except SeriesError:
            return False
        if other is NotImplemented:
            return other
        return self.num * other.den == other.num * self.den

    def __hash__(self):
        # only polynomial values have a canonical hash
        if self.is_poly():
            return hash(self.num)
        return hash((self.field, "frac"))

    def __repr__(self):
        return f"GenFrac({self.field}, {self})"

    def __str__(self):
        if self.is_poly():
            return str(self.num)
        return f"({self.num}) / ({self.den})"

    def to_json(self) -> dict:
        return {"num": self.num.to_json(), "den": self.den.to_json()}

    @classmethod
    def from_json(cls, field, data) -> "GenFrac":
        if isinstance(data, list):
            return cls.of(GenPoly.from_json(field, data))
        return cls(GenPoly.from_json(field, data["num"]), GenPoly.from_json(field, data["den"]))


def gp_deg(a):
    return a.deg()


def gp_leading(a):
    return a.leading()


def gp_const_term(a: GenPoly):
    return a.const_term()


class SeriesMatrix:
    """Dense immutable grid of :class:`GenFrac` over one field."""

    __slots__ = ("field", "entries", "rows", "cols")

    def __init__(self, field, entries: Sequence[Sequence]):
        field = field_from_spec(field)
        grid = tuple(tuple(GenFrac.of(x, field) for x in row) for row in entries)
        if grid and len({len(r) for r in grid}) != 1:
            raise SeriesError("ragged matrix")
        for row in grid:
            for x in row:
                if x.field != field:
                    raise SeriesError("entry over a different field")
        self.field = field
        self.entries = grid
        self.rows = len(grid)
        self.cols = len(grid[0]) if grid else 0

    @classmethod
    def monomial(cls, field, B: TropMatrix) -> "SeriesMatrix":
        field = field_from_spec(field)
        return cls(field, [[GenFrac.monomial(field, b) for b in row] for row in B.entries])

    @property
    def shape(self):
        return self.rows, self.cols

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    def row(self, i):
        return self.entries[i]

    def column(self, j):
        return tuple(r[j] for r in self.entries)

    def submatrix(self, rows, cols) -> "SeriesMatrix":
        return SeriesMatrix(self.field, [[self.entries[i][j] for j in cols] for i in rows])

    def transpose(self) -> "SeriesMatrix":
        return SeriesMatrix(self.field, [list(c) for c in zip(*self.entries)]) if self.rows else self

    def replace(self, i, j, value) -> "SeriesMatrix":
        grid = [list(r) for r in self.entries]
        grid[i][j] = GenFrac.of(value, self.field)
        return SeriesMatrix(self.field, grid)

    def scale_monomial(self, row_shifts=None, col_shifts=None) -> "SeriesMatrix":
        """Multiply row i by t**row_shifts[i] and column j by t**col_shifts[j]."""
        rs = row_shifts or [0] * self.rows
        cs = col_shifts or [0] * self.cols
        return SeriesMatrix(
            self.field,
            [[x.shift(_frac(rs[i]) + _frac(cs[j])) for j, x in enumerate(row)]
             for i, row in enumerate(self.entries)],
        )

    def __eq__(self, other):
        return (
            isinstance(other, SeriesMatrix)
            and self.field == other.field
            and self.shape == other.shape
            and all(a == b for ra, rb in zip(self.entries, other.entries) for a, b in zip(ra, rb))
        )

    def __repr__(self):
        return f"SeriesMatrix({self.field}, {self.rows}x{self.cols})"

    def to_json(self) -> dict:
        return {
            "field": self.field.name,
            "rows": self.rows,
            "cols": self.cols,
            "entries": [[x.to_json() for x in row] for row in self.entries],
        }

    @classmethod
    def from_json(cls, data) -> "SeriesMatrix":
        f = field_from_spec(data["field"])
        m = cls(f, [[GenFrac.from_json(f, x) for x in row] for row in data["entries"]])
        if m.rows != data.get("rows", m.rows) or (m.rows and m.cols != data.get("cols", m.cols)):
            raise SeriesError("declared shape does not match entries")
        return m


def mat_det(M: SeriesMatrix) -> GenFrac:
    """Determinant by cofactor expansion, memoized over column subsets."""
    if M.rows != M.cols:
        raise SeriesError(f"determinant of a non-square {M.rows}x{M.cols} matrix")
    n = M.rows
    f = M.field
    if n == 0:
        return GenFrac.of(1, f)
    memo: dict = {}

    def minor(r: int, cols: tuple) -> GenFrac:
        # determinant of rows r.. against the given columns
        if r == n:
            return GenFrac.of(1, f)
        key = cols
        if key in memo:
            return memo[key]
        total = GenFrac.of(0, f)
        for k, c in enumerate(cols):
            a = M.entries[r][c]
            if a.is_zero():
                continue
            sub = minor(r + 1, cols[:k] + cols[k + 1:])
            if sub.is_zero():
                continue
            term = a * sub
            total = total - term if k % 2 else total + term
        memo[key] = total
        return total

    return minor(0, tuple(range(n)))


def _cleared_columns(M: SeriesMatrix) -> list[list[GenPoly]]:
    """Scale each column by its distinct denominators; rank is unchanged."""
    f = M.field
    grid = [[None] * M.cols for _ in range(M.rows)]
    for j in range(M.cols):
        col = M.column(j)
        dens = []
        for x in col:
            if not x.is_poly() and not any(d == x.den for d in dens):
                dens.append(x.den)
        for i, x in enumerate(col):
            p = x.num
            skipped = False
            for d in dens:
                if not skipped and d == x.den:
                    skipped = True
                    continue
                p = p * d
            if not x.is_poly() and not skipped:
                raise AssertionError("denominator bookkeeping")
            grid[i][j] = p
    return grid


def bareiss_rank(grid: list[list[GenPoly]], field: Field) -> int:
    """Rank of a GenPoly matrix by fraction-free elimination.

    Full pivoting picks the nonzero entry of least degree (first in row-major
    order on ties).
    """
    a = [list(r) for r in grid]
    m = len(a)
    n = len(a[0]) if m else 0
    prev = GenPoly.one(field)
    rank = 0
    for k in range(min(m, n)):
        best = None
        for i in range(k, m):
            for j in range(k, n):
                x = a[i][j]
                if x.terms and (best is None or x.terms[0][0] < best[0]):
                    best = (x.terms[0][0], i, j)
        if best is None:
            break
        _, pi, pj = best
        a[k], a[pi] = a[pi], a[k]
        if pj != k:
            for row in a:
                row[k], row[pj] = row[pj], row[k]
        piv = a[k][k]
        for i in range(k + 1, m):
            aik = a[i][k]
            for j in range(k + 1, n):
                v = piv * a[i][j]
                if aik.terms and a[k][j].terms:
                    v = v - aik * a[k][j]
                a[i][j] = v.divexact(prev) if v.terms else v
            a[i][k] = GenPoly.zero(field)
        prev = piv
        rank += 1
    return rank


def mat_rank(M: SeriesMatrix) -> int:
    if M.rows == 0 or M.cols == 0:
        return 0
    return bareiss_rank(_cleared_columns(M), M.field)


def rank_by_minors(M: SeriesMatrix) -> int:
    """Largest k with a nonzero k-by-k minor (brute force, for small sizes)."""
    from itertools import combinations

    for k in range(min(M.rows, M.cols), 0, -1):
        for rows in combinations(range(M.rows), k):
            for cols in combinations(range(M.cols), k):
                if not mat_det(M.submatrix(rows, cols)).is_zero():
                    return k
    return 0


def deg_matrix(M: SeriesMatrix) -> TropMatrix:
    out = []
    for i, row in enumerate(M.entries):
        line = []
        for j, x in enumerate(row):
            if x.is_zero():
                raise SeriesError(f"entry ({i + 1},{j + 1}) is zero; degree matrix undefined")
            line.append(x.deg())
        out.append(line)
    return TropMatrix(out, cols=M.cols)


@dataclass
class LiftCheck:
    """Outcome of :func:`verify_lift`; truthy iff every obligation holds."""

    ok: bool
    rank: int | None
    bound: int
    degree_mismatches: list = dc_field(default_factory=list)
    zero_entries: list = dc_field(default_factory=list)
    shape_ok: bool = True

    def __bool__(self):
        return self.ok

    def first_failure(self) -> str | None:
        if not self.shape_ok:
            return "shape mismatch"
        if self.zero_entries:
            i, j = self.zero_entries[0]
            return f"entry ({i + 1},{j + 1}) is zero"
        if self.degree_mismatches:
            i, j, got, want = self.degree_mismatches[0]
            return f"degree mismatch at ({i + 1},{j + 1}): deg={got}, expected {want}"
        if self.rank is not None and self.rank > self.bound:
            return f"rank {self.rank} exceeds bound {self.bound}"
        return None


def verify_lift(M: SeriesMatrix, B: TropMatrix, r: int) -> LiftCheck:
    """Check ``deg M == B`` entrywise and ``rank M <= r``."""
    if M.shape != B.shape:
        return LiftCheck(False, None, r, shape_ok=False)
    mismatches, zeros = [], []
    for i in range(B.rows):
        for j in range(B.cols):
            x = M.entries[i][j]
            if x.is_zero():
                zeros.append((i, j))
            elif x.deg() != B.entries[i][j]:
                mismatches.append((i, j, x.deg(), B.entries[i][j]))
    rank = mat_rank(M)
    ok = not mismatches and not zeros and rank <= r
    return LiftCheck(ok, rank, r, mismatches, zeros)


def poly_sum(field, items: Iterable):
    return reduce(lambda a, b: a + b, items, GenFrac.of(0, field))
