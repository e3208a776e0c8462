"""Min-plus matrix computations over exact rationals.

Tropical addition is ``min`` and multiplication is ``+``.  The tropical
permanent of a square matrix is the least assignment value; a matrix is
tropically singular when that least value is attained by two or more
permutations.  Tropical rank is the size of the largest tropically
non-singular square submatrix.

Row dependence is certified by a *witness* ``lam``: for every column ``j`` the
minimum of ``lam[i] + B[i, j]`` over the chosen rows is attained at least
twice.  Witnesses are found by enumerating tie patterns (one tied pair per
column) and solving the resulting difference constraints.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from itertools import combinations, permutations
from typing import Iterable, Sequence

import numpy as np

from . import _kernels
from . import constraints as dc
from .scalars import format_rational, parse_rational

INF = math.inf
DEFAULT_CAP = 8


class TropSizeError(ValueError):
    """Permutation enumeration would exceed the configured size cap."""


class TropMatrix:
    """Immutable ``m x n`` matrix of finite rationals."""

    __slots__ = ("entries", "rows", "cols", "_ints")

    def __init__(self, entries: Iterable[Iterable], cols: int | None = None):
        grid = tuple(tuple(parse_rational(x) for x in row) for row in entries)
        widths = {len(r) for r in grid}
        if len(widths) > 1:
            raise ValueError("ragged matrix")
        self.entries = grid
        self.rows = len(grid)
        self.cols = widths.pop() if widths else (cols or 0)
        if cols is not None and cols != self.cols:
            raise ValueError(f"declared {cols} columns, found {self.cols}")
        self._ints = None

    @classmethod
    def zeros(cls, m: int, n: int) -> "TropMatrix":
        return cls([[0] * n for _ in range(m)], cols=n)

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

    def submatrix(self, rows: Sequence[int], cols: Sequence[int] | None = None) -> "TropMatrix":
        cols = range(self.cols) if cols is None else cols
        cols = list(cols)
        return TropMatrix([[self.entries[i][j] for j in cols] for i in rows], cols=len(cols))

    def transpose(self) -> "TropMatrix":
        return TropMatrix([list(c) for c in zip(*self.entries)] if self.cols else [], cols=self.rows)

    def permute(self, row_order: Sequence[int], col_order: Sequence[int] | None = None) -> "TropMatrix":
        """New matrix whose row ``k`` is old row ``row_order[k]`` (same for columns)."""
        return self.submatrix(row_order, col_order)

    def with_columns(self, cols) -> "TropMatrix":
        return self.submatrix(range(self.rows), cols)

    def __eq__(self, other):
        return isinstance(other, TropMatrix) and self.shape == other.shape and self.entries == other.entries

    def __hash__(self):
        return hash(self.entries)

    def __repr__(self):
        body = "; ".join(" ".join(format_rational(x) for x in r) for r in self.entries)
        return f"TropMatrix([{body}])"

    def min_entry(self):
        return min((x for r in self.entries for x in r), default=None)

    def as_integers(self):
        """``(M, scale)`` with ``M = scale * self`` as an integer array.

        ``M`` is int64 when magnitudes allow exact sums of up to
        ``min(m, n)`` entries, otherwise an object array of Python ints.
        """
        if self._ints is None:
            den = reduce(math.lcm, (x.denominator for r in self.entries for x in r), 1)
            ints = [[x.numerator * (den // x.denominator) for x in r] for r in self.entries]
            big = max((abs(v) for r in ints for v in r), default=0)
            k = max(1, min(self.rows, self.cols))
            dtype = np.int64 if big * k < _kernels.INT64_SAFE else object
            arr = np.array(ints, dtype=dtype).reshape(self.rows, self.cols)
            self._ints = (arr, den)
        return self._ints

    def to_json(self) -> dict:
        return {
            "rows": self.rows,
            "cols": self.cols,
            "entries": [[format_rational(x) for x in r] for r in self.entries],
        }


def trop_add(a, b):
    return min(a, b)


def trop_mul(a, b):
    return a + b


def min_plus_product(A: TropMatrix, B: TropMatrix) -> TropMatrix:
    if A.cols != B.rows:
        raise ValueError("inner dimensions differ")
    return TropMatrix(
        [[min(A[i, k] + B[k, j] for k in range(A.cols)) for j in range(B.cols)] for i in range(A.rows)],
        cols=B.cols,
    )


@dataclass(frozen=True)
class PermResult:
    value: Fraction
    count: int
    achievers: tuple  # permutations as tuples sigma with sigma[i] = column of row i

    @property
    def singular(self) -> bool:
        return self.count >= 2


def _check_square(B: TropMatrix, cap: int):
    if B.rows != B.cols:
        raise ValueError(f"{B.rows}x{B.cols} matrix is not square")
    if B.rows > cap:
        raise TropSizeError(f"permanent of size {B.rows} exceeds cap {cap}")


def trop_perm(B: TropMatrix, cap: int = DEFAULT_CAP) -> PermResult:
    """Tropical permanent with the full set of minimizing permutations."""
    _check_square(B, cap)
    n = B.rows
    M, den = B.as_integers()
    perms = _kernels.perm_table(n)
    if n == 0:
        return PermResult(Fraction(0), 1, ((),))
    values = M[np.arange(n)[None, :], perms].sum(axis=1)
    best = values.min()
    hits = np.flatnonzero(values == best)
    return PermResult(
        Fraction(int(best), den),
        len(hits),
        tuple(tuple(int(c) for c in perms[h]) for h in hits),
    )


def is_trop_singular(B: TropMatrix, cap: int = DEFAULT_CAP) -> bool:
    return trop_perm(B, cap).count >= 2


def _subset_arrays(m: int, n: int, k: int):
    rs = list(combinations(range(m), k))
    cs = list(combinations(range(n), k))
    row_sets = np.array([r for r in rs for _ in cs], dtype=np.int64).reshape(-1, k)
    col_sets = np.array([c for _ in rs for c in cs], dtype=np.int64).reshape(-1, k)
    return row_sets, col_sets


def submatrix_stats(B: TropMatrix, k: int, cap: int = DEFAULT_CAP):
    """``(row_sets, col_sets, values, counts)`` for every ``k x k`` submatrix."""
    if k > cap:
        raise TropSizeError(f"submatrix size {k} exceeds cap {cap}")
    M, den = B.as_integers()
    row_sets, col_sets = _subset_arrays(B.rows, B.cols, k)
    if len(row_sets) == 0:
        return row_sets, col_sets, [], np.zeros(0, dtype=np.int64)
    mins, counts = _kernels.perm_stats(M, row_sets, col_sets)
    values = [Fraction(int(v), den) for v in mins]
    return row_sets, col_sets, values, np.asarray(counts)


def nonsingular_submatrix(B: TropMatrix, k: int, cap: int = DEFAULT_CAP):
    """Row and column indices of the first non-singular ``k x k`` submatrix, or None."""
    if k > cap:
        raise TropSizeError(f"submatrix size {k} exceeds cap {cap}")
    if k > min(B.rows, B.cols):
        return None
    if k == 0:
        return (), ()
    M, _ = B.as_integers()
    row_sets, col_sets = _subset_arrays(B.rows, B.cols, k)
    t = _kernels.first_nonsingular(M, row_sets, col_sets)
    if t < 0:
        return None
    return tuple(int(i) for i in row_sets[t]), tuple(int(j) for j in col_sets[t])


def trop_rank(B: TropMatrix, cap: int = DEFAULT_CAP) -> int:
    """Largest ``r`` with a tropically non-singular ``r x r`` submatrix."""
    top = min(B.rows, B.cols)
    if top > cap:
        raise TropSizeError(f"tropical rank of a {B.rows}x{B.cols} matrix exceeds cap {cap}")
    for k in range(top, 0, -1):
        if nonsingular_submatrix(B, k, cap) is not None:
            return k
    return 0


def trop_rank_bruteforce(B: TropMatrix) -> int:
    """Reference tropical rank straight from the definition (slow; tests only)."""
    for k in range(min(B.rows, B.cols), 0, -1):
        for rows in combinations(range(B.rows), k):
            for cols in combinations(range(B.cols), k):
                # reverse-lexicographic enumeration order, independent of perm_table
                sums = [sum(B[rows[i], cols[p[i]]] for i in range(k)) for p in reversed(list(permutations(range(k))))]
                if sums.count(min(sums)) == 1:
                    return k
    return 0


def theta(lam: Sequence, col: Sequence) -> frozenset:
    """Indices attaining ``min(lam[i] + col[i])``; infinite ``lam`` entries never do."""
    if len(lam) != len(col):
        raise ValueError("length mismatch")
    vals = [(l + c) if l != INF else INF for l, c in zip(lam, col)]
    best = min(vals, default=INF)
    if best == INF:
        raise ValueError("every entry of lambda is infinite")
    return frozenset(i for i, v in enumerate(vals) if v == best)


def scale(B: TropMatrix, row_offsets=None, col_offsets=None) -> TropMatrix:
    """``B[i, j] + row_offsets[i] + col_offsets[j]``."""
    ro = [parse_rational(x) for x in (row_offsets if row_offsets is not None else [0] * B.rows)]
    co = [parse_rational(x) for x in (col_offsets if col_offsets is not None else [0] * B.cols)]
    if len(ro) != B.rows or len(co) != B.cols:
        raise ValueError("offset lengths do not match the matrix")
    return TropMatrix(
        [[B[i, j] + ro[i] + co[j] for j in range(B.cols)] for i in range(B.rows)], cols=B.cols
    )


# ---------------------------------------------------------------------------
# tropical dependence witnesses


@dataclass(frozen=True)
class Witness:
    row_set: tuple
    lam: tuple  # length m; INF off row_set

    def to_json(self) -> dict:
        return {
            "rowSet": list(self.row_set),
            "lambda": [None if x == INF else format_rational(x) for x in self.lam],
        }


def is_witness(B: TropMatrix, lam: Sequence) -> bool:
    return all(len(theta(lam, B.column(j))) >= 2 for j in range(B.cols))


def _column_constraints(B, j, pair, rows, index):
    """Rows of ``pair`` tie at the column minimum (non-strict elsewhere)."""
    i, k = pair
    bi, bk = B[i, j], B[k, j]
    out = [
        (index[i], index[k], dc.nonstrict(bk - bi)),
        (index[k], index[i], dc.nonstrict(bi - bk)),
    ]
    for l in rows:
        if l != i and l != k:
            out.append((index[i], index[l], dc.nonstrict(B[l, j] - bi)))
    return out


def _subset_constraints(B, j, S, rows, index):
    """Exactly the rows of ``S`` attain column ``j``'s minimum."""
    first = S[0]
    b0 = B[first, j]
    out = []
    for s in S[1:]:
        bs = B[s, j]
        out.append((index[first], index[s], dc.nonstrict(bs - b0)))
        out.append((index[s], index[first], dc.nonstrict(b0 - bs)))
    for l in rows:
        if l not in S:
            out.append((index[first], index[l], dc.strict(B[l, j] - b0)))
    return out


# Integer encoding of (c, k) weights: c * scale * _EPS_BASE + k.  Exact as
# long as |sum of k| along any simple cycle stays below _EPS_BASE, i.e. for
# fewer than _EPS_BASE variables.
_EPS_BASE = 64


def _encoder(B: TropMatrix, n: int):
    if n >= _EPS_BASE:
        return None
    M, den = B.as_integers()
    if M.dtype != np.int64:
        return None
    big = int(np.abs(M).max()) if M.size else 0
    if 2 * big * _EPS_BASE * (n + 1) >= int(_kernels.BIG):
        return None

    def encode(cons):
        arr = np.empty((len(cons), 3), dtype=np.int64)
        for t, (u, v, (c, k)) in enumerate(cons):
            arr[t] = (u, v, int(c * den) * _EPS_BASE + int(k))
        return arr

    return encode


def _dfs_patterns(n, options, encode, on_leaf):
    """Depth-first over one option per column, pruning infeasible prefixes.

    ``options[j]`` lists ``(label, constraints)``.  ``on_leaf(labels, cons)``
    is called for every feasible full choice and returns True to stop.
    """
    ncols = len(options)
    labels: list = [None] * ncols
    if encode is not None:
        coded = [[encode(c) for _, c in opts] for opts in options]

        def rec(j, D, cons):
            if j == ncols:
                return on_leaf(labels, cons)
            for t, (label, extra) in enumerate(options[j]):
                D2 = _kernels.closure_add(D, coded[j][t])
                if D2 is None:
                    continue
                labels[j] = label
                if rec(j + 1, D2, cons + extra):
                    return True
            return False

        rec(0, _kernels.closure_init(n), [])
        return

    def rec_exact(j, cons):
        if j == ncols:
            return on_leaf(labels, cons)
        for label, extra in options[j]:
            trial = cons + extra
            if dc.feasible(n, trial):
                labels[j] = label
                if rec_exact(j + 1, trial):
                    return True
        return False

    rec_exact(0, [])


def _embed(B, rows, sol):
    lam = [INF] * B.rows
    for r, v in zip(rows, sol):
        lam[r] = v
    return tuple(lam)


def witness_feasible(pattern: Sequence[tuple], B: TropMatrix, row_set: Sequence[int]):
    """Solve the difference constraints of a tie pattern.

    ``pattern[j]`` is the pair of rows forced to attain column ``j``'s minimum.
    Returns the full-length lambda (``INF`` outside ``row_set``) or ``None``.
    """
    rows = list(row_set)
    index = {r: t for t, r in enumerate(rows)}
    cons = []
    for j, pair in enumerate(pattern):
        cons.extend(_column_constraints(B, j, pair, rows, index))
    sol = dc.solve(len(rows), cons)
    return None if sol is None else _embed(B, rows, sol)


def find_witness(B: TropMatrix, row_set: Sequence[int] | None = None):
    """Witness of tropical dependence of ``row_set`` (default: all rows), or None.

    Depth-first over columns, trying tied pairs in lexicographic order and
    pruning any prefix whose constraints are already infeasible.  The first
    complete feasible pattern wins.
    """
    rows = sorted(range(B.rows) if row_set is None else set(row_set))
    if B.cols == 0:
        return Witness(tuple(rows), _embed(B, rows, [Fraction(0)] * len(rows))) if rows else None
    if len(rows) < 2:
        return None
    index = {r: t for t, r in enumerate(rows)}
    pairs = list(combinations(rows, 2))
    options = [[(p, _column_constraints(B, j, p, rows, index)) for p in pairs] for j in range(B.cols)]
    found = []

    def leaf(labels, cons):
        found.append(dc.solve(len(rows), cons))
        return True

    _dfs_patterns(len(rows), options, _encoder(B, len(rows)), leaf)
    if not found:
        return None
    return Witness(tuple(rows), _embed(B, rows, found[0]))


# ---------------------------------------------------------------------------
# witness cells: exact argmin profiles


@dataclass(frozen=True)
class WitnessCell:
    """A witness region on which every column's argmin set is constant."""

    row_set: tuple
    profile: tuple  # per column, the frozenset of minimizing rows
    lam: tuple  # an interior point (INF off row_set)


def witness_cells(B: TropMatrix, row_set: Sequence[int], limit: int | None = None) -> list[WitnessCell]:
    """All witness cells for ``row_set``, each with an exact interior point.

    Profiles are enumerated column by column; a branch assigns the exact
    argmin set (size >= 2) with equalities inside and strict inequalities
    against the remaining rows, and is pruned as soon as it is infeasible.
    """
    rows = sorted(set(row_set))
    n = len(rows)
    out: list[WitnessCell] = []
    if n < 2 or (limit is not None and limit <= 0):
        return out
    index = {r: t for t, r in enumerate(rows)}
    subsets = [s for k in range(2, n + 1) for s in combinations(rows, k)]
    options = [
        [(frozenset(S), _subset_constraints(B, j, S, rows, index)) for S in subsets]
        for j in range(B.cols)
    ]

    def leaf(labels, cons):
        lam = _embed(B, rows, dc.solve(n, cons))
        out.append(WitnessCell(tuple(rows), tuple(labels), lam))
        return limit is not None and len(out) >= limit

    _dfs_patterns(n, options, _encoder(B, n), leaf)
    return out
