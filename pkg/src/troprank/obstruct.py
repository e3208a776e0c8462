"""Kapranov-rank lower bounds over small finite fields.

If a lift ``C`` of ``B`` had rank at most ``r``, every ``(r+1)``-minor of
``C`` would vanish.  The lowest-order coefficient of such a minor is the
signed sum, over the permutations attaining its tropical permanent, of
products of leading coefficients of ``C``.  So when *no* assignment of units
to the matrix positions kills all those sums at once, the Kapranov rank over
that field exceeds ``r``.

Scaling a row or column of ``C`` by a unit multiplies each minor by a unit,
so leading coefficients on a spanning tree of the row/column incidence graph
may be fixed to 1 (the *gauge*).  The remaining positions are enumerated as
a mixed-radix counter in row-major order; the inner loop lives in
:mod:`troprank._kernels`.

The check is first-order only: ``CERTIFIED`` is sound, ``INCONCLUSIVE``
claims nothing.
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from itertools import combinations

import numpy as np

from . import _kernels
from .scalars import Field, FieldError, field_from_spec, format_rational
from .tropical import DEFAULT_CAP, TropMatrix, TropSizeError

CERTIFIED = "CERTIFIED"
INCONCLUSIVE = "INCONCLUSIVE"
DEFAULT_BUDGET = 2**26


class ObstructionError(Exception):
    pass


class UnsupportedFieldError(ObstructionError, FieldError):
    """Certification needs a finite field."""


class BudgetError(ObstructionError):
    """The gauge-reduced search space exceeds the budget."""


class GaugeError(ObstructionError, ValueError):
    pass


def default_budget() -> int:
    text = os.environ.get("TROPRANK_BUDGET")
    return int(text) if text else DEFAULT_BUDGET


# ---------------------------------------------------------------------------
# minors


@dataclass(frozen=True)
class Minor:
    rows: tuple
    cols: tuple
    value: object  # tropical permanent
    achievers: tuple  # minimizing permutations, lexicographic
    signs: tuple  # +1 / -1 per achiever

    @property
    def singular(self) -> bool:
        return len(self.achievers) > 1

    def to_json(self) -> dict:
        return {
            "rows": list(self.rows),
            "cols": list(self.cols),
            "singular": self.singular,
            "permValue": format_rational(self.value),
            "achieverCount": len(self.achievers),
        }


def singular_minors(B: TropMatrix, k: int, cap: int = DEFAULT_CAP) -> list[Minor]:
    """Every ``k x k`` minor of ``B`` with its permanent and minimizers.

    Row subsets vary slowest; both are in lexicographic order.  Use
    :attr:`Minor.singular` to filter.
    """
    if k < 0 or k > min(B.rows, B.cols):
        raise ValueError(f"minor size {k} outside 0..{min(B.rows, B.cols)}")
    if k > cap:
        raise TropSizeError(f"minor size {k} exceeds permutation cap {cap}")
    M, den = B.as_integers()
    perms = _kernels.perm_table(k)
    signs = _kernels.perm_signs(k)
    out = []
    for rows in combinations(range(B.rows), k):
        for cols in combinations(range(B.cols), k):
            sub = M[np.ix_(rows, cols)]
            values = sub[np.arange(k), perms].sum(axis=1) if k else np.zeros(1, dtype=np.int64)
            best = values.min()
            hit = np.flatnonzero(values == best)
            out.append(
                Minor(
                    rows,
                    cols,
                    _from_scaled(best, den),
                    tuple(tuple(int(x) for x in perms[h]) for h in hit),
                    tuple(int(signs[h]) for h in hit),
                )
            )
    return out


def _from_scaled(v, den):
    return Fraction(int(v), den)


def first_order_coeff(field, achievers, lead, signs=None):
    """Lowest-order coefficient of a minor's determinant.

    ``lead[i][j]`` is the leading coefficient at minor position ``(i, j)``;
    ``achievers`` are the permutations attaining the tropical permanent.
    """
    f = field_from_spec(field)
    if not achievers:
        raise ValueError("achievers must be nonempty")
    if signs is None:
        signs = [_sign(p) for p in achievers]
    total = f.zero
    for p, s in zip(achievers, signs):
        term = f.one if s > 0 else f.neg(f.one)
        for i, j in enumerate(p):
            term = f.mul(term, lead[i][j])
        total = f.add(total, term)
    return total


def _sign(p) -> int:
    inv = sum(1 for a in range(len(p)) for b in range(a + 1, len(p)) if p[a] > p[b])
    return -1 if inv % 2 else 1


# ---------------------------------------------------------------------------
# gauge


def gauge_tree(m: int, n: int, kind: str = "cross", pivot=(0, 0)) -> tuple:
    """Positions forming a spanning tree of the ``m + n`` incidence graph.

    ``"cross"`` takes all of row ``pivot[0]`` plus column ``pivot[1]``;
    ``"staircase"`` walks ``(0,0), (0,1), (1,1), (1,2), ...`` and then
    hangs the leftover rows or columns off the last cell.
    """
    if m == 0 or n == 0:
        return ()
    if kind == "cross":
        p, q = pivot
        cells = {(p, j) for j in range(n)} | {(i, q) for i in range(m)}
    elif kind == "staircase":
        cells, i, j = {(0, 0)}, 0, 0
        while i < m - 1 or j < n - 1:
            if j < n - 1 and (j <= i or i == m - 1):
                j += 1
            else:
                i += 1
            cells.add((i, j))
    else:
        raise GaugeError(f"unknown gauge kind {kind!r}")
    return tuple(sorted(cells))


def check_gauge(m: int, n: int, cells) -> tuple:
    cells = tuple(sorted(set(map(tuple, cells))))
    want = m + n - 1 if m and n else 0
    if len(cells) != want:
        raise GaugeError(f"a spanning tree needs {want} positions, got {len(cells)}")
    parent = list(range(m + n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for i, j in cells:
        if not (0 <= i < m and 0 <= j < n):
            raise GaugeError(f"position {(i, j)} out of range")
        a, b = find(i), find(m + j)
        if a == b:
            raise GaugeError("gauge positions contain a cycle")
        parent[a] = b
    return cells


# ---------------------------------------------------------------------------
# field tables


def field_tables(f: Field):
    """``(elements, add, mul)`` with elements encoded as ``0..q-1``."""
    elems = f.elements()
    index = {e: t for t, e in enumerate(elems)}
    q = len(elems)
    add = np.empty((q, q), dtype=np.int64)
    mul = np.empty((q, q), dtype=np.int64)
    for a in range(q):
        for b in range(q):
            add[a, b] = index[f.add(elems[a], elems[b])]
            mul[a, b] = index[f.mul(elems[a], elems[b])]
    return elems, index, add, mul


# ---------------------------------------------------------------------------
# certification


@dataclass
class ObstructionReport:
    verdict: str
    r: int
    field: Field
    searched: int
    minors: list
    witness: list | None = None  # grid of field elements (INCONCLUSIVE)
    gauge: tuple = ()
    fast_path: bool = False
    space: int = 0
    notes: list = dc_field(default_factory=list)

    @property
    def certified(self) -> bool:
        return self.verdict == CERTIFIED

    def to_json(self) -> dict:
        out = {
            "verdict": self.verdict,
            "r": self.r,
            "field": self.field.name,
            "searchedCount": self.searched,
            "minors": [m.to_json() for m in self.minors],
            "gauge": [list(c) for c in self.gauge],
        }
        if self.witness is not None:
            out["witnessAssignment"] = [[self.field.format(x) for x in row] for row in self.witness]
        return out


@dataclass
class _Problem:
    free: list  # free positions in search order
    units: tuple
    radix: int
    one: int
    vals: np.ndarray  # encoded initial values (gauge cells hold one)
    free_pos: np.ndarray
    level_start: np.ndarray
    pos: np.ndarray
    sign: np.ndarray
    nach: np.ndarray
    addt: np.ndarray
    mult: np.ndarray

    @property
    def space(self) -> int:
        return self.radix ** len(self.free)

    def grid(self, digits, m, n, f):
        grid = [[f.one] * n for _ in range(m)]
        for (i, j), d in zip(self.free, digits):
            grid[i][j] = self.units[d]
        return grid


def _constraint_cells(mi) -> frozenset:
    k = len(mi.rows)
    return frozenset((mi.rows[i], mi.cols[p[i]]) for p in mi.achievers for i in range(k))


def _greedy_order(free, minors):
    """Fail-first static order: next cell completes the most constraints.

    Ties go to the cell touching the most still-open constraints, then to
    row-major order.  Cells outside every constraint end up last.
    """
    free_set = set(free)
    pending = [set(_constraint_cells(mi)) & free_set for mi in minors]
    out = []
    remaining = list(free)
    while remaining:
        best, best_key = None, None
        for c in remaining:
            completes = sum(1 for cells in pending if cells == {c})
            touches = sum(1 for cells in pending if c in cells)
            key = (-completes, -touches)
            if best_key is None or key < best_key:
                best, best_key = c, key
        out.append(best)
        remaining.remove(best)
        for cells in pending:
            cells.discard(best)
    return out


def _search_order(m, n, cells, order, minors):
    gauge_set = set(cells)
    free = [(i, j) for i in range(m) for j in range(n) if (i, j) not in gauge_set]
    if order == "row-major":
        return free
    if order == "column-major":
        return sorted(free, key=lambda c: (c[1], c[0]))
    if order == "greedy":
        return _greedy_order(free, minors)
    raise ValueError(f"unknown search order {order!r}")


def _build_problem(minors, f, m, n, free) -> _Problem:
    elems, index, addt, mult = field_tables(f)
    one, minus_one = index[f.one], index[f.neg(f.one)]
    units = f.units()
    rank_of = {c: t for t, c in enumerate(free)}
    k = len(minors[0].rows)

    def level(mi):
        return max((rank_of.get(c, 0) for c in _constraint_cells(mi)), default=0)

    ordered = sorted(minors, key=level)
    levels = [level(mi) for mi in ordered]
    nfree = max(len(free), 1)
    level_start = np.searchsorted(np.array(levels, dtype=np.int64), np.arange(nfree + 1), side="left")
    maxach = max(len(mi.achievers) for mi in ordered)
    ncons = len(ordered)
    pos = np.zeros((ncons, maxach, k), dtype=np.int64)
    sign = np.zeros((ncons, maxach), dtype=np.int64)
    nach = np.zeros(ncons, dtype=np.int64)
    for c, mi in enumerate(ordered):
        nach[c] = len(mi.achievers)
        for a, (p, s) in enumerate(zip(mi.achievers, mi.signs)):
            sign[c, a] = one if s > 0 else minus_one
            for i in range(k):
                pos[c, a, i] = mi.rows[i] * n + mi.cols[p[i]]
    return _Problem(
        free=free,
        units=units,
        radix=len(units),
        one=one,
        vals=np.full(m * n, one, dtype=np.int64),
        free_pos=np.array([i * n + j for i, j in free], dtype=np.int64),
        level_start=level_start.astype(np.int64),
        pos=pos,
        sign=sign,
        nach=nach,
        addt=addt,
        mult=mult,
    )


def _run_dfs(args):
    prob, prefix, budget = args
    return _kernels.obstruction_dfs(
        len(prob.free),
        prob.radix,
        prefix,
        prob.vals,
        prob.free_pos,
        _unit_codes(prob),
        prob.level_start,
        prob.pos,
        prob.sign,
        prob.nach,
        prob.addt,
        prob.mult,
        budget,
    )


def _unit_codes(prob):
    # elements() is (zero,) + units(), so unit u_t is encoded as t + 1
    return np.arange(1, prob.radix + 1, dtype=np.int64)


def _dfs(prob: _Problem, budget: int, jobs: int):
    """``(digits or None, nodes)``; raises BudgetError when the budget runs out."""
    tasks = [(prob, np.zeros(0, dtype=np.int64), budget)]
    if jobs > 1 and len(prob.free) > 1:
        depth = 1
        while prob.radix**depth < 4 * jobs and depth < len(prob.free) - 1:
            depth += 1
        prefixes = [_kernels.decode_assignment(t, depth, prob.radix) for t in range(prob.radix**depth)]
        tasks = [(prob, np.array(px, dtype=np.int64), budget) for px in prefixes]
    if len(tasks) == 1:
        results = [_run_dfs(tasks[0])]
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_run_dfs, tasks))
    nodes = 0
    for status, used, digits in results:
        nodes += used
        if status == 2:
            raise BudgetError(f"search visited more than {budget} nodes")
        if status == 1:
            return digits, nodes
    return None, nodes


def _enumerate(prob: _Problem, budget: int):
    if prob.space > budget:
        raise BudgetError(f"search space {prob.radix}^{len(prob.free)} = {prob.space} exceeds budget {budget}")
    # the plain counter checks constraints in any order; flatten the levels
    hit = _kernels.obstruction_search(
        0,
        prob.space,
        len(prob.free),
        prob.free_pos,
        len(prob.vals),
        prob.one,
        _unit_codes(prob),
        prob.pos,
        prob.sign,
        prob.nach,
        prob.addt,
        prob.mult,
    )
    if hit < 0:
        return None, prob.space
    return _kernels.decode_assignment(hit, len(prob.free), prob.radix), hit + 1


def certify_lower_bound(
    B: TropMatrix,
    r: int,
    f,
    budget: int | None = None,
    gauge=None,
    cap: int = DEFAULT_CAP,
    jobs: int = 1,
    method: str = "dfs",
    order: str = "greedy",
) -> ObstructionReport:
    """Try to prove that every lift of ``B`` over ``f`` has rank above ``r``.

    ``gauge`` is a spanning-tree position list or a :func:`gauge_tree` kind
    (default ``"cross"``).  ``method="dfs"`` (default) prunes partial
    assignments as soon as a minor's cells are all set, and ``budget``
    bounds the nodes it may visit; ``method="enumerate"`` walks the whole
    counter and needs ``|units| ** free <= budget``.  Either way running out
    of budget raises :class:`BudgetError`, never a verdict.  Infinite fields
    raise :class:`UnsupportedFieldError`.
    """
    f = field_from_spec(f)
    if not f.is_finite:
        raise UnsupportedFieldError(f"certification over {f.name} is not supported")
    if r < 0:
        raise ValueError("r must be nonnegative")
    budget = default_budget() if budget is None else budget
    m, n = B.shape
    k = r + 1
    if isinstance(gauge, str) or gauge is None:
        cells = gauge_tree(m, n, gauge or "cross")
    else:
        cells = check_gauge(m, n, gauge)

    minors = singular_minors(B, k, cap) if k <= min(m, n) else []
    regular = next((mi for mi in minors if not mi.singular), None)
    if regular is not None:
        return ObstructionReport(CERTIFIED, r, f, 0, [regular], gauge=cells, fast_path=True)
    if not minors:
        # no (r+1)-minors at all: every lift has rank <= r
        grid = [[f.one] * n for _ in range(m)]
        return ObstructionReport(INCONCLUSIVE, r, f, 1, [], witness=grid, gauge=cells, space=1)

    free = _search_order(m, n, cells, order, minors)
    prob = _build_problem(minors, f, m, n, free)
    if not free:
        ok = assignment_survives(B, r, f, prob.grid([], m, n, f), cap)
        digits, searched = ([], 1) if ok else (None, 1)
    elif method == "enumerate":
        digits, searched = _enumerate(prob, budget)
    elif method == "dfs":
        digits, _ = _dfs(prob, budget, jobs)
        searched = prob.space if digits is None else _kernels.encode_assignment(digits, prob.radix) + 1
    else:
        raise ValueError(f"unknown method {method!r}")
    if digits is None:
        return ObstructionReport(CERTIFIED, r, f, prob.space, minors, gauge=cells, space=prob.space)
    grid = prob.grid(digits, m, n, f)
    return ObstructionReport(INCONCLUSIVE, r, f, searched, minors, witness=grid, gauge=cells, space=prob.space)


def assignment_survives(B: TropMatrix, r: int, f, grid, cap: int = DEFAULT_CAP) -> bool:
    """Reference check: does ``grid`` annihilate every singular ``(r+1)``-minor?"""
    f = field_from_spec(f)
    k = r + 1
    for mi in singular_minors(B, k, cap):
        if not mi.singular:
            return False
        lead = [[grid[i][j] for j in mi.cols] for i in mi.rows]
        if not f.is_zero(first_order_coeff(f, mi.achievers, lead, mi.signs)):
            return False
    return True
