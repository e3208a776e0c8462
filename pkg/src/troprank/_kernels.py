"""Integer inner loops, jitted with numba when available.

Hot paths:

* tropical permanents of many small square submatrices of an integer matrix
  (minimum over all permutations plus the number of minimizers);
* the leading-coefficient obstruction search over a finite field encoded as
  integers ``0..q-1`` with add/mul lookup tables (plain enumeration and a
  pruned depth-first search);
* incremental shortest-path closure for integer difference constraints.

Each has a numpy (or plain Python) twin.  ``TROPRANK_NUMBA=0`` in the environment forces
the numpy path; otherwise numba is used if it imports.  The active backend is
``BACKEND``; :func:`set_backend` switches it at runtime (benchmarks, tests).
"""

from __future__ import annotations

import itertools
import os
from functools import lru_cache

import numpy as np

try:  # pragma: no cover - depends on the environment
    import numba

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    numba = None
    HAVE_NUMBA = False

INT64_SAFE = 2**62


def _env_backend() -> str:
    flag = os.environ.get("TROPRANK_NUMBA", "1").strip().lower()
    if flag in ("0", "false", "no", "off") or not HAVE_NUMBA:
        return "numpy"
    return "numba"


BACKEND = _env_backend()


def set_backend(name: str) -> str:
    """Select ``"numba"`` or ``"numpy"``; returns the previous backend."""
    global BACKEND
    if name not in ("numba", "numpy"):
        raise ValueError(name)
    if name == "numba" and not HAVE_NUMBA:
        raise RuntimeError("numba is not installed")
    prev, BACKEND = BACKEND, name
    return prev


@lru_cache(maxsize=None)
def perm_table(k: int) -> np.ndarray:
    """All permutations of ``range(k)`` in lexicographic order, shape (k!, k)."""
    if k == 0:
        return np.zeros((1, 0), dtype=np.int64)
    return np.array(list(itertools.permutations(range(k))), dtype=np.int64)


@lru_cache(maxsize=None)
def perm_signs(k: int) -> np.ndarray:
    out = []
    for p in perm_table(k):
        inv = sum(1 for a in range(k) for b in range(a + 1, k) if p[a] > p[b])
        out.append(-1 if inv % 2 else 1)
    return np.array(out, dtype=np.int64)


# ---------------------------------------------------------------------------
# tropical permanents of a batch of submatrices


def _perm_stats_numpy(M, row_sets, col_sets, perms):
    # values[s, p] = sum_i M[row_sets[s, i], col_sets[s, perms[p, i]]]
    cols = col_sets[:, perms]  # (s, k!, k)
    rows = np.broadcast_to(row_sets[:, None, :], cols.shape)
    values = M[rows, cols].sum(axis=2)
    mins = values.min(axis=1)
    counts = (values == mins[:, None]).sum(axis=1)
    return mins, counts


if HAVE_NUMBA:

    @numba.njit(cache=True)
    def _perm_stats_numba(M, row_sets, col_sets, perms):  # pragma: no cover - jitted
        s, k = row_sets.shape
        nperm = perms.shape[0]
        mins = np.empty(s, dtype=np.int64)
        counts = np.empty(s, dtype=np.int64)
        for t in range(s):
            best = np.int64(0)
            cnt = 0
            for p in range(nperm):
                v = np.int64(0)
                for i in range(k):
                    v += M[row_sets[t, i], col_sets[t, perms[p, i]]]
                if p == 0 or v < best:
                    best = v
                    cnt = 1
                elif v == best:
                    cnt += 1
            mins[t] = best
            counts[t] = cnt
        return mins, counts

    @numba.njit(cache=True)
    def _any_nonsingular_numba(M, row_sets, col_sets, perms):  # pragma: no cover - jitted
        s, k = row_sets.shape
        nperm = perms.shape[0]
        for t in range(s):
            best = np.int64(0)
            cnt = 0
            for p in range(nperm):
                v = np.int64(0)
                for i in range(k):
                    v += M[row_sets[t, i], col_sets[t, perms[p, i]]]
                if p == 0 or v < best:
                    best = v
                    cnt = 1
                elif v == best:
                    cnt += 1
            if cnt == 1:
                return t
        return -1


def perm_stats(M: np.ndarray, row_sets: np.ndarray, col_sets: np.ndarray):
    """Tropical permanent value and minimizer count for each submatrix.

    ``M`` is an integer matrix (int64, or object for big integers);
    ``row_sets``/``col_sets`` have shape ``(s, k)``.
    """
    k = row_sets.shape[1]
    perms = perm_table(k)
    if BACKEND == "numba" and M.dtype == np.int64:
        return _perm_stats_numba(M, row_sets, col_sets, perms)
    return _perm_stats_numpy(M, row_sets, col_sets, perms)


def first_nonsingular(M: np.ndarray, row_sets: np.ndarray, col_sets: np.ndarray) -> int:
    """Index of the first submatrix with a unique minimizer, or -1."""
    if len(row_sets) == 0:
        return -1
    if BACKEND == "numba" and M.dtype == np.int64:
        return int(_any_nonsingular_numba(M, row_sets, col_sets, perm_table(row_sets.shape[1])))
    _, counts = perm_stats(M, row_sets, col_sets)
    hits = np.flatnonzero(counts == 1)
    return int(hits[0]) if len(hits) else -1


# ---------------------------------------------------------------------------
# leading-coefficient obstruction search
#
# An assignment gives every free matrix position a unit (index into `units`).
# For each constraint c (a tropically singular minor) the first-order
# coefficient is  sum_a sign[c,a] * prod_i value(pos[c,a,i]);  the assignment
# survives iff every coefficient is zero.  Gauge positions hold `one`.
# Assignments are enumerated as a mixed-radix counter, free position 0 most
# significant (lexicographic order of digit tuples).


def _decode(index, nfree, radix):
    digits = np.empty(nfree, dtype=np.int64)
    for f in range(nfree - 1, -1, -1):
        digits[f] = index % radix
        index //= radix
    return digits


def _obstruction_numpy(
    start, stop, nfree, free_pos, npos, one, units, pos, sign, nach, addt, mult, chunk=1 << 14
):
    radix = len(units)
    ncons, maxach, k = pos.shape
    for lo in range(start, stop, chunk):
        hi = min(stop, lo + chunk)
        idx = np.arange(lo, hi, dtype=np.int64)
        vals = np.full((hi - lo, npos), one, dtype=np.int64)
        rest = idx.copy()
        for f in range(nfree - 1, -1, -1):
            vals[:, free_pos[f]] = units[rest % radix]
            rest //= radix
        alive = np.ones(hi - lo, dtype=bool)
        for c in range(ncons):
            acc = np.zeros(hi - lo, dtype=np.int64)
            for a in range(nach[c]):
                prod = np.full(hi - lo, sign[c, a], dtype=np.int64)
                for i in range(k):
                    prod = mult[prod, vals[:, pos[c, a, i]]]
                acc = addt[acc, prod]
            alive &= acc == 0
            if not alive.any():
                break
        hits = np.flatnonzero(alive)
        if len(hits):
            return int(idx[hits[0]])
    return -1


if HAVE_NUMBA:

    @numba.njit(cache=True)
    def _obstruction_numba(
        start, stop, nfree, free_pos, npos, one, units, pos, sign, nach, addt, mult
    ):  # pragma: no cover - jitted
        radix = units.shape[0]
        ncons = pos.shape[0]
        k = pos.shape[2]
        vals = np.full(npos, one, dtype=np.int64)
        digits = np.zeros(nfree, dtype=np.int64)
        rest = start
        for f in range(nfree - 1, -1, -1):
            digits[f] = rest % radix
            rest //= radix
        for f in range(nfree):
            vals[free_pos[f]] = units[digits[f]]
        for index in range(start, stop):
            ok = True
            for c in range(ncons):
                acc = 0
                for a in range(nach[c]):
                    prod = sign[c, a]
                    for i in range(k):
                        prod = mult[prod, vals[pos[c, a, i]]]
                    acc = addt[acc, prod]
                if acc != 0:
                    ok = False
                    break
            if ok:
                return index
            # increment the counter
            f = nfree - 1
            while f >= 0:
                digits[f] += 1
                if digits[f] < radix:
                    vals[free_pos[f]] = units[digits[f]]
                    break
                digits[f] = 0
                vals[free_pos[f]] = units[0]
                f -= 1
        return -1


def obstruction_search(start, stop, nfree, free_pos, npos, one, units, pos, sign, nach, addt, mult):
    """First surviving assignment index in ``[start, stop)``, or -1."""
    args = (
        np.int64(start),
        np.int64(stop),
        np.int64(nfree),
        np.ascontiguousarray(free_pos, dtype=np.int64),
        np.int64(npos),
        np.int64(one),
        np.ascontiguousarray(units, dtype=np.int64),
        np.ascontiguousarray(pos, dtype=np.int64),
        np.ascontiguousarray(sign, dtype=np.int64),
        np.ascontiguousarray(nach, dtype=np.int64),
        np.ascontiguousarray(addt, dtype=np.int64),
        np.ascontiguousarray(mult, dtype=np.int64),
    )
    if BACKEND == "numba":
        return int(_obstruction_numba(*args))
    return _obstruction_numpy(*args)


def decode_assignment(index: int, nfree: int, radix: int) -> list[int]:
    digits = []
    for _ in range(nfree):
        index, d = divmod(int(index), radix)
        digits.append(d)
    return digits[::-1]


def encode_assignment(digits, radix: int) -> int:
    index = 0
    for d in digits:
        index = index * radix + int(d)
    return index


# Depth-first variant: free positions are assigned in order and every
# constraint is checked as soon as its last free position is set
# (``level_start[d]:level_start[d+1]`` are the constraints completed at depth
# ``d``).  The first leaf reached is the least surviving counter index.
# ``prefix`` pins the leading digits (used to partition work); ``budget``
# caps the number of nodes visited.  Returns (status, nodes, digits) with
# status 1 = found, 0 = exhausted, 2 = budget hit.


def _obstruction_dfs(
    nfree, radix, prefix, vals, free_pos, units, level_start, pos, sign, nach, addt, mult, budget
):
    k = pos.shape[2]
    p = prefix.shape[0]
    digits = np.full(nfree, -1, dtype=np.int64)
    nodes = 0
    d = 0
    while d >= 0:
        if d < p:
            if digits[d] == -1:
                digits[d] = prefix[d]
            else:
                digits[d] = -1
                d -= 1
                continue
        else:
            digits[d] += 1
            if digits[d] == radix:
                digits[d] = -1
                d -= 1
                continue
        nodes += 1
        if nodes > budget:
            return 2, nodes, digits
        vals[free_pos[d]] = units[digits[d]]
        ok = True
        for c in range(level_start[d], level_start[d + 1]):
            acc = 0
            for a in range(nach[c]):
                prod = sign[c, a]
                for i in range(k):
                    prod = mult[prod, vals[pos[c, a, i]]]
                acc = addt[acc, prod]
            if acc != 0:
                ok = False
                break
        if ok:
            if d == nfree - 1:
                return 1, nodes, digits
            d += 1
    return 0, nodes, digits


_obstruction_dfs_numba = numba.njit(cache=True)(_obstruction_dfs) if HAVE_NUMBA else None


def obstruction_dfs(nfree, radix, prefix, vals, free_pos, units, level_start, pos, sign, nach, addt, mult, budget):
    """Pruned depth-first search; see the comment above for the contract."""
    args = (
        np.int64(nfree),
        np.int64(radix),
        np.ascontiguousarray(prefix, dtype=np.int64),
        np.array(vals, dtype=np.int64),
        np.ascontiguousarray(free_pos, dtype=np.int64),
        np.ascontiguousarray(units, dtype=np.int64),
        np.ascontiguousarray(level_start, dtype=np.int64),
        np.ascontiguousarray(pos, dtype=np.int64),
        np.ascontiguousarray(sign, dtype=np.int64),
        np.ascontiguousarray(nach, dtype=np.int64),
        np.ascontiguousarray(addt, dtype=np.int64),
        np.ascontiguousarray(mult, dtype=np.int64),
        np.int64(budget),
    )
    fn = _obstruction_dfs_numba if BACKEND == "numba" else _obstruction_dfs
    status, nodes, digits = fn(*args)
    return int(status), int(nodes), [int(x) for x in digits]


# ---------------------------------------------------------------------------
# incremental shortest-path closure for difference constraints
#
# D[a, b] bounds x[b] - x[a]; BIG marks "no bound".  A constraint row
# (u, v, w) means x[u] - x[v] <= w.  Weights are integers (callers encode
# strictness in the low digit), so the closure is exact.

BIG = np.int64(1) << np.int64(60)


def _closure_add_numpy(D, cons):
    D = D.copy()
    for u, v, w in cons:
        if D[u, v] < BIG and D[u, v] + w < 0:
            return None
        col = D[:, v]
        row = D[u, :]
        ok = (col < BIG)[:, None] & (row < BIG)[None, :]
        cand = np.where(ok, col[:, None] + w + row[None, :], BIG)
        np.minimum(D, cand, out=D)
    return D


if HAVE_NUMBA:

    @numba.njit(cache=True)
    def _closure_add_numba(D, cons):  # pragma: no cover - jitted
        n = D.shape[0]
        out = D.copy()
        col = np.empty(n, dtype=np.int64)
        row = np.empty(n, dtype=np.int64)
        for t in range(cons.shape[0]):
            u, v, w = cons[t, 0], cons[t, 1], cons[t, 2]
            if out[u, v] < BIG and out[u, v] + w < 0:
                return out, False
            for a in range(n):
                col[a] = out[a, v]
                row[a] = out[u, a]
            for a in range(n):
                if col[a] >= BIG:
                    continue
                for b in range(n):
                    if row[b] >= BIG:
                        continue
                    c = col[a] + w + row[b]
                    if c < out[a, b]:
                        out[a, b] = c
        return out, True


def closure_init(n: int) -> np.ndarray:
    D = np.full((n, n), BIG, dtype=np.int64)
    np.fill_diagonal(D, 0)
    return D


def closure_add(D: np.ndarray, cons: np.ndarray):
    """Closure with the extra constraints, or ``None`` if they are infeasible."""
    if BACKEND == "numba":
        out, ok = _closure_add_numba(D, cons)
        return out if ok else None
    return _closure_add_numpy(D, cons)
