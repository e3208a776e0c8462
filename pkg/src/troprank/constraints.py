"""Difference-constraint systems ``x[u] - x[v] <= w`` over exact rationals.

Weights are pairs ``(c, k)`` read as ``c + k*eps`` for an infinitesimal
``eps > 0`` and compared lexicographically, so a strict inequality
``x[u] - x[v] < c`` is the weight ``(c, -1)``.  Feasibility is negative-cycle
detection (Bellman-Ford); solutions are materialized with a concrete rational
``eps`` small enough to honour every constraint.
"""

from __future__ import annotations

from fractions import Fraction

ZERO = (Fraction(0), Fraction(0))


def _add(a, b):
    return (a[0] + b[0], a[1] + b[1])


def nonstrict(c) -> tuple:
    return (Fraction(c), Fraction(0))


def strict(c) -> tuple:
    return (Fraction(c), Fraction(-1))


def shortest_from(n: int, edges, source=None):
    """Bellman-Ford distances; ``source=None`` means a virtual source at 0.

    ``edges`` holds ``(v, u, w)`` arcs for ``x[u] <= x[v] + w``.  Returns
    ``None`` on a negative cycle; unreachable nodes get ``None`` distance.
    """
    if source is None:
        dist = [ZERO] * n
    else:
        dist = [None] * n
        dist[source] = ZERO
    if not edges:
        return dist
    for _ in range(n):
        changed = False
        for v, u, w in edges:
            dv = dist[v]
            if dv is None:
                continue
            cand = (dv[0] + w[0], dv[1] + w[1])
            du = dist[u]
            if du is None or cand < du:
                dist[u] = cand
                changed = True
        if not changed:
            return dist
    return None


def _arcs(constraints):
    # x[u] - x[v] <= w  is the arc v -> u of weight w
    return [(v, u, w) for u, v, w in constraints]


def feasible(n: int, constraints) -> bool:
    return shortest_from(n, _arcs(constraints)) is not None


def _closure(n: int, constraints):
    """All-pairs shortest paths (Floyd-Warshall); ``None`` on a negative cycle."""
    D = [[None] * n for _ in range(n)]
    for a in range(n):
        D[a][a] = ZERO
    for u, v, w in constraints:
        if D[v][u] is None or w < D[v][u]:
            D[v][u] = w
    for k in range(n):
        Dk = D[k]
        for a in range(n):
            dak = D[a][k]
            if dak is None:
                continue
            Da = D[a]
            for b in range(n):
                dkb = Dk[b]
                if dkb is None:
                    continue
                c = (dak[0] + dkb[0], dak[1] + dkb[1])
                if Da[b] is None or c < Da[b]:
                    Da[b] = c
    if any(D[a][a] < ZERO for a in range(n)):
        return None
    return D


def _add_edge(D, v, u, w):
    n = len(D)
    col = [D[a][v] for a in range(n)]
    row = D[u][:]
    for a in range(n):
        if col[a] is None:
            continue
        for b in range(n):
            if row[b] is None:
                continue
            c = (col[a][0] + w[0] + row[b][0], col[a][1] + w[1] + row[b][1])
            if D[a][b] is None or c < D[a][b]:
                D[a][b] = c


def solve(n: int, constraints, interior: bool = True):
    """A feasible point as a list of Fractions (least entry 0), or ``None``.

    With ``interior`` the variables are fixed one at a time (index order) at
    the midpoint of their remaining feasible interval, stepping one unit past
    a finite end when the other end is open; otherwise Bellman-Ford
    potentials are returned.
    """
    if n == 0:
        return [] if feasible(0, constraints) else None
    if not interior:
        base = shortest_from(n, _arcs(constraints))
        return None if base is None else materialize(base, constraints)
    D = _closure(n, constraints)
    if D is None:
        return None
    one = (Fraction(1), Fraction(0))
    point = [ZERO] * n
    for i in range(1, n):
        hi = D[0][i]
        lo = None if D[i][0] is None else (-D[i][0][0], -D[i][0][1])
        if hi is not None and lo is not None:
            val = ((lo[0] + hi[0]) / 2, (lo[1] + hi[1]) / 2)
        elif lo is not None:
            val = _add(lo, one)
        elif hi is not None:
            val = (hi[0] - 1, hi[1])
        else:
            val = ZERO
        point[i] = val
        _add_edge(D, 0, i, val)
        _add_edge(D, i, 0, (-val[0], -val[1]))
    return materialize(point, constraints)


def materialize(point, constraints) -> list[Fraction]:
    """Replace ``eps`` by a positive rational satisfying every constraint."""
    bound = Fraction(1)
    for u, v, (c, k) in constraints:
        a = point[u][0] - point[v][0]
        b = point[u][1] - point[v][1]
        if a < c and b > k:
            bound = min(bound, (c - a) / (b - k))
    eps = bound / 2
    values = [p[0] + p[1] * eps for p in point]
    shift = min(values) if values else 0
    return [x - shift for x in values]
