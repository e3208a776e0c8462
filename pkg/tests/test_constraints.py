import random
from fractions import Fraction

import pytest

from troprank import constraints as dc


def satisfied(x, cons):
    for u, v, (c, k) in cons:
        d = x[u] - x[v]
        if k < 0 and not d < c:
            return False
        if k >= 0 and not d <= c:
            return False
    return True


def test_negative_cycle_is_infeasible():
    # x0 - x1 = 1 and x1 - x0 = 1 cannot both hold
    cons = [
        (0, 1, dc.nonstrict(1)),
        (1, 0, dc.nonstrict(-1)),
        (1, 0, dc.nonstrict(1)),
        (0, 1, dc.nonstrict(-1)),
    ]
    assert not dc.feasible(2, cons)
    assert dc.solve(2, cons) is None
    assert dc.solve(2, cons, interior=False) is None


def test_strict_zero_cycle_is_infeasible():
    cons = [(0, 1, dc.strict(0)), (1, 0, dc.nonstrict(0))]
    assert not dc.feasible(2, cons)
    assert dc.solve(2, cons) is None


def test_strict_constraints_are_honoured():
    cons = [(0, 1, dc.strict(0)), (1, 0, dc.strict(1))]
    x = dc.solve(2, cons)
    assert x is not None and satisfied(x, cons)
    assert min(x) == 0


def test_interior_point_is_midpoint():
    # 0 <= x1 - x0 <= 2 : the interior solver lands at 1
    cons = [(1, 0, dc.nonstrict(2)), (0, 1, dc.nonstrict(0))]
    assert dc.solve(2, cons) == [0, 1]


def test_empty_system():
    assert dc.solve(0, []) == []
    assert dc.solve(3, []) == [0, 0, 0]


def _random_system(rng, n, count):
    cons = []
    for _ in range(count):
        u, v = rng.sample(range(n), 2)
        w = Fraction(rng.randint(-4, 4), rng.choice([1, 2]))
        cons.append((u, v, dc.strict(w) if rng.random() < 0.3 else dc.nonstrict(w)))
    return cons


@pytest.mark.parametrize("seed", range(200))
def test_closure_agrees_with_bellman_ford(seed):
    rng = random.Random(seed)
    n = rng.randint(2, 6)
    cons = _random_system(rng, n, rng.randint(1, 12))
    ok = dc.feasible(n, cons)
    assert (dc._closure(n, cons) is not None) == ok
    for interior in (True, False):
        x = dc.solve(n, cons, interior=interior)
        assert (x is not None) == ok
        if ok:
            assert satisfied(x, cons)
