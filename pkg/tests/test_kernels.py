import random

import numpy as np
import pytest
from hypothesis import given, strategies as st

from troprank import _kernels
from troprank import constraints as dc
from troprank.tropical import _subset_arrays

BACKENDS = ["numpy"] + (["numba"] if _kernels.HAVE_NUMBA else [])


@pytest.fixture(params=BACKENDS)
def backend(request):
    prev = _kernels.set_backend(request.param)
    yield request.param
    _kernels.set_backend(prev)


def test_perm_table_and_signs():
    assert _kernels.perm_table(0).shape == (1, 0)
    t = _kernels.perm_table(3)
    assert t.tolist()[0] == [0, 1, 2] and t.tolist()[-1] == [2, 1, 0]
    assert _kernels.perm_signs(3).tolist() == [1, -1, -1, 1, 1, -1]


@given(st.integers(0, 10**30), st.integers(1, 25), st.integers(2, 6))
def test_assignment_codec(index, nfree, radix):
    index %= radix**nfree
    digits = _kernels.decode_assignment(index, nfree, radix)
    assert len(digits) == nfree and all(0 <= d < radix for d in digits)
    assert _kernels.encode_assignment(digits, radix) == index


def test_codec_is_lexicographic():
    codes = [tuple(_kernels.decode_assignment(i, 3, 2)) for i in range(8)]
    assert codes == sorted(codes)


@pytest.mark.parametrize("seed", range(30))
def test_perm_stats_against_python(backend, seed):
    rng = random.Random(seed)
    m, n, k = 5, rng.randint(3, 6), rng.randint(1, 3)
    M = np.array([[rng.randint(0, 3) for _ in range(n)] for _ in range(m)], dtype=np.int64)
    rows, cols = _subset_arrays(m, n, k)
    mins, counts = _kernels.perm_stats(M, rows, cols)
    perms = _kernels.perm_table(k)
    for s in range(len(rows)):
        vals = [sum(M[rows[s, i], cols[s, p[i]]] for i in range(k)) for p in perms]
        assert mins[s] == min(vals) and counts[s] == vals.count(min(vals))
    first = _kernels.first_nonsingular(M, rows, cols)
    expect = next((s for s in range(len(rows)) if counts[s] == 1), -1)
    assert first == expect


@pytest.mark.parametrize("seed", range(60))
def test_closure_matches_bellman_ford(backend, seed):
    rng = random.Random(seed)
    n = rng.randint(2, 6)
    cons = [(*rng.sample(range(n), 2), rng.randint(-5, 5)) for _ in range(rng.randint(1, 10))]
    D = _kernels.closure_add(_kernels.closure_init(n), np.array(cons, dtype=np.int64).reshape(-1, 3))
    ok = dc.feasible(n, [(u, v, dc.nonstrict(w)) for u, v, w in cons])
    assert (D is not None) == ok
    if ok:
        for u, v, w in cons:
            assert D[v, u] <= w
