import random
from fractions import Fraction
from itertools import permutations

import pytest
from hypothesis import given, strategies as st

from troprank import _kernels
from troprank.tropical import (
    INF,
    TropMatrix,
    TropSizeError,
    find_witness,
    is_trop_singular,
    is_witness,
    min_plus_product,
    scale,
    theta,
    trop_perm,
    trop_rank,
    trop_rank_bruteforce,
    witness_cells,
    witness_feasible,
)


def rand_matrix(rng, m, n, hi=3):
    return TropMatrix([[rng.randint(0, hi) for _ in range(n)] for _ in range(m)], cols=n)


matrices = st.integers(1, 4).flatmap(
    lambda m: st.integers(1, 5).flatmap(
        lambda n: st.lists(
            st.lists(st.integers(-3, 3), min_size=n, max_size=n), min_size=m, max_size=m
        ).map(TropMatrix)
    )
)


# -- permanents ------------------------------------------------------------


def test_perm_examples(D):
    r = trop_perm(TropMatrix([[0, 1], [1, 0]]))
    assert (r.value, r.count, r.achievers) == (0, 1, ((0, 1),))
    assert not is_trop_singular(TropMatrix([[0, 1], [1, 0]]))

    r = trop_perm(TropMatrix.zeros(3, 3))
    assert (r.value, r.count) == (0, 6)
    assert set(r.achievers) == set(permutations(range(3)))
    assert is_trop_singular(TropMatrix.zeros(2, 2))

    sub = D.submatrix([0, 1, 2, 4], [0, 1, 2, 4])
    r = trop_perm(sub)
    assert (r.value, r.count) == (0, 3)
    assert is_trop_singular(sub)


def test_perm_cap_and_shape():
    with pytest.raises(TropSizeError):
        trop_perm(TropMatrix.zeros(4, 4), cap=3)
    with pytest.raises(ValueError):
        trop_perm(TropMatrix.zeros(2, 3))


def test_perm_rational_entries():
    M = TropMatrix([["1/2", "1/3"], ["-1/6", 0]])
    r = trop_perm(M)
    assert r.value == Fraction(1, 6) and r.count == 1


@given(matrices)
def test_perm_matches_bruteforce(B):
    k = min(B.shape)
    S = B.submatrix(range(k), range(k))
    sums = {p: sum(S[i, p[i]] for i in range(k)) for p in permutations(range(k))}
    best = min(sums.values())
    r = trop_perm(S)
    assert r.value == best
    assert set(r.achievers) == {p for p, v in sums.items() if v == best}


# -- rank ------------------------------------------------------------------


def test_rank_examples(B, D):
    assert trop_rank(B) == 3
    assert trop_rank(D) == 3
    assert trop_rank(TropMatrix.zeros(5, 5)) == 1


def test_rank_cap():
    with pytest.raises(TropSizeError):
        trop_rank(TropMatrix.zeros(5, 5), cap=4)


@given(matrices)
def test_rank_properties(B):
    r = trop_rank(B)
    assert r == trop_rank_bruteforce(B)
    assert r == trop_rank(B.transpose())
    assert 1 <= r <= min(B.shape)
    assert trop_rank(B.submatrix(range(B.rows - 1 or 1), range(B.cols))) <= r


@given(
    matrices,
    st.lists(st.fractions(min_value=-10, max_value=10, max_denominator=4), min_size=9, max_size=9),
)
def test_scaling_invariance(B, offs):
    S = scale(B, offs[: B.rows], offs[4 : 4 + B.cols])
    assert trop_rank(S) == trop_rank(B)


def test_scale_zero_offsets_is_identity(B):
    assert scale(B) == B
    with pytest.raises(ValueError):
        scale(B, [0, 0])


def test_product_factor_bound():
    rng = random.Random(5)
    for _ in range(50):
        U, V = rand_matrix(rng, 5, 2, 6), rand_matrix(rng, 2, 5, 6)
        assert trop_rank(min_plus_product(U, V)) <= 2


# -- theta and witnesses ---------------------------------------------------


def test_theta_examples():
    assert theta((0, 0, INF), (1, 1, 0)) == {0, 1}
    assert theta((0, 5), (0, 0)) == {0}
    with pytest.raises(ValueError):
        theta((INF, INF), (0, 0))


def test_witness_examples(B):
    w = find_witness(TropMatrix.zeros(2, 4), [0, 1])
    assert w.lam == (0, 0)
    w = find_witness(B)
    assert w is not None and is_witness(B, w.lam)
    assert min(x for x in w.lam if x != INF) == 0
    assert find_witness(TropMatrix([[0, 1], [1, 0]]), [0, 1]) is None


def test_witness_no_columns():
    w = find_witness(TropMatrix([[], [], []], cols=0))
    assert w.lam == (0, 0, 0)


def test_witness_feasible_examples():
    Z = TropMatrix.zeros(3, 4)
    lam = witness_feasible([(0, 1)] * 4, Z, [0, 1, 2])
    assert lam[:2] == (0, 0) and is_witness(Z, lam)
    assert witness_feasible([(0, 1)] * 4, TropMatrix.zeros(2, 4), [0, 1]) == (0, 0)
    # column 0 forces x0 - x1 = 1, column 1 forces x1 - x0 = 1
    M = TropMatrix([[0, 1], [1, 0]])
    assert witness_feasible([(0, 1), (0, 1)], M, [0, 1]) is None


def test_witness_on_row_subset(B):
    w = find_witness(B, [0, 3, 4])
    assert w is None or all(w.lam[i] == INF for i in (1, 2))
    assert (w is None) == (trop_rank(B.submatrix([0, 3, 4])) == 3)


@pytest.mark.parametrize("seed", range(150))
def test_witness_iff_rank_deficient(seed):
    rng = random.Random(seed)
    m, n = rng.randint(2, 5), rng.randint(1, 6)
    B = rand_matrix(rng, m, n)
    w = find_witness(B)
    assert (w is not None) == (trop_rank(B) < m)
    if w is not None:
        assert is_witness(B, w.lam)
        # round trip: any tied pair per column gives a feasible pattern
        pattern = [tuple(sorted(theta(w.lam, B.column(j))))[:2] for j in range(n)]
        lam = witness_feasible(pattern, B, range(m))
        assert lam is not None and is_witness(B, lam)


@pytest.mark.parametrize("seed", range(40))
def test_witness_cells(seed):
    rng = random.Random(seed)
    B = rand_matrix(rng, 4, rng.randint(1, 4))
    cells = witness_cells(B, range(4))
    assert bool(cells) == (find_witness(B) is not None)
    profiles = [c.profile for c in cells]
    assert len(set(profiles)) == len(profiles)
    for c in cells:
        assert tuple(theta(c.lam, B.column(j)) for j in range(B.cols)) == c.profile
    assert witness_cells(B, range(4), limit=1) == cells[:1]


# -- backends --------------------------------------------------------------


@pytest.mark.skipif(not _kernels.HAVE_NUMBA, reason="numba not installed")
@pytest.mark.parametrize("seed", range(20))
def test_backends_agree(seed):
    rng = random.Random(seed)
    B = rand_matrix(rng, 5, rng.randint(2, 6))
    out = {}
    for name in ("numpy", "numba"):
        prev = _kernels.set_backend(name)
        try:
            w = find_witness(B)
            out[name] = (trop_rank(B), None if w is None else w.lam, len(witness_cells(B, range(5), limit=5)))
        finally:
            _kernels.set_backend(prev)
    assert out["numpy"] == out["numba"]


def test_backend_names():
    with pytest.raises(ValueError):
        _kernels.set_backend("fortran")
