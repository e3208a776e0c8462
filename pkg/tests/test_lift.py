import random
from fractions import Fraction

import pytest

from troprank.corpus import corpus
from troprank.formats import certificate_to_json, dumps
from troprank.hahn import GenFrac, GenPoly, verify_lift
from troprank.lift import (
    PairFrame,
    PreconditionError,
    ShapeError,
    block_shape,
    build_lift_3zeros,
    build_lift_block,
    build_lift_from_pair,
    check_pair_premise,
    choose_xi,
    generic_pair_search,
    kapranov_upper,
    three_zeros_frame,
)
from troprank.scalars import GF4, CapacityError, field_from_spec
from troprank.tropical import TropMatrix, scale, trop_rank

F3, F5 = field_from_spec("F3"), field_from_spec("F5")


def ones(f):
    return [[GenPoly.one(f)] * 2 for _ in range(2)]


def assert_verified(cert, B, r=3):
    report, rel = cert.check()
    assert report.ok, report.first_failure()
    assert all(rel)
    assert cert.lift.shape == B.shape
    assert verify_lift(cert.lift, B, r).ok


# -- choose_xi --------------------------------------------------------------


def test_choose_xi_all_ones():
    xi = choose_xi(ones(F5), F5)
    assert xi == 1
    assert (GenPoly.one(F5).scale(xi) + GenPoly.one(F5)).deg() == 0


def test_choose_xi_avoids_cancellation():
    S = [[GenPoly.monomial(F5, 0, 1), GenPoly.monomial(F5, 0, 4)], [GenPoly.one(F5), GenPoly.monomial(F5, 0, 3)]]
    xi = choose_xi(S, F5)
    for row in S:
        assert (row[0].scale(xi) + row[1]).deg() == 0


def test_choose_xi_small_field():
    S = [[GenPoly.one(F3), GenPoly.one(F3)], [GenPoly.one(F3), GenPoly.constant(F3, 2)]]
    with pytest.raises(CapacityError):
        choose_xi(S, F3)


# -- frames -----------------------------------------------------------------


@pytest.mark.parametrize("f", ["F5", "GF4", "Q", "F7"])
def test_three_zeros_frame_premise(f):
    A = three_zeros_frame(f)
    check = check_pair_premise(A)
    assert check.ok and check.rank == 2 and not check.failing_pairs


def test_premise_fails_with_eta_one():
    A = PairFrame.from_columns(F5, [1, 1, 1, 1, 0], [1, 1, 3, 0, 1])
    check = check_pair_premise(A)
    assert not check
    assert (0, 1) in check.failing_pairs


def test_premise_fails_for_proportional_columns():
    A = PairFrame.from_columns(F5, [1, 2, 3, 4, 1], [2, 4, 1, 3, 2])
    check = check_pair_premise(A)
    assert not check and check.rank == 1


def test_frame_json_round_trip():
    A = three_zeros_frame(GF4)
    assert PairFrame.from_json(A.to_json()) == A


# -- explicit constructions -------------------------------------------------


def test_three_zeros_example():
    B = TropMatrix([[0, 1], [0, 0], [0, 0], [1, 0], [2, 3]])
    cert = build_lift_3zeros(B, F5)
    assert_verified(cert, B)
    assert cert.route == "three-zeros"


@pytest.mark.parametrize("f", ["F5", "GF4", "Q"])
def test_three_zeros_all_zero(f):
    B = TropMatrix.zeros(5, 4)
    assert_verified(build_lift_3zeros(B, f), B)


def test_single_zero_column():
    B = TropMatrix.zeros(5, 1)
    cert = build_lift_from_pair(three_zeros_frame(F5), B)
    assert_verified(cert, B)
    assert cert.check()[0].rank == 1


def test_cramer_degrees_are_zero():
    B = TropMatrix([[0, 2], [0, 0], [0, 1], [3, 0], [1, 0]])
    cert = build_lift_3zeros(B, GF4)
    for j, col in enumerate(cert.columns):
        i1, i2 = col.split
        for i in (i1, i2):
            assert (cert.lift[i, j] / GenFrac.monomial(GF4, B[i, j])).deg() == 0


def test_three_zeros_preconditions():
    with pytest.raises(CapacityError):
        build_lift_3zeros(TropMatrix.zeros(5, 2), F3)
    with pytest.raises(PreconditionError):
        build_lift_3zeros(TropMatrix([[0], [0], [1], [1], [1]]), F5)
    with pytest.raises(PreconditionError):
        build_lift_3zeros(TropMatrix([[0], [0], [0], [-1], [0]]), F5)


def test_block_shape_rejects_non_positive_blocks():
    # zeros in rows 1-2 of the lead column and of a later column, nothing positive
    B = TropMatrix([[0, 0, 0], [0, 0, 0], [1, 0, 0], [1, 0, 1], [1, 1, 0]])
    with pytest.raises(ShapeError):
        block_shape(B)


def test_block_lift_on_conforming_matrix():
    # lead column zero on rows 1-2, alpha and beta columns positive on rows 1-2
    B = TropMatrix([[0, 1, 1], [0, 1, 2], [1, 0, 0], [2, 0, 1], [1, 1, 0]])
    shape = block_shape(B)
    assert (shape.v, shape.p, shape.q) == (1, 1, 1)
    assert_verified(build_lift_block(B, F5, shape), B)


# -- driver -----------------------------------------------------------------


@pytest.mark.parametrize("f", ["F5", "GF4", "Q", "F7"])
def test_kapranov_upper_on_B(B, f):
    cert = kapranov_upper(B, f)
    assert_verified(cert, B)


def test_kapranov_upper_errors(B):
    with pytest.raises(CapacityError):
        kapranov_upper(B, "F3")
    with pytest.raises(CapacityError):
        kapranov_upper(B, "F2")
    I = TropMatrix([[0 if i == j else 1 for j in range(5)] for i in range(5)])
    assert trop_rank(I) == 5
    with pytest.raises(PreconditionError):
        kapranov_upper(I, F5)
    with pytest.raises(PreconditionError):
        kapranov_upper(TropMatrix.zeros(4, 3), F5)


def test_empty_matrix():
    B = TropMatrix([[] for _ in range(5)], cols=0)
    cert = kapranov_upper(B, F5)
    assert cert.lift.shape == (5, 0)
    assert generic_pair_search(B, F5) is not None


def test_generic_search_rank_four_is_none():
    I = TropMatrix([[0 if i == j else 1 for j in range(4)] for i in range(5)])
    assert trop_rank(I) == 4
    assert generic_pair_search(I, F5) is None


def test_determinism(B):
    a = dumps(certificate_to_json(kapranov_upper(B, GF4)))
    b = dumps(certificate_to_json(kapranov_upper(B, GF4)))
    assert a == b


@pytest.mark.parametrize("f", ["F5", "GF4", "Q"])
def test_corpus_sample(f):
    for B in corpus(25, seed=11):
        assert_verified(kapranov_upper(B, f), B)


def test_generic_fallback_agrees_with_driver():
    for B in corpus(15, seed=3):
        found = generic_pair_search(B, GF4)
        if found is not None:
            assert_verified(build_lift_from_pair(found.frame, B, route="generic"), B)


@pytest.mark.parametrize("seed", range(10))
def test_scaling_transport(seed):
    rng = random.Random(seed)
    B = next(corpus(1, seed=seed))
    cert = kapranov_upper(B, F5)
    ro = [Fraction(rng.randint(-6, 6), rng.choice([1, 2, 3])) for _ in range(B.rows)]
    co = [Fraction(rng.randint(-6, 6), rng.choice([1, 2])) for _ in range(B.cols)]
    moved = cert.lift.scale_monomial(ro, co)
    assert verify_lift(moved, scale(B, ro, co), 3).ok
