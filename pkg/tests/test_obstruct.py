import pytest

from troprank import _kernels
from troprank.obstruct import (
    CERTIFIED,
    INCONCLUSIVE,
    BudgetError,
    GaugeError,
    UnsupportedFieldError,
    assignment_survives,
    certify_lower_bound,
    check_gauge,
    first_order_coeff,
    gauge_tree,
    singular_minors,
)
from troprank.scalars import field_from_spec
from troprank.tropical import TropMatrix, TropSizeError

F2, F3, F5 = (field_from_spec(s) for s in ("F2", "F3", "F5"))


def minor(B, rows, cols):
    k = len(rows)
    return next(m for m in singular_minors(B, k) if m.rows == tuple(rows) and m.cols == tuple(cols))


# -- minors -----------------------------------------------------------------


def test_all_four_minors_of_D_are_singular(D):
    minors = singular_minors(D, 4)
    assert len(minors) == 25
    assert all(m.singular for m in minors)


def test_one_minors_are_regular(B):
    minors = singular_minors(B, 1)
    assert len(minors) == 25 and not any(m.singular for m in minors)


def test_nonsingular_minor_is_tagged():
    I = TropMatrix([[0 if i == j else 1 for j in range(4)] for i in range(4)])
    (m,) = singular_minors(I, 4)
    assert not m.singular and m.achievers == ((0, 1, 2, 3),)


def test_minor_errors(B):
    with pytest.raises(ValueError):
        singular_minors(B, 6)
    with pytest.raises(TropSizeError):
        singular_minors(B, 4, cap=3)


# -- first-order coefficient -----------------------------------------------


def test_first_order_D_over_F2(D):
    m = minor(D, (0, 1, 2, 4), (0, 1, 2, 4))
    assert len(m.achievers) == 3
    assert sorted(m.signs) == [-1, 1, 1]
    ones = [[1] * 4 for _ in range(4)]
    assert first_order_coeff(F2, m.achievers, ones) == 1
    assert first_order_coeff(F2, m.achievers, ones, m.signs) == 1


def test_first_order_B_over_F3(B):
    m = minor(B, (0, 1, 3, 4), (0, 1, 3, 4))
    lead = [[1 if i == j else F3.neg(1) for j in range(4)] for i in range(4)]
    assert first_order_coeff(F3, m.achievers, lead) == 0


def test_first_order_regular_minor_never_vanishes():
    I = TropMatrix([[0, 1, 1], [1, 0, 1], [1, 1, 0]])
    (m,) = singular_minors(I, 3)
    for a in F5.iter_units():
        for b in F5.iter_units():
            lead = [[a, 1, 1], [1, b, 1], [1, 1, a]]
            assert first_order_coeff(F5, m.achievers, lead) != 0


def test_first_order_needs_achievers():
    with pytest.raises(ValueError):
        first_order_coeff(F2, [], [[1]])


# -- gauge ------------------------------------------------------------------


@pytest.mark.parametrize("kind", ["cross", "staircase"])
@pytest.mark.parametrize("shape", [(5, 5), (5, 3), (2, 7), (1, 4), (4, 1)])
def test_gauge_trees_span(kind, shape):
    m, n = shape
    cells = gauge_tree(m, n, kind)
    assert check_gauge(m, n, cells) == cells


def test_gauge_errors():
    with pytest.raises(GaugeError):
        gauge_tree(3, 3, "spiral")
    with pytest.raises(GaugeError):
        check_gauge(2, 2, [(0, 0), (0, 1)])
    with pytest.raises(GaugeError):
        check_gauge(2, 2, [(0, 0), (0, 1), (1, 0), (1, 1)][:2] + [(0, 0)])
    with pytest.raises(GaugeError):
        check_gauge(2, 2, [(0, 0), (0, 5), (1, 0)])


# -- certification ------------------------------------------------------------


def test_D_over_F2_certified(D):
    rep = certify_lower_bound(D, 3, F2)
    assert rep.verdict == CERTIFIED and rep.searched == 1 and not rep.fast_path


def test_B_over_F3_certified(B):
    rep = certify_lower_bound(B, 3, F3)
    assert rep.certified
    assert rep.searched == rep.space == 2 ** 16
    assert len(rep.minors) == 25


def test_B_over_F5_inconclusive(B):
    rep = certify_lower_bound(B, 3, F5)
    assert rep.verdict == INCONCLUSIVE
    assert assignment_survives(B, 3, F5, rep.witness)
    assert all(x != 0 for row in rep.witness for x in row)
    assert all(rep.witness[i][j] == 1 for i, j in rep.gauge)


def test_fast_path():
    I = TropMatrix([[0 if i == j else 1 for j in range(5)] for i in range(5)])
    rep = certify_lower_bound(I, 3, F2)
    assert rep.certified and rep.fast_path and rep.searched == 0
    assert not rep.minors[0].singular


def test_no_minors_is_inconclusive():
    rep = certify_lower_bound(TropMatrix.zeros(3, 3), 3, F3)
    assert rep.verdict == INCONCLUSIVE


@pytest.mark.parametrize("name,field", [("B", "F3"), ("B", "F5"), ("D", "F2"), ("D", "F3"), ("B", "GF4")])
def test_gauge_and_method_invariance(name, field, B, D):
    M = {"B": B, "D": D}[name]
    verdicts = {
        certify_lower_bound(M, 3, field, gauge=g, method=meth).verdict
        for g in ("cross", "staircase")
        for meth in (("dfs", "enumerate") if field in ("F2", "F3") else ("dfs",))
    }
    assert len(verdicts) == 1


def test_enumerate_matches_dfs_witness(D):
    a = certify_lower_bound(D, 3, F3, method="enumerate", order="row-major")
    b = certify_lower_bound(D, 3, F3, method="dfs", order="row-major")
    assert a.verdict == b.verdict == INCONCLUSIVE
    assert a.witness == b.witness and a.searched == b.searched


def test_custom_gauge(B):
    cells = [(0, j) for j in range(5)] + [(i, 4) for i in range(1, 5)]
    assert certify_lower_bound(B, 3, F3, gauge=cells).certified


def test_parallel_matches_serial(B):
    a = certify_lower_bound(B, 3, F5)
    b = certify_lower_bound(B, 3, F5, jobs=2)
    assert (a.verdict, a.witness, a.searched) == (b.verdict, b.witness, b.searched)


def test_budget_and_field_errors(B):
    with pytest.raises(BudgetError):
        certify_lower_bound(B, 3, F3, budget=10)
    with pytest.raises(BudgetError):
        certify_lower_bound(B, 3, F3, budget=1000, method="enumerate")
    with pytest.raises(UnsupportedFieldError):
        certify_lower_bound(B, 3, "Q")
    with pytest.raises(ValueError):
        certify_lower_bound(B, -1, F3)


def test_budget_env(monkeypatch, B):
    monkeypatch.setenv("TROPRANK_BUDGET", "10")
    with pytest.raises(BudgetError):
        certify_lower_bound(B, 3, F3)


def test_report_json(B):
    data = certify_lower_bound(B, 3, F5).to_json()
    assert data["verdict"] == INCONCLUSIVE and data["field"] == "F5" and data["r"] == 3
    assert len(data["witnessAssignment"]) == 5
    assert {"rows", "cols", "singular", "permValue", "achieverCount"} <= set(data["minors"][0])


@pytest.mark.skipif(not _kernels.HAVE_NUMBA, reason="numba not installed")
def test_backends_agree(B, D):
    out = {}
    for name in ("numpy", "numba"):
        prev = _kernels.set_backend(name)
        try:
            out[name] = [
                (r.verdict, r.searched, r.witness)
                for r in (certify_lower_bound(B, 3, "GF4"), certify_lower_bound(D, 3, F3, method="enumerate"))
            ]
        finally:
            _kernels.set_backend(prev)
    assert out["numpy"] == out["numba"]
