import copy
import json

import pytest

from troprank.formats import (
    EXAMPLES,
    DocumentError,
    MatrixDoc,
    certificate_from_json,
    certificate_to_json,
    dumps,
    example,
    load_matrix,
    explicit_f3_lift,
    verify_certificate,
)
from troprank.hahn import deg_matrix, mat_rank, verify_lift
from troprank.lift import kapranov_upper
from troprank.tropical import TropMatrix


def test_examples_exact(B, D):
    assert B.entries[3] == (0, 0, 0, 0, 1) and B.entries[4] == (1, 1, 1, 1, 0)
    assert D.entries[2] == D.entries[3] == (0, 0, 0, 0, 1)
    assert [r for i, r in enumerate(D.entries) if i != 2] == [r for i, r in enumerate(B.entries) if i != 2]
    with pytest.raises(DocumentError):
        example("X")


def test_matrix_doc_round_trip(tmp_path):
    doc = MatrixDoc(TropMatrix([["1/2", 0, -3]]), "GF4", "m", "test")
    text = doc.dumps()
    assert MatrixDoc.loads(text).dumps() == text
    path = tmp_path / "m.json"
    path.write_text(text)
    assert load_matrix(str(path)) == MatrixDoc.loads(text)
    assert load_matrix("builtin:B") is EXAMPLES["B"]


@pytest.mark.parametrize(
    "text",
    [
        "not json",
        "[]",
        '{"rows": 1}',
        '{"entries": [[0, 1], [2]]}',
        '{"entries": [["x"]]}',
        '{"entries": [[0]], "field": "F4"}',
        '{"entries": [[0]], "rows": 2}',
    ],
)
def test_bad_matrix_docs(text):
    with pytest.raises(DocumentError):
        MatrixDoc.loads(text)


def test_missing_file():
    with pytest.raises(DocumentError):
        load_matrix("/nonexistent/matrix.json")


def test_explicit_lift(B):
    cert = explicit_f3_lift()
    assert deg_matrix(cert.lift) == B
    assert all(cert.relations())
    assert mat_rank(cert.lift) == 4
    assert verify_lift(cert.lift, B, 4).ok
    assert not verify_lift(cert.lift, B, 3).ok


def test_certificate_checks():
    data = certificate_to_json(explicit_f3_lift())
    check = verify_certificate(data)
    assert check and check.rank == 4

    low = dict(data, rank=3)
    check = verify_certificate(low)
    assert not check and "rank" in check.failure

    bad = copy.deepcopy(data)
    bad["lift"]["entries"][0][0]["num"][0][0] = "2"
    check = verify_certificate(bad)
    assert not check and "degree" in check.failure

    bad = copy.deepcopy(data)
    bad["relations"] = [[[], [["0", "1"]], [["0", "1"]], [], []]]
    assert "annihilate" in verify_certificate(bad).failure

    bad = copy.deepcopy(data)
    bad["relations"] = [[[], [], [], [], []]]
    assert "zero vector" in verify_certificate(bad).failure

    bad = copy.deepcopy(data)
    bad["relations"] = [[[]] * 4]
    assert "entries" in verify_certificate(bad).failure

    assert not verify_certificate({"format": "other/9"})
    assert not verify_certificate({"field": "F3"})


@pytest.mark.parametrize("field", ["F5", "GF4", "Q"])
def test_certificate_round_trip(B, field):
    data = certificate_to_json(kapranov_upper(B, field))
    text = dumps(data)
    again = dumps(certificate_to_json(certificate_from_json(json.loads(text))))
    parsed = json.loads(again)
    assert parsed["lift"] == data["lift"] and parsed["relations"] == data["relations"]
    assert verify_certificate(json.loads(text)).rank <= 3
