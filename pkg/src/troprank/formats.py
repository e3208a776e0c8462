"""JSON documents: matrices, lift certificates, obstruction reports.

All writers emit canonical JSON (sorted keys, two-space indent, trailing
newline), so re-serializing a parsed document reproduces it byte for byte.
Rationals are strings ``"p/q"`` or ``"n"``; series are term lists
``[[exponent, coefficient], ...]``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from .hahn import GenFrac, GenPoly, SeriesError, SeriesMatrix, verify_lift
from .lift import LiftCertificate, PairFrame, relation_vanishes
from .scalars import FieldError, field_from_spec
from .tropical import TropMatrix

CERT_FORMAT = "troprank-lift/1"


class DocumentError(ValueError):
    """Malformed or inconsistent JSON document."""


def dumps(data) -> str:
    return json.dumps(data, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def _matrix_json(B: TropMatrix) -> dict:
    return B.to_json()


def _matrix_from_json(data) -> TropMatrix:
    try:
        B = TropMatrix(data["entries"], cols=data.get("cols"))
    except (KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
        raise DocumentError(f"bad matrix: {exc}") from exc
    if "rows" in data and data["rows"] != B.rows:
        raise DocumentError(f"declared {data['rows']} rows, found {B.rows}")
    return B


# ---------------------------------------------------------------------------
# matrices


@dataclass(frozen=True)
class MatrixDoc:
    matrix: TropMatrix
    field: str = "Q"
    name: str | None = None
    provenance: str | None = None

    def to_json(self) -> dict:
        out = {"field": self.field, **_matrix_json(self.matrix)}
        if self.name is not None:
            out["name"] = self.name
        if self.provenance is not None:
            out["provenance"] = self.provenance
        return out

    def dumps(self) -> str:
        return dumps(self.to_json())

    @classmethod
    def from_json(cls, data) -> "MatrixDoc":
        if not isinstance(data, dict) or "entries" not in data:
            raise DocumentError("a matrix document is an object with an 'entries' grid")
        field = str(data.get("field", "Q"))
        try:
            field_from_spec(field)
        except FieldError as exc:
            raise DocumentError(str(exc)) from exc
        return cls(_matrix_from_json(data), field, data.get("name"), data.get("provenance"))

    @classmethod
    def loads(cls, text: str) -> "MatrixDoc":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise DocumentError(f"invalid JSON: {exc}") from exc
        return cls.from_json(data)


_B = [
    [1, 0, 0, 0, 1],
    [0, 1, 0, 0, 1],
    [0, 0, 1, 0, 1],
    [0, 0, 0, 0, 1],
    [1, 1, 1, 1, 0],
]
_D = [
    [1, 0, 0, 0, 1],
    [0, 1, 0, 0, 1],
    [0, 0, 0, 0, 1],
    [0, 0, 0, 0, 1],
    [1, 1, 1, 1, 0],
]

EXAMPLES = {
    "B": MatrixDoc(TropMatrix(_B), "Q", "B", "builtin: tropical rank 3, Kapranov rank 4 over F3"),
    "D": MatrixDoc(TropMatrix(_D), "Q", "D", "builtin: tropical rank 3, Kapranov rank 4 over F2"),
}


def example(name: str) -> MatrixDoc:
    try:
        return EXAMPLES[name]
    except KeyError:
        raise DocumentError(f"unknown example {name!r}; choose from {sorted(EXAMPLES)}") from None


def load_matrix(source: str) -> MatrixDoc:
    """``builtin:<name>``, ``-`` for stdin, or a path."""
    if source.startswith("builtin:"):
        return example(source.split(":", 1)[1])
    if source == "-":
        import sys

        return MatrixDoc.loads(sys.stdin.read())
    try:
        text = Path(source).read_text()
    except OSError as exc:
        raise DocumentError(f"cannot read {source}: {exc}") from exc
    return MatrixDoc.loads(text)


# ---------------------------------------------------------------------------
# lift certificates


def explicit_f3_lift() -> LiftCertificate:
    """The explicit rank-4 lift of ``B`` over F3.

    Every entry is ``t^b`` except positions (4,2) and (4,3) (1-based), which
    are ``2 + 2t``; rows 2, 3, 4 sum to zero.
    """
    f = field_from_spec("F3")
    B = EXAMPLES["B"].matrix
    special = GenFrac.of(GenPoly(f, [(0, 2), (1, 2)]))
    entries = [
        [special if (i, j) in ((3, 1), (3, 2)) else GenFrac.monomial(f, B[i, j]) for j in range(5)]
        for i in range(5)
    ]
    relation = tuple(GenPoly.constant(f, c) for c in (0, 1, 1, 1, 0))
    return LiftCertificate(
        B=B,
        field=f,
        frame=None,
        lift=SeriesMatrix(f, entries),
        columns=[],
        route="explicit",
        target_rank=4,
        annihilators=(relation,),
    )


def certificate_to_json(cert: LiftCertificate) -> dict:
    report, rel = cert.check()
    out = {
        "format": CERT_FORMAT,
        "B": _matrix_json(cert.B),
        "field": cert.field.name,
        "rank": cert.target_rank,
        "route": cert.route,
        "lift": cert.lift.to_json(),
        "relations": [[a.to_json() for a in vec] for vec in cert.relation_vectors],
        "columns": [c.to_json(cert.field) for c in cert.columns],
        "checks": {
            "degreeMatch": not report.degree_mismatches and not report.zero_entries and report.shape_ok,
            "relationsVanish": list(rel),
            "computedRank": report.rank,
        },
    }
    if cert.frame is not None:
        out["frame"] = cert.frame.to_json()
    return out


def certificate_from_json(data) -> LiftCertificate:
    try:
        if data.get("format", CERT_FORMAT) != CERT_FORMAT:
            raise DocumentError(f"unsupported certificate format {data['format']!r}")
        f = field_from_spec(data["field"])
        B = _matrix_from_json(data["B"])
        lift = SeriesMatrix.from_json(data["lift"])
        if lift.field != f:
            raise DocumentError("lift field differs from certificate field")
        frame = PairFrame.from_json(data["frame"]) if data.get("frame") else None
        relations = tuple(tuple(GenPoly.from_json(f, a) for a in vec) for vec in data.get("relations", []))
        rank = int(data["rank"])
    except DocumentError:
        raise
    except (KeyError, TypeError, ValueError, AttributeError, SeriesError, FieldError) as exc:
        raise DocumentError(f"malformed certificate: {exc}") from exc
    return LiftCertificate(
        B=B,
        field=f,
        frame=frame,
        lift=lift,
        columns=[],
        route=str(data.get("route", "")),
        target_rank=rank,
        annihilators=relations,
    )


@dataclass
class CertificateCheck:
    ok: bool
    failure: str | None
    rank: int | None

    def __bool__(self):
        return self.ok


def verify_certificate(data) -> CertificateCheck:
    """Independently re-check a certificate document.

    Obligations, in order: the lift's degree matrix equals ``B``; every
    recorded relation vector is nonzero, has one entry per row and
    annihilates the lift; the exact rank is at most the claimed rank.
    """
    try:
        cert = certificate_from_json(data)
    except DocumentError as exc:
        return CertificateCheck(False, str(exc), None)
    report = verify_lift(cert.lift, cert.B, cert.target_rank)
    if not report.shape_ok or report.zero_entries or report.degree_mismatches:
        return CertificateCheck(False, report.first_failure(), report.rank)
    for t, vec in enumerate(cert.relation_vectors):
        if len(vec) != cert.lift.rows:
            return CertificateCheck(False, f"relation {t + 1} has {len(vec)} entries", report.rank)
        if all(a.is_zero() for a in vec):
            return CertificateCheck(False, f"relation {t + 1} is the zero vector", report.rank)
        if not relation_vanishes(vec, cert.lift):
            return CertificateCheck(False, f"relation {t + 1} does not annihilate the lift", report.rank)
    if not report.ok:
        return CertificateCheck(False, report.first_failure(), report.rank)
    return CertificateCheck(True, None, report.rank)


__all__ = [
    "CERT_FORMAT",
    "CertificateCheck",
    "DocumentError",
    "EXAMPLES",
    "MatrixDoc",
    "certificate_from_json",
    "certificate_to_json",
    "dumps",
    "example",
    "load_matrix",
    "explicit_f3_lift",
    "verify_certificate",
]
