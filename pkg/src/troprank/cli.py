"""Command-line interface.

Exit codes
----------
0  success (``certify``: CERTIFIED)
1  ``certify``: INCONCLUSIVE
2  bad input: unreadable or malformed document, unknown example, bad usage
3  resource limit: permutation cap or search budget exceeded
4  ``lift``: tropical rank above 3
5  ``lift``: field has fewer than 4 elements
6  ``lift``: no verified construction (diagnostics on stderr)
7  ``verify``: a certificate obligation failed
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import __version__
from .corpus import generate
from .formats import (
    DocumentError,
    MatrixDoc,
    certificate_to_json,
    dumps,
    example,
    load_matrix,
    verify_certificate,
)
from .lift import ConstructionError, PreconditionError, kapranov_upper
from .obstruct import BudgetError, UnsupportedFieldError, certify_lower_bound, default_budget
from .scalars import CapacityError, FieldError, field_from_spec
from .tropical import DEFAULT_CAP, TropSizeError, trop_rank

log = logging.getLogger("troprank")

EXIT_OK, EXIT_INCONCLUSIVE, EXIT_INPUT, EXIT_RESOURCE = 0, 1, 2, 3
EXIT_RANK, EXIT_CAPACITY, EXIT_CONSTRUCTION, EXIT_VERIFY = 4, 5, 6, 7


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


def _write(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _field(args, doc: MatrixDoc):
    try:
        return field_from_spec(args.field or doc.field)
    except FieldError as exc:
        raise CliError(str(exc), EXIT_INPUT) from exc


def cmd_troprank(args) -> int:
    doc = load_matrix(args.file)
    print(trop_rank(doc.matrix, args.cap))
    return EXIT_OK


def cmd_lift(args) -> int:
    doc = load_matrix(args.file)
    f = _field(args, doc)
    try:
        cert = kapranov_upper(doc.matrix, f, cap=args.cap)
    except PreconditionError as exc:
        raise CliError(str(exc), EXIT_RANK) from exc
    except CapacityError as exc:
        raise CliError(str(exc), EXIT_CAPACITY) from exc
    except ConstructionError as exc:
        for line in exc.diagnostics:
            print(f"  {line}", file=sys.stderr)
        raise CliError(str(exc), EXIT_CONSTRUCTION) from exc
    data = json.loads(dumps(certificate_to_json(cert)))
    check = verify_certificate(data)
    if not check:
        raise CliError(f"self-check failed: {check.failure}", EXIT_CONSTRUCTION)
    _write(dumps(data), args.out)
    log.info("route %s, rank %s", cert.route, check.rank)
    return EXIT_OK


def cmd_verify(args) -> int:
    try:
        text = sys.stdin.read() if args.cert == "-" else Path(args.cert).read_text()
        data = json.loads(text)
    except (OSError, json.JSONDecodeError) as exc:
        raise CliError(f"cannot read certificate: {exc}", EXIT_INPUT) from exc
    check = verify_certificate(data)
    if not check:
        print(f"FAIL: {check.failure}")
        return EXIT_VERIFY
    print(f"OK rank={check.rank}")
    return EXIT_OK


def cmd_certify(args) -> int:
    doc = load_matrix(args.file)
    f = _field(args, doc)
    budget = args.budget if args.budget is not None else default_budget()
    try:
        report = certify_lower_bound(
            doc.matrix, args.rank, f, budget=budget, gauge=args.gauge, cap=args.cap, jobs=args.jobs
        )
    except UnsupportedFieldError as exc:
        raise CliError(str(exc), EXIT_INPUT) from exc
    except BudgetError as exc:
        raise CliError(str(exc), EXIT_RESOURCE) from exc
    text = dumps(report.to_json())
    if args.out:
        Path(args.out).write_text(text)
    if args.json:
        sys.stdout.write(text)
    else:
        print(report.verdict)
    return EXIT_OK if report.certified else EXIT_INCONCLUSIVE


def cmd_gen(args) -> int:
    B = generate(args.n, args.seed, args.entry_bound)
    prov = f"gen seed={args.seed} n={args.n} entry-bound={args.entry_bound}"
    log.info(prov)
    sys.stdout.write(MatrixDoc(B, "Q", None, prov).dumps())
    return EXIT_OK


def cmd_examples(args) -> int:
    sys.stdout.write(example(args.name).dumps())
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="troprank", description="Tropical and Kapranov rank toolkit.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--cap", type=int, default=DEFAULT_CAP, help="largest permutation size to enumerate")

    s = sub.add_parser("troprank", parents=[common], help="print the tropical rank")
    s.add_argument("file", help="matrix JSON, '-' for stdin, or builtin:B / builtin:D")
    s.set_defaults(func=cmd_troprank)

    s = sub.add_parser("lift", parents=[common], help="build and self-verify a rank-3 lift")
    s.add_argument("file")
    s.add_argument("--field", help="Q, GF4 or F<p> (default: the document's field)")
    s.add_argument("--out", help="certificate path (default: stdout)")
    s.set_defaults(func=cmd_lift)

    s = sub.add_parser("verify", help="re-check a lift certificate")
    s.add_argument("cert")
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("certify", parents=[common], help="certify a Kapranov-rank lower bound")
    s.add_argument("file")
    s.add_argument("--rank", type=int, required=True, help="r; CERTIFIED means Kapranov rank > r")
    s.add_argument("--field", help="finite field spec (default: the document's field)")
    s.add_argument("--budget", type=int, help="node budget (default: $TROPRANK_BUDGET or 2^26)")
    s.add_argument("--jobs", type=int, default=1, help="worker processes")
    s.add_argument("--gauge", choices=("cross", "staircase"), default="cross")
    s.add_argument("--out", help="write the full report JSON here")
    s.add_argument("--json", action="store_true", help="print the report JSON instead of the verdict")
    s.set_defaults(func=cmd_certify)

    s = sub.add_parser("gen", help="random 5xN matrix of tropical rank <= 3")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--entry-bound", type=int, default=5)
    s.set_defaults(func=cmd_gen)

    s = sub.add_parser("examples", help="print a built-in matrix (B or D)")
    s.add_argument("name")
    s.set_defaults(func=cmd_examples)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(name)s: %(message)s")
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except DocumentError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except TropSizeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RESOURCE


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
