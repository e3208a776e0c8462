"""Rank-3 lifts of 5-row tropical matrices over fields with at least 4 elements.

Everything funnels into :func:`build_lift_from_pair`: given a 5x2 *frame* ``A``
of generalized polynomials whose 2x2 minors have no leading-term cancellation,
and a matrix ``B`` whose columns tie at least twice against both degree
columns of ``A`` (and at least three times jointly), each column of the lift
is obtained from a 2x2 Cramer system.  The two columns of ``A`` then annihilate
the lift from the left, so its rank is at most 3.

Frames come from, in order of preference,

* the fixed frame for matrices with three zeros per column,
* the block construction built from two 4-row dependence witnesses,
* a duplicate-row frame when three rows coincide,
* a generic search over pairs of 4-row witness cells (fallback).

:func:`kapranov_upper` normalizes the input, dispatches, and always re-verifies
the certificate on the original matrix before returning it.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from itertools import combinations

import numpy as np

from .hahn import GenFrac, GenPoly, SeriesMatrix, mat_rank, verify_lift
from .scalars import CapacityError, Field, field_from_spec, pick_excluding
from .tropical import (
    DEFAULT_CAP,
    INF,
    TropMatrix,
    find_witness,
    nonsingular_submatrix,
    theta,
    trop_rank,
    witness_cells,
)

log = logging.getLogger(__name__)

ROWS = 5
TARGET_RANK = 3


class LiftError(Exception):
    """Base class for lift construction failures."""


class PreconditionError(LiftError):
    """The input violates a hypothesis (e.g. tropical rank above 3)."""


class RouteError(LiftError):
    """A construction route does not apply; the driver tries the next one."""


class InvariantError(LiftError):
    """An internal degree identity failed; indicates a violated premise."""


class ConstructionError(LiftError):
    """Every route failed.  ``diagnostics`` lists what each one reported."""

    def __init__(self, message, diagnostics=()):
        super().__init__(message)
        self.diagnostics = list(diagnostics)


# ---------------------------------------------------------------------------
# frames


@dataclass(frozen=True)
class PairFrame:
    """The 5x2 matrix ``A``; exact zero entries are allowed."""

    field: Field
    col1: tuple
    col2: tuple

    @classmethod
    def from_columns(cls, field, col1, col2) -> "PairFrame":
        field = field_from_spec(field)
        conv = lambda x: x if isinstance(x, GenPoly) else GenPoly.constant(field, x)
        return cls(field, tuple(conv(x) for x in col1), tuple(conv(x) for x in col2))

    @property
    def columns(self):
        return self.col1, self.col2

    def degrees(self):
        return tuple(a.deg() for a in self.col1), tuple(a.deg() for a in self.col2)

    def as_matrix(self) -> SeriesMatrix:
        return SeriesMatrix(self.field, [[a, b] for a, b in zip(self.col1, self.col2)])

    def permuted(self, order) -> "PairFrame":
        """Frame whose row ``order[k]`` is this frame's row ``k``."""
        c1 = [None] * len(order)
        c2 = [None] * len(order)
        for k, o in enumerate(order):
            c1[o], c2[o] = self.col1[k], self.col2[k]
        return PairFrame(self.field, tuple(c1), tuple(c2))

    def shifted(self, row_shifts) -> "PairFrame":
        return PairFrame(
            self.field,
            tuple(a.shift(s) for a, s in zip(self.col1, row_shifts)),
            tuple(a.shift(s) for a, s in zip(self.col2, row_shifts)),
        )

    def to_json(self) -> dict:
        return {
            "field": self.field.name,
            "columns": [[a.to_json() for a in self.col1], [a.to_json() for a in self.col2]],
        }

    @classmethod
    def from_json(cls, data) -> "PairFrame":
        f = field_from_spec(data["field"])
        c1, c2 = data["columns"]
        return cls(f, tuple(GenPoly.from_json(f, x) for x in c1), tuple(GenPoly.from_json(f, x) for x in c2))


@dataclass
class PremiseCheck:
    ok: bool
    rank: int
    failing_pairs: list = dc_field(default_factory=list)

    def __bool__(self):
        return self.ok


def check_pair_premise(A: PairFrame) -> PremiseCheck:
    """Rank 2 and no cancellation in any 2x2 minor's leading terms."""
    failing = []
    c1, c2 = A.col1, A.col2
    for p, q in combinations(range(len(c1)), 2):
        det = c1[p] * c2[q] - c1[q] * c2[p]
        want = min(c1[p].deg() + c2[q].deg(), c1[q].deg() + c2[p].deg())
        if det.deg() != want:
            failing.append((p, q))
    rank = mat_rank(A.as_matrix())
    return PremiseCheck(rank == 2 and not failing, rank, failing)


def choose_xi(S, f) -> object:
    """Unit ``xi`` with ``deg(xi*S[i][0] + S[i][1]) = min(deg S[i][0], deg S[i][1])``.

    ``S`` is a 2x2 grid of series.  Leading coefficients of zero entries are
    taken to be 1.
    """
    f = field_from_spec(f)
    if f.is_finite and f.cardinality < 4:
        raise CapacityError(f"{f.name} has fewer than 4 elements")
    sig = [[_lead_or_one(S[i][k], f) for k in range(2)] for i in range(2)]
    forbidden = {f.zero}
    for i in range(2):
        forbidden.add(f.neg(f.div(sig[i][1], sig[i][0])))
    return pick_excluding(f, forbidden)


def _lead_or_one(x, f):
    if x.is_zero():
        return f.one
    return x.lead_coeff()


# ---------------------------------------------------------------------------
# certificates


@dataclass
class ColumnData:
    split: tuple  # (i1, i2)
    triple: tuple
    xi: tuple  # units for the triple, same order
    theta1: object
    theta2: object

    def to_json(self, field) -> dict:
        from .scalars import format_rational

        fmt = lambda v: None if v == INF else format_rational(v)
        return {
            "split": list(self.split),
            "triple": list(self.triple),
            "xi": [field.format(x) for x in self.xi],
            "theta1": fmt(self.theta1),
            "theta2": fmt(self.theta2),
        }


@dataclass
class LiftCertificate:
    B: TropMatrix
    field: Field
    frame: PairFrame | None
    lift: SeriesMatrix
    columns: list
    route: str
    target_rank: int = TARGET_RANK
    diagnostics: list = dc_field(default_factory=list)
    annihilators: tuple = ()  # explicit relation vectors; default: frame columns

    @property
    def relation_vectors(self) -> tuple:
        if self.annihilators or self.frame is None:
            return tuple(self.annihilators)
        return self.frame.columns

    def relations(self) -> tuple:
        """Whether each relation vector annihilates the lift from the left."""
        return tuple(relation_vanishes(col, self.lift) for col in self.relation_vectors)

    def check(self):
        """Full independent re-verification: degrees, relations, rank."""
        report = verify_lift(self.lift, self.B, self.target_rank)
        rel = self.relations()
        return report, rel


def relation_vanishes(coeffs, C: SeriesMatrix) -> bool:
    f = C.field
    for j in range(C.cols):
        total = GenFrac.of(0, f)
        for i, a in enumerate(coeffs):
            if not a.is_zero():
                total = total + C.entries[i][j] * a
        if not total.is_zero():
            return False
    return True


# ---------------------------------------------------------------------------
# the Cramer construction


def pair_split(th1, th2, m=ROWS):
    """First ordered ``(i1, i2)`` with both theta sets meeting the complement."""
    for i1 in range(m):
        if i1 not in th1:
            continue
        for i2 in range(m):
            if i2 == i1 or i2 not in th2:
                continue
            rest = frozenset(range(m)) - {i1, i2}
            if th1 & rest and th2 & rest:
                return i1, i2, tuple(sorted(rest))
    return None


def column_conditions(A: PairFrame, B: TropMatrix):
    """Per-column failures of the tie conditions; empty when all hold."""
    lam, mu = A.degrees()
    bad = []
    for j in range(B.cols):
        col = B.column(j)
        t1, t2 = theta(lam, col), theta(mu, col)
        if len(t1) < 2 or len(t2) < 2 or len(t1 | t2) < 3:
            bad.append((j, tuple(sorted(t1)), tuple(sorted(t2))))
    return bad


def build_lift_from_pair(A: PairFrame, B: TropMatrix, route: str = "pair") -> LiftCertificate:
    """Lift ``B`` to rank <= 3 using the frame ``A`` (Cramer's rule per column)."""
    f = A.field
    if B.rows != len(A.col1):
        raise PreconditionError(f"frame has {len(A.col1)} rows, matrix has {B.rows}")
    bad = column_conditions(A, B)
    if bad:
        raise PreconditionError(f"tie conditions fail in columns {[j + 1 for j, *_ in bad]}", bad)
    a1, a2 = A.col1, A.col2
    lam, mu = A.degrees()
    m = B.rows
    grid = [[None] * B.cols for _ in range(m)]
    cols = []
    for j in range(B.cols):
        b = B.column(j)
        th1, th2 = theta(lam, b), theta(mu, b)
        theta1 = min(lam[i] + b[i] for i in th1)
        theta2 = min(mu[i] + b[i] for i in th2)
        i1, i2, triple = pair_split(th1, th2, m)
        tb = [GenPoly.monomial(f, x) for x in b]
        # x1 = sum xi_k * u_k / delta,  x2 = sum xi_k * v_k / delta
        u = [tb[k] * tb[i2] * (a1[k] * a2[i2] - a1[i2] * a2[k]) for k in triple]
        v = [tb[k] * tb[i1] * (a1[i1] * a2[k] - a2[i1] * a1[k]) for k in triple]
        delta = tb[i1] * tb[i2] * (a1[i1] * a2[i2] - a1[i2] * a2[i1])
        xis = [f.one]
        P, Q = u[0], v[0]
        for uk, vk in zip(u[1:], v[1:]):
            xi = choose_xi([[uk, P], [vk, Q]], f)
            xis.append(xi)
            P = P + uk.scale(xi)
            Q = Q + vk.scale(xi)
        if delta.is_zero():
            raise InvariantError(f"column {j + 1}: singular 2x2 system")
        x1 = GenFrac(P) / GenFrac(delta)
        x2 = GenFrac(Q) / GenFrac(delta)
        if x1.is_zero() or x2.is_zero() or x1.deg() != 0 or x2.deg() != 0:
            raise InvariantError(
                f"column {j + 1}: Cramer solutions have degrees "
                f"{x1.deg()} and {x2.deg()}, expected 0"
            )
        grid[i1][j] = x1 * GenFrac.of(tb[i1])
        grid[i2][j] = x2 * GenFrac.of(tb[i2])
        for k, xi in zip(triple, xis):
            grid[k][j] = GenFrac.of(tb[k].scale(f.neg(xi)))
        cols.append(ColumnData((i1, i2), triple, tuple(xis), theta1, theta2))
    lift = SeriesMatrix(f, grid) if B.cols else SeriesMatrix(f, [[] for _ in range(m)])
    cert = LiftCertificate(B, f, A, lift, cols, route)
    if not all(cert.relations()):
        raise InvariantError("frame columns do not annihilate the lift")
    return cert


# ---------------------------------------------------------------------------
# explicit frames


def _two_special_units(f: Field):
    eta = pick_excluding(f, {f.zero, f.one})
    zeta = pick_excluding(f, {f.zero, f.one, eta})
    return eta, zeta


def three_zeros_frame(f) -> PairFrame:
    f = field_from_spec(f)
    if f.is_finite and f.cardinality < 4:
        raise CapacityError(f"{f.name} has fewer than 4 elements")
    eta, zeta = _two_special_units(f)
    one, zero = f.one, f.zero
    return PairFrame.from_columns(f, [one, one, one, one, zero], [one, eta, zeta, zero, one])


def build_lift_3zeros(B: TropMatrix, f) -> LiftCertificate:
    """Lift for a nonnegative 5-row matrix with at least three zeros per column."""
    f = field_from_spec(f)
    A = three_zeros_frame(f)
    if B.rows != ROWS:
        raise PreconditionError("matrix must have 5 rows")
    for j in range(B.cols):
        col = B.column(j)
        if any(x < 0 for x in col):
            raise PreconditionError(f"column {j + 1} has a negative entry")
        if sum(1 for x in col if x == 0) < 3:
            raise PreconditionError(f"column {j + 1} has fewer than three zeros")
    return build_lift_from_pair(A, B, route="three-zeros")


def duplicate_rows_frame(f, rows=(2, 3, 4)) -> PairFrame:
    f = field_from_spec(f)
    z = f.zero
    c1 = [z] * ROWS
    c2 = [z] * ROWS
    a, b, c = rows
    c1[a], c1[b] = f.one, f.neg(f.one)
    c2[b], c2[c] = f.one, f.neg(f.one)
    return PairFrame.from_columns(f, c1, c2)


# ---------------------------------------------------------------------------
# block form


@dataclass(frozen=True)
class BlockShape:
    """Column classes of the block form, by column index.

    ``lead`` columns have zeros in rows 1-2; the other classes are named by
    which of rows 3-5 is positive (``alpha``: row 5, ``beta``: row 4,
    ``gamma``: row 3, ``zero``: none).
    """

    lead: tuple
    alpha: tuple
    beta: tuple
    gamma: tuple
    zero: tuple
    lead_positive: bool
    rest_positive: bool

    @property
    def v(self):
        return len(self.lead)

    @property
    def p(self):
        return len(self.alpha)

    @property
    def q(self):
        return len(self.beta)

    @property
    def r(self):
        return len(self.gamma)

    @property
    def s(self):
        return len(self.zero)

    @property
    def others(self):
        return tuple(sorted(self.alpha + self.beta + self.gamma + self.zero))


class ShapeError(RouteError):
    pass


def block_shape(B: TropMatrix) -> BlockShape:
    """Classify the columns of ``B`` against the block form, or raise ShapeError."""
    if B.rows != ROWS:
        raise ShapeError("block form needs 5 rows")
    if any(x < 0 for r in B.entries for x in r):
        raise ShapeError("block form needs nonnegative entries")
    lead, groups = [], {"alpha": [], "beta": [], "gamma": [], "zero": []}
    patterns = {
        (True, True, False): "alpha",
        (True, False, True): "beta",
        (False, True, True): "gamma",
        (True, True, True): "zero",
    }
    for j in range(B.cols):
        c = B.column(j)
        if c[0] == 0 and c[1] == 0:
            lead.append(j)
            continue
        key = tuple(x == 0 for x in c[2:])
        if key not in patterns:
            raise ShapeError(f"column {j + 1} fits no block")
        groups[patterns[key]].append(j)
    shape = BlockShape(
        tuple(lead),
        *(tuple(groups[k]) for k in ("alpha", "beta", "gamma", "zero")),
        lead_positive=all(B[i, j] > 0 for i in (2, 3, 4) for j in lead),
        rest_positive=all(
            B[i, j] > 0 for i in (0, 1) for k in ("alpha", "beta", "gamma", "zero") for j in groups[k]
        ),
    )
    if shape.v == 0 or shape.p == 0 or shape.q + shape.r + shape.s == 0:
        raise ShapeError(f"block sizes v={shape.v}, p={shape.p}, q+r+s={shape.q + shape.r + shape.s}")
    if not (shape.lead_positive or shape.rest_positive):
        raise ShapeError("neither the lead block nor the remaining top blocks are positive")
    return shape


class _Gauge:
    """Row/column permutation and additive offsets relative to an original matrix.

    Current entry ``(k, l)`` equals original ``(rows[k], cols[l])`` plus
    ``roff[rows[k]] + coff[cols[l]]``.
    """

    def __init__(self, B: TropMatrix):
        self.B = B
        self.rows = list(range(B.rows))
        self.cols = list(range(B.cols))
        self.roff = [Fraction(0)] * B.rows
        self.coff = [Fraction(0)] * B.cols

    def copy(self) -> "_Gauge":
        g = _Gauge.__new__(_Gauge)
        g.B, g.rows, g.cols = self.B, list(self.rows), list(self.cols)
        g.roff, g.coff = list(self.roff), list(self.coff)
        return g

    def current(self) -> TropMatrix:
        B = self.B
        return TropMatrix(
            [[B[r, c] + self.roff[r] + self.coff[c] for c in self.cols] for r in self.rows],
            cols=len(self.cols),
        )

    def add_row(self, k, d):
        self.roff[self.rows[k]] += d

    def add_col(self, l, d):
        self.coff[self.cols[l]] += d

    def permute_rows(self, order):
        self.rows = [self.rows[k] for k in order]

    def permute_cols(self, order):
        self.cols = [self.cols[l] for l in order]

    def pull_back(self, cert: LiftCertificate) -> LiftCertificate:
        """Express a certificate for the current matrix in original coordinates."""
        f = cert.field
        m, n = len(self.rows), len(self.cols)
        grid = [[None] * n for _ in range(m)]
        for k in range(m):
            for l in range(n):
                r, c = self.rows[k], self.cols[l]
                grid[r][c] = cert.lift.entries[k][l].shift(-(self.roff[r] + self.coff[c]))
        frame = cert.frame.permuted(self.rows).shifted(self.roff)
        cols = [None] * n
        for l, cd in enumerate(cert.columns):
            c = self.cols[l]
            cols[c] = ColumnData(
                tuple(self.rows[k] for k in cd.split),
                tuple(self.rows[k] for k in cd.triple),
                cd.xi,
                cd.theta1 - self.coff[c],
                cd.theta2 - self.coff[c],
            )
        lift = SeriesMatrix(f, grid) if n else SeriesMatrix(f, [[] for _ in range(m)])
        return LiftCertificate(self.B, f, frame, lift, cols, cert.route, cert.target_rank, cert.diagnostics)


def _block_witnesses(B: TropMatrix):
    """Witnesses on rows {1,2,4,5} and {1,3,4,5} with the block-form relations."""

    def good_lam(lam):
        return lam[0] == lam[1] and lam[1] <= min(lam[3], lam[4])

    def good_mu(mu):
        return mu[2] == mu[3] and mu[3] <= mu[4] and mu[3] < mu[0]

    candidates = []
    for rows, good in (((0, 1, 3, 4), good_lam), ((0, 2, 3, 4), good_mu)):
        w = find_witness(B, rows)
        if w is None:
            raise RouteError(f"rows {[r + 1 for r in rows]} are tropically independent")
        if good(w.lam):
            candidates.append([w.lam])
            continue
        cells = [c.lam for c in witness_cells(B, rows) if good(c.lam)]
        if not cells:
            raise RouteError(f"no witness on rows {[r + 1 for r in rows]} has the block relations")
        candidates.append(cells)
    return candidates


def build_lift_block(B: TropMatrix, f, shape: BlockShape | None = None) -> LiftCertificate:
    """Lift a nonnegative matrix in block form with tropical rank <= 3."""
    f = field_from_spec(f)
    if f.is_finite and f.cardinality < 4:
        raise CapacityError(f"{f.name} has fewer than 4 elements")
    shape = shape or block_shape(B)
    g = _Gauge(B)
    # shift so that the least entry of the non-lead top blocks is zero
    others = shape.others
    mval = min(B[i, j] for i in (0, 1) for j in others)
    if mval != 0:
        g.add_row(0, -mval)
        g.add_row(1, -mval)
        for j in shape.lead:
            g.add_col(j, mval)
    cur = g.current()
    if not all(cur[i, j] > 0 for i in (2, 3, 4) for j in shape.lead):
        raise ShapeError("lead block is not positive after the shift")

    def zero_free(group):
        return [j for j in group if cur[0, j] > 0 and cur[1, j] > 0]

    b2, b3 = zero_free(shape.beta), zero_free(shape.gamma)
    if b2 and b3:
        j3 = next((j for j in others if (cur[0, j] == 0) != (cur[1, j] == 0)), None)
        if j3 is not None:
            cols = [shape.lead[0], b2[0], b3[0], j3]
            sub = cur.submatrix([0, 1, 2, 3], cols)
            if nonsingular_submatrix(sub, 4) is not None:
                raise PreconditionError("a 4x4 submatrix is tropically non-singular")
        raise RouteError("both middle blocks have zero-free columns")
    if b3:
        g.permute_rows([0, 1, 3, 2, 4])
        cur = g.current()
    lam_options, mu_options = _block_witnesses(cur)
    eta = pick_excluding(f, {f.zero, f.one})
    last = None
    for lam in lam_options:
        for mu in mu_options:
            mono = lambda e, c=None: GenPoly.monomial(f, e, c)
            A = PairFrame(
                f,
                (mono(lam[0]), mono(lam[1]), GenPoly.zero(f), mono(lam[3]), mono(lam[4])),
                (mono(mu[0]), GenPoly.zero(f), mono(mu[2]), mono(mu[3]), mono(mu[4], eta)),
            )
            if not check_pair_premise(A):
                last = "frame premise fails"
                continue
            bad = column_conditions(A, cur)
            if bad:
                last = f"tie conditions fail in columns {[j + 1 for j, *_ in bad]}"
                continue
            return g.pull_back(build_lift_from_pair(A, cur, route="block"))
    raise RouteError(last or "no block frame")


# ---------------------------------------------------------------------------
# generic fallback


@dataclass
class PairSearchResult:
    frame: PairFrame
    missing: tuple  # rows absent from the first / second frame column
    cells: tuple


def _profile_codes(cells, pair_index, other):
    n = len(cells[0].profile) if cells else 0
    codes = np.full((len(cells), n), other, dtype=np.int64)
    for a, cell in enumerate(cells):
        for j, S in enumerate(cell.profile):
            if len(S) == 2:
                codes[a, j] = pair_index[tuple(sorted(S))]
    return codes


def generic_pair_search(B: TropMatrix, f, diagnostics: list | None = None):
    """Frame from two 4-row witness cells with different missing rows, or None.

    The cells' argmin profiles must differ in every column where both are a
    bare pair, which is exactly the joint tie condition.  Rows shared by both
    witnesses get pairwise distinct units in the second column, so no 2x2
    minor of the frame can cancel.
    """
    f = field_from_spec(f)
    diagnostics = diagnostics if diagnostics is not None else []
    if B.rows != ROWS:
        raise PreconditionError("matrix must have 5 rows")
    if f.is_finite and f.cardinality < 4:
        raise CapacityError(f"{f.name} has fewer than 4 elements")
    units = []
    for u in f.iter_units():
        units.append(u)
        if len(units) == 3:
            break
    pair_index = {p: t for t, p in enumerate(combinations(range(ROWS), 2))}
    cells = {}
    for r in range(ROWS):
        rows = tuple(i for i in range(ROWS) if i != r)
        cells[r] = witness_cells(B, rows)
        if not cells[r]:
            diagnostics.append(f"rows without {r + 1}: no witness")
    for r1, r2 in combinations(range(ROWS), 2):
        c1, c2 = cells[r1], cells[r2]
        if not c1 or not c2:
            continue
        if B.cols:
            k1 = _profile_codes(c1, pair_index, -1)
            k2 = _profile_codes(c2, pair_index, -2)
            clash = (k1[:, None, :] == k2[None, :, :]).any(axis=2)
            hits = np.argwhere(~clash)
        else:
            hits = np.array([[0, 0]])
        if len(hits) == 0:
            diagnostics.append(f"missing rows ({r1 + 1},{r2 + 1}): no compatible cells")
            continue
        for a, b in hits:
            lam, mu = c1[a].lam, c2[b].lam
            shared = [i for i in range(ROWS) if i not in (r1, r2)]
            coef = {i: f.one for i in range(ROWS)}
            for i, u in zip(shared, units):
                coef[i] = u
            col1 = tuple(GenPoly.zero(f) if lam[i] == INF else GenPoly.monomial(f, lam[i]) for i in range(ROWS))
            col2 = tuple(GenPoly.zero(f) if mu[i] == INF else GenPoly.monomial(f, mu[i], coef[i]) for i in range(ROWS))
            A = PairFrame(f, col1, col2)
            if check_pair_premise(A) and not column_conditions(A, B):
                return PairSearchResult(A, (r1, r2), (c1[a], c2[b]))
            diagnostics.append(f"missing rows ({r1 + 1},{r2 + 1}): frame rejected")
    return None


# ---------------------------------------------------------------------------
# the driver


def _zero_count(col):
    return sum(1 for x in col if x == 0)


def _normalize(g: _Gauge, *, witness=True):
    """Nonnegative entries, >= 2 zeros per column, a zero in every row."""
    cur = g.current()
    ok = all(x >= 0 for r in cur.entries for x in r) and all(
        _zero_count(cur.column(j)) >= 2 for j in range(cur.cols)
    )
    if not ok:
        if not witness:
            raise RouteError("matrix left the normal form")
        w = find_witness(cur)
        if w is None:
            raise PreconditionError("rows are tropically independent")
        for k, d in enumerate(w.lam):
            g.add_row(k, d)
        cur = g.current()
        for l in range(cur.cols):
            g.add_col(l, -min(cur.column(l)))
        cur = g.current()
    for k in range(cur.rows):
        h = min(cur.row(k), default=0)
        if h:
            g.add_row(k, -h)
    return g.current()


def _dispatch(g: _Gauge, f: Field, cap: int) -> LiftCertificate:
    n = len(g.cols)
    for _ in range(n + 2):
        cur = _normalize(g)
        if all(_zero_count(cur.column(j)) >= 3 for j in range(cur.cols)):
            return g.pull_back(build_lift_3zeros(cur, f))
        j0 = next(j for j in range(cur.cols) if _zero_count(cur.column(j)) == 2)
        zrows = [i for i in range(ROWS) if cur[i, j0] == 0]
        rest = [i for i in range(ROWS) if i not in zrows]
        g.permute_rows(zrows + rest)
        g.permute_cols([j0] + [j for j in range(cur.cols) if j != j0])
        cur = g.current()
        low = [tuple(cur[i, j] == 0 for i in (2, 3, 4)) for j in range(cur.cols)]
        one_zero = [j for j in range(cur.cols) if sum(low[j]) == 1]
        two_zero = [j for j in range(cur.cols) if sum(low[j]) == 2]
        if one_zero:
            # rows of the single zero and the positive pair
            j = one_zero[0]
            single = 2 + low[j].index(True)
            pair = [i for i in (2, 3, 4) if i != single]
            for jj in range(cur.cols):
                if (cur[pair[0], jj] == 0) != (cur[pair[1], jj] == 0):
                    raise RouteError("rows of the positive pair split a column")
            order = pair + [0, 1, single]
            sub = _Gauge(cur)
            sub.permute_rows(order)
            cert = build_lift_block(sub.current(), f)
            return g.pull_back(sub.pull_back(cert))
        if two_zero:
            alpha = next(2 + low[j].index(False) for j in two_zero)
            order = [0, 1] + [i for i in (2, 3, 4) if i != alpha] + [alpha]
            sub = _Gauge(cur)
            sub.permute_rows(order)
            cert = build_lift_block(sub.current(), f)
            return g.pull_back(sub.pull_back(cert))
        # rows 3-5 vanish together or are jointly positive in every column
        G = [j for j in range(cur.cols) if len({cur[2, j], cur[3, j], cur[4, j]}) > 1]
        if not G:
            return g.pull_back(build_lift_from_pair(duplicate_rows_frame(f), cur, route="duplicate-rows"))
        m = min(cur[i, j] for j in G for i in (2, 3, 4))
        for j in range(cur.cols):
            d = min(m, cur[2, j])
            if d:
                g.add_col(j, -d)
        g.add_row(0, m)
        g.add_row(1, m)
    raise RouteError("reduction loop did not settle")


def kapranov_upper(B: TropMatrix, f, cap: int = DEFAULT_CAP, use_fallback: bool = True) -> LiftCertificate:
    """Verified lift of ``B`` (5 rows, tropical rank <= 3) of rank at most 3.

    Raises :class:`PreconditionError` for tropical rank above 3,
    :class:`CapacityError` for fields with fewer than 4 elements, and
    :class:`ConstructionError` if no route produces a verified certificate.
    """
    f = field_from_spec(f)
    if B.rows != ROWS:
        raise PreconditionError(f"expected 5 rows, got {B.rows}")
    if f.is_finite and f.cardinality < 4:
        raise CapacityError(f"{f.name} has fewer than 4 elements")
    tr = trop_rank(B, cap)
    if tr > TARGET_RANK:
        raise PreconditionError(f"tropical rank {tr} exceeds {TARGET_RANK}")
    diagnostics: list = []
    if B.cols == 0:
        cert = build_lift_from_pair(three_zeros_frame(f), B, route="empty")
        return _accept(cert, diagnostics)
    try:
        cert = _dispatch(_Gauge(B), f, cap)
        return _accept(cert, diagnostics)
    except (LiftError, _Rejected) as exc:
        diagnostics.append(f"{type(exc).__name__}: {exc}")
        log.debug("reduction route failed: %s", exc)
    if use_fallback:
        found = generic_pair_search(B, f, diagnostics)
        if found is not None:
            try:
                cert = build_lift_from_pair(found.frame, B, route="generic")
                return _accept(cert, diagnostics)
            except (LiftError, _Rejected) as exc:
                diagnostics.append(f"generic: {exc}")
    raise ConstructionError("no route produced a verified lift", diagnostics)


class _Rejected(Exception):
    pass


def _accept(cert: LiftCertificate, diagnostics) -> LiftCertificate:
    report, rel = cert.check()
    if not report or not all(rel):
        raise _Rejected(f"{cert.route}: certificate failed verification ({report.first_failure() or 'relations'})")
    cert.diagnostics = list(diagnostics)
    return cert
