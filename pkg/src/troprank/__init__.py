"""Tropical rank, Kapranov-rank-3 lifts of 5-row matrices, and first-order
lower-bound certificates over small finite fields."""

__version__ = "0.1.0"

from .scalars import GF4, Q, CapacityError, Field, FieldError, PrimeField, field_from_spec, field_units, pick_excluding
from .hahn import GenFrac, GenPoly, SeriesMatrix, deg_matrix, mat_det, mat_rank, verify_lift
from .tropical import (
    TropMatrix,
    TropSizeError,
    Witness,
    find_witness,
    is_trop_singular,
    scale,
    theta,
    trop_perm,
    trop_rank,
    witness_feasible,
)
from .lift import (
    ConstructionError,
    LiftCertificate,
    PairFrame,
    PreconditionError,
    build_lift_3zeros,
    build_lift_block,
    build_lift_from_pair,
    check_pair_premise,
    choose_xi,
    generic_pair_search,
    kapranov_upper,
)
from .obstruct import (
    CERTIFIED,
    INCONCLUSIVE,
    BudgetError,
    ObstructionReport,
    certify_lower_bound,
    first_order_coeff,
    singular_minors,
)
from .formats import EXAMPLES, MatrixDoc, certificate_from_json, certificate_to_json, explicit_f3_lift, verify_certificate

__all__ = [name for name in dir() if not name.startswith("_")]
