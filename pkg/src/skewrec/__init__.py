"""Exact finite models of skew products and their cocycle recurrence."""

from .measure import (
    CellSpace,
    DyadicFamily,
    Perm,
    SpaceMismatchError,
    compose,
    cycles,
    dyadic_family,
    halmos_distance,
    inverse,
    min_cycle_length,
    order,
    power,
    uniform_distance,
)
from .skew import (
    RecurrenceReport,
    SkewProduct,
    WitnessSearch,
    apply,
    cocycle,
    find_recurrence_witness,
    holonomy,
    period,
    product_distance,
    product_perm,
    recurrence_profile,
    recurrence_set,
)
from .towers import (
    FiberConjugator,
    PreconditionError,
    RecurrenceCertificate,
    Recurrentized,
    RokhlinTower,
    SimplePartition,
    build_tower,
    certify_recurrence,
    conjugate,
    recurrentize,
    simple_cocycle,
    trivialize_on_tower,
    verify_certificate,
)

__version__ = "0.1.0"
