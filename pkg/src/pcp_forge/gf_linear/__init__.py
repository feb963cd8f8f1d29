"""Finite fields, canonical subspaces, uniform subspace sampling."""

from .field import Field, FieldError, field_arith, get_field
from .sampling import (
    make_rng,
    random_point_in,
    random_vector,
    sample_subspace,
    sample_subspace_containing,
)
from .subspace import (
    LIMITS,
    BudgetExceeded,
    DimensionMismatch,
    EdgeSpaceView,
    RetryCapExceeded,
    Subspace,
    count_subspaces,
    enumerate_points,
    enumerate_subspaces,
    enumerate_subspaces_containing,
    is_disjoint,
    left_of,
    project_side,
    right_of,
    span,
    subspace_intersect,
    subspace_sum,
)
from .checks import (
    check_triplet_equivalence,
    mc_check_disjointness,
    mc_check_full_dimension,
    mc_check_sampler,
)

__all__ = [name for name in dir() if not name.startswith("_")]
