"""Sparse-grid sampling recovery of periodic functions via tensorized trigonometric interpolation."""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    Degenerate,
    DimensionMismatch,
    InfiniteSet,
    InvalidParams,
    LengthMismatch,
    NotSolid,
    SparseRecoverError,
    TooLarge,
    ValidityWindow,
)
from .index_sets import (  # noqa: E402
    IndexSet,
    Provenance,
    SmoothnessParams,
    dyadic_count_sum,
    energy_set,
    energy_set_eps,
    hyperbolic_cross,
    is_solid,
    smolyak_set,
    weight_psi,
)
from .sampling_operator import GridReport, apply_Q, q_k, reproduction_check, sampling_grid  # noqa: E402
from .spectral import NormKind, SpectralFunction, block_of, lp_block, norm, norm_hab_dyadic  # noqa: E402

__all__ = [
    "Degenerate",
    "DimensionMismatch",
    "GridReport",
    "IndexSet",
    "InfiniteSet",
    "InvalidParams",
    "LengthMismatch",
    "NormKind",
    "NotSolid",
    "Provenance",
    "SmoothnessParams",
    "SparseRecoverError",
    "SpectralFunction",
    "TooLarge",
    "ValidityWindow",
    "apply_Q",
    "block_of",
    "dyadic_count_sum",
    "energy_set",
    "energy_set_eps",
    "hyperbolic_cross",
    "is_solid",
    "lp_block",
    "norm",
    "norm_hab_dyadic",
    "q_k",
    "reproduction_check",
    "sampling_grid",
    "smolyak_set",
    "weight_psi",
]
