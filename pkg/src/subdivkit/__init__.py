"""Exact-arithmetic toolkit for shifted interpolatory subdivision schemes."""

from __future__ import annotations

from .analysis import (
    linear_phase_check,
    shift_parameter,
    sm2,
    sminf_lower_bound,
    smoothness_report,
    sum_rule_factorization,
    sum_rule_order,
)
from .construct import ConstructionSpec, construct, optimize_free_parameters, smoothness_gate
from .curves import subdivide_polygon
from .errors import EigenError, InadmissibleError, InfeasibleError, ResourceLimitError, SubdivError
from .interp import admissible_params, verify_interpolatory
from .quasistat import SchemeSpec, compose_masks, quasi_subdivide, verify_quasi
from .seqalg import FiniteSequence, Mask, convolve, iterated_mask, subdivide, subdivide_once
from .transition import eval_phi, sample_phi_grid, spectrum, transition_matrix

__version__ = "0.1.0"

__all__ = [
    "FiniteSequence",
    "Mask",
    "convolve",
    "iterated_mask",
    "subdivide",
    "subdivide_once",
    "sum_rule_factorization",
    "sum_rule_order",
    "shift_parameter",
    "linear_phase_check",
    "sm2",
    "sminf_lower_bound",
    "smoothness_report",
    "transition_matrix",
    "spectrum",
    "eval_phi",
    "sample_phi_grid",
    "admissible_params",
    "verify_interpolatory",
    "ConstructionSpec",
    "construct",
    "smoothness_gate",
    "optimize_free_parameters",
    "SchemeSpec",
    "compose_masks",
    "quasi_subdivide",
    "verify_quasi",
    "subdivide_polygon",
    "SubdivError",
    "ResourceLimitError",
    "EigenError",
    "InadmissibleError",
    "InfeasibleError",
]
