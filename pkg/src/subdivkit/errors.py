"""Exception types raised across the package."""

from __future__ import annotations

import os


class SubdivError(Exception):
    """Base class for all package errors."""


class ResourceLimitError(SubdivError):
    """A computation would exceed the coefficient budget."""


class EigenError(SubdivError):
    """Eigenvalue 1 is missing or not simple for a transition operator."""


class InadmissibleError(SubdivError):
    """No (m_s, n_s) pair was found for a shift parameter within the search bounds."""


class InfeasibleError(SubdivError):
    """A construction request has no solution."""


DEFAULT_MAX_COEFFS = 10**7


def max_coeffs() -> int:
    """Coefficient budget, overridable through ``SUBDIVKIT_MAX_COEFFS``."""
    raw = os.environ.get("SUBDIVKIT_MAX_COEFFS")
    if raw is None:
        return DEFAULT_MAX_COEFFS
    try:
        return int(raw)
    except ValueError:
        return DEFAULT_MAX_COEFFS


def check_budget(n_coeffs: int, what: str = "sequence") -> None:
    limit = max_coeffs()
    if n_coeffs > limit:
        raise ResourceLimitError(
            f"{what} would need ~{n_coeffs} coefficients (limit {limit}); "
            "raise SUBDIVKIT_MAX_COEFFS to allow it"
        )
