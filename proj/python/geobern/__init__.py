"""Composite-Bernstein geodesic trajectory planning."""

from ._core import (
    GaussianField,
    PlanResult,
    basis_eval,
    canned_field_2d,
    canned_field_3d,
    geodesic_residual,
    plan,
    sigma_from_radius,
)

__all__ = [
    "GaussianField",
    "PlanResult",
    "basis_eval",
    "canned_field_2d",
    "canned_field_3d",
    "geodesic_residual",
    "plan",
    "sigma_from_radius",
]
