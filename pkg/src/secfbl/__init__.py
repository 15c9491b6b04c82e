"""Finite-blocklength physical-layer secrecy metrics for uplink IoT networks.

Block error probabilities at the serving BS (Bob) and at an eavesdropper
(Eve) are computed three ways: Meijer-G closed forms, direct quadrature and
Monte Carlo simulation of the underlying Poisson networks.
"""

from .analytic import (
    MetricBundle,
    appendix_sum,
    eps_b_closed_form,
    eps_b_quadrature,
    eps_e_closed_form,
    eps_e_quadrature,
    evaluate,
    secrecy_metrics,
)
from .montecarlo import Estimate, McConfig, estimate_distributional, estimate_spatial
from .params import DerivedConstants, SystemParams, derive_constants

__version__ = "0.1.0"

__all__ = [
    "SystemParams",
    "DerivedConstants",
    "derive_constants",
    "MetricBundle",
    "secrecy_metrics",
    "evaluate",
    "eps_b_closed_form",
    "eps_e_closed_form",
    "appendix_sum",
    "eps_b_quadrature",
    "eps_e_quadrature",
    "Estimate",
    "McConfig",
    "estimate_distributional",
    "estimate_spatial",
]
