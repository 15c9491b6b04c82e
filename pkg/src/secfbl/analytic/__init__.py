"""Closed-form and quadrature evaluation of the block error probabilities."""

from .closed_form import (
    AppendixTerms,
    ClosedFormRegimeError,
    appendix_sum,
    appendix_terms,
    eps_b_closed_form,
    eps_e_closed_form,
)
from .metrics import ANALYTIC_METHODS, METHODS, MetricBundle, evaluate, secrecy_metrics
from .quadrature import QuadratureAccuracyError, eps_b_quadrature, eps_e_quadrature

__all__ = [
    "AppendixTerms",
    "ClosedFormRegimeError",
    "QuadratureAccuracyError",
    "MetricBundle",
    "METHODS",
    "ANALYTIC_METHODS",
    "appendix_sum",
    "appendix_terms",
    "eps_b_closed_form",
    "eps_e_closed_form",
    "eps_b_quadrature",
    "eps_e_quadrature",
    "secrecy_metrics",
    "evaluate",
]
