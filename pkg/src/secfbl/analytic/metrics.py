"""Secrecy metrics and a single entry point over the analytic evaluation paths."""

from __future__ import annotations

import math
from dataclasses import dataclass

from ..params import DerivedConstants, SystemParams, derive_constants
from .closed_form import eps_b_closed_form, eps_e_closed_form
from .quadrature import eps_b_quadrature, eps_e_quadrature

__all__ = ["METHODS", "ANALYTIC_METHODS", "MetricBundle", "secrecy_metrics", "evaluate"]

ANALYTIC_METHODS = ("closed_form", "quadrature_linearized", "quadrature_normal")
METHODS = ANALYTIC_METHODS + ("monte_carlo",)


@dataclass(frozen=True)
class MetricBundle:
    """eps_b, eps_e and the secrecy metrics derived from them.

    ``p_out = 1 - p_sec`` and ``t_sec = (p R) p_sec`` hold exactly in floating
    point.  ``fallback_reason`` is non-empty when the requested method could
    not be used and ``method`` names the one that was.
    """

    eps_b: float
    eps_e: float
    p_sec: float
    p_out: float
    t_sec: float
    method: str
    ci_half_width: float = math.nan
    fallback_reason: str = ""


def secrecy_metrics(eps_b: float, eps_e: float, params: SystemParams,
                    method: str = "closed_form", ci_half_width: float = math.nan,
                    fallback_reason: str = "") -> MetricBundle:
    """Secure success (1 - eps_b) eps_e, its complement, and p R times it."""
    for name, v in (("eps_b", eps_b), ("eps_e", eps_e)):
        if not 0.0 <= v <= 1.0:
            raise ValueError(f"{name} = {v!r} is not a probability")
    if method not in METHODS:
        raise ValueError(f"unknown method {method!r}")
    p_sec = (1.0 - eps_b) * eps_e
    return MetricBundle(eps_b=float(eps_b), eps_e=float(eps_e), p_sec=p_sec, p_out=1.0 - p_sec,
                        t_sec=params.p * params.R * p_sec, method=method,
                        ci_half_width=ci_half_width, fallback_reason=fallback_reason)


def evaluate(params: SystemParams, method: str = "closed_form",
             dc: DerivedConstants | None = None, tol: float = 1e-8) -> MetricBundle:
    """Evaluate an analytic method.

    A closed-form request outside its regime (theta <= a) falls back to
    quadrature with the same linear surrogate; the bundle records why.
    """
    if method not in ANALYTIC_METHODS:
        raise ValueError(f"evaluate handles {ANALYTIC_METHODS}, got {method!r}")
    dc = derive_constants(params) if dc is None else dc
    reason = ""
    if method == "closed_form" and not dc.closed_form_valid and params.eta == 4.0:
        reason = dc.closed_form_reason
        method = "quadrature_linearized"
    if method == "closed_form":
        eb, ee = eps_b_closed_form(dc, params), eps_e_closed_form(dc, params)
    else:
        surrogate = method.split("_", 1)[1]
        eb = eps_b_quadrature(params, dc, surrogate, tol=tol)
        ee = eps_e_quadrature(params, dc, surrogate, tol=tol)
    return secrecy_metrics(eb, ee, params, method, fallback_reason=reason)
