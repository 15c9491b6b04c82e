"""Direct numerical evaluation of the unconditional block error probabilities.

The triple integral over (gamma, h, r) is evaluated with the gamma level done
in closed form given the conditional SIR CDF erf(k sqrt(gamma)), where
k = t / (2 sqrt(G h r^-4)):

* linear ramp: the ramp integral against erf has an elementary antiderivative;
* normal approximation: integrating by parts turns it into E[F(gamma(U))]
  over a standard normal U, done by Gauss-Hermite.

The fading level uses x = m h in log space (trapezoid, double-exponential
decay), the distance level uses rho = pi lambda_b r^2 (Bob) or r^2 / D^2
(Eve) in log space with composite Gauss-Legendre panels.  Each resolution
level halves every step; the difference between the last two levels is the
error estimate.
"""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np
from scipy import special

from ..fbl import FblCode, sir_at_normal_quantile
from ..params import DerivedConstants, LinearQParams, SystemParams

_SQRT_PI = math.sqrt(math.pi)
_SQRT2PI = math.sqrt(2.0 * math.pi)
_GL_X, _GL_W = np.polynomial.legendre.leggauss(8)

# (x-step, distance panel width, Gauss-Hermite order) at level 0
_BASE = (0.4, 2.0, 24)
_MAX_LEVEL = 4
_CHUNK_ENTRIES = 2_000_000

# series coefficients of (1/u^2) int_0^{u^2} erf(sqrt w) dw around u = 0
_RAMP_COEF = np.array([2.0 / _SQRT_PI * (-1) ** j / (math.factorial(j) * (2 * j + 1) * (j + 1.5))
                       for j in range(22)])


class QuadratureAccuracyError(ArithmeticError):
    def __init__(self, estimate: float, error: float, tol: float):
        self.estimate = estimate
        self.error = error
        super().__init__(
            f"quadrature did not reach tolerance {tol:g}: estimate={estimate:.17g}, error={error:.3g}")


def mean_erf_sqrt(u):
    """(1/u^2) * int_0^{u^2} erf(sqrt(w)) dw, stable for small u."""
    u = np.asarray(u, dtype=float)
    out = np.empty_like(u)
    small = u < 0.5
    us = u[small]
    u2 = us * us
    acc = np.zeros_like(us)
    for c in _RAMP_COEF[::-1]:
        acc = acc * u2 + c
    out[small] = acc * us
    ul = u[~small]
    e = special.erf(ul)
    out[~small] = e + np.exp(-ul * ul) / (ul * _SQRT_PI) - e / (2.0 * ul * ul)
    return out


def ramp_conditional_error(k, linq: LinearQParams):
    """E[linear-ramp error | k] for conditional SIR CDF erf(k sqrt(gamma))."""
    k = np.asarray(k, dtype=float)
    hi = linq.theta + linq.a
    lo = max(0.0, linq.theta - linq.a)
    val = hi * mean_erf_sqrt(k * math.sqrt(hi))
    if lo > 0:
        val = val - lo * mean_erf_sqrt(k * math.sqrt(lo))
    return linq.mu / _SQRT2PI * val


@lru_cache(maxsize=64)
def _hermite_thresholds(n: int, R: float, order: int):
    x, w = special.roots_hermitenorm(order)
    g = sir_at_normal_quantile(x, FblCode(n, R))
    return np.sqrt(g), w / _SQRT2PI


def normal_conditional_error(k, n: int, R: float, order: int = 48):
    """E[Q(sqrt(n/V)(C - R)) | k] via Gauss-Hermite over the normal quantile."""
    k = np.asarray(k, dtype=float)
    sg, w = _hermite_thresholds(n, R, order)
    return special.erf(k[..., None] * sg).dot(w)


def _distance_rule(receiver: str, panel: float):
    u_lo = math.log(1e-14)
    u_hi = math.log(40.0) if receiver == "bob" else 0.0
    n_pan = max(1, int(math.ceil((u_hi - u_lo) / panel)))
    edges = np.linspace(u_lo, u_hi, n_pan + 1)
    mid = 0.5 * (edges[1:] + edges[:-1])
    half = 0.5 * (edges[1:] - edges[:-1])
    u = (mid[:, None] + half[:, None] * _GL_X).ravel()
    w = (half[:, None] * _GL_W).ravel()
    # rho ~ Exp(1) for Bob, Uniform(0, 1) for Eve
    dens = np.exp(u - np.exp(u)) if receiver == "bob" else np.exp(u)
    return u, w * dens


def _fading_rule(m: int, step: float):
    v_lo = (math.log(1e-15) + math.lgamma(m + 1.0)) / m
    v_hi = math.log(special.gammainccinv(m, 1e-17))
    v = np.arange(v_lo, v_hi + step, step)
    return v, step * np.exp(m * v - np.exp(v) - math.lgamma(m))


def _kappa(params: SystemParams, dc: DerivedConstants, receiver: str) -> float:
    """k = kappa * rho / sqrt(x) with rho the normalised squared distance."""
    rm = math.sqrt(params.m)
    if receiver == "bob":
        return dc.t * rm / (2.0 * math.pi * params.lambda_b * math.sqrt(params.G_b))
    return dc.t * params.D**2 * rm / (2.0 * math.sqrt(params.G_e))


def _integrate_level(kappa, receiver, params, dc, surrogate, level):
    scale = 2**level
    step, panel, order = _BASE[0] / scale, _BASE[1] / scale, _BASE[2] * scale
    u, wu = _distance_rule(receiver, panel)
    v, wv = _fading_rule(params.m, step)
    # bound the (rows, v, hermite) working array to a few million entries
    width = v.size * (1 if surrogate == "linearized" else order)
    chunk = max(1, _CHUNK_ENTRIES // width)
    total = 0.0
    for i in range(0, u.size, chunk):
        k = kappa * np.exp(u[i:i + chunk, None] - 0.5 * v[None, :])
        if surrogate == "linearized":
            cond = ramp_conditional_error(k, dc.linq)
        else:
            cond = normal_conditional_error(k, params.n, params.R, order)
        total += float(wu[i:i + chunk].dot(cond.dot(wv)))
    return total


def _check(params: SystemParams, surrogate: str):
    if params.eta != 4.0:
        raise ValueError(f"quadrature uses the eta = 4 Levy SIR density; got eta = {params.eta:g}")
    if surrogate not in ("linearized", "normal"):
        raise ValueError(f"unknown surrogate {surrogate!r}")


def _eps_quadrature(params, dc, surrogate, receiver, tol, return_error, min_level):
    _check(params, surrogate)
    kappa = _kappa(params, dc, receiver)
    prev = _integrate_level(kappa, receiver, params, dc, surrogate, min_level)
    for level in range(min_level + 1, _MAX_LEVEL + 1):
        cur = _integrate_level(kappa, receiver, params, dc, surrogate, level)
        err = abs(cur - prev)
        if err <= tol:
            val = min(max(cur, 0.0), 1.0)
            return (val, err) if return_error else val
        prev = cur
    raise QuadratureAccuracyError(cur, err, tol)


def eps_b_quadrature(params: SystemParams, dc: DerivedConstants, surrogate: str = "normal",
                     tol: float = 1e-8, return_error: bool = False, min_level: int = 0):
    """Bob's unconditional block error probability by direct quadrature."""
    return _eps_quadrature(params, dc, surrogate, "bob", tol, return_error, min_level)


def eps_e_quadrature(params: SystemParams, dc: DerivedConstants, surrogate: str = "normal",
                     tol: float = 1e-8, return_error: bool = False, min_level: int = 0):
    """Eve's unconditional block error probability by direct quadrature."""
    return _eps_quadrature(params, dc, surrogate, "eve", tol, return_error, min_level)
