"""Finite-blocklength decoding error: normal approximation and its linear ramp."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .params import LOG2E, LinearQParams
from .specfn import q_function

_SQRT2PI = math.sqrt(2.0 * math.pi)


@dataclass(frozen=True)
class FblCode:
    n: int
    R: float

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"blocklength n must be >= 1, got {self.n}")
        if not self.R > 0:
            raise ValueError(f"rate R must be > 0, got {self.R}")


def capacity(gamma):
    """Shannon capacity log2(1 + gamma) in bits per channel use."""
    return np.log1p(np.asarray(gamma, dtype=float))[()] * LOG2E


def dispersion(gamma):
    """Channel dispersion gamma (gamma + 2) (log2 e)^2 / (1 + gamma)^2."""
    g = np.asarray(gamma, dtype=float)
    # factored so that large gamma does not overflow
    return ((g / (1.0 + g)) * ((g + 2.0) / (1.0 + g)) * LOG2E**2)[()]


def normal_argument(gamma, code: FblCode):
    """sqrt(n / V) (C - R); -inf at gamma = 0, +inf at gamma = inf."""
    g = np.asarray(gamma, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        arg = np.sqrt(code.n / dispersion(g)) * (capacity(g) - code.R)
    return np.where(g > 0, np.where(np.isinf(g), np.inf, arg), -np.inf)[()]


def error_prob_normal(gamma, code: FblCode):
    """Block error probability Q(sqrt(n/V(gamma)) (C(gamma) - R))."""
    return q_function(normal_argument(gamma, code))


def error_prob_linearized(gamma, linq: LinearQParams):
    """Three-piece ramp: 1 below theta - a, 0 above theta + a, linear between."""
    g = np.asarray(gamma, dtype=float)
    ramp = 0.5 - linq.mu * (g - linq.theta) / _SQRT2PI
    return np.clip(ramp, 0.0, 1.0)[()]


def sir_at_normal_quantile(u, code: FblCode, iters: int = 200):
    """SIR gamma solving sqrt(n/V(gamma)) (C(gamma) - R) = u.

    The left side is strictly increasing in gamma, so log-space bisection
    converges; ``u`` may be an array.
    """
    u = np.atleast_1d(np.asarray(u, dtype=float))
    lo = np.full(u.shape, -700.0)
    hi = np.full(u.shape, 700.0)
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        above = normal_argument(np.exp(mid), code) > u
        hi = np.where(above, mid, hi)
        lo = np.where(above, lo, mid)
        if np.all(hi - lo < 1e-15):
            break
    return np.exp(0.5 * (lo + hi))
