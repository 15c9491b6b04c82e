"""Densities, CDFs and exact samplers for the random quantities of the model.

Samplers take a ``numpy.random.Generator``; use :func:`make_rng` to obtain
one addressed by ``(master_seed, stream_index)`` so that results do not
depend on how work is split across threads.
"""

from __future__ import annotations

import math

import numpy as np
from scipy import special

__all__ = [
    "make_rng",
    "nearest_bs_distance_from_uniform",
    "sample_nearest_bs_distance",
    "nearest_bs_cdf",
    "eve_distance_from_uniform",
    "sample_eve_distance",
    "eve_distance_cdf",
    "sample_fading_gain",
    "fading_cdf",
    "sample_levy_interference",
    "levy_cdf",
    "levy_pdf",
    "conditional_sir_pdf",
    "conditional_sir_cdf",
    "laplace_transform_interference",
]


def make_rng(master_seed: int, stream_index: int = 0) -> np.random.Generator:
    """Counter-based (Philox) generator for one independent stream."""
    seq = np.random.SeedSequence([int(master_seed), int(stream_index)])
    return np.random.Generator(np.random.Philox(seq))


# nearest BS distance: f(r) = 2 pi lambda r exp(-pi lambda r^2)

def nearest_bs_distance_from_uniform(u, lambda_b: float):
    u = np.asarray(u, dtype=float)
    return np.sqrt(-np.log(u) / (math.pi * lambda_b))[()]


def sample_nearest_bs_distance(rng: np.random.Generator, lambda_b: float, size=None):
    # 1 - U keeps the argument of the log in (0, 1]
    return nearest_bs_distance_from_uniform(1.0 - rng.random(size), lambda_b)


def nearest_bs_cdf(r, lambda_b: float):
    r = np.asarray(r, dtype=float)
    return (-np.expm1(-math.pi * lambda_b * r**2))[()]


# Eve uniform in a disk of radius D: f(r) = 2 r / D^2

def eve_distance_from_uniform(u, D: float):
    return (D * np.sqrt(np.asarray(u, dtype=float)))[()]


def sample_eve_distance(rng: np.random.Generator, D: float, size=None):
    return eve_distance_from_uniform(rng.random(size), D)


def eve_distance_cdf(r, D: float):
    r = np.asarray(r, dtype=float)
    return np.clip((r / D) ** 2, 0.0, 1.0)[()]


# Nakagami-m power gain: Gamma(shape m, mean 1)

def sample_fading_gain(rng: np.random.Generator, m: int, size=None):
    return rng.gamma(shape=m, scale=1.0 / m, size=size)


def fading_cdf(h, m: int):
    return special.gammainc(m, m * np.asarray(h, dtype=float))[()]


# Levy interference (eta = 4): f(x) = t exp(-t^2 / (4x)) / (2 sqrt(pi) x^{3/2})

def sample_levy_interference(rng: np.random.Generator, t: float, size=None):
    """Exact draw via X = (t^2 / 2) / Z^2 with Z standard normal."""
    z = rng.standard_normal(size)
    return 0.5 * t**2 / z**2


def levy_cdf(x, t: float):
    x = np.asarray(x, dtype=float)
    with np.errstate(divide="ignore"):
        return np.where(x > 0, special.erfc(t / (2.0 * np.sqrt(x))), 0.0)[()]


def levy_pdf(x, t: float):
    x = np.asarray(x, dtype=float)
    return (t * np.exp(-(t**2) / (4.0 * x)) / (2.0 * math.sqrt(math.pi) * x**1.5))[()]


def conditional_sir_pdf(gamma, S: float, t: float):
    """Density of gamma = S / I for Levy(t) interference, S = G h r^{-4}."""
    g = np.asarray(gamma, dtype=float)
    return (t * np.exp(-(t**2) * g / (4.0 * S)) / (2.0 * np.sqrt(math.pi * S * g)))[()]


def conditional_sir_cdf(gamma, S: float, t: float):
    g = np.asarray(gamma, dtype=float)
    return special.erf(t * np.sqrt(g) / (2.0 * math.sqrt(S)))[()]


def laplace_transform_interference(s, t: float, eta: float):
    """E[exp(-s I)] = exp(-t s^{2/eta})."""
    s = np.asarray(s, dtype=float)
    return np.exp(-t * s ** (2.0 / eta))[()]
