"""Monte Carlo estimation of the block error probabilities and secrecy metrics.

Two estimators are available:

* ``distributional`` draws each SIR from its marginal ingredients (nearest-BS
  and disk distances, Gamma fading, Levy interference).  Only valid for
  eta = 4.
* ``spatial`` realises the BS and active-device point processes in a disk
  around the typical device and sums the interference explicitly, so it runs
  for any eta > 2.

Decoding is averaged at the level of the conditional error eps(gamma)
(Rao-Blackwellised), so each sample contributes a number in [0, 1] rather
than a Bernoulli outcome.  Work is split into fixed-size blocks; block ``k``
uses the random stream ``(master_seed, k)`` and the per-block moments are
merged in block order, so results do not depend on the number of threads.
"""

from __future__ import annotations

import math
import os
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .analytic.metrics import MetricBundle, secrecy_metrics
from .distributions import (
    make_rng,
    sample_eve_distance,
    sample_fading_gain,
    sample_levy_interference,
    sample_nearest_bs_distance,
)
from .fbl import FblCode, error_prob_normal
from .params import DerivedConstants, InterferenceLimitedError, SystemParams, derive_constants

__all__ = [
    "EstimatorUnsupportedError",
    "Estimate",
    "McConfig",
    "SirSample",
    "McResult",
    "sample_sir_distributional",
    "sample_sir_spatial",
    "spatial_window_radius",
    "far_field_interference_bound",
    "estimate_distributional",
    "estimate_spatial",
    "estimate",
]

_Z95 = 1.96
_GAMMA_MAX = 1e300
_TRUNCATION_WARN = 0.01


class EstimatorUnsupportedError(ValueError):
    """The requested estimator does not apply to these parameters."""


@dataclass(frozen=True)
class Estimate:
    """Sample mean with its normal-theory 95% half-width."""

    mean: float
    half_width_95: float
    n_samples: int

    @property
    def lo(self) -> float:
        return self.mean - self.half_width_95

    @property
    def hi(self) -> float:
        return self.mean + self.half_width_95

    def overlaps(self, other: "Estimate") -> bool:
        return self.lo <= other.hi and other.lo <= self.hi

    @classmethod
    def from_samples(cls, x) -> "Estimate":
        x = np.asarray(x, dtype=float)
        if x.size < 2:
            raise ValueError("an estimate needs at least two samples")
        return cls(float(x.mean()), _Z95 * float(x.std(ddof=1)) / math.sqrt(x.size), x.size)


@dataclass(frozen=True)
class McConfig:
    """Monte Carlo run settings.

    ``eve_distance="bob"`` is a diagnostic that draws Eve's distance from the
    nearest-BS law instead of the disk (distributional estimator only).
    ``threads=None`` reads the cap from ``SECFBL_THREADS``.
    """

    n_samples: int = 100_000
    estimator: str = "distributional"
    window_radius_factor: float = 5.0
    correlation_mode: str = "independent"
    master_seed: int = 0
    block_size: int | None = None
    threads: int | None = None
    eve_distance: str = "disk"

    def __post_init__(self):
        if self.n_samples < 100:
            raise ValueError(f"n_samples must be >= 100, got {self.n_samples}")
        if self.estimator not in ("distributional", "spatial"):
            raise ValueError(f"unknown estimator {self.estimator!r}")
        if not self.window_radius_factor >= 3:
            raise ValueError(f"window_radius_factor must be >= 3, got {self.window_radius_factor}")
        if self.correlation_mode not in ("independent", "shared_field"):
            raise ValueError(f"unknown correlation_mode {self.correlation_mode!r}")
        if self.eve_distance not in ("disk", "bob"):
            raise ValueError(f"unknown eve_distance {self.eve_distance!r}")
        if self.block_size is not None and self.block_size < 2:
            raise ValueError("block_size must be >= 2")

    def replace(self, **changes) -> "McConfig":
        return replace(self, **changes)


@dataclass(frozen=True)
class SirSample:
    """A batch of realisations; every field is an array of equal length."""

    r_b: np.ndarray
    r_e: np.ndarray
    h_b: np.ndarray
    h_e: np.ndarray
    i_b: np.ndarray
    i_e: np.ndarray
    gamma_b: np.ndarray
    gamma_e: np.ndarray

    @staticmethod
    def sir(G: float, h, r, i, eta: float):
        with np.errstate(divide="ignore", over="ignore"):
            g = G * h * r ** (-eta) / i
        return np.minimum(g, _GAMMA_MAX)

    def __len__(self):
        return len(self.gamma_b)


@dataclass(frozen=True)
class McResult:
    """Estimates from one run.  Unpacks as ``(eps_b, eps_e, metrics)``.

    ``metrics`` combines the two marginal means as the factorised model
    does; ``p_sec`` estimates E[(1 - eps_b(gamma_b)) eps_e(gamma_e)] per
    sample, which differs when the two SIRs are dependent.
    """

    eps_b: Estimate
    eps_e: Estimate
    metrics: MetricBundle
    p_sec: Estimate
    warnings: tuple[str, ...] = ()
    diagnostics: dict = field(default_factory=dict)

    def __iter__(self):
        return iter((self.eps_b, self.eps_e, self.metrics))


# samplers --------------------------------------------------------------------

def sample_sir_distributional(params: SystemParams, dc: DerivedConstants,
                              rng: np.random.Generator, size: int,
                              eve_distance: str = "disk") -> SirSample:
    r_b = sample_nearest_bs_distance(rng, params.lambda_b, size)
    if eve_distance == "bob":
        r_e = sample_nearest_bs_distance(rng, params.lambda_b, size)
    else:
        r_e = sample_eve_distance(rng, params.D, size)
    h_b = sample_fading_gain(rng, params.m, size)
    h_e = sample_fading_gain(rng, params.m, size)
    i_b = sample_levy_interference(rng, dc.t, size)
    i_e = sample_levy_interference(rng, dc.t, size)
    return SirSample(r_b, r_e, h_b, h_e, i_b, i_e,
                     SirSample.sir(params.G_b, h_b, r_b, i_b, params.eta),
                     SirSample.sir(params.G_e, h_e, r_e, i_e, params.eta))


def spatial_window_radius(params: SystemParams, factor: float) -> float:
    """W times the larger of the 0.999 nearest-BS quantile and D."""
    q999 = math.sqrt(-math.log(1e-3) / (math.pi * params.lambda_b))
    return factor * max(q999, params.D)


def far_field_interference_bound(params: SystemParams, radius: float) -> float:
    """Mean interference from active devices beyond ``radius`` (unit-mean fading)."""
    lam_a = params.p * params.lambda_u
    return 2.0 * math.pi * lam_a * radius ** (2.0 - params.eta) / (params.eta - 2.0)


def _disk_points(rng, density, radius, size):
    """Poisson points in a disk for ``size`` independent windows (flat arrays + counts)."""
    counts = rng.poisson(density * math.pi * radius**2, size)
    total = int(counts.sum())
    rad = radius * np.sqrt(rng.random(total))
    ang = 2.0 * math.pi * rng.random(total)
    return rad * np.cos(ang), rad * np.sin(ang), counts


def _segment_sum(values, counts):
    out = np.zeros(counts.size)
    nz = counts > 0
    if values.size:
        starts = np.concatenate(([0], np.cumsum(counts)[:-1]))
        out[nz] = np.add.reduceat(values, starts[nz])
    return out


def _interference(rng, field_xy, owner, rx_xy, m, eta, counts):
    x, y = field_xy
    d2 = (x - rx_xy[0][owner]) ** 2 + (y - rx_xy[1][owner]) ** 2
    h = sample_fading_gain(rng, m, x.size)
    with np.errstate(divide="ignore"):
        return _segment_sum(h * d2 ** (-0.5 * eta), counts)


def sample_sir_spatial(params: SystemParams, rng: np.random.Generator, size: int,
                       window_radius: float, correlation_mode: str = "independent") -> SirSample:
    """Realise BS and active-device processes around the typical device at the origin.

    The active devices are drawn directly at density p lambda_u (the
    thinned process); the typical device itself is not among them.
    """
    lam_a = params.p * params.lambda_u
    # serving BS: nearest point of the realised BS process
    bx, by, bcount = _disk_points(rng, params.lambda_b, window_radius, size)
    owner_b = np.repeat(np.arange(size), bcount)
    d2 = bx * bx + by * by
    has_bs = bcount > 0
    # sort by (window, distance); the head of each window's run is its nearest BS
    order = np.lexsort((d2, owner_b))
    heads = order[(np.cumsum(bcount) - bcount)[has_bs]]
    bob_x, bob_y = np.zeros(size), np.zeros(size)
    r_b = np.full(size, np.inf)
    bob_x[has_bs], bob_y[has_bs] = bx[heads], by[heads]
    r_b[has_bs] = np.sqrt(d2[heads])

    r_e = sample_eve_distance(rng, params.D, size)
    ang = 2.0 * math.pi * rng.random(size)
    eve_x, eve_y = r_e * np.cos(ang), r_e * np.sin(ang)

    h_b = sample_fading_gain(rng, params.m, size)
    h_e = sample_fading_gain(rng, params.m, size)

    ax, ay, acount = _disk_points(rng, lam_a, window_radius, size)
    owner_a = np.repeat(np.arange(size), acount)
    i_b = _interference(rng, (ax, ay), owner_a, (bob_x, bob_y), params.m, params.eta, acount)
    if correlation_mode == "independent":
        ax, ay, acount = _disk_points(rng, lam_a, window_radius, size)
        owner_a = np.repeat(np.arange(size), acount)
    i_e = _interference(rng, (ax, ay), owner_a, (eve_x, eve_y), params.m, params.eta, acount)

    with np.errstate(divide="ignore"):
        gamma_b = np.where(has_bs, SirSample.sir(params.G_b, h_b, r_b, i_b, params.eta), 0.0)
    gamma_e = SirSample.sir(params.G_e, h_e, r_e, i_e, params.eta)
    return SirSample(r_b, r_e, h_b, h_e, i_b, i_e, gamma_b, gamma_e)


# block machinery ---------------------------------------------------------------

@dataclass(frozen=True)
class _Moments:
    n: int
    mean: np.ndarray
    m2: np.ndarray

    @classmethod
    def of(cls, x):
        mean = x.mean(axis=1)
        return cls(x.shape[1], mean, ((x - mean[:, None]) ** 2).sum(axis=1))

    def merge(self, other: "_Moments") -> "_Moments":
        n = self.n + other.n
        delta = other.mean - self.mean
        return _Moments(n, self.mean + delta * other.n / n,
                        self.m2 + other.m2 + delta**2 * self.n * other.n / n)

    def estimate(self, k) -> Estimate:
        sd = math.sqrt(self.m2[k] / (self.n - 1))
        return Estimate(float(self.mean[k]), _Z95 * sd / math.sqrt(self.n), self.n)


def _worker_count(cfg: McConfig, n_blocks: int) -> int:
    cap = cfg.threads
    if cap is None:
        env = os.environ.get("SECFBL_THREADS", "")
        cap = int(env) if env.strip() else (os.cpu_count() or 1)
    return max(1, min(int(cap), n_blocks))


def _run_blocks(cfg: McConfig, block_size: int, draw, code: FblCode):
    sizes = [block_size] * (cfg.n_samples // block_size)
    if cfg.n_samples % block_size:
        sizes.append(cfg.n_samples % block_size)

    def one(k):
        rng = make_rng(cfg.master_seed, k)
        s = draw(rng, sizes[k])
        eb = error_prob_normal(s.gamma_b, code)
        ee = error_prob_normal(s.gamma_e, code)
        extra = {"i_b_median": float(np.median(s.i_b)), "i_e_median": float(np.median(s.i_e)),
                 "no_bs": int(np.count_nonzero(~np.isfinite(s.r_b)))}
        return _Moments.of(np.vstack((eb, ee, (1.0 - eb) * ee))), extra

    workers = _worker_count(cfg, len(sizes))
    if workers == 1:
        parts = [one(k) for k in range(len(sizes))]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(one, range(len(sizes))))
    total = parts[0][0]
    for mom, _ in parts[1:]:
        total = total.merge(mom)
    return total, [extra for _, extra in parts]


def _result(params, total, warn, diagnostics):
    eb, ee, ps = total.estimate(0), total.estimate(1), total.estimate(2)
    metrics = secrecy_metrics(eb.mean, ee.mean, params, "monte_carlo",
                              ci_half_width=ps.half_width_95)
    return McResult(eb, ee, metrics, ps, tuple(warn), diagnostics)


def _check_interferers(params: SystemParams):
    if params.p == 0.0:
        raise InterferenceLimitedError(
            "p", "p = 0 leaves no active interferers; the interference-limited SIR is undefined")


def estimate_distributional(params: SystemParams, dc: DerivedConstants | None = None,
                            cfg: McConfig | None = None) -> McResult:
    """Marginal-law estimator: Levy interference drawn independently per receiver."""
    cfg = McConfig() if cfg is None else cfg
    _check_interferers(params)
    if params.eta != 4.0:
        raise EstimatorUnsupportedError(
            f"the distributional estimator needs the eta = 4 Levy law; got eta = {params.eta:g}")
    dc = derive_constants(params) if dc is None else dc
    code = FblCode(params.n, params.R)

    def draw(rng, size):
        return sample_sir_distributional(params, dc, rng, size, cfg.eve_distance)

    total, _ = _run_blocks(cfg, cfg.block_size or 65_536, draw, code)
    return _result(params, total, [], {"estimator": "distributional"})


def estimate_spatial(params: SystemParams, cfg: McConfig | None = None,
                     warn: bool = True) -> McResult:
    """Explicit point-process estimator in a finite window.

    A warning is attached when the mean interference that the window leaves
    out exceeds 1% of the median realised interference; ``warn=False``
    records it in the result without calling :func:`warnings.warn`.
    """
    cfg = McConfig(estimator="spatial") if cfg is None else cfg
    _check_interferers(params)
    if cfg.eve_distance != "disk":
        raise EstimatorUnsupportedError("the spatial estimator places Eve in the disk only")
    code = FblCode(params.n, params.R)
    radius = spatial_window_radius(params, cfg.window_radius_factor)

    def draw(rng, size):
        return sample_sir_spatial(params, rng, size, radius, cfg.correlation_mode)

    total, extras = _run_blocks(cfg, cfg.block_size or 4_096, draw, code)
    # a receiver sits at most max(q999, D) from the origin, so its distance to the
    # window edge is at least (W - 1) / W of the radius
    edge = radius * (cfg.window_radius_factor - 1.0) / cfg.window_radius_factor
    bound = far_field_interference_bound(params, edge)
    median_i = float(np.median([min(e["i_b_median"], e["i_e_median"]) for e in extras]))
    ratio = bound / median_i if median_i > 0 else math.inf
    no_bs = sum(e["no_bs"] for e in extras)
    notes = []
    if ratio > _TRUNCATION_WARN:
        notes.append(f"window truncation: far-field mean interference bound {bound:.3g} is "
                    f"{100 * ratio:.2g}% of the median interference {median_i:.3g}")
    if no_bs:
        notes.append(f"{no_bs} windows contained no BS; their SIR at Bob was set to 0")
    if warn:
        for w in notes:
            warnings.warn(w, RuntimeWarning, stacklevel=2)
    diagnostics = {"estimator": "spatial", "window_radius": radius,
                   "far_field_bound": bound, "truncation_ratio": ratio,
                   "correlation_mode": cfg.correlation_mode}
    return _result(params, total, notes, diagnostics)


def estimate(params: SystemParams, cfg: McConfig, dc: DerivedConstants | None = None,
             warn: bool = True) -> McResult:
    if cfg.estimator == "spatial":
        return estimate_spatial(params, cfg, warn)
    return estimate_distributional(params, dc, cfg)
