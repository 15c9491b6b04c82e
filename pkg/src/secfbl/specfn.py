"""Special functions: Gaussian tail and a real-argument Meijer G evaluator.

The Meijer G-function is evaluated from its Mellin-Barnes definition

    G^{m,n}_{p,q}(z | a; b) = 1/(2 pi i) int_L  prod_{j<m} Gamma(b_j - s)
        prod_{k<n} Gamma(1 - a_k + s) / ( prod_{j>=m} Gamma(1 - b_j + s)
        prod_{k>=n} Gamma(a_k - s) ) z^s ds

on a vertical line Re s = c placed at the real-axis saddle of the integrand
between the two pole families.  All gamma products are formed in log space.
For very small (or very large) z the residue series is summed instead.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import optimize, special

__all__ = [
    "MeijerGSpec",
    "MeijerGError",
    "PoleCollisionError",
    "MeijerGAccuracyError",
    "q_function",
    "meijer_g",
    "meijer_g_residue_series",
]

_SQRT2 = math.sqrt(2.0)
_INT_TOL = 1e-12

# Gauss-Legendre rule used on every contour panel.
_GL_X, _GL_W = np.polynomial.legendre.leggauss(16)


class MeijerGError(ArithmeticError):
    """Base class for Meijer G evaluation failures."""


class PoleCollisionError(MeijerGError):
    """A pole of Gamma(b_j - s) coincides with a pole of Gamma(1 - a_k + s)."""

    def __init__(self, a_k: float, b_j: float):
        self.a_k = a_k
        self.b_j = b_j
        super().__init__(
            f"pole collision: a_k - b_j = {a_k - b_j:g} is a positive integer "
            f"(a_k={a_k:g}, b_j={b_j:g}); the standard contour does not exist"
        )


class MeijerGAccuracyError(MeijerGError):
    """The contour integral did not reach the requested accuracy."""

    def __init__(self, message: str, estimate: float, error: float):
        self.estimate = estimate
        self.error = error
        super().__init__(f"{message} (estimate={estimate:.17g}, error={error:.3g})")


def q_function(x):
    """Gaussian tail probability Q(x) = P(N(0,1) > x)."""
    return 0.5 * special.erfc(np.asarray(x, dtype=float) / _SQRT2)[()]


def _is_nonneg_int(x: float) -> bool:
    return x > -_INT_TOL and abs(x - round(x)) < _INT_TOL


@dataclass(frozen=True)
class MeijerGSpec:
    """Orders and parameters of G^{m,n}_{p,q}.

    ``a_params`` holds a_1..a_p (the first ``n_idx`` enter as
    Gamma(1 - a_k + s) in the numerator), ``b_params`` holds b_1..b_q (the
    first ``m_idx`` enter as Gamma(b_j - s) in the numerator).
    """

    m_idx: int
    n_idx: int
    p_idx: int
    q_idx: int
    a_params: tuple[float, ...] = ()
    b_params: tuple[float, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "a_params", tuple(float(a) for a in self.a_params))
        object.__setattr__(self, "b_params", tuple(float(b) for b in self.b_params))
        if len(self.a_params) != self.p_idx or len(self.b_params) != self.q_idx:
            raise ValueError(
                f"parameter lengths ({len(self.a_params)}, {len(self.b_params)}) "
                f"do not match orders p={self.p_idx}, q={self.q_idx}"
            )
        if not (0 <= self.m_idx <= self.q_idx and 0 <= self.n_idx <= self.p_idx):
            raise ValueError("orders must satisfy 0 <= m <= q and 0 <= n <= p")
        if self.m_idx + self.n_idx == 0:
            raise ValueError("m + n must be positive")
        for a_k in self.a_params[: self.n_idx]:
            for b_j in self.b_params[: self.m_idx]:
                d = a_k - b_j
                if d > 0.5 and _is_nonneg_int(d):
                    raise PoleCollisionError(a_k, b_j)

    @classmethod
    def from_groups(cls, a_n, a_rest, b_m, b_rest) -> "MeijerGSpec":
        """Build from the four parameter groups as written in G^{m,n}_{p,q}."""
        a = tuple(a_n) + tuple(a_rest)
        b = tuple(b_m) + tuple(b_rest)
        return cls(len(b_m), len(a_n), len(a), len(b), a, b)

    @property
    def a_n(self):
        return self.a_params[: self.n_idx]

    @property
    def a_rest(self):
        return self.a_params[self.n_idx :]

    @property
    def b_m(self):
        return self.b_params[: self.m_idx]

    @property
    def b_rest(self):
        return self.b_params[self.m_idx :]

    @property
    def delta(self) -> float:
        """Exponential decay rate, in units of pi, of the integrand along Im s."""
        return self.m_idx + self.n_idx - 0.5 * (self.p_idx + self.q_idx)

    def reduced(self) -> "MeijerGSpec":
        """Cancel numerator/denominator gamma pairs with equal parameters."""
        a_n, a_rest = list(self.a_n), list(self.a_rest)
        b_m, b_rest = list(self.b_m), list(self.b_rest)
        for src, dst in ((a_n, b_rest), (a_rest, b_m)):
            i = 0
            while i < len(src):
                hit = next((j for j, v in enumerate(dst) if abs(v - src[i]) < _INT_TOL), None)
                if hit is None:
                    i += 1
                    continue
                del src[i]
                del dst[hit]
        if len(a_n) + len(b_m) == 0:
            return self
        return MeijerGSpec.from_groups(a_n, a_rest, b_m, b_rest)


def _log_kernel(spec: MeijerGSpec, s, log_z: float):
    """Complex log of the Mellin-Barnes integrand at points ``s``."""
    s = np.asarray(s, dtype=complex)
    out = s * log_z
    for b in spec.b_m:
        out = out + special.loggamma(b - s)
    for a in spec.a_n:
        out = out + special.loggamma(1.0 - a + s)
    for b in spec.b_rest:
        out = out - special.loggamma(1.0 - b + s)
    for a in spec.a_rest:
        out = out - special.loggamma(a - s)
    return out


def _kernel_real(spec: MeijerGSpec, s: float, exclude=None) -> float:
    """Real-axis value of the integrand with one gamma factor optionally left out.

    Used for residues; reciprocal gammas vanish exactly at their poles.
    """
    val = 1.0
    skipped = False
    for kind, params in (("b", spec.b_m), ("a", spec.a_n)):
        for p in params:
            if not skipped and exclude == (kind, p):
                skipped = True
                continue
            arg = p - s if kind == "b" else 1.0 - p + s
            if arg <= 0 and _is_nonneg_int(-arg):
                raise MeijerGError(f"higher-order pole at s={s:g}")
            val *= special.gamma(arg)
    for b in spec.b_rest:
        val *= special.rgamma(1.0 - b + s)
    for a in spec.a_rest:
        val *= special.rgamma(a - s)
    return val


def _right_residue(spec, b, ell, z):
    s0 = b + ell
    return (-1.0) ** ell / math.factorial(ell) * _kernel_real(spec, s0, ("b", b)) * z**s0


def _left_residue(spec, a, ell, z):
    s0 = a - 1.0 - ell
    return (-1.0) ** ell / math.factorial(ell) * _kernel_real(spec, s0, ("a", a)) * z**s0


def meijer_g_residue_series(spec: MeijerGSpec, z: float, side: str = "right",
                            rtol: float = 1e-15, max_terms: int = 400) -> float:
    """Sum of residues closing the contour to the right (small z) or left (large z).

    Only simple poles are supported. The right series converges for q > p,
    or p == q with z < 1; the left series for p > q, or p == q with z > 1.
    """
    spec = spec.reduced()
    params = spec.b_m if side == "right" else spec.a_n
    for i, u in enumerate(params):
        for v in params[i + 1:]:
            if _is_nonneg_int(abs(u - v)):
                raise MeijerGError("residue series needs simple poles; parameters differ by an integer")
    residue = _right_residue if side == "right" else _left_residue
    total = 0.0
    small = 0
    for ell in range(max_terms):
        term = sum(residue(spec, p, ell, z) for p in params)
        total += term
        if abs(term) <= rtol * abs(total):
            small += 1
            if small >= 3:
                return total
        else:
            small = 0
    raise MeijerGAccuracyError("residue series did not converge", total, abs(term))


def _pole_bounds(spec: MeijerGSpec) -> tuple[float, float]:
    left = max((a - 1.0 for a in spec.a_n), default=-math.inf)
    right = min(spec.b_m, default=math.inf)
    return left, right


def _choose_abscissa(spec, log_z, lo, hi):
    """Real-axis saddle of the integrand inside (lo, hi)."""
    span = hi - lo if math.isfinite(hi - lo) else math.inf
    margin = 1e-3 * span if math.isfinite(span) else 1e-3
    lo_b = lo + margin if math.isfinite(lo) else (hi - 60.0 - abs(log_z) * 2 if math.isfinite(hi) else -60.0)
    hi_b = hi - margin if math.isfinite(hi) else (lo + 60.0 + abs(log_z) * 2 if math.isfinite(lo) else 60.0)
    if not math.isfinite(lo) and not math.isfinite(hi):
        lo_b, hi_b = -60.0, 60.0

    def f(c):
        return float(_log_kernel(spec, c, log_z).real)

    res = optimize.minimize_scalar(f, bounds=(lo_b, hi_b), method="bounded",
                                   options={"xatol": 1e-6})
    return float(res.x)


def _crossed_poles(spec, c):
    """Poles on the wrong side of the line Re s = c, with the G correction sign."""
    out = []
    for b in spec.b_m:
        ell = 0
        while b + ell < c:
            out.append(("right", b, ell))
            ell += 1
    for a in spec.a_n:
        ell = 0
        while a - 1.0 - ell > c:
            out.append(("left", a, ell))
            ell += 1
    return out


def _line_integral(spec, z, c, rtol, max_levels=9):
    log_z = math.log(z)
    peak = float(_log_kernel(spec, c, log_z).real)
    # curvature along Im s equals minus the curvature along Re s
    dh = 1e-3
    curv = (float(_log_kernel(spec, c + dh, log_z).real) - 2 * peak
            + float(_log_kernel(spec, c - dh, log_z).real)) / dh**2
    width = 1.0 / math.sqrt(abs(curv)) if curv > 0 else 1.0
    panel = min(0.5, 0.5 * width, math.pi / (abs(log_z) + 1.0))

    # truncation point: integrand below rtol * 1e-4 of its peak
    floor = peak + math.log(rtol * 1e-4)
    tau = max(4.0 * width, 1.0)
    while float(_log_kernel(spec, c + 1j * tau, log_z).real) > floor:
        tau *= 1.25
        if tau > 1e4:
            raise MeijerGAccuracyError("contour tail does not decay", math.nan, math.inf)
    t_max = tau
    tail = math.exp(float(_log_kernel(spec, c + 1j * t_max, log_z).real)) / (
        math.pi * max(spec.delta, 1e-3) * math.pi)

    def estimate(n_panels):
        edges = np.linspace(0.0, t_max, n_panels + 1)
        mid = 0.5 * (edges[1:] + edges[:-1])
        half = 0.5 * (edges[1:] - edges[:-1])
        tau_nodes = (mid[:, None] + half[:, None] * _GL_X[None, :]).ravel()
        w = (half[:, None] * _GL_W[None, :]).ravel()
        vals = np.exp(_log_kernel(spec, c + 1j * tau_nodes, log_z)).real
        return float(np.dot(w, vals)) / math.pi, float(np.dot(w, np.abs(vals))) / math.pi

    n_panels = max(4, int(math.ceil(t_max / panel)))
    prev, _ = estimate(n_panels)
    for _ in range(max_levels):
        n_panels *= 2
        cur, scale = estimate(n_panels)
        err = abs(cur - prev) + tail
        if err <= rtol * abs(cur) or err <= 1e-15 * scale:
            return cur, err
        prev = cur
    raise MeijerGAccuracyError("contour quadrature did not converge", cur, err)


def meijer_g(spec: MeijerGSpec, z: float, rtol: float = 1e-8, return_error: bool = False):
    """Evaluate G^{m,n}_{p,q}(z) for real z > 0.

    Raises ``PoleCollisionError`` (at spec construction) for an undefined
    integrand and ``MeijerGAccuracyError`` when the requested relative
    accuracy is not reached.  With ``return_error`` the achieved error
    estimate is returned alongside the value.
    """
    z = float(z)
    if not z > 0 or not math.isfinite(z):
        raise ValueError(f"meijer_g requires finite z > 0, got {z!r}")
    red = spec.reduced()
    p, q = red.p_idx, red.q_idx

    # residue expansions where the contour quadrature loses accuracy
    if z < 1e-12 and (q > p or (p == q and z < 1)):
        try:
            val = meijer_g_residue_series(red, z, "right")
            return (val, abs(val) * 1e-15) if return_error else val
        except MeijerGError:
            pass
    if z > 1e12 and (p > q or (p == q and z > 1)):
        try:
            val = meijer_g_residue_series(red, z, "left")
            return (val, abs(val) * 1e-15) if return_error else val
        except MeijerGError:
            pass

    if red.delta <= 0:
        raise MeijerGError(
            f"contour integral diverges for m+n-(p+q)/2 = {red.delta:g} <= 0; out of contract")
    log_z = math.log(z)
    lo, hi = _pole_bounds(red)
    if lo < hi:
        c = _choose_abscissa(red, log_z, lo, hi)
        correction = 0.0
    else:
        # no separating vertical line: use one between poles and add the
        # residues of the poles it leaves on the wrong side
        cand = sorted({b + e for b in red.b_m for e in range(4)}
                      | {a - 1 - e for a in red.a_n for e in range(4)})
        gaps = [(u, v) for u, v in zip(cand, cand[1:]) if v - u > 1e-6]
        u, v = max(gaps, key=lambda g: g[1] - g[0])
        c = 0.5 * (u + v)
        correction = 0.0
        for side, par, ell in _crossed_poles(red, c):
            if side == "right":
                correction += _right_residue(red, par, ell, z)
            else:
                correction += _left_residue(red, par, ell, z)
    val, err = _line_integral(red, z, c, rtol)
    val += correction
    return (val, err) if return_error else val
