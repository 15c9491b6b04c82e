"""Model parameters and the constants derived from them."""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass

LOG2E = 1.0 / math.log(2.0)


class ParameterError(ValueError):
    """A parameter violates its admissible range.  ``field`` names it."""

    def __init__(self, field: str, message: str):
        self.field = field
        super().__init__(f"{field}: {message}")


class InterferenceLimitedError(ParameterError):
    """No active interferers, so the SIR of the interference-limited model is undefined."""


def _as_int(name, value):
    if isinstance(value, bool):
        raise ParameterError(name, "must be an integer")
    if isinstance(value, int):
        return value
    f = float(value)
    if not f.is_integer():
        raise ParameterError(name, f"must be an integer, got {value!r}")
    return int(f)


@dataclass(frozen=True)
class SystemParams:
    """Network, channel and code parameters.  Gains are linear; lengths in metres."""

    lambda_u: float = 1e-3
    lambda_b: float = 1e-4
    p: float = 0.01
    eta: float = 4.0
    m: int = 1
    D: float = 50.0
    G_b: float = 31.6
    G_e: float = 1.0
    n: int = 512
    R: float = 1.0

    def __post_init__(self):
        for name in ("lambda_u", "lambda_b", "p", "eta", "D", "G_b", "G_e", "R"):
            v = float(getattr(self, name))
            if not math.isfinite(v):
                raise ParameterError(name, f"must be finite, got {v!r}")
            object.__setattr__(self, name, v)
        object.__setattr__(self, "m", _as_int("m", self.m))
        object.__setattr__(self, "n", _as_int("n", self.n))
        for name in ("lambda_u", "lambda_b", "D", "G_b", "G_e", "R"):
            if not getattr(self, name) > 0:
                raise ParameterError(name, f"must be > 0, got {getattr(self, name)!r}")
        if self.n < 1:
            raise ParameterError("n", f"must be >= 1, got {self.n}")
        if not 0.0 <= self.p <= 1.0:
            raise ParameterError("p", f"must lie in [0, 1], got {self.p!r}")
        if not self.eta > 2.0:
            raise ParameterError("eta", f"must be > 2 for finite interference, got {self.eta!r}")
        if self.m < 1:
            raise ParameterError("m", f"must be >= 1, got {self.m}")

    def replace(self, **changes) -> "SystemParams":
        return dataclasses.replace(self, **changes)

    @classmethod
    def field_names(cls) -> tuple[str, ...]:
        return tuple(f.name for f in dataclasses.fields(cls))


@dataclass(frozen=True)
class LinearQParams:
    """Piecewise-linear surrogate of the normal approximation."""

    mu: float
    theta: float
    a: float

    @classmethod
    def from_code(cls, n: int, R: float) -> "LinearQParams":
        theta = 2.0**R - 1.0
        mu = math.sqrt(n / (2.0 * math.pi * (2.0 ** (2.0 * R) - 1.0) * LOG2E**2))
        return cls(mu=mu, theta=theta, a=math.sqrt(math.pi / (2.0 * mu**2)))


@dataclass(frozen=True)
class BobConstants:
    a1: float
    a2: float
    b1: float
    b2: float
    z1: float
    z2: float
    c: float
    d: float


@dataclass(frozen=True)
class EveConstants:
    A: float
    B: float
    C1: float
    C2: float
    y1: float
    y2: float


@dataclass(frozen=True)
class DerivedConstants:
    t: float
    linq: LinearQParams
    bob: BobConstants
    eve: EveConstants
    closed_form_valid: bool
    closed_form_reason: str = ""

    def replace(self, **changes) -> "DerivedConstants":
        return dataclasses.replace(self, **changes)


def kww_t(p: float, lambda_u: float, m: int, eta: float) -> float:
    """Coefficient t of the stretched-exponential interference Laplace transform."""
    delta = 2.0 / eta
    return (p * lambda_u * math.pi
            * math.exp(math.lgamma(m + delta) - math.lgamma(m) - delta * math.log(m))
            * math.gamma(1.0 - delta))


def derive_constants(params: SystemParams) -> DerivedConstants:
    """Every constant used by the Meijer-G closed forms.

    Eve's ``B`` and ``C1``/``C2`` are the dimensionally consistent values
    (no stray factor ``D``, and ``1/sqrt(G_e)`` in ``C``); with these the
    closed form reproduces the triple integral it stands for.
    """
    if params.p == 0.0:
        raise InterferenceLimitedError(
            "p", "p = 0 leaves no active interferers; the interference-limited SIR is undefined")
    m, eta = params.m, params.eta
    t = kww_t(params.p, params.lambda_u, m, eta)
    lq = LinearQParams.from_code(params.n, params.R)
    mu, th, a = lq.mu, lq.theta, lq.a
    g_hi, g_lo = th + a, th - a
    s2p = math.sqrt(2.0 * math.pi)
    gm = math.gamma(m)

    kappa_b = t**2 * m / (params.G_b * (params.lambda_b * math.pi) ** 2)
    bob = BobConstants(
        a1=0.5 + mu * th / s2p,
        a2=0.5 - mu * th / s2p,
        b1=mu * g_hi / s2p,
        b2=mu * g_lo / s2p,
        z1=kappa_b * g_hi,
        z2=kappa_b * g_lo,
        c=math.gamma(m - 0.5) / (3.0 * math.sqrt(math.pi) * gm),
        d=(-1.0) ** m * m / (m + 1.0),
    )

    kappa_e = params.D**4 * t**2 * m / (4.0 * params.G_e)
    c_pref = params.D**2 * t * mu * math.sqrt(m) / (math.sqrt(2.0) * math.pi * gm * eta
                                                   * math.sqrt(params.G_e))
    eve = EveConstants(
        A=0.5 - mu * th / s2p,
        B=2.0 / (eta * math.sqrt(math.pi) * gm),
        C1=c_pref * g_hi**1.5,
        C2=c_pref * g_lo**1.5 if g_lo > 0 else math.nan,
        y1=kappa_e * g_hi,
        y2=kappa_e * g_lo,
    )

    reasons = []
    if eta != 4.0:
        reasons.append(f"eta = {eta:g} (closed forms need eta = 4)")
    if not th > a:
        reasons.append(f"theta = {th:.6g} <= a = {a:.6g} (negative Meijer-G argument)")
    return DerivedConstants(t=t, linq=lq, bob=bob, eve=eve,
                            closed_form_valid=not reasons,
                            closed_form_reason="; ".join(reasons))
