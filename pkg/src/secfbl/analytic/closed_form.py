"""Meijer-G closed forms for the linear-ramp block error probabilities.

For eta = 4 the conditional SIR CDF is erf(k sqrt(gamma)); averaging it over
Nakagami fading and the distance law gives Meijer-G functions of
z = kappa_b gamma (Bob) and y = kappa_e gamma (Eve).  Against the ramp
surrogate the error probability reduces to CDF terms F(.) and truncated
first-moment terms, both evaluated here by :func:`secfbl.specfn.meijer_g`.

Two families are provided:

* the corrected expressions (default), whose prefactors and parameter lists
  reproduce the underlying triple integral;
* ``printed_*`` diagnostics, which transcribe the printed expressions
  (prefactors with a stray ``D``, a ``z`` where ``sqrt(z)`` is needed, and a
  lower parameter list with a pole collision) so the discrepancy can be shown.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

from ..params import DerivedConstants, SystemParams
from ..specfn import MeijerGSpec, meijer_g

__all__ = [
    "ClosedFormRegimeError",
    "bob_cdf_spec",
    "bob_moment_spec",
    "eve_cdf_spec",
    "eve_moment_spec",
    "printed_eve_moment_spec",
    "bob_cdf",
    "bob_moment",
    "bob_moment_series",
    "eps_b_closed_form",
    "eps_b_closed_form_direct",
    "eps_e_closed_form",
    "eps_e_closed_form_phi",
    "AppendixTerms",
    "appendix_terms",
    "appendix_sum",
    "printed_eps_b",
    "printed_eps_e",
    "printed_appendix_sum",
]

_SQRT_PI = math.sqrt(math.pi)
_RANGE_SLACK = 1e-6


class ClosedFormRegimeError(ValueError):
    """The closed forms are not defined for these parameters."""

    def __init__(self, reason: str):
        self.reason = reason
        super().__init__(f"outside the closed-form regime: {reason}")


def _require_regime(dc: DerivedConstants, params: SystemParams):
    if not dc.closed_form_valid:
        raise ClosedFormRegimeError(dc.closed_form_reason)
    if params.eta != 4.0:
        raise ClosedFormRegimeError(f"eta = {params.eta:g} (closed forms need eta = 4)")


def _clamp(value: float, what: str) -> float:
    if value < -_RANGE_SLACK or value > 1.0 + _RANGE_SLACK:
        warnings.warn(f"{what} = {value:.6g} lies outside [0, 1]; clamped", RuntimeWarning,
                      stacklevel=3)
    return min(max(value, 0.0), 1.0)


# parameter lists ------------------------------------------------------------

def bob_cdf_spec(m: int) -> MeijerGSpec:
    """G^{2,3}_{3,3}(z | 1, 0, 1/2 ; 1/2, m, 0): pi Gamma(m) P(gamma_b <= z / kappa_b)."""
    return MeijerGSpec.from_groups((1.0, 0.0, 0.5), (), (0.5, m), (0.0,))


def bob_moment_spec(m: int) -> MeijerGSpec:
    """G^{2,3}_{3,3}(z | 1/2, 0, 0 ; 1/2, m, -1): pi Gamma(m) E[gamma; gamma <= g] / g."""
    return MeijerGSpec.from_groups((0.5, 0.0, 0.0), (), (0.5, m), (-1.0,))


def bob_error_spec(m: int) -> MeijerGSpec:
    """G^{2,3}_{3,3}(z | 1, 1/2, 0 ; 1/2, m, -1): integrated CDF, (pi Gamma(m)/g) int_0^g F."""
    return MeijerGSpec.from_groups((1.0, 0.5, 0.0), (), (0.5, m), (-1.0,))


def eve_cdf_spec(m: int) -> MeijerGSpec:
    """G^{2,5}_{5,7} of the Eve CDF terms (I1, I2, I4)."""
    return MeijerGSpec.from_groups((-0.25, 0.0, 0.25, 0.5, 1.0), (), (0.5, m),
                                   (0.0, -0.5, -0.25, 0.0, 0.25))


def eve_moment_spec(m: int) -> MeijerGSpec:
    """G^{2,5}_{5,7} of the Eve moment term (I3), with a separable lower group."""
    return MeijerGSpec.from_groups((-0.75, -0.5, -0.25, 0.0, -0.5), (), (0.0, m - 0.5),
                                   (-1.0, -0.75, -0.5, -0.25, -1.5))


def printed_eve_moment_spec(m: int) -> MeijerGSpec:
    """The I3 parameter list as printed; its m-group (-3/2, 0) collides with a = -1/2."""
    return MeijerGSpec.from_groups((-0.75, -0.5, -0.25, 0.0, -0.5), (), (-1.5, 0.0),
                                   (m - 0.5, -1.0, -0.75, -0.5, -0.25))


def eve_error_spec(m: int) -> MeijerGSpec:
    """G^{2,2}_{2,4}(y | 1, 1/2 ; 1/2, m, -1/2, -1): Eve's integrated CDF."""
    return MeijerGSpec.from_groups((1.0, 0.5), (), (0.5, m), (-0.5, -1.0))


# Bob ------------------------------------------------------------------------

def bob_cdf(z: float, m: int, rtol: float = 1e-10) -> float:
    """P(gamma_b <= gamma) as a function of z = kappa_b gamma."""
    return meijer_g(bob_cdf_spec(m), z, rtol) / (math.pi * math.gamma(m))


def bob_moment(z: float, m: int, rtol: float = 1e-10) -> float:
    """kappa_b E[gamma_b; gamma_b <= gamma] / z, the exact moment term."""
    return meijer_g(bob_moment_spec(m), z, rtol) / (math.pi * math.gamma(m))


def bob_moment_series(z: float, c: float, d: float, m: int) -> float:
    """Two-term small-z expansion sqrt(z) (c + d z^{m - 1/2}) of :func:`bob_moment`."""
    return math.sqrt(z) * (c + d * z ** (m - 0.5))


def eps_b_closed_form(dc: DerivedConstants, params: SystemParams, moment: str = "exact",
                      rtol: float = 1e-10) -> float:
    """Bob's ramp-surrogate error probability from the four-term expression.

    ``a1 F(z1) + a2 F(z2) - b1 M(z1) + b2 M(z2)`` with F the SIR CDF and M the
    truncated-moment term.  ``moment="exact"`` evaluates M as a Meijer G;
    ``moment="series"`` uses the two-term expansion with constants c, d,
    which is only accurate for small z.
    """
    _require_regime(dc, params)
    b, m = dc.bob, params.m
    if moment == "exact":
        m1, m2 = bob_moment(b.z1, m, rtol), bob_moment(b.z2, m, rtol)
    elif moment == "series":
        m1, m2 = bob_moment_series(b.z1, b.c, b.d, m), bob_moment_series(b.z2, b.c, b.d, m)
    else:
        raise ValueError(f"moment must be 'exact' or 'series', got {moment!r}")
    val = (b.a1 * bob_cdf(b.z1, m, rtol) + b.a2 * bob_cdf(b.z2, m, rtol)
           - b.b1 * m1 + b.b2 * m2)
    return _clamp(val, "eps_b")


def eps_b_closed_form_direct(dc: DerivedConstants, params: SystemParams,
                             rtol: float = 1e-10) -> float:
    """Bob's ramp error as a difference of two integrated-CDF Meijer Gs."""
    _require_regime(dc, params)
    b, spec = dc.bob, bob_error_spec(params.m)
    val = (b.b1 * meijer_g(spec, b.z1, rtol) - b.b2 * meijer_g(spec, b.z2, rtol)) / (
        math.pi * math.gamma(params.m))
    return _clamp(val, "eps_b")


# Eve ------------------------------------------------------------------------

@dataclass(frozen=True)
class AppendixTerms:
    """The four integrals whose combination I1 + I2 - I3 + I4 is eps_e."""

    I1: float
    I2: float
    I3: float
    I4: float

    @property
    def total(self) -> float:
        return self.I1 + self.I2 - self.I3 + self.I4


def _eve_gs(dc, params, rtol, moment_spec=eve_moment_spec):
    e, m = dc.eve, params.m
    ga = eve_cdf_spec(m)
    gb = moment_spec(m)
    return (meijer_g(ga, e.y1, rtol), meijer_g(ga, e.y2, rtol),
            meijer_g(gb, e.y1, rtol), meijer_g(gb, e.y2, rtol))


def eps_e_closed_form(dc: DerivedConstants, params: SystemParams, rtol: float = 1e-10) -> float:
    """Eve's ramp-surrogate error probability, ``B (a1 GA(y1) + A GA(y2)) + C2 GB(y2) - C1 GB(y1)``."""
    _require_regime(dc, params)
    e, a1 = dc.eve, dc.bob.a1
    ga1, ga2, gb1, gb2 = _eve_gs(dc, params, rtol)
    val = e.B * (a1 * ga1 + e.A * ga2) + e.C2 * gb2 - e.C1 * gb1
    return _clamp(val, "eps_e")


def appendix_terms(dc: DerivedConstants, params: SystemParams, rtol: float = 1e-10) -> AppendixTerms:
    """I1 (CDF to theta - a), I2 and I4 (ramp constant parts), I3 (ramp slope part)."""
    _require_regime(dc, params)
    e, lq = dc.eve, dc.linq
    ga1, ga2, gb1, gb2 = _eve_gs(dc, params, rtol)
    i4_pref = 2.0 * lq.mu * lq.theta / (math.gamma(params.m) * math.pi * math.sqrt(2.0)
                                        * params.eta)
    return AppendixTerms(
        I1=e.B * ga2,
        I2=0.5 * e.B * (ga1 - ga2),
        I3=e.C1 * gb1 - e.C2 * gb2,
        I4=i4_pref * (ga1 - ga2),
    )


def appendix_sum(dc: DerivedConstants, params: SystemParams, rtol: float = 1e-10) -> float:
    return _clamp(appendix_terms(dc, params, rtol).total, "eps_e")


def eps_e_closed_form_phi(dc: DerivedConstants, params: SystemParams,
                          rtol: float = 1e-10) -> float:
    """Eve's ramp error from the integrated-CDF function G^{2,2}_{2,4}."""
    _require_regime(dc, params)
    b, e, spec = dc.bob, dc.eve, eve_error_spec(params.m)
    val = (b.b1 * meijer_g(spec, e.y1, rtol) - b.b2 * meijer_g(spec, e.y2, rtol)) / (
        2.0 * _SQRT_PI * math.gamma(params.m))
    return _clamp(val, "eps_e")


# printed expressions, for diagnostics only ---------------------------------

def printed_eps_b(dc: DerivedConstants, params: SystemParams, rtol: float = 1e-10) -> float:
    """Bob's expression as printed, with ``b z (c + d z^{m-1/2})``; not clamped."""
    _require_regime(dc, params)
    b, m = dc.bob, params.m
    return (b.a1 * bob_cdf(b.z1, m, rtol) - b.b1 * b.z1 * (b.c + b.d * b.z1 ** (m - 0.5))
            + b.a2 * bob_cdf(b.z2, m, rtol) + b.b2 * b.z2 * (b.c + b.d * b.z2 ** (m - 0.5)))


def _literal_prefactors(dc, params):
    lq, m, eta = dc.linq, params.m, params.eta
    gm = math.gamma(m)
    B = 2.0 * params.D / (eta * _SQRT_PI * gm)
    c = params.D**3 * dc.t * lq.mu * math.sqrt(m) / (math.sqrt(2.0) * math.pi * gm * eta)
    return B, c * (lq.theta + lq.a) ** 1.5, c * (lq.theta - lq.a) ** 1.5


def printed_eps_e(dc: DerivedConstants, params: SystemParams, rtol: float = 1e-10,
                        moment_spec=printed_eve_moment_spec) -> float:
    """Eve's expression as printed; not clamped.

    With the printed moment parameters this raises ``PoleCollisionError``;
    pass ``moment_spec=eve_moment_spec`` to evaluate the printed prefactors
    with a defined moment function.
    """
    _require_regime(dc, params)
    B, C1, C2 = _literal_prefactors(dc, params)
    ga1, ga2, gb1, gb2 = _eve_gs(dc, params, rtol, moment_spec)
    return B * (ga1 + dc.eve.A * ga2) + C2 * gb2 - C1 * gb1


def printed_appendix_sum(dc: DerivedConstants, params: SystemParams, rtol: float = 1e-10,
                               moment_spec=printed_eve_moment_spec) -> AppendixTerms:
    """The four appendix integrals with their printed prefactors."""
    _require_regime(dc, params)
    B, C1, C2 = _literal_prefactors(dc, params)
    lq = dc.linq
    ga1, ga2, gb1, gb2 = _eve_gs(dc, params, rtol, moment_spec)
    i4_pref = 2.0 * lq.mu * lq.theta / (math.gamma(params.m) * math.pi * math.sqrt(2.0)
                                        * params.eta)
    return AppendixTerms(I1=B * ga2, I2=0.5 * B * (ga1 - ga2),
                         I3=C2 * gb2 - C1 * gb1, I4=i4_pref * (ga1 - ga2))
