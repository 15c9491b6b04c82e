"""Independent reference computations used only by the tests.

None of these import the package's special-function or quadrature code:
the error probabilities are written as one-dimensional gamma integrals of
the unconditional SIR CDF, with the distance average done analytically and
the fading average by scipy's adaptive quadrature.
"""

from __future__ import annotations

import math
import warnings

import mpmath as mp
import numpy as np
from scipy import integrate, special

LOG2E = 1.0 / math.log(2.0)


def erf_series(x: float, terms: int = 80) -> float:
    """Maclaurin series of erf, valid for moderate |x|."""
    s = 0.0
    for n in range(terms):
        s += (-1) ** n * x ** (2 * n + 1) / (math.factorial(n) * (2 * n + 1))
    return 2.0 / math.sqrt(math.pi) * s


def q_series(x: float) -> float:
    return 0.5 * (1.0 - erf_series(x / math.sqrt(2.0)))


def bessel_i_series(nu: float, x: float, terms: int = 60) -> float:
    return sum((x / 2) ** (2 * k + nu) / (math.factorial(k) * math.gamma(k + nu + 1))
               for k in range(terms))


def bessel_k_series(nu: float, x: float) -> float:
    """K_nu for non-integer nu from the I_{+-nu} series."""
    return math.pi / 2 * (bessel_i_series(-nu, x) - bessel_i_series(nu, x)) / math.sin(nu * math.pi)


def kww_t(p, lambda_u, m, eta=4.0):
    d = 2.0 / eta
    return p * lambda_u * math.pi * math.gamma(m + d) / (math.gamma(m) * m**d) * math.gamma(1 - d)


def ramp_params(n, R):
    mu = math.sqrt(n / (2 * math.pi * (2 ** (2 * R) - 1) * LOG2E**2))
    theta = 2**R - 1
    return mu, theta, math.sqrt(math.pi / (2 * mu**2))


def _avg_fading(fun, m):
    """E[fun(x)] for x ~ Gamma(m, 1), split at the mode for robustness."""
    dens = lambda x: x ** (m - 1) * math.exp(-x) / math.gamma(m)
    pieces = [0.0, max(m - 1.0, 1e-3), m + 10 * math.sqrt(m), m + 60 * math.sqrt(m) + 40]
    with warnings.catch_warnings():
        # roundoff notices near the requested 1e-14 floor are harmless here
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        return sum(integrate.quad(lambda x: fun(x) * dens(x), a, b, epsabs=1e-14, epsrel=1e-12,
                                  limit=200)[0] for a, b in zip(pieces, pieces[1:]))


def sir_cdf(gamma, receiver, P):
    """Unconditional P(SIR <= gamma) at Bob or Eve (eta = 4)."""
    t = kww_t(P["p"], P["lambda_u"], P["m"])
    m = P["m"]
    if receiver == "bob":
        kz = t**2 * m / (P["G_b"] * (P["lambda_b"] * math.pi) ** 2) * gamma
        # E_rho erf(c rho), rho ~ Exp(1), equals erfcx(1 / (2c)); 1/(4c^2) = x / kz
        return _avg_fading(lambda x: special.erfcx(math.sqrt(x / kz)), m)
    kappa = t * P["D"] ** 2 * math.sqrt(m) / (2 * math.sqrt(P["G_e"]))
    def f(x):
        u = kappa * math.sqrt(gamma / x)
        # E_rho erf(u rho), rho ~ U(0, 1)
        if u < 1e-4:
            return u / math.sqrt(math.pi) * (1 - u * u / 6)
        return special.erf(u) + math.expm1(-u * u) / (u * math.sqrt(math.pi))
    return _avg_fading(f, m)


def eps_linearized(receiver, P):
    """(mu / sqrt(2 pi)) int_lo^hi F(gamma) d gamma, lower limit clamped at 0."""
    mu, th, a = ramp_params(P["n"], P["R"])
    lo = max(th - a, 0.0)
    val = integrate.quad(lambda g: sir_cdf(g, receiver, P), lo, th + a, epsabs=1e-13,
                         epsrel=1e-11, limit=200)[0]
    return mu / math.sqrt(2 * math.pi) * val


def eps_normal(receiver, P):
    """int -eps'(gamma) F(gamma) d gamma for eps = Q(sqrt(n/V)(C - R)), over log gamma."""
    n, R = P["n"], P["R"]

    def arg(g):
        V = g * (g + 2) / (1 + g) ** 2 * LOG2E**2
        return math.sqrt(n / V) * (math.log2(1 + g) - R)

    def darg(g, h=1e-6):
        return (arg(g * (1 + h)) - arg(g * (1 - h))) / (2 * g * h)

    def integrand(w):
        g = math.exp(w)
        return math.exp(-arg(g) ** 2 / 2) / math.sqrt(2 * math.pi) * darg(g) * g * sir_cdf(g, receiver, P)

    th = 2**R - 1
    w0 = math.log(th)
    span = 12.0 / math.sqrt(n) + 0.5
    edges = [w0 - 12 * span, w0 - 2 * span, w0, w0 + 2 * span, w0 + 12 * span]
    return sum(integrate.quad(integrand, a, b, epsabs=1e-13, epsrel=1e-10, limit=200)[0]
               for a, b in zip(edges, edges[1:]))


def mp_meijer(a_n, a_rest, b_m, b_rest, z, dps=30):
    with mp.workdps(dps):
        return float(mp.re(mp.meijerg([list(a_n), list(a_rest)], [list(b_m), list(b_rest)], z)))


def mp_mellin_barnes(a_n, a_rest, b_m, b_rest, z, c, dps=25):
    """Brute-force line integral of the Mellin-Barnes integrand at Re s = c."""
    with mp.workdps(dps):
        def kern(s):
            num = mp.mpf(1)
            for b in b_m:
                num *= mp.gamma(b - s)
            for a in a_n:
                num *= mp.gamma(1 - a + s)
            den = mp.mpf(1)
            for b in b_rest:
                den *= mp.gamma(1 - b + s)
            for a in a_rest:
                den *= mp.gamma(a - s)
            return num / den * mp.power(z, s)
        f = lambda y: mp.re(kern(mp.mpc(c, y)))
        return float(mp.quad(f, mp.linspace(-80, 80, 33)) / (2 * mp.pi))


def ac2_dict(**changes):
    P = dict(lambda_u=1e-3, lambda_b=1e-4, p=0.01, eta=4.0, m=1, D=50.0, G_b=31.6, G_e=1.0,
             n=512, R=1.0)
    P.update(changes)
    return P


def empirical_ks(sample, cdf):
    from scipy import stats
    return stats.kstest(np.asarray(sample), cdf).pvalue
