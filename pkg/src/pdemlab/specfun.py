"""Special functions used by the quantum, gas and Morse modules.

Everything here is implemented directly (power series, asymptotic
expansions, continued fractions, recurrences); scipy is used only as the
adaptive quadrature engine for the Fermi-Dirac integrals.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import kernels
from ._numerics import quad
from .errors import DomainError, NumericError

EULER_GAMMA = 0.57721566490153286061
_TWO_OVER_PI = 2.0 / math.pi

# ---------------------------------------------------------------------------
# Bessel functions of order 0 and 1

# below this argument the power series is used, above it the Hankel expansion
BESSEL_CROSSOVER = 12.5


class BesselJY(NamedTuple):
    J0: float
    J1: float
    Y0: float
    Y1: float


def _bessel_series(x):
    t = 0.25 * x * x
    # k = 0 terms
    a0 = 1.0  # (x/2)^{2k} / (k!)^2
    a1 = 0.5 * x  # (x/2)^{2k+1} / (k! (k+1)!)
    j0 = [a0]
    j1 = [a1]
    y0 = []  # sum_{k>=1} (-1)^{k+1} H_k (x/2)^{2k} / (k!)^2
    y1 = [a1 * (2.0 * -EULER_GAMMA + 1.0)]  # psi(1) + psi(2) = -2 gamma + 1
    hk = 0.0
    for k in range(1, 200):
        a0 *= -t / (k * k)
        a1 *= -t / (k * (k + 1))
        hk += 1.0 / k
        j0.append(a0)
        j1.append(a1)
        y0.append(-a0 * hk)
        # psi(k+1) + psi(k+2) = -2 gamma + 2 H_k + 1/(k+1)
        y1.append(a1 * (-2.0 * EULER_GAMMA + 2.0 * hk + 1.0 / (k + 1)))
        if abs(a0) < 1e-18 * abs(j0[0]) and abs(a1) < 1e-18 * max(abs(j1[0]), 1e-300) and k > 2:
            break
    J0 = math.fsum(j0)
    J1 = math.fsum(j1)
    lg = math.log(0.5 * x)
    Y0 = _TWO_OVER_PI * ((lg + EULER_GAMMA) * J0 + math.fsum(y0))
    Y1 = _TWO_OVER_PI * lg * J1 - _TWO_OVER_PI / x - math.fsum(y1) / math.pi
    return BesselJY(J0, J1, Y0, Y1)


def _hankel_pq(nu, x):
    mu = 4.0 * nu * nu
    P = [1.0]
    Q = []
    term = 1.0
    prev = math.inf
    k = 1
    while k < 200:
        term *= (mu - (2 * k - 1) ** 2) / (k * 8.0 * x)
        if abs(term) > prev or abs(term) < 1e-17:
            break
        prev = abs(term)
        if k % 2:
            Q.append(term * (-1) ** ((k - 1) // 2))
        else:
            P.append(term * (-1) ** (k // 2))
        k += 1
    return math.fsum(P), math.fsum(Q)


def _bessel_asymptotic(x):
    amp = math.sqrt(_TWO_OVER_PI / x)
    out = []
    for nu in (0, 1):
        P, Q = _hankel_pq(nu, x)
        w = x - (0.5 * nu + 0.25) * math.pi
        c, s = math.cos(w), math.sin(w)
        out.append((amp * (P * c - Q * s), amp * (P * s + Q * c)))
    (J0, Y0), (J1, Y1) = out
    return BesselJY(J0, J1, Y0, Y1)


def bessel_jy(x: float) -> BesselJY:
    """J0, J1, Y0, Y1 at ``x > 0``."""
    x = float(x)
    if not x > 0 or not math.isfinite(x):
        raise DomainError(f"Bessel Y is singular for x <= 0; got x={x!r}")
    if x < BESSEL_CROSSOVER:
        return _bessel_series(x)
    return _bessel_asymptotic(x)


def bessel_j1y1(x: float):
    """``(J1(x), Y1(x))`` for ``x > 0``."""
    r = bessel_jy(x)
    return r.J1, r.Y1


# ---------------------------------------------------------------------------
# Hermite polynomials


def hermite_scaled(n: int, x):
    """``H_n(x)`` as ``(mantissa, base-2 exponent)``; never overflows."""
    if int(n) != n or n < 0 or n > 200:
        raise DomainError(f"hermite degree must be an integer in [0, 200], got {n!r}")
    return kernels.hermite_scaled(int(n), x)


def hermite(n: int, x):
    """Physicists' Hermite polynomial ``H_n(x)`` (``H_0 = 1``, ``H_1 = 2x``).

    Values beyond the float range come back as +-inf; use
    :func:`hermite_scaled` when that matters.
    """
    mant, expo = hermite_scaled(n, x)
    with np.errstate(over="ignore"):
        val = np.ldexp(mant, expo.astype(np.int32))
    return float(val[0]) if np.ndim(x) == 0 else val


# ---------------------------------------------------------------------------
# terminating confluent hypergeometric series


def kummer_poly(n: int, b: float, x):
    """``M(-n, b, x) = sum_{k=0}^{n} (-n)_k / (b)_k x^k / k!`` for integer ``n >= 0``."""
    if int(n) != n or n < 0:
        raise DomainError(f"n must be a non-negative integer, got {n!r}")
    if not b > 0:
        raise DomainError(f"b must be > 0, got {b!r}")
    val = kernels.kummer_terminating(int(n), float(b), x)
    return float(val[0]) if np.ndim(x) == 0 else val


# ---------------------------------------------------------------------------
# Fermi-Dirac integrals as polylogarithms of negative argument

_SUPPORTED_ORDERS = {0.5: math.sqrt(math.pi), 1.5: 0.5 * math.sqrt(math.pi), 2.5: 0.75 * math.sqrt(math.pi)}
# t^{s-1} dt -> 2 u^{2s-1} du removes the square-root cusp at t = 0
_SERIES_BELOW = -30.0


@dataclass(frozen=True)
class PolylogValue:
    s: float
    x: float
    value: float


def _order(s):
    s = float(s)
    if s not in _SUPPORTED_ORDERS:
        raise DomainError(f"polylog order must be one of 1/2, 3/2, 5/2; got {s!r}")
    return s


def li_neg_exp(s: float, x: float) -> float:
    """``Li_s(-e^x)`` as a float (orders 1/2, 3/2, 5/2)."""
    s = _order(s)
    x = float(x)
    if not math.isfinite(x):
        raise DomainError(f"x must be finite, got {x!r}")
    if x < _SERIES_BELOW:
        z = math.exp(x)
        terms = []
        zk = 1.0
        for k in range(1, 60):
            zk *= -z
            t = zk / k**s
            terms.append(t)
            if abs(t) < 1e-18 * abs(terms[0]):
                break
        return math.fsum(terms)
    p = 2.0 * s - 1.0

    def integrand(u):
        y = u * u - x
        f = math.exp(-y) / (1.0 + math.exp(-y)) if y > 0 else 1.0 / (1.0 + math.exp(y))
        return 2.0 * u**p * f

    u0 = math.sqrt(max(x, 0.0))
    umax = math.sqrt(max(x, 0.0) + 100.0)
    total = quad(integrand, 0.0, u0, epsabs=0.0, epsrel=1e-13) if u0 > 0 else 0.0
    total += quad(integrand, u0, umax, epsabs=0.0, epsrel=1e-13)
    return -total / _SUPPORTED_ORDERS[s]


def polylog_fd(s: float, x: float) -> PolylogValue:
    """``Li_s(-e^x)`` via the Fermi-Dirac integral ``-(1/Gamma(s)) int t^{s-1}/(e^{t-x}+1) dt``."""
    return PolylogValue(float(s), float(x), li_neg_exp(s, x))


def inverse_polylog_32(y: float, rtol: float = 1e-13) -> float:
    """Solve ``Li_{3/2}(-e^x) = y`` for ``x`` (``y < 0``).

    Newton on ``log(-Li_{3/2})``, whose slope ``Li_{1/2}/Li_{3/2}`` follows
    from ``d/dx Li_s(-e^x) = Li_{s-1}(-e^x)``, kept inside a bisection bracket.
    """
    y = float(y)
    if not y < 0 or not math.isfinite(y):
        raise DomainError(f"inverse_polylog_32 needs a finite y < 0, got {y!r}")
    target = math.log(-y)

    def g(x):
        if x < _SERIES_BELOW:
            # -Li = e^x (1 - e^x/2^s + ...), kept in log form so e^x may underflow
            z = math.exp(x)
            return x + math.log1p(-z / 2**1.5 + z * z / 3**1.5) - target
        return math.log(-li_neg_exp(1.5, x)) - target

    # dilute limit -Li ~ e^x; degenerate limit -Li ~ (4/(3 sqrt(pi))) x^{3/2}
    if -y < 1.0:
        x = target
    else:
        x = (0.75 * math.sqrt(math.pi) * -y) ** (2.0 / 3.0)
    lo, hi = x - 1.0, x + 1.0
    step = 1.0
    while g(lo) > 0:
        step *= 2.0
        lo -= step
    step = 1.0
    while g(hi) < 0:
        step *= 2.0
        hi += step
    for _ in range(200):
        gx = g(x)
        if gx > 0:
            hi = min(hi, x)
        else:
            lo = max(lo, x)
        if abs(gx) < rtol:
            return x
        slope = li_neg_exp(0.5, x) / li_neg_exp(1.5, x) if x >= _SERIES_BELOW else 1.0
        xn = x - gx / slope
        if not (lo < xn < hi):
            xn = 0.5 * (lo + hi)
        if abs(xn - x) < 1e-15 * max(1.0, abs(x)):
            return xn
        x = xn
    raise NumericError(f"inverse_polylog_32 did not converge for y={y!r}")


# ---------------------------------------------------------------------------
# sine integral and the entire cosine integral


class SiCin(NamedTuple):
    Si: float
    Cin: float


def _si_cin_series(x):
    t = -x * x
    si_terms = [x]
    cin_terms = []
    a = x  # x^{2k+1} / (2k+1)!
    b = 1.0  # x^{2k} / (2k)!, signed
    for k in range(1, 100):
        a *= t / ((2 * k) * (2 * k + 1))
        b *= t / ((2 * k - 1) * (2 * k))
        si_terms.append(a / (2 * k + 1))
        cin_terms.append(-b / (2 * k))
        if abs(a) < 1e-18 * abs(x) and abs(b) < 1e-18:
            break
    return SiCin(math.fsum(si_terms), math.fsum(cin_terms))


def _ci_si_cf(x):
    # E1(i x) by the modified Lentz continued fraction; E1(ix) = -Ci(x) + i (Si(x) - pi/2)
    tiny = 1e-300
    b = complex(1.0, x)
    c = 1.0 / tiny
    d = 1.0 / b
    h = d
    for i in range(2, 10000):
        a = -float((i - 1) ** 2)
        b += 2.0
        d = 1.0 / (a * d + b)
        c = b + a / c
        delta = c * d
        h *= delta
        if abs(delta.real - 1.0) + abs(delta.imag) < 1e-16:
            break
    else:
        raise NumericError(f"Si/Ci continued fraction failed at x={x!r}")
    h *= complex(math.cos(x), -math.sin(x))
    return -h.real, 0.5 * math.pi + h.imag  # Ci, Si


def si_cin(x: float) -> SiCin:
    """``Si(x)`` and ``Cin(x) = int_0^x (1 - cos t)/t dt`` for ``x >= 0``."""
    x = float(x)
    if not x >= 0 or not math.isfinite(x):
        raise DomainError(f"si_cin needs finite x >= 0, got {x!r}")
    if x == 0.0:
        return SiCin(0.0, 0.0)
    if x <= 2.0:
        return _si_cin_series(x)
    ci, si = _ci_si_cf(x)
    return SiCin(si, EULER_GAMMA + math.log(x) - ci)


def ci_difference(a: float, b: float) -> float:
    """``Ci(a) - Ci(b)`` for ``a, b > 0`` without ever forming the divergent ``Ci(0)``."""
    if not (a > 0 and b > 0):
        raise DomainError(f"ci_difference needs a, b > 0, got {a!r}, {b!r}")
    return (math.log(a) - math.log(b)) - (si_cin(a).Cin - si_cin(b).Cin)
