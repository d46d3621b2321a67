import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.polynomial import hermite as nph
from scipy import special

from pdemlab import specfun
from pdemlab.errors import DomainError
from pdemlab.specfun import (
    bessel_j1y1,
    bessel_jy,
    ci_difference,
    hermite,
    hermite_scaled,
    inverse_polylog_32,
    kummer_poly,
    li_neg_exp,
    polylog_fd,
    si_cin,
)

from . import oracles as O


# --------------------------------------------------------------------------
# Bessel


def test_j1_small_argument():
    J1, _ = bessel_j1y1(1e-6)
    assert abs(J1 - 5e-7) < 1e-16


def test_j1_first_zero():
    lo, hi = 3.5, 4.0
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        if bessel_j1y1(lo)[0] * bessel_j1y1(mid)[0] <= 0:
            hi = mid
        else:
            lo = mid
    assert abs(0.5 * (lo + hi) - O.J1_ZERO1) < 1e-6
    assert abs(0.5 * (lo + hi) - 3.831706) < 1e-6


@pytest.mark.parametrize("x", [0.5, 2.0, 10.0])
def test_wronskian(x):
    b = bessel_jy(x)
    # J1' = J0 - J1/x, Y1' = Y0 - Y1/x
    w = b.J1 * (b.Y0 - b.Y1 / x) - (b.J0 - b.J1 / x) * b.Y1
    assert w == pytest.approx(2 / (math.pi * x), abs=1e-9)


@settings(max_examples=200, deadline=None)
@given(x=st.floats(1e-3, 60.0))
def test_bessel_against_scipy(x):
    b = bessel_jy(x)
    # absolute error against the O(1) envelope; the power series loses a few
    # digits just below the switch to the asymptotic expansion
    tol = 3e-12
    assert abs(b.J0 - special.j0(x)) < tol
    assert abs(b.J1 - special.j1(x)) < tol
    assert abs(b.Y0 - special.y0(x)) < tol * max(1.0, abs(special.y0(x)))
    assert abs(b.Y1 - special.y1(x)) < tol * max(1.0, abs(special.y1(x)))


def test_bessel_domain():
    with pytest.raises(DomainError):
        bessel_j1y1(0.0)


# --------------------------------------------------------------------------
# Hermite and Kummer


def test_hermite_examples():
    assert hermite(3, 0.0) == 0.0
    assert hermite(2, 1.0) == 2.0
    assert hermite(4, math.sqrt(2)) == pytest.approx(O.H4_SQRT2, abs=1e-12)
    assert hermite(3, math.sqrt(2)) == pytest.approx(O.H3_SQRT2, rel=1e-14)


@given(n=st.integers(0, 30), x=st.floats(-6, 6))
def test_hermite_parity_and_numpy(n, x):
    assert hermite(n, -x) == (-1) ** n * hermite(n, x)
    ref = nph.hermval(x, [0] * n + [1])
    assert hermite(n, x) == pytest.approx(ref, rel=1e-10, abs=1e-10 * 2.0**n)


def test_hermite_scaled_never_overflows():
    mant, expo = hermite_scaled(200, 300.0)
    log2 = math.log2(abs(float(np.squeeze(mant)))) + float(np.squeeze(expo))
    assert np.all(np.isfinite(mant)) and log2 > 1024
    # log2 |H_n(x)| ~ n log2(2x) for x >> sqrt(n)
    assert log2 == pytest.approx(200 * math.log2(600.0), rel=1e-3)
    with pytest.raises(DomainError):
        hermite_scaled(201, 1.0)


def test_kummer_examples():
    assert kummer_poly(0, 2.5, 7.0) == 1.0
    assert kummer_poly(1, 4.0, 2.0) == pytest.approx(1 - 2 / 4)
    assert abs(kummer_poly(2, 3.0, 1.0) - O.KUMMER_M2_3_1) < 1e-12


@given(n=st.integers(0, 12), b=st.floats(0.5, 10), x=st.floats(0, 20))
def test_kummer_against_scipy(n, b, x):
    ref = special.hyp1f1(-n, b, x)
    scale = sum(abs(math.comb(n, k) * math.prod(range(1, k + 1)) / math.prod(b + j for j in range(k))) * x**k
                / math.factorial(k) for k in range(n + 1))
    assert abs(kummer_poly(n, b, x) - ref) <= 1e-12 * scale


# --------------------------------------------------------------------------
# polylog


def test_polylog_at_minus_one():
    assert abs(li_neg_exp(1.5, 0.0) - O.LI32_M1) < 1e-12
    assert abs(li_neg_exp(2.5, 0.0) - O.LI52_M1) < 1e-12
    assert abs(li_neg_exp(0.5, 0.0) - O.LI12_M1) < 1e-12
    assert abs(polylog_fd(1.5, 0.0).value - (-0.765147)) < 1e-6
    assert abs(polylog_fd(2.5, 0.0).value - (-0.867200)) < 1e-6


def test_polylog_dilute_limit():
    assert li_neg_exp(1.5, -40.0) / -math.exp(-40.0) == pytest.approx(1.0, abs=1e-9)


@pytest.mark.parametrize("x", [-2.0, 0.0, 3.0])
def test_polylog_derivative_identity(x):
    h = 1e-4
    for s in (2.5, 1.5):
        d = (li_neg_exp(s, x + h) - li_neg_exp(s, x - h)) / (2 * h)
        assert d == pytest.approx(li_neg_exp(s - 1.0, x), abs=1e-6)


@settings(max_examples=60, deadline=None)
@given(x=st.floats(-50, 50), dx=st.floats(0.01, 5))
def test_polylog_strictly_decreasing(x, dx):
    for s in (1.5, 2.5):
        assert li_neg_exp(s, x + dx) < li_neg_exp(s, x)


def test_polylog_order_rejected():
    with pytest.raises(DomainError):
        li_neg_exp(2.0, 0.0)


def test_inverse_examples():
    assert abs(inverse_polylog_32(-0.765147)) < 1e-6
    assert inverse_polylog_32(-1e-8) == pytest.approx(math.log(1e-8), abs=1e-3)


@pytest.mark.parametrize("x", [-5.0, 0.0, 5.0, 20.0])
def test_inverse_round_trip(x):
    assert abs(inverse_polylog_32(li_neg_exp(1.5, x)) - x) < 1e-9


@settings(max_examples=60, deadline=None)
@given(x=st.floats(-700, 2000))
def test_inverse_is_two_sided(x):
    y = li_neg_exp(1.5, x)
    xr = inverse_polylog_32(y)
    assert abs(xr - x) < 1e-9 * max(1.0, abs(x))
    assert li_neg_exp(1.5, xr) == pytest.approx(y, rel=1e-11)


def test_inverse_domain():
    for y in (0.0, 0.3, float("nan"), float("-inf")):
        with pytest.raises(DomainError):
            inverse_polylog_32(y)


# --------------------------------------------------------------------------
# Si / Cin


def test_si_cin_examples():
    r = si_cin(0.0)
    assert r.Si == 0.0 and r.Cin == 0.0
    assert abs(si_cin(math.pi).Si - O.SI_PI) < 1e-12
    assert abs(si_cin(math.pi).Si - 1.851937) < 1e-6
    # the frozen oracle is direct quadrature of cos t / t on [1, 2]
    assert abs(ci_difference(2.0, 1.0) - O.CI2_MINUS_CI1) < 1e-12


@settings(max_examples=200, deadline=None)
@given(x=st.floats(1e-3, 500))
def test_si_ci_against_scipy(x):
    si, ci = special.sici(x)
    assert si_cin(x).Si == pytest.approx(si, abs=1e-12)
    assert ci_difference(x, 1.0) == pytest.approx(ci - special.sici(1.0)[1], abs=1e-11)


def test_ci_difference_antisymmetric():
    assert ci_difference(0.3, 40.0) == pytest.approx(-ci_difference(40.0, 0.3), abs=1e-15)


def test_crossover_continuity():
    x = specfun.BESSEL_CROSSOVER
    a, b = bessel_jy(x * (1 - 1e-12)), bessel_jy(x * (1 + 1e-12))
    assert abs(a.J1 - b.J1) < 1e-11 and abs(a.Y1 - b.Y1) < 1e-11
