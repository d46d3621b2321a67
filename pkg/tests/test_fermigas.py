import math
import warnings

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pdemlab.errors import DomainError
from pdemlab.fermigas import (
    GasParams,
    brute_force_fermi_energy,
    classical_thermo,
    count_states_below,
    density_of_states_prefactor,
    fermi_energy,
    fermi_t0,
    finite_t,
    geometric_volume,
    particle_number,
    sommerfeld,
)
from pdemlab.model import PhysicalConstants

from . import oracles as O


def at_tau(tau, N=100, L=1.0, eta=1.0, **kw):
    eF = fermi_energy(GasParams(N, L, eta, **kw))
    return GasParams(N, L, eta, T=tau * eF, **kw), eF


# --------------------------------------------------------------------------
# volume and classical gas


def test_volume_examples():
    assert geometric_volume(GasParams(1, 1.0, 1e-10)) == pytest.approx(8.0, abs=1e-6)
    assert geometric_volume(GasParams(1, 1.0, 0.0)) == 8.0
    assert geometric_volume(GasParams(1, 1.0, 1.0)) == pytest.approx(O.VETA_1, rel=1e-14)
    assert geometric_volume(GasParams(1, (1.0, 2.0, 0.5), 1.0)) == pytest.approx(
        8 * math.sinh(1) * math.sinh(2) * math.sinh(0.5), rel=1e-14)


@given(eta=st.floats(0, 3), d=st.floats(0.01, 1), L=st.floats(0.1, 3))
def test_volume_increases_with_eta(eta, d, L):
    assert geometric_volume(GasParams(1, L, eta + d)) > geometric_volume(GasParams(1, L, eta))


@pytest.mark.parametrize("eta", [0.0, 0.5, 1.0, 3.0])
def test_classical_gas(eta):
    p = GasParams(100, 1.0, eta, T=2.0)
    r = classical_thermo(p)
    assert r.P * r.Veta == pytest.approx(100 * 2.0, rel=2e-16)
    assert r.U / (100 * 2.0) == 1.5
    assert r.Cv == 1.5 * 100


def test_classical_mu_closed_form():
    p = GasParams(50, 1.0, 1.0, T=0.7)
    h = 2 * math.pi
    mu = 3 * 0.7 * math.log(h * 1.0 * 50 ** (1 / 3) / (2 * math.sqrt(2 * math.pi * 0.7) * math.sinh(1.0)))
    assert classical_thermo(p).mu == pytest.approx(mu, rel=1e-12)


def test_classical_free_energy_is_stirling_of_lnZ():
    # large N makes Stirling's error O(ln N / N)
    r = classical_thermo(GasParams(10**6, 1.0, 1.0, T=3.0))
    assert r.F == pytest.approx(-3.0 * r.lnZ, rel=1e-5)


def test_classical_needs_temperature():
    with pytest.raises(DomainError):
        classical_thermo(GasParams(10, 1.0, 1.0, T=0.0))


def test_params_reject():
    for kw in [dict(N=0), dict(N=1.5), dict(N=1, L=-1.0), dict(N=1, eta=-0.1), dict(N=1, gdeg=0), dict(N=1, T=-1.0),
               dict(N=1, L=(1.0, 2.0))]:
        with pytest.raises(DomainError):
            GasParams(**kw)


# --------------------------------------------------------------------------
# T = 0


def test_fermi_energy_examples():
    p = GasParams(100, 1.0, 1.0)
    assert fermi_energy(p) == pytest.approx(O.EPSF_100, rel=1e-13)
    assert abs(fermi_energy(p) - 18.66) < 0.5
    closed = math.pi**2 / (8 * math.sinh(1) ** 2) * (6 * math.pi**2 * 100 / 2) ** (2 / 3) / math.pi**2
    assert fermi_energy(p) == pytest.approx(closed, rel=1e-13)
    flat = 0.5 * (6 * math.pi**2 * 100 / (2 * 8.0)) ** (2 / 3)
    assert fermi_energy(GasParams(100, 1.0, 1e-9)) == pytest.approx(flat, rel=1e-12)


def test_t0_report():
    r = fermi_t0(GasParams(100, 1.0, 1.0))
    assert r.U / (100 * r.epsF) == pytest.approx(0.6, rel=1e-15)
    assert r.mu == r.epsF and r.Cv == 0.0
    assert r.P == pytest.approx(2 * r.U / (3 * r.Veta))


def test_t0_pressure_is_volume_derivative():
    def U_of_V(eta):
        return fermi_t0(GasParams(100, 1.0, eta)).U

    e, d = 1.0, 1e-5
    dU = (U_of_V(e + d) - U_of_V(e - d)) / (2 * d)
    dV = (geometric_volume(GasParams(1, 1.0, e + d)) - geometric_volume(GasParams(1, 1.0, e - d))) / (2 * d)
    assert fermi_t0(GasParams(100, 1.0, e)).P == pytest.approx(-dU / dV, rel=1e-7)


@given(eta=st.floats(0, 3), d=st.floats(0.01, 1))
def test_fermi_energy_decreases_with_eta(eta, d):
    assert fermi_energy(GasParams(100, 1.0, eta + d)) < fermi_energy(GasParams(100, 1.0, eta))


def test_dos_integrates_to_N():
    p = GasParams(100, 1.0, 1.0)
    A = density_of_states_prefactor(p)
    assert A * (2 / 3) * fermi_energy(p) ** 1.5 == pytest.approx(100, rel=1e-13)


def test_brute_force_level_filling():
    p = GasParams(100, 1.0, 1.0)
    assert brute_force_fermi_energy(p) == pytest.approx(O.BRUTE_EPSF_100, rel=1e-13)
    eb = brute_force_fermi_energy(p)
    # the top level is degenerate; nudge past rounding in the sum c (nx^2 + ny^2 + nz^2)
    assert count_states_below(p, eb * (1 + 1e-12)) >= 100
    assert count_states_below(p, eb * (1 - 1e-9)) < 100


def test_count_states_agrees_with_continuum_at_large_N():
    # Weyl's law with the Dirichlet surface term: the continuum count converges slowly
    p = GasParams(20000, 1.0, 1.0)
    eF = fermi_energy(p)
    assert count_states_below(p, eF) / 20000 == pytest.approx(1.0, abs=0.15)


# --------------------------------------------------------------------------
# finite temperature


@pytest.mark.parametrize("tag", ["0p001", "0p05", "0p15", "1", "50"])
def test_finite_t_oracles(tag):
    tau = float(tag.replace("p", "."))
    p, eF = at_tau(tau)
    r = finite_t(p)
    assert r.mu / eF == pytest.approx(getattr(O, f"FD_MU_{tag}"), rel=1e-9, abs=1e-9)
    assert r.U / (100 * eF) == pytest.approx(getattr(O, f"FD_U_{tag}"), rel=1e-9)
    assert r.Cv / 100 == pytest.approx(getattr(O, f"FD_CV_{tag}"), rel=1e-8)


def test_exact_cv_is_energy_derivative():
    assert O.FD_CV_0p05 == pytest.approx(O.FD_CV_0p05_DIFF, rel=1e-12)


def test_degenerate_and_classical_limits():
    p, eF = at_tau(1e-3)
    assert abs(finite_t(p).mu / eF - 1) < 1e-3
    p, eF = at_tau(50.0)
    assert finite_t(p).Cv / 100 == pytest.approx(1.5, abs=0.02)


@pytest.mark.parametrize("tau", [1e-3, 0.05, 1.0, 20.0])
def test_particle_number_round_trip(tau):
    for eta in (0.0, 1.0):
        p, _ = at_tau(tau, eta=eta)
        assert particle_number(p, finite_t(p).mu) == pytest.approx(100, rel=1e-8)


@settings(max_examples=30, deadline=None)
@given(t1=st.floats(1e-3, 10), r=st.floats(1.01, 3))
def test_mu_decreases_with_temperature(t1, r):
    p1, _ = at_tau(t1)
    p2, _ = at_tau(t1 * r)
    assert finite_t(p2).mu < finite_t(p1).mu < fermi_energy(p1)


def test_finite_t_cv_grows_with_eta():
    T = 2.0
    c1 = finite_t(GasParams(100, 1.0, 1.0, T=T)).Cv
    c2 = finite_t(GasParams(100, 1.0, 2.0, T=T)).Cv
    assert c2 > c1 > 0


def test_finite_t_units():
    c = PhysicalConstants(hbar=1.3, m0=0.8, kB=2.0)
    p = GasParams(100, 1.0, 1.0, consts=c)
    eF = fermi_energy(p)
    q = GasParams(100, 1.0, 1.0, T=0.05 * eF / 2.0, consts=c)
    r = finite_t(q)
    assert r.Cv / (100 * 2.0) == pytest.approx(O.FD_CV_0p05, rel=1e-8)
    assert r.mu / eF == pytest.approx(O.FD_MU_0p05, rel=1e-9)


# --------------------------------------------------------------------------
# Sommerfeld


def test_sommerfeld_zero_temperature():
    r = sommerfeld(GasParams(100, 1.0, 1.0))
    assert r.mu == r.epsF and r.Cv == 0.0
    assert r.U == pytest.approx(0.6 * 100 * r.epsF)


def test_sommerfeld_cv_example():
    p, _ = at_tau(0.05)
    s = sommerfeld(p)
    assert s.Cv / 100 == pytest.approx(0.246740, abs=1e-6)
    assert abs(s.Cv - finite_t(p).Cv) / finite_t(p).Cv < 0.01


def test_sommerfeld_error_at_larger_tau():
    # the leading-order Cv misses the -(3 pi^2/10) tau^2 correction, about 9% at tau = 0.15
    p, _ = at_tau(0.15)
    err = abs(sommerfeld(p).Cv - finite_t(p).Cv) / finite_t(p).Cv
    assert 0.05 < err < 0.1


def test_sommerfeld_warns_above_range():
    p, _ = at_tau(0.3)
    with pytest.warns(UserWarning):
        sommerfeld(p)
    p, _ = at_tau(0.1)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        sommerfeld(p)


def test_sommerfeld_cv_grows_with_eta():
    T = 0.5
    assert sommerfeld(GasParams(100, 1.0, 2.0, T=T)).Cv > sommerfeld(GasParams(100, 1.0, 1.0, T=T)).Cv
