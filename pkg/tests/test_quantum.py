import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate

from pdemlab.errors import DomainError
from pdemlab.model import (
    NATURAL,
    ExpDecreasing,
    ExpIncreasing,
    Grid,
    InfiniteBox,
    Morse,
    PhysicalConstants,
    ZeroPotential,
)
from pdemlab.morse import MorseCaseParams, level_increasing
from pdemlab.quantum import (
    GEOMETRIC_EQUIVALENT,
    OrderingScheme,
    WaveSolution,
    box_eigenfunction,
    box_eigenfunction_values,
    box_flat_probability,
    box_normalization,
    box_spectrum,
    centroid,
    curved_norm,
    eigensolve_numeric,
    evolve,
    flat_transform,
    gaussian_packet,
    l2_distance,
    probability_fields,
    quasi_free_residual,
    quasi_free_wavefunction,
    sample,
    scatter_step,
    vonroos_quasi_free,
    vonroos_residual,
    vonroos_values,
)

from . import oracles as O

rng = np.random.default_rng(7)


# --------------------------------------------------------------------------
# quasi-free states


def test_quasi_free_constant_mass_limit():
    E = 0.5
    w = quasi_free_wavefunction(E, 1e-8)
    q = np.linspace(-5, 5, 1001)
    k = math.sqrt(2 * E)
    assert np.max(np.abs(w(q) - np.exp(1j * k * q))) < 1e-6


def test_quasi_free_current():
    for sign, d in [(1, "+"), (-1, "-")]:
        w = quasi_free_wavefunction(0.5, 1.0, d)
        assert w.current() == pytest.approx(sign * 1.0, abs=1e-12)
    c = PhysicalConstants(hbar=0.7, m0=2.0)
    assert quasi_free_wavefunction(0.3, 1.0, "+", c).current() == pytest.approx(math.sqrt(2 * 0.3 / 2.0))


def test_quasi_free_residual():
    w = quasi_free_wavefunction(0.5, 1.0)
    q = rng.uniform(-3, 3, 100)
    assert np.max(np.abs(quasi_free_residual(w, q))) < 1e-9


def test_quasi_free_sampled_current_is_flat():
    g = Grid(-2, 2, 2001)
    w = quasi_free_wavefunction(0.5, 1.0)
    f = probability_fields(sample(w, g, 0.5), ExpDecreasing(1.0))
    assert np.max(np.abs(f.j_tilde[5:-5] - 1.0)) < 1e-4


def test_quasi_free_rejects():
    with pytest.raises(DomainError):
        quasi_free_wavefunction(-1.0, 1.0)
    with pytest.raises(DomainError):
        quasi_free_wavefunction(1.0, -1.0)
    with pytest.raises(DomainError):
        quasi_free_wavefunction(1.0, 1.0, "up")


# --------------------------------------------------------------------------
# fields and the flat transform


def test_real_state_has_no_current():
    g = Grid(-1, 1, 101)
    psi = WaveSolution(g, np.cos(g.points).astype(complex), None, "curved")
    assert np.all(probability_fields(psi, ExpDecreasing(1.0)).j_tilde == 0.0)


def test_box_state_has_no_current():
    b = box_eigenfunction(2, 1.0, 1.0)
    assert np.max(np.abs(probability_fields(b.psi, ExpDecreasing(1.0)).j_tilde)) < 1e-12


def test_fields_need_five_points():
    g = Grid(0, 1, 4)
    with pytest.raises(DomainError):
        probability_fields(WaveSolution(g, np.ones(4, complex), None, "curved"), ExpDecreasing(1.0))


def test_flat_transform_identity_for_constant_mass():
    g = Grid(-1, 1, 51)
    psi = WaveSolution(g, np.exp(1j * g.points), None, "curved")
    pot = Morse(1.0, 1.0)
    ft = flat_transform(psi, ExpDecreasing(0.0), NATURAL, pot)
    assert np.array_equal(ft.phi.values, psi.values)
    assert np.array_equal(ft.Vtilde, pot.V(g.points))


def test_vtilde_exponential_by_hand():
    # M = e^{-2 eta q}: M' = -2 eta M, M'' = 4 eta^2 M, so the bracket is 5 eta^2 - 4 eta^2
    eta, hbar, m0 = 0.7, 1.3, 1.1
    c = PhysicalConstants(hbar=hbar, m0=m0)
    q = rng.uniform(-2, 2, 20)
    g = Grid(-2, 2, 5)
    psi = WaveSolution(g, np.ones(5, complex), None, "curved")
    ft = flat_transform(psi, ExpDecreasing(eta), c)
    M = np.exp(-2 * eta * g.points / m0)
    a = 2 * eta / m0
    by_hand = hbar**2 / (8 * m0 * M) * (1.25 * a * a - a * a)
    assert np.allclose(ft.Vtilde, by_hand, rtol=1e-13, atol=0)
    from pdemlab.quantum import vtilde
    Mq = np.exp(-2 * eta * q / m0)
    assert np.allclose(vtilde(ExpDecreasing(eta), ZeroPotential(), c, q), hbar**2 * eta**2 / (8 * m0**3 * Mq),
                       rtol=1e-13, atol=0)


def test_rho_tilde_identity():
    prof = ExpDecreasing(1.0)
    b = box_eigenfunction(3, 1.0, 1.0)
    rho = probability_fields(b.psi, prof).rho_tilde
    chi = b.psi.values * prof.M(b.psi.grid.points) ** 0.25
    assert np.max(np.abs(rho - np.abs(chi) ** 2)) < 1e-12


# --------------------------------------------------------------------------
# box


def test_box_examples():
    assert box_spectrum(1.0, 1.0, 1).energies[0] == pytest.approx(O.BOX_E1_ETA1, rel=1e-14)
    assert box_spectrum(1.0, 1.0, 1).energies[0] == pytest.approx(0.89328, abs=1e-5)
    assert box_spectrum(0.0, 1.0, 1).energies[0] == pytest.approx(O.BOX_E1_ETA0, rel=1e-15)
    assert box_spectrum(1e-9, 1.0, 1).energies[0] == pytest.approx(O.BOX_E1_ETA0, rel=1e-12)


def test_box_3d_ground_state():
    s1 = box_spectrum(1.0, 1.0, 3)
    s3 = box_spectrum(1.0, 1.0, 3, dims=3)
    assert s3.entries[0].n == (1, 1, 1)
    assert s3.energies[0] == pytest.approx(3 * s1.energies[0])
    assert np.all(np.diff(s3.energies) >= 0)


@settings(max_examples=50, deadline=None)
@given(eta=st.floats(0.01, 3.0), L=st.floats(0.2, 3.0), d=st.floats(0.01, 1.0))
def test_box_levels_monotone(eta, L, d):
    E = box_spectrum(eta, L, 6).energies
    assert np.all(np.diff(E) > 0)
    assert np.all(box_spectrum(eta + d, L, 6).energies < E)


@pytest.mark.parametrize("n,eta,L,tag", [(1, 1.0, 1.0, "1_1_1"), (2, 1.0, 1.0, "2_1_1"), (3, 0.5, 2.0, "3_0p5_2")])
def test_box_normalization_oracles(n, eta, L, tag):
    assert abs(box_normalization(n, eta, L) - getattr(O, f"BOX_C_{tag}")) < 1e-8
    assert abs(box_flat_probability(n, eta, L) - getattr(O, f"BOX_P_{tag}")) < 1e-6


@pytest.mark.parametrize("n,eta,L", [(1, 1.0, 1.0), (3, 0.5, 2.0), (5, 2.0, 0.7)])
def test_box_normalization_quadrature(n, eta, L):
    f = lambda q: box_eigenfunction_values(n, eta, L, q) ** 2 * math.exp(-eta * q)
    val, _ = integrate.quad(f, -L, L, epsabs=1e-13, epsrel=1e-13, limit=200)
    assert val == pytest.approx(1.0, abs=1e-8)


def test_box_boundary_and_grid_norm():
    for n, eta, L in [(1, 1.0, 1.0), (4, 0.5, 2.0)]:
        b = box_eigenfunction(n, eta, L, grid=Grid(-L, L, 4001))
        assert abs(b.psi.values[0]) < 1e-12 and abs(b.psi.values[-1]) < 1e-12
        assert curved_norm(b.psi, ExpDecreasing(eta)) == pytest.approx(1.0, abs=1e-6)


def test_box_density_heavier_on_left():
    for n, eta, L in [(1, 1.0, 1.0), (2, 1.0, 1.0), (3, 0.5, 2.0)]:
        assert box_flat_probability(n, eta, L) > 0
        tag = f"{n}_{str(eta).replace('.0', '').replace('.', 'p')}_{int(L)}"
        assert getattr(O, f"BOX_LEFT_{tag}") > 0.5
        g = Grid(-L, L, 4001)
        rho = probability_fields(box_eigenfunction(n, eta, L, grid=g).psi, ExpDecreasing(eta)).rho_tilde
        half = g.npoints // 2
        left = np.trapezoid(rho[: half + 1], dx=g.spacing)
        right = np.trapezoid(rho[half:], dx=g.spacing)
        assert left > right
        assert left == pytest.approx(getattr(O, f"BOX_LEFT_{tag}"), abs=1e-6)


@settings(max_examples=50, deadline=None)
@given(n=st.integers(1, 30), eta=st.floats(0.01, 3.0), L=st.floats(0.1, 4.0))
def test_box_radicand_positive(n, eta, L):
    assert box_normalization(n, eta, L) > 0


def test_box_grid_must_span():
    with pytest.raises(DomainError):
        box_eigenfunction(1, 1.0, 1.0, grid=Grid(-1, 0.9, 11))
    with pytest.raises(DomainError):
        box_eigenfunction(0, 1.0, 1.0)


# --------------------------------------------------------------------------
# scattering


def test_scatter_reflection_oracle():
    r = scatter_step(2.0, 1.0)
    assert abs(r.R - O.R_E2U0) < 1e-8
    assert abs(r.R - 0.029437) < 1e-6
    assert abs(r.R - r.R_matched) < 1e-8
    assert r.R + r.T == pytest.approx(1.0, abs=1e-10)


@pytest.mark.parametrize("E", [1.3, 2.0, 7.0])
def test_scatter_independent_of_eta(E):
    ref = scatter_step(E, 1.0, 0.4, 0.0, 0.0)
    for e1, e2 in [(0.5, 1.0), (2.0, 0.3)]:
        r = scatter_step(E, 1.0, 0.4, e1, e2)
        assert abs(r.R_matched - ref.R_matched) < 1e-10
        assert abs(r.R - r.R_matched) < 1e-10
        assert r.mismatch < 1e-10


@pytest.mark.parametrize("E", [0.2, 1.0])
def test_scatter_total_reflection(E):
    r = scatter_step(E, 1.0, 0.0, 0.5, 1.0)
    assert r.R == 1.0 and r.T == 0.0
    assert r.R_matched == pytest.approx(1.0, abs=1e-12)


def test_scatter_rejects():
    with pytest.raises(DomainError):
        scatter_step(0.0, 1.0)
    with pytest.raises(DomainError):
        scatter_step(1.0, 1.0, eta1=-1.0)


# --------------------------------------------------------------------------
# von Roos ordering


def test_vonroos_residual():
    q = rng.uniform(-2, 2, 100)
    assert np.max(np.abs(vonroos_residual(0.5, 1.0, q))) < 1e-8


def test_vonroos_differs_from_geometric():
    g = Grid(-2, 2, 2001)
    q = g.points
    w = np.sqrt(ExpDecreasing(1.0).M(q))
    geo = quasi_free_wavefunction(0.5, 1.0)(q)
    vr = vonroos_quasi_free(0.5, 1.0, grid=g).values
    assert l2_distance(geo, vr, w, g.spacing) > 0.01
    # the standing-wave parts of the geometric solution differ as well
    assert l2_distance(geo.real, vr, w, g.spacing) > 0.01
    assert l2_distance(geo.imag, vr, w, g.spacing) > 0.01


@pytest.mark.parametrize("eta", [1e-2, 1e-3, 1e-4])
def test_vonroos_has_no_constant_mass_limit(eta):
    s = vonroos_values(0.5, eta, [0.0, 1.0])
    p = s.psi / s.psi[0]
    assert abs(p[1] - np.exp(1j)) > 0.1


def test_l2_distance_phase_alignment():
    g = Grid(0, 1, 101)
    a = np.exp(1j * g.points)
    assert l2_distance(a, 3j * a, np.ones(101), g.spacing) < 1e-12


def test_ordering_scheme_constraint():
    OrderingScheme(0.0, -1.0, 0.0)
    OrderingScheme(-1 / 3, -1 / 3, -1 / 3)
    with pytest.raises(DomainError):
        OrderingScheme(0.0, -0.5, 0.0)


# --------------------------------------------------------------------------
# numeric eigensolver


def test_numeric_constant_mass_box():
    L = 1.0
    g = Grid(-L, L, 4000)
    res = eigensolve_numeric(ExpDecreasing(0.0), InfiniteBox(L), g, nlevels=5)
    n = np.arange(1, 6)
    assert np.allclose(res.energies, math.pi**2 * n**2 / (8 * L * L), rtol=1e-5, atol=0)


def test_numeric_exponential_box():
    g = Grid(-1, 1, 4000)
    res = eigensolve_numeric(ExpDecreasing(1.0), InfiniteBox(1.0), g, nlevels=5)
    assert np.allclose(res.energies, box_spectrum(1.0, 1.0, 5).energies, rtol=1e-4, atol=0)
    assert all(lv.error is not None and abs(lv.error) < 1e-4 * lv.E for lv in res.entries)
    assert [lv.n for lv in res.entries] == list(range(5))


@pytest.mark.parametrize("qmax", [12.0, 18.0])
def test_numeric_morse_increasing(qmax):
    p = MorseCaseParams(1.0, 1.0)
    g = Grid(-12.0, qmax, 8001)
    res = eigensolve_numeric(ExpIncreasing(1.0), Morse(1.0, 1.0), g, nlevels=3)
    exact = [level_increasing(p, n) for n in range(3)]
    assert np.allclose(res.energies, exact, rtol=1e-3, atol=0)
    assert exact[0] == pytest.approx(-0.5)


def test_geometric_ordering_agrees_with_geometric_scheme():
    g = Grid(-1, 1, 3000)
    a = eigensolve_numeric(ExpDecreasing(1.0), InfiniteBox(1.0), g, nlevels=4).energies
    b = eigensolve_numeric(ExpDecreasing(1.0), InfiniteBox(1.0), g, GEOMETRIC_EQUIVALENT, nlevels=4).energies
    assert np.allclose(a, b, rtol=1e-4, atol=0)
    c = eigensolve_numeric(ExpDecreasing(1.0), InfiniteBox(1.0), g, OrderingScheme(0, -1, 0), nlevels=4).energies
    assert not np.allclose(a, c, rtol=1e-3)


def test_numeric_states_are_normalised():
    g = Grid(-1, 1, 1001)
    res = eigensolve_numeric(ExpDecreasing(1.0), InfiniteBox(1.0), g, nlevels=2, return_states=True)
    for st_ in res.states:
        assert curved_norm(st_, ExpDecreasing(1.0)) == pytest.approx(1.0, abs=1e-8)


def test_numeric_rejects():
    with pytest.raises(DomainError):
        eigensolve_numeric(ExpDecreasing(1.0), InfiniteBox(1.0), Grid(-1, 1, 100))
    with pytest.raises(DomainError):
        eigensolve_numeric(ExpDecreasing(1.0), InfiniteBox(1.0), Grid(-1, 1, 400), nlevels=0)
    with pytest.raises(DomainError):
        eigensolve_numeric(ExpDecreasing(1.0), InfiniteBox(1.0), Grid(-1, 1, 400), scheme="weyl")


# --------------------------------------------------------------------------
# evolution


def test_packet_norm_conserved():
    g = Grid(-5, 5, 1001)
    prof = ExpDecreasing(1.0)
    psi0 = gaussian_packet(g, 0.0, 0.5, 2.0, prof)
    ev = evolve(psi0, prof, ZeroPotential(), 1e-3, 1000)
    assert len(ev.normHistory) == 1001  # includes step 0
    assert np.max(np.abs(ev.normHistory - ev.normHistory[0])) < 1e-8
    assert ev.normHistory[0] == pytest.approx(1.0, abs=1e-3)


def test_box_eigenstate_is_stationary():
    L, eta = 1.0, 1.0
    prof = ExpDecreasing(eta)
    n = 2
    g = Grid(-L, L, 2001)
    res = eigensolve_numeric(prof, InfiniteBox(L), g, nlevels=n, return_states=True)
    psi0 = res.states[n - 1]
    ev = evolve(psi0, prof, InfiniteBox(L), 1e-3, 100)
    assert np.max(np.abs(np.abs(ev.psi.values) - np.abs(psi0.values))) < 1e-6


def test_free_packet_centroid_moves_at_group_velocity():
    g = Grid(-10, 15, 5001)
    prof = ExpDecreasing(0.0)
    k0 = 3.0
    psi0 = gaussian_packet(g, 0.0, 1.0, k0, prof)
    ev = evolve(psi0, prof, ZeroPotential(), 1e-3, 1000)
    shift = centroid(ev.psi, prof) - centroid(psi0, prof)
    assert shift == pytest.approx(k0 * 1.0, rel=0.02)


def test_evolve_rejects():
    g = Grid(-1, 1, 101)
    psi = gaussian_packet(g, 0.0, 0.2, 0.0, ExpDecreasing(0.0))
    with pytest.raises(DomainError):
        evolve(psi, ExpDecreasing(0.0), ZeroPotential(), 0.0, 10)
    flat = WaveSolution(g, psi.values, None, "flat")
    with pytest.raises(DomainError):
        evolve(flat, ExpDecreasing(0.0), ZeroPotential(), 1e-3, 10)
