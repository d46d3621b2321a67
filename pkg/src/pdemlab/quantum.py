"""Geometric (Laplace-Beltrami) quantization of a position-dependent mass.

The Hamiltonian is ``-(hbar^2 / 2 m0) M^{-1/2} d/dq M^{-1/2} d/dq + V`` and
states are normalised with the curved measure ``sqrt(M) dq``.  Numerically we
work with ``chi = psi M^{1/4}``, for which the measure is flat and the
discretised Hamiltonian is a real symmetric tridiagonal matrix.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import NamedTuple

import numpy as np
from scipy.linalg import LinAlgError, eigh_tridiagonal

from . import kernels
from .errors import DomainError, NumericError
from .model import (
    NATURAL,
    Grid,
    MassProfile,
    PhysicalConstants,
    Potential,
    ZeroPotential,
    eval_mass,
)
from .specfun import bessel_jy, ci_difference, si_cin

MIN_EIGEN_POINTS = 200


def _sinhc(x):
    return 1.0 if x == 0 else math.sinh(x) / x


def _theta(q, eta, m0):
    """``(m0/eta)(1 - e^{-eta q/m0})``, the flat coordinate; ``q`` when eta = 0."""
    q = np.asarray(q, dtype=float)
    if eta == 0:
        return q.copy()
    return -(m0 / eta) * np.expm1(-eta * q / m0)


# --------------------------------------------------------------------------
# data types


@dataclass(frozen=True)
class WaveSolution:
    """Wavefunction samples on a grid.

    ``measure`` is ``"curved"`` (norm ``int |psi|^2 sqrt(M) dq``) or ``"flat"``.
    """

    grid: Grid
    values: np.ndarray
    energy: float | None = None
    measure: str = "curved"
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if self.measure not in ("curved", "flat"):
            raise DomainError(f"measure must be 'curved' or 'flat', got {self.measure!r}")
        if len(self.values) != self.grid.npoints:
            raise DomainError("values and grid have different lengths")
        if not np.all(np.isfinite(self.values)):
            raise NumericError("wavefunction has non-finite samples")


def _trapz(y, h):
    return h * (np.sum(y) - 0.5 * (y[0] + y[-1]))


def curved_norm(psi: WaveSolution, profile: MassProfile, consts: PhysicalConstants = NATURAL) -> float:
    """Trapezoid estimate of ``int |psi|^2 w dq`` with ``w = sqrt(M)`` or 1 for flat states."""
    q = psi.grid.points
    w = np.sqrt(profile.M(q, consts.m0)) if psi.measure == "curved" else 1.0
    return float(_trapz(np.abs(psi.values) ** 2 * w, psi.grid.spacing))


def normalized(psi: WaveSolution, profile: MassProfile, consts: PhysicalConstants = NATURAL) -> WaveSolution:
    n = curved_norm(psi, profile, consts)
    if not n > 0:
        raise NumericError("cannot normalise a zero wavefunction")
    return WaveSolution(psi.grid, psi.values / math.sqrt(n), psi.energy, psi.measure, dict(psi.meta))


@dataclass(frozen=True)
class OrderingScheme:
    """von Roos ordering ``(1/4m0)[M^nu p M^mu p M^kappa + M^kappa p M^mu p M^nu]``."""

    nu: float
    mu: float
    kappa: float

    def __post_init__(self):
        total = Fraction(self.nu).limit_denominator(10**6) + Fraction(self.mu).limit_denominator(10**6) \
            + Fraction(self.kappa).limit_denominator(10**6)
        if total != -1 or abs(float(self.nu) + float(self.mu) + float(self.kappa) + 1.0) > 1e-12:
            raise DomainError(f"ordering needs nu + mu + kappa = -1, got {self.nu}, {self.mu}, {self.kappa}")


GEOMETRIC_EQUIVALENT = OrderingScheme(-0.25, -0.5, -0.25)


class Level(NamedTuple):
    n: object
    E: float
    admissible: bool = True
    residual: float | None = None
    error: float | None = None


@dataclass(frozen=True)
class SpectrumResult:
    entries: list
    method: str
    scheme: object = "geometric"
    states: list | None = field(default=None, repr=False)

    @property
    def energies(self):
        return np.array([e.E for e in self.entries])


@dataclass(frozen=True)
class ScatterResult:
    """Step scattering.  ``R``/``T`` are the closed forms, ``R_matched``/``T_matched``
    come from matching the exact solutions at ``q = a``; ``mismatch`` is the
    largest violation of the two matching conditions."""

    E: float
    U0: float
    a: float
    eta1: float
    eta2: float
    R: float
    T: float
    R_matched: float
    T_matched: float
    r: complex
    t: complex
    mismatch: float


# --------------------------------------------------------------------------
# quasi-free states


@dataclass(frozen=True)
class QuasiFreeWave:
    """``psi^{+-}(q) = exp{+-i k_eta (1 - e^{-eta q/m0})}`` for ``M = e^{-2 eta q/m0}``.

    ``k_eta = sqrt(2 m0^3 E) / (hbar eta)``; when ``eta = 0`` the phase is ``k q``.
    """

    E: float
    eta: float
    sign: int
    consts: PhysicalConstants = NATURAL

    @property
    def k(self):
        return math.sqrt(2.0 * self.consts.m0 * self.E) / self.consts.hbar

    def phase(self, q):
        return self.sign * self.k * _theta(q, self.eta, self.consts.m0)

    def dphase(self, q):
        return self.sign * self.k * np.exp(-self.eta * np.asarray(q, dtype=float) / self.consts.m0)

    def __call__(self, q):
        return np.exp(1j * self.phase(q))

    def d1(self, q):
        return 1j * self.dphase(q) * self(q)

    def d2(self, q):
        dp = self.dphase(q)
        return (1j * (-self.eta / self.consts.m0) * dp - dp * dp) * self(q)

    def current(self):
        """Measure-weighted current ``sign * hbar k / m0 = sign * sqrt(2 E / m0)``."""
        return self.sign * self.consts.hbar * self.k / self.consts.m0


def quasi_free_wavefunction(E: float, eta: float, direction="+", consts: PhysicalConstants = NATURAL) -> QuasiFreeWave:
    """Right- (``"+"``) or left-moving (``"-"``) stationary state of ``V = 0``, ``M = e^{-2 eta q/m0}``."""
    if not E > 0:
        raise DomainError(f"E must be > 0, got {E!r}")
    if not eta >= 0:
        raise DomainError(f"eta must be >= 0 (use the increasing profile for the other sign), got {eta!r}")
    sign = {"+": 1, "-": -1, 1: 1, -1: -1}.get(direction)
    if sign is None:
        raise DomainError(f"direction must be '+' or '-', got {direction!r}")
    return QuasiFreeWave(float(E), float(eta), sign, consts)


def quasi_free_residual(wave: QuasiFreeWave, q):
    """``psi'' + (eta/m0) psi' + (2 m0 E / hbar^2) e^{-2 eta q/m0} psi``."""
    c = wave.consts
    q = np.asarray(q, dtype=float)
    return wave.d2(q) + (wave.eta / c.m0) * wave.d1(q) \
        + (2.0 * c.m0 * wave.E / c.hbar**2) * np.exp(-2.0 * wave.eta * q / c.m0) * wave(q)


def sample(wave, grid: Grid, energy=None) -> WaveSolution:
    return WaveSolution(grid, np.asarray(wave(grid.points), dtype=complex), energy, "curved")


# --------------------------------------------------------------------------
# densities, currents and the flat transform


class ProbabilityFields(NamedTuple):
    rho_tilde: np.ndarray
    j_tilde: np.ndarray


def probability_fields(psi: WaveSolution, profile: MassProfile, consts: PhysicalConstants = NATURAL) -> ProbabilityFields:
    """``rho~ = |psi|^2 sqrt(M)`` and ``j~ = (hbar / m0 sqrt(M)) Im(psi* psi')``.

    The derivative uses second-order centred differences, one-sided at the edges.
    """
    if psi.grid.npoints < 5:
        raise DomainError("probability_fields needs at least 5 grid points")
    q = psi.grid.points
    M = profile.M(q, consts.m0)
    v = np.asarray(psi.values, dtype=complex)
    dv = np.gradient(v, psi.grid.spacing, edge_order=2)
    rho = np.abs(v) ** 2 * np.sqrt(M)
    j = consts.hbar / (consts.m0 * np.sqrt(M)) * np.imag(np.conj(v) * dv)
    return ProbabilityFields(rho, j)


def vtilde(profile: MassProfile, potential: Potential, consts: PhysicalConstants, q):
    """``V + (hbar^2 / 8 m0 M)[5 M'^2 / (4 M^2) - M''/M]``."""
    m0 = consts.m0
    M = profile.M(q, m0)
    dM = profile.gradM(q, m0)
    d2M = profile.lapM(q, m0)
    return potential.V(q) + consts.hbar**2 / (8.0 * m0 * M) * (1.25 * dM * dM / (M * M) - d2M / M)


class FlatTransform(NamedTuple):
    phi: WaveSolution
    Vtilde: np.ndarray


def flat_transform(psi: WaveSolution, profile: MassProfile, consts: PhysicalConstants = NATURAL,
                   potential: Potential | None = None) -> FlatTransform:
    """``phi = psi M^{-1/4}`` and the potential ``V~`` of its flat Schroedinger equation."""
    potential = potential or ZeroPotential()
    q = psi.grid.points
    M = eval_mass(profile, consts, q).M
    phi = WaveSolution(psi.grid, np.asarray(psi.values) * M**-0.25, psi.energy, "flat")
    return FlatTransform(phi, vtilde(profile, potential, consts, q))


# --------------------------------------------------------------------------
# box with exponentially decreasing mass


def _box_energies(eta, L, n, consts):
    x = eta * L / consts.m0
    return consts.hbar**2 * math.pi**2 * np.asarray(n, dtype=float) ** 2 / (8.0 * consts.m0 * L**2 * _sinhc(x) ** 2)


def box_spectrum(eta: float, L: float, nmax: int, consts: PhysicalConstants = NATURAL, dims: int = 1) -> SpectrumResult:
    """``E_n = (hbar^2 eta^2 / 8 m^3) pi^2 n^2 / sinh^2(eta L / m)`` on ``[-L, L]``.

    Written with ``sinhc`` so that ``eta = 0`` gives the rigid box of width 2L.
    ``dims=3`` lists ``E_{n_x n_y n_z}`` for ``1 <= n_i <= nmax``, sorted.
    """
    if not (eta >= 0 and L > 0 and int(nmax) == nmax and nmax >= 1):
        raise DomainError(f"need eta >= 0, L > 0, integer nmax >= 1; got {eta!r}, {L!r}, {nmax!r}")
    E1 = _box_energies(eta, L, np.arange(1, nmax + 1), consts)
    if dims == 1:
        entries = [Level(n, float(e)) for n, e in zip(range(1, nmax + 1), E1)]
    elif dims == 3:
        rng = range(1, nmax + 1)
        triples = [(a, b, c) for a in rng for b in rng for c in rng]
        entries = sorted((Level(t, float(E1[t[0] - 1] + E1[t[1] - 1] + E1[t[2] - 1])) for t in triples),
                         key=lambda lv: (lv.E, lv.n))
    else:
        raise DomainError(f"dims must be 1 or 3, got {dims!r}")
    return SpectrumResult(entries, "analytic", "geometric")


class BoxEigenfunction(NamedTuple):
    psi: WaveSolution
    Cn: float
    Pn: float


def _box_k(eta, L, n, consts):
    """``k(E_n) = sqrt(2 m^3 E_n) / (hbar eta)``."""
    En = float(_box_energies(eta, L, n, consts))
    return math.sqrt(2.0 * consts.m0**3 * En) / (consts.hbar * eta), En


def box_normalization(n: int, eta: float, L: float, consts: PhysicalConstants = NATURAL) -> float:
    """``|C_n| = sqrt(eta/2m) {2 sinh(eta L/m) - sin[4 k sinh(eta L/m)] / (2k)}^{-1/2}``."""
    m = consts.m0
    x = eta * L / m
    if eta == 0:
        return 1.0 / math.sqrt(4.0 * L)
    k, _ = _box_k(eta, L, n, consts)
    s = math.sinh(x)
    rel = 1.0 - math.sin(4.0 * k * s) / (4.0 * k * s)
    if not rel > 0:
        raise NumericError(f"normalisation radicand is not positive for n={n}, eta={eta}, L={L}")
    # sqrt(eta/2m) / sqrt(2 sinh x * rel) with the eta -> 0 limit kept finite
    return 1.0 / math.sqrt(4.0 * L * _sinhc(x) * rel)


def box_flat_probability(n: int, eta: float, L: float, consts: PhysicalConstants = NATURAL) -> float:
    """``P_n = int_{-L}^{L} |psi_n|^2 dq`` from sine and cosine integrals.

    ``P_n = (2m/eta)|C|^2 {2 eta L/m + cos(a)[Ci(a) - Ci(b)] + sin(a)[Si(a) - Si(b)]}``
    with ``a = 2k e^{-eta L/m}`` and ``b = 2k e^{eta L/m}``.
    """
    m = consts.m0
    if eta == 0:
        return 1.0
    C = box_normalization(n, eta, L, consts)
    k, _ = _box_k(eta, L, n, consts)
    a = 2.0 * k * math.exp(-eta * L / m)
    b = 2.0 * k * math.exp(eta * L / m)
    si_diff = si_cin(a).Si - si_cin(b).Si
    bracket = 2.0 * eta * L / m + math.cos(a) * ci_difference(a, b) + math.sin(a) * si_diff
    return (2.0 * m / eta) * C * C * bracket


def box_eigenfunction_values(n: int, eta: float, L: float, q, consts: PhysicalConstants = NATURAL):
    """``2 |C_n| sin(k (e^{-eta q/m} - e^{-eta L/m}))``.

    This is the two-exponential form ``C[e^{-ik xi} - e^{ik(xi - 2 xi_L)}]`` up to
    the constant phase ``-i e^{-ik xi_L}``.
    """
    m = consts.m0
    q = np.asarray(q, dtype=float)
    if eta == 0:
        u = (L - q) / (2.0 * L)
    else:
        x = eta * L / m
        u = np.exp(-eta * q / m) * -np.expm1(-eta * (L - q) / m) / (2.0 * math.sinh(x))
    return 2.0 * box_normalization(n, eta, L, consts) * np.sin(math.pi * n * u)


def box_eigenfunction(n: int, eta: float, L: float, consts: PhysicalConstants = NATURAL,
                      grid: Grid | None = None) -> BoxEigenfunction:
    """Stationary state ``n`` of the box ``[-L, L]`` with ``M = e^{-2 eta q/m}``."""
    if not (int(n) == n and n >= 1):
        raise DomainError(f"n must be an integer >= 1, got {n!r}")
    if not (eta >= 0 and L > 0):
        raise DomainError(f"need eta >= 0 and L > 0, got {eta!r}, {L!r}")
    if grid is None:
        grid = Grid(-L, L, 1001)
    if abs(grid.qmin + L) > 1e-12 * L or abs(grid.qmax - L) > 1e-12 * L:
        raise DomainError(f"grid must span [-L, L] = [{-L}, {L}], got [{grid.qmin}, {grid.qmax}]")
    vals = box_eigenfunction_values(n, eta, L, grid.points, consts)
    En = float(_box_energies(eta, L, n, consts))
    psi = WaveSolution(grid, vals.astype(complex), En, "curved", {"n": int(n), "eta": eta, "L": L})
    return BoxEigenfunction(psi, box_normalization(n, eta, L, consts), box_flat_probability(n, eta, L, consts))


# --------------------------------------------------------------------------
# step scattering


def scatter_step(E: float, U0: float, a: float = 0.0, eta1: float = 0.0, eta2: float = 0.0,
                 consts: PhysicalConstants = NATURAL) -> ScatterResult:
    """Reflection from ``U0 theta(q - a)`` with mass ``e^{-2 eta_i q/m0}`` on each side.

    On each side the exact solutions are ``exp(+-i K theta_i(q))`` with
    ``K = sqrt(2 m0 (E - U)) / hbar`` and ``theta_i`` the flat coordinate, so
    ``M^{-1/2} psi' = +-i K psi``.  Below the step the right-hand solution is
    ``exp(-kappa theta_2)``.
    """
    if not (E > 0 and U0 > 0):
        raise DomainError(f"need E > 0 and U0 > 0, got E={E!r}, U0={U0!r}")
    if not (eta1 >= 0 and eta2 >= 0):
        raise DomainError("eta1 and eta2 must be >= 0")
    m0, hbar = consts.m0, consts.hbar
    K1 = math.sqrt(2.0 * m0 * E) / hbar
    th1 = float(_theta(a, eta1, m0))
    th2 = float(_theta(a, eta2, m0))
    A = complex(math.cos(K1 * th1), math.sin(K1 * th1))  # incoming e^{+i K1 theta}
    B = A.conjugate()  # reflected e^{-i K1 theta}

    if E > U0:
        s = math.sqrt(1.0 - U0 / E)
        R = ((1.0 - s) / (1.0 + s)) ** 2
        T = 1.0 - R
        K2 = math.sqrt(2.0 * m0 * (E - U0)) / hbar
        Cr = complex(math.cos(K2 * th2), math.sin(K2 * th2))
        D_right = 1j * K2  # M^{-1/2} psi' / psi on the right
    else:
        R, T = 1.0, 0.0
        kap = math.sqrt(2.0 * m0 * (U0 - E)) / hbar
        Cr = complex(math.exp(-kap * th2))
        D_right = -kap

    # unknowns r, t:  A + r B = t Cr ;  i K1 (A - r B) = D_right t Cr
    mat = np.array([[B, -Cr], [-1j * K1 * B, -D_right * Cr]], dtype=complex)
    rhs = np.array([-A, -1j * K1 * A], dtype=complex)
    r, t = np.linalg.solve(mat, rhs)
    mismatch = max(abs(A + r * B - t * Cr), abs(1j * K1 * (A - r * B) - D_right * t * Cr))
    R_m = abs(r) ** 2
    T_m = abs(t) ** 2 * (K2 / K1) if E > U0 else 0.0
    return ScatterResult(float(E), float(U0), float(a), float(eta1), float(eta2), R, T, R_m, T_m,
                         complex(r), complex(t), float(mismatch))


# --------------------------------------------------------------------------
# von Roos ordering nu = kappa = 0


class VonRoosSample(NamedTuple):
    psi: np.ndarray
    d1: np.ndarray
    d2: np.ndarray


def vonroos_values(E: float, eta: float, q, consts: PhysicalConstants = NATURAL, C1=1.0, C2=0.0) -> VonRoosSample:
    """``psi = xi [C1 J1(xi) + C2 Y1(xi)]``, ``xi = sqrt(2 m0^3 E)/(hbar eta) e^{-eta q/m0}``,
    with first and second q-derivatives from ``(x J1)' = x J0`` and ``J0' = -J1``."""
    m0 = consts.m0
    q = np.atleast_1d(np.asarray(q, dtype=float))
    xi = math.sqrt(2.0 * m0**3 * E) / (consts.hbar * eta) * np.exp(-eta * q / m0)
    jy = [bessel_jy(x) for x in xi]
    Z0 = np.array([C1 * b.J0 + C2 * b.Y0 for b in jy])
    Z1 = np.array([C1 * b.J1 + C2 * b.Y1 for b in jy])
    psi = xi * Z1
    psi_x = xi * Z0
    psi_xx = Z0 - xi * Z1
    c = eta / m0
    d1 = -c * xi * psi_x
    d2 = c * c * (xi * psi_x + xi * xi * psi_xx)
    return VonRoosSample(psi, d1, d2)


def vonroos_residual(E, eta, q, consts: PhysicalConstants = NATURAL, C1=1.0, C2=0.0):
    """``psi'' + (2 eta/m0) psi' + (2 m0 E/hbar^2) e^{-2 eta q/m0} psi``."""
    m0 = consts.m0
    s = vonroos_values(E, eta, q, consts, C1, C2)
    q = np.atleast_1d(np.asarray(q, dtype=float))
    return s.d2 + (2.0 * eta / m0) * s.d1 + (2.0 * m0 * E / consts.hbar**2) * np.exp(-2.0 * eta * q / m0) * s.psi


def vonroos_quasi_free(E: float, eta: float, consts: PhysicalConstants = NATURAL, grid: Grid | None = None,
                       C1=1.0, C2=0.0) -> WaveSolution:
    """Bessel-form stationary state of ``H = p M^{-1} p / 2m0`` with ``M = e^{-2 eta q/m0}``.

    The ordering Hamiltonian is Hermitian in the flat measure, so the result
    carries ``measure="flat"``.
    """
    if not (E > 0 and eta > 0):
        raise DomainError(f"need E > 0 and eta > 0, got E={E!r}, eta={eta!r}")
    if grid is None:
        grid = Grid(-2.0, 2.0, 401)
    s = vonroos_values(E, eta, grid.points, consts, C1, C2)
    return WaveSolution(grid, s.psi.astype(complex), float(E), "flat", {"C1": C1, "C2": C2})


def l2_distance(a: np.ndarray, b: np.ndarray, weight: np.ndarray, h: float, align_phase: bool = True) -> float:
    """``|| a/||a|| - e^{i theta} b/||b|| ||`` under ``int |.|^2 weight dq`` (trapezoid).

    With ``align_phase`` the global phase ``theta`` is chosen to minimise the
    distance.
    """
    na = math.sqrt(_trapz(np.abs(a) ** 2 * weight, h))
    nb = math.sqrt(_trapz(np.abs(b) ** 2 * weight, h))
    a = a / na
    b = b / nb
    if align_phase:
        ov = _trapz(np.conj(b) * a * weight, h)
        if abs(ov) > 0:
            b = b * ov / abs(ov)
    return math.sqrt(max(_trapz(np.abs(a - b) ** 2 * weight, h), 0.0))


# --------------------------------------------------------------------------
# finite-difference Hamiltonians and the eigensolver


def _interior(grid):
    q = grid.points
    return q[1:-1], grid.spacing


def geometric_tridiagonal(profile: MassProfile, potential: Potential, consts: PhysicalConstants, grid: Grid):
    """``-(hbar^2/2m0) S L S + diag(V~)`` on interior nodes, ``S = diag(M^{-1/2})``.

    Acts on ``chi = psi M^{1/4}`` with Dirichlet ends.
    """
    q, h = _interior(grid)
    M = eval_mass(profile, consts, q).M
    V = vtilde(profile, potential, consts, q)
    if not np.all(np.isfinite(V)):
        raise DomainError("potential is not finite on the interior grid nodes")
    c = consts.hbar**2 / (consts.m0 * h * h)
    diag = c / M + V
    off = -0.5 * c / np.sqrt(M[:-1] * M[1:])
    return diag, off


def ordering_tridiagonal(profile: MassProfile, potential: Potential, consts: PhysicalConstants, grid: Grid,
                         scheme: OrderingScheme):
    """Symmetric discretisation of the von Roos kinetic term plus ``V``, acting on ``psi``.

    ``-d M^mu d`` becomes ``D^T diag(M_mid^mu / h^2) D``; the outer factors give
    ``H_ij = (hbar^2/4m0) K_ij (a_i b_j + b_i a_j)`` with ``a = M^nu``, ``b = M^kappa``.
    """
    qall = grid.points
    q, h = _interior(grid)
    m0 = consts.m0
    M = eval_mass(profile, consts, q).M
    w = eval_mass(profile, consts, 0.5 * (qall[:-1] + qall[1:])).M ** scheme.mu / (h * h)
    Kd = w[:-1] + w[1:]
    Ko = -w[1:-1]
    a = M**scheme.nu
    b = M**scheme.kappa
    c = consts.hbar**2 / (4.0 * m0)
    V = potential.V(q)
    if not np.all(np.isfinite(V)):
        raise DomainError("potential is not finite on the interior grid nodes")
    diag = c * Kd * 2.0 * a * b + V
    off = c * Ko * (a[:-1] * b[1:] + b[:-1] * a[1:])
    return diag, off


def _tridiagonal(profile, potential, consts, grid, scheme):
    if scheme == "geometric":
        return geometric_tridiagonal(profile, potential, consts, grid)
    if isinstance(scheme, OrderingScheme):
        return ordering_tridiagonal(profile, potential, consts, grid, scheme)
    raise DomainError(f"scheme must be 'geometric' or an OrderingScheme, got {scheme!r}")


def _lowest(diag, off, nlevels, vectors=False):
    # Exponential masses make the matrix strongly graded (diagonal spans ~1e15), so
    # the default eps*||T|| bisection tolerance would swamp the low levels.  Bisect
    # to full accuracy instead; it costs little next to building the matrix.
    tol = 2.0 * np.finfo(float).tiny
    try:
        return eigh_tridiagonal(diag, off, eigvals_only=not vectors, select="i",
                                select_range=(0, nlevels - 1), lapack_driver="stebz", tol=tol)
    except (LinAlgError, ValueError) as exc:
        raise NumericError(f"tridiagonal eigensolve failed: {exc}") from exc


def eigensolve_numeric(profile: MassProfile, potential: Potential, grid: Grid, scheme="geometric",
                       nlevels: int = 5, consts: PhysicalConstants = NATURAL,
                       return_states: bool = False) -> SpectrumResult:
    """Lowest ``nlevels`` Dirichlet eigenvalues of the finite-difference Hamiltonian.

    Each level carries ``error = (E_h - E_2h) / 3``, the Richardson estimate
    from a solve on the grid with doubled spacing.  Levels are labelled
    ``n = 0, 1, ...``.  With ``return_states`` the eigenvectors are returned as
    curved-measure (geometric) or flat-measure (ordering) wavefunctions.
    """
    if grid.npoints < MIN_EIGEN_POINTS:
        raise DomainError(f"eigensolve_numeric needs npoints >= {MIN_EIGEN_POINTS}, got {grid.npoints}")
    if not (int(nlevels) == nlevels and 1 <= nlevels <= grid.npoints // 2 - 2):
        raise DomainError(f"nlevels must be an integer in [1, {grid.npoints // 2 - 2}], got {nlevels!r}")
    diag, off = _tridiagonal(profile, potential, consts, grid, scheme)
    if return_states:
        E, vecs = _lowest(diag, off, nlevels, vectors=True)
    else:
        E = _lowest(diag, off, nlevels)
    coarse = grid.coarsen()
    Ec = _lowest(*_tridiagonal(profile, potential, consts, coarse, scheme), nlevels)
    err = (E - Ec) / 3.0
    entries = [Level(i, float(E[i]), True, None, float(err[i])) for i in range(nlevels)]
    states = None
    if return_states:
        h = grid.spacing
        states = []
        q = grid.points
        for i in range(nlevels):
            v = np.zeros(grid.npoints)
            v[1:-1] = vecs[:, i] / math.sqrt(h)
            if scheme == "geometric":
                v = v * profile.M(q, consts.m0) ** -0.25
                states.append(WaveSolution(grid, v.astype(complex), float(E[i]), "curved"))
            else:
                states.append(WaveSolution(grid, v.astype(complex), float(E[i]), "flat"))
    return SpectrumResult(entries, "numeric", scheme, states)


# --------------------------------------------------------------------------
# time evolution


class Evolution(NamedTuple):
    psi: WaveSolution
    normHistory: np.ndarray


def evolve(psi0: WaveSolution, profile: MassProfile, potential: Potential, dt: float, nsteps: int,
           consts: PhysicalConstants = NATURAL) -> Evolution:
    """Crank-Nicolson propagation with the eigensolver's geometric stencil.

    The state is advanced as ``chi = psi M^{1/4}`` with Dirichlet ends, so the
    recorded norm ``h sum |chi|^2`` is the curved-measure norm of ``psi``.
    """
    if not dt > 0:
        raise DomainError(f"dt must be > 0, got {dt!r}")
    if not (int(nsteps) == nsteps and nsteps >= 0):
        raise DomainError(f"nsteps must be a non-negative integer, got {nsteps!r}")
    if psi0.measure != "curved":
        raise DomainError("evolve expects a curved-measure wavefunction")
    grid = psi0.grid
    q = grid.points
    M = eval_mass(profile, consts, q).M
    diag, off = geometric_tridiagonal(profile, potential, consts, grid)
    chi0 = np.asarray(psi0.values, dtype=complex)[1:-1] * M[1:-1] ** 0.25
    chi, norms = kernels.cn_propagate(diag, off, chi0, dt / (2.0 * consts.hbar), int(nsteps), grid.spacing)
    if not np.all(np.isfinite(chi)):
        raise NumericError("Crank-Nicolson step produced non-finite values")
    vals = np.zeros(grid.npoints, dtype=complex)
    vals[1:-1] = chi * M[1:-1] ** -0.25
    return Evolution(WaveSolution(grid, vals, psi0.energy, "curved", dict(psi0.meta)), np.asarray(norms))


def gaussian_packet(grid: Grid, q0: float, sigma: float, k0: float, profile: MassProfile,
                    consts: PhysicalConstants = NATURAL) -> WaveSolution:
    """``exp(-(q-q0)^2 / 4 sigma^2 + i k0 q)``, curved-measure normalised, zero at the grid ends."""
    q = grid.points
    v = np.exp(-((q - q0) ** 2) / (4.0 * sigma**2) + 1j * k0 * q)
    v[0] = v[-1] = 0.0
    return normalized(WaveSolution(grid, v, None, "curved"), profile, consts)


def centroid(psi: WaveSolution, profile: MassProfile, consts: PhysicalConstants = NATURAL) -> float:
    q = psi.grid.points
    w = np.abs(psi.values) ** 2 * (np.sqrt(profile.M(q, consts.m0)) if psi.measure == "curved" else 1.0)
    return float(_trapz(q * w, psi.grid.spacing) / _trapz(w, psi.grid.spacing))

