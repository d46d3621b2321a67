"""Ideal gas of damped-antidamped particles in the box ``[-L, L]^3``.

Each particle has the diagonal mass tensor ``m e^{-2 eta q_i / m}``; the
configuration-space volume picks up the curved measure and becomes
``V(eta) = [(2m/eta) sinh(eta L/m)]^3``.  Every quantity below depends on
``eta`` only through ``V(eta)``.
"""
from __future__ import annotations

import heapq
import math
import warnings
from dataclasses import dataclass, field

from .errors import DomainError, NumericError
from .model import NATURAL, PhysicalConstants
from .specfun import inverse_polylog_32, li_neg_exp

SOMMERFELD_MAX_TAU = 0.2


def _sinhc(x):
    return 1.0 if x == 0 else math.sinh(x) / x


@dataclass(frozen=True)
class GasParams:
    """``L`` is a half-width or a triple ``(L1, L2, L3)`` of half-widths."""

    N: int
    L: float | tuple = 1.0
    eta: float = 1.0
    gdeg: int = 2
    T: float = 0.0
    consts: PhysicalConstants = field(default=NATURAL)

    def __post_init__(self):
        if not (int(self.N) == self.N and self.N > 0):
            raise DomainError(f"N must be a positive integer, got {self.N!r}")
        if not all(x > 0 for x in self.lengths):
            raise DomainError(f"L must be > 0, got {self.L!r}")
        if not self.eta >= 0:
            raise DomainError(f"eta must be >= 0, got {self.eta!r}")
        if not (int(self.gdeg) == self.gdeg and self.gdeg >= 1):
            raise DomainError(f"gdeg must be an integer >= 1, got {self.gdeg!r}")
        if not self.T >= 0:
            raise DomainError(f"T must be >= 0, got {self.T!r}")

    @property
    def lengths(self):
        if isinstance(self.L, (tuple, list)):
            if len(self.L) != 3:
                raise DomainError(f"L must be a number or a triple, got {self.L!r}")
            return tuple(float(x) for x in self.L)
        return (float(self.L),) * 3

    @property
    def kT(self):
        return self.consts.kB * self.T


@dataclass(frozen=True)
class ThermoReport:
    regime: str
    N: int
    L: object
    eta: float
    T: float
    Veta: float
    P: float
    mu: float
    U: float
    Cv: float
    F: float | None = None
    lnZ: float | None = None
    epsF: float | None = None

    def row(self):
        """Values in the CLI column order ``N,L,eta,T,Veta,P,mu,U,Cv,epsF,regime``."""
        return {"N": self.N, "L": self.L, "eta": self.eta, "T": self.T, "Veta": self.Veta, "P": self.P,
                "mu": self.mu, "U": self.U, "Cv": self.Cv, "epsF": self.epsF, "regime": self.regime}


def geometric_volume(params: GasParams) -> float:
    """``prod_i (2m/eta) sinh(eta L_i / m)``, written as ``prod_i 2 L_i sinhc(eta L_i/m)``."""
    m = params.consts.m0
    V = 1.0
    for Li in params.lengths:
        V *= 2.0 * Li * _sinhc(params.eta * Li / m)
    return V


# --------------------------------------------------------------------------
# classical gas


def classical_thermo(params: GasParams) -> ThermoReport:
    """Maxwell-Boltzmann gas.

    ``lnZ`` is exact (``ln N!`` via lgamma); ``F`` uses Stirling's formula as in
    ``F = -kT N {3/2 ln T + ln(V/N) + ln[(2 pi m kB)^{3/2} e / h^3]}``.
    """
    if not params.T > 0:
        raise DomainError("classical_thermo needs T > 0")
    c = params.consts
    N, T, kB, m, h = params.N, params.T, c.kB, c.m0, c.h
    kT = kB * T
    V = geometric_volume(params)
    lnZ = -math.lgamma(N + 1) - 3 * N * math.log(h) + 1.5 * N * math.log(2.0 * math.pi * m * kT) + N * math.log(V)
    F = -kT * N * (1.5 * math.log(T) + math.log(V / N) + math.log((2.0 * math.pi * m * kB) ** 1.5 * math.e / h**3))
    P = N * kT / V
    # mu = 3 kT ln[h eta N^{1/3} / (2 sqrt(2 pi kB m^3 T) sinh(eta L/m))], i.e. kT ln[N lambda^3 / V]
    mu = kT * math.log(N * h**3 / (V * (2.0 * math.pi * m * kT) ** 1.5))
    return ThermoReport("classical", N, params.L, params.eta, T, V, P, mu, 1.5 * N * kT, 1.5 * N * kB, F, lnZ)


# --------------------------------------------------------------------------
# degenerate gas


def fermi_energy(params: GasParams) -> float:
    """``eps_F = (hbar^2 eta^2 / 8 m^3)(6 pi^2 N / g)^{2/3} / sinh^2(eta L/m)``.

    Evaluated as ``(hbar^2 / 2m)(6 pi^2 N / (g V))^{2/3}``, which is the same
    expression for a cube and also covers unequal sides.
    """
    c = params.consts
    V = geometric_volume(params)
    return c.hbar**2 / (2.0 * c.m0) * (6.0 * math.pi**2 * params.N / (params.gdeg * V)) ** (2.0 / 3.0)


def density_of_states_prefactor(params: GasParams) -> float:
    """``A`` in ``dN = A sqrt(E) dE``: ``8 m^{9/2} g sinh^3 / (sqrt(2) pi^2 hbar^3 eta^3)``."""
    c = params.consts
    return params.gdeg * geometric_volume(params) * c.m0**1.5 / (math.sqrt(2.0) * math.pi**2 * c.hbar**3)


def fermi_t0(params: GasParams) -> ThermoReport:
    """``T = 0``: ``U = (3/5) N eps_F`` and ``P = -dU/dV = (2/3) U / V``."""
    eF = fermi_energy(params)
    V = geometric_volume(params)
    U = 0.6 * params.N * eF
    return ThermoReport("degenerate-T0", params.N, params.L, params.eta, 0.0, V, 2.0 * U / (3.0 * V), eF, U, 0.0,
                        U, None, eF)


def brute_force_fermi_energy(params: GasParams) -> float:
    """Energy of the highest occupied orbital when ``N`` fermions fill the exact
    box levels ``E = sum_i c_i n_i^2`` (``g`` particles per orbital)."""
    c = params.consts
    m, eta = c.m0, params.eta
    coef = [c.hbar**2 * math.pi**2 / (8.0 * m * Li**2 * _sinhc(eta * Li / m) ** 2) for Li in params.lengths]
    norb = -(-params.N // params.gdeg)
    # best-first walk over (nx, ny, nz), each triple pushed once
    start = (1, 1, 1)
    heap = [(sum(coef), start)]
    seen = {start}
    E = 0.0
    for _ in range(norb):
        E, t = heapq.heappop(heap)
        for i in range(3):
            nt = tuple(t[j] + (j == i) for j in range(3))
            if nt not in seen:
                seen.add(nt)
                heapq.heappush(heap, (sum(ci * n * n for ci, n in zip(coef, nt)), nt))
    return E


def count_states_below(params: GasParams, energy: float) -> int:
    """Number of particle states (orbitals times ``g``) with exact box energy ``<= energy``."""
    c = params.consts
    m, eta = c.m0, params.eta
    coef = [c.hbar**2 * math.pi**2 / (8.0 * m * Li**2 * _sinhc(eta * Li / m) ** 2) for Li in params.lengths]
    total = 0
    nx = 1
    while coef[0] * nx * nx + coef[1] + coef[2] <= energy:
        ny = 1
        while coef[0] * nx * nx + coef[1] * ny * ny + coef[2] <= energy:
            rest = energy - coef[0] * nx * nx - coef[1] * ny * ny
            nz = math.isqrt(int(rest / coef[2]))
            # correct the integer square root for rounding at the boundary
            while coef[2] * (nz + 1) ** 2 <= rest:
                nz += 1
            while nz > 0 and coef[2] * nz * nz > rest:
                nz -= 1
            total += nz
            ny += 1
        nx += 1
    return total * params.gdeg


# --------------------------------------------------------------------------
# finite temperature


def particle_number(params: GasParams, mu: float) -> float:
    """``N = -(4 m^{9/2} g (kT)^{3/2} / (sqrt(2) pi^{3/2} hbar^3 eta^3)) prod sinh(eta L_i/m) Li_{3/2}(-e^{mu/kT})``."""
    c = params.consts
    m, eta, kT = c.m0, params.eta, params.kT
    li = li_neg_exp(1.5, mu / kT)
    if eta > 0:
        s3 = 1.0
        for Li in params.lengths:
            s3 *= math.sinh(eta * Li / m)
        pref = 4.0 * m**4.5 * params.gdeg * kT**1.5 * s3 / (math.sqrt(2.0) * math.pi**1.5 * c.hbar**3 * eta**3)
    else:
        pref = params.gdeg * geometric_volume(params) * (m * kT) ** 1.5 / (2.0 * math.sqrt(2.0) * math.pi**1.5 * c.hbar**3)
    return -pref * li


def finite_t(params: GasParams) -> ThermoReport:
    """Exact Fermi-Dirac thermodynamics through ``Li_s(-e^{mu/kT})``.

    With ``tau = kT / eps_F`` and ``y = mu / kT``::

        -Li_{3/2}(-e^y) = (4 / (3 sqrt(pi))) tau^{-3/2}
        U  = -(9 sqrt(pi) / 8) N kT tau^{3/2} Li_{5/2}(-e^y)
        Cv = -(9 sqrt(pi) / 8) N kB tau^{3/2} [(5/2) Li_{5/2} - (3/2) Li_{3/2}^2 / Li_{1/2}]

    ``Cv`` is the derivative at fixed ``N`` and ``V``, so it includes ``dmu/dT``.
    """
    if not params.T > 0:
        raise DomainError("finite_t needs T > 0")
    kB = params.consts.kB
    kT = params.kT
    N = params.N
    eF = fermi_energy(params)
    tau = kT / eF
    target = -4.0 / (3.0 * math.sqrt(math.pi)) * tau**-1.5
    try:
        y = inverse_polylog_32(target)
    except NumericError as exc:
        raise NumericError(f"chemical potential inversion failed at kT/eps_F={tau!r}: {exc}") from exc
    l52 = li_neg_exp(2.5, y)
    l32 = li_neg_exp(1.5, y)
    l12 = li_neg_exp(0.5, y)
    pref = 9.0 * math.sqrt(math.pi) / 8.0 * tau**1.5
    U = -pref * N * kT * l52
    Cv = -pref * N * kB * (2.5 * l52 - 1.5 * l32 * l32 / l12)
    V = geometric_volume(params)
    P = 2.0 * U / (3.0 * V)
    mu = kT * y
    F = N * mu - P * V
    return ThermoReport("finite-T-exact", N, params.L, params.eta, params.T, V, P, mu, U, Cv, F, None, eF)


def sommerfeld(params: GasParams) -> ThermoReport:
    """Low-temperature expansion to order ``tau^2``, ``tau = kT / eps_F``.

    ``mu = eps_F [1 - (pi^2/12) tau^2]``, ``U = (3/5) N eps_F [1 + (5 pi^2/12) tau^2]``,
    ``Cv = (pi^2/2) N kB tau``.  Warns when ``tau`` exceeds 0.2.
    """
    kB = params.consts.kB
    eF = fermi_energy(params)
    tau = params.kT / eF
    if tau > SOMMERFELD_MAX_TAU:
        warnings.warn(f"Sommerfeld expansion used at kT/eps_F = {tau:.3g} > {SOMMERFELD_MAX_TAU}", stacklevel=2)
    N = params.N
    mu = eF * (1.0 - math.pi**2 / 12.0 * tau**2)
    U = 0.6 * N * eF * (1.0 + 5.0 * math.pi**2 / 12.0 * tau**2)
    Cv = 0.5 * math.pi**2 * N * kB * tau
    V = geometric_volume(params)
    P = 2.0 * U / (3.0 * V)
    return ThermoReport("sommerfeld", N, params.L, params.eta, params.T, V, P, mu, U, Cv, N * mu - P * V, None, eF)
