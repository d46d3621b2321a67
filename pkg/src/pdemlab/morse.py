"""Morse potential with exponentially increasing or decreasing mass.

Both cases use the resonance condition ``eta / m0 = alpha``.  With
``M = e^{+2 eta q/m0}`` the problem reduces to Kummer's equation and has an
infinite ladder of bound states; with ``M = e^{-2 eta q/m0}`` it maps onto a
harmonic oscillator on the half line ``theta = 1 - e^{-eta q/m0} <= 1``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .model import NATURAL, Grid, PhysicalConstants
from .quantum import Level, WaveSolution
from .specfun import hermite, hermite_scaled, kummer_poly

_LN2 = math.log(2.0)


@dataclass(frozen=True)
class MorseCaseParams:
    A: float
    alpha: float
    direction: str = "increasing"
    consts: PhysicalConstants = NATURAL

    def __post_init__(self):
        if not (self.A > 0 and self.alpha > 0):
            raise DomainError(f"need A > 0 and alpha > 0, got A={self.A!r}, alpha={self.alpha!r}")
        if self.direction not in ("increasing", "decreasing"):
            raise DomainError(f"direction must be 'increasing' or 'decreasing', got {self.direction!r}")

    @classmethod
    def with_x0(cls, A: float, x0: float, consts: PhysicalConstants = NATURAL):
        """Decreasing case with ``alpha`` chosen so that ``(2 m0^3 A / hbar^2 eta^2)^{1/4} = x0``."""
        if not x0 > 0:
            raise DomainError(f"x0 must be > 0, got {x0!r}")
        eta = math.sqrt(2.0 * consts.m0**3 * A) / (consts.hbar * x0 * x0)
        return cls(A, eta / consts.m0, "decreasing", consts)

    @property
    def eta(self):
        return self.consts.m0 * self.alpha

    @property
    def s(self):
        return math.sqrt(2.0 * self.consts.m0**3 * self.A) / (self.consts.hbar * self.eta)

    @property
    def kappa(self):
        return 0.5 * math.sqrt(1.0 + 4.0 * self.s**2)

    @property
    def omega(self):
        return math.sqrt(2.0 * self.A * self.eta**2 / self.consts.m0**3)

    @property
    def Mbig(self):
        """Mass of the mapped oscillator, ``m0^3 / eta^2``."""
        return self.consts.m0**3 / self.eta**2

    @property
    def x0(self):
        """``(2 m0^3 A / (hbar^2 eta^2))^{1/4}``, the oscillator coordinate of ``q = +inf``."""
        return math.sqrt(self.s)

    def Ecal(self, E):
        return E + self.A


@dataclass(frozen=True)
class MorseSpectrum:
    entries: list
    direction: str
    nmin: int | None = None

    @property
    def energies(self):
        return np.array([e.E for e in self.entries])

    def admissible(self):
        return [e for e in self.entries if e.admissible]


def _require(p, direction):
    if p.direction != direction:
        raise DomainError(f"this operation needs the {direction} case, got {p.direction}")


# --------------------------------------------------------------------------
# increasing mass


def level_increasing(p: MorseCaseParams, n: int) -> float:
    """``E_n = -(2 m0^3 A^2 / hbar^2 eta^2) / [(n + 1/2) + kappa]^2``."""
    c = p.consts
    tau = n + 0.5 + p.kappa
    return -(2.0 * c.m0**3 * p.A**2 / (c.hbar**2 * p.eta**2)) / tau**2


def spectrum_increasing(p: MorseCaseParams, nmax: int) -> MorseSpectrum:
    """Levels ``n = 0..nmax`` flagged admissible when ``-E_n < A``.

    ``nmin`` is the smallest admissible ``n`` (``n = 0`` is included; callers who
    read "positive integer" as ``n >= 1`` can drop it).
    """
    _require(p, "increasing")
    if not (int(nmax) == nmax and nmax >= 0):
        raise DomainError(f"nmax must be a non-negative integer, got {nmax!r}")
    entries = []
    nmin = None
    for n in range(int(nmax) + 1):
        E = level_increasing(p, n)
        ok = -E < p.A
        if ok and nmin is None:
            nmin = n
        entries.append(Level(n, E, ok))
    return MorseSpectrum(entries, "increasing", nmin)


def eigenfunction_increasing(p: MorseCaseParams, n: int, grid: Grid) -> WaveSolution:
    """``e^{-xi/2} xi^{kappa + 1/2} F(-n, 2 kappa + 1, xi)``, ``xi = (2 sqrt(-2 m0^3 E)/(hbar eta)) e^{eta q/m0}``.

    Evaluated in log space and normalised with the trapezoid rule under ``sqrt(M) dq``.
    """
    _require(p, "increasing")
    if not (int(n) == n and n >= 0):
        raise DomainError(f"n must be a non-negative integer, got {n!r}")
    E = level_increasing(p, n)
    if not -E < p.A:
        raise DomainError(f"level n={n} is not admissible (-E = {-E!r} >= A = {p.A!r})")
    c = p.consts
    q = grid.points
    lnxi0 = math.log(2.0 * math.sqrt(-2.0 * c.m0**3 * E) / (c.hbar * p.eta))
    lnxi = lnxi0 + p.eta * q / c.m0
    xi = np.exp(lnxi)
    F = np.asarray(kummer_poly(int(n), 2.0 * p.kappa + 1.0, xi), dtype=float)
    with np.errstate(divide="ignore"):
        logabs = -0.5 * xi + (p.kappa + 0.5) * lnxi + np.log(np.abs(F))
    vals = np.sign(F) * np.exp(logabs - np.max(logabs))
    return _normalise(grid, vals, np.exp(p.eta * q / c.m0), E, {"n": int(n), "case": "increasing"})


def _normalise(grid, vals, sqrtM, E, meta):
    h = grid.spacing
    w = vals * vals * sqrtM
    norm = h * (np.sum(w) - 0.5 * (w[0] + w[-1]))
    return WaveSolution(grid, (vals / math.sqrt(norm)).astype(complex), float(E), "curved", meta)


# --------------------------------------------------------------------------
# decreasing mass


def _log_hermite_function(n, x):
    """``(log |H_n(x) e^{-x^2/2}|, sign)`` without overflow."""
    mant, expo = hermite_scaled(n, x)
    with np.errstate(divide="ignore"):
        logabs = np.log(np.abs(mant)) + expo * _LN2 - 0.5 * np.asarray(x, dtype=float) ** 2
    return logabs, np.sign(mant)


def hermite_residual(n: int, x0: float) -> float:
    """``|H_n(x0)| e^{-x0^2/2} / max |H_n(x)| e^{-x^2/2}`` over ``x in [0, max(x0, sqrt(2n+1))]``.

    The window reaches the classical turning point ``sqrt(2n+1)`` so that the
    denominator is the natural size of the oscillator state even when ``x0``
    is tiny.
    """
    xmax = max(x0, math.sqrt(2.0 * n + 1.0))
    xs = np.linspace(0.0, xmax, 2001)
    lg, _ = _log_hermite_function(n, xs)
    l0, _ = _log_hermite_function(n, np.array([x0]))
    return float(math.exp(l0[0] - np.max(lg))) if np.isfinite(l0[0]) else 0.0


def level_decreasing(p: MorseCaseParams, n: int) -> float:
    """``E_n = hbar omega (n + 1/2) - A``."""
    return p.consts.hbar * p.omega * (n + 0.5) - p.A


def spectrum_decreasing(p: MorseCaseParams, nmax: int, tol: float = 1e-6) -> MorseSpectrum:
    """Oscillator levels ``n = 0..nmax`` with the Hermite boundary residual.

    ``admissible = residual < tol and -E_n < A``.
    """
    _require(p, "decreasing")
    if not (int(nmax) == nmax and 0 <= nmax <= 200):
        raise DomainError(f"nmax must be an integer in [0, 200], got {nmax!r}")
    if not tol > 0:
        raise DomainError(f"tol must be > 0, got {tol!r}")
    x0 = p.x0
    entries = []
    for n in range(int(nmax) + 1):
        E = level_decreasing(p, n)
        res = hermite_residual(n, x0)
        entries.append(Level(n, E, bool(res < tol and -E < p.A), res))
    return MorseSpectrum(entries, "decreasing", None)


def eigenfunction_decreasing(p: MorseCaseParams, n: int, grid: Grid) -> WaveSolution:
    """``exp(-x^2/2) H_n(x)`` with ``x = (1 - e^{-eta q/m0}) x0``, curved-measure normalised.

    ``meta["residual"]`` carries the Hermite boundary residual: the state only
    vanishes at ``q -> +inf`` when it is small.
    """
    _require(p, "decreasing")
    if not (int(n) == n and 0 <= n <= 200):
        raise DomainError(f"n must be an integer in [0, 200], got {n!r}")
    c = p.consts
    q = grid.points
    x = -np.expm1(-p.eta * q / c.m0) * p.x0
    lg, sg = _log_hermite_function(int(n), x)
    vals = sg * np.exp(lg - np.max(lg))
    meta = {"n": int(n), "case": "decreasing", "residual": hermite_residual(int(n), p.x0)}
    return _normalise(grid, vals, np.exp(-p.eta * q / c.m0), level_decreasing(p, n), meta)


def decreasing_derivatives(p: MorseCaseParams, n: int, q):
    """Unnormalised ``psi, psi', psi''`` of the decreasing-case state from
    ``f' = e^{-x^2/2}(2n H_{n-1} - x H_n)`` and ``f'' = (x^2 - 2n - 1) f``."""
    c = p.consts
    q = np.asarray(q, dtype=float)
    cq = p.eta / c.m0
    x = -np.expm1(-cq * q) * p.x0
    dx = p.x0 * cq * np.exp(-cq * q)
    g = np.exp(-0.5 * x * x)
    Hn = hermite(n, x)
    Hm = hermite(n - 1, x) if n > 0 else np.zeros_like(x)
    f = g * Hn
    f1 = g * (2.0 * n * Hm - x * Hn)
    f2 = (x * x - 2.0 * n - 1.0) * f
    return f, f1 * dx, f2 * dx * dx - cq * f1 * dx


def residual_decreasing(p: MorseCaseParams, n: int, q):
    """Relative residual of ``psi'' + (eta/m0) psi' + [(2 m0 E/hbar^2) e^{-2cq} - (2 m0 A/hbar^2)(e^{-4cq} - 2 e^{-3cq})] psi``."""
    c = p.consts
    q = np.asarray(q, dtype=float)
    cq = p.eta / c.m0
    E = level_decreasing(p, n)
    f, f1, f2 = decreasing_derivatives(p, n, q)
    pot = (2.0 * c.m0 * E / c.hbar**2) * np.exp(-2 * cq * q) \
        - (2.0 * c.m0 * p.A / c.hbar**2) * (np.exp(-4 * cq * q) - 2.0 * np.exp(-3 * cq * q))
    res = f2 + cq * f1 + pot * f
    scale = np.abs(f2) + np.abs(cq * f1) + np.abs(pot * f)
    return np.abs(res) / np.where(scale > 0, scale, 1.0)
