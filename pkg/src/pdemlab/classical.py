"""Classical side of the PDEM / damping equivalence.

Forward direction: a particle with mass ``m0 M(q)`` in a potential ``V``
moves like a constant-mass particle subject to the velocity-squared force
``-(m0 / 2M) M' qdot**2`` and the effective potential ``int V'/M``.

Inverse direction: the damping law ``m0 qddot = -phi(q) qdot**2 - U'(q)``
admits the first integral ``I = m0 g C / 2 + K`` and the Hamiltonian with
mass ``m0 g exp(2 Phi / m0)``, ``Phi = int phi``.

All indefinite integrals start at ``q_ref = 0``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, NamedTuple

import numpy as np
from scipy.integrate import solve_ivp

from ._numerics import cumulative_quad
from .errors import DomainError, NumericError, SingularityError
from .model import (
    NATURAL,
    GenericMass,
    GenericPotential,
    Grid,
    MassProfile,
    Morse,
    PhysicalConstants,
    Potential,
    eval_mass,
)

Q_REF = 0.0
DRIFT_FLOOR = 1e-300
REGIME_RTOL = 1e-12
SINGULAR_RTOL = 1e-6
# the state is considered escaped once |q| or |qdot| passes this
_ESCAPE = 1e150


def _scalar_or_array(x, like):
    return float(x) if np.ndim(like) == 0 else np.asarray(x, dtype=float)


def _value(f, alpha):
    return float(f(alpha)) if callable(f) else float(f)


# --------------------------------------------------------------------------
# forward map


def damping_force(profile: MassProfile, consts: PhysicalConstants, q, qdot):
    """``-(m0 / 2M) dM/dq qdot**2``.

    The force opposes the motion (damping) when ``qdot * dM/dq > 0`` and
    pushes along it (antidamping) when ``qdot * dM/dq < 0``.
    """
    M, gradM, _ = eval_mass(profile, consts, q)
    F = -consts.m0 / (2.0 * M) * gradM * np.asarray(qdot, dtype=float) ** 2
    return _scalar_or_array(F, np.broadcast(q, qdot))


@dataclass(frozen=True)
class EffectivePotentialTable:
    """Effective potential and mass sampled on a grid.

    ``Umin`` is the closed-form minimum (Morse family only) and ``g`` the
    factor ``g(alpha)`` that was applied.
    """

    grid: Grid
    Ueff: np.ndarray
    massOut: np.ndarray
    regime: str = "generic"
    Umin: float | None = None
    g: float = 1.0

    def __post_init__(self):
        if not (np.all(np.isfinite(self.Ueff)) and np.all(np.isfinite(self.massOut))):
            raise NumericError(f"non-finite entries in the {self.regime} effective potential table")


def forward_effective_potential(profile: MassProfile, potential: Potential, V0: float, grid: Grid,
                                consts: PhysicalConstants = NATURAL) -> EffectivePotentialTable:
    """``V_eff(q) = V0 + V(0)/M(0) + int_0^q V'/M dq`` on the grid.

    The constant ``V(0)/M(0)`` makes ``V_eff = V + V0`` when ``M == 1`` and
    equals the integrated-by-parts form ``V/M + int V M'/M**2``.
    """
    m0 = consts.m0
    qs = grid.points

    def integrand(x):
        return float(potential.gradV(x)) / float(profile.M(x, m0))

    offset = float(potential.V(Q_REF)) / float(profile.M(Q_REF, m0))
    U = V0 + offset + cumulative_quad(integrand, qs, Q_REF)
    mass = eval_mass(profile, consts, qs).m
    return EffectivePotentialTable(grid, U, mass, "generic")


def eom_rhs(profile: MassProfile, potential: Potential, consts: PhysicalConstants, q, qdot):
    """Acceleration ``(F_d - V'/M) / m0`` of the equivalent constant-mass particle."""
    M, gradM, _ = eval_mass(profile, consts, q)
    qdot = np.asarray(qdot, dtype=float)
    acc = -gradM / (2.0 * M) * qdot**2 - potential.gradV(q) / (consts.m0 * M)
    return _scalar_or_array(acc, np.broadcast(q, qdot))


def hamilton_rhs(profile: MassProfile, potential: Potential, consts: PhysicalConstants, q, p):
    """``(dq/dt, dp/dt)`` for ``H = p**2 / (2 m0 M) + V``."""
    M, gradM, m = eval_mass(profile, consts, q)
    qd = p / m
    pd = p * p * gradM / (2.0 * consts.m0 * M * M) - potential.gradV(q)
    return qd, pd


def pdem_first_integral(profile: MassProfile, potential: Potential, consts: PhysicalConstants, q, qdot):
    """Conserved ``C = [M qdot**2 + (2/m0)(V - V(0))] / M(0)`` of the forward equation.

    This is the damping-law ``C`` with ``phi = m0 M'/(2M)``, written in closed form.
    """
    m0 = consts.m0
    M = profile.M(q, m0)
    M_ref = float(profile.M(Q_REF, m0))
    V_ref = float(potential.V(Q_REF))
    C = (M * np.asarray(qdot, dtype=float) ** 2 + (2.0 / m0) * (potential.V(q) - V_ref)) / M_ref
    return _scalar_or_array(C, np.broadcast(q, qdot))


# --------------------------------------------------------------------------
# inverse map


@dataclass(frozen=True)
class DampingLaw:
    """``m0 qddot = -phi(q) qdot**2 - dU/dq(q; alpha)``.

    ``gtilde`` and ``K`` may be numbers or callables of ``alpha``.  When
    ``phi_integral`` is given it must return ``int_0^q phi``; otherwise that
    integral is done by quadrature.  ``regularizer(alpha)`` multiplies
    ``gtilde`` to form ``g(alpha)``.  ``U`` is optional because only its
    gradient enters the dynamics.
    """

    phi: Callable
    U: Callable | None
    gradU: Callable
    alpha: float = 0.0
    gtilde: Callable | float = 1.0
    K: Callable | float = 0.0
    V0: float = 0.0
    phi_integral: Callable | None = None
    regularizer: Callable | None = None

    def g(self) -> float:
        gt = _value(self.gtilde, self.alpha)
        if not gt > 0:
            raise DomainError(f"gtilde(alpha) must be > 0, got {gt!r}")
        if self.regularizer is not None:
            gt *= float(self.regularizer(self.alpha))
        return gt

    def Kval(self) -> float:
        return _value(self.K, self.alpha)

    def Phi(self, q):
        if self.phi_integral is not None:
            return np.asarray(self.phi_integral(q), dtype=float)
        return cumulative_quad(lambda x: float(self.phi(x)), q, Q_REF)

    def weight(self, q, m0):
        """``exp(2 Phi(q) / m0)``."""
        return np.exp(2.0 * self.Phi(q) / m0)

    def accel(self, q, qdot, m0):
        return (-float(self.phi(q)) * qdot * qdot - float(self.gradU(q, self.alpha))) / m0


def _weighted_force_integral(law: DampingLaw, m0, q):
    """``int_0^q exp(2 Phi / m0) U' dq`` for each entry of ``q``."""

    def integrand(x):
        return float(law.weight(x, m0)) * float(law.gradU(x, law.alpha))

    return cumulative_quad(integrand, q, Q_REF)


class FirstIntegral(NamedTuple):
    C: np.ndarray
    I: np.ndarray


def first_integral(law: DampingLaw, consts: PhysicalConstants, q, qdot) -> FirstIntegral:
    """``C = qdot**2 e^{2 Phi/m0} + (2/m0) int e^{2 Phi/m0} U'`` and ``I = m0 g C / 2 + K``."""
    m0 = consts.m0
    qa = np.asarray(q, dtype=float)
    C = np.asarray(qdot, dtype=float) ** 2 * law.weight(qa, m0) + (2.0 / m0) * _weighted_force_integral(law, m0, qa)
    I = 0.5 * m0 * law.g() * C + law.Kval()
    if np.ndim(q) == 0 and np.ndim(qdot) == 0:
        return FirstIntegral(float(C), float(I))
    return FirstIntegral(C, I)


@dataclass(frozen=True)
class Hamiltonianized:
    """Result of the inverse map.

    ``profile`` and ``potential`` describe the same system as a PDEM problem
    (``M = g e^{2 Phi/m0}``, ``V = U_eff``) so that it can be fed back to
    :func:`eom_rhs` or :func:`integrate_hamilton`.
    """

    grid: Grid
    mass: np.ndarray
    Ueff: np.ndarray
    table: EffectivePotentialTable
    profile: GenericMass
    potential: GenericPotential
    law: DampingLaw
    m0: float

    def p_of_qdot(self, q, qdot):
        """Canonical momentum ``m0 g e^{2 Phi/m0} qdot``."""
        return self.m0 * self.law.g() * self.law.weight(np.asarray(q, dtype=float), self.m0) * qdot

    def H(self, q, p):
        """Hamiltonian ``p**2 / (2 mass) + U_eff``."""
        M = self.profile.M(q)
        return p * p / (2.0 * self.m0 * M) + self.potential.V(q)


def hamiltonianize(law: DampingLaw, consts: PhysicalConstants, grid: Grid) -> Hamiltonianized:
    """Mass ``m0 g e^{2 Phi/m0}`` and ``U_eff = g int e^{2 Phi/m0} U' + K`` on the grid."""
    m0 = consts.m0
    g = law.g()
    K = law.Kval()
    qs = grid.points

    def M(q):
        return g * law.weight(np.asarray(q, dtype=float), m0)

    def gradM(q):
        q = np.asarray(q, dtype=float)
        return (2.0 / m0) * np.vectorize(lambda x: float(law.phi(x)))(q) * M(q)

    def Ueff(q):
        return g * _weighted_force_integral(law, m0, np.asarray(q, dtype=float)) + K

    def gradUeff(q):
        q = np.asarray(q, dtype=float)
        return g * law.weight(q, m0) * np.vectorize(lambda x: float(law.gradU(x, law.alpha)))(q)

    U = Ueff(qs)
    mass = m0 * M(qs)
    table = EffectivePotentialTable(grid, U, mass, "generic", g=g)
    return Hamiltonianized(grid, mass, U, table, GenericMass(M, gradM), GenericPotential(Ueff, gradUeff),
                           law, m0)


def law_from_profile(profile: MassProfile, potential: Potential, consts: PhysicalConstants = NATURAL,
                     V0: float = 0.0) -> DampingLaw:
    """The damping law equivalent to a PDEM system.

    ``phi = m0 M'/(2M)`` and ``U' = V'/M``; ``g = M(0)`` so that the inverse
    map returns the original mass ``m0 M``.
    """
    m0 = consts.m0
    M_ref = float(profile.M(Q_REF, m0))

    def phi(q):
        return m0 * profile.gradM(q, m0) / (2.0 * profile.M(q, m0))

    def phi_integral(q):
        return 0.5 * m0 * np.log(profile.M(q, m0) / M_ref)

    def gradU(q, alpha):
        return potential.gradV(q) / profile.M(q, m0)

    return DampingLaw(phi, None, gradU, 0.0, M_ref, 0.0, V0, phi_integral)


# --------------------------------------------------------------------------
# Morse family with constant phi = eta


def morse_regularizer(eta: float, m0: float = 1.0):
    """``alpha -> |(1 - eta/(m0 alpha)) (1 - 2 eta/(m0 alpha))|``."""

    def factor(alpha):
        r = eta / (m0 * alpha)
        return abs((1.0 - r) * (1.0 - 2.0 * r))

    return factor


def morse_damping_law(A: float, alpha: float, eta: float, m0: float = 1.0, gtilde=1.0, K=0.0,
                      regularized: bool = False) -> DampingLaw:
    """``phi = eta`` with the Morse potential ``U = A (e^{-2 alpha q} - 2 e^{-alpha q})``."""
    if not eta >= 0:
        raise DomainError(f"eta must be >= 0, got {eta!r}")
    pot = Morse(A, alpha)
    return DampingLaw(
        phi=lambda q: eta + 0.0 * np.asarray(q, dtype=float),
        U=lambda q, a: Morse(A, a).V(q),
        gradU=lambda q, a: Morse(A, a).gradV(q),
        alpha=pot.alpha,
        gtilde=gtilde,
        K=K,
        phi_integral=lambda q: eta * np.asarray(q, dtype=float),
        regularizer=morse_regularizer(eta, m0) if regularized else None,
    )


def _morse_regime(alpha, eta, m0):
    crit1, crit2 = eta / m0, 2.0 * eta / m0
    if crit1 > 0 and abs(alpha - crit1) <= REGIME_RTOL * crit1:
        return "alpha-eq-eta-over-m"
    if crit2 > 0 and abs(alpha - crit2) <= REGIME_RTOL * crit2:
        return "alpha-eq-2eta-over-m"
    return "generic"


def morse_effective_potential(A: float, alpha: float, eta: float, m0: float = 1.0, gtilde=1.0, K=0.0,
                              grid: Grid | None = None, regularized: bool = False) -> EffectivePotentialTable:
    """Closed-form effective potential of the Morse damping law.

    Generic ``alpha``::

        U = g A [e^{2(eta/m0 - alpha) q} / (1 - r) - 2 e^{(2 eta/m0 - alpha) q} / (1 - 2r)] + K

    with ``r = eta / (m0 alpha)``; ``alpha = eta/m0`` gives
    ``2 g A [e^{alpha q} - alpha q] + K`` and ``alpha = 2 eta/m0`` gives
    ``2 g A [e^{-alpha q} + alpha q] + K``.  These are antiderivatives, so they
    differ from the ``q_ref = 0`` quadrature of :func:`hamiltonianize` by a
    constant.  The minimum sits at ``q = 0``.

    With ``regularized=True``, ``g = gtilde |(1 - r)(1 - 2r)|`` cancels both
    poles and the table stays finite for every ``alpha``.  Without it, ``alpha``
    within a relative 1e-6 (but not 1e-12) of a critical value raises
    :class:`SingularityError`.
    """
    if not (A > 0 and alpha > 0 and eta >= 0):
        raise DomainError(f"need A > 0, alpha > 0, eta >= 0; got A={A!r}, alpha={alpha!r}, eta={eta!r}")
    if grid is None:
        grid = Grid(-2.0, 2.0, 201)
    q = grid.points
    gt = _value(gtilde, alpha)
    if not gt > 0:
        raise DomainError(f"gtilde(alpha) must be > 0, got {gt!r}")
    Kv = _value(K, alpha)
    r = eta / (m0 * alpha)
    e1 = np.exp(2.0 * (eta / m0 - alpha) * q)
    e2 = np.exp((2.0 * eta / m0 - alpha) * q)

    if regularized:
        g = gt * abs((1.0 - r) * (1.0 - 2.0 * r))
        c1 = math.copysign(1.0, 1.0 - r) * abs(1.0 - 2.0 * r) if r != 1.0 else 0.0
        c2 = math.copysign(1.0, 1.0 - 2.0 * r) * abs(1.0 - r) if r != 0.5 else 0.0
        U = gt * A * (c1 * e1 - 2.0 * c2 * e2) + Kv
        Umin = gt * A * (c1 - 2.0 * c2) + Kv
        regime = "regularized"
    else:
        g = gt
        regime = _morse_regime(alpha, eta, m0)
        if regime == "alpha-eq-eta-over-m":
            U = 2.0 * g * A * (np.exp(alpha * q) - alpha * q) + Kv
            Umin = 2.0 * g * A + Kv
        elif regime == "alpha-eq-2eta-over-m":
            U = 2.0 * g * A * (np.exp(-alpha * q) + alpha * q) + Kv
            Umin = 2.0 * g * A + Kv
        else:
            for crit in (eta / m0, 2.0 * eta / m0):
                if crit > 0 and abs(alpha - crit) <= SINGULAR_RTOL * crit:
                    raise SingularityError(
                        f"alpha={alpha!r} is within 1e-6 (relative) of the critical value {crit!r}; "
                        "use regularized=True",
                        critical=crit,
                    )
            U = g * A * (e1 / (1.0 - r) - 2.0 * e2 / (1.0 - 2.0 * r)) + Kv
            Umin = g * A * (1.0 / (1.0 - r) - 2.0 / (1.0 - 2.0 * r)) + Kv
    mass = m0 * g * np.exp(2.0 * eta * q / m0)
    return EffectivePotentialTable(grid, U, mass, regime, float(Umin), float(g))


# --------------------------------------------------------------------------
# trajectories


@dataclass(frozen=True)
class Trajectory:
    times: np.ndarray
    q: np.ndarray
    qdot: np.ndarray
    firstIntegral: np.ndarray
    maxDrift: float
    truncated: bool = False
    message: str = ""
    p: np.ndarray | None = field(default=None, repr=False)


def _check_tol(tol):
    if not (1e-13 <= tol <= 1e-3):
        raise DomainError(f"tol must lie in [1e-13, 1e-3], got {tol!r}")


def _escape_event(t, y):
    return _ESCAPE - np.max(np.abs(y))


_escape_event.terminal = True


def _sample_times(tspan, t_eval, nsamples):
    t0, t1 = float(tspan[0]), float(tspan[1])
    if not t1 > t0:
        raise DomainError(f"tspan must be increasing, got {tspan!r}")
    if t_eval is None:
        return np.linspace(t0, t1, nsamples)
    t_eval = np.asarray(t_eval, dtype=float)
    if np.any(np.diff(t_eval) <= 0) or t_eval[0] < t0 or t_eval[-1] > t1:
        raise DomainError("t_eval must be strictly increasing inside tspan")
    return t_eval


def _solve(rhs, y0, tspan, tol, ts, method):
    with np.errstate(over="ignore", invalid="ignore"):
        sol = solve_ivp(rhs, (float(tspan[0]), float(tspan[1])), y0, method=method, rtol=tol, atol=tol,
                        dense_output=True, events=_escape_event)
    reached = sol.t[-1]
    truncated = sol.status != 0 or reached < float(tspan[1])
    keep = ts[ts <= reached]
    ys = sol.sol(keep) if len(keep) else np.empty((len(y0), 0))
    good = np.all(np.isfinite(ys), axis=0)
    if not np.all(good):
        truncated = True
        stop = int(np.argmin(good))
        keep, ys = keep[:stop], ys[:, :stop]
    return keep, ys, truncated, sol.message


def _drift(C):
    if len(C) == 0:
        return 0.0
    return float(np.max(np.abs(C - C[0])) / max(abs(C[0]), DRIFT_FLOOR))


def integrate_trajectory(system, potential: Potential | None, consts: PhysicalConstants, q0: float, qdot0: float,
                         tspan=(0.0, 1.0), tol: float = 1e-10, t_eval=None, nsamples: int = 201,
                         method: str = "RK45") -> Trajectory:
    """Integrate the forward equation (``system`` a MassProfile) or a DampingLaw.

    Uses an embedded Runge-Kutta 4(5) pair with ``rtol = atol = tol`` and
    samples the dense output at ``t_eval`` (default: ``nsamples`` uniform
    times).  A run that blows up (antidamped escape, step-size underflow) is
    returned up to the last good sample with ``truncated=True``.
    """
    _check_tol(tol)
    ts = _sample_times(tspan, t_eval, nsamples)
    m0 = consts.m0
    if isinstance(system, DampingLaw):
        law = system

        def rhs(t, y):
            return [y[1], law.accel(y[0], y[1], m0)]

        def invariant(q, qd):
            return first_integral(law, consts, q, qd).C
    elif isinstance(system, MassProfile):
        if potential is None:
            raise DomainError("a potential is required for a mass-profile trajectory")

        def rhs(t, y):
            return [y[1], float(eom_rhs(system, potential, consts, y[0], y[1]))]

        def invariant(q, qd):
            return pdem_first_integral(system, potential, consts, q, qd)
    else:
        raise DomainError(f"system must be a MassProfile or DampingLaw, got {type(system).__name__}")

    times, ys, truncated, message = _solve(rhs, [float(q0), float(qdot0)], tspan, tol, ts, method)
    q, qd = ys[0], ys[1]
    C = np.asarray(invariant(q, qd), dtype=float) if len(q) else np.empty(0)
    return Trajectory(times, q, qd, C, _drift(C), truncated, message)


def integrate_hamilton(profile: MassProfile, potential: Potential, consts: PhysicalConstants, q0: float,
                       qdot0: float, tspan=(0.0, 1.0), tol: float = 1e-10, t_eval=None, nsamples: int = 201,
                       method: str = "RK45") -> Trajectory:
    """Integrate Hamilton's equations of ``H = p**2/(2 m0 M) + V`` (the PDEM form).

    The initial momentum is ``m0 M(q0) qdot0``.  ``firstIntegral`` holds the
    Hamiltonian itself.
    """
    _check_tol(tol)
    ts = _sample_times(tspan, t_eval, nsamples)
    m0 = consts.m0
    p0 = m0 * float(profile.M(q0, m0)) * float(qdot0)

    def rhs(t, y):
        qd, pd = hamilton_rhs(profile, potential, consts, y[0], y[1])
        return [float(qd), float(pd)]

    times, ys, truncated, message = _solve(rhs, [float(q0), p0], tspan, tol, ts, method)
    q, p = ys[0], ys[1]
    M = profile.M(q, m0) if len(q) else np.empty(0)
    qd = p / (m0 * M)
    H = p * p / (2.0 * m0 * M) + potential.V(q) if len(q) else np.empty(0)
    return Trajectory(times, q, qd, np.asarray(H, dtype=float), _drift(H), truncated, message, p)
