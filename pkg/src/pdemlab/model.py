"""Shared data model: physical constants, mass profiles, potentials, grids.

All values are immutable.  Mass profiles describe the dimensionless factor
``M(q)`` in ``m(q) = m0 * M(q)``; because the exponential families are written
as ``exp(+-2 eta q / m0)`` every evaluation takes ``m0`` explicitly.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np

from .errors import DomainError

_EPS = np.finfo(float).eps


@dataclass(frozen=True)
class PhysicalConstants:
    """hbar, m0 and kB; natural units by default."""

    hbar: float = 1.0
    m0: float = 1.0
    kB: float = 1.0

    def __post_init__(self):
        for name in ("hbar", "m0", "kB"):
            if not getattr(self, name) > 0:
                raise DomainError(f"{name} must be > 0, got {getattr(self, name)!r}")

    @property
    def h(self):
        return 2.0 * math.pi * self.hbar


NATURAL = PhysicalConstants()


def _fd_step(q):
    return _EPS ** (1.0 / 3.0) * np.maximum(1.0, np.abs(q))


def central_difference(f, q):
    """Central difference with step ``eps**(1/3) * max(1, |q|)``."""
    q = np.asarray(q, dtype=float)
    h = _fd_step(q)
    return (f(q + h) - f(q - h)) / (2.0 * h)


# --------------------------------------------------------------------------
# mass profiles


class MassProfile:
    """Base class; subclasses implement ``M``, ``gradM`` and ``lapM``."""

    kind = "generic"

    def M(self, q, m0=1.0):
        raise NotImplementedError

    def gradM(self, q, m0=1.0):
        raise NotImplementedError

    def lapM(self, q, m0=1.0):
        raise NotImplementedError

    def to_record(self):
        raise NotImplementedError


def _check_eta(eta, name="eta"):
    if not (np.isfinite(eta) and eta >= 0):
        raise DomainError(f"{name} must be a finite non-negative number, got {eta!r}")


@dataclass(frozen=True)
class ExpIncreasing(MassProfile):
    """``M(q) = exp(+2 eta q / m0)``."""

    eta: float
    kind = "exp-inc"

    def __post_init__(self):
        _check_eta(self.eta)

    def M(self, q, m0=1.0):
        return np.exp(2.0 * self.eta * np.asarray(q, dtype=float) / m0)

    def gradM(self, q, m0=1.0):
        return (2.0 * self.eta / m0) * self.M(q, m0)

    def lapM(self, q, m0=1.0):
        return (2.0 * self.eta / m0) ** 2 * self.M(q, m0)

    def to_record(self):
        return {"kind": self.kind, "eta": self.eta}


@dataclass(frozen=True)
class ExpDecreasing(MassProfile):
    """``M(q) = exp(-2 eta q / m0)``.  Negative eta is rejected; use ExpIncreasing."""

    eta: float
    kind = "exp-dec"

    def __post_init__(self):
        _check_eta(self.eta)

    def M(self, q, m0=1.0):
        return np.exp(-2.0 * self.eta * np.asarray(q, dtype=float) / m0)

    def gradM(self, q, m0=1.0):
        return (-2.0 * self.eta / m0) * self.M(q, m0)

    def lapM(self, q, m0=1.0):
        return (2.0 * self.eta / m0) ** 2 * self.M(q, m0)

    def to_record(self):
        return {"kind": self.kind, "eta": self.eta}


@dataclass(frozen=True)
class PiecewiseExp(MassProfile):
    """``M(q) = exp(-2 eta_i q / m0)`` with ``eta1`` for q < a and ``eta2`` for q > a.

    At ``q == a`` the right-hand branch is used.  The profile is discontinuous
    at ``a`` unless ``eta1 == eta2`` or ``a == 0``.
    """

    eta1: float
    eta2: float
    a: float = 0.0
    kind = "piecewise-exp"

    def __post_init__(self):
        _check_eta(self.eta1, "eta1")
        _check_eta(self.eta2, "eta2")

    def _eta(self, q):
        return np.where(np.asarray(q, dtype=float) < self.a, self.eta1, self.eta2)

    def M(self, q, m0=1.0):
        q = np.asarray(q, dtype=float)
        return np.exp(-2.0 * self._eta(q) * q / m0)

    def gradM(self, q, m0=1.0):
        return (-2.0 * self._eta(q) / m0) * self.M(q, m0)

    def lapM(self, q, m0=1.0):
        return (2.0 * self._eta(q) / m0) ** 2 * self.M(q, m0)

    def to_record(self):
        return {"kind": self.kind, "eta1": self.eta1, "eta2": self.eta2, "a": self.a}


@dataclass(frozen=True)
class GenericMass(MassProfile):
    """User-supplied ``M(q)``.

    ``gradM`` (and ``lapM`` where the quantum transform needs it) must be
    given explicitly.  Passing ``numeric_derivatives=True`` opts into central
    differences with step ``eps**(1/3) * max(1, |q|)`` for whichever
    derivative is missing.  The callables receive ``q`` only; ``m0`` is
    assumed to be folded in by the caller.
    """

    func: Callable
    grad: Callable | None = None
    lap: Callable | None = None
    numeric_derivatives: bool = False
    kind = "generic"

    def M(self, q, m0=1.0):
        q = np.asarray(q, dtype=float)
        val = np.asarray(self.func(q), dtype=float)
        bad = ~(val > 0)
        if np.any(bad):
            where = np.atleast_1d(np.broadcast_to(q, val.shape))[np.atleast_1d(bad)][0]
            raise DomainError(f"mass function is not positive at q={float(where)!r}")
        return val

    def gradM(self, q, m0=1.0):
        if self.grad is not None:
            return np.asarray(self.grad(np.asarray(q, dtype=float)), dtype=float)
        if not self.numeric_derivatives:
            raise DomainError("GenericMass needs grad=... or numeric_derivatives=True")
        return central_difference(lambda x: self.M(x, m0), q)

    def lapM(self, q, m0=1.0):
        if self.lap is not None:
            return np.asarray(self.lap(np.asarray(q, dtype=float)), dtype=float)
        if not self.numeric_derivatives:
            raise DomainError("GenericMass needs lap=... or numeric_derivatives=True")
        return central_difference(lambda x: self.gradM(x, m0), q)

    def to_record(self):
        raise DomainError("generic mass profiles cannot be serialised")


class MassEval(NamedTuple):
    M: np.ndarray
    gradM: np.ndarray
    m: np.ndarray


def eval_mass(profile: MassProfile, consts: PhysicalConstants, q) -> MassEval:
    """Evaluate ``M``, ``dM/dq`` and the dimensional mass ``m0 * M`` at ``q``."""
    if not np.all(np.isfinite(q)):
        raise DomainError(f"q must be finite, got {q!r}")
    M = profile.M(q, consts.m0)
    if np.any(~(M > 0)):
        raise DomainError(f"mass is not positive at q={q!r}")
    return MassEval(M, profile.gradM(q, consts.m0), consts.m0 * M)


# --------------------------------------------------------------------------
# potentials


class Potential:
    kind = "generic"

    def V(self, q):
        raise NotImplementedError

    def gradV(self, q):
        raise NotImplementedError

    def lapV(self, q):
        return central_difference(self.gradV, q)

    def to_record(self):
        raise NotImplementedError


@dataclass(frozen=True)
class ZeroPotential(Potential):
    kind = "zero"

    def V(self, q):
        return np.zeros_like(np.asarray(q, dtype=float))

    def gradV(self, q):
        return np.zeros_like(np.asarray(q, dtype=float))

    def lapV(self, q):
        return np.zeros_like(np.asarray(q, dtype=float))

    def to_record(self):
        return {"kind": self.kind}


@dataclass(frozen=True)
class StepWall(Potential):
    """``U0 * theta(q - a)``; the gradient is a delta and is reported as zero."""

    U0: float
    a: float = 0.0
    kind = "step"

    def __post_init__(self):
        if not self.U0 > 0:
            raise DomainError(f"U0 must be > 0, got {self.U0!r}")

    def V(self, q):
        return np.where(np.asarray(q, dtype=float) >= self.a, self.U0, 0.0)

    def gradV(self, q):
        return np.zeros_like(np.asarray(q, dtype=float))

    def to_record(self):
        return {"kind": self.kind, "U0": self.U0, "a": self.a}


@dataclass(frozen=True)
class Morse(Potential):
    """``A (exp(-2 alpha q) - 2 exp(-alpha q))``, minimum ``-A`` at ``q = 0``."""

    A: float
    alpha: float
    kind = "morse"

    def __post_init__(self):
        if not (self.A > 0 and self.alpha > 0):
            raise DomainError(f"Morse needs A > 0 and alpha > 0, got A={self.A!r}, alpha={self.alpha!r}")

    def V(self, q):
        x = np.exp(-self.alpha * np.asarray(q, dtype=float))
        return self.A * (x * x - 2.0 * x)

    def gradV(self, q):
        x = np.exp(-self.alpha * np.asarray(q, dtype=float))
        return 2.0 * self.A * self.alpha * (x - x * x)

    def lapV(self, q):
        x = np.exp(-self.alpha * np.asarray(q, dtype=float))
        return 2.0 * self.A * self.alpha**2 * (2.0 * x * x - x)

    def to_record(self):
        return {"kind": self.kind, "A": self.A, "alpha": self.alpha}


@dataclass(frozen=True)
class InfiniteBox(Potential):
    """Zero on ``[-L, L]``, infinite outside."""

    L: float
    kind = "box"

    def __post_init__(self):
        if not self.L > 0:
            raise DomainError(f"L must be > 0, got {self.L!r}")

    def V(self, q):
        q = np.asarray(q, dtype=float)
        return np.where(np.abs(q) <= self.L, 0.0, np.inf)

    def gradV(self, q):
        return np.zeros_like(np.asarray(q, dtype=float))

    def lapV(self, q):
        return np.zeros_like(np.asarray(q, dtype=float))

    def to_record(self):
        return {"kind": self.kind, "L": self.L}


@dataclass(frozen=True)
class GenericPotential(Potential):
    func: Callable
    grad: Callable
    kind = "generic"

    def V(self, q):
        return np.asarray(self.func(np.asarray(q, dtype=float)), dtype=float)

    def gradV(self, q):
        return np.asarray(self.grad(np.asarray(q, dtype=float)), dtype=float)

    def to_record(self):
        raise DomainError("generic potentials cannot be serialised")


# --------------------------------------------------------------------------
# grid


@dataclass(frozen=True)
class Grid:
    """Uniform grid with both endpoints included."""

    qmin: float
    qmax: float
    npoints: int

    def __post_init__(self):
        if not (np.isfinite(self.qmin) and np.isfinite(self.qmax) and self.qmin < self.qmax):
            raise DomainError(f"need finite qmin < qmax, got [{self.qmin!r}, {self.qmax!r}]")
        if int(self.npoints) != self.npoints or self.npoints < 3:
            raise DomainError(f"npoints must be an integer >= 3, got {self.npoints!r}")

    @property
    def spacing(self):
        return (self.qmax - self.qmin) / (self.npoints - 1)

    @property
    def points(self):
        return np.linspace(self.qmin, self.qmax, int(self.npoints))

    def coarsen(self):
        """Grid with roughly half the points (exactly double spacing when npoints is odd)."""
        return Grid(self.qmin, self.qmax, (int(self.npoints) - 1) // 2 + 1)


# --------------------------------------------------------------------------
# tagged-record configuration

_MASS_KINDS = {
    "exp-inc": (ExpIncreasing, ("eta",)),
    "exp-dec": (ExpDecreasing, ("eta",)),
    "piecewise-exp": (PiecewiseExp, ("eta1", "eta2", "a")),
}
_POT_KINDS = {
    "zero": (ZeroPotential, ()),
    "step": (StepWall, ("U0", "a")),
    "morse": (Morse, ("A", "alpha")),
    "box": (InfiniteBox, ("L",)),
}


def _from_record(record, table, what):
    if not isinstance(record, dict) or "kind" not in record:
        raise DomainError(f"{what} record must be an object with a 'kind' key")
    kind = record["kind"]
    if kind not in table:
        raise DomainError(f"unknown {what} kind {kind!r}; expected one of {sorted(table)}")
    cls, fields = table[kind]
    extra = set(record) - set(fields) - {"kind"}
    if extra:
        raise DomainError(f"unknown keys for {what} kind {kind!r}: {sorted(extra)}")
    kwargs = {k: float(record[k]) for k in fields if k in record}
    return cls(**kwargs)


def mass_from_record(record: dict) -> MassProfile:
    """``{"kind": "exp-dec", "eta": 1.0}`` -> ``ExpDecreasing(1.0)``."""
    return _from_record(record, _MASS_KINDS, "mass")


def potential_from_record(record: dict) -> Potential:
    """``{"kind": "morse", "A": 1, "alpha": 1}`` -> ``Morse(1, 1)``."""
    return _from_record(record, _POT_KINDS, "potential")
