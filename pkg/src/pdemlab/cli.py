"""Command-line front end.

    pdemlab <group> <command> [flags] [--config FILE] [--format csv|json] [--output PATH] [--sweep KEY=V1,V2,...]

Every run writes exactly one table.  Numbers are in the units fixed by the
physical constants (natural units ``hbar = m0 = kB = 1`` unless overridden).
Exit status: 0 success, 2 bad argument, 3 numerical failure.
"""
from __future__ import annotations

import argparse
import itertools
import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from typing import Callable, NamedTuple

import numpy as np

from . import __version__
from .errors import DomainError, NumericError
from .model import (
    ExpDecreasing,
    Grid,
    InfiniteBox,
    PhysicalConstants,
    mass_from_record,
    potential_from_record,
)

UNITS_NOTE = ("Units: lengths, masses, energies and temperatures are in the system fixed by "
              "--hbar, --m0, --kB (default natural units hbar = m0 = kB = 1).")


class Param(NamedTuple):
    type: Callable
    check: Callable | None
    rule: str
    help: str


def _pos(x):
    return x > 0


def _nonneg(x):
    return x >= 0


def _finite(x):
    return math.isfinite(x)


def _flag(x):
    if isinstance(x, bool):
        return x
    s = str(x).strip().lower()
    if s in ("1", "true", "yes", "on"):
        return True
    if s in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {x!r}")


def _int(x):
    v = float(x)
    if v != int(v):
        raise ValueError(f"not an integer: {x!r}")
    return int(v)


PARAMS = {
    # model
    "mass": Param(str, lambda s: s in ("exp-inc", "exp-dec", "piecewise-exp"), "one of exp-inc, exp-dec, piecewise-exp",
                  "mass profile kind: exp-inc M=e^{2 eta q/m0}, exp-dec M=e^{-2 eta q/m0}, piecewise-exp"),
    "potential": Param(str, lambda s: s in ("zero", "step", "morse", "box"), "one of zero, step, morse, box",
                       "potential kind"),
    "eta": Param(float, _nonneg, ">= 0", "mass decay constant eta [mass/length]"),
    "eta1": Param(float, _nonneg, ">= 0", "eta for q < a [mass/length]"),
    "eta2": Param(float, _nonneg, ">= 0", "eta for q > a [mass/length]"),
    "a": Param(float, _finite, "finite", "step / mass-jump position [length]"),
    "A": Param(float, _pos, "> 0", "Morse depth A [energy]"),
    "alpha": Param(float, _pos, "> 0", "Morse inverse range alpha [1/length]"),
    "U0": Param(float, _pos, "> 0", "step height U0 [energy]"),
    "L": Param(float, _pos, "> 0", "box half-width, box is [-L, L] [length]"),
    # grids
    "qmin": Param(float, _finite, "finite", "left grid end [length]"),
    "qmax": Param(float, _finite, "finite", "right grid end [length]"),
    "npoints": Param(_int, lambda n: n >= 3, ">= 3", "number of grid points including both ends"),
    # classical
    "q0": Param(float, _finite, "finite", "initial / packet-centre position [length]"),
    "qdot0": Param(float, _finite, "finite", "initial velocity [length/time]"),
    "t1": Param(float, _pos, "> 0", "final time, integration runs over [0, t1] [time]"),
    "tol": Param(float, _pos, "> 0", "tolerance (integrator rtol=atol, or Hermite residual threshold) [dimensionless]"),
    "nsamples": Param(_int, lambda n: n >= 2, ">= 2", "number of output times"),
    "gtilde": Param(float, _pos, "> 0", "prefactor g~(alpha) of the inverse-map mass [dimensionless]"),
    "K": Param(float, _finite, "finite", "additive constant K(alpha) of U_eff [energy]"),
    "regularized": Param(_flag, None, "boolean", "multiply g~ by |(1 - eta/(m0 alpha))(1 - 2 eta/(m0 alpha))|"),
    # quantum
    "method": Param(str, lambda s: s in ("analytic", "numeric"), "analytic or numeric",
                    "analytic box levels or the finite-difference eigensolver"),
    "scheme": Param(str, None, "'geometric' or 'nu,mu,kappa'", "kinetic ordering for the numeric eigensolver"),
    "nmax": Param(_int, lambda n: n >= 1, ">= 1", "number of levels (box: n = 1..nmax; Morse: n = 0..nmax)"),
    "n": Param(_int, lambda n: n >= 0, ">= 0", "quantum number"),
    "E": Param(float, _pos, "> 0", "energy [energy]"),
    "dt": Param(float, _pos, "> 0", "time step [time]"),
    "nsteps": Param(_int, lambda n: n >= 0, ">= 0", "number of Crank-Nicolson steps"),
    "initial": Param(str, lambda s: s in ("eigen", "packet"), "eigen or packet",
                     "initial state: box eigenstate n or a Gaussian packet"),
    "sigma": Param(float, _pos, "> 0", "packet width [length]"),
    "k0": Param(float, _finite, "finite", "packet wavenumber [1/length]"),
    # thermo
    "N": Param(_int, lambda n: n >= 1, ">= 1", "particle number"),
    "T": Param(float, _nonneg, ">= 0", "temperature [temperature]"),
    "gdeg": Param(_int, lambda n: n >= 1, ">= 1", "spin degeneracy g"),
    # morse
    "case": Param(str, lambda s: s in ("increasing", "decreasing"), "increasing or decreasing",
                  "mass M = e^{+2 eta q/m0} (increasing) or e^{-2 eta q/m0} (decreasing), eta = m0 alpha"),
    "x0": Param(float, _pos, "> 0", "decreasing case: set alpha so that (2 m0^3 A/(hbar^2 eta^2))^{1/4} = x0 [dimensionless]"),
    # constants
    "hbar": Param(float, _pos, "> 0", "reduced Planck constant [action]"),
    "m0": Param(float, _pos, "> 0", "reference mass m0 [mass]"),
    "kB": Param(float, _pos, "> 0", "Boltzmann constant [energy/temperature]"),
}

_MASS_FIELDS = {"exp-inc": ("eta",), "exp-dec": ("eta",), "piecewise-exp": ("eta1", "eta2", "a")}
_POT_FIELDS = {"zero": (), "step": ("U0", "a"), "morse": ("A", "alpha"), "box": ("L",)}

COMMANDS = {
    "classical.simulate": dict(
        help="integrate the PDEM equation of motion; CSV t,q,qdot,C (C is the first integral [velocity^2])",
        params={"mass": "exp-inc", "eta": 0.3, "eta1": 0.0, "eta2": 0.0, "a": 0.0, "potential": "morse",
                "A": 1.0, "alpha": 1.0, "U0": 1.0, "L": 1.0, "q0": 0.5, "qdot0": 0.0, "t1": 10.0,
                "tol": 1e-10, "nsamples": 201},
        columns=("t", "q", "qdot", "C")),
    "classical.hamiltonianize": dict(
        help="inverse map of the Morse damping law phi = eta; CSV q,mass,Ueff ([mass], [energy])",
        params={"A": 1.0, "alpha": 1.0, "eta": 0.3, "gtilde": 1.0, "K": 0.0, "regularized": False,
                "qmin": -1.0, "qmax": 3.0, "npoints": 201},
        columns=("q", "mass", "Ueff")),
    "quantum.spectrum": dict(
        help="box levels for M = e^{-2 eta q/m0} on [-L, L], or the numeric eigensolver; CSV n,E [energy]",
        params={"method": "analytic", "eta": 1.0, "L": 1.0, "nmax": 5, "mass": None, "potential": None,
                "eta1": 0.0, "eta2": 0.0, "a": 0.0, "A": 1.0, "alpha": 1.0, "U0": 1.0,
                "qmin": None, "qmax": None, "npoints": 4000, "scheme": "geometric"},
        columns=("n", "E")),
    "quantum.density": dict(
        help="box eigenstate n: CSV q,rho,psi_re,psi_im with rho = |psi|^2 sqrt(M) [1/length]",
        params={"eta": 1.0, "L": 1.0, "n": 1, "npoints": 1001},
        columns=("q", "rho", "psi_re", "psi_im")),
    "quantum.scatter": dict(
        help="reflection from the step U0 theta(q - a) with masses e^{-2 eta_i q/m0}; CSV E,U0,R,T",
        params={"E": 2.0, "U0": 1.0, "a": 0.0, "eta1": 0.0, "eta2": 0.0},
        columns=("E", "U0", "R", "T")),
    "quantum.evolve": dict(
        help="Crank-Nicolson evolution in the box; CSV step,norm (curved-measure norm, dimensionless)",
        params={"eta": 1.0, "L": 1.0, "n": 1, "npoints": 1001, "dt": 1e-3, "nsteps": 100,
                "initial": "eigen", "q0": 0.0, "sigma": 0.1, "k0": 0.0},
        columns=("step", "norm")),
    "thermo.classical": dict(
        help="Maxwell-Boltzmann gas in [-L, L]^3",
        params={"N": 100, "L": 1.0, "eta": 1.0, "T": 1.0, "gdeg": 2}),
    "thermo.t0": dict(
        help="degenerate Fermi gas at T = 0 (T is ignored)",
        params={"N": 100, "L": 1.0, "eta": 1.0, "gdeg": 2}),
    "thermo.finite-t": dict(
        help="Fermi gas at T > 0 through the exact polylogarithms",
        params={"N": 100, "L": 1.0, "eta": 1.0, "T": 1.0, "gdeg": 2}),
    "thermo.sommerfeld": dict(
        help="Fermi gas, low-temperature expansion to order (kT/eps_F)^2",
        params={"N": 100, "L": 1.0, "eta": 1.0, "T": 1.0, "gdeg": 2}),
    "morse.spectrum": dict(
        help="exact Morse levels with exponential mass at eta = m0 alpha; CSV n,E,admissible,residual",
        params={"case": "increasing", "A": 1.0, "alpha": 1.0, "x0": None, "nmax": 10, "tol": 1e-6},
        columns=("n", "E", "admissible", "residual")),
    "morse.wavefunction": dict(
        help="exact Morse eigenfunction n; CSV q,psi,rho with rho = psi^2 sqrt(M) [1/length]",
        params={"case": "increasing", "A": 1.0, "alpha": 1.0, "x0": None, "n": 0,
                "qmin": -5.0, "qmax": 15.0, "npoints": 2001},
        columns=("q", "psi", "rho")),
}

THERMO_COLUMNS = ("N", "L", "eta", "T", "Veta", "P", "mu", "U", "Cv", "epsF", "regime")
for _name, _spec in COMMANDS.items():
    _spec.setdefault("columns", THERMO_COLUMNS)

_CONST_KEYS = ("hbar", "m0", "kB")


class ArgError(Exception):
    """Bad user input; ``flag`` names the offending option."""

    def __init__(self, flag, message):
        super().__init__(f"argument {flag}: {message}")
        self.flag = flag


# --------------------------------------------------------------------------
# parsing


def build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(prog="pdemlab", description=__doc__.split("\n")[0], epilog=UNITS_NOTE)
    top.add_argument("--version", action="version", version=f"pdemlab {__version__}")
    groups = top.add_subparsers(dest="group", metavar="GROUP", required=True)
    by_group = {}
    for name in COMMANDS:
        g, _ = name.split(".")
        if g not in by_group:
            by_group[g] = groups.add_parser(g, help=f"{g} computations").add_subparsers(
                dest="command", metavar="COMMAND", required=True)
    for name, spec in COMMANDS.items():
        g, c = name.split(".")
        p = by_group[g].add_parser(c, help=spec["help"], description=spec["help"] + ".", epilog=UNITS_NOTE)
        for key, default in spec["params"].items():
            info = PARAMS[key]
            shown = "" if default is None else f" (default {default})"
            p.add_argument(f"--{key}", dest=key, default=None, metavar=key.upper(),
                           help=f"{info.help}; {info.rule}{shown}")
        for key in _CONST_KEYS:
            p.add_argument(f"--{key}", dest=key, default=None, metavar=key.upper(),
                           help=f"{PARAMS[key].help} (default 1)")
        p.add_argument("--config", default=None, metavar="FILE",
                       help="JSON file with parameters, 'mass'/'potential' tagged records, 'constants' "
                            "and 'sweep'; flags override it")
        p.add_argument("--format", default=None, choices=("csv", "json"), help="output format (default csv)")
        p.add_argument("--output", default=None, metavar="PATH", help="output file (default stdout)")
        p.add_argument("--sweep", action="append", default=None, metavar="KEY=V1,V2,...",
                       help="run every combination of the listed values; rows keep the input order")
        p.add_argument("--workers", default=None, metavar="N",
                       help="worker processes for --sweep (default: up to the CPU count)")
        p.set_defaults(subcommand=name)
    return top


def _coerce(key, value, flag):
    info = PARAMS[key]
    if key == "L" and isinstance(value, (list, tuple)):
        if len(value) != 3:
            raise ArgError(flag, f"L must be a number or a list of three numbers, got {value!r}")
        return tuple(_coerce("L", v, flag) for v in value)
    try:
        v = info.type(value)
    except (TypeError, ValueError):
        raise ArgError(flag, f"invalid value {value!r}; expected {info.rule}") from None
    if isinstance(v, float) and not math.isfinite(v):
        raise ArgError(flag, f"must be finite, got {value!r}")
    if info.check is not None and not info.check(v):
        raise ArgError(flag, f"must be {info.rule}, got {value!r}")
    return v


def _load_config(path):
    try:
        with open(path, encoding="utf-8") as fh:
            cfg = json.load(fh)
    except OSError as exc:
        raise ArgError("--config", f"cannot read {path!r}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise ArgError("--config", f"invalid JSON in {path!r}: {exc}") from None
    if not isinstance(cfg, dict):
        raise ArgError("--config", "top level must be a JSON object")
    return cfg


def _parse_sweep(items, allowed):
    sweep = {}
    for item in items:
        key, sep, vals = item.partition("=")
        key = key.strip()
        if not sep or not vals:
            raise ArgError("--sweep", f"expected KEY=V1,V2,..., got {item!r}")
        if key not in allowed:
            raise ArgError("--sweep", f"unknown parameter {key!r} for this command")
        sweep[key] = [v.strip() for v in vals.split(",")]
    return sweep


def resolve(ns: argparse.Namespace):
    """Merge defaults, config file and flags into ``(subcommand, params, records, consts, sweep)``."""
    name = ns.subcommand
    spec = COMMANDS[name]
    allowed = spec["params"]
    cfg = _load_config(ns.config) if ns.config else {}

    explicit = {}
    records = {}
    consts = {}
    sweep = {}
    for key, val in cfg.items():
        if key in ("mass", "potential") and isinstance(val, dict):
            if key not in allowed:
                raise ArgError("--config", f"'{key}' record is not used by {name}")
            records[key] = dict(val)
        elif key == "constants":
            if not isinstance(val, dict) or set(val) - set(_CONST_KEYS):
                raise ArgError("--config", f"'constants' must be an object with keys among {list(_CONST_KEYS)}")
            consts.update({k: _coerce(k, v, "--config") for k, v in val.items()})
        elif key == "sweep":
            if not isinstance(val, dict):
                raise ArgError("--config", "'sweep' must be an object of lists")
            for k, vs in val.items():
                if k not in allowed or not isinstance(vs, list) or not vs:
                    raise ArgError("--config", f"bad sweep entry {k!r}")
                sweep[k] = vs
        elif key in allowed:
            explicit[key] = _coerce(key, val, "--config")
        elif key in _CONST_KEYS:
            consts[key] = _coerce(key, val, "--config")
        else:
            raise ArgError("--config", f"unknown key {key!r} for {name}")

    for key in allowed:
        val = getattr(ns, key, None)
        if val is not None:
            explicit[key] = _coerce(key, val, f"--{key}")
    for key in _CONST_KEYS:
        val = getattr(ns, key, None)
        if val is not None:
            consts[key] = _coerce(key, val, f"--{key}")
    if ns.sweep:
        sweep.update(_parse_sweep(ns.sweep, allowed))
    for key, vals in sweep.items():
        sweep[key] = [_coerce(key, v, "--sweep") for v in vals]

    params = {k: v for k, v in allowed.items()}
    params.update(explicit)
    return name, params, explicit, records, PhysicalConstants(**consts), sweep


def _record(kind_key, fields_table, params, explicit, records, flag):
    """Tagged record for the mass or potential: flags beat the config record, which beats defaults."""
    rec = dict(records.get(kind_key, {}))
    if kind_key in explicit or "kind" not in rec:
        kind = params[kind_key]
        if kind is None:
            return None
        if rec.get("kind") != kind:
            rec = {"kind": kind}
    kind = rec["kind"]
    if kind not in fields_table:
        raise ArgError(flag, f"unknown {kind_key} kind {kind!r}")
    for f in fields_table[kind]:
        if f in explicit or f not in rec:
            rec[f] = params[f]
    return rec


# --------------------------------------------------------------------------
# computations


def _grid(params, qmin_default, qmax_default):
    qmin = params["qmin"] if params["qmin"] is not None else qmin_default
    qmax = params["qmax"] if params["qmax"] is not None else qmax_default
    if not qmin < qmax:
        raise ArgError("--qmin/--qmax", f"need qmin < qmax, got [{qmin}, {qmax}]")
    return Grid(qmin, qmax, params["npoints"])


def _classical_simulate(p, mass, pot, c):
    from .classical import integrate_trajectory
    if not 1e-13 <= p["tol"] <= 1e-3:
        raise ArgError("--tol", f"must lie in [1e-13, 1e-3], got {p['tol']!r}")
    tr = integrate_trajectory(mass_from_record(mass), potential_from_record(pot), c, p["q0"], p["qdot0"],
                              (0.0, p["t1"]), p["tol"], nsamples=p["nsamples"])
    if tr.truncated:
        print(f"pdemlab: warning: trajectory truncated at t = {tr.times[-1] if len(tr.times) else 0.0!r}: "
              f"{tr.message}", file=sys.stderr)
    return list(zip(tr.times, tr.q, tr.qdot, tr.firstIntegral))


def _classical_hamiltonianize(p, mass, pot, c):
    from .classical import hamiltonianize, morse_damping_law
    law = morse_damping_law(p["A"], p["alpha"], p["eta"], c.m0, p["gtilde"], p["K"], p["regularized"])
    h = hamiltonianize(law, c, _grid(p, -1.0, 3.0))
    return list(zip(h.grid.points, h.mass, h.Ueff))


def _scheme(text):
    from .quantum import OrderingScheme
    if text == "geometric":
        return "geometric"
    try:
        nu, mu, ka = (float(x) for x in text.split(","))
    except ValueError:
        raise ArgError("--scheme", f"expected 'geometric' or 'nu,mu,kappa', got {text!r}") from None
    try:
        return OrderingScheme(nu, mu, ka)
    except DomainError as exc:
        raise ArgError("--scheme", str(exc)) from None


def _quantum_spectrum(p, mass, pot, c):
    from .quantum import box_spectrum, eigensolve_numeric
    if p["method"] == "analytic":
        res = box_spectrum(p["eta"], p["L"], p["nmax"], c)
    else:
        profile = mass_from_record(mass) if mass else ExpDecreasing(p["eta"])
        potential = potential_from_record(pot) if pot else InfiniteBox(p["L"])
        res = eigensolve_numeric(profile, potential, _grid(p, -p["L"], p["L"]), _scheme(p["scheme"]),
                                 p["nmax"], c)
    return [(e.n, e.E) for e in res.entries]


def _quantum_density(p, mass, pot, c):
    from .quantum import box_eigenfunction, probability_fields
    if p["n"] < 1:
        raise ArgError("--n", "box states start at n = 1")
    if p["npoints"] < 5:
        raise ArgError("--npoints", "need at least 5 points")
    grid = Grid(-p["L"], p["L"], p["npoints"])
    be = box_eigenfunction(p["n"], p["eta"], p["L"], c, grid)
    rho = probability_fields(be.psi, ExpDecreasing(p["eta"]), c).rho_tilde
    v = be.psi.values
    return list(zip(grid.points, rho, v.real, v.imag))


def _quantum_scatter(p, mass, pot, c):
    from .quantum import scatter_step
    r = scatter_step(p["E"], p["U0"], p["a"], p["eta1"], p["eta2"], c)
    return [(r.E, r.U0, r.R, r.T)]


def _quantum_evolve(p, mass, pot, c):
    from .quantum import box_eigenfunction, evolve, gaussian_packet
    grid = Grid(-p["L"], p["L"], p["npoints"])
    profile = ExpDecreasing(p["eta"])
    if p["initial"] == "eigen":
        if p["n"] < 1:
            raise ArgError("--n", "box states start at n = 1")
        psi0 = box_eigenfunction(p["n"], p["eta"], p["L"], c, grid).psi
    else:
        if not -p["L"] < p["q0"] < p["L"]:
            raise ArgError("--q0", f"packet centre must lie inside (-L, L), got {p['q0']!r}")
        psi0 = gaussian_packet(grid, p["q0"], p["sigma"], p["k0"], profile, c)
    ev = evolve(psi0, profile, InfiniteBox(p["L"]), p["dt"], p["nsteps"], c)
    return list(enumerate(ev.normHistory))


def _thermo(kind):
    def run(p, mass, pot, c):
        from . import fermigas
        T = 0.0 if kind == "t0" else p["T"]
        if kind != "t0" and not T > 0:
            raise ArgError("--T", f"must be > 0 for thermo {kind}, got {T!r}")
        gp = fermigas.GasParams(p["N"], p["L"], p["eta"], p["gdeg"], T, c)
        fn = {"classical": fermigas.classical_thermo, "t0": fermigas.fermi_t0,
              "finite-t": fermigas.finite_t, "sommerfeld": fermigas.sommerfeld}[kind]
        row = fn(gp).row()
        return [tuple(row[k] for k in THERMO_COLUMNS)]
    return run


def _morse_params(p, c):
    from .morse import MorseCaseParams
    if p["x0"] is not None:
        if p["case"] != "decreasing":
            raise ArgError("--x0", "only meaningful with --case decreasing")
        return MorseCaseParams.with_x0(p["A"], p["x0"], c)
    return MorseCaseParams(p["A"], p["alpha"], p["case"], c)


def _morse_spectrum(p, mass, pot, c):
    from . import morse
    mp = _morse_params(p, c)
    if mp.direction == "increasing":
        sp = morse.spectrum_increasing(mp, p["nmax"])
    else:
        if p["nmax"] > 200:
            raise ArgError("--nmax", "decreasing case supports nmax <= 200")
        sp = morse.spectrum_decreasing(mp, p["nmax"], p["tol"])
    return [(e.n, e.E, e.admissible, e.residual) for e in sp.entries]


def _morse_wavefunction(p, mass, pot, c):
    from . import morse
    mp = _morse_params(p, c)
    grid = _grid(p, -5.0, 15.0)
    if mp.direction == "increasing":
        ws = morse.eigenfunction_increasing(mp, p["n"], grid)
        sqrtM = np.exp(mp.eta * grid.points / c.m0)
    else:
        ws = morse.eigenfunction_decreasing(mp, p["n"], grid)
        sqrtM = np.exp(-mp.eta * grid.points / c.m0)
    psi = ws.values.real
    return list(zip(grid.points, psi, psi * psi * sqrtM))


RUNNERS = {
    "classical.simulate": _classical_simulate,
    "classical.hamiltonianize": _classical_hamiltonianize,
    "quantum.spectrum": _quantum_spectrum,
    "quantum.density": _quantum_density,
    "quantum.scatter": _quantum_scatter,
    "quantum.evolve": _quantum_evolve,
    "thermo.classical": _thermo("classical"),
    "thermo.t0": _thermo("t0"),
    "thermo.finite-t": _thermo("finite-t"),
    "thermo.sommerfeld": _thermo("sommerfeld"),
    "morse.spectrum": _morse_spectrum,
    "morse.wavefunction": _morse_wavefunction,
}


def compute(name, params, explicit, records, consts):
    """Rows for one parameter tuple.  Raises ArgError, DomainError or NumericError."""
    uses = COMMANDS[name]["params"]
    mass = _record("mass", _MASS_FIELDS, params, explicit, records, "--mass") if "mass" in uses else None
    pot = _record("potential", _POT_FIELDS, params, explicit, records, "--potential") if "potential" in uses else None
    return RUNNERS[name](params, mass, pot, consts)


def _job(args):
    name, params, explicit, records, consts = args
    try:
        return "ok", compute(name, params, explicit, records, consts)
    except ArgError as exc:
        return "arg", (exc.flag, str(exc))
    except DomainError as exc:
        return "domain", str(exc)
    except NumericError as exc:
        return "numeric", str(exc)


# --------------------------------------------------------------------------
# output


def _cell(v):
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, tuple):
        return ";".join(_cell(x) for x in v)
    return str(v)


def _jsonable(v):
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        return float(v)
    if isinstance(v, tuple):
        return [_jsonable(x) for x in v]
    return v


def render(fmt, columns, rows, meta):
    if fmt == "json":
        out = {"meta": meta, "rows": [{k: _jsonable(v) for k, v in zip(columns, r)} for r in rows]}
        return json.dumps(out, indent=1) + "\n"
    lines = [",".join(columns)]
    lines.extend(",".join(_cell(v) for v in r) for r in rows)
    return "\n".join(lines) + "\n"


# --------------------------------------------------------------------------
# entry point


def _err(msg, code):
    print(f"pdemlab: error: {msg}", file=sys.stderr)
    return code


def run(argv=None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    mode = os.environ.get("PDEMLAB_PRECISION", "strict").lower()
    if mode not in ("", "fast", "strict"):
        return _err(f"environment PDEMLAB_PRECISION must be 'fast' or 'strict', got {mode!r}", 2)
    try:
        name, params, explicit, records, consts, sweep = resolve(ns)
        workers = _coerce("nsteps", ns.workers, "--workers") if ns.workers is not None else None
    except ArgError as exc:
        return _err(str(exc), 2)

    columns = tuple(COMMANDS[name]["columns"])
    keys = list(sweep)
    extra = tuple(k for k in keys if k not in columns)
    jobs = []
    for combo in itertools.product(*(sweep[k] for k in keys)) if keys else [()]:
        p = dict(params)
        ex = dict(explicit)
        for k, v in zip(keys, combo):
            p[k] = v
            ex[k] = v
        jobs.append(((name, p, ex, records, consts), combo))

    if len(jobs) > 1 and (workers is None or workers > 1):
        n = min(len(jobs), workers or os.cpu_count() or 1)
        with ProcessPoolExecutor(max_workers=n) as pool:
            results = list(pool.map(_job, [j for j, _ in jobs]))
    else:
        results = [_job(j) for j, _ in jobs]

    rows = []
    for (_, combo), (status, payload) in zip(jobs, results):
        if status == "arg":
            return _err(payload[1], 2)
        if status == "domain":
            return _err(f"invalid parameters: {payload}", 2)
        if status == "numeric":
            return _err(f"numerical failure: {payload}", 3)
        lead = tuple(v for k, v in zip(keys, combo) if k in extra)
        rows.extend(lead + tuple(r) for r in payload)

    meta = {"command": name.replace(".", " "),
            "params": {k: _jsonable(v) for k, v in params.items() if v is not None},
            "constants": {k: getattr(consts, k) for k in _CONST_KEYS},
            "version": __version__}
    if records:
        meta["records"] = records
    if sweep:
        meta["sweep"] = {k: [_jsonable(v) for v in vs] for k, vs in sweep.items()}
    text = render(ns.format or "csv", extra + columns, rows, meta)
    if ns.output:
        try:
            with open(ns.output, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
        except OSError as exc:
            return _err(f"argument --output: cannot write {ns.output!r}: {exc.strerror}", 2)
    else:
        sys.stdout.write(text)
    return 0


def main(argv=None) -> int:
    return run(argv)


if __name__ == "__main__":
    sys.exit(main())
