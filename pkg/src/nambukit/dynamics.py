"""Nambu vector fields, symbolic Liouville check and fixed-step RK4 integration."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence

import numpy as np

from .bracket import FROM_G, FROM_H, NambuSystem, nambu_bracket, noncanonical_bracket, poisson_matrices
from .expr import Polynomial, VariableSpace, symbol_sort_key

NAMBU = "nambu"
PATHS = (NAMBU, FROM_G, FROM_H)


class IntegrationError(RuntimeError):
    """The state became non-finite; ``step`` is the index of the failing step."""

    def __init__(self, step: int, message: str = "non-finite state"):
        self.step = step
        super().__init__(f"{message} at step {step}")


@dataclass(frozen=True)
class VectorField:
    space: VariableSpace
    components: tuple
    # (H, G) when the field was generated from a Nambu system
    hamiltonians: Optional[tuple] = None

    def __post_init__(self):
        if len(self.components) != 3 * self.space.n:
            raise ValueError("need one component per variable")
        self.space.check(*self.components)


@dataclass(frozen=True)
class IntegratorConfig:
    step_size: float
    steps: int
    method: str = "rk4"

    def __post_init__(self):
        if not (self.step_size > 0 and math.isfinite(self.step_size)):
            raise ValueError("step_size must be positive and finite")
        if self.steps < 0:
            raise ValueError("steps must be nonnegative")
        if self.method != "rk4":
            raise ValueError("only classical RK4 is supported")


@dataclass(frozen=True)
class Trajectory:
    space: VariableSpace
    times: np.ndarray
    states: np.ndarray
    diagnostics: dict = field(default_factory=dict)


def vector_field(sys: NambuSystem, path: str = NAMBU) -> VectorField:
    """Components {x_v, H, G}, built through the chosen representation.

    ``nambu`` uses the triple bracket directly, ``from_G`` the 2-bracket
    {x_v, H}_G and ``from_H`` the 2-bracket {x_v, G}_H.
    """
    space = sys.space
    xs = [Polynomial.symbol(v) for v in space.variables]
    if path == NAMBU:
        comps = [nambu_bracket(x, sys.H, sys.G, space) for x in xs]
    elif path == FROM_G:
        pms = poisson_matrices(sys, FROM_G)
        comps = [noncanonical_bracket(x, sys.H, pms) for x in xs]
    elif path == FROM_H:
        pms = poisson_matrices(sys, FROM_H)
        comps = [noncanonical_bracket(x, sys.G, pms) for x in xs]
    else:
        raise ValueError(f"unknown construction path {path!r}")
    return VectorField(space, tuple(comps), (sys.H, sys.G))


def divergence(vf: VectorField) -> Polynomial:
    out = Polynomial.zero()
    for v, comp in zip(vf.space.variables, vf.components):
        out = out + comp.diff(v)
    return out


# -- numeric compilation ------------------------------------------------------

def _term_source(mono, coef: float, index: dict) -> str:
    factors = [repr(coef)]
    for s, e in sorted(mono, key=lambda t: symbol_sort_key(t[0])):
        factors.extend([f"x[{index[s]}]"] * e)
    return "*".join(factors)


def _poly_source(p: Polynomial, index: dict, params: Mapping[str, float]) -> str:
    """Python expression for ``p`` with parameters folded into float coefficients."""
    coeffs: dict = {}
    for mono, c in p.terms.items():
        value = float(c)
        var_part = []
        for s, e in mono:
            if s in index:
                var_part.append((s, e))
            else:
                value *= float(params[s]) ** e
        key = tuple(var_part)
        coeffs[key] = coeffs.get(key, 0.0) + value
    terms = [_term_source(m, c, index) for m, c in sorted(coeffs.items()) if c != 0.0]
    return " + ".join(terms) if terms else "0.0"


def _check_params(polys, space: VariableSpace, params: Mapping[str, float]) -> None:
    needed = set()
    for p in polys:
        needed |= p.symbols() - set(space.variable_names)
    missing = needed - set(params)
    if missing:
        raise KeyError(f"no numeric value for parameter(s): {', '.join(sorted(missing))}")


def compile_polynomials(polys: Sequence[Polynomial], space: VariableSpace, params: Mapping[str, float]):
    """Compile polynomials into one function ``f(x) -> tuple`` of floats.

    ``x`` is indexed in the space's variable order.
    """
    _check_params(polys, space, params)
    index = {name: i for i, name in enumerate(space.variable_names)}
    body = ", ".join(_poly_source(p, index, params) for p in polys)
    src = f"def _f(x):\n    return ({body},)\n"
    ns: dict = {}
    exec(compile(src, "<nambukit-compiled>", "exec"), ns)
    return ns["_f"]


# -- integration --------------------------------------------------------------

def _rk4_step(f, y, h):
    k1 = f(y)
    k2 = f([a + 0.5 * h * b for a, b in zip(y, k1)])
    k3 = f([a + 0.5 * h * b for a, b in zip(y, k2)])
    k4 = f([a + h * b for a, b in zip(y, k3)])
    return [a + (h / 6.0) * (b + 2.0 * c + 2.0 * d + e) for a, b, c, d, e in zip(y, k1, k2, k3, k4)]


def fluctuation(space: VariableSpace, dof: int) -> Polynomial:
    """x3 - x1^2 for one DOF (the per-mode quantum fluctuation)."""
    x1 = Polynomial.symbol(space.var(1, dof))
    x3 = Polynomial.symbol(space.var(3, dof))
    return x3 - x1 * x1


def integrate(vf: VectorField, x0: Sequence[float], cfg: IntegratorConfig,
              params: Mapping[str, float]) -> Trajectory:
    space = vf.space
    if len(x0) != 3 * space.n:
        raise ValueError(f"initial state needs {3 * space.n} entries, got {len(x0)}")
    f = compile_polynomials(vf.components, space, params)

    diag_names = []
    diag_polys = []
    if vf.hamiltonians is not None:
        diag_names += ["H_drift", "G_drift"]
        diag_polys += list(vf.hamiltonians)
    for a in range(1, space.n + 1):
        diag_names.append(f"fluct_{a}")
        diag_polys.append(fluctuation(space, a))
    g = compile_polynomials(diag_polys, space, params)

    y = [float(v) for v in x0]
    if not all(math.isfinite(v) for v in y):
        raise IntegrationError(0, "non-finite initial state")
    h = float(cfg.step_size)
    states = [y]
    diags = [g(y)]
    for step in range(1, cfg.steps + 1):
        y = _rk4_step(f, y, h)
        if not all(math.isfinite(v) for v in y):
            raise IntegrationError(step)
        states.append(y)
        diags.append(g(y))

    times = np.arange(cfg.steps + 1, dtype=float) * h
    states_arr = np.array(states, dtype=float)
    raw = np.array(diags, dtype=float)
    channels = {}
    for j, name in enumerate(diag_names):
        col = raw[:, j]
        if name.endswith("_drift"):
            col = (col - col[0]) / max(1.0, abs(col[0]))
        channels[name] = col
    return Trajectory(space, times, states_arr, channels)


def conservation_drift(traj: Trajectory, quantity: Polynomial, params: Mapping[str, float]) -> float:
    """max_t |Q(x(t)) - Q(x(0))| / max(1, |Q(x(0))|)."""
    q = compile_polynomials([quantity], traj.space, params)
    values = np.array([q(row)[0] for row in traj.states.tolist()])
    return float(np.max(np.abs(values - values[0])) / max(1.0, abs(values[0])))


# -- CSV export ---------------------------------------------------------------

def trajectory_header(traj: Trajectory) -> list:
    return ["t", *traj.space.variable_names, *traj.diagnostics.keys()]


def write_trajectory_csv(traj: Trajectory, fh) -> None:
    """Write ``traj`` to an open text file; floats use 17 significant digits."""
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(trajectory_header(traj))
    cols = [traj.times[:, None], traj.states, *(c[:, None] for c in traj.diagnostics.values())]
    table = np.hstack(cols)
    for row in table.tolist():
        writer.writerow([f"{v:.17g}" for v in row])


def read_trajectory_csv(fh) -> tuple:
    """Inverse of :func:`write_trajectory_csv`: returns (header, float array)."""
    reader = csv.reader(fh)
    header = next(reader)
    rows = [[float(v) for v in row] for row in reader]
    return header, np.array(rows, dtype=float).reshape(len(rows), len(header))
