"""Line-oriented system configuration files.

Example::

    [system]
    n = 2
    H = x2_1^2/(2*m1) + lambda*x1_1*x3_2
    G = x3_1 - x1_1^2 + x3_2 - x1_2^2

    [parameters]
    m1 = 1
    lambda = 1/10

    [initial]
    x1_1 = 1
    ...

    [integrator]
    dt = 0.001
    steps = 100000

Parameter values, the ``[initial]`` section and the ``[integrator]`` section
are optional; a parameter line without a value declares a purely symbolic
parameter.
"""

from __future__ import annotations

import configparser
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .bracket import NambuSystem
from .expr import ParseError, VariableSpace, parse

RESERVED = ("H", "G")


class ConfigError(ValueError):
    pass


def _number(text: str, what: str) -> Fraction:
    try:
        value = Fraction(text.strip())
    except (ValueError, ZeroDivisionError):
        raise ConfigError(f"{what}: not a finite number: {text!r}") from None
    return value


@dataclass
class SystemConfig:
    n: int
    H: str
    G: str
    parameters: dict = field(default_factory=dict)
    initial: Optional[dict] = None
    dt: Optional[float] = None
    steps: Optional[int] = None

    @property
    def space(self) -> VariableSpace:
        try:
            return VariableSpace(self.n, self.parameters.keys())
        except ValueError as exc:
            raise ConfigError(str(exc)) from None

    def build_system(self) -> NambuSystem:
        space = self.space
        try:
            return NambuSystem(space, parse(self.H, space), parse(self.G, space))
        except ParseError as exc:
            raise ConfigError(f"bad Hamiltonian: {exc}") from None

    def numeric_parameters(self) -> dict:
        missing = [k for k, v in self.parameters.items() if v is None]
        if missing:
            raise ConfigError(f"no numeric value for parameter(s): {', '.join(missing)}")
        return {k: float(v) for k, v in self.parameters.items()}

    def initial_state(self) -> list:
        if self.initial is None:
            raise ConfigError("no [initial] section")
        names = self.space.variable_names
        missing = [v for v in names if v not in self.initial]
        if missing:
            raise ConfigError(f"initial state missing {', '.join(missing)}")
        return [float(self.initial[v]) for v in names]

    def to_text(self) -> str:
        lines = ["[system]", f"n = {self.n}", f"H = {self.H}", f"G = {self.G}", "", "[parameters]"]
        for k, v in self.parameters.items():
            lines.append(k if v is None else f"{k} = {v}")
        if self.initial is not None:
            lines += ["", "[initial]"]
            lines += [f"{k} = {v}" for k, v in self.initial.items()]
        if self.dt is not None or self.steps is not None:
            lines += ["", "[integrator]"]
            if self.dt is not None:
                lines.append(f"dt = {self.dt!r}")
            if self.steps is not None:
                lines.append(f"steps = {self.steps}")
        return "\n".join(lines) + "\n"


def loads(text: str) -> SystemConfig:
    cp = configparser.ConfigParser(allow_no_value=True, interpolation=None,
                                   comment_prefixes=("#", ";"), inline_comment_prefixes=("#",))
    cp.optionxform = str
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"malformed config: {exc}") from None
    unknown = set(cp.sections()) - {"system", "parameters", "initial", "integrator"}
    if unknown:
        raise ConfigError(f"unknown section(s): {', '.join(sorted(unknown))}")
    if not cp.has_section("system"):
        raise ConfigError("missing [system] section")
    sysec = cp["system"]
    for key in ("n", "H", "G"):
        if not sysec.get(key):
            raise ConfigError(f"[system] needs {key}")
    try:
        n = int(sysec["n"])
    except ValueError:
        raise ConfigError(f"n must be an integer, got {sysec['n']!r}") from None

    params = {}
    if cp.has_section("parameters"):
        for k, v in cp["parameters"].items():
            if k in RESERVED:
                raise ConfigError(f"parameter name {k!r} is reserved")
            params[k] = None if v is None or not v.strip() else _number(v, f"parameter {k}")

    initial = None
    if cp.has_section("initial"):
        initial = {k: _number(v or "", f"initial {k}") for k, v in cp["initial"].items()}

    dt = steps = None
    if cp.has_section("integrator"):
        sec = cp["integrator"]
        if sec.get("dt"):
            dt = float(_number(sec["dt"], "dt"))
        if sec.get("steps"):
            try:
                steps = int(sec["steps"])
            except ValueError:
                raise ConfigError("steps must be an integer") from None

    cfg = SystemConfig(n=n, H=sysec["H"], G=sysec["G"], parameters=params,
                       initial=initial, dt=dt, steps=steps)
    cfg.build_system()  # validate expressions against the declared space
    if initial is not None:
        extra = set(initial) - set(cfg.space.variable_names)
        if extra:
            raise ConfigError(f"[initial] has unknown variable(s): {', '.join(sorted(extra))}")
    if dt is not None and not (dt > 0 and math.isfinite(dt)):
        raise ConfigError("dt must be positive")
    return cfg


def load(path) -> SystemConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            return loads(fh.read())
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None


def model_config() -> SystemConfig:
    """The builtin two-mode model with its default numerics."""
    from .models import DEFAULT_INITIAL, DEFAULT_PARAMS, G_TEXT, H_TEXT, PARAMETERS

    names = VariableSpace(2).variable_names
    return SystemConfig(
        n=2, H=H_TEXT, G=G_TEXT,
        parameters={k: DEFAULT_PARAMS[k] for k in PARAMETERS},
        initial={k: Fraction(v) for k, v in zip(names, DEFAULT_INITIAL)},
        dt=1e-3, steps=100_000,
    )
