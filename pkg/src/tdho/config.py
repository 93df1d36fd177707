"""Scenario configuration: sectioned ``key = value`` files plus ``--key value`` overrides.

Example::

    [profile]
    variant = smoothed      # smoothed | ideal | constant | tabulated
    omega1 = 1
    omega2 = 2

Every key name is unique across sections, so a command-line flag
``--omega2 3`` (or ``--profile.omega2 3``) addresses it directly.
"""

from __future__ import annotations

import configparser
import dataclasses
import re
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Optional

from .errors import ConfigurationError
from .profile import Constant, FrequencyProfile, IdealStep, SmoothedStep, Tabulated

VARIANTS = ("smoothed", "ideal", "constant", "tabulated")
ROUTES = ("direct", "pinney", "both")
FORMATS = ("text", "jsonl")


@dataclass(frozen=True)
class ProfileConfig:
    variant: str = "smoothed"
    omega1: float = 1.0
    omega2: float = 2.0
    epsilon: float = 20.0
    t_s: float = 2.0
    omega0: float = 1.0
    times: tuple = ()
    values: tuple = ()
    printed_omega_form: bool = False


@dataclass(frozen=True)
class SolverConfig:
    t0: float = 0.0
    t1: float = 10.0
    dt: float = 1e-4
    route: str = "direct"
    rho0: float = 1.0
    rho_dot0: float = 0.0


@dataclass(frozen=True)
class StateConfig:
    alpha_re: float = 1.0
    alpha_im: float = 0.0


@dataclass(frozen=True)
class OracleConfig:
    enabled: bool = False
    n: int = 2048
    x_min: float = -20.0
    x_max: float = 20.0
    dt_grid: float = 1e-4
    samples: int = 200


@dataclass(frozen=True)
class OutputConfig:
    path: str = "-"
    stride: int = 100
    format: str = "text"
    report: str = ""


@dataclass(frozen=True)
class SweepConfig:
    omega2_values: tuple = (1.5, 2.0, 2.5, 3.0)


@dataclass(frozen=True)
class ScenarioConfig:
    profile: ProfileConfig = field(default_factory=ProfileConfig)
    solver: SolverConfig = field(default_factory=SolverConfig)
    state: StateConfig = field(default_factory=StateConfig)
    oracle: OracleConfig = field(default_factory=OracleConfig)
    output: OutputConfig = field(default_factory=OutputConfig)
    sweep: SweepConfig = field(default_factory=SweepConfig)

    @property
    def alpha(self) -> complex:
        return complex(self.state.alpha_re, self.state.alpha_im)

    def replace(self, section: str, **changes) -> "ScenarioConfig":
        updated = dataclasses.replace(getattr(self, section), **changes)
        return dataclasses.replace(self, **{section: updated})


SECTIONS = {f.name: f.default_factory for f in fields(ScenarioConfig)}
KEYS = {
    f.name: (section, f)
    for section, cls in SECTIONS.items()
    for f in fields(cls)
}
ALIASES = {"sweep": "omega2_values"}


def _where(source, section, key):
    if source is None:
        return f"[{section}] {key}"
    path, text = source
    current = None
    for lineno, line in enumerate(text.splitlines(), 1):
        head = re.match(r"\s*\[([^\]]+)\]", line)
        if head:
            current = head.group(1).strip()
        elif current == section and re.match(rf"\s*{re.escape(key)}\s*[=:]", line):
            return f"{path}:{lineno}: [{section}] {key}"
    return f"{path}: [{section}] {key}"


def _coerce(f: dataclasses.Field, raw: str):
    kind = f.type
    raw = raw.strip()
    if kind == "bool":
        low = raw.lower()
        if low in ("1", "true", "yes", "on"):
            return True
        if low in ("0", "false", "no", "off"):
            return False
        raise ValueError(f"expected a boolean, got {raw!r}")
    if kind == "int":
        return int(raw)
    if kind == "float":
        return float(raw)
    if kind == "tuple":
        return tuple(float(v) for v in raw.replace(",", " ").split())
    return raw


def _format(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, tuple):
        return ", ".join(repr(float(v)) for v in value)
    return str(value)


def _build(values: dict, source=None) -> ScenarioConfig:
    """values: {(section, key): (raw string, where-source)}"""
    sections = {name: {} for name in SECTIONS}
    for (section, key), (raw, src) in values.items():
        _, f = KEYS[key]
        try:
            sections[section][key] = _coerce(f, raw)
        except ValueError as exc:
            raise ConfigurationError(f"{_where(src, section, key)}: {exc}") from None
    cfg = ScenarioConfig(**{name: SECTIONS[name](**kv) for name, kv in sections.items()})
    validate(cfg, lambda s, k: _where(values.get((s, k), (None, None))[1], s, k))
    return cfg


def validate(cfg: ScenarioConfig, where=lambda s, k: f"[{s}] {k}") -> None:
    def fail(section, key, msg):
        raise ConfigurationError(f"{where(section, key)}: {msg}")

    p = cfg.profile
    if p.variant not in VARIANTS:
        fail("profile", "variant", f"must be one of {', '.join(VARIANTS)}")
    for key in ("omega1", "omega2", "epsilon", "omega0"):
        if not getattr(p, key) > 0:
            fail("profile", key, "must be positive")
    if p.variant == "tabulated":
        if len(p.times) < 2 or len(p.times) != len(p.values):
            fail("profile", "times", "tabulated profile needs >= 2 times and as many values")
    s = cfg.solver
    if s.route not in ROUTES:
        fail("solver", "route", f"must be one of {', '.join(ROUTES)}")
    if not s.dt > 0:
        fail("solver", "dt", "must be positive")
    if not s.t1 > s.t0:
        fail("solver", "t1", "must exceed t0")
    if not s.rho0 > 0:
        fail("solver", "rho0", "must be positive")
    o = cfg.oracle
    if o.n < 4 or o.n & (o.n - 1):
        fail("oracle", "n", "must be a power of two")
    if not o.x_max > o.x_min:
        fail("oracle", "x_max", "must exceed x_min")
    if not o.dt_grid > 0:
        fail("oracle", "dt_grid", "must be positive")
    if o.samples < 1:
        fail("oracle", "samples", "must be at least 1")
    out = cfg.output
    if out.stride < 1:
        fail("output", "stride", "must be at least 1")
    if out.format not in FORMATS:
        fail("output", "format", f"must be one of {', '.join(FORMATS)}")
    if any(not w > 0 for w in cfg.sweep.omega2_values):
        fail("sweep", "omega2_values", "all values must be positive")


def parse_text(text: str, path: str = "<config>") -> dict:
    parser = configparser.ConfigParser(
        interpolation=None, inline_comment_prefixes=("#",), comment_prefixes=("#",)
    )
    parser.optionxform = str
    try:
        parser.read_string(text, source=path)
    except configparser.Error as exc:
        raise ConfigurationError(f"{path}: {exc}") from None
    src = (path, text)
    values = {}
    for section in parser.sections():
        if section not in SECTIONS:
            raise ConfigurationError(f"{path}: unknown section [{section}]")
        for key, raw in parser.items(section):
            if key not in KEYS or KEYS[key][0] != section:
                raise ConfigurationError(f"{_where(src, section, key)}: unknown key")
            values[(section, key)] = (raw, src)
    return values


def parse_overrides(tokens) -> dict:
    """``--key value`` / ``--key=value`` / bare ``--flag`` (booleans) -> raw values."""
    values = {}
    it = list(tokens)
    i = 0
    while i < len(it):
        tok = it[i]
        if not tok.startswith("--"):
            raise ConfigurationError(f"unexpected argument {tok!r}")
        name, eq, raw = tok[2:].partition("=")
        name = name.replace("-", "_")
        section = None
        if "." in name:
            section, name = name.split(".", 1)
        name = ALIASES.get(name, name)
        if name not in KEYS or (section and KEYS[name][0] != section):
            raise ConfigurationError(f"unknown option --{tok[2:].partition('=')[0]}")
        sec, f = KEYS[name]
        if not eq:
            nxt = it[i + 1] if i + 1 < len(it) else None
            if f.type == "bool" and (nxt is None or nxt.startswith("--")):
                raw = "true"
            elif nxt is None:
                raise ConfigurationError(f"option --{name} needs a value")
            else:
                raw = nxt
                i += 1
        values[(sec, name)] = (raw, None)
        i += 1
    return values


def load(path: Optional[str] = None, overrides=()) -> ScenarioConfig:
    values = {}
    if path is not None:
        p = Path(path)
        try:
            text = p.read_text()
        except OSError as exc:
            raise ConfigurationError(f"cannot read config {path}: {exc.strerror}") from None
        values.update(parse_text(text, str(p)))
    values.update(parse_overrides(overrides))
    return _build(values)


def loads(text: str, overrides=()) -> ScenarioConfig:
    values = parse_text(text)
    values.update(parse_overrides(overrides))
    return _build(values)


def dumps(cfg: ScenarioConfig) -> str:
    lines = []
    for section in SECTIONS:
        lines.append(f"[{section}]")
        for f in fields(SECTIONS[section]):
            lines.append(f"{f.name} = {_format(getattr(getattr(cfg, section), f.name))}")
        lines.append("")
    return "\n".join(lines)


def build_profile(cfg: ScenarioConfig, omega2: Optional[float] = None) -> FrequencyProfile:
    p = cfg.profile
    w2 = p.omega2 if omega2 is None else omega2
    if p.variant == "smoothed":
        return SmoothedStep(p.omega1, w2, p.epsilon, p.t_s, printed_form=p.printed_omega_form)
    if p.variant == "ideal":
        return IdealStep(p.omega1, w2, p.t_s)
    if p.variant == "constant":
        return Constant(p.omega0)
    return Tabulated(p.times, p.values)
