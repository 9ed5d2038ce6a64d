"""INI run configuration.

Sections and keys are documented in ``docs/config.md``. Every key is
optional; missing keys take the defaults of the corresponding dataclass.
"""

from __future__ import annotations

import configparser
import importlib
from dataclasses import dataclass, field, fields, replace
from importlib import resources
from pathlib import Path

from .blend import BlendConfig
from .errors import DomainError
from .plant import SystemBundle, as_state, planar_example
from .search import GridSpec
from .simulate import ControllerSpec, SimOptions

__all__ = [
    "BUILTIN_SYSTEMS",
    "SweepSpec",
    "RunConfig",
    "ConfigError",
    "load_system",
    "load_config",
    "flagship_path",
    "parse_vector",
]

BUILTIN_SYSTEMS = {"planar_example": planar_example}


class ConfigError(DomainError):
    """Unreadable or malformed configuration."""


@dataclass(frozen=True)
class SweepSpec:
    x1_min: float = -3.0
    x1_max: float = 3.0
    x2_min: float = -3.0
    x2_max: float = 3.0
    n1: int = 101
    n2: int = 101
    # "grid" visits the n1 x n2 lattice; "random" draws `samples` uniform points with `seed`
    mode: str = "grid"
    samples: int = 0


@dataclass(frozen=True)
class RunConfig:
    system_name: str = "planar_example"
    system_params: tuple = ()
    controller: ControllerSpec = field(default_factory=ControllerSpec)
    x0: tuple = (1.0, -3.0)
    options: SimOptions = field(default_factory=SimOptions)
    engine: str = "auto"
    output: str = "trajectory.csv"
    seed: int = 0
    sweep: SweepSpec = field(default_factory=SweepSpec)
    sweep_output: str = "sweep.csv"
    search: GridSpec = field(default_factory=GridSpec)

    def bundle(self) -> SystemBundle:
        return load_system(self.system_name, dict(self.system_params))


def parse_vector(text: str) -> tuple:
    try:
        vals = tuple(float(v) for v in text.replace(";", ",").split(",") if v.strip())
        as_state(vals)
    except ValueError as exc:
        raise ConfigError(f"cannot parse vector {text!r}: {exc}") from exc
    return vals


def load_system(name: str, params: dict | None = None) -> SystemBundle:
    """Builtin system by name, or ``package.module:function`` returning a SystemBundle."""
    params = params or {}
    if name in BUILTIN_SYSTEMS:
        return BUILTIN_SYSTEMS[name](**params)
    if ":" not in name:
        raise ConfigError(f"unknown system {name!r}; builtins: {sorted(BUILTIN_SYSTEMS)}")
    mod_name, func_name = name.split(":", 1)
    try:
        factory = getattr(importlib.import_module(mod_name), func_name)
    except (ImportError, AttributeError) as exc:
        raise ConfigError(f"cannot load system {name!r}: {exc}") from exc
    bundle = factory(**params)
    if not isinstance(bundle, SystemBundle):
        raise ConfigError(f"{name} returned {type(bundle).__name__}, not SystemBundle")
    return bundle


def flagship_path() -> Path:
    return Path(str(resources.files("safestab") / "configs" / "flagship.ini"))


def _typed(cls, section: configparser.SectionProxy, renames: dict | None = None) -> dict:
    renames = renames or {}
    out = {}
    for f in fields(cls):
        key = renames.get(f.name, f.name)
        if key not in section:
            continue
        raw = section[key]
        try:
            if f.type in ("float", float):
                out[f.name] = float(raw)
            elif f.type in ("int", int):
                out[f.name] = int(raw)
            elif f.type in ("bool", bool):
                out[f.name] = section.getboolean(key)
            else:
                out[f.name] = raw.strip()
        except ValueError as exc:
            raise ConfigError(f"[{section.name}] {key} = {raw!r}: {exc}") from exc
    return out


def load_config(path) -> RunConfig:
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    try:
        with open(path, encoding="utf-8") as fh:
            parser.read_file(fh)
    except (OSError, configparser.Error) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    cfg = RunConfig()
    try:
        if parser.has_section("system"):
            sec = parser["system"]
            params = tuple((k, float(v)) for k, v in sec.items() if k != "name")
            cfg = replace(cfg, system_name=sec.get("name", cfg.system_name).strip(), system_params=params)
        if parser.has_section("controller"):
            sec = parser["controller"]
            blend = BlendConfig(
                formula=sec.get("formula", "sontag").strip(),
                lambda_kind=sec.get("lambda", "logistic").strip(),
                eta=sec.getfloat("eta", 0.5),
            )
            ctrl = ControllerSpec(sec.get("law", "kl_sharp").strip(), blend, sec.getfloat("c", 1e5))
            cfg = replace(cfg, controller=ctrl)
        if parser.has_section("simulation"):
            sec = parser["simulation"]
            opts = SimOptions(**_typed(SimOptions, sec))
            cfg = replace(cfg, options=opts, engine=sec.get("engine", cfg.engine).strip(),
                          output=sec.get("output", cfg.output).strip(), seed=sec.getint("seed", cfg.seed))
            if "x0" in sec:
                cfg = replace(cfg, x0=parse_vector(sec["x0"]))
        if parser.has_section("sweep"):
            sec = parser["sweep"]
            sweep = SweepSpec(**_typed(SweepSpec, sec))
            if sweep.mode not in ("grid", "random"):
                raise ConfigError(f"[sweep] mode must be grid or random, got {sweep.mode!r}")
            cfg = replace(cfg, sweep=sweep, sweep_output=sec.get("output", cfg.sweep_output).strip())
            if "seed" in sec:
                cfg = replace(cfg, seed=sec.getint("seed"))
        if parser.has_section("search"):
            cfg = replace(cfg, search=GridSpec(**_typed(GridSpec, parser["search"])))
    except ValueError as exc:
        # includes DomainError from the dataclass validators
        raise ConfigError(f"invalid config {path}: {exc}") from exc
    return cfg
