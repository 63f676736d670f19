"""Run configuration: JSON files plus ``key=value`` overrides, validated into dataclasses."""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path
from typing import Any

from .errors import ConfigError, ZenoLabError
from .model import ModelParams
from .qfi import QfiPolicy
from .sweep import ErasureSearchConfig


@dataclass(frozen=True)
class ExperimentConfig:
    """Command-specific ranges. Every command reads only the fields it needs."""

    r_min: float = 0.0
    r_max: float = 3.0
    r_step: float = 0.01
    ropt_bracket: tuple[float, float] = (1.0, 2.0)
    rcrit_bracket: tuple[float, float] = (1.9, 2.2)
    jump_threshold: float = 0.5
    asymptote_ratios: tuple[float, ...] = (20.0, 50.0, 100.0)
    tau: float = math.pi / 2
    n_list: tuple[int, ...] = (1, 2, 4, 8, 16, 32, 64, 128)
    quadrature_points: int = 2000
    grid_r: tuple[float, float] = (0.0, 3.0)
    grid_tau: tuple[float, float] = (0.0, 6.0)
    grid_shape: tuple[int, int] = (61, 121)

    def __post_init__(self):
        if not self.r_step > 0:
            raise ConfigError(f"r_step must be > 0, got {self.r_step}")
        if self.r_max < self.r_min or self.r_min < 0:
            raise ConfigError(f"r range must satisfy 0 <= r_min <= r_max, got [{self.r_min}, {self.r_max}]")
        if not self.tau > 0:
            raise ConfigError(f"tau must be > 0, got {self.tau}")
        if any(n < 1 for n in self.n_list):
            raise ConfigError(f"n_list entries must be >= 1, got {self.n_list}")
        if self.quadrature_points < 2:
            raise ConfigError(f"quadrature_points must be >= 2, got {self.quadrature_points}")
        if min(self.grid_shape) < 50:
            raise ConfigError(f"grid_shape must be at least 50x50, got {self.grid_shape}")


PAIR_FIELDS = {"ropt_bracket", "rcrit_bracket", "grid_r", "grid_tau", "grid_shape"}

SECTIONS = {
    "model": ModelParams,
    "qfi_policy": QfiPolicy,
    "search": ErasureSearchConfig,
    "experiment": ExperimentConfig,
}
TOP_LEVEL = ("output_dir", "sample_dt")


@dataclass(frozen=True)
class RunConfig:
    model: ModelParams = field(default_factory=ModelParams)
    qfi_policy: QfiPolicy = field(default_factory=QfiPolicy)
    search: ErasureSearchConfig = field(default_factory=ErasureSearchConfig)
    experiment: ExperimentConfig = field(default_factory=ExperimentConfig)
    output_dir: str = "out"
    sample_dt: float | None = None
    seedless: bool = field(default=True, init=False)  # nothing in the pipeline draws random numbers

    @property
    def resolved_sample_dt(self) -> float:
        return self.model.delta_t / 200 if self.sample_dt is None else self.sample_dt


def _coerce(name: str, default: Any, value: Any) -> Any:
    if isinstance(default, bool):
        if not isinstance(value, bool):
            raise ConfigError(f"{name} must be a boolean, got {value!r}")
        return value
    if isinstance(default, int):
        if isinstance(value, bool) or not isinstance(value, (int, float)) or int(value) != value:
            raise ConfigError(f"{name} must be an integer, got {value!r}")
        return int(value)
    if isinstance(default, float):
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"{name} must be a number, got {value!r}")
        return float(value)
    if isinstance(default, tuple):
        if not isinstance(value, (list, tuple)):
            raise ConfigError(f"{name} must be a list, got {value!r}")
        if name.split(".")[-1] in PAIR_FIELDS and len(value) != 2:
            raise ConfigError(f"{name} must have exactly 2 entries, got {value!r}")
        proto = default[0]
        return tuple(_coerce(f"{name}[{i}]", proto, v) for i, v in enumerate(value))
    if isinstance(default, str):
        if not isinstance(value, str):
            raise ConfigError(f"{name} must be a string, got {value!r}")
        return value
    raise ConfigError(f"cannot coerce {name}")


def _build_section(section: str, values: dict) -> Any:
    cls = SECTIONS[section]
    proto = cls()
    known = {f.name for f in fields(cls)}
    kwargs = {}
    for key, value in values.items():
        if key not in known:
            raise ConfigError(f"unknown config key {section}.{key!r}")
        kwargs[key] = _coerce(f"{section}.{key}", getattr(proto, key), value)
    try:
        return replace(proto, **kwargs)
    except ZenoLabError as exc:
        raise ConfigError(f"{section}: {exc.args[0]}") from None


def config_from_dict(data: dict) -> RunConfig:
    if not isinstance(data, dict):
        raise ConfigError("config must be a JSON object")
    sections = {}
    for key in data:
        if key not in SECTIONS and key not in TOP_LEVEL:
            raise ConfigError(f"unknown config key {key!r}")
    for name in SECTIONS:
        raw = data.get(name, {})
        if not isinstance(raw, dict):
            raise ConfigError(f"section {name!r} must be an object")
        sections[name] = _build_section(name, raw)
    output_dir = data.get("output_dir", "out")
    if not isinstance(output_dir, str):
        raise ConfigError(f"output_dir must be a string, got {output_dir!r}")
    sample_dt = data.get("sample_dt")
    if sample_dt is not None:
        sample_dt = _coerce("sample_dt", 1.0, sample_dt)
        if not sample_dt > 0:
            raise ConfigError(f"sample_dt must be > 0, got {sample_dt}")
    return RunConfig(output_dir=output_dir, sample_dt=sample_dt, **sections)


def config_to_dict(cfg: RunConfig) -> dict:
    """JSON-ready form; ``config_from_dict`` inverts it exactly."""
    out: dict[str, Any] = {name: asdict(getattr(cfg, name)) for name in SECTIONS}
    for sec in out.values():
        for k, v in sec.items():
            if isinstance(v, tuple):
                sec[k] = list(v)
    out["output_dir"] = cfg.output_dir
    out["sample_dt"] = cfg.sample_dt
    return out


def _locate(key: str) -> tuple[str | None, str]:
    if "." in key:
        section, name = key.split(".", 1)
        if section not in SECTIONS:
            raise ConfigError(f"unknown config section {section!r} in {key!r}")
        return section, name
    if key in TOP_LEVEL:
        return None, key
    owners = [s for s, cls in SECTIONS.items() if key in {f.name for f in fields(cls)}]
    if not owners:
        raise ConfigError(f"unknown config key {key!r}")
    if len(owners) > 1:
        raise ConfigError(f"ambiguous key {key!r}; qualify it as one of {[f'{o}.{key}' for o in owners]}")
    return owners[0], key


def _parse_value(text: str) -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def apply_overrides(data: dict, assignments: list[str]) -> dict:
    data = json.loads(json.dumps(data))
    for item in assignments:
        if "=" not in item:
            raise ConfigError(f"override {item!r} is not of the form key=value")
        key, text = item.split("=", 1)
        section, name = _locate(key.strip())
        value = _parse_value(text.strip())
        if section is None:
            data[name] = value
        else:
            data.setdefault(section, {})[name] = value
    return data


def parse_config(path: str | Path | None = None, overrides: list[str] | None = None, output_dir: str | None = None) -> RunConfig:
    data: dict = {}
    if path is not None:
        try:
            data = json.loads(Path(path).read_text())
        except FileNotFoundError:
            raise ConfigError(f"config file {str(path)!r} does not exist") from None
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config file {str(path)!r} is not valid JSON: {exc}") from None
    data = apply_overrides(data, overrides or [])
    if output_dir is not None:
        data["output_dir"] = output_dir
    return config_from_dict(data)
