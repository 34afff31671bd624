"""Flat ``section.key = value`` run configuration.

Example::

    run.seed = 7
    traffic.bundle_size_bits = 500
    train.learning_rate = 1e-7

Lines starting with ``#`` are comments. Every key has a default.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from pathlib import Path

from ..agent.a2c import TrainConfig
from ..env import EnvConfig, VisibilityConfig
from ..orbits import ConstellationSpec
from ..traffic import TrafficConfig


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class RunSettings:
    seed: int = 0
    output_dir: str = "runs/default"
    checkpoint_interval: int = 5
    evaluation_episodes: int = 100
    selection_window: int = 20

    def __post_init__(self):
        if self.checkpoint_interval < 1:
            raise ValueError("checkpoint_interval must be >= 1")
        if self.evaluation_episodes < 1:
            raise ValueError("evaluation_episodes must be >= 1")


# config-file key -> dataclass field, where they differ
_ALIASES = {("traffic", "bundle_size_bits"): "bundle_size"}


@dataclass(frozen=True)
class RunConfig:
    run: RunSettings = field(default_factory=RunSettings)
    constellation: ConstellationSpec = field(default_factory=ConstellationSpec)
    visibility: VisibilityConfig = field(default_factory=VisibilityConfig)
    traffic: TrafficConfig = field(default_factory=TrafficConfig)
    env: EnvConfig = field(default_factory=EnvConfig)
    train: TrainConfig = field(default_factory=TrainConfig)

    @property
    def seed(self) -> int:
        return self.run.seed

    @property
    def output_dir(self) -> Path:
        return Path(self.run.output_dir)

    def replace(self, **sections) -> "RunConfig":
        """Override individual keys: ``cfg.replace(train={"episodes": 10})``."""
        changes = {}
        for name, values in sections.items():
            changes[name] = dataclasses.replace(getattr(self, name), **values)
        return dataclasses.replace(self, **changes)

    def with_seed(self, seed: int) -> "RunConfig":
        return self.replace(run={"seed": int(seed)})

    def to_text(self) -> str:
        lines = ["# dtnrl effective configuration"]
        for section in _SECTIONS:
            obj = getattr(self, section)
            for f in dataclasses.fields(obj):
                key = f.name
                for (sec, alias), target in _ALIASES.items():
                    if sec == section and target == f.name:
                        key = alias
                lines.append(f"{section}.{key} = {_format(getattr(obj, f.name))}")
        return "\n".join(lines) + "\n"


_SECTIONS = ("run", "constellation", "visibility", "traffic", "env", "train")


def _format(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, tuple):
        return ", ".join(_format(v) for v in value)
    return str(value)


def _coerce(raw: str, default):
    raw = raw.strip()
    if isinstance(default, bool):
        if raw.lower() not in ("true", "false"):
            raise ConfigError(f"expected true/false, got {raw!r}")
        return raw.lower() == "true"
    if isinstance(default, int):
        return int(raw)
    if isinstance(default, float):
        return float(raw)
    if isinstance(default, tuple):
        items = [s for s in raw.split(",") if s.strip()]
        kind = type(default[0]) if default else float
        return tuple(kind(s.strip()) for s in items)
    return raw


def parse_config(text: str) -> RunConfig:
    overrides: dict[str, dict] = {s: {} for s in _SECTIONS}
    defaults = RunConfig()
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'section.key = value'")
        key, raw = (s.strip() for s in line.split("=", 1))
        if "." not in key:
            raise ConfigError(f"line {lineno}: key {key!r} has no section")
        section, name = key.split(".", 1)
        if section not in overrides:
            raise ConfigError(f"line {lineno}: unknown section {section!r}")
        name = _ALIASES.get((section, name), name)
        obj = getattr(defaults, section)
        if name not in {f.name for f in dataclasses.fields(obj)}:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        try:
            overrides[section][name] = _coerce(raw, getattr(obj, name))
        except ValueError as exc:
            raise ConfigError(f"line {lineno}: bad value for {key!r}: {exc}") from None
    try:
        return defaults.replace(**{s: v for s, v in overrides.items() if v})
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def load_config(path) -> RunConfig:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
    return parse_config(text)
