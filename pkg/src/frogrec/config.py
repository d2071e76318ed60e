"""Run configuration: one JSON file plus dotted ``key=value`` overrides."""

from __future__ import annotations

import dataclasses
import json
import types
import typing
from dataclasses import asdict, dataclass, field
from pathlib import Path

from .encoders import ALL_MODALITIES
from .graph_data import GeneratorConfig
from .model.frog import VARIANTS, FrogConfig
from .train_eval.trainer import TrainConfig

MODEL_KINDS = VARIANTS + ("lr", "mlp")


class ConfigError(ValueError):
    """Invalid configuration; the message names the offending key."""


@dataclass
class DataConfig:
    path: str | None = None  # dataset directory; generate synthetic data when None
    seed: int | None = None  # generator and split seed; the master seed when None
    generator: GeneratorConfig = field(default_factory=GeneratorConfig)

    def validate(self) -> None:
        self.generator.validate()


@dataclass
class EvalConfig:
    seeds: tuple = (0,)  # candidate-sampling seeds averaged by `eval`

    def validate(self) -> None:
        if not self.seeds:
            raise ValueError("seeds must be non-empty")


@dataclass
class AblateConfig:
    kinds: tuple = MODEL_KINDS
    seeds: tuple = (0, 1, 2, 3, 4)

    def validate(self) -> None:
        bad = [k for k in self.kinds if k not in MODEL_KINDS]
        if bad or not self.kinds:
            raise ValueError(f"kinds must be a non-empty subset of {MODEL_KINDS}, got {list(self.kinds)}")
        if not self.seeds:
            raise ValueError("seeds must be non-empty")


@dataclass
class GradcheckConfig:
    threshold: float = 1e-4
    step: float = 1e-5
    users: int = 60
    dim: int = 8
    hidden: int = 8
    modalities: tuple = ("profile", "graph", "pair")
    batch: int = 4

    def validate(self) -> None:
        if self.threshold <= 0 or self.step <= 0:
            raise ValueError("threshold and step must be > 0")
        for key in ("users", "dim", "hidden", "batch"):
            if getattr(self, key) < 1:
                raise ValueError(f"{key} must be >= 1")
        if self.users < 10:
            raise ValueError("users must be >= 10")
        if not self.modalities or set(self.modalities) - set(ALL_MODALITIES):
            raise ValueError(f"modalities must be a non-empty subset of {ALL_MODALITIES}")


@dataclass
class BenchConfig:
    d_list: tuple = (16, 32, 64, 128)
    t: int = 5
    repetitions: int = 20
    batch: int = 64

    def validate(self) -> None:
        if self.repetitions < 1:
            raise ValueError("repetitions must be >= 1")
        if self.t < 1 or self.batch < 1:
            raise ValueError("t and batch must be >= 1")
        if len(self.d_list) < 3 or list(self.d_list) != sorted(set(self.d_list)) or self.d_list[0] < 1:
            raise ValueError("d_list must hold at least 3 ascending positive sizes")


@dataclass
class RunConfig:
    seed: int = 0
    out: str = "runs/default"
    precision: str = "float32"
    data: DataConfig = field(default_factory=DataConfig)
    model: FrogConfig = field(default_factory=FrogConfig)
    train: TrainConfig = field(default_factory=TrainConfig)
    eval: EvalConfig = field(default_factory=EvalConfig)
    ablate: AblateConfig = field(default_factory=AblateConfig)
    gradcheck: GradcheckConfig = field(default_factory=GradcheckConfig)
    bench: BenchConfig = field(default_factory=BenchConfig)

    @property
    def data_seed(self) -> int:
        return self.seed if self.data.seed is None else self.data.seed

    def validate(self) -> None:
        if self.precision not in ("float32", "float64"):
            raise ConfigError("precision: must be 'float32' or 'float64'")
        for name in ("data", "model", "train", "eval", "ablate", "gradcheck", "bench"):
            try:
                getattr(self, name).validate()
            except ValueError as exc:
                raise ConfigError(f"{name}: {exc}") from None

    def to_dict(self) -> dict:
        return _plain(asdict(self))


def _plain(value):
    if isinstance(value, dict):
        return {k: _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    return value


# -- typed construction --------------------------------------------------------
def _coerce(value, hint, key: str):
    origin = typing.get_origin(hint)
    if origin in (typing.Union, types.UnionType):
        options = typing.get_args(hint)
        if value is None and type(None) in options:
            return None
        errors = []
        for opt in options:
            if opt is type(None):
                continue
            try:
                return _coerce(value, opt, key)
            except ConfigError as exc:
                errors.append(str(exc))
        raise ConfigError(errors[0] if errors else f"{key}: invalid value {value!r}")
    if dataclasses.is_dataclass(hint):
        if not isinstance(value, dict):
            raise ConfigError(f"{key}: expected a table of settings, got {value!r}")
        return _build(hint, value, key)
    if hint is bool:
        if not isinstance(value, bool):
            raise ConfigError(f"{key}: expected true/false, got {value!r}")
        return value
    if hint is int:
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(f"{key}: expected an integer, got {value!r}")
        return value
    if hint is float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"{key}: expected a number, got {value!r}")
        return float(value)
    if hint is str:
        if not isinstance(value, str):
            raise ConfigError(f"{key}: expected a string, got {value!r}")
        return value
    if hint is tuple or origin is tuple:
        if not isinstance(value, (list, tuple)):
            raise ConfigError(f"{key}: expected a list, got {value!r}")
        kinds = {type(v) for v in value}
        if len(kinds) > 1 and not kinds <= {int, float}:
            raise ConfigError(f"{key}: list entries must share one type, got {value!r}")
        if any(isinstance(v, (dict, list)) for v in value):
            raise ConfigError(f"{key}: list entries must be scalars")
        return tuple(value)
    return value


def _build(cls, values: dict, prefix: str = ""):
    hints = typing.get_type_hints(cls)
    names = {f.name for f in dataclasses.fields(cls) if f.init}
    kwargs = {}
    for k, v in values.items():
        key = f"{prefix}.{k}" if prefix else k
        if k not in names:
            raise ConfigError(f"{key}: unknown configuration key")
        kwargs[k] = _coerce(v, hints[k], key)
    return cls(**kwargs)


def _leaf_keys(cls, prefix: str = "") -> list[str]:
    out = []
    hints = typing.get_type_hints(cls)
    for f in dataclasses.fields(cls):
        key = f"{prefix}.{f.name}" if prefix else f.name
        if dataclasses.is_dataclass(hints[f.name]):
            out.extend(_leaf_keys(hints[f.name], key))
        else:
            out.append(key)
    return out


def resolve_key(key: str) -> str:
    """Full dotted path for ``key``; a bare or partial key must match exactly one leaf suffix."""
    leaves = _leaf_keys(RunConfig)
    if key in leaves:
        return key
    matches = [k for k in leaves if k.endswith("." + key)]
    if len(matches) == 1:
        return matches[0]
    if not matches:
        raise ConfigError(f"{key}: unknown configuration key")
    raise ConfigError(f"{key}: ambiguous key, matches {matches}")


def _parse_value(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def parse_override(item: str) -> tuple[str, object]:
    if "=" not in item:
        raise ConfigError(f"{item}: override must look like key=value")
    key, _, text = item.partition("=")
    key = key.strip()
    if not key:
        raise ConfigError(f"{item}: empty key in override")
    return resolve_key(key), _parse_value(text.strip())


def _set_path(tree: dict, path: str, value) -> None:
    parts = path.split(".")
    node = tree
    for p in parts[:-1]:
        node = node.setdefault(p, {})
        if not isinstance(node, dict):
            raise ConfigError(f"{path}: cannot set inside a non-table value")
    node[parts[-1]] = value


def config_from_dict(values: dict, overrides=()) -> RunConfig:
    tree = json.loads(json.dumps(values))  # deep copy
    for item in overrides:
        key, value = parse_override(item) if isinstance(item, str) else item
        _set_path(tree, key, value)
    cfg = _build(RunConfig, tree)
    cfg.validate()
    return cfg


def parse_config(path=None, overrides=()) -> RunConfig:
    """Merge the JSON file at ``path`` (defaults only when None) with ``key=value`` overrides and validate."""
    values = {}
    if path is not None:
        p = Path(path)
        if not p.is_file():
            raise FileNotFoundError(f"config file not found: {p}")
        try:
            values = json.loads(p.read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{p}: invalid JSON at line {exc.lineno}: {exc.msg}") from None
        if not isinstance(values, dict):
            raise ConfigError(f"{p}: top level must be a JSON object")
    return config_from_dict(values, overrides)
