"""Flat ``key = value`` configuration files.

One setting per line, ``#`` starts a comment.  Values are Python literals
(``2``, ``0.5``, ``0, 1``, ``[1e-3, 1e-2]``, ``true``); anything else is
kept as a string.  Unknown keys are rejected.
"""
import ast
from dataclasses import dataclass, fields, replace

from .wegner import ConfigError, WegnerExperimentConfig

__all__ = ["HarnessSettings", "RunConfig", "parse_config", "parse_value", "format_config",
           "CONFIG_KEYS"]


@dataclass
class HarnessSettings:
    """Settings of the non-Wegner subcommands."""

    spacing_L: tuple = tuple(range(2, 513, 2))
    diophantine_B_min: float = 0.9
    diophantine_B_max: float = 1.1
    stollmann_samples: int = 100_000
    stollmann_epsilons: tuple = (0.05, 0.1, 0.2)
    dm_instances: int = 100
    dm_t_values: tuple = (0.1, 1.0, 3.7)
    ids_points: int = 201


@dataclass
class RunConfig:
    experiment: WegnerExperimentConfig
    harness: HarnessSettings

    def items(self):
        """All settings as ``(key, value)`` pairs in a fixed order."""
        for obj in (self.experiment, self.harness):
            for f in fields(obj):
                yield f.name, getattr(obj, f.name)


_EXPERIMENT_KEYS = {f.name for f in fields(WegnerExperimentConfig)}
_HARNESS_KEYS = {f.name for f in fields(HarnessSettings)}
CONFIG_KEYS = _EXPERIMENT_KEYS | _HARNESS_KEYS

_INT_KEYS = {"d", "nu", "L", "omega_samples", "seed", "theta_seed", "truncation_N",
             "interaction_range", "threads", "stollmann_samples", "dm_instances", "ids_points"}
_FLOAT_KEYS = {"r", "b", "E", "c_upper", "c_lower", "kappa", "M", "interaction_strength",
               "slope_min", "slope_max", "diophantine_B_min", "diophantine_B_max"}
_BOOL_KEYS = {"alternating", "verify_eigen"}
_TUPLE_KEYS = {"center", "center2", "epsilon_grid", "frequency", "enclosing_center",
               "spacing_L", "stollmann_epsilons", "dm_t_values"}


def parse_value(text):
    text = text.strip()
    low = text.lower()
    if low in ("true", "yes", "on"):
        return True
    if low in ("false", "no", "off"):
        return False
    if low in ("none", "auto", ""):
        return None
    try:
        return ast.literal_eval(text)
    except (ValueError, SyntaxError):
        return text


def _coerce(key, value):
    if value is None:
        return None
    try:
        if key in _INT_KEYS:
            if isinstance(value, bool) or float(value) != int(value):
                raise ValueError
            return int(value)
        if key in _FLOAT_KEYS:
            return float(value)
        if key in _BOOL_KEYS:
            if not isinstance(value, bool):
                raise ValueError
            return value
        if key in _TUPLE_KEYS:
            seq = value if isinstance(value, (tuple, list)) else (value,)
            if key in ("center", "center2", "enclosing_center", "spacing_L"):
                return tuple(int(v) for v in seq)
            return tuple(float(v) for v in seq)
    except (TypeError, ValueError):
        raise ConfigError(f"{key}: cannot interpret {value!r}") from None
    return str(value)


def _read_file(path):
    settings = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
            key, val = (s.strip() for s in line.split("=", 1))
            settings[key] = parse_value(val)
    return settings


def parse_config(path=None, overrides=None):
    """Read ``path`` (optional), apply ``overrides``, reject unknown keys.

    Returns a :class:`RunConfig`; the experiment part is validated by the
    runners once the subcommand fixes the mode.
    """
    settings = _read_file(path) if path is not None else {}
    settings.update(overrides or {})
    unknown = sorted(set(settings) - CONFIG_KEYS)
    if unknown:
        raise ConfigError(f"unknown configuration key(s): {', '.join(unknown)}")
    exp = {k: _coerce(k, v) for k, v in settings.items() if k in _EXPERIMENT_KEYS}
    har = {k: _coerce(k, v) for k, v in settings.items() if k in _HARNESS_KEYS}
    har = {k: v for k, v in har.items() if v is not None}
    exp.setdefault("mode", None)
    cfg = RunConfig(WegnerExperimentConfig(**exp), HarnessSettings(**har))
    # range checks that do not depend on the subcommand
    cfg.experiment.schedule()
    return cfg


def _fmt(value):
    if isinstance(value, bool):
        return "true" if value else "false"
    if value is None:
        return "auto"
    if isinstance(value, tuple):
        return "[" + ", ".join(repr(v) for v in value) + "]"
    return repr(value)


def format_config(cfg, exclude=("threads",)):
    """``key = value`` lines that :func:`parse_config` reads back to the same settings."""
    return "".join(f"{k} = {_fmt(v)}\n" for k, v in cfg.items() if k not in exclude)


def with_overrides(cfg, **changes):
    return RunConfig(replace(cfg.experiment, **{k: v for k, v in changes.items()
                                                if k in _EXPERIMENT_KEYS}),
                     replace(cfg.harness, **{k: v for k, v in changes.items()
                                             if k in _HARNESS_KEYS}))
