"""Experiment configuration: a single JSON document validated by pydantic.

Keys::

    grid.n, grid.half_period, grid.companion_n
    init.preset, init.params.*
    model.coupled
    integrator.dt_max, integrator.cfl, integrator.t_end
    sampling.per_decade
    splitting.r
    probes.modes
    seed
    output.dir
"""

from __future__ import annotations

import json
import math
from typing import Any, Optional

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from .diagnostics import DEFAULT_PROBE_MODES

DEFAULT_N = 256
DEFAULT_HALF_PERIOD = 40 * math.pi


class ConfigError(ValueError):
    """Invalid configuration; ``key`` is the dotted path of the offending entry."""

    def __init__(self, key: str, message: str):
        super().__init__(f"{key}: {message}" if key else message)
        self.key = key
        self.message = message


# name -> {param: (type, default)}
PRESETS: dict[str, dict[str, tuple[type, Any]]] = {
    "blob_vortex": {
        "mass": (float, 1.0),
        "width": (float, 2.0),
        "center": (list, [0.0, 0.0]),
        "vortex_amplitude": (float, 1.0),
        "vortex_width": (float, 2.0),
        "vortex_center": (list, [3.0, 0.0]),
    },
    "poisson_kernel": {
        "mass": (float, 1.0),
        "height": (float, 1.0),
    },
    "zero": {},
    "property_suite": {
        "trials": (int, 100),
        "bump_trials": (int, 20),
        "suites": (list, ["all"]),
    },
}


def _check_param(preset: str, key: str, value: Any) -> Any:
    kind, default = PRESETS[preset][key]
    if kind is float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ValueError(f"expected a number, got {value!r}")
        return float(value)
    if kind is int:
        if isinstance(value, bool) or not isinstance(value, int):
            raise ValueError(f"expected an integer, got {value!r}")
        if value < 1:
            raise ValueError(f"must be at least 1, got {value}")
        return value
    if not isinstance(value, list):
        raise ValueError(f"expected a list, got {value!r}")
    if isinstance(default[0], float):
        if len(value) != 2 or not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in value):
            raise ValueError(f"expected two numbers, got {value!r}")
        return [float(v) for v in value]
    if not all(isinstance(v, str) for v in value):
        raise ValueError(f"expected a list of names, got {value!r}")
    return list(value)


class _Section(BaseModel):
    model_config = ConfigDict(extra="forbid", validate_assignment=True)


class GridSection(_Section):
    n: int = DEFAULT_N
    half_period: float = DEFAULT_HALF_PERIOD
    # optional second resolution for refinement checks
    companion_n: Optional[int] = None

    @field_validator("n", "companion_n")
    @classmethod
    def _even(cls, v: Optional[int]) -> Optional[int]:
        if v is None:
            return v
        if v % 2 or not 16 <= v <= 2**14:
            raise ValueError(f"must be an even integer in [16, 16384], got {v}")
        return v

    @field_validator("half_period")
    @classmethod
    def _positive(cls, v: float) -> float:
        if not (math.isfinite(v) and v > 0):
            raise ValueError(f"must be positive, got {v}")
        return v


class InitSection(_Section):
    preset: str = "blob_vortex"
    params: dict[str, Any] = Field(default_factory=dict)

    @field_validator("preset")
    @classmethod
    def _known(cls, v: str) -> str:
        if v not in PRESETS:
            raise ValueError(f"unknown preset {v!r}; expected one of {sorted(PRESETS)}")
        return v

    @model_validator(mode="after")
    def _resolve(self) -> "InitSection":
        schema = PRESETS[self.preset]
        resolved = {}
        for key, value in self.params.items():
            if key not in schema:
                raise _ParamError(key, f"unknown parameter for preset {self.preset!r}")
            try:
                resolved[key] = _check_param(self.preset, key, value)
            except ValueError as exc:
                raise _ParamError(key, str(exc)) from None
        for key, (_, default) in schema.items():
            resolved.setdefault(key, default)
        object.__setattr__(self, "params", resolved)
        return self


class _ParamError(ValueError):
    def __init__(self, key: str, message: str):
        super().__init__(message)
        self.key = key


class ModelSection(_Section):
    coupled: bool = True


class IntegratorSection(_Section):
    dt_max: float = 0.1
    cfl: float = 0.4
    t_end: Optional[float] = None

    @field_validator("dt_max")
    @classmethod
    def _dt(cls, v: float) -> float:
        if not v > 0:
            raise ValueError(f"must be positive, got {v}")
        return v

    @field_validator("cfl")
    @classmethod
    def _cfl(cls, v: float) -> float:
        if not 0 < v <= 1:
            raise ValueError(f"must lie in (0, 1], got {v}")
        return v

    @field_validator("t_end")
    @classmethod
    def _t_end(cls, v: Optional[float]) -> Optional[float]:
        if v is not None and not (math.isfinite(v) and v >= 0):
            raise ValueError(f"must be non-negative, got {v}")
        return v


class SamplingSection(_Section):
    per_decade: int = 40

    @field_validator("per_decade")
    @classmethod
    def _dense(cls, v: int) -> int:
        if v < 30:
            raise ValueError(f"need at least 30 samples per decade, got {v}")
        return v


class SplittingSection(_Section):
    r: float = 4.0

    @field_validator("r")
    @classmethod
    def _positive(cls, v: float) -> float:
        if not v > 0:
            raise ValueError(f"must be positive, got {v}")
        return v


class ProbesSection(_Section):
    modes: list[tuple[int, int]] = Field(default_factory=lambda: [tuple(m) for m in DEFAULT_PROBE_MODES])

    @field_validator("modes")
    @classmethod
    def _nonzero(cls, v: list[tuple[int, int]]) -> list[tuple[int, int]]:
        for m in v:
            if tuple(m) == (0, 0):
                raise ValueError("probe modes must exclude (0, 0)")
        return [tuple(m) for m in v]


class OutputSection(_Section):
    dir: str = "out"


class ExperimentConfig(_Section):
    grid: GridSection = Field(default_factory=GridSection)
    init: InitSection = Field(default_factory=InitSection)
    model: ModelSection = Field(default_factory=ModelSection)
    integrator: IntegratorSection = Field(default_factory=IntegratorSection)
    sampling: SamplingSection = Field(default_factory=SamplingSection)
    splitting: SplittingSection = Field(default_factory=SplittingSection)
    probes: ProbesSection = Field(default_factory=ProbesSection)
    seed: int = 0
    output: OutputSection = Field(default_factory=OutputSection)

    @model_validator(mode="after")
    def _defaults(self) -> "ExperimentConfig":
        if self.integrator.t_end is None:
            self.integrator.t_end = self.grid.half_period / 4
        half = self.grid.n // 2
        for m in self.probes.modes:
            if not all(-half <= c < half for c in m):
                raise _ParamError("probes.modes", f"mode {list(m)} does not fit an n={self.grid.n} grid")
        return self

    @property
    def t_end(self) -> float:
        return float(self.integrator.t_end)

    def to_dict(self) -> dict:
        return self.model_dump(mode="json")

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    def trajectory_key(self) -> str:
        """Canonical text of every setting that shapes the primary trajectory."""
        d = self.to_dict()
        d["grid"].pop("companion_n", None)
        d.pop("output", None)
        return json.dumps(d, sort_keys=True)


def _key_from_error(exc: ValidationError) -> tuple[str, str]:
    err = exc.errors()[0]
    loc = [str(p) for p in err["loc"]]
    ctx = err.get("ctx") or {}
    inner = ctx.get("error")
    if isinstance(inner, _ParamError):
        if inner.key.startswith("probes."):
            return inner.key, str(inner)
        return ".".join(loc + ["params", inner.key]), str(inner)
    msg = err["msg"].removeprefix("Value error, ")
    if err["type"] == "extra_forbidden":
        msg = "unknown key"
    return ".".join(loc), msg


def config_from_dict(data: Any) -> ExperimentConfig:
    if not isinstance(data, dict):
        raise ConfigError("", "configuration must be a JSON object")
    try:
        return ExperimentConfig.model_validate(data)
    except ValidationError as exc:
        key, msg = _key_from_error(exc)
        raise ConfigError(key, msg) from None


def parse_config(text: str) -> ExperimentConfig:
    """Parse and validate one JSON configuration document."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError("", f"invalid JSON: {exc}") from None
    return config_from_dict(data)


def serialize_config(cfg: ExperimentConfig) -> str:
    return cfg.to_json()
