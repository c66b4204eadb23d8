"""Experiment configuration: flat `key = value` files or YAML mappings."""
from __future__ import annotations

import logging
import os
from dataclasses import dataclass
from typing import Any, Dict, Iterable, Mapping, Optional, Tuple

import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from tridyson.errors import ConfigError
from tridyson.gbe import GbeConfig
from tridyson.sde import Scheme, SdeConfig

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ConfigKey:
    default: str
    help: str
    required: bool = False


CONFIG_KEYS: Dict[str, ConfigKey] = {
    "n": ConfigKey("3", "matrix size", required=True),
    "alpha": ConfigKey("2 for every entry", "Bessel dimensions alpha_1..alpha_{n-1}, comma list"),
    "x0": ConfigKey("1 for every entry", "Bessel starts x_1..x_{n-1}, comma list"),
    "dt": ConfigKey("1e-3", "time step"),
    "t_end": ConfigKey("1.0", "horizon T"),
    "paths": ConfigKey("20", "number of simulated paths"),
    "seed": ConfigKey("0", "master seed"),
    "scheme": ConfigKey("euler_maruyama", "euler_maruyama or exact_squared_bessel"),
    "eps_col": ConfigKey("relative, 1e-7 times the spectral diameter", "collision threshold"),
    "ranges": ConfigKey("none", "extra minor ranges p:q, comma list"),
    "initial_diag": ConfigKey("0 for every entry", "H(0) diagonal, comma list"),
    "tol": ConfigKey("1e-12", "bisection tolerance"),
    "alpha_grid": ConfigKey("none", "alpha vectors for the collision study, separated by ;"),
    "beta": ConfigKey("1.0", "GbE parameter"),
    "samples": ConfigKey("10000", "GbE sample count"),
    "identity_count": ConfigKey("100", "random instances per identity check"),
    "identity_max_size": ConfigKey("7", "largest identity instance"),
}


def _floats(value: Any) -> Any:
    if isinstance(value, str):
        value = [v for v in value.replace(" ", "").split(",") if v]
    if isinstance(value, (int, float)):
        value = [value]
    return value


class RunConfig(BaseModel):
    """Validated run configuration; list-valued keys accept comma strings."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    n: int = Field(..., ge=1)
    alpha: Optional[Tuple[float, ...]] = None
    x0: Optional[Tuple[float, ...]] = None
    dt: float = Field(1e-3, gt=0)
    t_end: float = Field(1.0, gt=0)
    paths: int = Field(20, ge=1)
    seed: int = Field(0, ge=0, lt=2**64)
    scheme: Scheme = Scheme.EULER_MARUYAMA
    eps_col: Optional[float] = Field(None, gt=0)
    ranges: Tuple[Tuple[int, int], ...] = ()
    initial_diag: Optional[Tuple[float, ...]] = None
    tol: float = Field(1e-12, gt=0)
    alpha_grid: Tuple[Tuple[float, ...], ...] = ()
    beta: float = Field(1.0, gt=0)
    samples: int = Field(10_000, ge=1)
    identity_count: int = Field(100, ge=1)
    identity_max_size: int = Field(7, ge=1)

    @field_validator("alpha", "x0", "initial_diag", mode="before")
    @classmethod
    def _parse_floats(cls, value: Any) -> Any:
        return _floats(value)

    @field_validator("ranges", mode="before")
    @classmethod
    def _parse_ranges(cls, value: Any) -> Any:
        if isinstance(value, str):
            value = [v for v in value.replace(" ", "").split(",") if v]
        out = []
        for item in value:
            if isinstance(item, str):
                p, sep, q = item.partition(":")
                if not sep:
                    raise ValueError(f"range '{item}' must be written p:q")
                item = (int(p), int(q))
            out.append(item)
        return out

    @field_validator("alpha_grid", mode="before")
    @classmethod
    def _parse_grid(cls, value: Any) -> Any:
        if isinstance(value, str):
            return [_floats(item) for item in value.split(";") if item.strip()]
        return value

    @field_validator("scheme", mode="before")
    @classmethod
    def _parse_scheme(cls, value: Any) -> Any:
        return value.strip().lower() if isinstance(value, str) else value

    @property
    def bessel_alpha(self) -> Tuple[float, ...]:
        return self.alpha if self.alpha is not None else (2.0,) * (self.n - 1)

    @property
    def bessel_start(self) -> Tuple[float, ...]:
        return self.x0 if self.x0 is not None else (1.0,) * (self.n - 1)

    def with_seed(self, seed: Optional[int]) -> "RunConfig":
        return self if seed is None else self.model_copy(update={"seed": seed})

    def sde_config(self, alpha: Optional[Iterable[float]] = None) -> SdeConfig:
        """SdeConfig of this run, optionally at another alpha from the grid."""
        try:
            return SdeConfig(
                n=self.n,
                alpha=tuple(alpha) if alpha is not None else self.bessel_alpha,
                x0=self.bessel_start,
                dt=self.dt,
                t_end=self.t_end,
                seed=self.seed,
                scheme=self.scheme,
                initial_diag=self.initial_diag,
            )
        except ValidationError as exc:
            raise ConfigError(_first_error(exc)) from exc

    def gbe_config(self) -> GbeConfig:
        return GbeConfig(n=self.n, beta=self.beta, samples=self.samples, seed=self.seed)


def _first_error(exc: ValidationError) -> str:
    err = exc.errors()[0]
    where = ".".join(str(p) for p in err.get("loc", ())) or "config"
    return f"{where}: {err['msg']}"


def parse_flat(text: str) -> Dict[str, str]:
    """`key = value` lines; `#` starts a comment."""
    out: Dict[str, str] = {}
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ConfigError(f"line {number}: expected 'key = value', got '{raw.strip()}'")
        key = key.strip()
        if key in out:
            raise ConfigError(f"line {number}: duplicate key '{key}'")
        out[key] = value.strip()
    return out


def build_config(values: Mapping[str, Any]) -> RunConfig:
    """Validate a raw mapping against CONFIG_KEYS and RunConfig."""
    for key in values:
        if key not in CONFIG_KEYS:
            raise ConfigError(f"unknown config key '{key}'")
    for key, entry in CONFIG_KEYS.items():
        if entry.required and key not in values:
            raise ConfigError(
                f"missing required config key '{key}' (documented default: {entry.default})"
            )
    try:
        return RunConfig(**values)
    except ValidationError as exc:
        raise ConfigError(_first_error(exc)) from exc


def load_config(path: str) -> RunConfig:
    if not os.path.isfile(path):
        raise ConfigError(f"config file not found: {path}")
    with open(path, "r", encoding="utf-8") as handle:
        content = handle.read()

    _, ext = os.path.splitext(path.lower())
    if ext in (".yaml", ".yml"):
        try:
            values = yaml.safe_load(content) or {}
        except yaml.YAMLError as exc:
            raise ConfigError(f"{path}: {exc}") from exc
        if not isinstance(values, dict):
            raise ConfigError(f"{path}: expected a mapping at the top level")
    else:
        values = parse_flat(content)
    config = build_config(values)
    logger.debug("loaded %s: %s", path, config.model_dump(mode="json"))
    return config
