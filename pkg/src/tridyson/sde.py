"""Driving noise and Bessel-process integrators."""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from tridyson.errors import AbsorbedStateError, DomainError

logger = logging.getLogger(__name__)


class Scheme(str, Enum):
    EULER_MARUYAMA = "euler_maruyama"
    EXACT_SQUARED_BESSEL = "exact_squared_bessel"


class SdeConfig(BaseModel):
    """Full description of one matrix-path experiment."""

    model_config = ConfigDict(frozen=True)

    n: int = Field(..., ge=1)
    alpha: Tuple[float, ...]
    x0: Tuple[float, ...]
    dt: float = Field(..., gt=0)
    t_end: float
    seed: int = Field(0, ge=0, lt=2**64)
    scheme: Scheme = Scheme.EULER_MARUYAMA
    initial_diag: Optional[Tuple[float, ...]] = None

    @field_validator("alpha")
    @classmethod
    def _positive_alpha(cls, value: Tuple[float, ...]) -> Tuple[float, ...]:
        if any(a <= 0 for a in value):
            raise ValueError("every Bessel dimension alpha_k must be positive")
        return value

    @field_validator("x0")
    @classmethod
    def _nonnegative_start(cls, value: Tuple[float, ...]) -> Tuple[float, ...]:
        if any(x < 0 for x in value):
            raise ValueError("every Bessel start x_k must be nonnegative")
        return value

    @model_validator(mode="after")
    def _shapes(self) -> "SdeConfig":
        if len(self.alpha) != self.n - 1:
            raise ValueError(f"alpha needs {self.n - 1} entries, got {len(self.alpha)}")
        if len(self.x0) != self.n - 1:
            raise ValueError(f"x0 needs {self.n - 1} entries, got {len(self.x0)}")
        if self.initial_diag is not None and len(self.initial_diag) != self.n:
            raise ValueError(f"initial_diag needs {self.n} entries")
        if self.t_end < self.dt:
            raise ValueError("t_end must be at least dt")
        return self

    @property
    def steps(self) -> int:
        return int(round(self.t_end / self.dt))


@dataclass(frozen=True)
class NoiseGrid:
    """Brownian increments for B_k (dB_diag) and B_{k,k+1} (dB_off)."""

    dt: float
    dB_diag: np.ndarray
    dB_off: np.ndarray
    transition_seed: np.random.SeedSequence

    @property
    def steps(self) -> int:
        return self.dB_diag.shape[0]

    @property
    def times(self) -> np.ndarray:
        return np.arange(self.steps + 1) * self.dt

    def transition_rng(self) -> np.random.Generator:
        """Stream for exact-transition sampling, independent of the increments."""
        return np.random.Generator(np.random.PCG64(self.transition_seed))


def path_seed(seed: int, path_index: int) -> np.random.SeedSequence:
    """Deterministic substream for (master seed, path index)."""
    if path_index < 0:
        raise DomainError(f"path_index must be nonnegative, got {path_index}")
    return np.random.SeedSequence(entropy=seed, spawn_key=(path_index,))


def make_noise(config: SdeConfig, path_index: int) -> NoiseGrid:
    increments, transition = path_seed(config.seed, path_index).spawn(2)
    rng = np.random.Generator(np.random.PCG64(increments))
    m, n = config.steps, config.n
    draws = rng.standard_normal((m, 2 * n - 1)) * math.sqrt(config.dt)
    return NoiseGrid(config.dt, draws[:, :n], draws[:, n:], transition)


def coarsen_noise(noise: NoiseGrid, factor: int) -> NoiseGrid:
    """Sum blocks of `factor` consecutive increments (same Brownian path, step*factor)."""
    if factor < 1:
        raise DomainError(f"factor must be positive, got {factor}")
    m = noise.steps // factor

    def _block_sum(arr: np.ndarray) -> np.ndarray:
        return arr[: m * factor].reshape(m, factor, arr.shape[1]).sum(axis=1)

    return NoiseGrid(
        noise.dt * factor,
        _block_sum(noise.dB_diag),
        _block_sum(noise.dB_off),
        noise.transition_seed,
    )


@dataclass(frozen=True)
class BesselState:
    value: float
    absorbed: bool = False
    absorption_time: Optional[float] = None

    def __post_init__(self) -> None:
        if self.value < 0:
            raise ValueError(f"Bessel value must be nonnegative, got {self.value}")


def _em_increment(x, alpha, dt: float, dW):
    # Drift floor sqrt(dt) keeps the 1/x term bounded near the origin.
    return dW + 0.5 * (alpha - 1.0) * dt / np.maximum(x, math.sqrt(dt))


def bessel_step(
    state: BesselState,
    alpha: float,
    dt: float,
    dW: float,
    t: float = 0.0,
    scheme: Scheme = Scheme.EULER_MARUYAMA,
    rng: Optional[np.random.Generator] = None,
) -> BesselState:
    """Advance one Bessel coordinate from time t to t + dt."""
    if state.absorbed:
        raise AbsorbedStateError(
            f"Bessel coordinate absorbed at t={state.absorption_time}; stop at T_0"
        )
    x = state.value
    if scheme is Scheme.EXACT_SQUARED_BESSEL:
        if rng is None:
            raise DomainError("exact squared-Bessel steps need a random generator")
        return BesselState(math.sqrt(dt * rng.noncentral_chisquare(alpha, x * x / dt)))
    nxt = x + float(_em_increment(x, alpha, dt, dW))
    if nxt > 0:
        return BesselState(nxt)
    if alpha < 2:
        crossing = t + dt * (x / (x - nxt) if x > nxt else 0.0)
        return BesselState(0.0, True, crossing)
    return BesselState(abs(nxt))


@dataclass(frozen=True)
class BesselPaths:
    """Independent Bessel columns on a uniform grid.

    values is (m+1, K); a column is frozen at 0 after it is absorbed and
    absorption_time holds nan for columns that never hit 0.
    """

    dt: float
    values: np.ndarray
    absorption_time: np.ndarray
    absorption_step: np.ndarray

    @property
    def absorbed(self) -> np.ndarray:
        return ~np.isnan(self.absorption_time)

    def first_absorption(self) -> Optional[float]:
        if not self.absorbed.any():
            return None
        return float(np.nanmin(self.absorption_time))

    def first_absorption_step(self) -> Optional[int]:
        """Index of the step (grid interval) in which the first column hit 0."""
        if not self.absorbed.any():
            return None
        return int(self.absorption_step[self.absorbed].min())


def simulate_bessel(
    x0: np.ndarray,
    alpha: np.ndarray,
    dW: np.ndarray,
    dt: float,
    scheme: Scheme = Scheme.EULER_MARUYAMA,
    rng: Optional[np.random.Generator] = None,
) -> BesselPaths:
    """Vectorized bessel_step over K columns and all m steps of dW (m, K)."""
    x = np.asarray(x0, dtype=float).copy()
    alpha = np.broadcast_to(np.asarray(alpha, dtype=float), x.shape)
    m = dW.shape[0]
    values = np.empty((m + 1, x.size))
    values[0] = x
    hit = np.full(x.size, np.nan)
    hit_step = np.full(x.size, -1, dtype=np.int64)
    if scheme is Scheme.EXACT_SQUARED_BESSEL:
        if rng is None:
            raise DomainError("exact squared-Bessel steps need a random generator")
        for s in range(m):
            x = np.sqrt(dt * rng.noncentral_chisquare(alpha, x * x / dt))
            values[s + 1] = x
        return BesselPaths(dt, values, hit, hit_step)
    recurrent = alpha < 2
    for s in range(m):
        live = np.isnan(hit)
        nxt = x + _em_increment(x, alpha, dt, dW[s])
        crossed = live & (nxt <= 0) & recurrent
        if crossed.any():
            gap = x[crossed] - nxt[crossed]
            frac = np.divide(x[crossed], gap, out=np.zeros_like(gap), where=gap > 0)
            hit[crossed] = s * dt + dt * frac
            hit_step[crossed] = s
            logger.debug("Bessel columns %s absorbed in step %d", np.flatnonzero(crossed), s)
        nxt = np.where(recurrent, nxt, np.abs(nxt))
        x = np.where(np.isnan(hit), nxt, 0.0)
        values[s + 1] = x
    return BesselPaths(dt, values, hit, hit_step)
