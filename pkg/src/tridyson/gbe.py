"""Gaussian beta ensemble in tridiagonal form, and moment checks against it."""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field
from scipy import integrate

from tridyson.dyson.paths import simulate_matrix_path
from tridyson.errors import DomainError
from tridyson.sde import Scheme, SdeConfig
from tridyson.tridiag import SymTridiag

logger = logging.getLogger(__name__)

TRACE_SIGMAS = 3.0
TIME_SLICE_SIGMAS = 4.0


class GbeConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    n: int = Field(..., ge=1)
    beta: float = Field(..., gt=0)
    samples: int = Field(10_000, ge=1)
    seed: int = Field(0, ge=0, lt=2**64)

    @property
    def chi_shapes(self) -> Tuple[float, ...]:
        """Degrees of freedom of the off-diagonal chi variables, top to bottom."""
        return tuple((self.n - k) * self.beta for k in range(1, self.n))


def sample_gbe(config: GbeConfig, index: int) -> SymTridiag:
    """Draw sample `index` of the ensemble from its own substream."""
    if index < 0:
        raise DomainError(f"sample index must be nonnegative, got {index}")
    rng = np.random.default_rng(np.random.SeedSequence(entropy=config.seed, spawn_key=(index,)))
    scale = 1.0 / math.sqrt(config.beta)
    diag = rng.normal(0.0, math.sqrt(2.0), config.n) * scale
    shapes = np.asarray(config.chi_shapes)
    offdiag = np.sqrt(rng.gamma(shapes / 2.0, 2.0)) * scale if shapes.size else np.zeros(0)
    return SymTridiag(tuple(float(v) for v in diag), tuple(float(v) for v in offdiag))


def sample_entries(config: GbeConfig) -> Tuple[np.ndarray, np.ndarray]:
    """(samples, n) diagonals and (samples, n-1) off-diagonals of samples 0..samples-1."""
    draws = [sample_gbe(config, s) for s in range(config.samples)]
    diag = np.array([H.diag for H in draws], dtype=float).reshape(config.samples, config.n)
    offdiag = np.array([H.offdiag for H in draws], dtype=float).reshape(
        config.samples, config.n - 1
    )
    return diag, offdiag


@dataclass(frozen=True)
class MomentCheck:
    """One Monte Carlo estimate compared with a reference value or a second sample."""

    name: str
    estimate: float
    expected: float
    stderr: float
    sigmas: float

    @property
    def z_score(self) -> float:
        if self.stderr == 0:
            return 0.0 if self.estimate == self.expected else math.inf
        return abs(self.estimate - self.expected) / self.stderr

    @property
    def passed(self) -> bool:
        return self.z_score <= self.sigmas

    def as_dict(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "estimate": self.estimate,
            "expected": self.expected,
            "stderr": self.stderr,
            "z_score": self.z_score,
            "sigmas": self.sigmas,
            "passed": self.passed,
        }


@dataclass
class MomentReport:
    name: str
    n: int
    beta: float
    samples: int
    checks: List[MomentCheck] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def failures(self) -> List[MomentCheck]:
        return [c for c in self.checks if not c.passed]

    def as_dict(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "n": self.n,
            "beta": self.beta,
            "samples": self.samples,
            "passed": self.passed,
            "failure_count": len(self.failures),
            "checks": [c.as_dict() for c in self.checks],
        }


def _mean_stderr(values: np.ndarray) -> Tuple[float, float]:
    values = np.asarray(values, dtype=float)
    if values.size < 2:
        return float(values.mean()), 0.0
    return float(values.mean()), float(values.std(ddof=1) / math.sqrt(values.size))


def expected_trace_square(n: int, beta: float) -> float:
    """E[tr H^2] = 2n/beta + n(n-1)."""
    return 2.0 * n / beta + n * (n - 1)


def trace_moment_check(config: GbeConfig, sigmas: float = TRACE_SIGMAS) -> MomentReport:
    """E[tr H^2] and the first two moments of H_11 against their closed forms."""
    diag, offdiag = sample_entries(config)
    report = MomentReport("trace_moment", config.n, config.beta, config.samples)
    trace_sq = (diag**2).sum(axis=1) + 2.0 * (offdiag**2).sum(axis=1)
    mean, se = _mean_stderr(trace_sq)
    report.checks.append(
        MomentCheck("E[tr H^2]", mean, expected_trace_square(config.n, config.beta), se, sigmas)
    )
    mean, se = _mean_stderr(diag[:, 0])
    report.checks.append(MomentCheck("E[H_11]", mean, 0.0, se, sigmas))
    mean, se = _mean_stderr(diag[:, 0] ** 2)
    report.checks.append(MomentCheck("E[H_11^2]", mean, 2.0 / config.beta, se, sigmas))
    for check in report.failures:
        logger.warning(
            "GbE n=%d beta=%g: %s off by %.2f sigma",
            config.n,
            config.beta,
            check.name,
            check.z_score,
        )
    return report


def gap_square_moment(beta: float) -> float:
    """E[g^2] for the eigenvalue gap g of the 2 x 2 ensemble, by quadrature.

    The gap density is proportional to g^beta exp(-beta g^2 / 8) on g > 0.
    """
    if beta <= 0:
        raise DomainError(f"beta must be positive, got {beta}")

    def weight(g: float, power: float) -> float:
        return g ** (beta + power) * math.exp(-beta * g * g / 8.0)

    top, _ = integrate.quad(weight, 0.0, np.inf, args=(2.0,))
    bottom, _ = integrate.quad(weight, 0.0, np.inf, args=(0.0,))
    return top / bottom


def gap_moment_check(config: GbeConfig, sigmas: float = TRACE_SIGMAS) -> MomentReport:
    """Sampled E[(lambda_2 - lambda_1)^2] of the 2 x 2 ensemble against the density."""
    if config.n != 2:
        raise DomainError(f"gap moment check needs n = 2, got {config.n}")
    diag, offdiag = sample_entries(config)
    gap_sq = (diag[:, 0] - diag[:, 1]) ** 2 + 4.0 * offdiag[:, 0] ** 2
    mean, se = _mean_stderr(gap_sq)
    report = MomentReport("gap_moment", config.n, config.beta, config.samples)
    report.checks.append(MomentCheck("E[gap^2]", mean, gap_square_moment(config.beta), se, sigmas))
    return report


def time_slice_config(n: int, beta: float, seed: int = 0, steps: int = 1) -> SdeConfig:
    """Matrix-process config whose unit-time increment is GbE after 1/sqrt(beta) scaling."""
    alpha = tuple((n - k) * beta for k in range(1, n))
    return SdeConfig(
        n=n,
        alpha=alpha,
        x0=(0.0,) * (n - 1),
        dt=1.0 / steps,
        t_end=1.0,
        seed=seed,
        scheme=Scheme.EXACT_SQUARED_BESSEL,
    )


def time_slice_entries(
    config: SdeConfig, beta: float, samples: int
) -> Tuple[np.ndarray, np.ndarray]:
    """(H(1) - H(0)) / sqrt(beta) entries over paths 0..samples-1."""
    scale = 1.0 / math.sqrt(beta)
    diag = np.empty((samples, config.n))
    offdiag = np.empty((samples, config.n - 1))
    for s in range(samples):
        path = simulate_matrix_path(config, s)
        diag[s] = (path.diag[-1] - path.diag[0]) * scale
        offdiag[s] = (path.offdiag[-1] - path.offdiag[0]) * scale
    return diag, offdiag


def _two_sample(name: str, left: np.ndarray, right: np.ndarray, sigmas: float) -> MomentCheck:
    m1, se1 = _mean_stderr(left)
    m2, se2 = _mean_stderr(right)
    return MomentCheck(name, m1, m2, math.hypot(se1, se2), sigmas)


def time_slice_check(
    n: int,
    beta: float,
    samples: int,
    seed: int = 0,
    steps: int = 1,
    sigmas: float = TIME_SLICE_SIGMAS,
) -> MomentReport:
    """Entry moments of (H(1) - H(0)) / sqrt(beta) against sampled GbE moments.

    The matrix process starts its Bessel entries at 0 with
    alpha = ((n-1) beta, ..., beta) and the exact squared-Bessel scheme.
    """
    if n < 1 or samples < 2:
        raise DomainError("time slice check needs n >= 1 and at least two samples")
    gbe = GbeConfig(n=n, beta=beta, samples=samples, seed=seed)
    g_diag, g_off = sample_entries(gbe)
    if n == 1:
        sde = SdeConfig(n=1, alpha=(), x0=(), dt=1.0 / steps, t_end=1.0, seed=seed)
    else:
        sde = time_slice_config(n, beta, seed, steps)
    h_diag, h_off = time_slice_entries(sde, beta, samples)

    report = MomentReport("time_slice", n, beta, samples)
    for k in range(n):
        report.checks.append(_two_sample(f"E[d_{k + 1}]", h_diag[:, k], g_diag[:, k], sigmas))
        report.checks.append(
            _two_sample(f"E[d_{k + 1}^2]", h_diag[:, k] ** 2, g_diag[:, k] ** 2, sigmas)
        )
    for k in range(n - 1):
        report.checks.append(_two_sample(f"E[b_{k + 1}]", h_off[:, k], g_off[:, k], sigmas))
        report.checks.append(
            _two_sample(f"E[b_{k + 1}^2]", h_off[:, k] ** 2, g_off[:, k] ** 2, sigmas)
        )
    for check in report.failures:
        logger.warning(
            "time slice n=%d beta=%g: %s off by %.2f sigma",
            n,
            beta,
            check.name,
            check.z_score,
        )
    return report
