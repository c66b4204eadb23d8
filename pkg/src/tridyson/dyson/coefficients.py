"""Drift, diffusion and quadratic-variation coefficients of the eigenvalue SDEs.

Every evaluator works on an EigenSnapshot: the matrix at one time together with
the spectra of its principal minors. Indices i, j, k, l are 1-based and local to
the snapshot's frame, so a restricted snapshot evaluates the SDE of a minor.

Notation used below, all at lam = lambda_i:
    fl   = prod_{j != i} (lambda_i - lambda_j)
    S    = sum_{j != i} 1 / (lambda_i - lambda_j)
    P_k  = f(1, k-1) f(k+2, n)
    F_kl = f(1, k-1) f(k+1, n) f(1, l-1) f(l+1, n)   for l - k > 1
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Dict, Iterator, Optional, Sequence, Tuple

import numpy as np

from tridyson.dyson.paths import EigenSnapshot
from tridyson.errors import CollisionError, DomainError, RangeError
from tridyson.tridiag import SymTridiag, deleted_minor_det

logger = logging.getLogger(__name__)

SQRT2 = math.sqrt(2.0)
# lam is treated as coincident with a minor root closer than this times the diameter.
ROOT_SEPARATION = 1e-8
DRIFT_FORMS = ("product", "log")


def _check_i(snap: EigenSnapshot, i: int) -> None:
    if not 1 <= i <= snap.n:
        raise RangeError(f"eigenvalue index {i} out of range for n={snap.n}")


def _bessel(snap: EigenSnapshot, bessel_values: Optional[Sequence[float]]) -> np.ndarray:
    if bessel_values is None:
        return np.asarray(snap.bessel, dtype=float)
    values = np.asarray(bessel_values, dtype=float)
    if values.shape != (snap.n - 1,):
        raise DomainError(f"expected {snap.n - 1} Bessel values, got {values.shape}")
    if np.any(values < 0):
        raise DomainError("Bessel values must be nonnegative")
    return values


def _alpha(snap: EigenSnapshot, alpha: Optional[Sequence[float]]) -> np.ndarray:
    values = np.asarray(snap.alpha if alpha is None else alpha, dtype=float)
    if values.shape != (snap.n - 1,):
        raise DomainError(f"expected {snap.n - 1} Bessel dimensions, got {values.shape}")
    return values


def _difference_product(snap: EigenSnapshot, i: int) -> Tuple[float, float]:
    """(fl, S) for eigenvalue i; CollisionError if lambda_i is not simple."""
    _check_i(snap, i)
    snap.require_simple()
    lam = snap.full
    diffs = lam[i - 1] - np.delete(lam, i - 1)
    return float(np.prod(diffs)), float(np.sum(1.0 / diffs))


def _pairs(n: int) -> Iterator[Tuple[int, int]]:
    for k in range(1, n + 1):
        for l in range(k + 2, n + 1):
            yield k, l


def _interaction_roots(snap: EigenSnapshot, k: int, l: int) -> np.ndarray:
    n = snap.n
    return np.concatenate(
        [snap.roots(1, k - 1), snap.roots(k + 1, n), snap.roots(1, l - 1), snap.roots(l + 1, n)]
    )


def _check_pair(snap: EigenSnapshot, k: int, l: int) -> None:
    if l - k <= 1:
        raise DomainError(f"interaction term needs l - k > 1, got (k, l) = ({k}, {l})")
    if k < 1 or l > snap.n:
        raise RangeError(f"pair ({k}, {l}) out of range for n={snap.n}")


def interaction_term(snap: EigenSnapshot, k: int, l: int, lam: float) -> float:
    """F^{k,l}(lam), the product of four minor characteristic polynomials."""
    _check_pair(snap, k, l)
    n = snap.n
    return snap.f(1, k - 1, lam) * snap.f(k + 1, n, lam) * snap.f(1, l - 1, lam) * snap.f(l + 1, n, lam)


def interaction_sum(snap: EigenSnapshot, lam: float) -> float:
    return sum((interaction_term(snap, k, l, lam) for k, l in _pairs(snap.n)), 0.0)


def _separation(snap: EigenSnapshot) -> float:
    full = snap.full
    return ROOT_SEPARATION * max(float(full.max() - full.min()), 1.0) if full.size else 0.0


def interaction_derivative(
    snap: EigenSnapshot, k: int, l: int, lam: float, form: str = "product"
) -> float:
    """d/dlam F^{k,l} at lam.

    "product" uses F times the sum of reciprocal root distances when lam is
    separated from every root, and the expanded product rule otherwise, so it is
    exact at a coincidence. "log" always uses the reciprocal sum and raises
    CollisionError at a coincidence.
    """
    _check_pair(snap, k, l)
    if form not in DRIFT_FORMS:
        raise DomainError(f"unknown derivative form {form!r}")
    diffs = lam - _interaction_roots(snap, k, l)
    if diffs.size == 0:
        return 0.0
    close = float(np.min(np.abs(diffs))) <= _separation(snap)
    if not close:
        return float(np.prod(diffs) * np.sum(1.0 / diffs))
    if form == "log":
        raise CollisionError(
            f"lambda coincides with a minor root in F^{{{k},{l}}}; log form undefined"
        )
    logger.debug("F^{%d,%d}: root coincidence, using product rule", k, l)
    total = 0.0
    for r in range(diffs.size):
        total += float(np.prod(np.delete(diffs, r)))
    return total


def _adjacent_products(snap: EigenSnapshot, lam: float) -> np.ndarray:
    n = snap.n
    return np.array([snap.f(1, k - 1, lam) * snap.f(k + 2, n, lam) for k in range(1, n)])


def _diagonal_products(snap: EigenSnapshot, lam: float) -> np.ndarray:
    n = snap.n
    return np.array([snap.f(1, k - 1, lam) * snap.f(k + 1, n, lam) for k in range(1, n + 1)])


def _interaction_correction(snap: EigenSnapshot, lam: float, S: float, fl: float, form: str) -> float:
    total_F = interaction_sum(snap, lam)
    total_dF = sum(
        (interaction_derivative(snap, k, l, lam, form) for k, l in _pairs(snap.n)), 0.0
    )
    return 2.0 / fl**2 * (2.0 * S * total_F - total_dF)


def drift_at(
    snap: EigenSnapshot,
    bessel_values: Optional[Sequence[float]],
    alpha: Optional[Sequence[float]],
    i: int,
    form: str = "product",
) -> float:
    """dt-coefficient of d lambda_i.

    The drift does not depend on the Bessel values themselves; they are checked
    against the frame when given. `alpha` defaults to the snapshot's dimensions.
    """
    _bessel(snap, bessel_values)
    alpha = _alpha(snap, alpha)
    fl, S = _difference_product(snap, i)
    lam = float(snap.full[i - 1])
    total = 2.0 * S
    if snap.n > 1:
        total += float(np.dot(alpha - 2.0, _adjacent_products(snap, lam))) / fl
    return total + _interaction_correction(snap, lam, S, fl, form)


@dataclass(frozen=True)
class DiffusionCoefficients:
    """Coefficients of dB_k (diag, n values) and dB_{k,k+1} (off, n-1 values)."""

    diag: np.ndarray
    off: np.ndarray

    def normalized(self) -> "DiffusionCoefficients":
        """Both families divided by sqrt(2); each magnitude stays below 1."""
        return DiffusionCoefficients(self.diag / SQRT2, self.off / SQRT2)

    def as_vector(self) -> np.ndarray:
        return np.concatenate([self.diag, self.off])

    @property
    def squared_norm(self) -> float:
        return float(np.sum(self.diag**2) + np.sum(self.off**2))

    @property
    def max_abs(self) -> float:
        vec = self.as_vector()
        return float(np.max(np.abs(vec))) if vec.size else 0.0


def diffusion_coeffs_at(
    snap: EigenSnapshot, bessel_values: Optional[Sequence[float]], i: int
) -> DiffusionCoefficients:
    x = _bessel(snap, bessel_values)
    fl, _ = _difference_product(snap, i)
    lam = float(snap.full[i - 1])
    diag = SQRT2 * _diagonal_products(snap, lam) / fl
    off = 2.0 * x * _adjacent_products(snap, lam) / fl if snap.n > 1 else np.zeros(0)
    return DiffusionCoefficients(diag, off)


def interaction_fraction(snap: EigenSnapshot, i: int) -> float:
    """2 * sum F / fl**2 at lambda_i; lies in [0, 1]."""
    fl, _ = _difference_product(snap, i)
    return 2.0 * interaction_sum(snap, float(snap.full[i - 1])) / fl**2


def _with_bessel(snap: EigenSnapshot, x: np.ndarray) -> SymTridiag:
    return SymTridiag(snap.matrix.diag, tuple(x))


def qv_rate_at(
    snap: EigenSnapshot, bessel_values: Optional[Sequence[float]], i: int, j: int
) -> float:
    """d<lambda_i, lambda_j>/dt."""
    x = _bessel(snap, bessel_values)
    if i == j:
        return 2.0 * (1.0 - interaction_fraction(snap, i))
    fl_i, _ = _difference_product(snap, i)
    fl_j, _ = _difference_product(snap, j)
    H = _with_bessel(snap, x)
    lam_i, lam_j = float(snap.full[i - 1]), float(snap.full[j - 1])
    total = 0.0
    for k, l in _pairs(snap.n):
        total += deleted_minor_det(H, lam_i, k, l) * deleted_minor_det(H, lam_j, l, k)
    return -4.0 * total / (fl_i * fl_j)


def qv_deficit_rate_at(snap: EigenSnapshot, i: int) -> float:
    """2 - d<lambda_i>/dt, the speed lost against Dyson's Brownian motion."""
    return 2.0 * interaction_fraction(snap, i)


def identity_residual_at(
    snap: EigenSnapshot, bessel_values: Optional[Sequence[float]], i: int
) -> float:
    """Relative residual of fl**2 = sum diag terms**2 + 2 sum X_k**2 P_k**2 + 2 sum F."""
    x = _bessel(snap, bessel_values)
    fl, _ = _difference_product(snap, i)
    lam = float(snap.full[i - 1])
    rhs = float(np.sum(_diagonal_products(snap, lam) ** 2))
    if snap.n > 1:
        rhs += 2.0 * float(np.sum(x**2 * _adjacent_products(snap, lam) ** 2))
    rhs += 2.0 * interaction_sum(snap, lam)
    lhs = fl**2
    return abs(lhs - rhs) / max(1.0, abs(lhs))


def laplacian_at(snap: EigenSnapshot, i: int) -> float:
    """Laplacian of lambda_i in the coordinates a_k = sqrt(2) x_k and y_k = b_k."""
    fl, S = _difference_product(snap, i)
    lam = float(snap.full[i - 1])
    total = 4.0 * S
    if snap.n > 1:
        total -= 2.0 * float(np.sum(_adjacent_products(snap, lam))) / fl
    return total + 2.0 * _interaction_correction(snap, lam, S, fl, "product")


def ito_drift_at(
    snap: EigenSnapshot,
    bessel_values: Optional[Sequence[float]],
    alpha: Optional[Sequence[float]],
    i: int,
) -> float:
    """Drift rebuilt as the Bessel drift pushed through d lambda / d y plus half the Laplacian."""
    _bessel(snap, bessel_values)
    alpha = _alpha(snap, alpha)
    fl, _ = _difference_product(snap, i)
    lam = float(snap.full[i - 1])
    bessel_part = 0.0
    if snap.n > 1:
        bessel_part = float(np.dot(alpha - 1.0, _adjacent_products(snap, lam))) / fl
    return bessel_part + 0.5 * laplacian_at(snap, i)


@dataclass(frozen=True)
class TwoByTwoReduction:
    """Both eigenvalues of a 2 x 2 block H^{p,p+1} against Dyson's model."""

    p: int
    alpha: float
    drift: Tuple[float, float]
    dyson_drift: Tuple[float, float]
    qv: np.ndarray

    @property
    def drift_error(self) -> float:
        return max(abs(a - b) for a, b in zip(self.drift, self.dyson_drift))

    @property
    def qv_error(self) -> float:
        return float(np.max(np.abs(self.qv - 2.0 * np.eye(2))))


def two_by_two_reduction(snap: EigenSnapshot, p: int) -> TwoByTwoReduction:
    """Evaluate the SDE of the block (p, p+1), which must reduce to beta = alpha_p."""
    block = snap.restrict(p, p + 1)
    alpha = block.alpha[0]
    lam = block.full
    drift = (drift_at(block, None, None, 1), drift_at(block, None, None, 2))
    dyson = (alpha / (lam[0] - lam[1]), alpha / (lam[1] - lam[0]))
    qv = np.array([[qv_rate_at(block, None, a, b) for b in (1, 2)] for a in (1, 2)])
    return TwoByTwoReduction(p, alpha, drift, dyson, qv)


def coefficient_summary(snap: EigenSnapshot) -> Dict[str, float]:
    """Worst-case coefficient diagnostics over every eigenvalue of the snapshot."""
    residual = 0.0
    bound = 0.0
    frac_lo, frac_hi = math.inf, -math.inf
    for i in range(1, snap.n + 1):
        residual = max(residual, identity_residual_at(snap, None, i))
        bound = max(bound, diffusion_coeffs_at(snap, None, i).normalized().max_abs)
        frac = interaction_fraction(snap, i)
        frac_lo, frac_hi = min(frac_lo, frac), max(frac_hi, frac)
    return {
        "identity_residual": residual,
        "normalized_coefficient_max": bound,
        "interaction_fraction_min": frac_lo,
        "interaction_fraction_max": frac_hi,
    }
