"""Euler-Maruyama integration of the eigenvalue SDEs against direct diagonalization."""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np

from tridyson.dyson.coefficients import diffusion_coeffs_at, drift_at, qv_rate_at
from tridyson.dyson.paths import EigenPathSet, MatrixPath, eigen_paths
from tridyson.eig import Spectrum
from tridyson.errors import CollisionError, DomainError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class IntegratedPath:
    """Integrated eigenvalues (T', n) on the first T' grid times of the matrix path."""

    times: np.ndarray
    values: np.ndarray
    truncated_at: Optional[float] = None
    reason: Optional[str] = None

    def discrepancy(self, eigs: EigenPathSet) -> float:
        """Max absolute gap to the diagonalized spectrum over the integrated window."""
        m = self.values.shape[0]
        return float(np.max(np.abs(self.values - eigs.full[:m])))


def integrate_sde_path(
    path: MatrixPath,
    eigs0: Optional[Spectrum] = None,
    eig_paths: Optional[EigenPathSet] = None,
) -> IntegratedPath:
    """Step the full spectrum with the path's own noise increments.

    Minor spectra and Bessel values entering the coefficients at each step come
    from the diagonalized matrix path; only the full spectrum is integrated.
    """
    eig_paths = eig_paths if eig_paths is not None else eigen_paths(path)
    start = eig_paths.full[0] if eigs0 is None else eigs0.as_array()
    if start.shape != (path.n,):
        raise DomainError(f"starting spectrum needs {path.n} values, got {start.shape}")
    first = eig_paths.snapshot(0).with_full(start)
    first.require_simple()

    dt = path.dt
    lam = start.astype(float)
    values = [lam]
    truncated_at: Optional[float] = None
    reason = "absorption" if path.stopped_at is not None else None
    for s in range(len(path) - 1):
        snap = eig_paths.snapshot(s).with_full(lam)
        try:
            step = np.empty(path.n)
            for i in range(1, path.n + 1):
                coeffs = diffusion_coeffs_at(snap, None, i)
                step[i - 1] = (
                    drift_at(snap, None, None, i) * dt
                    + float(np.dot(coeffs.diag, path.noise.dB_diag[s]))
                    + float(np.dot(coeffs.off, path.noise.dB_off[s]))
                )
        except CollisionError:
            truncated_at, reason = float(path.times[s]), "collision"
            logger.warning("integration stopped at t=%.6g: spectrum not simple", truncated_at)
            break
        lam = lam + step
        values.append(lam)
    if truncated_at is None and path.stopped_at is not None:
        truncated_at = path.stopped_at
    return IntegratedPath(path.times[: len(values)], np.vstack(values), truncated_at, reason)


def realized_covariation(values: np.ndarray) -> np.ndarray:
    """Sum over steps of d lambda_i d lambda_j for a (T, n) path."""
    increments = np.diff(np.asarray(values, dtype=float), axis=0)
    return increments.T @ increments


def integrated_qv_rate(eigs: EigenPathSet, dt: float) -> np.ndarray:
    """Left Riemann sum of the quadratic-variation rates over the path."""
    n = eigs.n
    total = np.zeros((n, n))
    for s in range(len(eigs) - 1):
        snap = eigs.snapshot(s)
        for i in range(1, n + 1):
            for j in range(i, n + 1):
                rate = qv_rate_at(snap, None, i, j)
                total[i - 1, j - 1] += rate * dt
                if j != i:
                    total[j - 1, i - 1] += rate * dt
    return total
