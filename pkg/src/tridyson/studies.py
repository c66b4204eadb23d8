"""Ensemble studies producing the metrics the acceptance checks read.

Every study maps path (or instance) indices through a thread pool; results come
back in index order so the metrics depend only on the configuration and seed.
"""
from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Any, Callable, Dict, Iterable, List, Optional, Sequence, Tuple, TypeVar

import numpy as np
import pandas as pd

from tridyson.config import RunConfig
from tridyson.dyson import (
    EigenPathSet,
    all_ranges,
    coefficient_summary,
    detect_collisions,
    drift_at,
    eigen_paths,
    integrate_sde_path,
    integrated_qv_rate,
    ito_drift_at,
    realized_covariation,
    simulate_matrix_path,
    two_by_two_reduction,
)
from tridyson.errors import CollisionError
from tridyson.gbe import gap_moment_check, time_slice_check, trace_moment_check
from tridyson.identities import run_identity_suite
from tridyson.sde import SdeConfig, coarsen_noise, make_noise
from tridyson.tridiag import MinorRange

logger = logging.getLogger(__name__)

T = TypeVar("T")


def map_indices(fn: Callable[[int], T], count: int, threads: int = 1) -> List[T]:
    """fn(0..count-1) in index order, on `threads` workers."""
    if threads <= 1:
        return [fn(i) for i in range(count)]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, range(count)))


def _max(values: Iterable[Optional[float]]) -> Optional[float]:
    present = [v for v in values if v is not None]
    return max(present) if present else None


def _min(values: Iterable[Optional[float]]) -> Optional[float]:
    present = [v for v in values if v is not None]
    return min(present) if present else None


def _ranges(config: RunConfig) -> List[MinorRange]:
    return [MinorRange(p, q) for p, q in config.ranges]


def _alpha_grid(config: RunConfig) -> List[Tuple[float, ...]]:
    return list(config.alpha_grid) or [config.bessel_alpha]


def _alpha_min(alpha: Sequence[float]) -> float:
    return float(min(alpha)) if len(alpha) else math.inf


def check_scopes(config: RunConfig) -> List[str]:
    """Acceptance scopes a configuration activates.

    pair: a 2 x 2 matrix. regular and recurrent: some alpha vector of the grid has
    every entry >= 2, or some entry < 2.
    """
    scopes = []
    if config.n == 2:
        scopes.append("pair")
    mins = [_alpha_min(alpha) for alpha in _alpha_grid(config)]
    if any(m >= 2.0 for m in mins):
        scopes.append("regular")
    if any(m < 2.0 for m in mins):
        scopes.append("recurrent")
    return scopes


# -- trajectories -----------------------------------------------------------


def trajectory_frame(eigs: EigenPathSet, ranges: Sequence[MinorRange] = ()) -> pd.DataFrame:
    """Columns t, lambda_1..lambda_n and lambda_p_q_k for each extra range."""
    data: Dict[str, np.ndarray] = {"t": eigs.times}
    for i in range(eigs.n):
        data[f"lambda_{i + 1}"] = eigs.full[:, i]
    for r in ranges:
        if r.is_empty or r == MinorRange(1, eigs.n):
            continue
        values = eigs.spectra[r]
        for k in range(r.size):
            data[f"lambda_{r.p}_{r.q}_{k + 1}"] = values[:, k]
    return pd.DataFrame(data)


def simulate_study(config: RunConfig, threads: int = 1) -> List[pd.DataFrame]:
    sde = config.sde_config()
    ranges = _ranges(config)

    def one(index: int) -> pd.DataFrame:
        path = simulate_matrix_path(sde, index)
        eigs = eigen_paths(path, ranges, config.tol)
        logger.debug("path %d: %d grid times", index, len(eigs))
        return trajectory_frame(eigs, ranges)

    return map_indices(one, config.paths, threads)


# -- coefficient scans ------------------------------------------------------


@dataclass(frozen=True)
class CoefficientScan:
    identity_residual: float
    normalized_coefficient_max: float
    interaction_fraction_min: float
    interaction_fraction_max: float
    drift_form_gap: float
    two_by_two_drift_error: Optional[float]
    two_by_two_qv_error: Optional[float]
    interlacing_failures: int
    times: int
    absorbed: bool


def scan_coefficients(eigs: EigenPathSet) -> CoefficientScan:
    """Worst coefficient diagnostics of one eigenvalue path over its grid times."""
    residual = bound = gap = 0.0
    frac_lo, frac_hi = math.inf, -math.inf
    pair_drift: List[float] = []
    pair_qv: List[float] = []
    blocks = [p for p in range(1, eigs.n) if MinorRange(p, p + 1) in eigs.spectra]
    skipped = 0
    for s in range(len(eigs)):
        snap = eigs.snapshot(s)
        try:
            snap.require_simple()
            summary = coefficient_summary(snap)
            for i in range(1, eigs.n + 1):
                product = drift_at(snap, None, None, i)
                ito = ito_drift_at(snap, None, None, i)
                gap = max(gap, abs(product - ito) / max(1.0, abs(product)))
            for p in blocks:
                reduction = two_by_two_reduction(snap, p)
                scale = max(1.0, max(abs(d) for d in reduction.dyson_drift))
                pair_drift.append(reduction.drift_error / scale)
                pair_qv.append(reduction.qv_error)
        except CollisionError:
            skipped += 1
            continue
        residual = max(residual, summary["identity_residual"])
        bound = max(bound, summary["normalized_coefficient_max"])
        frac_lo = min(frac_lo, summary["interaction_fraction_min"])
        frac_hi = max(frac_hi, summary["interaction_fraction_max"])
    if skipped:
        logger.warning("%d grid times skipped: spectrum not simple", skipped)
    if frac_lo > frac_hi:
        frac_lo = frac_hi = math.nan
    return CoefficientScan(
        residual,
        bound,
        frac_lo,
        frac_hi,
        gap,
        _max(pair_drift),
        _max(pair_qv),
        len(eigs.interlacing_failures(strict=True)),
        len(eigs) - skipped,
        eigs.stopped_at is not None,
    )


def coefficient_study(config: RunConfig, threads: int = 1) -> Dict[str, Any]:
    sde = config.sde_config()

    def one(index: int) -> CoefficientScan:
        path = simulate_matrix_path(sde, index)
        return scan_coefficients(eigen_paths(path, all_ranges(sde.n), config.tol))

    scans = map_indices(one, config.paths, threads)
    metrics = {
        "paths": len(scans),
        "times_evaluated": sum(s.times for s in scans),
        "absorbed_paths": sum(s.absorbed for s in scans),
        "identity_residual_max": max(s.identity_residual for s in scans),
        "normalized_coefficient_max": max(s.normalized_coefficient_max for s in scans),
        "interaction_fraction_min": min(s.interaction_fraction_min for s in scans),
        "interaction_fraction_max": max(s.interaction_fraction_max for s in scans),
        "drift_form_gap_max": max(s.drift_form_gap for s in scans),
        "two_by_two_drift_error_max": _max(s.two_by_two_drift_error for s in scans),
        "two_by_two_qv_error_max": _max(s.two_by_two_qv_error for s in scans),
        "interlacing_failures": sum(s.interlacing_failures for s in scans),
    }
    return {k: v for k, v in metrics.items() if v is not None}


# -- pathwise convergence ---------------------------------------------------


def refined_discrepancies(sde: SdeConfig, index: int, factor: int = 2) -> Tuple[float, float, bool]:
    """(discrepancy at dt, discrepancy at dt / factor, truncated) on one Brownian path.

    The coarse increments are block sums of the fine ones.
    """
    fine_config = sde.model_copy(update={"dt": sde.dt / factor})
    fine_noise = make_noise(fine_config, index)
    coarse_noise = coarsen_noise(fine_noise, factor)
    out = []
    truncated = False
    for config, noise in ((sde, coarse_noise), (fine_config, fine_noise)):
        path = simulate_matrix_path(config, index, noise=noise)
        eigs = eigen_paths(path)
        integrated = integrate_sde_path(path, eig_paths=eigs)
        truncated = truncated or integrated.reason is not None
        out.append(integrated.discrepancy(eigs))
    return out[0], out[1], truncated


def convergence_study(config: RunConfig, threads: int = 1, factor: int = 2) -> Dict[str, Any]:
    sde = config.sde_config()
    results = map_indices(lambda i: refined_discrepancies(sde, i, factor), config.paths, threads)
    coarse = [r[0] for r in results]
    fine = [r[1] for r in results]
    improved = sum(f < c for c, f in zip(coarse, fine))
    return {
        "paths": len(results),
        "refine_factor": factor,
        "max_discrepancy": max(coarse),
        "fine_max_discrepancy": max(fine),
        "improved_count": improved,
        "improved_fraction": improved / len(results),
        "truncated_paths": sum(r[2] for r in results),
        "per_path": [{"coarse": c, "fine": f} for c, f in zip(coarse, fine)],
    }


# -- quadratic variation ----------------------------------------------------


def qv_study(config: RunConfig, threads: int = 1) -> Dict[str, Any]:
    """Realized covariation of the diagonalized spectrum against the integrated rates."""
    sde = config.sde_config()
    n = sde.n

    def one(index: int) -> Tuple[np.ndarray, np.ndarray, float]:
        path = simulate_matrix_path(sde, index)
        eigs = eigen_paths(path, tol=config.tol)
        span = float(eigs.times[-1] - eigs.times[0])
        return realized_covariation(eigs.full), integrated_qv_rate(eigs, path.dt), span

    results = map_indices(one, config.paths, threads)
    realized = np.stack([r[0] for r in results])
    integrated = np.stack([r[1] for r in results])
    spans = np.array([r[2] for r in results])

    diag_idx = np.arange(n)
    realized_mean = realized[:, diag_idx, diag_idx].mean(axis=0)
    integrated_mean = integrated[:, diag_idx, diag_idx].mean(axis=0)
    mean_rel = np.abs(realized_mean - integrated_mean) / np.maximum(integrated_mean, 1e-300)
    rel = np.abs(realized[:, diag_idx, diag_idx] - integrated[:, diag_idx, diag_idx]) / np.maximum(
        integrated[:, diag_idx, diag_idx], 1e-300
    )
    ratio = realized_mean / (2.0 * spans.mean())
    deficit = 2.0 * spans[:, None] - integrated[:, diag_idx, diag_idx]

    cross_z: List[float] = []
    cross_over_t: List[float] = []
    for i in range(n):
        for j in range(i + 1, n):
            diff = realized[:, i, j] - integrated[:, i, j]
            se = diff.std(ddof=1) / math.sqrt(diff.size) if diff.size > 1 else 0.0
            cross_z.append(abs(diff.mean()) / se if se > 0 else 0.0)
            cross_over_t.append(abs(realized[:, i, j].mean()) / spans.mean())
    metrics = {
        "paths": len(results),
        "diag_mean_relative_error_max": float(mean_rel.max()),
        "diag_relative_error_max": float(rel.max()),
        "diag_relative_error_mean": float(rel.mean()),
        "diag_ratio_to_2t_min": float(ratio.min()),
        "diag_ratio_to_2t_max": float(ratio.max()),
        "deficit_integral_mean": [float(v) for v in deficit.mean(axis=0)],
        "cross_z_max": _max(cross_z),
        "cross_over_t_max": _max(cross_over_t),
    }
    return {k: v for k, v in metrics.items() if v is not None}


# -- collisions -------------------------------------------------------------


def collision_row(config: RunConfig, alpha: Sequence[float], threads: int = 1) -> Dict[str, Any]:
    sde = config.sde_config(alpha)
    ranges = _ranges(config)

    def one(index: int):
        path = simulate_matrix_path(sde, index)
        eigs = eigen_paths(path, ranges, config.tol)
        report = detect_collisions(eigs, config.eps_col)
        return report, len(eigs.interlacing_failures(strict=True))

    results = map_indices(one, config.paths, threads)
    reports = [r[0] for r in results]
    gaps = [min(r.min_gaps.values()) for r in reports if r.min_gaps]
    return {
        "alpha": ",".join(f"{a:g}" for a in alpha),
        "alpha_min": _alpha_min(alpha),
        "paths": len(reports),
        "collided": sum(r.collided for r in reports),
        "absorbed": sum(r.absorbed for r in reports),
        "collided_fraction": sum(r.collided for r in reports) / len(reports),
        "absorbed_fraction": sum(r.absorbed for r in reports) / len(reports),
        "min_gap": _min(gaps),
        "interlacing_failures": sum(r[1] for r in results),
        "first_t_col_0": _min(r.t_col_0 for r in reports),
    }


def collision_study(config: RunConfig, threads: int = 1) -> Tuple[pd.DataFrame, Dict[str, Any]]:
    """One row per alpha vector; alpha >= 2 rows should show no collision or absorption."""
    grid = _alpha_grid(config)
    rows = [collision_row(config, alpha, threads) for alpha in grid]
    table = pd.DataFrame(rows)
    regular = [r for r in rows if r["alpha_min"] >= 2.0]
    recurrent = [r for r in rows if r["alpha_min"] < 2.0]
    metrics: Dict[str, Any] = {"rows": len(rows)}
    if regular:
        metrics["regular"] = {
            "collided": sum(r["collided"] for r in regular),
            "absorbed": sum(r["absorbed"] for r in regular),
            "interlacing_failures": sum(r["interlacing_failures"] for r in regular),
            "min_gap": _min(r["min_gap"] for r in regular),
        }
    if recurrent:
        metrics["recurrent"] = {
            "absorbed_fraction_min": min(r["absorbed_fraction"] for r in recurrent),
            "absorbed_fraction_max": max(r["absorbed_fraction"] for r in recurrent),
        }
    return table, metrics


# -- exact identities and GbE -----------------------------------------------


def identity_study(config: RunConfig) -> Tuple[List[Dict[str, Any]], Dict[str, Any]]:
    reports = run_identity_suite(config.identity_count, config.identity_max_size, config.seed)
    metrics: Dict[str, Any] = {
        "failures_total": sum(len(r.failures) for r in reports),
        "checks": len(reports),
    }
    for report in reports:
        metrics[report.name] = {
            "instances": report.instances,
            "failures": len(report.failures),
            "counterexamples": len(report.counterexamples),
        }
    return [r.as_dict() for r in reports], metrics


def gbe_study(config: RunConfig) -> Tuple[List[Dict[str, Any]], Dict[str, Any]]:
    gbe = config.gbe_config()
    reports = [
        trace_moment_check(gbe),
        gap_moment_check(gbe.model_copy(update={"n": 2})),
        time_slice_check(gbe.n, gbe.beta, max(gbe.samples, 2), gbe.seed),
    ]
    metrics: Dict[str, Any] = {}
    for report in reports:
        metrics[report.name] = {
            "failures": len(report.failures),
            "z_max": max(c.z_score for c in report.checks),
        }
    return [r.as_dict() for r in reports], metrics
