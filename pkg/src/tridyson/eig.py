"""Sturm-sequence bisection eigensolver and interlacing checks."""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np

from tridyson.errors import ConvergenceError, DomainError
from tridyson.tridiag import (
    Number,
    SymTridiag,
    charpoly_eval,
    deleted_minor_det,
    pair_deleted_minor_det,
)

logger = logging.getLogger(__name__)

DEFAULT_TOL = 1e-12
MAX_BISECTIONS = 200
_TINY = np.finfo(float).tiny


@dataclass(frozen=True)
class Spectrum:
    """Eigenvalues in ascending order together with the solver tolerance."""

    values: Tuple[float, ...]
    tol: float = 0.0

    def __post_init__(self) -> None:
        values = tuple(float(v) for v in self.values)
        if any(b < a for a, b in zip(values, values[1:])):
            raise ValueError("spectrum values must be ascending")
        object.__setattr__(self, "values", values)

    @classmethod
    def of(cls, values: Iterable[float], tol: float = 0.0) -> "Spectrum":
        return cls(tuple(sorted(float(v) for v in values)), tol)

    def __len__(self) -> int:
        return len(self.values)

    def __getitem__(self, i: int) -> float:
        return self.values[i]

    def as_array(self) -> np.ndarray:
        return np.asarray(self.values, dtype=float)

    @property
    def diameter(self) -> float:
        return self.values[-1] - self.values[0] if self.values else 0.0

    @property
    def min_gap(self) -> float:
        if len(self.values) < 2:
            return math.inf
        return min(b - a for a, b in zip(self.values, self.values[1:]))


def _sturm_counts(
    diag: np.ndarray, offdiag: np.ndarray, points: np.ndarray
) -> np.ndarray:
    """Eigenvalues strictly below each point, batched over matrices.

    diag is (T, n), offdiag (T, n-1) and points (T, m); the result is (T, m).
    Exact zero ratios count as negative, i.e. the point is read as lam - 0.
    """
    n = diag.shape[1]
    b2 = offdiag**2
    pivmin = _TINY * np.maximum(1.0, b2.max(axis=1, initial=0.0))[:, None]
    counts = np.zeros(points.shape, dtype=np.int64)
    prev = np.ones(points.shape)
    with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
        for k in range(n):
            ratio = points - diag[:, k : k + 1]
            if k > 0:
                ratio = ratio - b2[:, k - 1 : k] / prev
            ratio = np.where(ratio == 0.0, -pivmin, ratio)
            counts += ratio > 0.0
            prev = ratio
    return counts


def _gershgorin(diag: np.ndarray, offdiag: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    radius = np.zeros_like(diag)
    absb = np.abs(offdiag)
    radius[:, :-1] += absb
    radius[:, 1:] += absb
    lo = (diag - radius).min(axis=1)
    hi = (diag + radius).max(axis=1)
    pad = 2.0 * np.finfo(float).eps * np.maximum(np.abs(lo), np.abs(hi)) + _TINY
    return lo - pad, hi + pad


def eigenvalues_batch(
    diag: np.ndarray, offdiag: np.ndarray, tol: float = DEFAULT_TOL
) -> np.ndarray:
    """All eigenvalues of a stack of symmetric tridiagonals, ascending per row."""
    if tol <= 0:
        raise DomainError(f"tol must be positive, got {tol}")
    diag = np.atleast_2d(np.asarray(diag, dtype=float))
    T, n = diag.shape
    offdiag = np.asarray(offdiag, dtype=float).reshape(T, max(n - 1, 0))
    if n == 0:
        return np.zeros((T, 0))
    lo, hi = _gershgorin(diag, offdiag)
    lower = np.repeat(lo[:, None], n, axis=1)
    upper = np.repeat(hi[:, None], n, axis=1)
    index = np.arange(n)[None, :]
    for _ in range(MAX_BISECTIONS):
        mid = 0.5 * (lower + upper)
        done = (upper - lower <= tol) | (mid <= lower) | (mid >= upper)
        if done.all():
            return 0.5 * (lower + upper)
        above = _sturm_counts(diag, offdiag, mid) > index
        upper = np.where(~done & above, mid, upper)
        lower = np.where(~done & ~above, mid, lower)
    worst = float((upper - lower).max())
    raise ConvergenceError(
        f"bisection did not reach tol={tol} after {MAX_BISECTIONS} steps "
        f"(widest bracket {worst:.3e})"
    )


def eigenvalues(H: SymTridiag, tol: float = DEFAULT_TOL) -> Spectrum:
    """Spectrum of H by Sturm-count bisection from Gershgorin bounds."""
    if H.n == 0:
        return Spectrum((), tol)
    values = eigenvalues_batch(
        np.asarray(H.diag, dtype=float)[None, :],
        np.asarray(H.offdiag, dtype=float)[None, :],
        tol,
    )[0]
    return Spectrum(tuple(np.sort(values)), tol)


def sturm_count(H: SymTridiag, lam: float) -> int:
    """Number of eigenvalues of H strictly below lam."""
    if H.n == 0:
        return 0
    counts = _sturm_counts(
        np.asarray(H.diag, dtype=float)[None, :],
        np.asarray(H.offdiag, dtype=float)[None, :],
        np.array([[float(lam)]]),
    )
    return int(counts[0, 0])


def charpoly_derivs_at(eigs: Sequence[float], lam: float) -> Tuple[float, float, float]:
    """(f, f', f'') at lam from the product over the eigenvalues."""
    diffs = [lam - mu for mu in (eigs.values if isinstance(eigs, Spectrum) else eigs)]
    n = len(diffs)
    f = math.prod(diffs)
    f1 = 0.0
    f2 = 0.0
    for r in range(n):
        rest = diffs[:r] + diffs[r + 1 :]
        f1 += math.prod(rest)
        for s in range(r + 1, n):
            f2 += math.prod(d for t, d in enumerate(diffs) if t not in (r, s))
    return f, f1, 2.0 * f2


def charpoly_derivs_from_minors(H: SymTridiag, lam: Number) -> Tuple[Number, Number, Number]:
    """(f, f', f'') at lam as sums of deleted and pair-deleted minors."""
    f = charpoly_eval(H, lam)
    f1 = sum((deleted_minor_det(H, lam, k, k) for k in range(1, H.n + 1)), H.zero())
    f2 = H.zero()
    for k in range(1, H.n + 1):
        for l in range(k + 1, H.n + 1):
            f2 = f2 + pair_deleted_minor_det(H, lam, k, l)
    return f, f1, 2 * f2


@dataclass
class InterlacingReport:
    passed: bool
    strict: bool
    gap_tol: float
    min_margin: float
    violations: List[Tuple[int, str]] = field(default_factory=list)

    def __bool__(self) -> bool:
        return self.passed


def check_interlacing(
    outer: Spectrum,
    inner: Spectrum,
    strict: bool = False,
    gap_tol: Optional[float] = None,
) -> InterlacingReport:
    """Check lam_k <= eta_k <= lam_{k+1} (strictly, with margin, if requested)."""
    if len(inner) != len(outer) - 1:
        raise DomainError(
            f"inner spectrum must have {len(outer) - 1} values, got {len(inner)}"
        )
    if gap_tol is None:
        gap_tol = 1e-12 * outer.diameter
    slack = max(outer.tol, inner.tol)
    violations: List[Tuple[int, str]] = []
    margin = math.inf
    for k, eta in enumerate(inner.values):
        below, above = eta - outer[k], outer[k + 1] - eta
        margin = min(margin, below, above)
        if strict:
            if below <= gap_tol:
                violations.append((k + 1, "eta too close to lower eigenvalue"))
            if above <= gap_tol:
                violations.append((k + 1, "eta too close to upper eigenvalue"))
        else:
            if below < -slack:
                violations.append((k + 1, "eta below lower eigenvalue"))
            if above < -slack:
                violations.append((k + 1, "eta above upper eigenvalue"))
    return InterlacingReport(not violations, strict, gap_tol, margin, violations)
