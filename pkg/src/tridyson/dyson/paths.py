"""Matrix paths H_alpha(t) and the eigenvalue paths of their principal minors.

Matrix and eigenvalue indices are 1-based throughout this subpackage so that
ranges read the same as the minors they name: (1, k-1), (k+1, n), (k+2, n).
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from tridyson.eig import (
    DEFAULT_TOL,
    Spectrum,
    check_interlacing,
    eigenvalues,
    eigenvalues_batch,
)
from tridyson.errors import CollisionError, DomainError, RangeError
from tridyson.sde import NoiseGrid, SdeConfig, make_noise, simulate_bessel
from tridyson.tridiag import MinorRange, SymTridiag, as_range, minor

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class MatrixPath:
    """Diagonal and off-diagonal of H_alpha on the retained grid times.

    diag is (T, n) and offdiag (T, n-1). stopped_at is the Bessel hitting time
    T_0 when the path was truncated there, None otherwise.
    """

    config: SdeConfig
    times: np.ndarray
    diag: np.ndarray
    offdiag: np.ndarray
    noise: NoiseGrid
    stopped_at: Optional[float] = None

    @property
    def n(self) -> int:
        return self.diag.shape[1]

    @property
    def dt(self) -> float:
        return self.noise.dt

    def __len__(self) -> int:
        return self.times.size

    def matrix(self, index: int) -> SymTridiag:
        return SymTridiag(tuple(self.diag[index]), tuple(self.offdiag[index]))

    @property
    def matrices(self) -> List[SymTridiag]:
        return [self.matrix(s) for s in range(len(self))]


def simulate_matrix_path(
    config: SdeConfig, path_index: int, noise: Optional[NoiseGrid] = None
) -> MatrixPath:
    """Build H_alpha on the grid from one noise draw.

    Passing `noise` (for instance a coarsened grid) overrides the increments
    derived from (config.seed, path_index). Absorption of a Bessel entry with
    alpha_k < 2 truncates the path after the last grid time before T_0.
    """
    noise = noise if noise is not None else make_noise(config, path_index)
    n = config.n
    start = np.zeros(n) if config.initial_diag is None else np.asarray(config.initial_diag)
    walk = np.vstack([np.zeros((1, n)), np.cumsum(noise.dB_diag, axis=0)])
    diag = start + math.sqrt(2.0) * walk
    times = noise.times

    if n == 1:
        return MatrixPath(config, times, diag, np.zeros((times.size, 0)), noise)

    bessel = simulate_bessel(
        np.asarray(config.x0, dtype=float),
        np.asarray(config.alpha, dtype=float),
        noise.dB_off,
        noise.dt,
        config.scheme,
        noise.transition_rng(),
    )
    offdiag = bessel.values
    stopped_at = bessel.first_absorption()
    if stopped_at is not None:
        keep = bessel.first_absorption_step() + 1
        logger.warning(
            "path %d: Bessel entry absorbed at t=%.6g, keeping %d of %d grid times",
            path_index,
            stopped_at,
            keep,
            times.size,
        )
        times, diag, offdiag = times[:keep], diag[:keep], offdiag[:keep]
    return MatrixPath(config, times, diag, offdiag, noise, stopped_at)


def drift_ranges(n: int, frame: Optional[Tuple[int, int]] = None) -> Tuple[MinorRange, ...]:
    """Every minor range the coefficient evaluators of `frame` read.

    For frame (p, q) these are (p, q) itself, the leading blocks (p, k-1) and
    the trailing blocks (k, q) for p <= k <= q + 1, empty ones included.
    """
    p, q = as_range(frame or (1, n)).validate(n)
    out = {MinorRange(p, q)}
    for k in range(p, q + 2):
        out.add(MinorRange(p, k - 1))
        out.add(MinorRange(k, q))
    return tuple(sorted(out))


def all_ranges(n: int) -> Tuple[MinorRange, ...]:
    """Every contiguous principal block of an n x n matrix, empty ones included."""
    out = set()
    for p in range(1, n + 1):
        out.update(drift_ranges(n, (p, n)))
    return tuple(sorted(out))


class EigenSnapshot:
    """Matrix and minor spectra at one time, in a local frame.

    A snapshot of the full matrix uses frame (1, n); `restrict(p, q)` returns the
    snapshot of the block H^{p,q}, in which every index is local to the block.
    The full spectrum can be swapped out (`with_full`) while the minor spectra
    stay those of the matrix.
    """

    def __init__(
        self,
        matrix: SymTridiag,
        spectra: Mapping[MinorRange, np.ndarray],
        alpha: Sequence[float] = (),
        offset: int = 0,
        full: Optional[np.ndarray] = None,
    ) -> None:
        self.matrix = matrix
        self._spectra = dict(spectra)
        self.alpha = tuple(float(a) for a in alpha)
        self.offset = offset
        self._full = None if full is None else np.asarray(full, dtype=float)

    @classmethod
    def of(
        cls,
        H: SymTridiag,
        alpha: Sequence[float] = (),
        ranges: Optional[Iterable[Sequence[int]]] = None,
        tol: float = DEFAULT_TOL,
    ) -> "EigenSnapshot":
        """Diagonalize the blocks of a single matrix (every block by default)."""
        ranges = all_ranges(H.n) if ranges is None else [as_range(r) for r in ranges]
        spectra: Dict[MinorRange, np.ndarray] = {}
        for r in ranges:
            r = r.validate(H.n)
            if r.is_empty:
                continue
            spectra[r] = eigenvalues(minor(H, r), tol).as_array()
        return cls(H, spectra, alpha)

    @property
    def n(self) -> int:
        return self.matrix.n

    @property
    def bessel(self) -> Tuple[float, ...]:
        return tuple(float(b) for b in self.matrix.offdiag)

    @property
    def full(self) -> np.ndarray:
        return self._full if self._full is not None else self.roots(1, self.n)

    def roots(self, p: int, q: int) -> np.ndarray:
        """Eigenvalues of the local block (p, q); empty for an empty range."""
        r = MinorRange(p, q).validate(self.n)
        if r.is_empty:
            return np.zeros(0)
        key = MinorRange(p + self.offset, q + self.offset)
        try:
            return self._spectra[key]
        except KeyError:
            raise RangeError(f"minor range {key.label()} was not diagonalized") from None

    def f(self, p: int, q: int, lam: float) -> float:
        """Characteristic polynomial of the local block (p, q) as a product over its roots."""
        return float(np.prod(lam - self.roots(p, q)))

    def restrict(self, p: int, q: int) -> "EigenSnapshot":
        p, q = MinorRange(p, q).validate(self.n)
        if q < p:
            raise RangeError("cannot restrict to an empty block")
        block = SymTridiag(self.matrix.diag[p - 1 : q], self.matrix.offdiag[p - 1 : q - 1])
        return EigenSnapshot(block, self._spectra, self.alpha[p - 1 : q - 1], self.offset + p - 1)

    def with_full(self, values: Sequence[float]) -> "EigenSnapshot":
        values = np.asarray(values, dtype=float)
        if values.shape != (self.n,):
            raise DomainError(f"full spectrum needs {self.n} values, got {values.shape}")
        return EigenSnapshot(self.matrix, self._spectra, self.alpha, self.offset, values)

    def spectrum(self) -> Spectrum:
        return Spectrum.of(self.full)

    def require_simple(self, floor: Optional[float] = None) -> None:
        """Raise CollisionError unless the full spectrum is simple above `floor`."""
        values = self.full
        if values.size < 2:
            return
        scale = max(1.0, float(values.max() - values.min()))
        floor = 1e-13 * scale if floor is None else floor
        gaps = np.abs(values[:, None] - values[None, :])[~np.eye(values.size, dtype=bool)]
        if gaps.min() <= floor:
            raise CollisionError(f"spectrum not simple: min gap {gaps.min():.3e}")


@dataclass(frozen=True)
class EigenPathSet:
    """Spectra of the tracked minor ranges at every retained time.

    spectra maps each range to a (T, size) array sorted along its rows.
    """

    times: np.ndarray
    diag: np.ndarray
    offdiag: np.ndarray
    spectra: Dict[MinorRange, np.ndarray]
    alpha: Tuple[float, ...] = ()
    tol: float = DEFAULT_TOL
    stopped_at: Optional[float] = None
    ranges: Tuple[MinorRange, ...] = field(init=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "ranges", tuple(sorted(self.spectra)))

    @property
    def n(self) -> int:
        return self.diag.shape[1]

    def __len__(self) -> int:
        return self.times.size

    @property
    def full(self) -> np.ndarray:
        return self.spectra[MinorRange(1, self.n)]

    def spectrum(self, index: int, r: Optional[Sequence[int]] = None) -> Spectrum:
        r = as_range(r or (1, self.n))
        return Spectrum(tuple(self.spectra[r][index]), self.tol)

    def matrix(self, index: int) -> SymTridiag:
        return SymTridiag(tuple(self.diag[index]), tuple(self.offdiag[index]))

    def snapshot(self, index: int) -> EigenSnapshot:
        spectra = {r: values[index] for r, values in self.spectra.items()}
        return EigenSnapshot(self.matrix(index), spectra, self.alpha)

    def interlacing_failures(
        self, strict: bool = True, min_offdiag: float = 1e-10
    ) -> List[Tuple[float, str, str]]:
        """(time, outer, inner) for every tracked one-row-smaller pair that fails.

        Strict checks are skipped at times where an off-diagonal inside the outer
        block is at most `min_offdiag`.
        """
        failures: List[Tuple[float, str, str]] = []
        tracked = set(self.ranges)
        for outer in self.ranges:
            if outer.size < 2:
                continue
            p, q = outer
            inner_ranges = [r for r in (MinorRange(p, q - 1), MinorRange(p + 1, q)) if r in tracked]
            for s in range(len(self)):
                if strict and np.min(np.abs(self.offdiag[s, p - 1 : q - 1])) <= min_offdiag:
                    continue
                big = self.spectrum(s, outer)
                for inner in inner_ranges:
                    if not check_interlacing(big, self.spectrum(s, inner), strict=strict):
                        failures.append((float(self.times[s]), outer.label(), inner.label()))
        return failures


def eigen_paths(
    path: MatrixPath,
    ranges: Optional[Iterable[Sequence[int]]] = None,
    tol: float = DEFAULT_TOL,
) -> EigenPathSet:
    """Diagonalize every tracked minor at every retained time.

    The ranges read by the full-matrix coefficient evaluators are always tracked;
    `ranges` adds more (use `all_ranges(n)` for every block).
    """
    n = path.n
    wanted = set(drift_ranges(n))
    for r in ranges or ():
        wanted.add(as_range(r).validate(n))
    spectra: Dict[MinorRange, np.ndarray] = {}
    for r in sorted(wanted):
        if r.is_empty:
            spectra[r] = np.zeros((len(path), 0))
            continue
        p, q = r
        spectra[r] = eigenvalues_batch(
            path.diag[:, p - 1 : q], path.offdiag[:, p - 1 : q - 1], tol
        )
    logger.debug("diagonalized %d ranges over %d times", len(spectra), len(path))
    return EigenPathSet(
        path.times,
        path.diag,
        path.offdiag,
        spectra,
        tuple(path.config.alpha),
        tol,
        path.stopped_at,
    )
