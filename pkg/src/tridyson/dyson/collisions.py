"""First collision times of minor spectra and the Bessel hitting time."""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Dict, Optional

import numpy as np

from tridyson.dyson.paths import EigenPathSet
from tridyson.errors import DomainError

logger = logging.getLogger(__name__)

DEFAULT_EPS_COL = 1e-7


def _min(*values: Optional[float]) -> Optional[float]:
    present = [v for v in values if v is not None]
    return min(present) if present else None


@dataclass(frozen=True)
class CollisionReport:
    """Collision and absorption times of one path; None means not observed.

    t_col_all takes every tracked range with at least two eigenvalues,
    t_col only ranges with q - p > 1 (2 x 2 blocks collide only at T_0).
    """

    per_range: Dict[str, Optional[float]]
    min_gaps: Dict[str, float]
    t_col_all: Optional[float]
    t_col: Optional[float]
    t_0: Optional[float]
    eps_col: Optional[float]
    relative: bool = field(default=True)

    @property
    def t_col_0(self) -> Optional[float]:
        return _min(self.t_col, self.t_0)

    @property
    def collided(self) -> bool:
        return self.t_col_all is not None

    @property
    def absorbed(self) -> bool:
        return self.t_0 is not None

    def as_dict(self) -> Dict[str, object]:
        return {
            "per_range": dict(self.per_range),
            "min_gaps": dict(self.min_gaps),
            "t_col_all": self.t_col_all,
            "t_col": self.t_col,
            "t_0": self.t_0,
            "t_col_0": self.t_col_0,
            "eps_col": self.eps_col,
            "relative": self.relative,
        }


def detect_collisions(eigs: EigenPathSet, eps_col: Optional[float] = None) -> CollisionReport:
    """Scan every tracked range for the first grid time a gap drops below eps_col.

    With eps_col None the threshold is DEFAULT_EPS_COL times the full spectral
    diameter at each time; an explicit eps_col is absolute.
    """
    if eps_col is not None and eps_col <= 0:
        raise DomainError(f"eps_col must be positive, got {eps_col}")
    full = eigs.full
    if eps_col is None:
        diameter = full[:, -1] - full[:, 0] if full.shape[1] else np.zeros(len(eigs))
        threshold = DEFAULT_EPS_COL * np.maximum(diameter, np.finfo(float).tiny)
    else:
        threshold = np.full(len(eigs), float(eps_col))

    per_range: Dict[str, Optional[float]] = {}
    min_gaps: Dict[str, float] = {}
    t_all: Optional[float] = None
    t_col: Optional[float] = None
    for r in eigs.ranges:
        if r.size < 2:
            continue
        gaps = np.diff(eigs.spectra[r], axis=1).min(axis=1)
        min_gaps[r.label()] = float(gaps.min())
        hits = np.flatnonzero(gaps < threshold)
        first = float(eigs.times[hits[0]]) if hits.size else None
        per_range[r.label()] = first
        t_all = _min(t_all, first)
        if r.q - r.p > 1:
            t_col = _min(t_col, first)
    if t_all is not None:
        logger.warning("eigenvalue collision at t=%.6g", t_all)
    return CollisionReport(
        per_range,
        min_gaps,
        t_all,
        t_col,
        eigs.stopped_at,
        eps_col,
        relative=eps_col is None,
    )
