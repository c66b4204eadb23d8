"""Random rational instances and the report every identity check fills."""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, List

import numpy as np

from tridyson.tridiag import RationalTridiag, SymTridiag

logger = logging.getLogger(__name__)

NUMERATOR_BOUND = 20
DENOMINATOR_BOUND = 10


@dataclass
class IdentityReport:
    name: str
    mode: str = "exact"
    instances: int = 0
    failures: List[Dict[str, Any]] = field(default_factory=list)
    notes: List[str] = field(default_factory=list)
    counterexamples: List[Dict[str, Any]] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures

    def record(self, ok: bool, matrix: Any, detail: str) -> bool:
        """Count one comparison; keep the full matrix when it fails."""
        if not ok:
            self.failures.append({"matrix": format_matrix(matrix), "detail": detail})
            logger.warning("%s failed: %s on %s", self.name, detail, format_matrix(matrix))
        return ok

    def tick(self) -> None:
        self.instances += 1

    def merge(self, other: "IdentityReport") -> "IdentityReport":
        if other.name != self.name:
            raise ValueError(f"cannot merge {other.name} into {self.name}")
        self.instances += other.instances
        self.failures.extend(other.failures)
        self.notes.extend(n for n in other.notes if n not in self.notes)
        self.counterexamples.extend(other.counterexamples)
        return self

    def as_dict(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "mode": self.mode,
            "instances": self.instances,
            "failure_count": len(self.failures),
            "failures": list(self.failures),
            "notes": list(self.notes),
            "counterexamples": list(self.counterexamples),
            "passed": self.passed,
        }


def format_matrix(matrix: Any) -> Any:
    """JSON-friendly rendering of a matrix, tridiagonal or dense."""
    if isinstance(matrix, SymTridiag):
        return {
            "diag": [str(v) for v in matrix.diag],
            "offdiag": [str(v) for v in matrix.offdiag],
        }
    if isinstance(matrix, (list, tuple)):
        return [format_matrix(m) for m in matrix]
    arr = np.asarray(matrix, dtype=object)
    return [[str(v) for v in row] for row in arr.tolist()]


def random_rational(rng: np.random.Generator, nonzero: bool = False) -> Fraction:
    """Numerator uniform in [-20, 20], denominator in [1, 10]."""
    while True:
        num = int(rng.integers(-NUMERATOR_BOUND, NUMERATOR_BOUND + 1))
        if num != 0 or not nonzero:
            break
    return Fraction(num, int(rng.integers(1, DENOMINATOR_BOUND + 1)))


def random_tridiag(
    rng: np.random.Generator, n: int, nonzero_offdiag: bool = False
) -> RationalTridiag:
    diag = [random_rational(rng) for _ in range(n)]
    offdiag = [random_rational(rng, nonzero_offdiag) for _ in range(max(n - 1, 0))]
    return RationalTridiag(tuple(diag), tuple(offdiag))


def random_matrix(rng: np.random.Generator, rows: int, cols: int) -> np.ndarray:
    out = np.empty((rows, cols), dtype=object)
    for i in range(rows):
        for j in range(cols):
            out[i, j] = random_rational(rng)
    return out


def random_symmetric(rng: np.random.Generator, n: int) -> np.ndarray:
    out = random_matrix(rng, n, n)
    for i in range(n):
        for j in range(i):
            out[i, j] = out[j, i]
    return out


def random_general_tridiagonal(rng: np.random.Generator, n: int) -> np.ndarray:
    """Dense (not necessarily symmetric) tridiagonal with rational entries."""
    out = np.full((n, n), Fraction(0), dtype=object)
    for i in range(n):
        for j in range(max(i - 1, 0), min(i + 2, n)):
            out[i, j] = random_rational(rng)
    return out
