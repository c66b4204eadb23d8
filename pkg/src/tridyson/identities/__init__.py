"""Randomized certification of the determinant identities."""
from __future__ import annotations

import logging
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from tridyson.errors import DomainError
from tridyson.identities.exact import (
    IdentityReport,
    random_general_tridiagonal,
    random_matrix,
    random_symmetric,
    random_tridiag,
)
from tridyson.identities.lemmas import (
    check_adjacent_deleted_minor,
    check_charpoly_derivatives,
    check_cofactor_derivatives,
    check_gradient_identity,
    check_zero_pivot_scope,
    zero_pivot_counterexample,
)
from tridyson.identities.poly import RationalPoly
from tridyson.identities.toolkit import (
    check_cauchy_binet,
    check_laplacian,
    check_principal_minor_sums,
    check_root_drift,
    check_strict_interlacing,
    check_sylvester,
    check_twice_cofactor,
)

logger = logging.getLogger(__name__)

Factory = Callable[[np.random.Generator, int], Tuple[Any, ...]]


def _size(rng: np.random.Generator, low: int, high: int) -> int:
    return int(rng.integers(low, max(low, high) + 1))


def _tridiag(rng: np.random.Generator, max_size: int) -> Tuple[Any, ...]:
    return (random_tridiag(rng, _size(rng, 1, max_size)),)


def _tridiag_pairs(rng: np.random.Generator, max_size: int) -> Tuple[Any, ...]:
    return (random_tridiag(rng, _size(rng, 2, max_size + 1)),)


def _tridiag_coupled(rng: np.random.Generator, max_size: int) -> Tuple[Any, ...]:
    return (random_tridiag(rng, _size(rng, 2, max_size), nonzero_offdiag=True),)


def _tridiag_coupled_small(rng: np.random.Generator, max_size: int) -> Tuple[Any, ...]:
    return (random_tridiag(rng, _size(rng, 1, min(max_size, 5)), nonzero_offdiag=True),)


def _symmetric_four(rng: np.random.Generator, max_size: int) -> Tuple[Any, ...]:
    return (random_symmetric(rng, 4),)


def _symmetric(rng: np.random.Generator, max_size: int) -> Tuple[Any, ...]:
    return (random_symmetric(rng, _size(rng, 2, min(max_size, 5))),)


def _general_tridiagonal(rng: np.random.Generator, max_size: int) -> Tuple[Any, ...]:
    return (random_general_tridiagonal(rng, _size(rng, 3, max_size)),)


def _square(rng: np.random.Generator, max_size: int, low: int = 1) -> Tuple[Any, ...]:
    n = _size(rng, low, min(max_size, 5))
    return (random_matrix(rng, n, n),)


def _product_pair(rng: np.random.Generator, max_size: int) -> Tuple[Any, ...]:
    rows, inner, cols = (_size(rng, 1, min(max_size, 4)) for _ in range(3))
    return random_matrix(rng, rows, inner), random_matrix(rng, inner, cols)


CHECKS: Dict[str, Tuple[Factory, Callable[..., IdentityReport]]] = {
    "charpoly_derivatives": (_tridiag, check_charpoly_derivatives),
    "cofactor_derivatives": (_symmetric_four, check_cofactor_derivatives),
    "zero_pivot_scope": (_general_tridiagonal, check_zero_pivot_scope),
    "adjacent_deleted_minor": (_tridiag_pairs, check_adjacent_deleted_minor),
    "gradient_identity": (_tridiag, check_gradient_identity),
    "root_drift": (_tridiag_coupled, check_root_drift),
    "principal_minor_sums": (_square, check_principal_minor_sums),
    "twice_cofactor": (_symmetric, check_twice_cofactor),
    "cauchy_binet": (_product_pair, check_cauchy_binet),
    "sylvester": (lambda rng, m: _square(rng, m, low=2), check_sylvester),
    "strict_interlacing": (_tridiag_coupled, check_strict_interlacing),
    "laplacian": (_tridiag_coupled_small, check_laplacian),
}
FLOAT_CHECKS = ("root_drift", "strict_interlacing", "laplacian")
# Checks that always run at least this many instances, whatever the requested count.
MIN_INSTANCES = {"cofactor_derivatives": 200}


def instance_rng(seed: int, check_index: int, instance: int) -> np.random.Generator:
    """Independent stream per (seed, check, instance)."""
    return np.random.default_rng(
        np.random.SeedSequence(entropy=seed, spawn_key=(check_index, instance))
    )


def run_check(name: str, *instance: Any) -> IdentityReport:
    """Dispatch one instance to the named check."""
    if name not in CHECKS:
        raise DomainError(f"Unsupported identity check: {name}")
    return CHECKS[name][1](*instance)


def run_identity_suite(
    count: int = 100,
    max_size: int = 7,
    seed: int = 0,
    names: Optional[Sequence[str]] = None,
) -> List[IdentityReport]:
    """Run `count` random instances of each selected check."""
    if count < 1 or max_size < 1:
        raise DomainError("count and max_size must be positive")
    selected = list(CHECKS) if names is None else list(names)
    unknown = set(selected) - set(CHECKS)
    if unknown:
        raise DomainError(f"Unsupported identity checks: {sorted(unknown)}")
    reports: List[IdentityReport] = []
    for index, name in enumerate(CHECKS):
        if name not in selected:
            continue
        factory, _ = CHECKS[name]
        mode = "float" if name in FLOAT_CHECKS else "exact"
        total = IdentityReport(name, mode=mode)
        if name == "zero_pivot_scope":
            total.merge(zero_pivot_counterexample())
        for instance in range(max(count, MIN_INSTANCES.get(name, 0))):
            total.merge(run_check(name, *factory(instance_rng(seed, index, instance), max_size)))
        logger.info(
            "%s: %d instances, %d failures", name, total.instances, len(total.failures)
        )
        reports.append(total)
    return reports


def check_toolkit(count: int = 100, max_size: int = 5, seed: int = 0) -> List[IdentityReport]:
    """The supporting linear-algebra facts only."""
    return run_identity_suite(
        count,
        max_size,
        seed,
        names=(
            "root_drift",
            "principal_minor_sums",
            "twice_cofactor",
            "cauchy_binet",
            "sylvester",
            "strict_interlacing",
        ),
    )


__all__ = [
    "CHECKS",
    "IdentityReport",
    "RationalPoly",
    "check_adjacent_deleted_minor",
    "check_cauchy_binet",
    "check_charpoly_derivatives",
    "check_cofactor_derivatives",
    "check_gradient_identity",
    "check_laplacian",
    "check_principal_minor_sums",
    "check_root_drift",
    "check_strict_interlacing",
    "check_sylvester",
    "check_toolkit",
    "check_twice_cofactor",
    "check_zero_pivot_scope",
    "run_check",
    "run_identity_suite",
]
