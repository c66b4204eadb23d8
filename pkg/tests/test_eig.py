"""Test the bisection eigensolver and the interlacing checks."""
import json
import math
from pathlib import Path

import numpy as np
import pytest

from tridyson.eig import (
    Spectrum,
    charpoly_derivs_at,
    charpoly_derivs_from_minors,
    check_interlacing,
    eigenvalues,
    eigenvalues_batch,
    sturm_count,
)
from tridyson.errors import DomainError
from tridyson.tridiag import RationalTridiag, SymTridiag

with open(Path(__file__).parent / "test_vectors" / "eig" / "spectra.json", "r", encoding="utf-8") as handle:
    VECTORS = json.load(handle)


@pytest.mark.parametrize("case", VECTORS["spectra"])
def test_spectrum_vectors(case):
    """Bisection reproduces known spectra to the tolerance."""
    spectrum = eigenvalues(SymTridiag(case["diag"], case["offdiag"]))
    assert spectrum.values == pytest.approx(case["eigenvalues"], abs=1e-10)


@pytest.mark.parametrize("case", VECTORS["sturm"])
def test_sturm_vectors(case):
    """Sturm counts the eigenvalues strictly below a point."""
    H = SymTridiag(case["diag"], case["offdiag"])
    assert sturm_count(H, case["lam"]) == case["count"]


@pytest.mark.parametrize("case", VECTORS["interlacing"])
def test_interlacing_vectors(case):
    """Interlacing verdicts, weak and strict."""
    report = check_interlacing(
        Spectrum.of(case["outer"]), Spectrum.of(case["inner"]), strict=case["strict"]
    )
    assert report.passed is case["passed"]
    assert bool(report) is case["passed"]


@pytest.mark.parametrize("n", [1, 2, 5, 12])
def test_free_tridiagonal_spectrum(n):
    """Zero diagonal, unit off-diagonal has eigenvalues 2 cos(k pi / (n + 1))."""
    H = SymTridiag((0.0,) * n, (1.0,) * (n - 1))
    expected = sorted(2.0 * math.cos(k * math.pi / (n + 1)) for k in range(1, n + 1))
    assert eigenvalues(H).values == pytest.approx(expected, abs=1e-10)


def test_batch_matches_numpy():
    """Batched bisection agrees with LAPACK on random matrices."""
    rng = np.random.default_rng(7)
    diag = rng.normal(size=(6, 5))
    offdiag = np.abs(rng.normal(size=(6, 4)))
    values = eigenvalues_batch(diag, offdiag)
    for s in range(6):
        dense = SymTridiag(tuple(diag[s]), tuple(offdiag[s])).dense()
        assert values[s] == pytest.approx(np.linalg.eigvalsh(dense), abs=1e-9)


def test_zero_offdiag_repeated_eigenvalue():
    """A reducible matrix with a repeated eigenvalue still bisects."""
    H = SymTridiag((1.0, 1.0, 2.0), (0.0, 0.0))
    assert eigenvalues(H).values == pytest.approx((1.0, 1.0, 2.0), abs=1e-10)


def test_empty_matrix():
    """Size 0 has the empty spectrum and no eigenvalue below anything."""
    H = SymTridiag((), ())
    assert len(eigenvalues(H)) == 0
    assert sturm_count(H, 0.0) == 0


def test_nonpositive_tol_rejected():
    """The bisection tolerance must be positive."""
    with pytest.raises(DomainError):
        eigenvalues(SymTridiag((1.0,), ()), tol=0.0)


def test_spectrum_properties():
    """Spectrum keeps ascending order and reports diameter and gap."""
    spectrum = Spectrum.of([3.0, -1.0, 0.5])
    assert spectrum.values == (-1.0, 0.5, 3.0)
    assert spectrum.diameter == 4.0
    assert spectrum.min_gap == 1.5
    with pytest.raises(ValueError):
        Spectrum((2.0, 1.0))


def test_charpoly_derivs_at_root():
    """f vanishes at an eigenvalue and f' is the product of the other gaps."""
    f, f1, f2 = charpoly_derivs_at((1.0, 2.0, 3.0), 2.0)
    assert f == 0.0
    assert f1 == pytest.approx(-1.0)
    assert f2 == pytest.approx(0.0)


def test_root_drift_ratio():
    """f''/f' at a simple root is twice the sum of reciprocal gaps."""
    _, f1, f2 = charpoly_derivs_at((0.0, 1.0, 3.0), 1.0)
    assert f2 / f1 == pytest.approx(1.0)


def test_derivs_from_minors_exact():
    """Minor sums give the same derivatives as the eigenvalue product."""
    H = RationalTridiag((0, 0, 0), (1, 1))
    f, f1, f2 = charpoly_derivs_from_minors(H, 2)
    # f = lam^3 - 2 lam
    assert (f, f1, f2) == (4, 10, 12)


def test_interlacing_size_mismatch():
    """Inner spectrum must be one shorter than the outer one."""
    with pytest.raises(DomainError):
        check_interlacing(Spectrum.of([0.0, 1.0]), Spectrum.of([0.0, 1.0]))


def test_random_tridiagonals_against_dense_solver():
    """1000 random tridiagonals: LAPACK agreement and Sturm brackets around each eigenvalue."""
    rng = np.random.default_rng(2024)
    tol = 1e-12
    checked = 0
    for n in range(1, 13):
        count = 84 if n <= 4 else 83
        diag = rng.uniform(-10.0, 10.0, size=(count, n))
        offdiag = rng.uniform(-10.0, 10.0, size=(count, n - 1))
        values = eigenvalues_batch(diag, offdiag, tol)
        for s in range(count):
            H = SymTridiag(tuple(diag[s]), tuple(offdiag[s]))
            dense = np.linalg.eigvalsh(H.dense())
            scale = max(dense[-1] - dense[0], 1.0)
            assert np.max(np.abs(np.sort(values[s]) - dense)) <= 1e-10 * scale
            for k, lam in enumerate(np.sort(values[s])):
                assert sturm_count(H, lam - 2 * tol) <= k
                assert sturm_count(H, lam + 2 * tol) >= k + 1
            checked += 1
    assert checked == 1000
