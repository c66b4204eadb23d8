"""Test the eigenvalue SDE coefficients, paths, collisions and integration."""
import json
from pathlib import Path

import numpy as np
import pytest

from tridyson.dyson import (
    EigenSnapshot,
    all_ranges,
    coefficient_summary,
    detect_collisions,
    diffusion_coeffs_at,
    drift_at,
    drift_ranges,
    eigen_paths,
    identity_residual_at,
    integrate_sde_path,
    integrated_qv_rate,
    interaction_derivative,
    interaction_fraction,
    ito_drift_at,
    qv_deficit_rate_at,
    qv_rate_at,
    realized_covariation,
    simulate_matrix_path,
    two_by_two_reduction,
)
from tridyson.errors import CollisionError, DomainError, RangeError
from tridyson.sde import SdeConfig
from tridyson.tridiag import MinorRange, SymTridiag

VECTORS = Path(__file__).parent / "test_vectors" / "dyson"


def _vector(name):
    with open(VECTORS / name, "r", encoding="utf-8") as handle:
        case = json.load(handle)
    H = SymTridiag(case["diag"], case["offdiag"])
    return case, EigenSnapshot.of(H, case.get("alpha", ()))


def _random_snapshot(n, seed, alpha=None):
    rng = np.random.default_rng(seed)
    H = SymTridiag(tuple(rng.normal(size=n)), tuple(np.abs(rng.normal(size=n - 1)) + 0.1))
    alpha = alpha if alpha is not None else tuple(rng.uniform(0.5, 4.0, size=n - 1))
    return EigenSnapshot.of(H, alpha)


def test_two_by_two_coefficients():
    """n = 2 reduces to Dyson's model with beta = alpha."""
    case, snap = _vector("two_by_two.json")
    assert snap.full == pytest.approx(case["eigenvalues"], abs=1e-10)
    drift = [drift_at(snap, None, None, i) for i in (1, 2)]
    assert drift == pytest.approx(case["drift"], abs=1e-9)
    coeffs = diffusion_coeffs_at(snap, None, 1)
    assert coeffs.diag == pytest.approx(case["diffusion_diag_lambda_1"], abs=1e-9)
    assert coeffs.off == pytest.approx(case["diffusion_off_lambda_1"], abs=1e-9)
    qv = [[qv_rate_at(snap, None, i, j) for j in (1, 2)] for i in (1, 2)]
    assert np.asarray(qv) == pytest.approx(np.asarray(case["qv"]), abs=1e-9)
    assert identity_residual_at(snap, None, 1) == pytest.approx(case["identity_residual"], abs=1e-12)


def test_three_by_three_coefficients():
    """Drift, quadratic variation and interaction fraction of a 3 x 3 by hand."""
    case, snap = _vector("constant_three.json")
    for i in (1, 2, 3):
        assert drift_at(snap, None, None, i) == pytest.approx(case["drift"][i - 1], abs=1e-8)
        assert interaction_fraction(snap, i) == pytest.approx(
            case["interaction_fraction"][i - 1], abs=1e-9
        )
        for j in (1, 2, 3):
            assert qv_rate_at(snap, None, i, j) == pytest.approx(case["qv"][i - 1][j - 1], abs=1e-8)


@pytest.mark.parametrize("n,seed", [(3, 1), (4, 2), (5, 3), (6, 4)])
def test_qv_matches_coefficient_products(n, seed):
    """d<lambda_i, lambda_j>/dt is the inner product of the diffusion vectors."""
    snap = _random_snapshot(n, seed)
    vectors = [diffusion_coeffs_at(snap, None, i).as_vector() for i in range(1, n + 1)]
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            expected = float(np.dot(vectors[i - 1], vectors[j - 1]))
            assert qv_rate_at(snap, None, i, j) == pytest.approx(expected, rel=1e-7, abs=1e-9)


@pytest.mark.parametrize("n,seed", [(3, 11), (4, 12), (5, 13)])
def test_drift_sums_to_zero(n, seed):
    """The trace is a Brownian motion, so the drifts sum to zero."""
    snap = _random_snapshot(n, seed)
    total = sum(drift_at(snap, None, None, i) for i in range(1, n + 1))
    assert total == pytest.approx(0.0, abs=1e-7)


@pytest.mark.parametrize("n,seed", [(2, 21), (3, 22), (5, 23)])
def test_drift_forms_agree(n, seed):
    """Product and log forms, and the Ito rebuild, give the same drift."""
    snap = _random_snapshot(n, seed)
    for i in range(1, n + 1):
        product = drift_at(snap, None, None, i)
        assert drift_at(snap, None, None, i, form="log") == pytest.approx(product, rel=1e-8, abs=1e-8)
        assert ito_drift_at(snap, None, None, i) == pytest.approx(product, rel=1e-7, abs=1e-7)


@pytest.mark.parametrize("n,seed", [(3, 31), (4, 32), (6, 33)])
def test_coefficient_summary_bounds(n, seed):
    """Identity residual vanishes and every normalized coefficient stays in [-1, 1]."""
    summary = coefficient_summary(_random_snapshot(n, seed))
    assert summary["identity_residual"] < 1e-9
    assert summary["normalized_coefficient_max"] <= 1.0 + 1e-9
    assert summary["interaction_fraction_min"] >= -1e-12
    assert summary["interaction_fraction_max"] <= 1.0 + 1e-9


def test_qv_deficit_is_twice_interaction_fraction():
    """The deficit against Dyson's 2 dt is what qv_rate_at loses."""
    snap = _random_snapshot(4, 41)
    for i in range(1, 5):
        assert qv_deficit_rate_at(snap, i) == pytest.approx(2.0 - qv_rate_at(snap, None, i, i))


def test_interaction_derivative_at_root_coincidence():
    """At a minor root the product rule is used and the log form refuses."""
    H = SymTridiag((0.0, 0.0, 0.0), (1.0, 1.0))
    snap = EigenSnapshot.of(H, (2.0, 2.0))
    # roots of f(2, 3) are -1 and 1
    value = interaction_derivative(snap, 1, 3, 1.0)
    assert value == pytest.approx(0.0, abs=1e-9)
    with pytest.raises(CollisionError):
        interaction_derivative(snap, 1, 3, 1.0, form="log")
    with pytest.raises(DomainError):
        interaction_derivative(snap, 1, 2, 1.0)


def test_repeated_eigenvalue_raises():
    """Coefficients need a simple spectrum."""
    H = SymTridiag((1.0, 1.0), (0.0,))
    snap = EigenSnapshot.of(H, (3.0,))
    with pytest.raises(CollisionError):
        drift_at(snap, None, None, 1)


def test_index_and_shape_checks():
    """Out-of-range eigenvalue indices and bad Bessel vectors are rejected."""
    _, snap = _vector("two_by_two.json")
    with pytest.raises(RangeError):
        drift_at(snap, None, None, 3)
    with pytest.raises(DomainError):
        diffusion_coeffs_at(snap, (1.0, 2.0), 1)
    with pytest.raises(DomainError):
        diffusion_coeffs_at(snap, (-1.0,), 1)


def test_two_by_two_blocks_reduce_to_dyson():
    """Every 2 x 2 block of a larger matrix follows Dyson's SDE at beta = alpha_p."""
    snap = _random_snapshot(4, 51, alpha=(1.5, 3.0, 2.5))
    for p in (1, 2, 3):
        block = two_by_two_reduction(snap, p)
        assert block.alpha == snap.alpha[p - 1]
        assert block.drift_error < 1e-8
        assert block.qv_error < 1e-8


def test_ranges():
    """drift_ranges covers the leading and trailing blocks, empty ones included."""
    ranges = drift_ranges(3)
    assert MinorRange(1, 3) in ranges
    assert MinorRange(1, 0) in ranges
    assert MinorRange(4, 3) in ranges
    assert MinorRange(2, 3) in ranges
    assert MinorRange(2, 2) not in ranges
    assert MinorRange(2, 2) in all_ranges(3)


def _path(n=3, alpha=None, x0=None, dt=1e-3, t_end=0.05, **extra):
    config = SdeConfig(
        n=n,
        alpha=alpha if alpha is not None else (3.0,) * (n - 1),
        x0=x0 if x0 is not None else (1.0,) * (n - 1),
        dt=dt,
        t_end=t_end,
        seed=9,
        **extra,
    )
    return simulate_matrix_path(config, 0)


def test_matrix_path_start_and_determinism():
    """H(0) has the configured entries and reruns are identical."""
    path = _path(initial_diag=(0.0, 0.0, 0.0))
    assert path.diag[0] == pytest.approx([0.0, 0.0, 0.0])
    assert path.offdiag[0] == pytest.approx([1.0, 1.0])
    assert len(path) == 51
    again = _path(initial_diag=(0.0, 0.0, 0.0))
    assert np.array_equal(path.diag, again.diag)
    assert np.array_equal(path.offdiag, again.offdiag)


def test_eigen_paths_start_spectrum():
    """The tracked full spectrum at t = 0 is that of H(0)."""
    eigs = eigen_paths(_path())
    assert eigs.full[0] == pytest.approx([-2.0**0.5, 0.0, 2.0**0.5], abs=1e-10)
    assert eigs.interlacing_failures() == []


def test_collision_at_start():
    """Equal diagonals with zero off-diagonals collide at t = 0."""
    eigs = eigen_paths(_path(x0=(0.0, 0.0)))
    report = detect_collisions(eigs)
    assert report.collided
    assert report.t_col_all == 0.0
    assert report.t_col == 0.0
    assert not report.absorbed
    assert report.as_dict()["t_col_0"] == 0.0


def test_no_collision_and_eps_validation():
    """A separated path reports no collision; eps_col must be positive."""
    eigs = eigen_paths(_path())
    report = detect_collisions(eigs, eps_col=1e-9)
    assert not report.collided
    assert report.t_col_0 is None
    assert not report.relative
    with pytest.raises(DomainError):
        detect_collisions(eigs, eps_col=0.0)


def test_absorption_truncates_path():
    """alpha < 2 from a small start stops the path at the Bessel hitting time."""
    path = _path(n=2, alpha=(0.5,), x0=(1e-3,), dt=1e-3, t_end=1.0)
    assert path.stopped_at is not None
    assert len(path) < 1001
    report = detect_collisions(eigen_paths(path))
    assert report.absorbed
    assert report.t_col is None
    assert report.t_col_0 == report.t_0


def test_integrator_tracks_diagonalization():
    """Euler-Maruyama on the eigenvalue SDEs stays close to the diagonalized path."""
    path = _path(n=3, dt=1e-4, t_end=0.05)
    eigs = eigen_paths(path)
    integrated = integrate_sde_path(path, eig_paths=eigs)
    assert integrated.values.shape == eigs.full.shape
    assert integrated.values[0] == pytest.approx(eigs.full[0])
    assert integrated.truncated_at is None
    assert integrated.discrepancy(eigs) < 0.05


def test_integrated_qv_for_two_by_two():
    """For n = 2 the rates are exactly 2 on the diagonal and 0 across."""
    path = _path(n=2, dt=1e-3, t_end=0.02)
    total = integrated_qv_rate(eigen_paths(path), path.dt)
    assert total == pytest.approx(np.diag([0.04, 0.04]), abs=1e-9)


def test_realized_covariation():
    """Sum of outer products of increments."""
    values = np.array([[0.0, 0.0], [1.0, 2.0], [0.0, 4.0]])
    assert realized_covariation(values) == pytest.approx(np.array([[2.0, 0.0], [0.0, 8.0]]))
