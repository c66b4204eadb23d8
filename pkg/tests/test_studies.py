"""Test the ensemble studies behind the verification commands."""
import pytest

from tridyson.config import RunConfig
from tridyson.studies import check_scopes, collision_study, map_indices, qv_study


def _config(**overrides):
    values = dict(n=3, alpha=(3.0, 3.0), x0=(1.0, 1.0), dt=1e-3, t_end=0.25, paths=50, seed=0)
    values.update(overrides)
    return RunConfig(**values)


def test_qv_error_is_averaged_over_paths():
    """Averaging over 50 paths brings realized quadratic variation within 10% of the rate."""
    metrics = qv_study(_config())
    assert metrics["paths"] == 50
    assert metrics["diag_mean_relative_error_max"] <= 0.1
    assert metrics["diag_mean_relative_error_max"] <= metrics["diag_relative_error_max"]
    assert metrics["diag_ratio_to_2t_max"] <= 1.1


def test_qv_pair_matches_two_t():
    """For 2 x 2 matrices each eigenvalue has variation 2t and no cross-variation."""
    metrics = qv_study(_config(n=2, alpha=(3.0,), x0=(1.0,), dt=2e-4))
    assert 0.9 <= metrics["diag_ratio_to_2t_min"] <= metrics["diag_ratio_to_2t_max"] <= 1.1
    assert metrics["cross_over_t_max"] <= 0.05


@pytest.mark.parametrize(
    "overrides,scopes",
    [
        (dict(n=2, alpha=(3.0,), x0=(1.0,)), ["pair", "regular"]),
        (dict(), ["regular"]),
        (dict(alpha=(1.0, 3.0)), ["recurrent"]),
        (dict(alpha_grid=((2.0, 2.0), (0.5, 3.0))), ["regular", "recurrent"]),
    ],
)
def test_check_scopes(overrides, scopes):
    """Scopes follow the matrix size and the alpha grid, not the measured metrics."""
    assert check_scopes(_config(**overrides)) == scopes


def test_collision_metrics_per_scope():
    """Regular and recurrent blocks appear exactly for the rows of the grid."""
    config = _config(dt=0.01, t_end=0.1, paths=2, alpha_grid=((3.0, 3.0),))
    table, metrics = collision_study(config)
    assert len(table) == 1
    assert "recurrent" not in metrics
    assert metrics["regular"]["min_gap"] > 1e-6


def test_map_indices_keeps_order():
    """Thread pool results come back in index order."""
    assert map_indices(lambda i: i * i, 6, threads=3) == [0, 1, 4, 9, 16, 25]
