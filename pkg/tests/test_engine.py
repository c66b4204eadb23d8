"""Test the acceptance-check engine."""
import json
from pathlib import Path

import pytest

from tridyson.engine import Check, CheckCategory, CheckEngine, Condition, Operator, lookup
from tridyson.errors import ConfigError

ROOT = Path(__file__).resolve().parent.parent
CHECKS = ROOT / "checks" / "acceptance.json"
VECTORS = Path(__file__).parent / "test_vectors" / "checks"


def _vector(name):
    with open(VECTORS / name, "r", encoding="utf-8") as handle:
        data = json.load(handle)
    return Check(
        data["check_id"],
        CheckCategory(data["category"]),
        data["applies_to"],
        data["condition"],
        data["message"],
    )


def test_check_loading():
    """All 24 acceptance checks load."""
    engine = CheckEngine(str(CHECKS))
    assert len(engine.checks) == 24
    categories = {c.category for c in engine.checks}
    assert CheckCategory.IDENTITY in categories
    assert CheckCategory.BOUND in categories
    assert CheckCategory.ENSEMBLE in categories
    assert engine.checks_by_id["GBE-03"].condition.metric == "gbe.time_slice.failures"


def test_condition_evaluation():
    """Numeric operators compare; missing and null metrics never pass."""
    cond = Condition("a.b", Operator.LESS_EQUAL, 0.05)
    assert cond.evaluate({"a": {"b": 0.01}}) == (True, 0.01)
    assert cond.evaluate({"a": {"b": 0.5}}) == (False, 0.5)
    assert cond.evaluate({"a": {}}) == (False, None)
    assert cond.evaluate({"a": {"b": None}}) == (False, None)
    assert not cond.evaluate({"a": {"b": float("nan")}})[0]
    assert not cond.evaluate({"a": {"b": True}})[0]


def test_between_and_exists():
    """BETWEEN is inclusive and needs two bounds; EXISTS only looks the path up."""
    cond = Condition("x", Operator.BETWEEN, [0, 1])
    assert cond.evaluate({"x": 1})[0]
    assert not cond.evaluate({"x": 1.5})[0]
    with pytest.raises(ConfigError):
        Condition("x", Operator.BETWEEN, 1)
    assert Condition("x", Operator.EXISTS).evaluate({"x": None})[0]


def test_lookup():
    """Dotted paths walk nested mappings."""
    metrics = {"collisions": {"regular": {"collided": 0}}}
    assert lookup(metrics, "collisions.regular.collided") == 0
    assert not Condition("collisions.recurrent.collided", Operator.EXISTS).evaluate(metrics)[0]


@pytest.mark.parametrize(
    "name,command,metrics,passed",
    [
        ("test_check_01.json", "verify-identities", {"identities": {"failures_total": 0}}, True),
        ("test_check_01.json", "verify-identities", {"identities": {"failures_total": 2}}, False),
        ("test_check_02.json", "verify-sde", {"coefficients": {"normalized_coefficient_max": 0.93}}, True),
        ("test_check_02.json", "verify-sde", {"coefficients": {"normalized_coefficient_max": 1.2}}, False),
        ("test_check_03.json", "gbe", {"qv": {"diag_ratio_to_2t_max": 1.02}}, True),
        ("test_check_04.json", "collision-study", {"collisions": {"recurrent": {"absorbed_fraction_min": 0.3}}}, True),
        ("test_check_04.json", "collision-study", {"collisions": {"recurrent": {"absorbed_fraction_min": 0.0}}}, False),
    ],
)
def test_check_vectors(name, command, metrics, passed):
    """Single check definitions evaluate against metric payloads."""
    check = _vector(name)
    assert check.applies_to(command, check.scopes)
    outcome = check.evaluate(metrics)
    assert outcome["passed"] is passed
    assert outcome["check_id"] == check.check_id


def test_wildcard_and_commands():
    """'*' applies everywhere; other checks only to their commands."""
    assert _vector("test_check_03.json").applies_to("simulate")
    assert not _vector("test_check_01.json").applies_to("gbe")


def test_scoped_check_needs_its_scopes():
    """A scoped check applies only when the run activates every one of its scopes."""
    check = _vector("test_check_04.json")
    assert check.scopes == frozenset({"recurrent"})
    assert not check.applies_to("collision-study")
    assert not check.applies_to("collision-study", ["regular"])
    assert check.applies_to("collision-study", ["regular", "recurrent"])


def test_missing_metric_message():
    """A check on a missing metric fails with a clear message."""
    outcome = _vector("test_check_01.json").evaluate({})
    assert not outcome["passed"]
    assert outcome["message"] == "metric missing: identities.failures_total"


def test_scoped_checks_fail_on_missing_metrics(tmp_path):
    """Out-of-scope checks are dropped; an in-scope check with no metric fails."""
    path = tmp_path / "checks.json"
    with open(VECTORS / "test_check_04.json", "r", encoding="utf-8") as handle:
        scoped = json.load(handle)
    with open(VECTORS / "test_check_01.json", "r", encoding="utf-8") as handle:
        unscoped = json.load(handle)
    unscoped["applies_to"] = {"commands": ["collision-study"]}
    path.write_text(json.dumps({"checks": [scoped, unscoped]}), encoding="utf-8")
    engine = CheckEngine(str(path))
    outcomes = engine.evaluate("collision-study", {})
    assert [o["check_id"] for o in outcomes] == ["TEST-ID-01"]
    outcomes = engine.evaluate("collision-study", {}, scopes=["recurrent"])
    assert [o["check_id"] for o in outcomes] == ["TEST-COL-01", "TEST-ID-01"]
    assert outcomes[0]["passed"] is False
    assert outcomes[0]["message"] == "metric missing: collisions.recurrent.absorbed_fraction_min"


def test_pair_quadratic_variation_checks():
    """The 2t ratio floor and the cross-variation bound apply to 2 x 2 runs only."""
    engine = CheckEngine(str(CHECKS))
    qv = {
        "diag_mean_relative_error_max": 0.03,
        "cross_z_max": 1.0,
        "diag_ratio_to_2t_max": 1.0,
        "diag_ratio_to_2t_min": 0.59,
        "cross_over_t_max": 0.43,
    }
    general = {o["check_id"]: o for o in engine.evaluate("verify-sde", {"qv": qv})}
    assert {"QV-01", "QV-02", "QV-03"} <= set(general)
    assert "QV-04" not in general and "QV-05" not in general
    assert general["QV-01"]["passed"]
    pair = {o["check_id"]: o for o in engine.evaluate("verify-sde", {"qv": qv}, ["pair"])}
    assert pair["QV-04"]["passed"] is False
    assert pair["QV-05"]["passed"] is False


def test_engine_evaluate_by_command():
    """Only the checks of the command are evaluated."""
    engine = CheckEngine(str(CHECKS))
    metrics = {
        "gbe": {
            "trace_moment": {"failures": 0, "z_max": 1.2},
            "gap_moment": {"failures": 0, "z_max": 0.4},
            "time_slice": {"failures": 1, "z_max": 4.5},
        }
    }
    outcomes = engine.evaluate("gbe", metrics)
    assert [o["check_id"] for o in outcomes] == ["GBE-01", "GBE-02", "GBE-03"]
    assert [o["passed"] for o in outcomes] == [True, True, False]


def test_bad_checks_file(tmp_path):
    """Unreadable files and malformed checks raise ConfigError."""
    with pytest.raises(ConfigError):
        CheckEngine(str(tmp_path / "missing.json"))
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"checks": [{"check_id": "X", "category": "NOPE"}]}), encoding="utf-8")
    with pytest.raises(ConfigError, match="invalid check X"):
        CheckEngine(str(bad))
