"""Deterministic acceptance-check engine.

Checks live in a JSON file (checks/acceptance.json) and are evaluated against the
nested metrics mapping a study returns. A metric is addressed by a dotted path.
"""
from __future__ import annotations

import json
import logging
import math
from enum import Enum
from typing import Any, Dict, Iterable, List, Mapping, Tuple

from tridyson.errors import ConfigError

logger = logging.getLogger(__name__)

DEFAULT_CHECKS = "checks/acceptance.json"

_MISSING = object()


class CheckCategory(str, Enum):
    IDENTITY = "IDENTITY"
    PATHWISE = "PATHWISE"
    QUADRATIC_VARIATION = "QUADRATIC_VARIATION"
    BOUND = "BOUND"
    COLLISION = "COLLISION"
    ENSEMBLE = "ENSEMBLE"


class Operator(str, Enum):
    LESS_THAN = "LESS_THAN"
    LESS_EQUAL = "LESS_EQUAL"
    GREATER_THAN = "GREATER_THAN"
    GREATER_EQUAL = "GREATER_EQUAL"
    EQUALS = "EQUALS"
    BETWEEN = "BETWEEN"
    EXISTS = "EXISTS"


def lookup(metrics: Mapping[str, Any], path: str) -> Any:
    """Value at a dotted path, or _MISSING."""
    current: Any = metrics
    for part in path.split("."):
        if not isinstance(current, Mapping) or part not in current:
            return _MISSING
        current = current[part]
    return current


class Condition:
    def __init__(self, metric: str, operator: Operator, value: Any = None):
        self.metric = metric
        self.operator = operator
        self.value = value
        if operator is Operator.BETWEEN and (
            not isinstance(value, (list, tuple)) or len(value) != 2
        ):
            raise ConfigError(f"BETWEEN on {metric} needs [low, high], got {value!r}")

    def evaluate(self, metrics: Mapping[str, Any]) -> Tuple[bool, Any]:
        """(passed, observed value); a missing metric never passes."""
        target = lookup(metrics, self.metric)
        if target is _MISSING:
            return False, None
        if self.operator is Operator.EXISTS:
            return True, target
        if self.operator is Operator.EQUALS:
            return target == self.value, target
        if target is None or isinstance(target, bool):
            return False, target
        observed = float(target)
        if math.isnan(observed):
            return False, target
        if self.operator is Operator.LESS_THAN:
            return observed < float(self.value), target
        if self.operator is Operator.LESS_EQUAL:
            return observed <= float(self.value), target
        if self.operator is Operator.GREATER_THAN:
            return observed > float(self.value), target
        if self.operator is Operator.GREATER_EQUAL:
            return observed >= float(self.value), target
        low, high = (float(v) for v in self.value)
        return low <= observed <= high, target


class Check:
    def __init__(
        self,
        check_id: str,
        category: CheckCategory,
        applies_to: Dict[str, Any],
        condition: Dict[str, Any],
        message: str,
    ):
        self.check_id = check_id
        self.category = category
        self.commands = list(applies_to.get("commands", []))
        self.scopes = frozenset(applies_to.get("scopes", []))
        self.condition = Condition(
            condition["metric"], Operator(condition["operator"]), condition.get("value")
        )
        self.message = message

    def applies_to(self, command: str, scopes: Iterable[str] = ()) -> bool:
        """Command matches and every scope of the check is active for the run."""
        if "*" not in self.commands and command not in self.commands:
            return False
        return self.scopes <= frozenset(scopes)

    def evaluate(self, metrics: Mapping[str, Any]) -> Dict[str, Any]:
        passed, observed = self.condition.evaluate(metrics)
        outcome = {
            "check_id": self.check_id,
            "category": self.category.value,
            "metric": self.condition.metric,
            "operator": self.condition.operator.value,
            "value": self.condition.value,
            "observed": observed,
            "passed": passed,
            "message": self.message,
        }
        if lookup(metrics, self.condition.metric) is _MISSING:
            outcome["message"] = f"metric missing: {self.condition.metric}"
        return outcome


class CheckEngine:
    def __init__(self, checks_file: str = DEFAULT_CHECKS):
        self.checks = self._load_checks(checks_file)
        self.checks_by_id = {c.check_id: c for c in self.checks}

    def _load_checks(self, checks_file: str) -> List[Check]:
        try:
            with open(checks_file, "r", encoding="utf-8") as handle:
                data = json.load(handle)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot load checks from {checks_file}: {exc}") from exc

        checks = []
        for check in data.get("checks", []):
            try:
                checks.append(
                    Check(
                        check["check_id"],
                        CheckCategory(check["category"]),
                        check["applies_to"],
                        check["condition"],
                        check["message"],
                    )
                )
            except (KeyError, ValueError) as exc:
                raise ConfigError(f"invalid check {check.get('check_id', '?')}: {exc}") from exc
        return checks

    def evaluate(
        self,
        command: str,
        metrics: Mapping[str, Any],
        scopes: Iterable[str] = (),
    ) -> List[Dict[str, Any]]:
        """Outcomes of every check that applies to `command` under `scopes`."""
        scopes = frozenset(scopes)
        outcomes = []
        for check in self.checks:
            if not check.applies_to(command, scopes):
                if check.applies_to(command, check.scopes):
                    logger.debug("%s skipped: needs scopes %s", check.check_id, sorted(check.scopes))
                continue
            outcome = check.evaluate(metrics)
            if not outcome["passed"]:
                logger.warning(
                    "%s failed: %s = %r", check.check_id, outcome["metric"], outcome["observed"]
                )
            outcomes.append(outcome)
        return outcomes
