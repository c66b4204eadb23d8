"""Test Markdown rendering of verification reports."""
from tridyson.report import render_markdown_report


def _payload(**overrides):
    payload = {
        "command": "verify-sde",
        "tool_version": "0.1.0",
        "seed": 3,
        "config": {"n": 3, "dt": 0.001},
        "metrics": {"qv": {"diag_relative_error_max": 0.0123456789, "paths": 4}},
        "checks": [
            {
                "check_id": "QV-01",
                "category": "QUADRATIC_VARIATION",
                "metric": "qv.diag_relative_error_max",
                "operator": "LESS_EQUAL",
                "value": 0.1,
                "observed": 0.0123456789,
                "passed": True,
                "message": "ok",
            },
            {
                "check_id": "PATH-01",
                "category": "PATHWISE",
                "metric": "pathwise.max_discrepancy",
                "operator": "LESS_EQUAL",
                "value": 0.05,
                "observed": None,
                "passed": False,
                "message": "metric missing: pathwise.max_discrepancy",
            },
        ],
        "summary": {"total_checks": 2, "passed": 1, "failed": 1},
        "passed": False,
    }
    payload.update(overrides)
    return payload


def test_report_sections():
    """Title, run context, summary, checks and metrics are rendered."""
    text = render_markdown_report(_payload())
    assert text.startswith("# tridyson verify-sde report\n")
    assert "- Seed: `3`" in text
    assert "- dt: `0.001`" in text
    assert "Result: **FAIL**" in text
    assert "| 2 | 1 | 1 |" in text
    assert "| QV-01 | QUADRATIC_VARIATION | `qv.diag_relative_error_max` | LESS_EQUAL 0.1 | 0.0123457 | pass |" in text
    assert "FAIL: metric missing: pathwise.max_discrepancy" in text
    assert "| `qv.paths` | 4 |" in text
    assert "No errors reported." in text
    assert text.endswith("\n")


def test_report_without_checks():
    """An empty check list and metrics still render."""
    text = render_markdown_report(_payload(checks=[], metrics={}, passed=True))
    assert "Result: **PASS**" in text
    assert "No acceptance checks applied." in text
    assert "No metrics recorded." in text


def test_identity_section_and_escaping():
    """Identity reports get their own table; pipes in values are escaped."""
    reports = [
        {
            "name": "zero_pivot_scope",
            "mode": "exact",
            "instances": 5,
            "failure_count": 0,
            "counterexamples": [{"k0": 2}],
            "notes": ["a|b"],
        }
    ]
    text = render_markdown_report(
        _payload(command="verify-identities", identity_reports=reports, errors=[{"error": "E", "message": "x|y"}])
    )
    assert "## Identity checks" in text
    assert "| zero_pivot_scope | exact | 5 | 0 | 1 |" in text
    assert "- a|b" in text
    assert "| E | x\\|y |" in text
