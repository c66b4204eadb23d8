"""Markdown rendering of the JSON verification reports."""
from __future__ import annotations

from typing import Any, Dict, List


def _safe(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return f"{value:.6g}"
    return str(value).replace("|", "\\|")


def _render_summary(payload: Dict[str, Any]) -> List[str]:
    summary = payload.get("summary", {}) or {}
    lines = ["## Summary", ""]
    verdict = "PASS" if payload.get("passed") else "FAIL"
    lines.append(f"Result: **{verdict}**")
    lines.append("")
    lines.append("| Checks | Passed | Failed |")
    lines.append("| ---: | ---: | ---: |")
    lines.append(
        f"| {summary.get('total_checks', 0)} | {summary.get('passed', 0)} "
        f"| {summary.get('failed', 0)} |"
    )
    lines.append("")
    return lines


def _render_checks(checks: List[Dict[str, Any]]) -> List[str]:
    lines = ["## Checks", ""]
    if not checks:
        lines.append("No acceptance checks applied.")
        lines.append("")
        return lines

    lines.append("| Check | Category | Metric | Condition | Observed | Result |")
    lines.append("| --- | --- | --- | --- | ---: | --- |")
    for check in checks:
        condition = f"{_safe(check.get('operator'))} {_safe(check.get('value'))}".strip()
        result = "pass" if check.get("passed") else f"FAIL: {_safe(check.get('message'))}"
        lines.append(
            f"| {_safe(check.get('check_id'))} | {_safe(check.get('category'))} "
            f"| `{_safe(check.get('metric'))}` | {condition} "
            f"| {_safe(check.get('observed'))} | {result} |"
        )
    lines.append("")
    return lines


def _flatten(prefix: str, value: Any, out: List[tuple]) -> None:
    if isinstance(value, dict):
        for key in sorted(value):
            _flatten(f"{prefix}.{key}" if prefix else key, value[key], out)
    elif isinstance(value, list):
        out.append((prefix, f"[{len(value)} entries]"))
    else:
        out.append((prefix, value))


def _render_metrics(metrics: Dict[str, Any]) -> List[str]:
    lines = ["## Metrics", ""]
    rows: List[tuple] = []
    _flatten("", metrics, rows)
    if not rows:
        lines.append("No metrics recorded.")
        lines.append("")
        return lines
    lines.append("| Metric | Value |")
    lines.append("| --- | ---: |")
    for name, value in rows:
        lines.append(f"| `{name}` | {_safe(value)} |")
    lines.append("")
    return lines


def _render_identities(reports: List[Dict[str, Any]]) -> List[str]:
    if not reports:
        return []
    lines = ["## Identity checks", ""]
    lines.append("| Check | Mode | Instances | Failures | Counterexamples |")
    lines.append("| --- | --- | ---: | ---: | ---: |")
    for report in reports:
        lines.append(
            f"| {_safe(report.get('name'))} | {_safe(report.get('mode'))} "
            f"| {_safe(report.get('instances'))} | {_safe(report.get('failure_count'))} "
            f"| {len(report.get('counterexamples', []) or [])} |"
        )
    lines.append("")
    notes = [n for r in reports for n in (r.get("notes") or [])]
    for note in notes:
        lines.append(f"- {note}")
    if notes:
        lines.append("")
    return lines


def _render_errors(errors: List[Dict[str, Any]]) -> List[str]:
    lines = ["## Errors", ""]
    if not errors:
        lines.append("No errors reported.")
        lines.append("")
        return lines

    lines.append("| Error | Message |")
    lines.append("| --- | --- |")
    for error in errors:
        lines.append(f"| {_safe(error.get('error'))} | {_safe(error.get('message'))} |")
    lines.append("")
    return lines


def render_markdown_report(payload: Dict[str, Any]) -> str:
    """Render a Markdown report from a JSON verification payload."""
    lines: List[str] = []
    command = payload.get("command")
    lines.append(f"# tridyson {command} report" if command else "# tridyson report")
    lines.append("")
    lines.append("## Run Context")
    lines.append("")
    lines.append(f"- Tool version: `{payload.get('tool_version', '')}`")
    lines.append(f"- Seed: `{payload.get('seed', '')}`")
    if payload.get("scopes"):
        lines.append(f"- Check scopes: `{', '.join(payload['scopes'])}`")
    config = payload.get("config", {}) or {}
    for key in sorted(config):
        lines.append(f"- {key}: `{config[key]}`")
    lines.append("")

    lines.extend(_render_summary(payload))
    lines.extend(_render_checks(payload.get("checks", []) or []))
    lines.extend(_render_identities(payload.get("identity_reports", []) or []))
    lines.extend(_render_metrics(payload.get("metrics", {}) or {}))
    lines.extend(_render_errors(payload.get("errors", []) or []))

    return "\n".join(lines).strip() + "\n"
