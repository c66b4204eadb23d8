"""Pydantic models for the JSON reports and the run manifest."""
from __future__ import annotations

from typing import Any, Dict, List, Optional

from pydantic import BaseModel, Field

from tridyson.engine import CheckCategory, Operator


class CheckOutcome(BaseModel):
    check_id: str
    category: CheckCategory
    metric: str
    operator: Operator
    value: Any = None
    observed: Any = None
    passed: bool
    message: str


class Summary(BaseModel):
    total_checks: int
    passed: int
    failed: int


class IdentityFailure(BaseModel):
    matrix: Any
    detail: str


class IdentityReportModel(BaseModel):
    name: str
    mode: str = Field(..., pattern=r"^(exact|float)$")
    instances: int = Field(..., ge=0)
    failure_count: int = Field(..., ge=0)
    failures: List[IdentityFailure] = []
    notes: List[str] = []
    counterexamples: List[Dict[str, Any]] = []
    passed: bool


class ReportError(BaseModel):
    error: str
    message: str


class VerificationReport(BaseModel):
    """Payload of every verification command; `metrics` is what the checks read."""

    command: str
    tool_version: str
    seed: int
    config: Dict[str, Any]
    metrics: Dict[str, Any]
    scopes: List[str] = []
    checks: List[CheckOutcome]
    summary: Summary
    identity_reports: List[IdentityReportModel] = []
    moment_reports: List[Dict[str, Any]] = []
    errors: List[ReportError] = []
    passed: bool


class RunManifestModel(BaseModel):
    command: str
    tool_version: str
    seed: int
    config: Dict[str, Any]
    started: str
    finished: str
    outputs: List[str]
    checks_file: Optional[str] = None
