"""Test engine: catalog, verdict rules, reports, and suite drivers."""

from .catalog import CATALOG, CONFORMANCE, ROBUSTNESS, CatalogEntry
from .judge import (
    FAIL,
    INCONCLUSIVE,
    PASS,
    RULE_NAMES,
    Expectation,
    Verdict,
    judge,
    merge_verdicts,
)
from .report import EXIT_CODE_CAP, CaseResult, TestReport, render_report
from .runner import ProbeProfile, Target, TargetUnreachable, TestEngine

__all__ = [name for name in dir() if not name.startswith("_")]
