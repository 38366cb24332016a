"""Run reports: per-case verdicts, rendering, and the exit-code law."""

from __future__ import annotations

import json
import platform
from dataclasses import dataclass, field

from .. import __version__
from .catalog import CATALOG
from .judge import FAIL, INCONCLUSIVE, PASS, RULE_NAMES, Verdict

SCHEMA = "ranprobe-report/1"
EXIT_CODE_CAP = 60

_MARKS = {PASS: "✓", FAIL: "✗", INCONCLUSIVE: "?"}


@dataclass
class CaseResult:
    case_id: str
    verdict: Verdict

    @property
    def entry(self):
        return CATALOG[self.case_id]


@dataclass
class TestReport:
    target: dict
    transport: str
    started: str
    finished: str = ""
    environment: dict = field(default_factory=dict)
    results: list[CaseResult] = field(default_factory=list)

    def __post_init__(self) -> None:
        if not self.environment:
            self.environment = {
                "tool": f"ranprobe {__version__}",
                "python": platform.python_version(),
                "platform": platform.platform(),
            }

    def add(self, case_id: str, verdict: Verdict) -> None:
        self.results.append(CaseResult(case_id=case_id, verdict=verdict))

    def count(self, value: str) -> int:
        return sum(1 for r in self.results if r.verdict.value == value)

    @property
    def fail_count(self) -> int:
        return self.count(FAIL)

    @property
    def exit_code(self) -> int:
        return min(self.fail_count, EXIT_CODE_CAP)

    # -- rendering ---------------------------------------------------------------

    def to_mapping(self, include_traces: bool = True) -> dict:
        cases = []
        for result in self.results:
            entry = result.entry
            verdict = result.verdict
            case: dict = {
                "id": result.case_id,
                "name": entry.name,
                "protocol": entry.protocol,
                "procedures": entry.procedures,
                "messages": entry.messages,
                "verdict": verdict.value,
                "rules": {name: verdict.rule_findings.get(name) for name in RULE_NAMES},
                "detail": verdict.detail,
            }
            if include_traces and verdict.trace is not None:
                case["trace"] = [
                    {
                        "interface": e.interface,
                        "direction": e.direction,
                        "kind": e.kind,
                        "hex": e.raw.hex(),
                        "note": e.note,
                    }
                    for e in verdict.trace.entries
                ]
            cases.append(case)
        return {
            "schema": SCHEMA,
            "target": self.target,
            "transport": self.transport,
            "started": self.started,
            "finished": self.finished,
            "environment": self.environment,
            "cases": cases,
        }

    def render_machine(self) -> str:
        return json.dumps(self.to_mapping(), sort_keys=True, indent=2) + "\n"

    def render_human(self) -> str:
        lines = [
            f"target {self.target.get('address')}:{self.target.get('port')}"
            f" via {self.transport}   started {self.started}",
            "",
            f"{'case':6} {'name':42} {'proto':5} {'verdict':12} messages",
            "-" * 110,
        ]
        for result in self.results:
            entry = result.entry
            verdict = result.verdict
            mark = _MARKS.get(verdict.value, "?")
            lines.append(
                f"{result.case_id:6} {entry.name:42.42} {entry.protocol:5} "
                f"{mark} {verdict.value:10} {entry.messages}"
            )
            if verdict.detail and verdict.value != PASS:
                lines.append(f"{'':6} -> {verdict.detail}")
        lines += [
            "-" * 110,
            f"pass {self.count(PASS)}  fail {self.count(FAIL)}  "
            f"inconclusive {self.count(INCONCLUSIVE)}",
        ]
        return "\n".join(lines) + "\n"


def render_report(report: TestReport, fmt: str = "human", path: str | None = None) -> str:
    """Render to the requested format, optionally writing a file."""
    if fmt == "machine":
        text = report.render_machine()
    elif fmt == "human":
        text = report.render_human()
    else:
        raise ValueError(f"unknown report format {fmt!r}")
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    return text
