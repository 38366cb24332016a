"""Reply judgment: the four verdict rules plus per-case expectations.

Rule (i): every received message was a legal state-machine event in the
tester's state at receipt.  Rule (ii): mandatory IEs all present.
Rule (iii): the message kind (and its content) is meaningful for the
procedure in progress.  Rule (iv): IE values are within their valid
ranges.  A case passes when all four rules hold and the expected
behaviour was observed.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

from .. import fsm
from ..sim.trace import IN, FlowTrace, TraceEntry

PASS = "Pass"
FAIL = "Fail"
INCONCLUSIVE = "Inconclusive"

RULE_NAMES = ("state_compatible", "mandatory_present", "kind_understood", "values_valid")


@dataclass
class Verdict:
    value: str
    rule_findings: dict[str, bool] = field(default_factory=dict)
    detail: str = ""
    trace: FlowTrace | None = None

    @property
    def passed(self) -> bool:
        return self.value == PASS


@dataclass
class Expectation:
    """What a test case accepts as correct core behaviour."""

    accept_kinds: tuple[str, ...] = ()  # at least one must be received
    forbid_kinds: tuple[str, ...] = ()  # none may be received
    require_protected: tuple[str, ...] = ()  # these must arrive with a valid MAC
    silence_verdict: str = INCONCLUSIVE  # verdict when nothing expected arrived
    predicate: Callable[[FlowTrace], tuple[bool, str]] | None = None


def _replay_check(entry: TraceEntry) -> bool:
    """Re-run the recorded machine steps through the transition tables."""
    for check in entry.fsm_checks:
        step, _has_arc, state_cls = fsm.MACHINES[check.machine.split("[")[0]]
        try:
            step(state_cls(check.pre_state), check.event)
        except fsm.IllegalTransition:
            return False
    return True


def judge(expectation: Expectation, trace: FlowTrace) -> Verdict:
    """Apply the four rules to every received message, then the expectation."""
    findings = {name: True for name in RULE_NAMES}
    problems: list[str] = []

    for entry in trace.entries:
        if entry.direction != IN:
            continue
        label = entry.kind or "message"
        if entry.decode_error is not None:
            findings["kind_understood"] = False
            problems.append(f"undecodable input: {entry.decode_error}")
            continue
        if not _replay_check(entry):
            findings["state_compatible"] = False
            problems.append(f"{label} received in an incompatible state")
        if entry.validation is not None:
            if entry.validation.missing_mandatory:
                findings["mandatory_present"] = False
                problems.append(
                    f"{label} missing mandatory: "
                    + ", ".join(entry.validation.missing_mandatory)
                )
            if entry.validation.semantic:
                findings["kind_understood"] = False
                problems.append(
                    f"{label} not interpretable: "
                    + "; ".join(f"{n} ({r})" for n, r in entry.validation.semantic)
                )
            if entry.validation.malformed:
                findings["values_valid"] = False
                problems.append(
                    f"{label} value errors: "
                    + "; ".join(f"{n} ({r})" for n, r in entry.validation.malformed)
                )
        if entry.awaited and entry.kind not in entry.awaited:
            findings["kind_understood"] = False
            problems.append(f"{label} does not belong to the procedure in progress")
        if entry.mac_valid is False:
            findings["values_valid"] = False
            problems.append(f"{label} failed integrity verification")

    received = {e.kind for e in trace.received() if e.kind}
    expectation_met = True
    silent = False
    if expectation.accept_kinds:
        if not received & set(expectation.accept_kinds):
            expectation_met = False
            silent = True
            problems.append(
                "expected one of: " + ", ".join(expectation.accept_kinds)
            )
    for kind in expectation.forbid_kinds:
        if kind in received:
            expectation_met = False
            problems.append(f"{kind} must not be sent by the core here")
    for kind in expectation.require_protected:
        for entry in trace.received(kind):
            if not entry.protected or entry.mac_valid is False:
                expectation_met = False
                problems.append(f"{kind} was not security-protected")
    if expectation.predicate is not None:
        ok, note = expectation.predicate(trace)
        if not ok:
            expectation_met = False
            if note:
                problems.append(note)

    rules_ok = all(findings.values())
    if expectation_met and rules_ok:
        value = PASS
    elif silent and expectation.silence_verdict == INCONCLUSIVE and rules_ok:
        value = INCONCLUSIVE
    else:
        value = FAIL
    return Verdict(value=value, rule_findings=findings, detail="; ".join(problems), trace=trace)


def merge_verdicts(parts: list[tuple[str, Verdict]]) -> Verdict:
    """Combine sub-case verdicts: a case passes only if every part does."""
    findings = {name: True for name in RULE_NAMES}
    details = []
    value = PASS
    for label, verdict in parts:
        for name in RULE_NAMES:
            findings[name] = findings[name] and verdict.rule_findings.get(name, True)
        if verdict.detail:
            details.append(f"{label}: {verdict.detail}")
        if verdict.value == FAIL:
            value = FAIL
        elif verdict.value == INCONCLUSIVE and value == PASS:
            value = INCONCLUSIVE
    return Verdict(value=value, rule_findings=findings, detail="; ".join(details))
