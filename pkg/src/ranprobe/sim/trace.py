"""Flow traces: everything the verdict rules need about each wire message."""

from __future__ import annotations

import time
from dataclasses import dataclass, field

from ..fsm import FsmEvent
from ..nas.validate import ValidationReport

OUT = "out"  # tester -> core
IN = "in"  # core -> tester


@dataclass(frozen=True)
class FsmCheck:
    """One state-machine step attempted when a message was sent/received."""

    machine: str  # "5GMM" | "5GSM" | "NG-C" | "PDU-resource"
    pre_state: str
    event: FsmEvent
    post_state: str | None  # None when the step was illegal


@dataclass
class TraceEntry:
    ts: float
    interface: str  # "N1" | "N2" | "N3"
    direction: str  # OUT | IN
    kind: str | None  # decoded message kind, None if undecodable
    raw: bytes = b""
    protected: bool = False
    mac_valid: bool | None = None
    decode_error: str | None = None
    awaited: tuple[str, ...] = ()  # kinds meaningful at this point (IN only)
    fsm_checks: tuple[FsmCheck, ...] = ()
    validation: ValidationReport | None = None
    note: str = ""

    def summary(self) -> str:
        bits = [self.kind or f"undecodable ({self.decode_error})"]
        if self.protected:
            bits.append("protected" + ("" if self.mac_valid in (True, None) else " MAC-INVALID"))
        if self.note:
            bits.append(self.note)
        return " ".join(bits)


@dataclass
class FlowTrace:
    entries: list[TraceEntry] = field(default_factory=list)

    def add(self, interface: str, direction: str, **kw) -> TraceEntry:
        entry = TraceEntry(ts=time.monotonic(), interface=interface, direction=direction, **kw)
        self.entries.append(entry)
        return entry

    def received(self, kind: str | None = None) -> list[TraceEntry]:
        return [
            e
            for e in self.entries
            if e.direction == IN and (kind is None or e.kind == kind)
        ]

    def sent(self, kind: str | None = None) -> list[TraceEntry]:
        return [
            e
            for e in self.entries
            if e.direction == OUT and (kind is None or e.kind == kind)
        ]

    def kinds(self) -> list[str]:
        return [e.kind or "?" for e in self.entries]
