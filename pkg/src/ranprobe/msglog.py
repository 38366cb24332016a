"""Structured wire-message logging shared by all agents.

One :class:`LogRecord` per on-wire message, strictly time-ordered per
interface.  The sink serializes appends, so any agent thread may log.
"""

from __future__ import annotations

import sys
import threading
import time
from dataclasses import dataclass, field


@dataclass(frozen=True)
class LogRecord:
    timestamp: float
    direction: str  # "uplink" | "downlink"
    interface: str  # "N1" | "N2" | "N3"
    octets: bytes
    summary: str
    transitions: tuple[str, ...] = ()

    def to_line(self, dump_hex: bool) -> str:
        parts = [
            f"{self.timestamp:.6f}",
            self.interface,
            "UL" if self.direction == "uplink" else "DL",
            self.summary,
        ]
        if self.transitions:
            parts.append("[" + "; ".join(self.transitions) + "]")
        if dump_hex:
            parts.append(self.octets.hex())
        return " ".join(parts)


class MessageLog:
    """Append-only record sink with optional file dump."""

    def __init__(self, dump_path: str | None = None, dump_hex: bool = False, echo=None):
        self._lock = threading.Lock()
        self.records: list[LogRecord] = []
        self.dump_hex = dump_hex
        self._echo = echo  # callable(str) for live CLI output
        self._fh = None
        if dump_path:
            try:
                self._fh = open(dump_path, "a", encoding="utf-8")
            except OSError as exc:
                print(f"warning: cannot open message dump {dump_path}: {exc}", file=sys.stderr)

    def log(
        self,
        direction: str,
        interface: str,
        octets: bytes,
        summary: str,
        transitions: tuple[str, ...] = (),
    ) -> LogRecord:
        record = LogRecord(
            timestamp=time.time(),
            direction=direction,
            interface=interface,
            octets=octets,
            summary=summary,
            transitions=transitions,
        )
        with self._lock:
            self.records.append(record)
            line = record.to_line(self.dump_hex)
            if self._fh:
                try:
                    self._fh.write(line + "\n")
                    self._fh.flush()
                except OSError as exc:
                    print(f"warning: message dump write failed: {exc}", file=sys.stderr)
                    self._fh = None
            if self._echo:
                self._echo(line)
        return record

    def close(self) -> None:
        with self._lock:
            if self._fh:
                self._fh.close()
                self._fh = None
