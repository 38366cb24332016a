"""Structural validation of decoded N1 messages.

Produces a :class:`ValidationReport` with three finding classes that the
test engine maps onto its verdict rules: absent mandatory IEs, IEs whose
values are out of range, and IEs that make no sense for the procedure.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .codec import _OPT_SPECS, NasDecodeError, decode_gsm
from .ies import IeError
from .messages import (
    AuthenticationFailure,
    CipheredPayload,
    MessageKind,
    MmCause,
    NasBody,
    NasMessage,
    PayloadContainerType,
)

# legal cause code points (Release-16 mobility / session management)
MM_CAUSE_VALUES = frozenset(
    [3, 5, 6, 7, 9, 10, 11, 12, 13, 15, 20, 21, 22, 23, 26, 27, 28, 31, 43, 62, 65, 67]
    + [71, 72, 73, 74, 75, 76, 77, 78, 79, 80, 81, 90, 91, 92, 93, 94, 95, 96, 97, 98, 99, 100, 101, 111]
)
SM_CAUSE_VALUES = frozenset(
    [8, 26, 27, 28, 29, 31, 32, 33, 35, 36, 37, 38, 39, 41, 42, 43, 44, 45, 46, 50, 51, 54]
    + [57, 58, 59, 61, 67, 68, 69, 70, 81, 82, 95, 96, 97, 98, 99, 100, 101, 111]
)

MANDATORY_IES: dict[MessageKind, list[tuple[str, str]]] = {
    MessageKind.REGISTRATION_REQUEST: [("mobile_identity", "5GS mobile identity")],
    MessageKind.REGISTRATION_ACCEPT: [("result", "5GS registration result")],
    MessageKind.REGISTRATION_COMPLETE: [],
    MessageKind.REGISTRATION_REJECT: [("cause", "5GMM cause")],
    MessageKind.IDENTITY_REQUEST: [("identity_type", "Identity type")],
    MessageKind.IDENTITY_RESPONSE: [("mobile_identity", "5GS mobile identity")],
    MessageKind.AUTHENTICATION_REQUEST: [
        ("abba", "ABBA"),
        ("rand", "RAND"),
        ("autn", "AUTN"),
    ],
    MessageKind.AUTHENTICATION_RESPONSE: [("response", "Authentication response parameter")],
    MessageKind.AUTHENTICATION_FAILURE: [("cause", "5GMM cause")],
    MessageKind.AUTHENTICATION_REJECT: [],
    MessageKind.SECURITY_MODE_COMMAND: [
        ("replayed_capability", "Replayed UE security capabilities")
    ],
    MessageKind.SECURITY_MODE_COMPLETE: [],
    MessageKind.SECURITY_MODE_REJECT: [("cause", "5GMM cause")],
    MessageKind.CONFIGURATION_UPDATE_COMMAND: [],
    MessageKind.UL_NAS_TRANSPORT: [("payload", "Payload container")],
    MessageKind.DL_NAS_TRANSPORT: [("payload", "Payload container")],
    MessageKind.PDU_SESSION_ESTABLISHMENT_REQUEST: [
        ("max_data_rate", "Integrity protection maximum data rate")
    ],
    MessageKind.PDU_SESSION_ESTABLISHMENT_ACCEPT: [
        ("qos_rules", "Authorized QoS rules"),
        ("ambr", "Session AMBR"),
    ],
    MessageKind.PDU_SESSION_ESTABLISHMENT_REJECT: [("cause", "5GSM cause")],
}

_FIXED_LENGTHS = {
    "rand": 16,
    "autn": 16,
    "response": 16,
    "auts": 14,
    "abba": 2,
    "ambr": 6,
    "max_data_rate": 2,
}


@dataclass
class ValidationReport:
    missing_mandatory: list[str] = field(default_factory=list)
    malformed: list[tuple[str, str]] = field(default_factory=list)
    semantic: list[tuple[str, str]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not (self.missing_mandatory or self.malformed or self.semantic)

    def summary(self) -> str:
        parts = []
        if self.missing_mandatory:
            parts.append("missing: " + ", ".join(self.missing_mandatory))
        if self.malformed:
            parts.append("malformed: " + ", ".join(f"{n} ({r})" for n, r in self.malformed))
        if self.semantic:
            parts.append("semantic: " + ", ".join(f"{n} ({r})" for n, r in self.semantic))
        return "; ".join(parts) or "ok"


def validate_mandatory(msg: NasMessage | NasBody) -> ValidationReport:
    """Check one decoded message against its kind's IE rules."""
    body = msg.body if isinstance(msg, NasMessage) else msg
    report = ValidationReport()
    if isinstance(body, CipheredPayload):
        return report

    for fname, display in MANDATORY_IES[body.kind]:
        value = getattr(body, fname)
        if value is None or (isinstance(value, (bytes, str)) and not value):
            report.missing_mandatory.append(display)

    for fname, expected in _FIXED_LENGTHS.items():
        value = getattr(body, fname, None)
        if isinstance(value, bytes) and value and len(value) != expected:
            report.malformed.append((fname, f"expected {expected} octets, got {len(value)}"))

    # IEs the decoder recognized but could not parse
    known = {spec.iei: spec for spec in _OPT_SPECS[body.kind]}
    for raw in body.raw_ies:
        spec = known.get(raw.iei)
        if spec is None:
            continue
        try:
            spec.from_wire(raw.value)
        except (IeError, ValueError) as exc:
            report.malformed.append((spec.name, str(exc)))

    _semantic_checks(body, report)
    return report


def _semantic_checks(body: NasBody, report: ValidationReport) -> None:
    kind = body.kind

    cause = getattr(body, "cause", None)
    if cause is not None:
        table = SM_CAUSE_VALUES if kind.value.startswith("PduSession") else MM_CAUSE_VALUES
        if cause not in table:
            report.malformed.append(("cause", f"unknown cause value {cause}"))

    if kind in (MessageKind.UL_NAS_TRANSPORT, MessageKind.DL_NAS_TRANSPORT):
        ctype = getattr(body, "container_type", None)
        if ctype is not None and ctype != PayloadContainerType.N1_SM_INFORMATION:
            report.semantic.append(
                ("payload container type", f"type {ctype} not used by session transport")
            )
        payload = getattr(body, "payload", None)
        if payload:
            try:
                decode_gsm(payload)
            except NasDecodeError as exc:
                report.semantic.append(("payload container", f"not a 5GSM message ({exc})"))

    if kind == MessageKind.IDENTITY_REQUEST:
        itype = getattr(body, "identity_type", None)
        if itype is not None and itype not in (1, 2, 3, 4, 5):
            report.malformed.append(("identity_type", f"unknown identity type {itype}"))

    if isinstance(body, AuthenticationFailure):
        if body.cause == MmCause.SYNCH_FAILURE and not body.auts:
            report.semantic.append(
                ("AUTS", "synchronisation failure reported without a resync token")
            )

    psi = getattr(body, "pdu_session_id", None)
    if psi is not None and kind in (
        MessageKind.PDU_SESSION_ESTABLISHMENT_REQUEST,
        MessageKind.PDU_SESSION_ESTABLISHMENT_ACCEPT,
        MessageKind.PDU_SESSION_ESTABLISHMENT_REJECT,
    ):
        if not 1 <= psi <= 15:
            report.malformed.append(("pdu_session_id", f"session id {psi} out of range"))
        if getattr(body, "pti", 1) == 0:
            report.semantic.append(("pti", "reserved procedure transaction identity"))

    if kind == MessageKind.PDU_SESSION_ESTABLISHMENT_ACCEPT:
        addr = getattr(body, "pdu_address", None)
        if addr is not None and not (len(addr) == 5 and addr[0] & 0x07 == 1):
            report.malformed.append(("pdu_address", "not a well-formed IPv4 PDU address"))
