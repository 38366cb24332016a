"""IE-presence and value validation for decoded NG-C PDUs."""

from __future__ import annotations

from ..nas.validate import ValidationReport
from .ies import (
    GlobalRanNodeId,
    PduResourceItem,
    RawNgapIe,
    SetupRequestTransfer,
    SetupResponseTransfer,
    TaiSliceSupport,
)
from .messages import IE_CODECS, IE_RULES, IeId, NgapKind, NgapPdu

_IE_NAME = {ie_id: label for ie_id, (label, _e, _d) in IE_CODECS.items()}


_REQUEST_LISTS = (IeId.SETUP_LIST_SU_REQ, IeId.SETUP_LIST_CXT_REQ)
_RESPONSE_LISTS = (IeId.SETUP_LIST_SU_RES, IeId.SETUP_LIST_CXT_RES)


def _name(ie_id: int) -> str:
    return _IE_NAME.get(ie_id, f"IE {ie_id}")


def validate_ies(pdu: NgapPdu) -> ValidationReport:
    """Flag missing mandatory IEs, out-of-range values, and nonsense combos."""
    report = ValidationReport()
    kind = pdu.kind
    if kind is None:
        report.semantic.append(("procedure", "unknown (outcome, procedure code) pair"))
        return report

    rules = {r.ie_id: r for r in IE_RULES[kind]}
    present = {ie.ie_id for ie in pdu.ies}
    for ie_id, rule in rules.items():
        if rule.mandatory and ie_id not in present:
            report.missing_mandatory.append(_name(ie_id))

    for ie in pdu.ies:
        if ie.ie_id in IE_CODECS and isinstance(ie.value, RawNgapIe):
            report.malformed.append((_name(ie.ie_id), "content could not be parsed"))
            continue
        if ie.ie_id not in rules and ie.ie_id in IE_CODECS:
            report.semantic.append((_name(ie.ie_id), f"not defined for {kind}"))
        _check_value(kind, ie.ie_id, ie.value, report)
    return report


def _check_value(kind: NgapKind, ie_id: int, value, report: ValidationReport) -> None:
    name = _name(ie_id)
    if ie_id == IeId.AMF_UE_NGAP_ID and not 0 <= value < 1 << 40:
        report.malformed.append((name, f"{value} outside 40-bit range"))
    elif ie_id == IeId.RAN_UE_NGAP_ID and not 0 <= value < 1 << 32:
        report.malformed.append((name, f"{value} outside 32-bit range"))
    elif ie_id == IeId.RELATIVE_AMF_CAPACITY and not 0 <= value <= 255:
        report.malformed.append((name, f"{value} outside [0, 255]"))
    elif ie_id == IeId.GLOBAL_RAN_NODE_ID and isinstance(value, GlobalRanNodeId):
        if not 22 <= value.gnb_id_bits <= 32:
            report.malformed.append((name, f"gnb id bit length {value.gnb_id_bits}"))
    elif ie_id == IeId.SECURITY_KEY and isinstance(value, bytes) and len(value) != 32:
        report.malformed.append((name, f"key is {len(value)} octets, expected 32"))
    elif ie_id == IeId.SUPPORTED_TA_LIST and isinstance(value, list):
        for ta in value:
            if isinstance(ta, TaiSliceSupport) and not ta.slices:
                report.malformed.append((name, f"tracking area {ta.tac.hex()} lists no slices"))
    elif ie_id in _REQUEST_LISTS + _RESPONSE_LISTS and isinstance(value, list):
        for item in value:
            _check_resource_item(kind, ie_id, item, report)
    elif ie_id == IeId.AMF_NAME and isinstance(value, str) and not value:
        report.missing_mandatory.append(name)


def _check_resource_item(
    kind: NgapKind, ie_id: int, item: PduResourceItem, report: ValidationReport
) -> None:
    label = f"session {item.pdu_session_id}"
    if not 0 <= item.pdu_session_id <= 255:
        report.malformed.append((label, "session id outside [0, 255]"))
    transfer = item.transfer
    teid = getattr(transfer, "teid", None)
    if teid is not None and len(teid) != 4:
        report.malformed.append((label, f"teid is {len(teid)} octets, expected 4"))
    if ie_id in _REQUEST_LISTS:
        if isinstance(transfer, SetupResponseTransfer):
            report.semantic.append((label, "response transfer inside a setup request"))
        if item.snssai is None:
            report.missing_mandatory.append(f"{label} S-NSSAI")
    if ie_id in _RESPONSE_LISTS and isinstance(transfer, SetupRequestTransfer):
        report.semantic.append((label, "request transfer inside a setup response"))
    if isinstance(transfer, bytes) and not transfer:
        report.missing_mandatory.append(f"{label} transfer")
