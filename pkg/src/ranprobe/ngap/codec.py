"""Top-level NG-C PDU encoder/decoder (aligned PER)."""

from __future__ import annotations

from enum import Enum

from .ies import Criticality, RawNgapIe, skip_extension_additions
from .messages import IE_CODECS, IE_RULES, KIND_BY_KEY, NgapIe, NgapPdu, Outcome
from .per import BitReader, BitWriter, PerEncodeError, PerError


class NgapEncodeError(ValueError):
    """PDU under construction violates its constraints."""


class MissingMandatoryIe(NgapEncodeError):
    def __init__(self, kind, missing: list[int]):
        super().__init__(f"{kind}: missing mandatory IE(s) {missing}")
        self.missing = missing


class NgapErrorKind(str, Enum):
    TRUNCATED = "Truncated"
    UNKNOWN_PROCEDURE = "UnknownProcedure"
    CONSTRAINT_VIOLATION = "ConstraintViolation"

    def __str__(self) -> str:
        return self.value


class NgapDecodeError(Exception):
    def __init__(self, kind: NgapErrorKind, bit_offset: int, reason: str = ""):
        detail = f"{kind} at bit {bit_offset}" + (f": {reason}" if reason else "")
        super().__init__(detail)
        self.kind = kind
        self.bit_offset = bit_offset
        self.reason = reason


def encode_ngap(pdu: NgapPdu, unchecked: bool = False) -> bytes:
    """Encode one PDU to canonical aligned-PER octets.

    Mandatory-IE presence is enforced per message kind unless ``unchecked``
    (robustness mutations need to emit deliberately incomplete PDUs).
    """
    kind = pdu.kind
    if kind is None:
        raise NgapEncodeError(
            f"no message kind for outcome={pdu.outcome} code={pdu.procedure_code}"
        )
    if not unchecked:
        present = {ie.ie_id for ie in pdu.ies}
        missing = [r.ie_id for r in IE_RULES[kind] if r.mandatory and r.ie_id not in present]
        if missing:
            raise MissingMandatoryIe(kind, missing)

    try:
        content = _encode_content(pdu)
        w = BitWriter()
        w.put_bit(0)  # NGAP-PDU choice within root alternatives
        w.put_bits(pdu.outcome, 2)
        w.align()
        w.put_bits(pdu.procedure_code, 8)
        w.put_bits(pdu.criticality, 2)
        w.put_open_type(content)
        return w.to_bytes()
    except (PerEncodeError, ValueError) as exc:
        raise NgapEncodeError(str(exc)) from exc


def _encode_content(pdu: NgapPdu) -> bytes:
    w = BitWriter()
    w.put_bit(0)  # message sequence: no extension additions
    w.put_constrained_int(len(pdu.ies), 0, 65535)
    for ie in pdu.ies:
        w.put_constrained_int(ie.ie_id, 0, 65535)
        w.put_bits(ie.criticality, 2)
        if isinstance(ie.value, RawNgapIe):
            w.put_open_type(ie.value.content)
            continue
        codec = IE_CODECS.get(ie.ie_id)
        if codec is None:
            raise NgapEncodeError(f"IE {ie.ie_id} has no codec; wrap it in RawNgapIe")
        inner = BitWriter()
        codec[1](inner, ie.value)
        w.put_open_type(inner.to_bytes())
    return w.to_bytes()


def decode_ngap(data: bytes) -> NgapPdu:
    """Decode octets into a PDU; total over arbitrary input."""
    try:
        return _decode_inner(data)
    except NgapDecodeError:
        raise
    except PerError as exc:
        kind = (
            NgapErrorKind.TRUNCATED
            if "truncated" in str(exc)
            else NgapErrorKind.CONSTRAINT_VIOLATION
        )
        raise NgapDecodeError(kind, exc.bit_offset, str(exc)) from exc
    except Exception as exc:  # decoder must never leak raw exceptions
        raise NgapDecodeError(NgapErrorKind.CONSTRAINT_VIOLATION, 0, f"internal: {exc}") from exc


def _decode_inner(data: bytes) -> NgapPdu:
    r = BitReader(data)
    if r.get_bit():
        raise NgapDecodeError(
            NgapErrorKind.UNKNOWN_PROCEDURE, 0, "extension alternative of the PDU choice"
        )
    outcome_bits = r.get_bits(2)
    if outcome_bits > 2:
        raise NgapDecodeError(NgapErrorKind.CONSTRAINT_VIOLATION, 1, "choice index 3")
    outcome = Outcome(outcome_bits)
    r.align()
    code = r.get_bits(8)
    crit_bits = r.get_bits(2)
    if crit_bits > 2:
        raise NgapDecodeError(NgapErrorKind.CONSTRAINT_VIOLATION, r.bit_offset, "criticality 3")
    criticality = Criticality(crit_bits)
    kind = KIND_BY_KEY.get((outcome, code))
    if kind is None:
        raise NgapDecodeError(
            NgapErrorKind.UNKNOWN_PROCEDURE,
            r.bit_offset,
            f"outcome {outcome.name} procedure {code}",
        )
    content = BitReader(r.get_open_type())

    ext = content.get_bit()
    count = content.get_constrained_int(0, 65535)
    if count > 512:
        raise NgapDecodeError(
            NgapErrorKind.CONSTRAINT_VIOLATION, content.bit_offset, f"{count} IEs"
        )
    ies: list[NgapIe] = []
    for _ in range(count):
        ie_id = content.get_constrained_int(0, 65535)
        crit = Criticality(content.get_bits(2))
        raw = content.get_open_type()
        codec = IE_CODECS.get(ie_id)
        if codec is None:
            ies.append(NgapIe(ie_id=ie_id, criticality=crit, value=RawNgapIe(bytes(raw))))
            continue
        try:
            value = codec[2](BitReader(raw))
        except PerError:
            # known id, unparseable content: keep octets, let validation flag it
            value = RawNgapIe(bytes(raw))
        ies.append(NgapIe(ie_id=ie_id, criticality=crit, value=value))
    if ext:
        skip_extension_additions(content)
    return NgapPdu(outcome=outcome, procedure_code=code, criticality=criticality, ies=ies)
