"""Byte-exact encoder/decoder for the N1 message set.

``encode_nas``/``decode_nas`` handle complete mobility-management messages
(plain or security-enveloped); ``encode_gsm``/``decode_gsm`` handle the
session-management bodies that ride inside transport payload containers.
The decoder is total: any input yields a message or a ``NasDecodeError``.
"""

from __future__ import annotations

from enum import Enum
from typing import Callable

from .ies import (
    IeError,
    MobileIdentity,
    RawIe,
    Snssai,
    UeSecurityCapability,
    decode_dnn,
    decode_nssai_list,
    encode_dnn,
    encode_nssai_list,
)
from .messages import (
    EPD_5GMM,
    EPD_5GSM,
    MM_KIND,
    MM_TYPE,
    SM_KIND,
    SM_TYPE,
    AuthenticationFailure,
    AuthenticationReject,
    AuthenticationRequest,
    AuthenticationResponse,
    CipheredPayload,
    ConfigurationUpdateCommand,
    DlNasTransport,
    IdentityRequest,
    IdentityResponse,
    MessageKind,
    NasBody,
    NasMessage,
    PduSessionEstablishmentAccept,
    PduSessionEstablishmentReject,
    PduSessionEstablishmentRequest,
    RegistrationAccept,
    RegistrationComplete,
    RegistrationReject,
    RegistrationRequest,
    SecurityHeader,
    SecurityModeCommand,
    SecurityModeComplete,
    SecurityModeReject,
    UlNasTransport,
)


class InvariantViolation(ValueError):
    """Message under construction breaks a structural invariant."""


class DecodeErrorKind(str, Enum):
    TRUNCATED = "Truncated"
    UNKNOWN_MESSAGE_TYPE = "UnknownMessageType"
    UNKNOWN_PROTOCOL_DISCRIMINATOR = "UnknownProtocolDiscriminator"
    BAD_LENGTH = "BadLength"

    def __str__(self) -> str:
        return self.value


class NasDecodeError(Exception):
    def __init__(self, kind: DecodeErrorKind, offset: int, reason: str = ""):
        detail = f"{kind} at offset {offset}" + (f": {reason}" if reason else "")
        super().__init__(detail)
        self.kind = kind
        self.offset = offset
        self.reason = reason


class _R:
    """Octet cursor that raises structured errors with absolute offsets."""

    def __init__(self, data: bytes, base: int = 0):
        self.data = data
        self.pos = 0
        self.base = base

    @property
    def offset(self) -> int:
        return self.base + self.pos

    def left(self) -> int:
        return len(self.data) - self.pos

    def u8(self) -> int:
        if self.pos >= len(self.data):
            raise NasDecodeError(DecodeErrorKind.TRUNCATED, self.offset)
        v = self.data[self.pos]
        self.pos += 1
        return v

    def take(self, n: int, what: str = "") -> bytes:
        if self.pos + n > len(self.data):
            raise NasDecodeError(
                DecodeErrorKind.BAD_LENGTH, self.offset, f"{what or 'field'} overruns buffer"
            )
        v = self.data[self.pos : self.pos + n]
        self.pos += n
        return v

    def lv(self, what: str = "") -> bytes:
        return self.take(self.u8(), what)

    def lv_e(self, what: str = "") -> bytes:
        if self.left() < 2:
            raise NasDecodeError(DecodeErrorKind.TRUNCATED, self.offset)
        n = int.from_bytes(self.take(2), "big")
        return self.take(n, what)


# -- optional IE plumbing ------------------------------------------------------

_TV_HALF = "tv_half"
_TV = "tv"
_TLV = "tlv"
_TLV_E = "tlve"


class _Opt:
    def __init__(
        self,
        iei: int,
        fmt: str,
        name: str,
        to_wire: Callable = bytes,
        from_wire: Callable = bytes,
        size: int = 0,
    ):
        self.iei = iei
        self.fmt = fmt
        self.name = name
        self.to_wire = to_wire
        self.from_wire = from_wire
        self.size = size


_id = lambda b: bytes(b)
_u8val = lambda v: bytes([v])
_u8back = lambda b: b[0]


def _enc_optionals(out: bytearray, body, specs: list[_Opt]) -> None:
    for spec in specs:
        value = getattr(body, spec.name)
        if value is None or value is False:
            continue
        if spec.fmt == _TV_HALF:
            out.append(spec.iei << 4 | (spec.to_wire(value) & 0x0F))
            continue
        wire = spec.to_wire(value)
        if spec.fmt == _TV:
            if len(wire) != spec.size:
                raise InvariantViolation(f"{spec.name}: expected {spec.size} octets")
            out.append(spec.iei)
            out.extend(wire)
        elif spec.fmt == _TLV:
            if len(wire) > 255:
                raise InvariantViolation(f"{spec.name} too long for TLV")
            out.append(spec.iei)
            out.append(len(wire))
            out.extend(wire)
        else:  # TLV-E
            out.append(spec.iei)
            out.extend(len(wire).to_bytes(2, "big"))
            out.extend(wire)
    for raw in body.raw_ies:
        if raw.iei >= 0x80 and not raw.long_length:
            out.append(raw.iei & 0xF0 | (raw.value[0] if raw.value else 0) & 0x0F)
        elif raw.long_length:
            out.append(raw.iei)
            out.extend(len(raw.value).to_bytes(2, "big"))
            out.extend(raw.value)
        else:
            out.append(raw.iei)
            out.append(len(raw.value))
            out.extend(raw.value)


def _dec_optionals(r: _R, body, specs: list[_Opt]) -> None:
    by_full = {s.iei: s for s in specs if s.fmt != _TV_HALF}
    by_half = {s.iei: s for s in specs if s.fmt == _TV_HALF}
    while r.left() > 0:
        iei = r.u8()
        if iei >= 0x80 and (iei >> 4) in by_half:
            spec = by_half[iei >> 4]
            setattr(body, spec.name, spec.from_wire(iei & 0x0F))
            continue
        spec = by_full.get(iei)
        if spec is None:
            # unknown IE: one-octet form when the IEI sits in the high range,
            # otherwise assume a short TLV so the rest stays parseable
            if iei >= 0x80:
                body.raw_ies.append(RawIe(iei=iei & 0xF0, value=bytes([iei & 0x0F])))
            else:
                body.raw_ies.append(RawIe(iei=iei, value=r.lv(f"IE {iei:#x}")))
            continue
        if spec.fmt == _TV:
            wire = r.take(spec.size, spec.name)
        elif spec.fmt == _TLV:
            wire = r.lv(spec.name)
        else:
            wire = r.lv_e(spec.name)
        try:
            setattr(body, spec.name, spec.from_wire(wire))
        except (IeError, ValueError):
            # known IEI but unparseable content: preserve, let validation flag it
            body.raw_ies.append(RawIe(iei=iei, value=wire, long_length=spec.fmt == _TLV_E))


def _identity_to_wire(ident: MobileIdentity) -> bytes:
    return ident.encode()


def _identity_from_wire(data: bytes) -> MobileIdentity:
    return MobileIdentity.decode(data)


def _nssai_to_wire(slices: list[Snssai]) -> bytes:
    return encode_nssai_list(slices)


def _snssai_to_wire(s: Snssai) -> bytes:
    return s.encode()


_OPT_SPECS: dict[MessageKind, list[_Opt]] = {
    MessageKind.REGISTRATION_REQUEST: [
        _Opt(0x2E, _TLV, "security_capability", UeSecurityCapability.encode, UeSecurityCapability.decode),
        _Opt(0x2F, _TLV, "requested_nssai", _nssai_to_wire, decode_nssai_list),
        _Opt(0x71, _TLV_E, "nas_container", _id, _id),
    ],
    MessageKind.REGISTRATION_ACCEPT: [
        _Opt(0x77, _TLV_E, "guti", _identity_to_wire, _identity_from_wire),
        _Opt(0x54, _TLV, "tai_list", _id, _id),
        _Opt(0x15, _TLV, "allowed_nssai", _nssai_to_wire, decode_nssai_list),
    ],
    MessageKind.REGISTRATION_COMPLETE: [],
    MessageKind.REGISTRATION_REJECT: [],
    MessageKind.IDENTITY_REQUEST: [],
    MessageKind.IDENTITY_RESPONSE: [],
    MessageKind.AUTHENTICATION_REQUEST: [
        _Opt(0x21, _TV, "rand", _id, _id, size=16),
        _Opt(0x20, _TLV, "autn", _id, _id),
    ],
    MessageKind.AUTHENTICATION_RESPONSE: [
        _Opt(0x2D, _TLV, "response", _id, _id),
    ],
    MessageKind.AUTHENTICATION_FAILURE: [
        _Opt(0x30, _TLV, "auts", _id, _id),
    ],
    MessageKind.AUTHENTICATION_REJECT: [],
    MessageKind.SECURITY_MODE_COMMAND: [
        _Opt(0xE, _TV_HALF, "imeisv_request", lambda v: 1 if v else 0, lambda v: v == 1),
        _Opt(
            0x36,
            _TLV,
            "retransmission_requested",
            lambda v: bytes([0x02 if v else 0x00]),
            lambda b: bool(b and b[0] & 0x02),
        ),
    ],
    MessageKind.SECURITY_MODE_COMPLETE: [
        _Opt(0x77, _TLV_E, "imeisv", _identity_to_wire, _identity_from_wire),
        _Opt(0x71, _TLV_E, "nas_container", _id, _id),
    ],
    MessageKind.SECURITY_MODE_REJECT: [],
    MessageKind.CONFIGURATION_UPDATE_COMMAND: [
        _Opt(0x77, _TLV_E, "guti", _identity_to_wire, _identity_from_wire),
    ],
    MessageKind.UL_NAS_TRANSPORT: [
        _Opt(0x12, _TV, "pdu_session_id", _u8val, _u8back, size=1),
        _Opt(0x8, _TV_HALF, "request_type", lambda v: v, lambda v: v),
        _Opt(0x22, _TLV, "snssai", _snssai_to_wire, Snssai.decode),
        _Opt(0x25, _TLV, "dnn", encode_dnn, decode_dnn),
    ],
    MessageKind.DL_NAS_TRANSPORT: [
        _Opt(0x12, _TV, "pdu_session_id", _u8val, _u8back, size=1),
        _Opt(0x58, _TV, "mm_cause", _u8val, _u8back, size=1),
    ],
    MessageKind.PDU_SESSION_ESTABLISHMENT_REQUEST: [
        _Opt(0x9, _TV_HALF, "pdu_session_type", lambda v: v, lambda v: v),
    ],
    MessageKind.PDU_SESSION_ESTABLISHMENT_ACCEPT: [
        _Opt(0x29, _TLV, "pdu_address", _id, _id),
        _Opt(0x22, _TLV, "snssai", _snssai_to_wire, Snssai.decode),
        _Opt(0x25, _TLV, "dnn", encode_dnn, decode_dnn),
    ],
    MessageKind.PDU_SESSION_ESTABLISHMENT_REJECT: [],
}


# -- mandatory parts -----------------------------------------------------------


def _require(cond: bool, what: str) -> None:
    if not cond:
        raise InvariantViolation(what)


def _enc_mm_body(body, unchecked: bool) -> bytes:
    out = bytearray()
    kind = body.kind

    if kind == MessageKind.REGISTRATION_REQUEST:
        out.append(
            (body.ngksi & 0xF) << 4
            | (0x08 if body.follow_on_request else 0)
            | body.registration_type & 0x07
        )
        if body.mobile_identity is None:
            _require(unchecked, "RegistrationRequest requires a mobile identity")
            out.extend(b"\x00\x00")
        else:
            ident = body.mobile_identity.encode()
            out.extend(len(ident).to_bytes(2, "big"))
            out.extend(ident)
    elif kind == MessageKind.REGISTRATION_ACCEPT:
        if body.result is None:
            _require(unchecked, "RegistrationAccept requires a registration result")
            out.append(0)
        else:
            out.extend(bytes([1, body.result & 0xFF]))
    elif kind == MessageKind.REGISTRATION_REJECT:
        if body.cause is None:
            _require(unchecked, "RegistrationReject requires a cause")
        else:
            out.append(body.cause & 0xFF)
    elif kind == MessageKind.IDENTITY_REQUEST:
        if body.identity_type is None:
            _require(unchecked, "IdentityRequest requires an identity type")
        else:
            out.append(body.identity_type & 0x0F)
    elif kind == MessageKind.IDENTITY_RESPONSE:
        if body.mobile_identity is None:
            _require(unchecked, "IdentityResponse requires a mobile identity")
            out.extend(b"\x00\x00")
        else:
            ident = body.mobile_identity.encode()
            out.extend(len(ident).to_bytes(2, "big"))
            out.extend(ident)
    elif kind == MessageKind.AUTHENTICATION_REQUEST:
        out.append(body.ngksi & 0x0F)
        if body.abba is None:
            _require(unchecked, "AuthenticationRequest requires ABBA")
            out.append(0)
        else:
            out.append(len(body.abba))
            out.extend(body.abba)
    elif kind == MessageKind.SECURITY_MODE_COMMAND:
        out.append((body.ciphering_alg & 0xF) << 4 | body.integrity_alg & 0xF)
        out.append(body.ngksi & 0x0F)
        if body.replayed_capability is None:
            _require(unchecked, "SecurityModeCommand requires replayed capabilities")
            out.append(0)
        else:
            cap = body.replayed_capability.encode()
            out.append(len(cap))
            out.extend(cap)
    elif kind == MessageKind.SECURITY_MODE_REJECT:
        if body.cause is None:
            _require(unchecked, "SecurityModeReject requires a cause")
        else:
            out.append(body.cause & 0xFF)
    elif kind == MessageKind.AUTHENTICATION_FAILURE:
        if body.cause is None:
            _require(unchecked, "AuthenticationFailure requires a cause")
        else:
            out.append(body.cause & 0xFF)
    elif kind in (MessageKind.UL_NAS_TRANSPORT, MessageKind.DL_NAS_TRANSPORT):
        if body.container_type is None:
            _require(unchecked, f"{kind} requires a payload container type")
            out.append(0)
        else:
            out.append(body.container_type & 0x0F)
        if body.payload is None:
            _require(unchecked, f"{kind} requires a payload container")
            out.extend(b"\x00\x00")
        else:
            out.extend(len(body.payload).to_bytes(2, "big"))
            out.extend(body.payload)
    # remaining kinds have no mandatory part beyond the header
    return bytes(out)


def _enc_sm_body(body, unchecked: bool) -> bytes:
    out = bytearray()
    kind = body.kind
    if kind == MessageKind.PDU_SESSION_ESTABLISHMENT_REQUEST:
        if body.max_data_rate is None:
            _require(unchecked, "establishment request requires the max data rate")
        else:
            _require(len(body.max_data_rate) == 2, "max data rate is 2 octets")
            out.extend(body.max_data_rate)
    elif kind == MessageKind.PDU_SESSION_ESTABLISHMENT_ACCEPT:
        out.append((body.selected_ssc & 0x7) << 4 | body.selected_type & 0x07)
        if body.qos_rules is None:
            _require(unchecked, "establishment accept requires QoS rules")
            out.extend(b"\x00\x00")
        else:
            out.extend(len(body.qos_rules).to_bytes(2, "big"))
            out.extend(body.qos_rules)
        if body.ambr is None:
            _require(unchecked, "establishment accept requires the session AMBR")
            out.append(0)
        else:
            _require(len(body.ambr) == 6, "session AMBR is 6 octets")
            out.append(len(body.ambr))
            out.extend(body.ambr)
    elif kind == MessageKind.PDU_SESSION_ESTABLISHMENT_REJECT:
        if body.cause is None:
            _require(unchecked, "establishment reject requires a cause")
        else:
            out.append(body.cause & 0xFF)
    return bytes(out)


def encode_gsm(body, unchecked: bool = False) -> bytes:
    """Encode one session-management body for a transport payload container."""
    if body.kind not in SM_TYPE:
        raise InvariantViolation(f"{body.kind} is not a session-management body")
    out = bytearray([EPD_5GSM, body.pdu_session_id & 0xFF, body.pti & 0xFF, SM_TYPE[body.kind]])
    out.extend(_enc_sm_body(body, unchecked))
    _enc_optionals(out, body, _OPT_SPECS[body.kind])
    return bytes(out)


def decode_gsm(data: bytes, base: int = 0):
    r = _R(data, base)
    epd = r.u8()
    if epd != EPD_5GSM:
        raise NasDecodeError(
            DecodeErrorKind.UNKNOWN_PROTOCOL_DISCRIMINATOR, base, f"expected 0x2E, got {epd:#04x}"
        )
    psi = r.u8()
    pti = r.u8()
    mt = r.u8()
    kind = SM_KIND.get(mt)
    if kind is None:
        raise NasDecodeError(
            DecodeErrorKind.UNKNOWN_MESSAGE_TYPE, base + 3, f"5GSM type {mt:#04x}"
        )
    if kind == MessageKind.PDU_SESSION_ESTABLISHMENT_REQUEST:
        body = PduSessionEstablishmentRequest(
            pdu_session_id=psi, pti=pti, max_data_rate=r.take(2, "max data rate"), pdu_session_type=None
        )
    elif kind == MessageKind.PDU_SESSION_ESTABLISHMENT_ACCEPT:
        sel = r.u8()
        body = PduSessionEstablishmentAccept(
            pdu_session_id=psi,
            pti=pti,
            selected_type=sel & 0x07,
            selected_ssc=sel >> 4 & 0x7,
            qos_rules=r.lv_e("QoS rules"),
            ambr=r.lv("session AMBR"),
        )
    else:
        body = PduSessionEstablishmentReject(pdu_session_id=psi, pti=pti, cause=r.u8())
    _dec_optionals(r, body, _OPT_SPECS[kind])
    return body


def _encode_plain(body, unchecked: bool = False) -> bytes:
    out = bytearray([EPD_5GMM, SecurityHeader.PLAIN, MM_TYPE[body.kind]])
    out.extend(_enc_mm_body(body, unchecked))
    _enc_optionals(out, body, _OPT_SPECS[body.kind])
    return bytes(out)


def encode_nas(msg: NasMessage, unchecked: bool = False) -> bytes:
    """Encode a complete N1 message (envelope included).

    Raises :class:`InvariantViolation` when field constraints are broken;
    ``unchecked`` relaxes mandatory-presence checks so deliberately broken
    messages can still be put on the wire.
    """
    body = msg.body
    if isinstance(body, CipheredPayload):
        if msg.security_header not in (
            SecurityHeader.INTEGRITY_CIPHERED,
            SecurityHeader.INTEGRITY_CIPHERED_NEW_CONTEXT,
        ):
            raise InvariantViolation("ciphered payload requires a ciphered security header")
        inner = body.octets
    elif body.kind in SM_TYPE:
        raise InvariantViolation("5GSM bodies travel only inside transport payload containers")
    elif body.kind not in MM_TYPE:
        raise InvariantViolation(f"cannot encode body kind {body.kind}")
    else:
        inner = _encode_plain(body, unchecked)

    if msg.security_header == SecurityHeader.PLAIN:
        if msg.mac is not None or msg.sequence_number is not None:
            raise InvariantViolation("plain messages carry no MAC or sequence number")
        return inner
    if msg.mac is None or msg.sequence_number is None:
        raise InvariantViolation("protected messages require mac and sequence_number")
    if len(msg.mac) != 4:
        raise InvariantViolation("mac is 4 octets")
    out = bytearray([EPD_5GMM, msg.security_header])
    out.extend(msg.mac)
    out.append(msg.sequence_number & 0xFF)
    out.extend(inner)
    return bytes(out)


def _decode_plain_mm(r: _R) -> NasBody:
    mt = r.u8()
    kind = MM_KIND.get(mt)
    if kind is None:
        raise NasDecodeError(
            DecodeErrorKind.UNKNOWN_MESSAGE_TYPE, r.offset - 1, f"5GMM type {mt:#04x}"
        )
    if kind == MessageKind.REGISTRATION_REQUEST:
        first = r.u8()
        ident_raw = r.lv_e("mobile identity")
        body = RegistrationRequest(
            registration_type=first & 0x07,
            follow_on_request=bool(first & 0x08),
            ngksi=first >> 4,
            mobile_identity=None,
            security_capability=None,
        )
        if ident_raw:
            try:
                body.mobile_identity = MobileIdentity.decode(ident_raw)
            except IeError as exc:
                raise NasDecodeError(DecodeErrorKind.BAD_LENGTH, r.offset, str(exc)) from exc
    elif kind == MessageKind.REGISTRATION_ACCEPT:
        result_raw = r.lv("registration result")
        body = RegistrationAccept(result=result_raw[0] if result_raw else None)
    elif kind == MessageKind.REGISTRATION_COMPLETE:
        body = RegistrationComplete()
    elif kind == MessageKind.REGISTRATION_REJECT:
        body = RegistrationReject(cause=r.u8() if r.left() else None)
    elif kind == MessageKind.IDENTITY_REQUEST:
        body = IdentityRequest(identity_type=(r.u8() & 0x0F) if r.left() else None)
    elif kind == MessageKind.IDENTITY_RESPONSE:
        ident_raw = r.lv_e("mobile identity")
        body = IdentityResponse()
        if ident_raw:
            try:
                body.mobile_identity = MobileIdentity.decode(ident_raw)
            except IeError as exc:
                raise NasDecodeError(DecodeErrorKind.BAD_LENGTH, r.offset, str(exc)) from exc
    elif kind == MessageKind.AUTHENTICATION_REQUEST:
        ngksi = r.u8() & 0x0F
        body = AuthenticationRequest(ngksi=ngksi, abba=r.lv("abba"), rand=None, autn=None)
    elif kind == MessageKind.AUTHENTICATION_RESPONSE:
        body = AuthenticationResponse()
    elif kind == MessageKind.AUTHENTICATION_FAILURE:
        body = AuthenticationFailure(cause=r.u8() if r.left() else None)
    elif kind == MessageKind.AUTHENTICATION_REJECT:
        body = AuthenticationReject()
    elif kind == MessageKind.SECURITY_MODE_COMMAND:
        algs = r.u8()
        ngksi = r.u8() & 0x0F
        cap_raw = r.lv("replayed capabilities")
        body = SecurityModeCommand(
            ciphering_alg=algs >> 4,
            integrity_alg=algs & 0x0F,
            ngksi=ngksi,
            replayed_capability=None,
        )
        if cap_raw:
            try:
                body.replayed_capability = UeSecurityCapability.decode(cap_raw)
            except IeError as exc:
                raise NasDecodeError(DecodeErrorKind.BAD_LENGTH, r.offset, str(exc)) from exc
    elif kind == MessageKind.SECURITY_MODE_COMPLETE:
        body = SecurityModeComplete()
    elif kind == MessageKind.SECURITY_MODE_REJECT:
        body = SecurityModeReject(cause=r.u8() if r.left() else None)
    elif kind == MessageKind.CONFIGURATION_UPDATE_COMMAND:
        body = ConfigurationUpdateCommand()
    elif kind == MessageKind.UL_NAS_TRANSPORT:
        first = r.u8() & 0x0F
        body = UlNasTransport(container_type=first, payload=r.lv_e("payload container"))
    else:  # DL NAS transport
        first = r.u8() & 0x0F
        body = DlNasTransport(container_type=first, payload=r.lv_e("payload container"))
    _dec_optionals(r, body, _OPT_SPECS[kind])
    return body


def decode_nas(data: bytes, base: int = 0) -> NasMessage:
    """Decode one complete N1 message; total over arbitrary octet strings."""
    try:
        return _decode_nas_inner(data, base)
    except NasDecodeError:
        raise
    except Exception as exc:  # decoder must never leak raw exceptions
        raise NasDecodeError(DecodeErrorKind.BAD_LENGTH, base, f"internal: {exc}") from exc


def _decode_nas_inner(data: bytes, base: int) -> NasMessage:
    r = _R(data, base)
    epd = r.u8()
    if epd == EPD_5GSM:
        raise NasDecodeError(
            DecodeErrorKind.UNKNOWN_PROTOCOL_DISCRIMINATOR,
            base,
            "session-management PDU outside a payload container",
        )
    if epd != EPD_5GMM:
        raise NasDecodeError(
            DecodeErrorKind.UNKNOWN_PROTOCOL_DISCRIMINATOR, base, f"discriminator {epd:#04x}"
        )
    sht_octet = r.u8()
    try:
        sht = SecurityHeader(sht_octet & 0x0F)
    except ValueError:
        raise NasDecodeError(
            DecodeErrorKind.UNKNOWN_MESSAGE_TYPE,
            base + 1,
            f"security header type {sht_octet & 0x0F}",
        ) from None
    if sht == SecurityHeader.PLAIN:
        body = _decode_plain_mm(r)
        return NasMessage(body=body)
    mac = r.take(4, "mac")
    seq = r.u8()
    inner = data[r.pos :]
    if not inner:
        raise NasDecodeError(DecodeErrorKind.TRUNCATED, base + r.pos, "empty protected payload")
    if sht in (SecurityHeader.INTEGRITY, SecurityHeader.INTEGRITY_NEW_CONTEXT):
        inner_msg = decode_nas(inner, base + r.pos)
        if inner_msg.security_header != SecurityHeader.PLAIN:
            raise NasDecodeError(
                DecodeErrorKind.BAD_LENGTH, base + r.pos, "nested protected envelope"
            )
        body: NasBody = inner_msg.body
    else:
        body = CipheredPayload(octets=inner)
    return NasMessage(body=body, security_header=sht, mac=mac, sequence_number=seq)
