"""NG-C PDU model: the eleven message kinds and their IE tables."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum, IntEnum

from ..nas.ies import Snssai
from .ies import (
    AggregateMaxBitRate,
    Cause,
    Criticality,
    GlobalRanNodeId,
    Guami,
    PduResourceItem,
    PlmnSupport,
    RawNgapIe,
    ServedGuami,
    TaiSliceSupport,
    UeSecurityCapsIe,
    UserLocation,
    _decode_name,
    _encode_name,
    decode_allowed_nssai,
    decode_plmn_support_list,
    decode_session_failed_items,
    decode_session_request_items,
    decode_session_response_items,
    decode_supported_ta_list,
    encode_allowed_nssai,
    encode_plmn_support_list,
    encode_session_failed_items,
    encode_session_request_items,
    encode_session_response_items,
    encode_supported_ta_list,
)
from .per import BitReader, BitWriter


class Outcome(IntEnum):
    INITIATING = 0
    SUCCESSFUL = 1
    UNSUCCESSFUL = 2


class ProcedureCode(IntEnum):
    DOWNLINK_NAS_TRANSPORT = 4
    INITIAL_CONTEXT_SETUP = 14
    INITIAL_UE_MESSAGE = 15
    NG_SETUP = 21
    PDU_SESSION_RESOURCE_SETUP = 29
    UPLINK_NAS_TRANSPORT = 46


class NgapKind(str, Enum):
    NG_SETUP_REQUEST = "NGSetupRequest"
    NG_SETUP_RESPONSE = "NGSetupResponse"
    NG_SETUP_FAILURE = "NGSetupFailure"
    INITIAL_UE_MESSAGE = "InitialUEMessage"
    DOWNLINK_NAS_TRANSPORT = "DownlinkNASTransport"
    UPLINK_NAS_TRANSPORT = "UplinkNASTransport"
    INITIAL_CONTEXT_SETUP_REQUEST = "InitialContextSetupRequest"
    INITIAL_CONTEXT_SETUP_RESPONSE = "InitialContextSetupResponse"
    INITIAL_CONTEXT_SETUP_FAILURE = "InitialContextSetupFailure"
    PDU_SESSION_RESOURCE_SETUP_REQUEST = "PDUSessionResourceSetupRequest"
    PDU_SESSION_RESOURCE_SETUP_RESPONSE = "PDUSessionResourceSetupResponse"

    def __str__(self) -> str:
        return self.value


KIND_BY_KEY: dict[tuple[Outcome, int], NgapKind] = {
    (Outcome.INITIATING, ProcedureCode.NG_SETUP): NgapKind.NG_SETUP_REQUEST,
    (Outcome.SUCCESSFUL, ProcedureCode.NG_SETUP): NgapKind.NG_SETUP_RESPONSE,
    (Outcome.UNSUCCESSFUL, ProcedureCode.NG_SETUP): NgapKind.NG_SETUP_FAILURE,
    (Outcome.INITIATING, ProcedureCode.INITIAL_UE_MESSAGE): NgapKind.INITIAL_UE_MESSAGE,
    (Outcome.INITIATING, ProcedureCode.DOWNLINK_NAS_TRANSPORT): NgapKind.DOWNLINK_NAS_TRANSPORT,
    (Outcome.INITIATING, ProcedureCode.UPLINK_NAS_TRANSPORT): NgapKind.UPLINK_NAS_TRANSPORT,
    (Outcome.INITIATING, ProcedureCode.INITIAL_CONTEXT_SETUP): NgapKind.INITIAL_CONTEXT_SETUP_REQUEST,
    (Outcome.SUCCESSFUL, ProcedureCode.INITIAL_CONTEXT_SETUP): NgapKind.INITIAL_CONTEXT_SETUP_RESPONSE,
    (Outcome.UNSUCCESSFUL, ProcedureCode.INITIAL_CONTEXT_SETUP): NgapKind.INITIAL_CONTEXT_SETUP_FAILURE,
    (Outcome.INITIATING, ProcedureCode.PDU_SESSION_RESOURCE_SETUP): NgapKind.PDU_SESSION_RESOURCE_SETUP_REQUEST,
    (Outcome.SUCCESSFUL, ProcedureCode.PDU_SESSION_RESOURCE_SETUP): NgapKind.PDU_SESSION_RESOURCE_SETUP_RESPONSE,
}
KEY_BY_KIND = {kind: key for key, kind in KIND_BY_KEY.items()}

# criticality of the elementary procedure itself
PROCEDURE_CRITICALITY = {
    ProcedureCode.NG_SETUP: Criticality.REJECT,
    ProcedureCode.INITIAL_UE_MESSAGE: Criticality.IGNORE,
    ProcedureCode.DOWNLINK_NAS_TRANSPORT: Criticality.IGNORE,
    ProcedureCode.UPLINK_NAS_TRANSPORT: Criticality.IGNORE,
    ProcedureCode.INITIAL_CONTEXT_SETUP: Criticality.REJECT,
    ProcedureCode.PDU_SESSION_RESOURCE_SETUP: Criticality.REJECT,
}


class IeId(IntEnum):
    ALLOWED_NSSAI = 0
    AMF_NAME = 1
    AMF_UE_NGAP_ID = 10
    CAUSE = 15
    DEFAULT_PAGING_DRX = 21
    GLOBAL_RAN_NODE_ID = 27
    GUAMI = 28
    NAS_PDU = 38
    FAILED_LIST_CXT_RES = 55
    FAILED_LIST_SU_RES = 58
    SETUP_LIST_CXT_REQ = 71
    SETUP_LIST_CXT_RES = 72
    SETUP_LIST_SU_REQ = 74
    SETUP_LIST_SU_RES = 75
    PLMN_SUPPORT_LIST = 80
    RAN_NODE_NAME = 82
    RAN_UE_NGAP_ID = 85
    RELATIVE_AMF_CAPACITY = 86
    RRC_ESTABLISHMENT_CAUSE = 90
    SECURITY_KEY = 94
    SERVED_GUAMI_LIST = 96
    SUPPORTED_TA_LIST = 102
    UE_AGGREGATE_MAX_BIT_RATE = 110
    UE_CONTEXT_REQUEST = 112
    FAILED_LIST_CXT_FAIL = 132
    UE_SECURITY_CAPABILITIES = 119
    USER_LOCATION = 121


@dataclass
class NgapIe:
    ie_id: int
    criticality: Criticality
    value: object  # typed IE object or RawNgapIe for unknown ids


@dataclass
class NgapPdu:
    outcome: Outcome
    procedure_code: int
    criticality: Criticality
    ies: list[NgapIe] = field(default_factory=list)

    @property
    def kind(self) -> NgapKind | None:
        return KIND_BY_KEY.get((self.outcome, self.procedure_code))

    def ie(self, ie_id: int):
        for entry in self.ies:
            if entry.ie_id == ie_id:
                return entry.value
        return None

    @property
    def nas_pdu(self) -> bytes | None:
        value = self.ie(IeId.NAS_PDU)
        return value if isinstance(value, bytes) else None


# -- per-IE content codecs ------------------------------------------------------


def _enc_u40(w: BitWriter, v: int) -> None:
    w.put_constrained_int(v, 0, (1 << 40) - 1)


def _enc_u32(w: BitWriter, v: int) -> None:
    w.put_constrained_int(v, 0, (1 << 32) - 1)


def _enc_octets(w: BitWriter, v: bytes) -> None:
    w.put_length(len(v))
    w.put_octets(v)


def _dec_octets(r: BitReader) -> bytes:
    return bytes(r.get_octets(r.get_length()))


def _enc_ext_enum(roots: int):
    def enc(w: BitWriter, v: int) -> None:
        w.put_bit(0)
        w.put_constrained_int(v, 0, roots - 1)

    return enc


def _dec_ext_enum(roots: int):
    def dec(r: BitReader) -> int:
        if r.get_bit():
            return r.get_normally_small() + roots
        return r.get_constrained_int(0, roots - 1)

    return dec


def _enc_security_key(w: BitWriter, v: bytes) -> None:
    if len(v) != 32:
        raise ValueError(f"security key must be 32 octets, got {len(v)}")
    w.put_octets(v)  # BIT STRING (SIZE(256)): aligned, fixed


def _dec_security_key(r: BitReader) -> bytes:
    return bytes(r.get_octets(32))


def _method(enc, dec):
    return (lambda w, v: enc(w, v)), (lambda r: dec(r))


# ie_id -> (field label, encoder(writer, value), decoder(reader) -> value)
IE_CODECS: dict[int, tuple[str, object, object]] = {
    IeId.ALLOWED_NSSAI: ("allowed_nssai", encode_allowed_nssai, decode_allowed_nssai),
    IeId.AMF_NAME: ("amf_name", _encode_name, _decode_name),
    IeId.AMF_UE_NGAP_ID: ("amf_ue_ngap_id", _enc_u40, lambda r: r.get_constrained_int(0, (1 << 40) - 1)),
    IeId.CAUSE: ("cause", lambda w, v: v.encode(w), Cause.decode),
    IeId.DEFAULT_PAGING_DRX: ("default_paging_drx", _enc_ext_enum(4), _dec_ext_enum(4)),
    IeId.GLOBAL_RAN_NODE_ID: ("global_ran_node_id", lambda w, v: v.encode(w), GlobalRanNodeId.decode),
    IeId.GUAMI: ("guami", lambda w, v: v.encode(w), Guami.decode),
    IeId.NAS_PDU: ("nas_pdu", _enc_octets, _dec_octets),
    IeId.FAILED_LIST_CXT_RES: ("failed_to_setup", encode_session_failed_items, decode_session_failed_items),
    IeId.FAILED_LIST_SU_RES: ("failed_to_setup", encode_session_failed_items, decode_session_failed_items),
    IeId.FAILED_LIST_CXT_FAIL: ("failed_to_setup", encode_session_failed_items, decode_session_failed_items),
    IeId.SETUP_LIST_CXT_REQ: ("session_setup_request", encode_session_request_items, decode_session_request_items),
    IeId.SETUP_LIST_CXT_RES: ("session_setup_response", encode_session_response_items, decode_session_response_items),
    IeId.SETUP_LIST_SU_REQ: ("session_setup_request", encode_session_request_items, decode_session_request_items),
    IeId.SETUP_LIST_SU_RES: ("session_setup_response", encode_session_response_items, decode_session_response_items),
    IeId.PLMN_SUPPORT_LIST: ("plmn_support", encode_plmn_support_list, decode_plmn_support_list),
    IeId.RAN_NODE_NAME: ("ran_node_name", _encode_name, _decode_name),
    IeId.RAN_UE_NGAP_ID: ("ran_ue_ngap_id", _enc_u32, lambda r: r.get_constrained_int(0, (1 << 32) - 1)),
    IeId.RELATIVE_AMF_CAPACITY: ("relative_capacity", lambda w, v: w.put_constrained_int(v, 0, 255), lambda r: r.get_constrained_int(0, 255)),
    IeId.RRC_ESTABLISHMENT_CAUSE: ("rrc_establishment_cause", _enc_ext_enum(10), _dec_ext_enum(10)),
    IeId.SECURITY_KEY: ("security_key", _enc_security_key, _dec_security_key),
    IeId.SERVED_GUAMI_LIST: (
        "served_guamis",
        lambda w, v: (w.put_constrained_int(len(v), 1, 256), [g.encode(w) for g in v]) and None,
        lambda r: [ServedGuami.decode(r) for _ in range(r.get_constrained_int(1, 256))],
    ),
    IeId.SUPPORTED_TA_LIST: ("supported_tas", encode_supported_ta_list, decode_supported_ta_list),
    IeId.UE_AGGREGATE_MAX_BIT_RATE: ("ue_ambr", lambda w, v: v.encode(w), AggregateMaxBitRate.decode),
    IeId.UE_CONTEXT_REQUEST: ("ue_context_request", _enc_ext_enum(1), _dec_ext_enum(1)),
    IeId.UE_SECURITY_CAPABILITIES: ("ue_security_capabilities", lambda w, v: v.encode(w), UeSecurityCapsIe.decode),
    IeId.USER_LOCATION: ("user_location", lambda w, v: v.encode(w), UserLocation.decode),
}


@dataclass(frozen=True)
class IeRule:
    ie_id: int
    criticality: Criticality
    mandatory: bool


_R, _I = Criticality.REJECT, Criticality.IGNORE

# ascending ie_id; mandatory sets drive both the encoder check and validation
IE_RULES: dict[NgapKind, tuple[IeRule, ...]] = {
    NgapKind.NG_SETUP_REQUEST: (
        IeRule(IeId.DEFAULT_PAGING_DRX, _I, True),
        IeRule(IeId.GLOBAL_RAN_NODE_ID, _R, True),
        IeRule(IeId.RAN_NODE_NAME, _I, False),
        IeRule(IeId.SUPPORTED_TA_LIST, _R, True),
    ),
    NgapKind.NG_SETUP_RESPONSE: (
        IeRule(IeId.AMF_NAME, _R, True),
        IeRule(IeId.PLMN_SUPPORT_LIST, _R, True),
        IeRule(IeId.RELATIVE_AMF_CAPACITY, _I, True),
        IeRule(IeId.SERVED_GUAMI_LIST, _R, True),
    ),
    NgapKind.NG_SETUP_FAILURE: (
        IeRule(IeId.CAUSE, _I, True),
    ),
    NgapKind.INITIAL_UE_MESSAGE: (
        IeRule(IeId.NAS_PDU, _R, True),
        IeRule(IeId.RAN_UE_NGAP_ID, _R, True),
        IeRule(IeId.RRC_ESTABLISHMENT_CAUSE, _I, True),
        IeRule(IeId.UE_CONTEXT_REQUEST, _I, False),
        IeRule(IeId.USER_LOCATION, _R, True),
    ),
    NgapKind.DOWNLINK_NAS_TRANSPORT: (
        IeRule(IeId.AMF_UE_NGAP_ID, _R, True),
        IeRule(IeId.NAS_PDU, _R, True),
        IeRule(IeId.RAN_UE_NGAP_ID, _R, True),
    ),
    NgapKind.UPLINK_NAS_TRANSPORT: (
        IeRule(IeId.AMF_UE_NGAP_ID, _R, True),
        IeRule(IeId.NAS_PDU, _R, True),
        IeRule(IeId.RAN_UE_NGAP_ID, _R, True),
        IeRule(IeId.USER_LOCATION, _I, True),
    ),
    NgapKind.INITIAL_CONTEXT_SETUP_REQUEST: (
        IeRule(IeId.ALLOWED_NSSAI, _R, True),
        IeRule(IeId.AMF_UE_NGAP_ID, _R, True),
        IeRule(IeId.GUAMI, _R, True),
        IeRule(IeId.NAS_PDU, _I, False),
        IeRule(IeId.SETUP_LIST_CXT_REQ, _R, False),
        IeRule(IeId.RAN_UE_NGAP_ID, _R, True),
        IeRule(IeId.SECURITY_KEY, _R, True),
        IeRule(IeId.UE_AGGREGATE_MAX_BIT_RATE, _R, False),
        IeRule(IeId.UE_SECURITY_CAPABILITIES, _R, True),
    ),
    NgapKind.INITIAL_CONTEXT_SETUP_RESPONSE: (
        IeRule(IeId.AMF_UE_NGAP_ID, _I, True),
        IeRule(IeId.FAILED_LIST_CXT_RES, _I, False),
        IeRule(IeId.SETUP_LIST_CXT_RES, _I, False),
        IeRule(IeId.RAN_UE_NGAP_ID, _I, True),
    ),
    NgapKind.INITIAL_CONTEXT_SETUP_FAILURE: (
        IeRule(IeId.AMF_UE_NGAP_ID, _I, True),
        IeRule(IeId.CAUSE, _I, True),
        IeRule(IeId.RAN_UE_NGAP_ID, _I, True),
        IeRule(IeId.FAILED_LIST_CXT_FAIL, _I, False),
    ),
    NgapKind.PDU_SESSION_RESOURCE_SETUP_REQUEST: (
        IeRule(IeId.AMF_UE_NGAP_ID, _R, True),
        IeRule(IeId.NAS_PDU, _I, False),
        IeRule(IeId.SETUP_LIST_SU_REQ, _R, True),
        IeRule(IeId.RAN_UE_NGAP_ID, _R, True),
        IeRule(IeId.UE_AGGREGATE_MAX_BIT_RATE, _I, False),
    ),
    NgapKind.PDU_SESSION_RESOURCE_SETUP_RESPONSE: (
        IeRule(IeId.AMF_UE_NGAP_ID, _I, True),
        IeRule(IeId.FAILED_LIST_SU_RES, _I, False),
        IeRule(IeId.SETUP_LIST_SU_RES, _I, False),
        IeRule(IeId.RAN_UE_NGAP_ID, _I, True),
    ),
}

_RULE_INDEX = {
    (kind, rule.ie_id): rule for kind, rules in IE_RULES.items() for rule in rules
}


def _make(kind: NgapKind, values: list[tuple[int, object]]) -> NgapPdu:
    outcome, code = KEY_BY_KIND[kind]
    ies = [
        NgapIe(ie_id=ie_id, criticality=_RULE_INDEX[(kind, ie_id)].criticality, value=value)
        for ie_id, value in sorted(values, key=lambda kv: kv[0])
        if value is not None
    ]
    return NgapPdu(
        outcome=outcome,
        procedure_code=code,
        criticality=PROCEDURE_CRITICALITY[ProcedureCode(code)],
        ies=ies,
    )


# -- builders -------------------------------------------------------------------


def ng_setup_request(
    node: GlobalRanNodeId,
    tas: list[TaiSliceSupport],
    node_name: str | None = None,
    paging_drx: int = 2,
) -> NgapPdu:
    return _make(
        NgapKind.NG_SETUP_REQUEST,
        [
            (IeId.GLOBAL_RAN_NODE_ID, node),
            (IeId.RAN_NODE_NAME, node_name),
            (IeId.SUPPORTED_TA_LIST, tas),
            (IeId.DEFAULT_PAGING_DRX, paging_drx),
        ],
    )


def ng_setup_response(
    amf_name: str,
    served_guamis: list[ServedGuami],
    relative_capacity: int,
    plmn_support: list[PlmnSupport],
) -> NgapPdu:
    return _make(
        NgapKind.NG_SETUP_RESPONSE,
        [
            (IeId.AMF_NAME, amf_name),
            (IeId.SERVED_GUAMI_LIST, served_guamis),
            (IeId.RELATIVE_AMF_CAPACITY, relative_capacity),
            (IeId.PLMN_SUPPORT_LIST, plmn_support),
        ],
    )


def ng_setup_failure(cause: Cause) -> NgapPdu:
    return _make(NgapKind.NG_SETUP_FAILURE, [(IeId.CAUSE, cause)])


def initial_ue_message(
    ran_ue_ngap_id: int,
    nas_pdu: bytes,
    location: UserLocation,
    establishment_cause: int = 3,  # mo-Signalling
    request_context: bool = True,
) -> NgapPdu:
    return _make(
        NgapKind.INITIAL_UE_MESSAGE,
        [
            (IeId.RAN_UE_NGAP_ID, ran_ue_ngap_id),
            (IeId.NAS_PDU, nas_pdu),
            (IeId.USER_LOCATION, location),
            (IeId.RRC_ESTABLISHMENT_CAUSE, establishment_cause),
            (IeId.UE_CONTEXT_REQUEST, 0 if request_context else None),
        ],
    )


def downlink_nas_transport(amf_ue: int, ran_ue: int, nas_pdu: bytes) -> NgapPdu:
    return _make(
        NgapKind.DOWNLINK_NAS_TRANSPORT,
        [
            (IeId.AMF_UE_NGAP_ID, amf_ue),
            (IeId.RAN_UE_NGAP_ID, ran_ue),
            (IeId.NAS_PDU, nas_pdu),
        ],
    )


def uplink_nas_transport(
    amf_ue: int, ran_ue: int, nas_pdu: bytes, location: UserLocation
) -> NgapPdu:
    return _make(
        NgapKind.UPLINK_NAS_TRANSPORT,
        [
            (IeId.AMF_UE_NGAP_ID, amf_ue),
            (IeId.RAN_UE_NGAP_ID, ran_ue),
            (IeId.NAS_PDU, nas_pdu),
            (IeId.USER_LOCATION, location),
        ],
    )


def initial_context_setup_request(
    amf_ue: int,
    ran_ue: int,
    guami: Guami,
    allowed_nssai: list[Snssai],
    security_caps: UeSecurityCapsIe,
    security_key: bytes,
    nas_pdu: bytes | None = None,
    sessions: list[PduResourceItem] | None = None,
    ue_ambr: AggregateMaxBitRate | None = None,
) -> NgapPdu:
    if sessions and ue_ambr is None:
        ue_ambr = AggregateMaxBitRate()
    return _make(
        NgapKind.INITIAL_CONTEXT_SETUP_REQUEST,
        [
            (IeId.AMF_UE_NGAP_ID, amf_ue),
            (IeId.RAN_UE_NGAP_ID, ran_ue),
            (IeId.UE_AGGREGATE_MAX_BIT_RATE, ue_ambr),
            (IeId.GUAMI, guami),
            (IeId.SETUP_LIST_CXT_REQ, sessions or None),
            (IeId.ALLOWED_NSSAI, allowed_nssai),
            (IeId.UE_SECURITY_CAPABILITIES, security_caps),
            (IeId.SECURITY_KEY, security_key),
            (IeId.NAS_PDU, nas_pdu),
        ],
    )


def initial_context_setup_response(
    amf_ue: int, ran_ue: int, sessions: list[PduResourceItem] | None = None
) -> NgapPdu:
    return _make(
        NgapKind.INITIAL_CONTEXT_SETUP_RESPONSE,
        [
            (IeId.AMF_UE_NGAP_ID, amf_ue),
            (IeId.RAN_UE_NGAP_ID, ran_ue),
            (IeId.SETUP_LIST_CXT_RES, sessions or None),
        ],
    )


def initial_context_setup_failure(amf_ue: int, ran_ue: int, cause: Cause) -> NgapPdu:
    return _make(
        NgapKind.INITIAL_CONTEXT_SETUP_FAILURE,
        [
            (IeId.AMF_UE_NGAP_ID, amf_ue),
            (IeId.RAN_UE_NGAP_ID, ran_ue),
            (IeId.CAUSE, cause),
        ],
    )


def pdu_session_resource_setup_request(
    amf_ue: int, ran_ue: int, sessions: list[PduResourceItem]
) -> NgapPdu:
    return _make(
        NgapKind.PDU_SESSION_RESOURCE_SETUP_REQUEST,
        [
            (IeId.AMF_UE_NGAP_ID, amf_ue),
            (IeId.RAN_UE_NGAP_ID, ran_ue),
            (IeId.SETUP_LIST_SU_REQ, sessions),
        ],
    )


def pdu_session_resource_setup_response(
    amf_ue: int,
    ran_ue: int,
    sessions: list[PduResourceItem] | None = None,
    failed: list[PduResourceItem] | None = None,
) -> NgapPdu:
    return _make(
        NgapKind.PDU_SESSION_RESOURCE_SETUP_RESPONSE,
        [
            (IeId.AMF_UE_NGAP_ID, amf_ue),
            (IeId.RAN_UE_NGAP_ID, ran_ue),
            (IeId.SETUP_LIST_SU_RES, sessions or None),
            (IeId.FAILED_LIST_SU_RES, failed or None),
        ],
    )
