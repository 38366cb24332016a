"""NG-C signaling codec: aligned-PER encoder/decoder and IE validation."""

from .codec import (
    MissingMandatoryIe,
    NgapDecodeError,
    NgapEncodeError,
    NgapErrorKind,
    decode_ngap,
    encode_ngap,
)
from .ies import (
    AggregateMaxBitRate,
    Cause,
    CauseMisc,
    CauseNas,
    CauseProtocol,
    CauseRadio,
    Criticality,
    GlobalRanNodeId,
    Guami,
    PduResourceItem,
    PlmnSupport,
    QosFlowItem,
    RawNgapIe,
    ServedGuami,
    SetupFailureTransfer,
    SetupRequestTransfer,
    SetupResponseTransfer,
    TaiSliceSupport,
    UeSecurityCapsIe,
    UserLocation,
)
from .messages import (
    IE_RULES,
    KIND_BY_KEY,
    IeId,
    NgapIe,
    NgapKind,
    NgapPdu,
    Outcome,
    ProcedureCode,
    downlink_nas_transport,
    initial_context_setup_failure,
    initial_context_setup_request,
    initial_context_setup_response,
    initial_ue_message,
    ng_setup_failure,
    ng_setup_request,
    ng_setup_response,
    pdu_session_resource_setup_request,
    pdu_session_resource_setup_response,
    uplink_nas_transport,
)
from .validate import validate_ies

__all__ = [name for name in dir() if not name.startswith("_")]
