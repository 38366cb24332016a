"""N1 message set: mobility-management and session-management bodies.

Each body dataclass knows its own fixed (mandatory) part; optional IEs are
typed fields plus a ``raw_ies`` list that preserves anything the decoder
does not model, so re-encoding is lossless.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum, IntEnum

from .ies import MobileIdentity, RawIe, Snssai, UeSecurityCapability


class SecurityHeader(IntEnum):
    PLAIN = 0
    INTEGRITY = 1
    INTEGRITY_CIPHERED = 2
    INTEGRITY_NEW_CONTEXT = 3
    INTEGRITY_CIPHERED_NEW_CONTEXT = 4


EPD_5GMM = 0x7E
EPD_5GSM = 0x2E


class MessageKind(str, Enum):
    REGISTRATION_REQUEST = "RegistrationRequest"
    REGISTRATION_ACCEPT = "RegistrationAccept"
    REGISTRATION_COMPLETE = "RegistrationComplete"
    REGISTRATION_REJECT = "RegistrationReject"
    IDENTITY_REQUEST = "IdentityRequest"
    IDENTITY_RESPONSE = "IdentityResponse"
    AUTHENTICATION_REQUEST = "AuthenticationRequest"
    AUTHENTICATION_RESPONSE = "AuthenticationResponse"
    AUTHENTICATION_FAILURE = "AuthenticationFailure"
    AUTHENTICATION_REJECT = "AuthenticationReject"
    SECURITY_MODE_COMMAND = "SecurityModeCommand"
    SECURITY_MODE_COMPLETE = "SecurityModeComplete"
    SECURITY_MODE_REJECT = "SecurityModeReject"
    CONFIGURATION_UPDATE_COMMAND = "ConfigurationUpdateCommand"
    UL_NAS_TRANSPORT = "UlNasTransport"
    DL_NAS_TRANSPORT = "DlNasTransport"
    PDU_SESSION_ESTABLISHMENT_REQUEST = "PduSessionEstablishmentRequest"
    PDU_SESSION_ESTABLISHMENT_ACCEPT = "PduSessionEstablishmentAccept"
    PDU_SESSION_ESTABLISHMENT_REJECT = "PduSessionEstablishmentReject"
    CIPHERED = "CipheredPayload"

    def __str__(self) -> str:  # keep log lines compact
        return self.value


# message-type octets, TS 24.501 tables 8.2.x / 8.3.x
MM_TYPE = {
    MessageKind.REGISTRATION_REQUEST: 0x41,
    MessageKind.REGISTRATION_ACCEPT: 0x42,
    MessageKind.REGISTRATION_COMPLETE: 0x43,
    MessageKind.REGISTRATION_REJECT: 0x44,
    MessageKind.CONFIGURATION_UPDATE_COMMAND: 0x54,
    MessageKind.AUTHENTICATION_REQUEST: 0x56,
    MessageKind.AUTHENTICATION_RESPONSE: 0x57,
    MessageKind.AUTHENTICATION_REJECT: 0x58,
    MessageKind.AUTHENTICATION_FAILURE: 0x59,
    MessageKind.IDENTITY_REQUEST: 0x5B,
    MessageKind.IDENTITY_RESPONSE: 0x5C,
    MessageKind.SECURITY_MODE_COMMAND: 0x5D,
    MessageKind.SECURITY_MODE_COMPLETE: 0x5E,
    MessageKind.SECURITY_MODE_REJECT: 0x5F,
    MessageKind.UL_NAS_TRANSPORT: 0x67,
    MessageKind.DL_NAS_TRANSPORT: 0x68,
}
SM_TYPE = {
    MessageKind.PDU_SESSION_ESTABLISHMENT_REQUEST: 0xC1,
    MessageKind.PDU_SESSION_ESTABLISHMENT_ACCEPT: 0xC2,
    MessageKind.PDU_SESSION_ESTABLISHMENT_REJECT: 0xC3,
}
MM_KIND = {v: k for k, v in MM_TYPE.items()}
SM_KIND = {v: k for k, v in SM_TYPE.items()}


class MmCause(IntEnum):
    """Selected mobility-management cause codes."""

    ILLEGAL_UE = 3
    MAC_FAILURE = 20
    SYNCH_FAILURE = 21
    PAYLOAD_NOT_FORWARDED = 90
    INVALID_MANDATORY_INFO = 96
    MESSAGE_NOT_COMPATIBLE_WITH_STATE = 101
    PROTOCOL_ERROR_UNSPECIFIED = 111


class SmCause(IntEnum):
    """Selected session-management cause codes."""

    MISSING_OR_UNKNOWN_DNN = 27
    INVALID_PDU_SESSION_IDENTITY = 43
    INVALID_MANDATORY_INFO = 96


class PayloadContainerType(IntEnum):
    N1_SM_INFORMATION = 1


class RequestType(IntEnum):
    INITIAL_REQUEST = 1
    EXISTING_PDU_SESSION = 2


# -- 5GMM bodies ---------------------------------------------------------------


@dataclass
class RegistrationRequest:
    kind = MessageKind.REGISTRATION_REQUEST
    registration_type: int = 1  # initial registration
    follow_on_request: bool = False
    ngksi: int = 7  # 7 = no key available
    mobile_identity: MobileIdentity | None = None
    security_capability: UeSecurityCapability | None = None
    requested_nssai: list[Snssai] | None = None
    nas_container: bytes | None = None
    raw_ies: list[RawIe] = field(default_factory=list)


@dataclass
class RegistrationAccept:
    kind = MessageKind.REGISTRATION_ACCEPT
    result: int | None = 1  # 3GPP access
    guti: MobileIdentity | None = None
    tai_list: bytes | None = None
    allowed_nssai: list[Snssai] | None = None
    raw_ies: list[RawIe] = field(default_factory=list)


@dataclass
class RegistrationComplete:
    kind = MessageKind.REGISTRATION_COMPLETE
    raw_ies: list[RawIe] = field(default_factory=list)


@dataclass
class RegistrationReject:
    kind = MessageKind.REGISTRATION_REJECT
    cause: int | None = MmCause.PROTOCOL_ERROR_UNSPECIFIED
    raw_ies: list[RawIe] = field(default_factory=list)


@dataclass
class IdentityRequest:
    kind = MessageKind.IDENTITY_REQUEST
    identity_type: int | None = 1  # SUCI
    raw_ies: list[RawIe] = field(default_factory=list)


@dataclass
class IdentityResponse:
    kind = MessageKind.IDENTITY_RESPONSE
    mobile_identity: MobileIdentity | None = None
    raw_ies: list[RawIe] = field(default_factory=list)


@dataclass
class AuthenticationRequest:
    kind = MessageKind.AUTHENTICATION_REQUEST
    ngksi: int = 0
    abba: bytes | None = b"\x00\x00"
    rand: bytes | None = None
    autn: bytes | None = None
    raw_ies: list[RawIe] = field(default_factory=list)


@dataclass
class AuthenticationResponse:
    kind = MessageKind.AUTHENTICATION_RESPONSE
    response: bytes | None = None  # RES*, 16 octets
    raw_ies: list[RawIe] = field(default_factory=list)


@dataclass
class AuthenticationFailure:
    kind = MessageKind.AUTHENTICATION_FAILURE
    cause: int | None = MmCause.MAC_FAILURE
    auts: bytes | None = None  # present for SYNCH_FAILURE
    raw_ies: list[RawIe] = field(default_factory=list)


@dataclass
class AuthenticationReject:
    kind = MessageKind.AUTHENTICATION_REJECT
    raw_ies: list[RawIe] = field(default_factory=list)


@dataclass
class SecurityModeCommand:
    kind = MessageKind.SECURITY_MODE_COMMAND
    ciphering_alg: int = 2  # NEA number
    integrity_alg: int = 2  # NIA number
    ngksi: int = 0
    replayed_capability: UeSecurityCapability | None = None
    imeisv_request: bool = False
    # request re-transmission of the initial NAS message inside the reply
    retransmission_requested: bool = False
    raw_ies: list[RawIe] = field(default_factory=list)


@dataclass
class SecurityModeComplete:
    kind = MessageKind.SECURITY_MODE_COMPLETE
    imeisv: MobileIdentity | None = None
    nas_container: bytes | None = None  # replayed initial message
    raw_ies: list[RawIe] = field(default_factory=list)


@dataclass
class SecurityModeReject:
    kind = MessageKind.SECURITY_MODE_REJECT
    cause: int | None = MmCause.PROTOCOL_ERROR_UNSPECIFIED
    raw_ies: list[RawIe] = field(default_factory=list)


@dataclass
class ConfigurationUpdateCommand:
    kind = MessageKind.CONFIGURATION_UPDATE_COMMAND
    guti: MobileIdentity | None = None
    raw_ies: list[RawIe] = field(default_factory=list)


@dataclass
class UlNasTransport:
    kind = MessageKind.UL_NAS_TRANSPORT
    container_type: int | None = PayloadContainerType.N1_SM_INFORMATION
    payload: bytes | None = None  # encoded 5GSM message
    pdu_session_id: int | None = None
    request_type: int | None = None
    snssai: Snssai | None = None
    dnn: str | None = None
    raw_ies: list[RawIe] = field(default_factory=list)


@dataclass
class DlNasTransport:
    kind = MessageKind.DL_NAS_TRANSPORT
    container_type: int | None = PayloadContainerType.N1_SM_INFORMATION
    payload: bytes | None = None
    pdu_session_id: int | None = None
    mm_cause: int | None = None  # e.g. payload-not-forwarded
    raw_ies: list[RawIe] = field(default_factory=list)


# -- 5GSM bodies ---------------------------------------------------------------


@dataclass
class PduSessionEstablishmentRequest:
    kind = MessageKind.PDU_SESSION_ESTABLISHMENT_REQUEST
    pdu_session_id: int = 1
    pti: int = 1
    max_data_rate: bytes | None = b"\xff\xff"  # integrity protection max rate
    pdu_session_type: int | None = 1  # IPv4
    raw_ies: list[RawIe] = field(default_factory=list)


@dataclass
class PduSessionEstablishmentAccept:
    kind = MessageKind.PDU_SESSION_ESTABLISHMENT_ACCEPT
    pdu_session_id: int = 1
    pti: int = 1
    selected_type: int = 1
    selected_ssc: int = 1
    qos_rules: bytes | None = None
    ambr: bytes | None = None  # 6 octets
    pdu_address: bytes | None = None  # type octet + address
    snssai: Snssai | None = None
    dnn: str | None = None
    raw_ies: list[RawIe] = field(default_factory=list)


@dataclass
class PduSessionEstablishmentReject:
    kind = MessageKind.PDU_SESSION_ESTABLISHMENT_REJECT
    pdu_session_id: int = 1
    pti: int = 1
    cause: int | None = SmCause.MISSING_OR_UNKNOWN_DNN
    raw_ies: list[RawIe] = field(default_factory=list)


@dataclass
class CipheredPayload:
    """Body of a ciphered envelope before the security layer deciphers it."""

    kind = MessageKind.CIPHERED
    octets: bytes = b""


MM_BODIES = (
    RegistrationRequest,
    RegistrationAccept,
    RegistrationComplete,
    RegistrationReject,
    IdentityRequest,
    IdentityResponse,
    AuthenticationRequest,
    AuthenticationResponse,
    AuthenticationFailure,
    AuthenticationReject,
    SecurityModeCommand,
    SecurityModeComplete,
    SecurityModeReject,
    ConfigurationUpdateCommand,
    UlNasTransport,
    DlNasTransport,
)
SM_BODIES = (
    PduSessionEstablishmentRequest,
    PduSessionEstablishmentAccept,
    PduSessionEstablishmentReject,
)

NasBody = (
    RegistrationRequest
    | RegistrationAccept
    | RegistrationComplete
    | RegistrationReject
    | IdentityRequest
    | IdentityResponse
    | AuthenticationRequest
    | AuthenticationResponse
    | AuthenticationFailure
    | AuthenticationReject
    | SecurityModeCommand
    | SecurityModeComplete
    | SecurityModeReject
    | ConfigurationUpdateCommand
    | UlNasTransport
    | DlNasTransport
    | PduSessionEstablishmentRequest
    | PduSessionEstablishmentAccept
    | PduSessionEstablishmentReject
    | CipheredPayload
)


@dataclass
class NasMessage:
    """Security-header envelope around one message body.

    ``mac`` and ``sequence_number`` are present exactly when the header is
    not plain; the protection math itself lives in the security layer.
    """

    body: NasBody
    security_header: SecurityHeader = SecurityHeader.PLAIN
    mac: bytes | None = None
    sequence_number: int | None = None

    @property
    def kind(self) -> MessageKind:
        return self.body.kind

    @property
    def protected(self) -> bool:
        return self.security_header != SecurityHeader.PLAIN
