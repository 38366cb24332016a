"""N1 message codec: types, encoder/decoder, and structural validation."""

from .codec import (
    DecodeErrorKind,
    InvariantViolation,
    NasDecodeError,
    decode_gsm,
    decode_nas,
    encode_gsm,
    encode_nas,
)
from .ies import (
    Guti,
    IdentityKind,
    IeError,
    MobileIdentity,
    RawIe,
    Snssai,
    Suci,
    UeSecurityCapability,
    decode_plmn,
    encode_plmn,
)
from .messages import (
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
    MmCause,
    NasBody,
    NasMessage,
    PayloadContainerType,
    PduSessionEstablishmentAccept,
    PduSessionEstablishmentReject,
    PduSessionEstablishmentRequest,
    RegistrationAccept,
    RegistrationComplete,
    RegistrationReject,
    RegistrationRequest,
    RequestType,
    SecurityHeader,
    SecurityModeCommand,
    SecurityModeComplete,
    SecurityModeReject,
    SmCause,
    UlNasTransport,
)
from .validate import MANDATORY_IES, ValidationReport, validate_mandatory

__all__ = [name for name in dir() if not name.startswith("_")]
