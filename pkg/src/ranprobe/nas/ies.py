"""Information elements shared by the N1 message set.

Binary layouts follow the Release-16 NAS conventions: BCD-packed digit
strings, 3-octet PLMN identities, and the mobile-identity value formats
for SUCI / 5G-GUTI / IMEISV.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import IntEnum


class IeError(ValueError):
    """An IE value violates its structural constraints."""


# -- digit / PLMN packing ----------------------------------------------------


def pack_bcd(digits: str) -> bytes:
    """Pack decimal digits two per octet, low nibble first, 0xF pad."""
    if not digits.isdigit() and digits != "":
        raise IeError(f"non-decimal digits: {digits!r}")
    out = bytearray()
    for i in range(0, len(digits), 2):
        lo = int(digits[i])
        hi = int(digits[i + 1]) if i + 1 < len(digits) else 0xF
        out.append(hi << 4 | lo)
    return bytes(out)


def unpack_bcd(data: bytes) -> str:
    digits = []
    for octet in data:
        lo, hi = octet & 0xF, octet >> 4
        if lo == 0xF:
            break
        digits.append(str(lo) if lo < 10 else "?")
        if hi == 0xF:
            break
        digits.append(str(hi) if hi < 10 else "?")
    return "".join(digits)


def encode_plmn(mcc: str, mnc: str) -> bytes:
    """MCC/MNC to the 3-octet wire form; 2-digit MNC pads digit 3 with 0xF."""
    if len(mcc) != 3 or not mcc.isdigit():
        raise IeError(f"bad mcc {mcc!r}")
    if len(mnc) not in (2, 3) or not mnc.isdigit():
        raise IeError(f"bad mnc {mnc!r}")
    mnc3 = 0xF if len(mnc) == 2 else int(mnc[2])
    return bytes(
        [
            int(mcc[1]) << 4 | int(mcc[0]),
            mnc3 << 4 | int(mcc[2]),
            int(mnc[1]) << 4 | int(mnc[0]),
        ]
    )


def decode_plmn(data: bytes) -> tuple[str, str]:
    if len(data) != 3:
        raise IeError(f"plmn must be 3 octets, got {len(data)}")
    mcc = f"{data[0] & 0xF}{data[0] >> 4}{data[1] & 0xF}"
    mnc3 = data[1] >> 4
    mnc = f"{data[2] & 0xF}{data[2] >> 4}"
    if mnc3 != 0xF:
        mnc = f"{mnc}{mnc3}"
    return mcc, mnc


# -- S-NSSAI -----------------------------------------------------------------


@dataclass(frozen=True)
class Snssai:
    """Network-slice selector: mandatory SST octet, optional 3-octet SD."""

    sst: int
    sd: bytes | None = None

    def __post_init__(self) -> None:
        if not 0 <= self.sst <= 255:
            raise IeError(f"sst {self.sst} out of range")
        if self.sd is not None and len(self.sd) != 3:
            raise IeError(f"sd must be 3 octets, got {len(self.sd)}")

    def encode(self) -> bytes:
        return bytes([self.sst]) + (self.sd or b"")

    @classmethod
    def decode(cls, data: bytes) -> "Snssai":
        if len(data) == 1:
            return cls(sst=data[0])
        if len(data) == 4:
            return cls(sst=data[0], sd=data[1:4])
        raise IeError(f"snssai content must be 1 or 4 octets, got {len(data)}")


def encode_nssai_list(slices: list[Snssai]) -> bytes:
    """NSSAI IE value: sequence of length-prefixed S-NSSAI entries."""
    out = bytearray()
    for s in slices:
        body = s.encode()
        out.append(len(body))
        out.extend(body)
    return bytes(out)


def decode_nssai_list(data: bytes) -> list[Snssai]:
    slices = []
    pos = 0
    while pos < len(data):
        ln = data[pos]
        pos += 1
        if pos + ln > len(data):
            raise IeError("nssai entry overruns IE")
        slices.append(Snssai.decode(data[pos : pos + ln]))
        pos += ln
    return slices


# -- mobile identity ---------------------------------------------------------


class IdentityKind(IntEnum):
    NO_IDENTITY = 0
    SUCI = 1
    FIVEG_GUTI = 2
    IMEI = 3
    FIVEG_S_TMSI = 4
    IMEISV = 5


@dataclass(frozen=True)
class Suci:
    mcc: str
    mnc: str
    routing_indicator: str = "0000"
    protection_scheme: int = 0
    home_network_key_id: int = 0
    scheme_output: str = ""  # MSIN digits for the null scheme

    @property
    def supi(self) -> str:
        """Recoverable only for the null protection scheme."""
        return self.mcc + self.mnc + self.scheme_output


@dataclass(frozen=True)
class Guti:
    mcc: str
    mnc: str
    amf_region_id: int
    amf_set_id: int  # 10 bits
    amf_pointer: int  # 6 bits
    tmsi: bytes  # exactly 4 octets

    def __post_init__(self) -> None:
        if len(self.tmsi) != 4:
            raise IeError(f"tmsi must be 4 octets, got {len(self.tmsi)}")
        if not 0 <= self.amf_set_id < 1024 or not 0 <= self.amf_pointer < 64:
            raise IeError("amf set/pointer out of range")


@dataclass(frozen=True)
class MobileIdentity:
    kind: IdentityKind
    suci: Suci | None = None
    guti: Guti | None = None
    imeisv: str | None = None  # 16 BCD digits

    def encode(self) -> bytes:
        if self.kind == IdentityKind.NO_IDENTITY:
            return bytes([0x00])
        if self.kind == IdentityKind.SUCI:
            s = self.suci
            if s is None:
                raise IeError("suci payload missing")
            out = bytearray([0x01])  # SUPI format IMSI, type-of-identity SUCI
            out.extend(encode_plmn(s.mcc, s.mnc))
            ri = pack_bcd(s.routing_indicator)
            out.extend(ri + b"\xff" * (2 - len(ri)))
            out.append(s.protection_scheme & 0x0F)
            out.append(s.home_network_key_id & 0xFF)
            out.extend(pack_bcd(s.scheme_output))
            return bytes(out)
        if self.kind == IdentityKind.FIVEG_GUTI:
            g = self.guti
            if g is None:
                raise IeError("guti payload missing")
            out = bytearray([0xF2])  # spare 1111, even, type 010
            out.extend(encode_plmn(g.mcc, g.mnc))
            out.append(g.amf_region_id)
            out.append(g.amf_set_id >> 2)
            out.append((g.amf_set_id & 0x3) << 6 | g.amf_pointer)
            out.extend(g.tmsi)
            return bytes(out)
        if self.kind == IdentityKind.IMEISV:
            digits = self.imeisv or ""
            if len(digits) != 16 or not digits.isdigit():
                raise IeError(f"imeisv must be 16 digits, got {digits!r}")
            out = bytearray([int(digits[0]) << 4 | IdentityKind.IMEISV])
            out.extend(pack_bcd(digits[1:]))
            return bytes(out)
        raise IeError(f"unsupported identity kind {self.kind}")

    @classmethod
    def decode(cls, data: bytes) -> "MobileIdentity":
        if not data:
            raise IeError("empty mobile identity")
        kind = IdentityKind(data[0] & 0x07)
        if kind == IdentityKind.NO_IDENTITY:
            return cls(kind=kind)
        if kind == IdentityKind.SUCI:
            if len(data) < 8:
                raise IeError("suci too short")
            mcc, mnc = decode_plmn(data[1:4])
            return cls(
                kind=kind,
                suci=Suci(
                    mcc=mcc,
                    mnc=mnc,
                    routing_indicator=unpack_bcd(data[4:6]) or "0",
                    protection_scheme=data[6] & 0x0F,
                    home_network_key_id=data[7],
                    scheme_output=unpack_bcd(data[8:]),
                ),
            )
        if kind == IdentityKind.FIVEG_GUTI:
            if len(data) != 11:
                raise IeError(f"guti must be 11 octets, got {len(data)}")
            mcc, mnc = decode_plmn(data[1:4])
            return cls(
                kind=kind,
                guti=Guti(
                    mcc=mcc,
                    mnc=mnc,
                    amf_region_id=data[4],
                    amf_set_id=data[5] << 2 | data[6] >> 6,
                    amf_pointer=data[6] & 0x3F,
                    tmsi=data[7:11],
                ),
            )
        if kind == IdentityKind.IMEISV:
            if len(data) != 9:
                raise IeError(f"imeisv must be 9 octets, got {len(data)}")
            first = str(data[0] >> 4)
            rest = unpack_bcd(data[1:])
            return cls(kind=kind, imeisv=first + rest)
        raise IeError(f"identity kind {kind} not supported")


# -- UE security capability --------------------------------------------------

EA0 = 0x80
EA1 = 0x40
EA2 = 0x20
EA3 = 0x10
IA0 = 0x80
IA1 = 0x40
IA2 = 0x20
IA3 = 0x10


@dataclass(frozen=True)
class UeSecurityCapability:
    """Supported NAS algorithm bitmaps (bit 8 = null algorithm)."""

    ea: int = EA0 | EA2
    ia: int = IA0 | IA2
    extra: bytes = b""  # E-UTRA octets, preserved verbatim

    def encode(self) -> bytes:
        return bytes([self.ea, self.ia]) + self.extra

    @classmethod
    def decode(cls, data: bytes) -> "UeSecurityCapability":
        if len(data) < 2 or len(data) > 8:
            raise IeError(f"security capability length {len(data)} invalid")
        return cls(ea=data[0], ia=data[1], extra=data[2:])


# -- opaque optional IE ------------------------------------------------------


@dataclass(frozen=True)
class RawIe:
    """Unknown optional IE preserved as (iei, value) for lossless re-encode."""

    iei: int
    value: bytes = b""
    # one-octet IEs (IEI >= 0x80) keep their half-octet value in `value[0]`
    long_length: bool = False  # 2-octet length when re-encoding (TLV-E)


def encode_dnn(dnn: str) -> bytes:
    """DNN value: dot-separated labels, each length-prefixed."""
    out = bytearray()
    for label in dnn.split("."):
        raw = label.encode("ascii")
        if not raw or len(raw) > 63:
            raise IeError(f"bad dnn label {label!r}")
        out.append(len(raw))
        out.extend(raw)
    return bytes(out)


def decode_dnn(data: bytes) -> str:
    labels = []
    pos = 0
    while pos < len(data):
        ln = data[pos]
        pos += 1
        if pos + ln > len(data):
            raise IeError("dnn label overruns IE")
        labels.append(data[pos : pos + ln].decode("ascii", "replace"))
        pos += ln
    return ".".join(labels)
