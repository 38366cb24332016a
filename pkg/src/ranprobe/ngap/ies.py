"""Typed NG-C information elements and their aligned-PER codecs.

Every dataclass encodes itself into / decodes itself from a PER bit
stream.  Structures carry Release-16 extension markers; unknown
extension additions are skipped on decode and never emitted on encode.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import IntEnum

from ..nas.ies import Snssai, decode_plmn, encode_plmn
from .per import BitReader, BitWriter, PerError


class Criticality(IntEnum):
    REJECT = 0
    IGNORE = 1
    NOTIFY = 2


def skip_extension_additions(r: BitReader) -> None:
    """Skip the extension preamble of a SEQUENCE whose extension bit was set."""
    count = r.get_normally_small() + 1
    present = [r.get_bit() for _ in range(count)]
    for bit in present:
        if bit:
            r.get_open_type()


def _seq_header(r: BitReader, n_optional: int) -> tuple[bool, list[bool]]:
    ext = bool(r.get_bit())
    flags = [bool(r.get_bit()) for _ in range(n_optional)]
    return ext, flags


# -- identities ---------------------------------------------------------------


@dataclass(frozen=True)
class GlobalRanNodeId:
    mcc: str
    mnc: str
    gnb_id: int
    gnb_id_bits: int = 32

    def __post_init__(self) -> None:
        if not 22 <= self.gnb_id_bits <= 32:
            raise ValueError(f"gnb id bit length {self.gnb_id_bits} outside [22, 32]")
        if self.gnb_id >= 1 << self.gnb_id_bits:
            raise ValueError("gnb id does not fit its declared bit length")

    def encode(self, w: BitWriter) -> None:
        w.put_bit(0)  # GlobalRANNodeID choice not extended
        w.put_bits(0, 2)  # globalGNB-ID
        w.put_bit(0)  # GlobalGNB-ID sequence not extended
        w.put_octets(encode_plmn(self.mcc, self.mnc))
        w.put_bit(0)  # gNB-ID choice not extended
        w.put_constrained_int(self.gnb_id_bits, 22, 32)
        w.align()
        w.put_bits(self.gnb_id << (-self.gnb_id_bits % 8), (self.gnb_id_bits + 7) // 8 * 8)

    @classmethod
    def decode(cls, r: BitReader) -> "GlobalRanNodeId":
        if r.get_bit() or r.get_bits(2) != 0:
            raise PerError("only the gNB flavour of the RAN node id is supported", r.bit_offset)
        ext = r.get_bit()
        mcc, mnc = decode_plmn(r.get_octets(3))
        if r.get_bit():
            raise PerError("extended gNB-ID choice not supported", r.bit_offset)
        nbits = r.get_constrained_int(22, 32)
        r.align()
        raw = r.get_bits((nbits + 7) // 8 * 8)
        value = raw >> (-nbits % 8)
        if ext:
            skip_extension_additions(r)
        return cls(mcc=mcc, mnc=mnc, gnb_id=value, gnb_id_bits=nbits)


@dataclass(frozen=True)
class Guami:
    mcc: str
    mnc: str
    region_id: int = 1
    set_id: int = 1  # 10 bits
    pointer: int = 0  # 6 bits

    def encode(self, w: BitWriter) -> None:
        w.put_bit(0)
        w.put_octets(encode_plmn(self.mcc, self.mnc))
        w.put_bits(self.region_id, 8)
        w.put_bits(self.set_id, 10)
        w.put_bits(self.pointer, 6)

    @classmethod
    def decode(cls, r: BitReader) -> "Guami":
        ext = r.get_bit()
        mcc, mnc = decode_plmn(r.get_octets(3))
        region = r.get_bits(8)
        set_id = r.get_bits(10)
        pointer = r.get_bits(6)
        if ext:
            skip_extension_additions(r)
        return cls(mcc=mcc, mnc=mnc, region_id=region, set_id=set_id, pointer=pointer)


@dataclass(frozen=True)
class ServedGuami:
    guami: Guami
    backup_amf_name: str | None = None

    def encode(self, w: BitWriter) -> None:
        w.put_bit(0)
        w.put_bit(1 if self.backup_amf_name is not None else 0)
        self.guami.encode(w)
        if self.backup_amf_name is not None:
            _encode_name(w, self.backup_amf_name)

    @classmethod
    def decode(cls, r: BitReader) -> "ServedGuami":
        ext, (has_backup,) = _seq_header(r, 1)
        guami = Guami.decode(r)
        backup = _decode_name(r) if has_backup else None
        if ext:
            skip_extension_additions(r)
        return cls(guami=guami, backup_amf_name=backup)


def _encode_name(w: BitWriter, name: str) -> None:
    """AMFName / RANNodeName: PrintableString (SIZE(1..150, ...))."""
    raw = name.encode("ascii")
    if not 1 <= len(raw) <= 150:
        raise ValueError(f"node name length {len(raw)} outside [1, 150]")
    w.put_bit(0)
    w.put_constrained_int(len(raw), 1, 150)
    w.put_octets(raw)


def _decode_name(r: BitReader) -> str:
    if r.get_bit():
        raise PerError("extended node-name size not supported", r.bit_offset)
    length = r.get_constrained_int(1, 150)
    return r.get_octets(length).decode("ascii", "replace")


# -- slice support ------------------------------------------------------------


def _encode_snssai(w: BitWriter, s: Snssai) -> None:
    w.put_bit(0)
    w.put_bit(1 if s.sd is not None else 0)
    w.put_bits(s.sst, 8)  # OCTET STRING (SIZE(1)): bit-field, unaligned
    if s.sd is not None:
        w.put_octets(s.sd)


def _decode_snssai(r: BitReader) -> Snssai:
    ext, (has_sd,) = _seq_header(r, 1)
    sst = r.get_bits(8)
    sd = bytes(r.get_octets(3)) if has_sd else None
    if ext:
        skip_extension_additions(r)
    return Snssai(sst=sst, sd=sd)


def _encode_slice_list(w: BitWriter, slices: list[Snssai]) -> None:
    if not slices:
        raise ValueError("slice support list must be non-empty")
    w.put_constrained_int(len(slices), 1, 1024)
    for s in slices:
        w.put_bit(0)  # SliceSupportItem not extended
        _encode_snssai(w, s)


def _decode_slice_list(r: BitReader) -> list[Snssai]:
    count = r.get_constrained_int(1, 1024)
    out = []
    for _ in range(count):
        ext = r.get_bit()
        out.append(_decode_snssai(r))
        if ext:
            skip_extension_additions(r)
    return out


@dataclass(frozen=True)
class TaiSliceSupport:
    """One served tracking area: TAC + PLMN + the slices broadcast there."""

    tac: bytes
    mcc: str
    mnc: str
    slices: tuple[Snssai, ...] = ()

    def __post_init__(self) -> None:
        if len(self.tac) != 3:
            raise ValueError(f"tac must be 3 octets, got {len(self.tac)}")
        object.__setattr__(self, "slices", tuple(self.slices))

    def encode(self, w: BitWriter) -> None:
        if not self.slices:
            raise ValueError("supported TA item needs at least one slice")
        w.put_bit(0)  # SupportedTAItem
        w.put_octets(self.tac)
        w.put_constrained_int(1, 1, 12)  # one broadcast PLMN per item
        w.put_bit(0)  # BroadcastPLMNItem
        w.put_octets(encode_plmn(self.mcc, self.mnc))
        _encode_slice_list(w, list(self.slices))

    @classmethod
    def decode_items(cls, r: BitReader) -> list["TaiSliceSupport"]:
        """Decode one SupportedTAItem, flattening its broadcast PLMNs."""
        ext = r.get_bit()
        tac = bytes(r.get_octets(3))
        n_plmn = r.get_constrained_int(1, 12)
        items = []
        for _ in range(n_plmn):
            p_ext = r.get_bit()
            mcc, mnc = decode_plmn(r.get_octets(3))
            slices = _decode_slice_list(r)
            if p_ext:
                skip_extension_additions(r)
            items.append(cls(tac=tac, mcc=mcc, mnc=mnc, slices=tuple(slices)))
        if ext:
            skip_extension_additions(r)
        return items


def encode_supported_ta_list(w: BitWriter, tas: list[TaiSliceSupport]) -> None:
    if not tas:
        raise ValueError("supported TA list must be non-empty")
    w.put_constrained_int(len(tas), 1, 256)
    for ta in tas:
        ta.encode(w)


def decode_supported_ta_list(r: BitReader) -> list[TaiSliceSupport]:
    count = r.get_constrained_int(1, 256)
    out: list[TaiSliceSupport] = []
    for _ in range(count):
        out.extend(TaiSliceSupport.decode_items(r))
    return out


@dataclass(frozen=True)
class PlmnSupport:
    mcc: str
    mnc: str
    slices: tuple[Snssai, ...] = ()

    def encode(self, w: BitWriter) -> None:
        w.put_bit(0)
        w.put_octets(encode_plmn(self.mcc, self.mnc))
        _encode_slice_list(w, list(self.slices))

    @classmethod
    def decode(cls, r: BitReader) -> "PlmnSupport":
        ext = r.get_bit()
        mcc, mnc = decode_plmn(r.get_octets(3))
        slices = _decode_slice_list(r)
        if ext:
            skip_extension_additions(r)
        return cls(mcc=mcc, mnc=mnc, slices=tuple(slices))


def encode_plmn_support_list(w: BitWriter, items: list[PlmnSupport]) -> None:
    w.put_constrained_int(len(items), 1, 12)
    for item in items:
        item.encode(w)


def decode_plmn_support_list(r: BitReader) -> list[PlmnSupport]:
    return [PlmnSupport.decode(r) for _ in range(r.get_constrained_int(1, 12))]


def encode_allowed_nssai(w: BitWriter, slices: list[Snssai]) -> None:
    if not slices:
        raise ValueError("allowed NSSAI must be non-empty")
    w.put_constrained_int(len(slices), 1, 8)
    for s in slices:
        w.put_bit(0)  # AllowedNSSAI-Item
        _encode_snssai(w, s)


def decode_allowed_nssai(r: BitReader) -> list[Snssai]:
    count = r.get_constrained_int(1, 8)
    out = []
    for _ in range(count):
        ext = r.get_bit()
        out.append(_decode_snssai(r))
        if ext:
            skip_extension_additions(r)
    return out


# -- cause ---------------------------------------------------------------------

_CAUSE_GROUPS = ("radio_network", "transport", "nas", "protocol", "misc")
_CAUSE_ROOTS = {"radio_network": 44, "transport": 2, "nas": 4, "protocol": 7, "misc": 6}


class CauseRadio(IntEnum):
    UNSPECIFIED = 0
    MULTIPLE_PDU_SESSION_ID_INSTANCES = 28
    SLICE_NOT_SUPPORTED = 39


class CauseNas(IntEnum):
    NORMAL_RELEASE = 0
    AUTHENTICATION_FAILURE = 1
    DEREGISTER = 2
    UNSPECIFIED = 3


class CauseProtocol(IntEnum):
    TRANSFER_SYNTAX_ERROR = 0
    ABSTRACT_SYNTAX_ERROR_REJECT = 1
    MESSAGE_NOT_COMPATIBLE_WITH_RECEIVER_STATE = 3
    SEMANTIC_ERROR = 4
    UNSPECIFIED = 6


class CauseMisc(IntEnum):
    CONTROL_PROCESSING_OVERLOAD = 0
    HARDWARE_FAILURE = 2
    OM_INTERVENTION = 3
    UNKNOWN_PLMN = 4
    UNSPECIFIED = 5


@dataclass(frozen=True)
class Cause:
    group: str
    value: int

    def __post_init__(self) -> None:
        if self.group not in _CAUSE_GROUPS:
            raise ValueError(f"unknown cause group {self.group!r}")
        if not 0 <= self.value < _CAUSE_ROOTS[self.group]:
            raise ValueError(f"cause value {self.value} outside {self.group} root values")

    def encode(self, w: BitWriter) -> None:
        w.put_bit(0)
        w.put_bits(_CAUSE_GROUPS.index(self.group), 3)
        w.put_bit(0)  # group enum not extended
        roots = _CAUSE_ROOTS[self.group]
        w.put_constrained_int(self.value, 0, roots - 1)

    @classmethod
    def decode(cls, r: BitReader) -> "Cause":
        if r.get_bit():
            raise PerError("extended cause group not supported", r.bit_offset)
        index = r.get_bits(3)
        if index >= len(_CAUSE_GROUPS):
            raise PerError(f"cause group index {index} invalid", r.bit_offset)
        group = _CAUSE_GROUPS[index]
        if r.get_bit():
            # extended enumeration value: normally-small index, mapped to root 0
            r.get_normally_small()
            return cls(group=group, value=0)
        roots = _CAUSE_ROOTS[group]
        return cls(group=group, value=r.get_constrained_int(0, roots - 1))


# -- UE location / caps --------------------------------------------------------


@dataclass(frozen=True)
class UserLocation:
    mcc: str
    mnc: str
    tac: bytes
    cell_id: int  # 36-bit NR cell identity

    def encode(self, w: BitWriter) -> None:
        w.put_bit(0)  # UserLocationInformation choice root
        w.put_bits(1, 2)  # userLocationInformationNR
        w.put_bit(0)  # sequence ext
        w.put_bit(0)  # timeStamp absent
        w.put_bit(0)  # NR-CGI ext
        w.put_octets(encode_plmn(self.mcc, self.mnc))
        w.align()
        w.put_bits(self.cell_id << 4, 40)  # 36 bits left-justified
        w.put_bit(0)  # TAI ext
        w.put_octets(encode_plmn(self.mcc, self.mnc))
        w.put_octets(self.tac)

    @classmethod
    def decode(cls, r: BitReader) -> "UserLocation":
        if r.get_bit() or r.get_bits(2) != 1:
            raise PerError("only the NR user-location flavour is supported", r.bit_offset)
        ext, (has_ts,) = _seq_header(r, 1)
        cgi_ext = r.get_bit()
        mcc, mnc = decode_plmn(r.get_octets(3))
        r.align()
        cell = r.get_bits(40) >> 4
        if cgi_ext:
            skip_extension_additions(r)
        tai_ext = r.get_bit()
        t_mcc, t_mnc = decode_plmn(r.get_octets(3))
        tac = bytes(r.get_octets(3))
        if tai_ext:
            skip_extension_additions(r)
        if has_ts:
            r.get_octets(4)
        if ext:
            skip_extension_additions(r)
        return cls(mcc=t_mcc, mnc=t_mnc, tac=tac, cell_id=cell)


@dataclass(frozen=True)
class UeSecurityCapsIe:
    """NR/E-UTRA algorithm bitmaps, MSB = algorithm 1."""

    nr_ea: int = 0x4000  # NEA2
    nr_ia: int = 0x4000  # NIA2
    eutra_ea: int = 0
    eutra_ia: int = 0

    def encode(self, w: BitWriter) -> None:
        w.put_bit(0)
        for bits in (self.nr_ea, self.nr_ia, self.eutra_ea, self.eutra_ia):
            w.put_bit(0)  # BIT STRING (SIZE(16, ...)) root
            w.put_bits(bits, 16)

    @classmethod
    def decode(cls, r: BitReader) -> "UeSecurityCapsIe":
        ext = r.get_bit()
        values = []
        for _ in range(4):
            if r.get_bit():
                raise PerError("extended capability bit-string not supported", r.bit_offset)
            values.append(r.get_bits(16))
        if ext:
            skip_extension_additions(r)
        return cls(*values)


# -- user-plane transfers --------------------------------------------------------


def _encode_tnl(w: BitWriter, address: str, teid: bytes) -> None:
    """UPTransportLayerInformation with an IPv4 GTP tunnel."""
    if len(teid) != 4:
        raise ValueError(f"teid must be 4 octets, got {len(teid)}")
    w.put_bit(0)  # choice: gTPTunnel
    w.put_bit(0)  # GTPTunnel ext
    addr = bytes(int(part) for part in address.split("."))
    if len(addr) != 4:
        raise ValueError(f"transport address {address!r} is not IPv4")
    w.put_bit(0)  # TransportLayerAddress size not extended
    w.put_constrained_int(32, 1, 160)
    w.put_octets(addr)
    w.put_octets(teid)


def _decode_tnl(r: BitReader) -> tuple[str, bytes]:
    if r.get_bit():
        raise PerError("extended transport choice not supported", r.bit_offset)
    ext = r.get_bit()
    if r.get_bit():
        raise PerError("extended transport address size not supported", r.bit_offset)
    nbits = r.get_constrained_int(1, 160)
    r.align()
    raw = r.get_octets((nbits + 7) // 8)
    teid = bytes(r.get_octets(4))
    if ext:
        skip_extension_additions(r)
    if nbits != 32:
        return raw.hex(), teid
    return ".".join(str(b) for b in raw), teid


@dataclass(frozen=True)
class QosFlowItem:
    qfi: int = 1
    five_qi: int = 9
    arp_priority: int = 8

    def encode(self, w: BitWriter) -> None:
        w.put_bit(0)  # QosFlowSetupRequestItem ext
        w.put_bit(0)  # e-RAB-ID absent
        w.put_bit(0)  # qosFlowIdentifier not extended
        w.put_constrained_int(self.qfi, 0, 63)
        # QosFlowLevelQosParameters
        w.put_bit(0)  # ext
        w.put_bits(0, 3)  # gBR / reflective / additional absent
        w.put_bit(0)  # QosCharacteristics choice root
        w.put_bit(0)  # nonDynamic5QI
        w.put_bit(0)  # NonDynamic5QIDescriptor ext
        w.put_bits(0, 3)  # optional descriptors absent
        w.put_bit(0)  # fiveQI not extended
        w.align()
        w.put_bits(self.five_qi, 8)
        # AllocationAndRetentionPriority
        w.put_bit(0)
        w.put_constrained_int(self.arp_priority, 1, 15)
        w.put_bit(0)
        w.put_bits(0, 1)  # shall-not-trigger-pre-emption
        w.put_bit(0)
        w.put_bits(0, 1)  # not-pre-emptable

    @classmethod
    def decode(cls, r: BitReader) -> "QosFlowItem":
        item_ext = r.get_bit()
        has_erab = r.get_bit()
        if r.get_bit():
            r.get_normally_small()
            qfi = 0
        else:
            qfi = r.get_constrained_int(0, 63)
        params_ext = r.get_bit()
        gbr, refl, add = r.get_bit(), r.get_bit(), r.get_bit()
        if r.get_bit():
            raise PerError("extended QoS characteristics not supported", r.bit_offset)
        if r.get_bits(1) != 0:
            raise PerError("dynamic 5QI descriptor not supported", r.bit_offset)
        nd_ext = r.get_bit()
        opt = [r.get_bit() for _ in range(3)]
        if r.get_bit():
            r.get_normally_small()
            five_qi = 0
        else:
            r.align()
            five_qi = r.get_bits(8)
        if opt[0]:
            if r.get_bit():
                r.get_normally_small()
            else:
                r.get_constrained_int(1, 127)
        if opt[1] or opt[2] or gbr or refl or add or has_erab:
            raise PerError("optional QoS descriptors not supported", r.bit_offset)
        if nd_ext:
            skip_extension_additions(r)
        arp_ext = r.get_bit()
        prio = r.get_constrained_int(1, 15)
        for _ in range(2):
            if r.get_bit():
                r.get_normally_small()
            else:
                r.get_bits(1)
        if arp_ext:
            skip_extension_additions(r)
        if params_ext:
            skip_extension_additions(r)
        if item_ext:
            skip_extension_additions(r)
        return cls(qfi=qfi, five_qi=five_qi, arp_priority=prio)


@dataclass(frozen=True)
class SetupRequestTransfer:
    """Session-resource request transfer: the UPF tunnel endpoint plus QoS."""

    teid: bytes = b"\x00\x00\x00\x01"
    address: str = "127.0.0.1"
    session_type: int = 0  # ipv4
    qos_flows: tuple[QosFlowItem, ...] = (QosFlowItem(),)

    def to_bytes(self) -> bytes:
        w = BitWriter()
        ies: list[tuple[int, int, bytes]] = []
        tnl = BitWriter()
        _encode_tnl(tnl, self.address, self.teid)
        ies.append((139, Criticality.REJECT, tnl.to_bytes()))
        ptype = BitWriter()
        ptype.put_bit(0)
        ptype.put_bits(self.session_type, 3)  # ENUMERATED, 5 roots
        ies.append((134, Criticality.REJECT, ptype.to_bytes()))
        flows = BitWriter()
        flows.put_constrained_int(len(self.qos_flows), 1, 64)
        for item in self.qos_flows:
            item.encode(flows)
        ies.append((136, Criticality.REJECT, flows.to_bytes()))
        _write_ie_container(w, ies)
        return w.to_bytes()

    @classmethod
    def from_ies(cls, ies: list[tuple[int, int, bytes]]) -> "SetupRequestTransfer":
        teid, address, stype, flows = b"", "", 0, []
        for ie_id, _crit, content in ies:
            r = BitReader(content)
            if ie_id == 139:
                address, teid = _decode_tnl(r)
            elif ie_id == 134:
                if r.get_bit():
                    r.get_normally_small()
                else:
                    stype = r.get_bits(3)
            elif ie_id == 136:
                count = r.get_constrained_int(1, 64)
                flows = [QosFlowItem.decode(r) for _ in range(count)]
        return cls(
            teid=teid, address=address, session_type=stype, qos_flows=tuple(flows)
        )


@dataclass(frozen=True)
class SetupResponseTransfer:
    """Session-resource response transfer: the RAN tunnel endpoint."""

    teid: bytes = b"\x00\x00\x00\x01"
    address: str = "127.0.0.1"
    qos_flow_ids: tuple[int, ...] = (1,)

    def to_bytes(self) -> bytes:
        w = BitWriter()
        w.put_bit(0)  # transfer ext
        w.put_bits(0, 2)  # additional TNL / security result absent
        w.put_bit(0)  # QosFlowPerTNLInformation ext
        _encode_tnl(w, self.address, self.teid)
        w.put_constrained_int(len(self.qos_flow_ids), 1, 64)
        for qfi in self.qos_flow_ids:
            w.put_bit(0)  # AssociatedQosFlowItem ext
            w.put_bit(0)  # mapping indication absent
            w.put_bit(0)  # qfi not extended
            w.put_constrained_int(qfi, 0, 63)
        return w.to_bytes()

    @classmethod
    def from_bytes(cls, data: bytes) -> "SetupResponseTransfer":
        r = BitReader(data)
        ext = r.get_bit()
        has_additional, has_security = r.get_bit(), r.get_bit()
        tnl_ext = r.get_bit()
        address, teid = _decode_tnl(r)
        count = r.get_constrained_int(1, 64)
        qfis = []
        for _ in range(count):
            item_ext = r.get_bit()
            has_mapping = r.get_bit()
            if r.get_bit():
                r.get_normally_small()
                qfis.append(0)
            else:
                qfis.append(r.get_constrained_int(0, 63))
            if has_mapping:
                if r.get_bit():
                    r.get_normally_small()
                else:
                    r.get_bits(1)
            if item_ext:
                skip_extension_additions(r)
        if tnl_ext:
            skip_extension_additions(r)
        if has_additional or has_security:
            raise PerError("optional response-transfer fields not supported", r.bit_offset)
        if ext:
            skip_extension_additions(r)
        return cls(teid=teid, address=address, qos_flow_ids=tuple(qfis))


@dataclass(frozen=True)
class SetupFailureTransfer:
    cause: Cause = Cause("radio_network", CauseRadio.UNSPECIFIED)

    def to_bytes(self) -> bytes:
        w = BitWriter()
        w.put_bit(0)  # ext
        w.put_bit(0)  # criticality diagnostics absent
        self.cause.encode(w)
        return w.to_bytes()

    @classmethod
    def from_bytes(cls, data: bytes) -> "SetupFailureTransfer":
        r = BitReader(data)
        ext, (has_diag,) = _seq_header(r, 1)
        cause = Cause.decode(r)
        if has_diag:
            raise PerError("criticality diagnostics not supported", r.bit_offset)
        if ext:
            skip_extension_additions(r)
        return cls(cause=cause)


# -- per-session list items ------------------------------------------------------


@dataclass
class PduResourceItem:
    """One PDU-session entry in a setup request/response/failed list."""

    pdu_session_id: int
    snssai: Snssai | None = None
    transfer: SetupRequestTransfer | SetupResponseTransfer | SetupFailureTransfer | bytes = b""
    nas_pdu: bytes | None = None

    @property
    def transfer_kind(self) -> str:
        if isinstance(self.transfer, SetupRequestTransfer):
            return "request"
        if isinstance(self.transfer, SetupResponseTransfer):
            return "response"
        if isinstance(self.transfer, SetupFailureTransfer):
            return "failure"
        return "opaque"


def _write_ie_container(w: BitWriter, ies: list[tuple[int, int, bytes]]) -> None:
    w.put_constrained_int(len(ies), 0, 65535)
    for ie_id, crit, content in ies:
        w.put_constrained_int(ie_id, 0, 65535)
        w.put_bits(crit, 2)
        w.put_open_type(content)


def _read_ie_container(r: BitReader) -> list[tuple[int, int, bytes]]:
    count = r.get_constrained_int(0, 65535)
    out = []
    for _ in range(count):
        ie_id = r.get_constrained_int(0, 65535)
        crit = r.get_bits(2)
        out.append((ie_id, crit, bytes(r.get_open_type())))
    return out


def read_transfer_container(data: bytes) -> list[tuple[int, int, bytes]]:
    """Request transfers are IE containers wrapped in an octet string."""
    return _read_ie_container(BitReader(data))


def encode_session_request_items(w: BitWriter, items: list[PduResourceItem]) -> None:
    """SUReq/CxtReq item lists: id, optional NAS PDU, slice, transfer."""
    w.put_constrained_int(len(items), 1, 256)
    for item in items:
        if item.snssai is None:
            raise ValueError("session request item needs an S-NSSAI")
        w.put_bit(0)
        w.put_bit(1 if item.nas_pdu is not None else 0)
        w.put_constrained_int(item.pdu_session_id, 0, 255)
        if item.nas_pdu is not None:
            w.put_length(len(item.nas_pdu))
            w.put_octets(item.nas_pdu)
        _encode_snssai(w, item.snssai)
        transfer = item.transfer
        raw = transfer.to_bytes() if not isinstance(transfer, bytes) else transfer
        w.put_length(len(raw))
        w.put_octets(raw)


def decode_session_request_items(r: BitReader) -> list[PduResourceItem]:
    count = r.get_constrained_int(1, 256)
    items = []
    for _ in range(count):
        ext = r.get_bit()
        has_nas = r.get_bit()
        psi = r.get_constrained_int(0, 255)
        nas = bytes(r.get_octets(r.get_length())) if has_nas else None
        snssai = _decode_snssai(r)
        raw = bytes(r.get_octets(r.get_length()))
        try:
            transfer: object = SetupRequestTransfer.from_ies(read_transfer_container(raw))
        except Exception:
            transfer = raw
        if ext:
            skip_extension_additions(r)
        items.append(
            PduResourceItem(pdu_session_id=psi, snssai=snssai, transfer=transfer, nas_pdu=nas)
        )
    return items


def encode_session_response_items(w: BitWriter, items: list[PduResourceItem]) -> None:
    w.put_constrained_int(len(items), 1, 256)
    for item in items:
        w.put_bit(0)
        w.put_constrained_int(item.pdu_session_id, 0, 255)
        transfer = item.transfer
        raw = transfer.to_bytes() if not isinstance(transfer, bytes) else transfer
        w.put_length(len(raw))
        w.put_octets(raw)


def _decode_session_opaque_items(r: BitReader, parse) -> list[PduResourceItem]:
    count = r.get_constrained_int(1, 256)
    items = []
    for _ in range(count):
        ext = r.get_bit()
        psi = r.get_constrained_int(0, 255)
        raw = bytes(r.get_octets(r.get_length()))
        try:
            transfer = parse(raw)
        except Exception:
            transfer = raw
        if ext:
            skip_extension_additions(r)
        items.append(PduResourceItem(pdu_session_id=psi, transfer=transfer))
    return items


def decode_session_response_items(r: BitReader) -> list[PduResourceItem]:
    return _decode_session_opaque_items(r, SetupResponseTransfer.from_bytes)


def decode_session_failed_items(r: BitReader) -> list[PduResourceItem]:
    return _decode_session_opaque_items(r, SetupFailureTransfer.from_bytes)


encode_session_failed_items = encode_session_response_items


# -- simple wrappers ---------------------------------------------------------------


@dataclass(frozen=True)
class AggregateMaxBitRate:
    downlink: int = 1_000_000_000
    uplink: int = 1_000_000_000

    def encode(self, w: BitWriter) -> None:
        w.put_bit(0)
        for rate in (self.downlink, self.uplink):
            w.put_bit(0)  # BitRate not extended
            w.put_constrained_int(rate, 0, 4_000_000_000_000)

    @classmethod
    def decode(cls, r: BitReader) -> "AggregateMaxBitRate":
        ext = r.get_bit()
        rates = []
        for _ in range(2):
            if r.get_bit():  # value outside the root range, length-prefixed
                rates.append(int.from_bytes(r.get_octets(r.get_length()), "big"))
            else:
                rates.append(r.get_constrained_int(0, 4_000_000_000_000))
        if ext:
            skip_extension_additions(r)
        return cls(downlink=rates[0], uplink=rates[1])


@dataclass(frozen=True)
class RawNgapIe:
    """Unknown IE preserved with its criticality for lossless re-encoding."""

    content: bytes
