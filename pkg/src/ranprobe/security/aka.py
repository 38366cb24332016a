"""Challenge/response flows for primary authentication.

The network side mints vectors and verifies RES*; the UE side checks AUTN
and either answers or raises a synchronisation token (AUTS).  Outcomes are
values, never exceptions: a flipped MAC bit or an out-of-window sequence
number is normal protocol traffic here.
"""

from __future__ import annotations

import hmac as hmac_mod
from dataclasses import dataclass, field

from .keys import derive_kausf, derive_res_star
from .milenage import MilenageOutput, milenage

# UE accepts a received SQN only inside (stored, stored + window]
SQN_WINDOW = 32
RESYNC_AMF = b"\x00\x00"  # management field used with f1* during resync


@dataclass
class UsimCredentials:
    supi: str  # 15 decimal digits
    k: bytes
    opc: bytes
    sqn: int = 0
    amf: bytes = b"\x80\x00"  # separation bit set

    def __post_init__(self) -> None:
        if len(self.supi) != 15 or not self.supi.isdigit():
            raise ValueError(f"supi must be 15 decimal digits, got {self.supi!r}")
        if len(self.k) != 16 or len(self.opc) != 16:
            raise ValueError("k and opc must be 16 octets")
        if not 0 <= self.sqn < 1 << 48:
            raise ValueError("sqn must fit 48 bits")

    @property
    def mcc(self) -> str:
        return self.supi[:3]

    @property
    def mnc(self) -> str:
        # two-digit networks only; three-digit plans need explicit config
        return self.supi[3:5]

    @property
    def msin(self) -> str:
        return self.supi[5:]


@dataclass(frozen=True)
class AuthVector:
    rand: bytes
    autn: bytes
    xres_star: bytes
    kausf: bytes
    ck: bytes = field(repr=False, default=b"")
    ik: bytes = field(repr=False, default=b"")
    res: bytes = field(repr=False, default=b"")
    sqn_xor_ak: bytes = field(repr=False, default=b"")


def generate_vector(creds: UsimCredentials, rand: bytes, snn: str) -> AuthVector:
    """Network side: build the challenge for the UE's current SQN."""
    out = milenage(creds.k, creds.opc, rand, creds.sqn, creds.amf)
    sqn_xor_ak = bytes(s ^ a for s, a in zip(creds.sqn.to_bytes(6, "big"), out.ak))
    autn = sqn_xor_ak + creds.amf + out.mac_a
    return AuthVector(
        rand=rand,
        autn=autn,
        xres_star=derive_res_star(out.ck, out.ik, snn, rand, out.res),
        kausf=derive_kausf(out.ck, out.ik, snn, sqn_xor_ak),
        ck=out.ck,
        ik=out.ik,
        res=out.res,
        sqn_xor_ak=sqn_xor_ak,
    )


@dataclass(frozen=True)
class AkaSuccess:
    res: bytes
    ck: bytes
    ik: bytes
    sqn: int
    sqn_xor_ak: bytes


@dataclass(frozen=True)
class MacFailure:
    reason: str = "AUTN MAC mismatch"


@dataclass(frozen=True)
class SyncFailure:
    auts: bytes  # 14 octets: (SQNms xor AK*) || MAC-S


def verify_autn_or_resync(
    creds: UsimCredentials, rand: bytes, autn: bytes
) -> AkaSuccess | MacFailure | SyncFailure:
    """UE side: check the network token against stored credentials."""
    if len(autn) != 16:
        return MacFailure(reason=f"AUTN is {len(autn)} octets, expected 16")
    sqn_xor_ak, amf, mac_a = autn[0:6], autn[6:8], autn[8:16]

    probe: MilenageOutput = milenage(creds.k, creds.opc, rand, 0, amf)
    sqn = int.from_bytes(bytes(s ^ a for s, a in zip(sqn_xor_ak, probe.ak)), "big")
    real = milenage(creds.k, creds.opc, rand, sqn, amf)
    if not hmac_mod.compare_digest(real.mac_a, mac_a):
        return MacFailure()

    if not creds.sqn < sqn <= creds.sqn + SQN_WINDOW:
        return SyncFailure(auts=build_auts(creds, rand))
    creds.sqn = sqn
    return AkaSuccess(res=real.res, ck=real.ck, ik=real.ik, sqn=sqn, sqn_xor_ak=sqn_xor_ak)


def build_auts(creds: UsimCredentials, rand: bytes) -> bytes:
    """Resync token carrying the UE's stored SQN, concealed with AK*."""
    out = milenage(creds.k, creds.opc, rand, creds.sqn, RESYNC_AMF)
    concealed = bytes(s ^ a for s, a in zip(creds.sqn.to_bytes(6, "big"), out.ak_star))
    return concealed + out.mac_s


def recover_sqn_from_auts(creds: UsimCredentials, rand: bytes, auts: bytes) -> int | None:
    """Network side: extract and verify the UE's SQN from a resync token."""
    if len(auts) != 14:
        return None
    concealed, mac_s = auts[0:6], auts[6:14]
    probe = milenage(creds.k, creds.opc, rand, 0, RESYNC_AMF)
    sqn_ms = int.from_bytes(bytes(c ^ a for c, a in zip(concealed, probe.ak_star)), "big")
    check = milenage(creds.k, creds.opc, rand, sqn_ms, RESYNC_AMF)
    if not hmac_mod.compare_digest(check.mac_s, mac_s):
        return None
    return sqn_ms
