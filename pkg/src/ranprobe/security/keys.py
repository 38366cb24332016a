"""HMAC-SHA-256 key-derivation chain from CK/IK down to the NAS/AN keys.

Function codes: 0x6A KAUSF, 0x6B RES*, 0x6C KSEAF, 0x6D KAMF, 0x69 NAS
algorithm keys, 0x6E KgNB.  128-bit algorithm keys take the low half of
the 256-bit derivation output.
"""

from __future__ import annotations

import hashlib
import hmac

ALG_TYPE_ENC = 0x01
ALG_TYPE_INT = 0x02
ACCESS_3GPP = 0x01


def kdf(key: bytes, fc: int, *params: bytes) -> bytes:
    s = bytes([fc])
    for p in params:
        s += p + len(p).to_bytes(2, "big")
    return hmac.new(key, s, hashlib.sha256).digest()


def serving_network_name(mcc: str, mnc: str) -> str:
    return f"5G:mnc{int(mnc):03d}.mcc{int(mcc):03d}.3gppnetwork.org"


def derive_res_star(ck: bytes, ik: bytes, snn: str, rand: bytes, res: bytes) -> bytes:
    out = kdf(ck + ik, 0x6B, snn.encode(), rand, res)
    return out[16:]


def derive_kausf(ck: bytes, ik: bytes, snn: str, sqn_xor_ak: bytes) -> bytes:
    return kdf(ck + ik, 0x6A, snn.encode(), sqn_xor_ak)


def derive_kseaf(kausf: bytes, snn: str) -> bytes:
    return kdf(kausf, 0x6C, snn.encode())


def derive_kamf(kseaf: bytes, supi: str, abba: bytes) -> bytes:
    return kdf(kseaf, 0x6D, f"imsi-{supi}".encode(), abba)


def derive_nas_key(kamf: bytes, alg_type: int, alg_id: int) -> bytes:
    return kdf(kamf, 0x69, bytes([alg_type]), bytes([alg_id]))[16:]


def derive_kgnb(kamf: bytes, uplink_count: int) -> bytes:
    return kdf(kamf, 0x6E, uplink_count.to_bytes(4, "big"), bytes([ACCESS_3GPP]))


def derive_key_hierarchy(
    ck: bytes,
    ik: bytes,
    snn: str,
    rand: bytes,
    res: bytes,
    sqn_xor_ak: bytes,
    supi: str,
    abba: bytes = b"\x00\x00",
    enc_alg: int = 2,
    int_alg: int = 2,
    initial_uplink_count: int = 0,
) -> dict[str, bytes]:
    """Full chain for one authentication run, identical on UE and core."""
    res_star = derive_res_star(ck, ik, snn, rand, res)
    kausf = derive_kausf(ck, ik, snn, sqn_xor_ak)
    kseaf = derive_kseaf(kausf, snn)
    kamf = derive_kamf(kseaf, supi, abba)
    return {
        "res_star": res_star,
        "kausf": kausf,
        "kseaf": kseaf,
        "kamf": kamf,
        "k_nas_enc": derive_nas_key(kamf, ALG_TYPE_ENC, enc_alg),
        "k_nas_int": derive_nas_key(kamf, ALG_TYPE_INT, int_alg),
        "k_gnb": derive_kgnb(kamf, initial_uplink_count),
    }
