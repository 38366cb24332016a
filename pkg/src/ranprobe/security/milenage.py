"""Milenage credential functions f1/f1*/f2-f5/f5* (AES-128 core).

Standard constants: c1..c5 = 0,1,2,4,8 and rotations r1..r5 = 64,0,32,64,96
bits.  OPc may be supplied directly or derived from OP.
"""

from __future__ import annotations

from dataclasses import dataclass

from cryptography.hazmat.primitives.ciphers import Cipher, algorithms, modes

_C = [bytes(16), b"\x00" * 15 + b"\x01", b"\x00" * 15 + b"\x02", b"\x00" * 15 + b"\x04", b"\x00" * 15 + b"\x08"]
_R = [64, 0, 32, 64, 96]


def _aes(key: bytes, block: bytes) -> bytes:
    enc = Cipher(algorithms.AES(key), modes.ECB()).encryptor()
    return enc.update(block) + enc.finalize()


def _xor(a: bytes, b: bytes) -> bytes:
    return bytes(x ^ y for x, y in zip(a, b))


def _rot(data: bytes, bits: int) -> bytes:
    n = bits // 8
    return data[n:] + data[:n]


def derive_opc(k: bytes, op: bytes) -> bytes:
    return _xor(_aes(k, op), op)


@dataclass(frozen=True)
class MilenageOutput:
    mac_a: bytes  # 8 octets
    mac_s: bytes  # 8 octets
    res: bytes  # 8 octets
    ck: bytes  # 16 octets
    ik: bytes  # 16 octets
    ak: bytes  # 6 octets
    ak_star: bytes  # 6 octets, resynchronisation variant


def milenage(k: bytes, opc: bytes, rand: bytes, sqn: int, amf: bytes) -> MilenageOutput:
    """Run the full f-set for one challenge."""
    if len(k) != 16 or len(opc) != 16:
        raise ValueError("k and opc must be 16 octets")
    if len(rand) != 16:
        raise ValueError(f"rand must be 16 octets, got {len(rand)}")
    if len(amf) != 2:
        raise ValueError(f"auth management field must be 2 octets, got {len(amf)}")
    if not 0 <= sqn < 1 << 48:
        raise ValueError("sqn must fit 48 bits")

    sqn_b = sqn.to_bytes(6, "big")
    temp = _aes(k, _xor(rand, opc))

    in1 = sqn_b + amf + sqn_b + amf
    out1 = _xor(_aes(k, _xor(_xor(temp, _rot(_xor(in1, opc), _R[0])), _C[0])), opc)

    def out_n(idx: int) -> bytes:
        return _xor(_aes(k, _xor(_rot(_xor(temp, opc), _R[idx]), _C[idx])), opc)

    out2 = out_n(1)
    out3 = out_n(2)
    out4 = out_n(3)
    out5 = out_n(4)
    return MilenageOutput(
        mac_a=out1[0:8],
        mac_s=out1[8:16],
        res=out2[8:16],
        ck=out3,
        ik=out4,
        ak=out2[0:6],
        ak_star=out5[0:6],
    )
