"""Active NAS security context: counts, integrity, ciphering, enveloping.

Algorithms: the null pair (NIA0/NEA0) and the AES pair (NIA2 = AES-128-CMAC
truncated to 32 bits, NEA2 = AES-128-CTR).  The 64-bit algorithm input
block is COUNT(32) | BEARER(5) | DIRECTION(1) | zero padding.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import IntEnum

from cryptography.hazmat.primitives.ciphers import Cipher, algorithms, modes
from cryptography.hazmat.primitives.cmac import CMAC

from ..nas.codec import decode_nas, encode_nas
from ..nas.messages import EPD_5GMM, CipheredPayload, NasMessage, SecurityHeader

NAS_BEARER = 1  # 3GPP-access NAS connection identifier
UPLINK = 0
DOWNLINK = 1


class IntegrityAlg(IntEnum):
    NIA0 = 0
    NIA2 = 2


class CipherAlg(IntEnum):
    NEA0 = 0
    NEA2 = 2


class CountReuse(ValueError):
    """A NAS count was about to repeat or run backwards."""


def nas_mac(key: bytes, alg: IntegrityAlg, direction: int, count: int, bearer: int, payload: bytes) -> bytes:
    """32-bit message authentication code over one NAS message."""
    if alg == IntegrityAlg.NIA0:
        return b"\x00\x00\x00\x00"
    block = count.to_bytes(4, "big") + bytes([(bearer & 0x1F) << 3 | (direction & 1) << 2]) + b"\x00\x00\x00"
    mac = CMAC(algorithms.AES(key))
    mac.update(block + payload)
    return mac.finalize()[:4]


def nas_crypt(key: bytes, alg: CipherAlg, direction: int, count: int, bearer: int, payload: bytes) -> bytes:
    """Keystream XOR; involutive for fixed parameters."""
    if alg == CipherAlg.NEA0:
        return payload
    iv = (
        count.to_bytes(4, "big")
        + bytes([(bearer & 0x1F) << 3 | (direction & 1) << 2])
        + b"\x00\x00\x00"
        + b"\x00" * 8
    )
    enc = Cipher(algorithms.AES(key), modes.CTR(iv)).encryptor()
    return enc.update(payload) + enc.finalize()


@dataclass
class NasCount:
    """24-bit NAS count: 16-bit overflow + 8-bit sequence number."""

    overflow: int = 0
    sqn: int = 0

    @property
    def value(self) -> int:
        return (self.overflow << 8) | self.sqn

    def advance(self) -> int:
        current = self.value
        self.sqn += 1
        if self.sqn == 256:
            self.sqn = 0
            self.overflow = (self.overflow + 1) & 0xFFFF
        return current

    def estimate(self, received_sqn: int) -> int:
        """Count implied by a received sequence number (wrap heuristic)."""
        overflow = self.overflow
        if received_sqn < self.sqn:
            overflow = (overflow + 1) & 0xFFFF
        return (overflow << 8) | received_sqn

    def accept(self, received_sqn: int) -> int:
        count = self.estimate(received_sqn)
        if count < self.value:
            raise CountReuse(f"count {count} not above {self.value}")
        self.overflow = count >> 8
        self.sqn = count & 0xFF
        return count


@dataclass
class SecurityContext:
    """Keys plus per-direction counts for one UE<->core association."""

    k_amf: bytes
    k_nas_int: bytes
    k_nas_enc: bytes
    k_gnb: bytes | None = None
    alg_int: IntegrityAlg = IntegrityAlg.NIA2
    alg_enc: CipherAlg = CipherAlg.NEA2
    ul_count: NasCount = field(default_factory=NasCount)
    dl_count: NasCount = field(default_factory=NasCount)
    active: bool = False  # set once the mode-command handshake completes

    def protect(
        self,
        msg: NasMessage,
        direction: int,
        new_context: bool = False,
        cipher: bool | None = None,
        unchecked: bool = False,
    ) -> bytes:
        """Wrap a plain message in a protected envelope and advance the count."""
        plain = encode_nas(NasMessage(body=msg.body), unchecked=unchecked)
        do_cipher = (self.alg_enc != CipherAlg.NEA0) if cipher is None else cipher
        counter = self.ul_count if direction == UPLINK else self.dl_count
        count = counter.advance()
        seq = count & 0xFF

        payload = plain
        if do_cipher:
            payload = nas_crypt(self.k_nas_enc, self.alg_enc, direction, count, NAS_BEARER, plain)
            sht = (
                SecurityHeader.INTEGRITY_CIPHERED_NEW_CONTEXT
                if new_context
                else SecurityHeader.INTEGRITY_CIPHERED
            )
        else:
            sht = SecurityHeader.INTEGRITY_NEW_CONTEXT if new_context else SecurityHeader.INTEGRITY
        mac = nas_mac(
            self.k_nas_int, self.alg_int, direction, count, NAS_BEARER, bytes([seq]) + payload
        )
        head = bytes([EPD_5GMM, sht]) + mac + bytes([seq])
        return head + payload

    def unprotect(self, data: bytes, direction: int) -> tuple[NasMessage, bool]:
        """Decode + verify a protected envelope.

        Returns the inner plain message and whether its MAC verified; the
        count advances only for MAC-valid traffic.
        """
        outer = decode_nas(data)
        if outer.security_header == SecurityHeader.PLAIN:
            return outer, False
        counter = self.ul_count if direction == UPLINK else self.dl_count
        seq = outer.sequence_number or 0
        count = counter.estimate(seq)

        payload = data[7:]  # exact wire octets after the envelope header
        expected = nas_mac(
            self.k_nas_int, self.alg_int, direction, count, NAS_BEARER, bytes([seq]) + payload
        )
        if expected != outer.mac:
            return outer, False
        try:
            counter.accept(seq)
        except CountReuse:
            return outer, False
        if isinstance(outer.body, CipheredPayload):
            plain = nas_crypt(self.k_nas_enc, self.alg_enc, direction, count, NAS_BEARER, payload)
            inner = decode_nas(plain)
            return (
                NasMessage(
                    body=inner.body,
                    security_header=outer.security_header,
                    mac=outer.mac,
                    sequence_number=outer.sequence_number,
                ),
                True,
            )
        return outer, True
