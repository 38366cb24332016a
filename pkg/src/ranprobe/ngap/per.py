"""Aligned-PER (X.691) bit-level primitives for the NG-C signaling codec.

Only the subset needed by the closed NGAP message set is implemented:
constrained/unconstrained whole numbers, enumerations, bit/octet strings,
character strings, the general length determinant, normally-small numbers
(extension machinery), and open types.  Fragmented lengths (>= 16384) are
rejected rather than reassembled.
"""

from __future__ import annotations


class PerError(Exception):
    """Malformed or unsupported PER data; carries the failing bit offset."""

    def __init__(self, message: str, bit_offset: int = 0):
        super().__init__(f"{message} (bit offset {bit_offset})")
        self.bit_offset = bit_offset


class PerEncodeError(Exception):
    """Value outside the constraints the encoder supports."""


def _bits_for_range(value_range: int) -> int:
    """Minimum bit-field width for a constrained range (X.691 10.5.3)."""
    return max(1, (value_range - 1).bit_length())


def _octets_for(value: int) -> int:
    return max(1, (value.bit_length() + 7) // 8)


class BitWriter:
    """Accumulates an aligned-PER bit stream, MSB first."""

    def __init__(self) -> None:
        self._buf = bytearray()
        self._bitpos = 0  # bits used in the trailing partial octet

    @property
    def bit_length(self) -> int:
        return len(self._buf) * 8 - (8 - self._bitpos if self._bitpos else 0)

    def put_bit(self, bit: int) -> None:
        if self._bitpos == 0:
            self._buf.append(0)
            self._bitpos = 8
        self._bitpos -= 1
        if bit:
            self._buf[-1] |= 1 << self._bitpos

    def put_bits(self, value: int, width: int) -> None:
        for shift in range(width - 1, -1, -1):
            self.put_bit((value >> shift) & 1)

    def align(self) -> None:
        self._bitpos = 0

    def put_octets(self, data: bytes) -> None:
        self.align()
        self._buf.extend(data)

    def to_bytes(self) -> bytes:
        return bytes(self._buf) if self._buf else b"\x00"

    # -- composite encoders -------------------------------------------------

    def put_constrained_int(self, value: int, lb: int, ub: int) -> None:
        """X.691 10.5: aligned-variant constrained whole number."""
        if not lb <= value <= ub:
            raise PerEncodeError(f"value {value} outside [{lb}, {ub}]")
        rng = ub - lb + 1
        offset = value - lb
        if rng == 1:
            return
        if rng <= 255:
            self.put_bits(offset, _bits_for_range(rng))
        elif rng == 256:
            self.align()
            self.put_bits(offset, 8)
        elif rng <= 65536:
            self.align()
            self.put_bits(offset, 16)
        else:
            max_octets = _octets_for(ub - lb)
            need = _octets_for(offset)
            self.put_constrained_int(need, 1, max_octets)
            self.align()
            self.put_bits(offset, need * 8)

    def put_normally_small(self, value: int) -> None:
        """X.691 10.6: used for extension indices and addition counts."""
        if value < 64:
            self.put_bit(0)
            self.put_bits(value, 6)
        else:
            self.put_bit(1)
            self.put_length(_octets_for(value))
            self.align()
            self.put_bits(value, _octets_for(value) * 8)

    def put_length(self, length: int) -> None:
        """X.691 10.9 general length determinant (no fragmentation)."""
        self.align()
        if length <= 127:
            self.put_bits(length, 8)
        elif length <= 16383:
            self.put_bits(0x8000 | length, 16)
        else:
            raise PerEncodeError(f"length {length} requires fragmentation")

    def put_open_type(self, content: bytes) -> None:
        if not content:
            content = b"\x00"
        self.put_length(len(content))
        self.put_octets(content)


class BitReader:
    """Reads an aligned-PER bit stream, mirroring :class:`BitWriter`."""

    def __init__(self, data: bytes) -> None:
        self._data = data
        self._pos = 0  # absolute bit position

    @property
    def bit_offset(self) -> int:
        return self._pos

    @property
    def bits_left(self) -> int:
        return len(self._data) * 8 - self._pos

    def get_bit(self) -> int:
        if self._pos >= len(self._data) * 8:
            raise PerError("truncated input", self._pos)
        octet = self._data[self._pos // 8]
        bit = (octet >> (7 - self._pos % 8)) & 1
        self._pos += 1
        return bit

    def get_bits(self, width: int) -> int:
        value = 0
        for _ in range(width):
            value = (value << 1) | self.get_bit()
        return value

    def align(self) -> None:
        rem = self._pos % 8
        if rem:
            self._pos += 8 - rem

    def get_octets(self, count: int) -> bytes:
        self.align()
        start = self._pos // 8
        if start + count > len(self._data):
            raise PerError(f"truncated: need {count} octets", self._pos)
        self._pos += count * 8
        return self._data[start : start + count]

    # -- composite decoders -------------------------------------------------

    def get_constrained_int(self, lb: int, ub: int) -> int:
        rng = ub - lb + 1
        if rng == 1:
            return lb
        if rng <= 255:
            return lb + self.get_bits(_bits_for_range(rng))
        if rng == 256:
            self.align()
            return lb + self.get_bits(8)
        if rng <= 65536:
            self.align()
            return lb + self.get_bits(16)
        max_octets = _octets_for(ub - lb)
        need = self.get_constrained_int(1, max_octets)
        value = int.from_bytes(self.get_octets(need), "big")
        if value > ub - lb:
            raise PerError(f"constrained int {value} exceeds range", self._pos)
        return lb + value

    def get_normally_small(self) -> int:
        if self.get_bit() == 0:
            return self.get_bits(6)
        length = self.get_length()
        return int.from_bytes(self.get_octets(length), "big")

    def get_length(self) -> int:
        self.align()
        first = self.get_bits(8)
        if first < 0x80:
            return first
        if first < 0xC0:
            return ((first & 0x3F) << 8) | self.get_bits(8)
        raise PerError("fragmented length determinant not supported", self._pos)

    def get_open_type(self) -> bytes:
        length = self.get_length()
        return self.get_octets(length)
