"""
Bit-level I/O for entropy-coded JPEG segments.

The reader works on data that has already been unstuffed (0xFF00 -> 0xFF)
and split at restart markers; the writer stuffs as it goes.
"""

from __future__ import annotations

from softjpeg.exceptions import TruncatedStreamError


class BitReader:
    """Reads MSB-first bits from one entropy-coded segment."""

    def __init__(self, data: bytes):
        self._data = data
        self._pos = 0
        self._acc = 0
        self._nbits = 0

    def read_bit(self) -> int:
        if self._nbits == 0:
            if self._pos >= len(self._data):
                raise TruncatedStreamError("Entropy-coded segment ended early")
            self._acc = self._data[self._pos]
            self._pos += 1
            self._nbits = 8
        self._nbits -= 1
        return (self._acc >> self._nbits) & 1

    def read(self, count: int) -> int:
        value = 0
        for _ in range(count):
            value = (value << 1) | self.read_bit()
        return value


class BitWriter:
    """Accumulates MSB-first bits and emits stuffed bytes."""

    def __init__(self) -> None:
        self._out = bytearray()
        self._acc = 0
        self._nbits = 0

    def write(self, value: int, count: int) -> None:
        if count == 0:
            return
        self._acc = (self._acc << count) | (value & ((1 << count) - 1))
        self._nbits += count
        while self._nbits >= 8:
            self._nbits -= 8
            byte = (self._acc >> self._nbits) & 0xFF
            self._out.append(byte)
            if byte == 0xFF:
                self._out.append(0x00)
        self._acc &= (1 << self._nbits) - 1

    def pad_to_byte(self) -> None:
        """Fill the last partial byte with 1-bits."""
        if self._nbits:
            self.write((1 << (8 - self._nbits)) - 1, 8 - self._nbits)

    def write_marker(self, marker: int) -> None:
        """Append a raw (unstuffed) 0xFF-prefixed marker; pads first."""
        self.pad_to_byte()
        self._out += bytes((0xFF, marker & 0xFF))

    def getvalue(self) -> bytes:
        self.pad_to_byte()
        return bytes(self._out)


def extend(bits: int, size: int) -> int:
    """Map a ``size``-bit magnitude field to its signed value (T.81 F.12)."""
    if size == 0:
        return 0
    if bits < (1 << (size - 1)):
        return bits - (1 << size) + 1
    return bits


def magnitude_bits(value: int) -> tuple[int, int]:
    """Inverse of ``extend``: (bits, size) for a signed coefficient."""
    if value == 0:
        return 0, 0
    size = abs(value).bit_length()
    if value < 0:
        return value + (1 << size) - 1, size
    return value, size
