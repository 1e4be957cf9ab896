"""Canonical Huffman tables built from (BITS, HUFFVAL) as carried by DHT."""

from __future__ import annotations

from dataclasses import dataclass, field

from softjpeg.codec.bitstream import BitReader, BitWriter
from softjpeg.exceptions import CodecError, CorruptHuffmanError


@dataclass(frozen=True)
class HuffmanTable:
    """
    One DC or AC table.

    ``bits[i]`` is the number of codes of length i + 1 and ``values`` lists
    the symbols in code order, exactly as in a DHT segment.
    """

    bits: tuple[int, ...]
    values: tuple[int, ...]
    _encode: dict[int, tuple[int, int]] = field(init=False, repr=False, compare=False)
    _decode: dict[tuple[int, int], int] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if len(self.bits) != 16:
            raise CorruptHuffmanError(f"BITS must have 16 entries, got {len(self.bits)}")
        if sum(self.bits) != len(self.values):
            raise CorruptHuffmanError("BITS total does not match the number of symbols")
        encode: dict[int, tuple[int, int]] = {}
        decode: dict[tuple[int, int], int] = {}
        code = 0
        index = 0
        for length, count in enumerate(self.bits, start=1):
            for _ in range(count):
                if code >= (1 << length):
                    raise CorruptHuffmanError("Huffman table is over-subscribed")
                symbol = self.values[index]
                encode[symbol] = (code, length)
                decode[(length, code)] = symbol
                code += 1
                index += 1
            code <<= 1
        object.__setattr__(self, "_encode", encode)
        object.__setattr__(self, "_decode", decode)

    @classmethod
    def from_spec(cls, spec: tuple[tuple[int, ...], tuple[int, ...]]) -> HuffmanTable:
        bits, values = spec
        return cls(bits=tuple(bits), values=tuple(values))

    def decode_symbol(self, reader: BitReader) -> int:
        code = 0
        for length in range(1, 17):
            code = (code << 1) | reader.read_bit()
            symbol = self._decode.get((length, code))
            if symbol is not None:
                return symbol
        raise CorruptHuffmanError("No Huffman code matches the next 16 bits")

    def encode_symbol(self, writer: BitWriter, symbol: int) -> None:
        try:
            code, length = self._encode[symbol]
        except KeyError:
            raise CodecError(f"Symbol 0x{symbol:02X} has no code in this Huffman table") from None
        writer.write(code, length)

    def to_segment(self) -> bytes:
        """Payload of a DHT entry (without the class/id byte)."""
        return bytes(self.bits) + bytes(self.values)
