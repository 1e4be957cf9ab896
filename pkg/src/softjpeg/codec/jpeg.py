"""
Baseline sequential JPEG (ITU-T T.81, Huffman, 8-bit) at the coefficient level.

LEARNING NOTE: What a JPEG file really stores
---------------------------------------------
A baseline file carries, per 8×8 block, 64 integer indices γ (zig-zag order,
DC coded as a difference to the previous block of the same component) and
the quantization tables Q. Everything the soft decoder knows about the
original image is in those two objects, so this module recovers them
exactly and never touches pixels:

- ``parse_jpeg``: bytes -> CoefficientImage
- ``encode_coefficients``: PixelImage -> CoefficientImage (DCT + IJG tables)
- ``write_jpeg``: CoefficientImage -> bytes (standard Annex K Huffman tables)
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from softjpeg.codec.bitstream import BitReader, BitWriter, extend, magnitude_bits
from softjpeg.codec.decode import LEVEL_SHIFT, rgb_to_ycbcr
from softjpeg.codec.huffman import HuffmanTable
from softjpeg.codec.quantization import chrominance_table, luminance_table
from softjpeg.codec.tables import CHROMINANCE_AC, CHROMINANCE_DC, LUMINANCE_AC, LUMINANCE_DC
from softjpeg.exceptions import (
    CodecError,
    CorruptHuffmanError,
    TruncatedStreamError,
    UnsupportedMarkerError,
)
from softjpeg.models.images import (
    CoefficientImage,
    ColorSpace,
    ComponentCoefficients,
    PixelImage,
    QuantTable,
)
from softjpeg.models.schemas import Subsampling
from softjpeg.transform import dct2d, pad_to_blocks, plane_to_blocks, quantize, to_zigzag
from softjpeg.utils.logger import get_logger

logger = get_logger(__name__)

SOI, EOI, SOS, DQT, DHT, DRI, SOF0 = 0xD8, 0xD9, 0xDA, 0xDB, 0xC4, 0xDD, 0xC0
RST0, RST7 = 0xD0, 0xD7
APP0, APP15, COM = 0xE0, 0xEF, 0xFE

# SOF markers other than baseline, plus DAC (arithmetic conditioning)
_UNSUPPORTED_FRAMES = {
    0xC1: "extended sequential",
    0xC2: "progressive",
    0xC3: "lossless",
    0xC5: "differential sequential",
    0xC6: "differential progressive",
    0xC7: "differential lossless",
    0xC9: "arithmetic sequential",
    0xCA: "arithmetic progressive",
    0xCB: "arithmetic lossless",
    0xCC: "arithmetic conditioning",
    0xCD: "differential arithmetic sequential",
    0xCE: "differential arithmetic progressive",
    0xCF: "differential arithmetic lossless",
}

_MAX_DC_CATEGORY = 11
_MAX_AC_CATEGORY = 10


# --- parsing -----------------------------------------------------------------


@dataclass
class _FrameComponent:
    component_id: int
    h_sampling: int
    v_sampling: int
    quant_table_id: int
    blocks: np.ndarray = field(default_factory=lambda: np.zeros((0, 0, 64), dtype=np.int32))


@dataclass
class _DecoderState:
    quant_tables: dict[int, QuantTable] = field(default_factory=dict)
    dc_tables: dict[int, HuffmanTable] = field(default_factory=dict)
    ac_tables: dict[int, HuffmanTable] = field(default_factory=dict)
    restart_interval: int = 0
    width: int = 0
    height: int = 0
    components: list[_FrameComponent] = field(default_factory=list)
    scans: int = 0

    @property
    def max_h(self) -> int:
        return max(c.h_sampling for c in self.components)

    @property
    def max_v(self) -> int:
        return max(c.v_sampling for c in self.components)

    def block_dims(self, comp: _FrameComponent) -> tuple[int, int]:
        """(rows, cols) of a component's own block grid."""
        width = math.ceil(self.width * comp.h_sampling / self.max_h)
        height = math.ceil(self.height * comp.v_sampling / self.max_v)
        return math.ceil(height / 8), math.ceil(width / 8)

    def mcu_dims(self) -> tuple[int, int]:
        return math.ceil(self.height / (8 * self.max_v)), math.ceil(self.width / (8 * self.max_h))


def _segment(data: bytes, pos: int) -> tuple[bytes, int]:
    """Return (payload, next position) for a length-prefixed segment at ``pos``."""
    if pos + 2 > len(data):
        raise TruncatedStreamError("Stream ended inside a segment length")
    (length,) = struct.unpack(">H", data[pos : pos + 2])
    if length < 2:
        raise CodecError(f"Invalid segment length {length}")
    end = pos + length
    if end > len(data):
        raise TruncatedStreamError("Stream ended inside a segment")
    return data[pos + 2 : end], end


def _parse_dqt(payload: bytes, state: _DecoderState) -> None:
    pos = 0
    while pos < len(payload):
        precision, table_id = payload[pos] >> 4, payload[pos] & 0x0F
        if precision != 0:
            raise UnsupportedMarkerError("16-bit quantization tables (12-bit JPEG)")
        entries = payload[pos + 1 : pos + 65]
        if len(entries) != 64:
            raise TruncatedStreamError("DQT segment holds a partial table")
        state.quant_tables[table_id] = QuantTable(entries=tuple(entries), table_id=table_id)
        pos += 65


def _parse_dht(payload: bytes, state: _DecoderState) -> None:
    pos = 0
    while pos < len(payload):
        table_class, table_id = payload[pos] >> 4, payload[pos] & 0x0F
        bits = tuple(payload[pos + 1 : pos + 17])
        if len(bits) != 16:
            raise TruncatedStreamError("DHT segment holds a partial table")
        count = sum(bits)
        values = tuple(payload[pos + 17 : pos + 17 + count])
        if len(values) != count:
            raise TruncatedStreamError("DHT segment holds a partial table")
        table = HuffmanTable(bits=bits, values=values)
        (state.ac_tables if table_class else state.dc_tables)[table_id] = table
        pos += 17 + count


def _parse_sof0(payload: bytes, state: _DecoderState) -> None:
    if len(payload) < 6:
        raise TruncatedStreamError("SOF segment too short")
    precision, height, width, count = struct.unpack(">BHHB", payload[:6])
    if precision != 8:
        raise UnsupportedMarkerError(f"{precision}-bit samples are not supported")
    if height == 0 or width == 0:
        raise UnsupportedMarkerError("Frames with a DNL-defined height are not supported")
    if count not in (1, 3):
        raise UnsupportedMarkerError(f"{count}-component frames are not supported")
    if len(payload) < 6 + 3 * count:
        raise TruncatedStreamError("SOF segment too short")
    state.width, state.height = width, height
    state.components = []
    for i in range(count):
        cid, sampling, tq = struct.unpack(">BBB", payload[6 + 3 * i : 9 + 3 * i])
        h, v = sampling >> 4, sampling & 0x0F
        if not (1 <= h <= 4 and 1 <= v <= 4):
            raise CodecError(f"Invalid sampling factors {h}x{v}")
        state.components.append(_FrameComponent(cid, h, v, tq))
    mcu_rows, mcu_cols = state.mcu_dims()
    for comp in state.components:
        rows, cols = (mcu_rows * comp.v_sampling, mcu_cols * comp.h_sampling)
        if count == 1:
            rows, cols = state.block_dims(comp)
        comp.blocks = np.zeros((rows, cols, 64), dtype=np.int32)


def _split_entropy_data(data: bytes, pos: int) -> tuple[list[bytes], int]:
    """
    Unstuff entropy-coded data starting at ``pos``.

    Returns the restart-separated segments and the position of the marker
    that terminated the scan.
    """
    segments: list[bytes] = []
    current = bytearray()
    n = len(data)
    while pos < n:
        byte = data[pos]
        if byte != 0xFF:
            current.append(byte)
            pos += 1
            continue
        if pos + 1 >= n:
            break
        nxt = data[pos + 1]
        if nxt == 0x00:
            current.append(0xFF)
            pos += 2
        elif nxt == 0xFF:
            pos += 1
        elif RST0 <= nxt <= RST7:
            segments.append(bytes(current))
            current = bytearray()
            pos += 2
        else:
            segments.append(bytes(current))
            return segments, pos
    raise TruncatedStreamError("Scan data is not terminated by a marker")


def _decode_block(
    reader: BitReader, dc_table: HuffmanTable, ac_table: HuffmanTable, out: np.ndarray
) -> int:
    """Decode one block into ``out`` (zig-zag order); returns the DC difference."""
    size = dc_table.decode_symbol(reader)
    if size > _MAX_DC_CATEGORY:
        raise CorruptHuffmanError(f"DC magnitude category {size} exceeds 8-bit range")
    diff = extend(reader.read(size), size)
    k = 1
    while k < 64:
        symbol = ac_table.decode_symbol(reader)
        run, size = symbol >> 4, symbol & 0x0F
        if size == 0:
            if run == 15:
                if k + 16 > 64:
                    raise CorruptHuffmanError("Zero run passes the end of the block")
                k += 16
                continue
            break
        k += run
        if k > 63:
            raise CorruptHuffmanError("AC run passes the end of the block")
        out[k] = extend(reader.read(size), size)
        k += 1
    return diff


def _decode_scan(data: bytes, pos: int, state: _DecoderState) -> int:
    header, pos = _segment(data, pos)
    count = header[0]
    if len(header) < 4 + 2 * count:
        raise TruncatedStreamError("SOS segment too short")
    by_id = {c.component_id: c for c in state.components}
    scan: list[tuple[_FrameComponent, HuffmanTable, HuffmanTable]] = []
    for i in range(count):
        cid, tables = header[1 + 2 * i], header[2 + 2 * i]
        if cid not in by_id:
            raise CodecError(f"Scan refers to unknown component {cid}")
        try:
            scan.append((by_id[cid], state.dc_tables[tables >> 4], state.ac_tables[tables & 0x0F]))
        except KeyError:
            raise CorruptHuffmanError(
                f"Scan uses an undefined Huffman table for component {cid}"
            ) from None
    ss, se, approx = header[1 + 2 * count : 4 + 2 * count]
    if (ss, se, approx) != (0, 63, 0):
        raise UnsupportedMarkerError("Spectral selection or successive approximation scan")

    segments, end = _split_entropy_data(data, pos)

    if count == 1:
        comp = scan[0][0]
        rows, cols = state.block_dims(comp)
        units = [[(comp, r, c)] for r in range(rows) for c in range(cols)]
    else:
        mcu_rows, mcu_cols = state.mcu_dims()
        units = [
            [
                (comp, my * comp.v_sampling + dy, mx * comp.h_sampling + dx)
                for comp, _, _ in scan
                for dy in range(comp.v_sampling)
                for dx in range(comp.h_sampling)
            ]
            for my in range(mcu_rows)
            for mx in range(mcu_cols)
        ]
    tables = {id(comp): (dc, ac) for comp, dc, ac in scan}

    interval = state.restart_interval or len(units)
    needed = math.ceil(len(units) / interval)
    if len(segments) < needed:
        raise TruncatedStreamError(f"Scan has {len(segments)} restart segments, expected {needed}")

    for seg_index in range(needed):
        reader = BitReader(segments[seg_index])
        predictors = {id(comp): 0 for comp, _, _ in scan}
        for unit in units[seg_index * interval : (seg_index + 1) * interval]:
            for comp, row, col in unit:
                dc_table, ac_table = tables[id(comp)]
                block = np.zeros(64, dtype=np.int32)
                predictors[id(comp)] += _decode_block(reader, dc_table, ac_table, block)
                block[0] = predictors[id(comp)]
                comp.blocks[row, col] = block
    state.scans += 1
    return end


def parse_jpeg(data: bytes) -> CoefficientImage:
    """Recover γ and Q exactly as coded in a baseline JPEG stream."""
    if len(data) < 4 or data[0] != 0xFF or data[1] != SOI:
        raise CodecError("Not a JPEG stream (missing SOI)")
    state = _DecoderState()
    pos = 2
    while True:
        if pos >= len(data):
            raise TruncatedStreamError("Stream ended before EOI")
        if data[pos] != 0xFF:
            raise CodecError(f"Expected a marker at offset {pos}")
        while pos < len(data) and data[pos] == 0xFF:
            pos += 1
        if pos >= len(data):
            raise TruncatedStreamError("Stream ended before EOI")
        marker = data[pos]
        pos += 1

        if marker == EOI:
            break
        if marker in _UNSUPPORTED_FRAMES:
            raise UnsupportedMarkerError(f"{_UNSUPPORTED_FRAMES[marker]} JPEG is not supported")
        if marker == SOS:
            if not state.components:
                raise CodecError("SOS before SOF")
            pos = _decode_scan(data, pos, state)
            continue

        payload, pos = _segment(data, pos)
        if marker == DQT:
            _parse_dqt(payload, state)
        elif marker == DHT:
            _parse_dht(payload, state)
        elif marker == SOF0:
            _parse_sof0(payload, state)
        elif marker == DRI:
            if len(payload) < 2:
                raise TruncatedStreamError("DRI segment too short")
            (state.restart_interval,) = struct.unpack(">H", payload[:2])
        elif APP0 <= marker <= APP15 or marker == COM:
            continue
        else:
            raise UnsupportedMarkerError(f"Marker 0xFF{marker:02X} is not supported")

    if state.scans == 0:
        raise TruncatedStreamError("No scan data before EOI")

    components = []
    for comp in state.components:
        rows, cols = state.block_dims(comp)
        components.append(
            ComponentCoefficients(
                component_id=comp.component_id,
                h_sampling=comp.h_sampling,
                v_sampling=comp.v_sampling,
                quant_table_id=comp.quant_table_id,
                blocks=comp.blocks[:rows, :cols].copy(),
            )
        )
    used = {c.quant_table_id for c in components}
    missing = used - state.quant_tables.keys()
    if missing:
        raise CodecError(f"Frame refers to undefined quantization tables {sorted(missing)}")
    coeffs = CoefficientImage(
        width=state.width,
        height=state.height,
        components=tuple(components),
        quant_tables={k: v for k, v in state.quant_tables.items() if k in used},
    )
    logger.debug(
        "Parsed JPEG %dx%d, %d component(s), sampling %s, tables %s, %d scan(s)",
        coeffs.width,
        coeffs.height,
        len(components),
        [(c.h_sampling, c.v_sampling) for c in components],
        sorted(coeffs.quant_tables),
        state.scans,
    )
    return coeffs


def read_jpeg(path: str | Path) -> CoefficientImage:
    return parse_jpeg(Path(path).read_bytes())


# --- encoding ----------------------------------------------------------------


def _component_blocks(plane: np.ndarray, table: QuantTable) -> np.ndarray:
    """Level-shift, DCT and quantize one plane into zig-zag indices."""
    blocks = plane_to_blocks(pad_to_blocks(plane) - LEVEL_SHIFT)
    return to_zigzag(quantize(dct2d(blocks), table.natural())).astype(np.int32)


def _downsample_2x2(plane: np.ndarray) -> np.ndarray:
    height, width = plane.shape
    padded = np.pad(plane, ((0, height % 2), (0, width % 2)), mode="edge")
    return padded.reshape(padded.shape[0] // 2, 2, padded.shape[1] // 2, 2).mean(axis=(1, 3))


def encode_coefficients(
    img: PixelImage, qf: int, subsampling: Subsampling | str = Subsampling.S420
) -> CoefficientImage:
    """
    Quantized DCT indices of ``img`` at quality ``qf``.

    Samples are rounded to 8 bits first, as any JPEG encoder receives them.
    Gray images produce one component; color images are converted to JFIF
    YCbCr with 4:2:0 or 4:4:4 chroma.
    """
    luma = luminance_table(qf)
    samples = img.to_uint8().astype(np.float64)

    if img.channels == 1:
        comp = ComponentCoefficients(1, 1, 1, 0, _component_blocks(samples, luma))
        return CoefficientImage(img.width, img.height, (comp,), {0: luma})

    chroma = chrominance_table(qf)
    ycc = rgb_to_ycbcr(samples) if img.color_space == ColorSpace.RGB else samples
    factor = 2 if Subsampling(subsampling) == Subsampling.S420 else 1
    components = [ComponentCoefficients(1, factor, factor, 0, _component_blocks(ycc[..., 0], luma))]
    for cid in (2, 3):
        plane = ycc[..., cid - 1]
        if factor == 2:
            plane = _downsample_2x2(plane)
        components.append(ComponentCoefficients(cid, 1, 1, 1, _component_blocks(plane, chroma)))
    return CoefficientImage(img.width, img.height, tuple(components), {0: luma, 1: chroma})


def _write_segment(out: bytearray, marker: int, payload: bytes | None = None) -> None:
    if payload is None:
        out += struct.pack(">BB", 0xFF, marker)
    else:
        out += struct.pack(">BBH", 0xFF, marker, len(payload) + 2) + payload


def _encode_block(
    writer: BitWriter, zz: np.ndarray, diff: int, dc_table: HuffmanTable, ac_table: HuffmanTable
) -> None:
    bits, size = magnitude_bits(diff)
    if size > _MAX_DC_CATEGORY:
        raise CodecError(f"DC difference {diff} is out of 8-bit JPEG range")
    dc_table.encode_symbol(writer, size)
    writer.write(bits, size)
    nonzero = np.flatnonzero(zz[1:])
    last = int(nonzero[-1]) + 1 if nonzero.size else 0
    run = 0
    for k in range(1, last + 1):
        value = int(zz[k])
        if value == 0:
            run += 1
            continue
        while run > 15:
            ac_table.encode_symbol(writer, 0xF0)
            run -= 16
        bits, size = magnitude_bits(value)
        if size > _MAX_AC_CATEGORY:
            raise CodecError(f"AC coefficient {value} is out of 8-bit JPEG range")
        ac_table.encode_symbol(writer, (run << 4) | size)
        writer.write(bits, size)
        run = 0
    if last < 63:
        ac_table.encode_symbol(writer, 0x00)


def write_jpeg(coeffs: CoefficientImage, restart_interval: int = 0) -> bytes:
    """Entropy-code a CoefficientImage as a single-scan baseline JFIF stream."""
    if coeffs.width > 0xFFFF or coeffs.height > 0xFFFF:
        raise CodecError("Baseline JPEG dimensions are limited to 65535")
    if not 0 <= restart_interval <= 0xFFFF:
        raise ValueError("Restart interval must fit in 16 bits")
    huffman = [
        (HuffmanTable.from_spec(LUMINANCE_DC), HuffmanTable.from_spec(LUMINANCE_AC)),
        (HuffmanTable.from_spec(CHROMINANCE_DC), HuffmanTable.from_spec(CHROMINANCE_AC)),
    ]
    slots = [0 if i == 0 else 1 for i in range(len(coeffs.components))]

    out = bytearray()
    _write_segment(out, SOI)
    _write_segment(out, APP0, b"JFIF\x00" + struct.pack(">BBBHHBB", 1, 1, 0, 1, 1, 0, 0))
    for table_id, table in sorted(coeffs.quant_tables.items()):
        _write_segment(out, DQT, bytes([table_id]) + bytes(table.entries))

    frame = struct.pack(">BHHB", 8, coeffs.height, coeffs.width, len(coeffs.components))
    for comp in coeffs.components:
        frame += struct.pack(
            ">BBB", comp.component_id, (comp.h_sampling << 4) | comp.v_sampling, comp.quant_table_id
        )
    _write_segment(out, SOF0, frame)

    for slot in sorted(set(slots)):
        dc, ac = huffman[slot]
        _write_segment(out, DHT, bytes([slot]) + dc.to_segment())
        _write_segment(out, DHT, bytes([0x10 | slot]) + ac.to_segment())
    if restart_interval:
        _write_segment(out, DRI, struct.pack(">H", restart_interval))

    scan_header = bytes([len(coeffs.components)])
    for comp, slot in zip(coeffs.components, slots):
        scan_header += bytes([comp.component_id, (slot << 4) | slot])
    scan_header += bytes([0, 63, 0])
    _write_segment(out, SOS, scan_header)

    # blocks visited in scan order, padded to whole MCUs by edge replication
    if len(coeffs.components) == 1:
        blocks = coeffs.components[0].blocks
        rows, cols = blocks.shape[:2]
        units = [[(0, blocks[r, c])] for r in range(rows) for c in range(cols)]
    else:
        mcu_rows = math.ceil(coeffs.height / (8 * coeffs.max_v_sampling))
        mcu_cols = math.ceil(coeffs.width / (8 * coeffs.max_h_sampling))
        padded = []
        for comp in coeffs.components:
            rows, cols = mcu_rows * comp.v_sampling, mcu_cols * comp.h_sampling
            padded.append(
                np.pad(
                    comp.blocks,
                    ((0, rows - comp.block_rows), (0, cols - comp.block_cols), (0, 0)),
                    mode="edge",
                )
            )
        units = [
            [
                (i, padded[i][my * comp.v_sampling + dy, mx * comp.h_sampling + dx])
                for i, comp in enumerate(coeffs.components)
                for dy in range(comp.v_sampling)
                for dx in range(comp.h_sampling)
            ]
            for my in range(mcu_rows)
            for mx in range(mcu_cols)
        ]

    writer = BitWriter()
    predictors = [0] * len(coeffs.components)
    for index, unit in enumerate(units):
        if restart_interval and index and index % restart_interval == 0:
            writer.write_marker(RST0 + (index // restart_interval - 1) % 8)
            predictors = [0] * len(coeffs.components)
        for comp_index, zz in unit:
            dc_table, ac_table = huffman[slots[comp_index]]
            dc = int(zz[0])
            _encode_block(writer, zz, dc - predictors[comp_index], dc_table, ac_table)
            predictors[comp_index] = dc
    out += writer.getvalue()
    _write_segment(out, EOI)
    return bytes(out)


def encode_jpeg(
    img: PixelImage, qf: int, subsampling: Subsampling | str = Subsampling.S420
) -> bytes:
    """Compress ``img`` at quality ``qf`` to a baseline JPEG byte string."""
    return write_jpeg(encode_coefficients(img, qf, subsampling))
