"""Baseline sequential JPEG decoder (4:4:4 / grayscale only).

The dequantized coefficients go through the classic 13-bit fixed-point
integer IDCT and the 16-bit fixed-point YCbCr->RGB conversion used by the
common reference decoders, so output pixels line up with them bit for bit
on well-formed input.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field

import numpy as np

from ..blocks import BLOCK
from ..errors import JpegDecodeError, UnsupportedJpegError
from . import tables
from ._entropy import decode_scan

_SOF_UNSUPPORTED = {
    0xC2: "progressive JPEG",
    0xC3: "lossless JPEG",
    0xC5: "differential sequential JPEG",
    0xC6: "differential progressive JPEG",
    0xC7: "differential lossless JPEG",
    0xC9: "arithmetic-coded JPEG",
    0xCA: "arithmetic-coded progressive JPEG",
    0xCB: "arithmetic-coded lossless JPEG",
    0xCD: "differential arithmetic JPEG",
    0xCE: "differential arithmetic progressive JPEG",
    0xCF: "differential arithmetic lossless JPEG",
}

_DECODE_STATUS = {
    1: "invalid Huffman code in entropy data",
    2: "entropy data ended before the last block",
    3: "missing or malformed restart marker",
    4: "coefficient run overflows a block",
}


@dataclass
class _Component:
    comp_id: int
    quant_id: int
    dc_id: int = 0
    ac_id: int = 0


@dataclass
class _FrameState:
    width: int = 0
    height: int = 0
    components: list = field(default_factory=list)
    quant: dict = field(default_factory=dict)
    huff_dc: dict = field(default_factory=dict)
    huff_ac: dict = field(default_factory=dict)
    restart_interval: int = 0


def _u16(data: bytes, pos: int) -> int:
    if pos + 2 > len(data):
        raise JpegDecodeError("truncated JPEG stream")
    return struct.unpack_from(">H", data, pos)[0]


def _parse_dqt(payload: bytes, state: _FrameState) -> None:
    pos = 0
    while pos < len(payload):
        pq, tq = payload[pos] >> 4, payload[pos] & 0x0F
        pos += 1
        if pq not in (0, 1):
            raise JpegDecodeError(f"bad quantization table precision {pq}")
        count = 64 * (2 if pq else 1)
        if pos + count > len(payload):
            raise JpegDecodeError("truncated DQT segment")
        if pq:
            vals = np.frombuffer(payload, dtype=">u2", count=64, offset=pos).astype(np.int64)
        else:
            vals = np.frombuffer(payload, dtype=np.uint8, count=64, offset=pos).astype(np.int64)
        pos += count
        table = np.zeros(64, dtype=np.int64)
        table[tables.ZIGZAG_TO_NATURAL] = vals
        state.quant[tq] = table.reshape(8, 8)


def _parse_dht(payload: bytes, state: _FrameState) -> None:
    pos = 0
    while pos < len(payload):
        if pos + 17 > len(payload):
            raise JpegDecodeError("truncated DHT segment")
        tc, th = payload[pos] >> 4, payload[pos] & 0x0F
        if tc not in (0, 1) or th > 3:
            raise JpegDecodeError(f"bad Huffman table class/id {tc}/{th}")
        bits = list(payload[pos + 1 : pos + 17])
        pos += 17
        total = sum(bits)
        if pos + total > len(payload):
            raise JpegDecodeError("truncated DHT segment")
        values = list(payload[pos : pos + total])
        pos += total
        target = state.huff_dc if tc == 0 else state.huff_ac
        target[th] = tables.build_decode_table(bits, values)


def _parse_sof0(payload: bytes, state: _FrameState) -> None:
    if len(payload) < 6:
        raise JpegDecodeError("truncated SOF segment")
    precision, height, width, ncomp = struct.unpack_from(">BHHB", payload, 0)
    if precision != 8:
        raise UnsupportedJpegError(f"{precision}-bit sample precision")
    if ncomp not in (1, 3):
        raise UnsupportedJpegError(f"{ncomp}-component JPEG")
    if len(payload) != 6 + 3 * ncomp:
        raise JpegDecodeError("bad SOF segment length")
    if height == 0 or width == 0:
        raise JpegDecodeError("zero image dimension in SOF")
    state.width = width
    state.height = height
    for i in range(ncomp):
        cid, sampling, tq = payload[6 + 3 * i : 9 + 3 * i]
        if sampling != 0x11:
            raise UnsupportedJpegError("chroma subsampling other than 4:4:4")
        state.components.append(_Component(comp_id=cid, quant_id=tq))


def _parse_sos(payload: bytes, state: _FrameState) -> None:
    if not state.components:
        raise JpegDecodeError("SOS before SOF")
    ncomp = payload[0]
    if ncomp != len(state.components):
        raise UnsupportedJpegError("multi-scan (non-interleaved) JPEG")
    if len(payload) != 1 + 2 * ncomp + 3:
        raise JpegDecodeError("bad SOS segment length")
    by_id = {c.comp_id: c for c in state.components}
    for i in range(ncomp):
        cid, tabs = payload[1 + 2 * i], payload[2 + 2 * i]
        if cid not in by_id:
            raise JpegDecodeError(f"SOS references unknown component {cid}")
        by_id[cid].dc_id = tabs >> 4
        by_id[cid].ac_id = tabs & 0x0F
    ss, se, a = payload[-3], payload[-2], payload[-1]
    if (ss, se, a) != (0, 63, 0):
        raise UnsupportedJpegError("non-baseline spectral selection")


def _parse(data: bytes) -> tuple[_FrameState, int]:
    """Parse headers up to SOS; returns state and the entropy-data offset."""
    if len(data) < 4 or data[0] != 0xFF or data[1] != 0xD8:
        raise JpegDecodeError("missing SOI marker")
    state = _FrameState()
    pos = 2
    while True:
        if pos + 2 > len(data):
            raise JpegDecodeError("truncated JPEG stream")
        if data[pos] != 0xFF:
            raise JpegDecodeError(f"expected marker at offset {pos}")
        while pos < len(data) and data[pos] == 0xFF:
            pos += 1  # fill bytes
        if pos >= len(data):
            raise JpegDecodeError("truncated JPEG stream")
        marker = data[pos]
        pos += 1
        if marker == 0xD9:
            raise JpegDecodeError("reached EOI without scan data")
        if marker == 0x01 or 0xD0 <= marker <= 0xD7:
            continue  # parameterless markers
        length = _u16(data, pos)
        if pos + length > len(data):
            raise JpegDecodeError("segment length exceeds stream size")
        payload = data[pos + 2 : pos + length]
        pos += length
        if marker == 0xDB:
            _parse_dqt(payload, state)
        elif marker == 0xC4:
            _parse_dht(payload, state)
        elif marker in (0xC0, 0xC1):
            _parse_sof0(payload, state)
        elif marker in _SOF_UNSUPPORTED:
            raise UnsupportedJpegError(_SOF_UNSUPPORTED[marker])
        elif marker == 0xDD:
            if len(payload) != 2:
                raise JpegDecodeError("bad DRI segment length")
            state.restart_interval = struct.unpack(">H", payload)[0]
        elif marker == 0xDC:
            raise UnsupportedJpegError("DNL line-count marker")
        elif marker == 0xDA:
            _parse_sos(payload, state)
            return state, pos
        # APPn/COM and other segments are skipped


# 13-bit fixed-point IDCT constants.
_F0298 = 2446
_F0390 = 3196
_F0541 = 4433
_F0765 = 6270
_F0899 = 7373
_F1175 = 9633
_F1501 = 12299
_F1847 = 15137
_F1961 = 16069
_F2053 = 16819
_F2562 = 20995
_F3072 = 25172


def _descale(x: np.ndarray, n: int) -> np.ndarray:
    return (x + (1 << (n - 1))) >> n


def _idct_pass(s0, s1, s2, s3, s4, s5, s6, s7):
    z1 = (s2 + s6) * _F0541
    tmp2 = z1 - s6 * _F1847
    tmp3 = z1 + s2 * _F0765
    tmp0 = (s0 + s4) << 13
    tmp1 = (s0 - s4) << 13
    tmp10 = tmp0 + tmp3
    tmp13 = tmp0 - tmp3
    tmp11 = tmp1 + tmp2
    tmp12 = tmp1 - tmp2

    t0, t1, t2, t3 = s7, s5, s3, s1
    z1 = t0 + t3
    z2 = t1 + t2
    z3 = t0 + t2
    z4 = t1 + t3
    z5 = (z3 + z4) * _F1175
    t0 = t0 * _F0298
    t1 = t1 * _F2053
    t2 = t2 * _F3072
    t3 = t3 * _F1501
    z1 = z1 * -_F0899
    z2 = z2 * -_F2562
    z3 = z3 * -_F1961 + z5
    z4 = z4 * -_F0390 + z5
    t0 = t0 + z1 + z3
    t1 = t1 + z2 + z4
    t2 = t2 + z2 + z3
    t3 = t3 + z1 + z4
    return (
        tmp10 + t3,
        tmp11 + t2,
        tmp12 + t1,
        tmp13 + t0,
        tmp13 - t0,
        tmp12 - t1,
        tmp11 - t2,
        tmp10 - t3,
    )


def _idct_islow(coef: np.ndarray) -> np.ndarray:
    """Fixed-point 8x8 IDCT over a (B, 8, 8) int64 stack; output int64 0..255."""
    cols = _idct_pass(*(coef[:, r, :] for r in range(8)))
    ws = np.stack([_descale(c, 11) for c in cols], axis=1)
    rows = _idct_pass(*(ws[:, :, c] for c in range(8)))
    out = np.stack([_descale(r, 18) + 128 for r in rows], axis=2)
    return np.clip(out, 0, 255)


def _ycbcr_to_rgb(y: np.ndarray, cb: np.ndarray, cr: np.ndarray) -> np.ndarray:
    """16-bit fixed-point BT.601 conversion, matching the reference tables."""
    cx = cb - 128
    rx = cr - 128
    r = y + ((91881 * rx + 32768) >> 16)
    b = y + ((116130 * cx + 32768) >> 16)
    g = y + ((-22554 * cx - 46802 * rx + 32768) >> 16)
    return np.clip(np.stack([r, g, b], axis=-1), 0, 255).astype(np.uint8)


def _plane_from_blocks(blocks: np.ndarray, gh: int, gw: int) -> np.ndarray:
    return blocks.reshape(gh, gw, BLOCK, BLOCK).transpose(0, 2, 1, 3).reshape(gh * BLOCK, gw * BLOCK)


def decode_jpeg(data: bytes) -> np.ndarray:
    """Decode a baseline 4:4:4 (or grayscale) JPEG to uint8 pixels.

    Returns (H, W, 3) RGB for three-component images, (H, W) for
    single-component ones.
    """
    state, scan_start = _parse(bytes(data))
    ncomp = len(state.components)
    gw = (state.width + BLOCK - 1) // BLOCK
    gh = (state.height + BLOCK - 1) // BLOCK
    n_mcus = gh * gw
    n_blocks = n_mcus * ncomp

    dc_maxcode = np.full((4, 18), -1, dtype=np.int64)
    dc_valoff = np.zeros((4, 18), dtype=np.int64)
    dc_values = np.zeros((4, 256), dtype=np.int16)
    ac_maxcode = np.full((4, 18), -1, dtype=np.int64)
    ac_valoff = np.zeros((4, 18), dtype=np.int64)
    ac_values = np.zeros((4, 256), dtype=np.int16)
    for tid, (mx, vo, vals) in state.huff_dc.items():
        dc_maxcode[tid], dc_valoff[tid], dc_values[tid] = mx, vo, vals
    for tid, (mx, vo, vals) in state.huff_ac.items():
        ac_maxcode[tid], ac_valoff[tid], ac_values[tid] = mx, vo, vals
    for comp in state.components:
        if comp.dc_id not in state.huff_dc or comp.ac_id not in state.huff_ac:
            raise JpegDecodeError(f"component {comp.comp_id} references undefined Huffman table")
        if comp.quant_id not in state.quant:
            raise JpegDecodeError(f"component {comp.comp_id} references undefined quant table")

    comp_of_block = np.tile(np.arange(ncomp, dtype=np.uint8), n_mcus)
    dc_tbl = np.array([c.dc_id for c in state.components], dtype=np.uint8)
    ac_tbl = np.array([c.ac_id for c in state.components], dtype=np.uint8)
    coeffs = np.zeros((n_blocks, 64), dtype=np.int32)
    scan = np.frombuffer(data, dtype=np.uint8, offset=scan_start)
    status, _ = decode_scan(
        scan,
        comp_of_block,
        dc_tbl,
        ac_tbl,
        dc_maxcode,
        dc_valoff,
        dc_values,
        ac_maxcode,
        ac_valoff,
        ac_values,
        ncomp,
        state.restart_interval,
        coeffs,
    )
    if status != 0:
        raise JpegDecodeError(_DECODE_STATUS.get(status, f"entropy decode failed ({status})"))

    planes = []
    for idx, comp in enumerate(state.components):
        zz = coeffs[idx::ncomp].astype(np.int64)
        nat = np.zeros_like(zz)
        nat[:, tables.ZIGZAG_TO_NATURAL] = zz
        nat = nat.reshape(-1, 8, 8) * state.quant[comp.quant_id][np.newaxis]
        samples = _idct_islow(nat)
        planes.append(_plane_from_blocks(samples, gh, gw)[: state.height, : state.width])

    if ncomp == 1:
        return planes[0].astype(np.uint8)
    return _ycbcr_to_rgb(planes[0], planes[1], planes[2])
