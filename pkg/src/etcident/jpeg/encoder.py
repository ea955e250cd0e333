"""Baseline sequential JPEG encoder (4:4:4, standard Huffman tables)."""

from __future__ import annotations

import struct

import numpy as np

from ..blocks import BLOCK, check_pixel_image
from . import tables
from ._entropy import encode_scan

_DCT = None


def _dct_matrix() -> np.ndarray:
    global _DCT
    if _DCT is None:
        u, x = np.meshgrid(np.arange(8), np.arange(8), indexing="ij")
        m = 0.5 * np.cos((2 * x + 1) * u * np.pi / 16)
        m[0, :] /= np.sqrt(2.0)
        _DCT = m
    return _DCT


def rgb_to_ycbcr(rgb: np.ndarray) -> np.ndarray:
    """Full-range BT.601 RGB -> YCbCr, float64, Cb/Cr offset by +128."""
    r = rgb[:, :, 0].astype(np.float64)
    g = rgb[:, :, 1].astype(np.float64)
    b = rgb[:, :, 2].astype(np.float64)
    y = 0.299 * r + 0.587 * g + 0.114 * b
    cb = -0.168735892 * r - 0.331264108 * g + 0.5 * b + 128.0
    cr = 0.5 * r - 0.418687589 * g - 0.081312411 * b + 128.0
    return np.stack([y, cb, cr], axis=0)


def _plane_blocks(plane: np.ndarray) -> np.ndarray:
    """Split an edge-padded plane into raster-ordered (B, 8, 8) blocks."""
    h, w = plane.shape
    ph = (BLOCK - h % BLOCK) % BLOCK
    pw = (BLOCK - w % BLOCK) % BLOCK
    if ph or pw:
        plane = np.pad(plane, ((0, ph), (0, pw)), mode="edge")
    gh, gw = plane.shape[0] // BLOCK, plane.shape[1] // BLOCK
    return plane.reshape(gh, BLOCK, gw, BLOCK).transpose(0, 2, 1, 3).reshape(-1, BLOCK, BLOCK)


def _quantized_zigzag(plane: np.ndarray, qtable: np.ndarray) -> np.ndarray:
    """Level shift, 8x8 DCT, quantize, zigzag: (B, 64) int32."""
    d = _dct_matrix()
    blocks = _plane_blocks(plane) - 128.0
    coefs = np.einsum("ij,bjk,lk->bil", d, blocks, d, optimize=True)
    quant = np.rint(coefs / qtable[np.newaxis]).astype(np.int32)
    zz = quant.reshape(-1, 64)[:, tables.ZIGZAG_TO_NATURAL]
    zz[:, 1:] = np.clip(zz[:, 1:], -1023, 1023)
    return np.ascontiguousarray(zz)


def _segment(marker: int, payload: bytes) -> bytes:
    return struct.pack(">BBH", 0xFF, marker, len(payload) + 2) + payload


def _dqt_segment(table_id: int, qtable: np.ndarray) -> bytes:
    zz = qtable.reshape(64)[tables.ZIGZAG_TO_NATURAL]
    return _segment(0xDB, bytes([table_id]) + bytes(int(v) for v in zz))


def _dht_segment(table_class: int, table_id: int, bits: list[int], values: list[int]) -> bytes:
    payload = bytes([(table_class << 4) | table_id]) + bytes(bits) + bytes(values)
    return _segment(0xC4, payload)


def _sof0_segment(height: int, width: int, ncomp: int) -> bytes:
    payload = struct.pack(">BHHB", 8, height, width, ncomp)
    for comp in range(ncomp):
        qtab = 0 if comp == 0 else 1
        payload += bytes([comp + 1, 0x11, qtab])
    return _segment(0xC0, payload)


def _sos_segment(ncomp: int) -> bytes:
    payload = bytes([ncomp])
    for comp in range(ncomp):
        tab = 0x00 if comp == 0 else 0x11
        payload += bytes([comp + 1, tab])
    payload += bytes([0, 63, 0])
    return _segment(0xDA, payload)


_APP0_JFIF = _segment(0xE0, b"JFIF\x00" + bytes([1, 1, 0]) + struct.pack(">HH", 1, 1) + bytes([0, 0]))


def encode_jpeg(img: np.ndarray, qf: int, restart_interval: int = 0) -> bytes:
    """Encode pixels as a baseline 4:4:4 JPEG at the given quality factor.

    Accepts (H, W, 3) RGB or (H, W[, 1]) grayscale uint8 arrays with both
    sides at least 8; sides not divisible by 8 are edge-padded internally
    and the true size is recorded in the frame header.
    """
    arr = check_pixel_image(img)
    q_luma = tables.scale_quant_table(tables.QUANT_LUMA_BASE, qf)
    q_chroma = tables.scale_quant_table(tables.QUANT_CHROMA_BASE, qf)

    if arr.ndim == 3 and arr.shape[2] == 3:
        planes = rgb_to_ycbcr(arr)
        per_comp = [
            _quantized_zigzag(planes[0], q_luma),
            _quantized_zigzag(planes[1], q_chroma),
            _quantized_zigzag(planes[2], q_chroma),
        ]
    else:
        plane = arr[:, :, 0] if arr.ndim == 3 else arr
        per_comp = [_quantized_zigzag(plane.astype(np.float64), q_luma)]
    ncomp = len(per_comp)
    height, width = arr.shape[:2]

    # MCU-interleave the per-component block rows (4:4:4: one block each).
    coeffs = np.stack(per_comp, axis=1).reshape(-1, 64)
    comp_of_block = np.tile(np.arange(ncomp, dtype=np.uint8), per_comp[0].shape[0])

    dc_len = np.zeros((4, 12), dtype=np.uint8)
    dc_code = np.zeros((4, 12), dtype=np.uint16)
    ac_len = np.zeros((4, 256), dtype=np.uint8)
    ac_code = np.zeros((4, 256), dtype=np.uint16)
    dc_len[0], dc_code[0] = tables.build_code_table(tables.DC_LUMA_BITS, tables.DC_LUMA_VALUES, 12)
    ac_len[0], ac_code[0] = tables.build_code_table(tables.AC_LUMA_BITS, tables.AC_LUMA_VALUES, 256)
    if ncomp == 3:
        dc_len[1], dc_code[1] = tables.build_code_table(
            tables.DC_CHROMA_BITS, tables.DC_CHROMA_VALUES, 12
        )
        ac_len[1], ac_code[1] = tables.build_code_table(
            tables.AC_CHROMA_BITS, tables.AC_CHROMA_VALUES, 256
        )

    dc_tbl = np.array([0, 1, 1][:ncomp], dtype=np.uint8)
    ac_tbl = np.array([0, 1, 1][:ncomp], dtype=np.uint8)
    out = np.empty(coeffs.shape[0] * 256 + 4096, dtype=np.uint8)
    n = encode_scan(
        coeffs,
        comp_of_block,
        dc_tbl,
        ac_tbl,
        dc_len,
        dc_code,
        ac_len,
        ac_code,
        ncomp,
        int(restart_interval),
        out,
    )

    parts = [b"\xff\xd8", _APP0_JFIF, _dqt_segment(0, q_luma)]
    if ncomp == 3:
        parts.append(_dqt_segment(1, q_chroma))
    parts.append(_sof0_segment(height, width, ncomp))
    parts.append(_dht_segment(0, 0, tables.DC_LUMA_BITS, tables.DC_LUMA_VALUES))
    parts.append(_dht_segment(1, 0, tables.AC_LUMA_BITS, tables.AC_LUMA_VALUES))
    if ncomp == 3:
        parts.append(_dht_segment(0, 1, tables.DC_CHROMA_BITS, tables.DC_CHROMA_VALUES))
        parts.append(_dht_segment(1, 1, tables.AC_CHROMA_BITS, tables.AC_CHROMA_VALUES))
    if restart_interval > 0:
        parts.append(_segment(0xDD, struct.pack(">H", restart_interval)))
    parts.append(_sos_segment(ncomp))
    parts.append(out[:n].tobytes())
    parts.append(b"\xff\xd9")
    return b"".join(parts)
