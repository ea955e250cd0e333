"""Huffman entropy coding kernels (numba-compiled hot loops).

Both kernels work on zigzag-ordered coefficient rows, one row per 8x8
block in scan (MCU-interleaved) order.  Byte stuffing and restart-marker
handling live here; everything else stays in numpy.

Status codes returned by the decoder kernel:
0 ok, 1 invalid Huffman code, 2 ran out of data, 3 restart marker
missing or malformed, 4 coefficient run overflows the block.
"""

import numpy as np
from numba import njit


@njit(cache=True)
def _emit_bits(out, pos, bitbuf, bitcnt, value, nbits):
    bitbuf = (bitbuf << nbits) | (value & ((1 << nbits) - 1))
    bitcnt += nbits
    while bitcnt >= 8:
        bitcnt -= 8
        byte = (bitbuf >> bitcnt) & 0xFF
        out[pos] = byte
        pos += 1
        if byte == 0xFF:
            out[pos] = 0x00
            pos += 1
        bitbuf &= (1 << bitcnt) - 1
    return pos, bitbuf, bitcnt


@njit(cache=True)
def _flush_bits(out, pos, bitbuf, bitcnt):
    if bitcnt > 0:
        pad = 8 - bitcnt
        pos, bitbuf, bitcnt = _emit_bits(out, pos, bitbuf, bitcnt, (1 << pad) - 1, pad)
    return pos, bitbuf, bitcnt


@njit(cache=True)
def _magnitude(v):
    if v == 0:
        return 0, 0
    a = v if v > 0 else -v
    size = 0
    while a:
        a >>= 1
        size += 1
    if v < 0:
        return size, v + (1 << size) - 1
    return size, v


@njit(cache=True)
def encode_scan(
    coeffs,          # (B, 64) int32, zigzag order, scan order
    comp_of_block,   # (B,) uint8
    dc_tbl,          # (ncomp,) uint8: DC table id per component
    ac_tbl,          # (ncomp,) uint8
    dc_len, dc_code,  # (4, 12) uint8 / uint16
    ac_len, ac_code,  # (4, 256) uint8 / uint16
    blocks_per_mcu,
    restart_interval,
    out,             # preallocated uint8 buffer
):
    pos = 0
    bitbuf = 0
    bitcnt = 0
    last_dc = np.zeros(4, dtype=np.int32)
    rst = 0
    n_blocks = coeffs.shape[0]
    n_mcus = n_blocks // blocks_per_mcu
    bi = 0
    for mcu in range(n_mcus):
        if restart_interval > 0 and mcu > 0 and mcu % restart_interval == 0:
            pos, bitbuf, bitcnt = _flush_bits(out, pos, bitbuf, bitcnt)
            out[pos] = 0xFF
            out[pos + 1] = 0xD0 + (rst & 7)
            pos += 2
            rst += 1
            for c in range(4):
                last_dc[c] = 0
        for _ in range(blocks_per_mcu):
            c = comp_of_block[bi]
            dt = dc_tbl[c]
            at = ac_tbl[c]
            dc = coeffs[bi, 0]
            diff = dc - last_dc[c]
            last_dc[c] = dc
            size, bits = _magnitude(diff)
            pos, bitbuf, bitcnt = _emit_bits(
                out, pos, bitbuf, bitcnt, dc_code[dt, size], dc_len[dt, size]
            )
            if size > 0:
                pos, bitbuf, bitcnt = _emit_bits(out, pos, bitbuf, bitcnt, bits, size)
            run = 0
            for k in range(1, 64):
                v = coeffs[bi, k]
                if v == 0:
                    run += 1
                    continue
                while run > 15:
                    pos, bitbuf, bitcnt = _emit_bits(
                        out, pos, bitbuf, bitcnt, ac_code[at, 0xF0], ac_len[at, 0xF0]
                    )
                    run -= 16
                size, bits = _magnitude(v)
                sym = (run << 4) | size
                pos, bitbuf, bitcnt = _emit_bits(
                    out, pos, bitbuf, bitcnt, ac_code[at, sym], ac_len[at, sym]
                )
                pos, bitbuf, bitcnt = _emit_bits(out, pos, bitbuf, bitcnt, bits, size)
                run = 0
            if run > 0:
                pos, bitbuf, bitcnt = _emit_bits(
                    out, pos, bitbuf, bitcnt, ac_code[at, 0], ac_len[at, 0]
                )
            bi += 1
    pos, bitbuf, bitcnt = _flush_bits(out, pos, bitbuf, bitcnt)
    return pos


@njit(cache=True)
def _read_bit(data, pos, bitbuf, bitcnt):
    # returns (bit, pos, bitbuf, bitcnt, ok)
    if bitcnt == 0:
        if pos >= data.shape[0]:
            return 0, pos, bitbuf, bitcnt, False
        byte = data[pos]
        pos += 1
        if byte == 0xFF:
            if pos < data.shape[0] and data[pos] == 0x00:
                pos += 1
            else:
                # a real marker terminates the entropy segment
                return 0, pos - 1, bitbuf, bitcnt, False
        bitbuf = byte
        bitcnt = 8
    bitcnt -= 1
    return (bitbuf >> bitcnt) & 1, pos, bitbuf, bitcnt, True


@njit(cache=True)
def decode_scan(
    data,            # uint8 entropy bytes (stuffed, may contain RST markers)
    comp_of_block,   # (B,) uint8
    dc_tbl, ac_tbl,  # (ncomp,) uint8 table ids
    dc_maxcode, dc_valoff, dc_values,  # (4, 18) int64 x2, (4, 256) int16
    ac_maxcode, ac_valoff, ac_values,
    blocks_per_mcu,
    restart_interval,
    coeffs,          # (B, 64) int32 output, zigzag order
):
    pos = 0
    bitbuf = 0
    bitcnt = 0
    last_dc = np.zeros(4, dtype=np.int32)
    n_blocks = coeffs.shape[0]
    n_mcus = n_blocks // blocks_per_mcu
    bi = 0
    for mcu in range(n_mcus):
        if restart_interval > 0 and mcu > 0 and mcu % restart_interval == 0:
            bitbuf = 0
            bitcnt = 0
            if pos + 1 >= data.shape[0]:
                return 2, bi
            if data[pos] != 0xFF or data[pos + 1] < 0xD0 or data[pos + 1] > 0xD7:
                return 3, bi
            pos += 2
            for c in range(4):
                last_dc[c] = 0
        for _ in range(blocks_per_mcu):
            c = comp_of_block[bi]
            dt = dc_tbl[c]
            at = ac_tbl[c]

            # DC size symbol, then the difference bits
            bit, pos, bitbuf, bitcnt, ok = _read_bit(data, pos, bitbuf, bitcnt)
            if not ok:
                return 2, bi
            code = bit
            length = 1
            while code > dc_maxcode[dt, length]:
                length += 1
                if length > 16:
                    return 1, bi
                bit, pos, bitbuf, bitcnt, ok = _read_bit(data, pos, bitbuf, bitcnt)
                if not ok:
                    return 2, bi
                code = (code << 1) | bit
            size = dc_values[dt, dc_valoff[dt, length] + code]
            diff = 0
            if size > 0:
                for _b in range(size):
                    bit, pos, bitbuf, bitcnt, ok = _read_bit(data, pos, bitbuf, bitcnt)
                    if not ok:
                        return 2, bi
                    diff = (diff << 1) | bit
                if diff < (1 << (size - 1)):
                    diff -= (1 << size) - 1
            last_dc[c] += diff
            coeffs[bi, 0] = last_dc[c]

            # AC run-length symbols
            k = 1
            while k < 64:
                bit, pos, bitbuf, bitcnt, ok = _read_bit(data, pos, bitbuf, bitcnt)
                if not ok:
                    return 2, bi
                code = bit
                length = 1
                while code > ac_maxcode[at, length]:
                    length += 1
                    if length > 16:
                        return 1, bi
                    bit, pos, bitbuf, bitcnt, ok = _read_bit(data, pos, bitbuf, bitcnt)
                    if not ok:
                        return 2, bi
                    code = (code << 1) | bit
                sym = ac_values[at, ac_valoff[at, length] + code]
                run = sym >> 4
                size = sym & 0x0F
                if size == 0:
                    if run == 15:
                        k += 16  # ZRL
                        continue
                    break  # EOB
                k += run
                if k > 63:
                    return 4, bi
                value = 0
                for _b in range(size):
                    bit, pos, bitbuf, bitcnt, ok = _read_bit(data, pos, bitbuf, bitcnt)
                    if not ok:
                        return 2, bi
                    value = (value << 1) | bit
                if value < (1 << (size - 1)):
                    value -= (1 << size) - 1
                coeffs[bi, k] = value
                k += 1
            bi += 1
    return 0, bi
