"""Luminance DC-coefficient extraction from decoded pixels.

The DC value of an 8x8 block is the level-shifted sample sum divided by
8: sum(Y - 128) / 8, rounded half-to-even.  It equals the (0, 0) DCT
term, lives in [-1024, 1016], is invariant under every dihedral transform
of the block, and maps to -DC - 8 under the negative-positive transform.
Half-even is the one detail that keeps the last relation exact: the
rounding must be odd around zero and commute with integer shifts, which
rules out truncation and floor.
"""

from __future__ import annotations

import numpy as np

from ..blocks import BLOCK, check_pixel_image

DC_MIN = -1024
DC_MAX = 1016


def rgb_to_luma(img: np.ndarray) -> np.ndarray:
    """Full-range BT.601 luminance, rounded half-up to ints in [0, 255]."""
    arr = check_pixel_image(img)
    if arr.ndim == 2:
        return arr.astype(np.int64)
    if arr.shape[2] == 1:
        return arr[:, :, 0].astype(np.int64)
    y = 0.299 * arr[:, :, 0] + 0.587 * arr[:, :, 1] + 0.114 * arr[:, :, 2]
    return np.clip(np.floor(y + 0.5), 0, 255).astype(np.int64)


def extract_dc_luma(img: np.ndarray) -> np.ndarray:
    """Per-block luminance DC values in raster order, one per 8x8 block."""
    arr = check_pixel_image(img, multiple_of_8=True)
    luma = rgb_to_luma(arr)
    h, w = luma.shape
    gh, gw = h // BLOCK, w // BLOCK
    sums = luma.reshape(gh, BLOCK, gw, BLOCK).sum(axis=(1, 3)) - 128 * BLOCK * BLOCK
    # sums are at most 8192 in magnitude, so sums/8.0 is exact in float64
    return np.rint(sums.reshape(-1) / 8.0).astype(np.int64)
