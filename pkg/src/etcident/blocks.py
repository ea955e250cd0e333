"""8x8 block grid handling and the per-block pixel transforms.

All cipher operations treat an image as a raster-ordered stack of 8x8
blocks with shape (M, 8, 8, C).  The dihedral transforms are the eight
symmetries of the square, indexed 0..7 as ``index = 4*flip + rot`` where
``rot`` counts 90-degree counter-clockwise rotations applied after an
optional left-right flip.
"""

from __future__ import annotations

import numpy as np

from .errors import ImageShapeError

BLOCK = 8


def check_pixel_image(img: np.ndarray, multiple_of_8: bool = False) -> np.ndarray:
    """Validate a pixel array: uint8, (H, W) or (H, W, C) with C in {1, 3}."""
    arr = np.asarray(img)
    if arr.dtype != np.uint8:
        raise ImageShapeError(f"expected uint8 samples, got dtype {arr.dtype}")
    if arr.ndim == 2:
        h, w = arr.shape
    elif arr.ndim == 3 and arr.shape[2] in (1, 3):
        h, w = arr.shape[:2]
    else:
        raise ImageShapeError(f"expected (H, W) or (H, W, 1|3) array, got shape {arr.shape}")
    if h < BLOCK or w < BLOCK:
        raise ImageShapeError(f"image must be at least 8x8 pixels, got {h}x{w}")
    if multiple_of_8 and (h % BLOCK or w % BLOCK):
        raise ImageShapeError(f"image dimensions must be multiples of 8, got {h}x{w}")
    return arr


def crop_to_multiple_of_8(img: np.ndarray) -> np.ndarray:
    """Crop bottom/right edges so both dimensions become multiples of 8."""
    arr = check_pixel_image(img)
    h, w = arr.shape[:2]
    return arr[: h - h % BLOCK, : w - w % BLOCK]


def to_blocks(img: np.ndarray) -> tuple[np.ndarray, int, int]:
    """Split (H, W[, C]) pixels into an (M, 8, 8, C) block stack.

    Returns (blocks, grid_h, grid_w); blocks are in raster order.
    """
    arr = check_pixel_image(img, multiple_of_8=True)
    if arr.ndim == 2:
        arr = arr[:, :, np.newaxis]
    h, w, c = arr.shape
    gh, gw = h // BLOCK, w // BLOCK
    blocks = (
        arr.reshape(gh, BLOCK, gw, BLOCK, c)
        .transpose(0, 2, 1, 3, 4)
        .reshape(gh * gw, BLOCK, BLOCK, c)
    )
    return blocks, gh, gw


def from_blocks(blocks: np.ndarray, grid_h: int, grid_w: int) -> np.ndarray:
    """Reassemble an (M, 8, 8, C) block stack into (H, W[, C]) pixels."""
    m, bh, bw, c = blocks.shape
    if m != grid_h * grid_w or (bh, bw) != (BLOCK, BLOCK):
        raise ImageShapeError(f"block stack {blocks.shape} does not match grid {grid_h}x{grid_w}")
    img = (
        blocks.reshape(grid_h, grid_w, BLOCK, BLOCK, c)
        .transpose(0, 2, 1, 3, 4)
        .reshape(grid_h * BLOCK, grid_w * BLOCK, c)
    )
    return img[:, :, 0] if c == 1 else img


def apply_dihedral(blocks: np.ndarray, index: int) -> np.ndarray:
    """Apply dihedral element ``index`` to every block of an (M, 8, 8, C) stack."""
    if not 0 <= index <= 7:
        raise ValueError(f"dihedral index must be in 0..7, got {index}")
    flip, rot = divmod(index, 4)
    out = blocks
    if flip:
        out = np.flip(out, axis=2)
    if rot:
        out = np.rot90(out, k=rot, axes=(1, 2))
    return out


def _dihedral_inverse_table() -> np.ndarray:
    probe = np.arange(64, dtype=np.uint8).reshape(1, BLOCK, BLOCK, 1)
    inv = np.zeros(8, dtype=np.int64)
    for d in range(8):
        moved = apply_dihedral(probe, d)
        for e in range(8):
            if np.array_equal(apply_dihedral(moved, e), probe):
                inv[d] = e
                break
    return inv


DIHEDRAL_INVERSE = _dihedral_inverse_table()


def apply_block_geometry(blocks: np.ndarray, dihedral: np.ndarray, negpos: np.ndarray) -> np.ndarray:
    """Per-block dihedral transform followed by the negative-positive map.

    ``dihedral`` holds indices 0..7 and ``negpos`` bits 0/1, one per block.
    The same transform hits every channel of a block.
    """
    out = blocks.copy()
    for d in range(8):
        sel = dihedral == d
        if sel.any():
            out[sel] = apply_dihedral(blocks[sel], d)
    flipped = negpos.astype(bool)
    out[flipped] = 255 - out[flipped]
    return out


def undo_block_geometry(blocks: np.ndarray, dihedral: np.ndarray, negpos: np.ndarray) -> np.ndarray:
    """Exact inverse of :func:`apply_block_geometry` for the same draws."""
    out = blocks.copy()
    flipped = negpos.astype(bool)
    out[flipped] = 255 - out[flipped]
    undone = out.copy()
    for d in range(8):
        sel = dihedral == d
        if sel.any():
            undone[sel] = apply_dihedral(out[sel], int(DIHEDRAL_INVERSE[d]))
    return undone
