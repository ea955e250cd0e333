"""Two-layer block-scrambling encryption in the spatial domain.

Encryption pipeline for an image whose sides are multiples of 8:

1. split into raster-ordered 8x8 blocks (M of them),
2. permute all M blocks with a K0-keyed Fisher-Yates shuffle (layer 1),
3. permute only the last M-N blocks with a K1-keyed shuffle (layer 2),
4. per block, draw a dihedral element from K2 and a negative-positive
   bit from K3 and apply both, identically on every channel.

Because layer 2 never touches the first N positions, those positions
hold the same source blocks for any two ciphertexts that share k0 and N,
regardless of k.  Decryption replays the same key streams and inverts
each step exactly; the whole pipeline is lossless.
"""

from __future__ import annotations

import numpy as np

from .blocks import apply_block_geometry, from_blocks, to_blocks, undo_block_geometry
from .keys import KeySet, Xoshiro256StarStar


def default_n_fixed(m: int) -> int:
    """Default stable-prefix length: 10% of the block count, at least 1."""
    return max(1, m // 10)


def _fisher_yates_order(m: int, stream: Xoshiro256StarStar) -> np.ndarray:
    """Keyed shuffle of range(m): swaps run from the last index down to 1."""
    order = np.arange(m, dtype=np.int64)
    for i in range(m - 1, 0, -1):
        j = stream.randbelow(i + 1)
        order[i], order[j] = order[j], order[i]
    return order


def layer1_order(keys: KeySet, m: int) -> np.ndarray:
    """Block source index per output position for the K0 full shuffle."""
    return _fisher_yates_order(m, keys.stream("K0"))


def layer2_order(keys: KeySet, m: int, n_fixed: int) -> np.ndarray:
    """Block source index per output position for the K1 tail shuffle."""
    if not 1 <= n_fixed <= m:
        raise ValueError(f"n_fixed must be in 1..{m}, got {n_fixed}")
    order = np.arange(m, dtype=np.int64)
    order[n_fixed:] = n_fixed + _fisher_yates_order(m - n_fixed, keys.stream("K1"))
    return order


def block_transform_draws(keys: KeySet, m: int) -> tuple[np.ndarray, np.ndarray]:
    """Per-block dihedral indices (K2) and negative-positive bits (K3)."""
    s2 = keys.stream("K2")
    s3 = keys.stream("K3")
    dihedral = np.fromiter((s2.randbelow(8) for _ in range(m)), dtype=np.int64, count=m)
    negpos = np.fromiter((s3.randbit() for _ in range(m)), dtype=np.int64, count=m)
    return dihedral, negpos


def permute_layer1(img: np.ndarray, keys: KeySet) -> np.ndarray:
    """Shuffle all M blocks of the image with the K0 stream."""
    blocks, gh, gw = to_blocks(img)
    order = layer1_order(keys, len(blocks))
    return from_blocks(blocks[order], gh, gw).reshape(img.shape)


def permute_layer2(img: np.ndarray, keys: KeySet, n_fixed: int) -> np.ndarray:
    """Shuffle the last M-N blocks with the K1 stream; first N stay put."""
    blocks, gh, gw = to_blocks(img)
    order = layer2_order(keys, len(blocks), n_fixed)
    return from_blocks(blocks[order], gh, gw).reshape(img.shape)


def apply_block_transforms(img: np.ndarray, keys: KeySet) -> np.ndarray:
    """Apply the K2 dihedral and K3 negative-positive draws to each block."""
    blocks, gh, gw = to_blocks(img)
    dihedral, negpos = block_transform_draws(keys, len(blocks))
    return from_blocks(apply_block_geometry(blocks, dihedral, negpos), gh, gw).reshape(img.shape)


def combined_order(keys: KeySet, m: int, n_fixed: int) -> np.ndarray:
    """Source block index per ciphertext position for both layers together."""
    o1 = layer1_order(keys, m)
    o2 = layer2_order(keys, m, n_fixed)
    return o1[o2]


def encrypt(img: np.ndarray, keys: KeySet, n_fixed: int | None = None) -> np.ndarray:
    """Encrypt an image (sides multiples of 8) into its block-scrambled form."""
    blocks, gh, gw = to_blocks(img)
    m = len(blocks)
    n = default_n_fixed(m) if n_fixed is None else n_fixed
    order = combined_order(keys, m, n)
    dihedral, negpos = block_transform_draws(keys, m)
    return from_blocks(apply_block_geometry(blocks[order], dihedral, negpos), gh, gw).reshape(img.shape)


def decrypt(img: np.ndarray, keys: KeySet, n_fixed: int | None = None) -> np.ndarray:
    """Exact spatial-domain inverse of :func:`encrypt` for the same keys."""
    blocks, gh, gw = to_blocks(img)
    m = len(blocks)
    n = default_n_fixed(m) if n_fixed is None else n_fixed
    dihedral, negpos = block_transform_draws(keys, m)
    plain = undo_block_geometry(blocks, dihedral, negpos)
    order = combined_order(keys, m, n)
    unshuffled = np.empty_like(plain)
    unshuffled[order] = plain
    return from_blocks(unshuffled, gh, gw).reshape(img.shape)


def re_encrypt(
    img: np.ndarray, keys_old: KeySet, keys_new: KeySet, n_fixed: int | None = None
) -> np.ndarray:
    """Swap the changeable key layer: decrypt with the old keys, encrypt with the new.

    Both key sets must share k0 so the stable first-N block positions keep
    their source blocks across the re-encryption.
    """
    if keys_old.k0 != keys_new.k0:
        raise ValueError("re_encrypt requires both key sets to share the same k0 seed")
    return encrypt(decrypt(img, keys_old, n_fixed), keys_new, n_fixed)
