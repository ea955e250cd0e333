import numpy as np
import pytest

from etcident.blocks import to_blocks
from etcident.cipher import (
    apply_block_transforms,
    combined_order,
    decrypt,
    default_n_fixed,
    encrypt,
    layer1_order,
    layer2_order,
    permute_layer1,
    permute_layer2,
    re_encrypt,
)
from etcident.keys import derive_keys


def oracle_fisher_yates(m, draws):
    """Independently coded descending Fisher-Yates trace over pre-drawn values."""
    items = list(range(m))
    for step, i in enumerate(range(m - 1, 0, -1)):
        j = draws[step] % (i + 1)
        items[i], items[j] = items[j], items[i]
    return items


def test_layer1_matches_shuffle_trace():
    keys = derive_keys(k0=12345, k=0)
    stream = keys.stream("K0")
    draws = [stream.next_u64() for _ in range(15)]
    expected = oracle_fisher_yates(16, draws)
    np.testing.assert_array_equal(layer1_order(keys, 16), expected)


def test_layer1_is_bijection():
    keys = derive_keys(3, 4)
    order = layer1_order(keys, 300)
    assert sorted(order.tolist()) == list(range(300))


def test_single_block_image_unchanged():
    keys = derive_keys(9, 9)
    img = np.arange(64, dtype=np.uint8).reshape(8, 8)
    np.testing.assert_array_equal(permute_layer1(img, keys), img)
    np.testing.assert_array_equal(permute_layer2(img, keys, 1), img)


def test_layer2_keeps_first_n():
    keys = derive_keys(1, 77)
    order = layer2_order(keys, 16, 4)
    np.testing.assert_array_equal(order[:4], [0, 1, 2, 3])
    assert sorted(order.tolist()) == list(range(16))
    assert sorted(order[4:].tolist()) == list(range(4, 16))


def test_layer2_full_n_is_identity():
    keys = derive_keys(1, 77)
    np.testing.assert_array_equal(layer2_order(keys, 16, 16), np.arange(16))


def test_layer2_rejects_bad_n():
    keys = derive_keys(1, 1)
    with pytest.raises(ValueError):
        layer2_order(keys, 16, 17)
    with pytest.raises(ValueError):
        layer2_order(keys, 16, 0)


def test_layer2_first_blocks_stable_across_k(rgb_image):
    n = 3
    a = permute_layer2(permute_layer1(rgb_image, derive_keys(5, 100)), derive_keys(5, 100), n)
    b = permute_layer2(permute_layer1(rgb_image, derive_keys(5, 200)), derive_keys(5, 200), n)
    blocks_a, _, _ = to_blocks(a)
    blocks_b, _, _ = to_blocks(b)
    np.testing.assert_array_equal(blocks_a[:n], blocks_b[:n])


def test_apply_and_invert_transforms(rgb_image):
    keys = derive_keys(11, 22)
    out = apply_block_transforms(rgb_image, keys)
    assert out.shape == rgb_image.shape
    assert not np.array_equal(out, rgb_image)


def test_encrypt_decrypt_roundtrip(rgb_image, gray_image):
    keys = derive_keys(0xABCDEF, 0x123456)
    for img in (rgb_image, gray_image):
        enc = encrypt(img, keys)
        assert enc.shape == img.shape
        assert not np.array_equal(enc, img)
        np.testing.assert_array_equal(decrypt(enc, keys), img)


def test_roundtrip_many_seeds(rng):
    for trial in range(25):
        h = 8 * int(rng.integers(1, 7))
        w = 8 * int(rng.integers(1, 7))
        c = int(rng.choice([1, 3]))
        img = rng.integers(0, 256, size=(h, w, c), dtype=np.uint8)
        keys = derive_keys(int(rng.integers(0, 2**64, dtype=np.uint64)),
                           int(rng.integers(0, 2**64, dtype=np.uint64)))
        n = int(rng.integers(1, h * w // 64 + 1))
        np.testing.assert_array_equal(decrypt(encrypt(img, keys, n), keys, n), img)


def test_default_n_fixed():
    assert default_n_fixed(4800) == 480
    assert default_n_fixed(5) == 1


def test_encrypt_resembles_block_noise(rgb_image):
    """Scrambled output should differ from the source in nearly every block."""
    keys = derive_keys(31337, 4242)
    enc = encrypt(rgb_image, keys)
    src, _, _ = to_blocks(rgb_image)
    out, _, _ = to_blocks(enc)
    differing = sum(
        0 if np.array_equal(a, b) else 1 for a, b in zip(src, out)
    )
    assert differing >= int(0.9 * len(src))


def test_decrypt_wrong_k_scrambles(rng):
    """Wrong changeable key leaves almost every block wrong."""
    wrong = 0
    total = 0
    for trial in range(10):
        img = rng.integers(0, 256, size=(48, 64, 3), dtype=np.uint8)
        keys = derive_keys(100 + trial, 500 + trial)
        bad = derive_keys(100 + trial, 9000 + trial)
        dec = decrypt(encrypt(img, keys), bad)
        a, _, _ = to_blocks(img)
        b, _, _ = to_blocks(dec)
        wrong += sum(0 if np.array_equal(x, y) else 1 for x, y in zip(a, b))
        total += len(a)
    assert wrong >= 0.99 * total


def test_decrypt_wrong_k0_scrambles(rng):
    img = rng.integers(0, 256, size=(48, 64, 3), dtype=np.uint8)
    keys = derive_keys(1, 2)
    bad = derive_keys(3, 2)
    dec = decrypt(encrypt(img, keys), bad)
    assert not np.array_equal(dec, img)


def test_combined_order_is_bijection():
    keys = derive_keys(8, 8)
    order = combined_order(keys, 48, 5)
    assert sorted(order.tolist()) == list(range(48))


def test_layer_separation_shares_source_blocks(rng):
    """Same k0: ciphertext positions below N hold the same source block."""
    img = rng.integers(0, 256, size=(40, 56, 3), dtype=np.uint8)
    m = (40 // 8) * (56 // 8)
    n = default_n_fixed(m)
    k_a = derive_keys(777, 1)
    k_b = derive_keys(777, 2)
    order_a = combined_order(k_a, m, n)
    order_b = combined_order(k_b, m, n)
    np.testing.assert_array_equal(order_a[:n], order_b[:n])
    assert not np.array_equal(order_a, order_b)


def test_re_encrypt_same_keys_is_identity(rgb_image):
    keys = derive_keys(5, 6)
    enc = encrypt(rgb_image, keys)
    np.testing.assert_array_equal(re_encrypt(enc, keys, keys), enc)


def test_re_encrypt_requires_shared_k0(rgb_image):
    enc = encrypt(rgb_image, derive_keys(5, 6))
    with pytest.raises(ValueError):
        re_encrypt(enc, derive_keys(5, 6), derive_keys(7, 8))


def test_re_encrypt_equals_decrypt_then_encrypt(rgb_image):
    old = derive_keys(5, 6)
    new = derive_keys(5, 60)
    enc = encrypt(rgb_image, old)
    np.testing.assert_array_equal(
        re_encrypt(enc, old, new), encrypt(decrypt(enc, old), new)
    )
    np.testing.assert_array_equal(decrypt(re_encrypt(enc, old, new), new), rgb_image)
