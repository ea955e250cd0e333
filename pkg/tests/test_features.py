import numpy as np
import pytest

from etcident.cipher import default_n_fixed, encrypt
from etcident.errors import FeatureFormatError
from etcident.features import (
    FeatureVector,
    MatchVerdict,
    SignVector,
    accept_matrix,
    compare,
    compare_signs,
    extract_feature,
    extract_sign_feature,
    feature_from_bytes,
    feature_to_bytes,
    feature_to_text,
    identify,
    read_feature_file,
    read_sign_file,
    signs_from_bytes,
    signs_to_bytes,
    write_feature_file,
    write_sign_file,
)
from etcident.jpeg import decode_jpeg, encode_jpeg, extract_dc_luma
from etcident.keys import derive_keys


def blocky_image(seed, shape=(48, 64, 3)):
    rng = np.random.default_rng(seed)
    coarse = rng.integers(0, 256, size=(shape[0] // 8, shape[1] // 8, shape[2]), dtype=np.uint8)
    return np.repeat(np.repeat(coarse, 8, axis=0), 8, axis=1)


def test_feature_equals_abs_dc_of_decode():
    img = blocky_image(1)
    data = encode_jpeg(img, 85)
    feat = extract_feature(data, 12, image_id="x")
    expected = np.abs(extract_dc_luma(decode_jpeg(data)))[:12]
    np.testing.assert_array_equal(feat.values, expected)
    assert feat.image_id == "x"
    assert len(feat) == 12


def test_uniform_midgray_first_block_is_zero():
    img = np.full((16, 16, 3), 128, dtype=np.uint8)
    feat = extract_feature(encode_jpeg(img, 85), 4)
    assert feat.values[0] == 0


def test_uniform_black_first_block_near_max():
    """|DC| of an all-zero block survives the codec within the error budget."""
    img = np.zeros((16, 16, 3), dtype=np.uint8)
    feat = extract_feature(encode_jpeg(img, 95), 4)
    assert abs(int(feat.values[0]) - 1024) <= 24


def test_feature_length_validated():
    data = encode_jpeg(blocky_image(2), 85)
    with pytest.raises(ValueError):
        extract_feature(data, 0)
    with pytest.raises(ValueError):
        extract_feature(data, 6 * 8 + 1)


def test_feature_stable_under_rekeying():
    """Same k0: features of k- and k'-encryptions agree within 8 + codec error."""
    img = blocky_image(3, shape=(64, 80, 3))
    m = (64 // 8) * (80 // 8)
    n = default_n_fixed(m)
    enc_a = encode_jpeg(encrypt(img, derive_keys(9, 1), n), 85)
    enc_b = encode_jpeg(encrypt(img, derive_keys(9, 2), n), 85)
    fa = extract_feature(enc_a, n).values
    fb = extract_feature(enc_b, n).values
    assert np.abs(fa - fb).max() <= 8 + 2 * 12


def test_compare_identical_accepts():
    v = FeatureVector("a", np.array([5, 10, 1000]))
    assert compare(v, v, d=0)


def test_compare_boundary_is_inclusive():
    a = np.array([100, 200, 300])
    assert compare(a, a + 7, d=7)
    assert not compare(a, a + 8, d=7)


def test_compare_early_exit():
    """A violation at index 0 stops the scan after one element."""

    class CountingSeq:
        def __init__(self, values):
            self.values = values
            self.touched = []

        def __len__(self):
            return len(self.values)

        def __getitem__(self, i):
            self.touched.append(i)
            return self.values[i]

    q = CountingSeq([0, 1, 2, 3])
    c = CountingSeq([500, 1, 2, 3])
    assert not compare(q, c, d=100, n=4)
    assert q.touched == [0]
    assert c.touched == [0]

    q2 = CountingSeq([0, 1, 2, 3])
    assert compare(q2, CountingSeq([50, 51, 52, 53]), d=100, n=4)
    assert q2.touched == [0, 1, 2, 3]


def test_compare_validates_inputs():
    with pytest.raises(ValueError):
        compare([1, 2], [1, 2, 3], d=5)
    with pytest.raises(ValueError):
        compare([1, 2], [1, 2], d=-1)
    with pytest.raises(ValueError):
        compare([1, 2], [1, 2], d=5, n=3)


def test_compare_symmetric_and_monotone(rng):
    for _ in range(50):
        a = rng.integers(0, 1025, size=16)
        b = rng.integers(0, 1025, size=16)
        d = int(rng.integers(0, 1025))
        assert compare(a, b, d) == compare(b, a, d)
        if compare(a, b, d):
            assert compare(a, b, d + int(rng.integers(0, 200)))


def test_identify_finds_self():
    q = FeatureVector("q", np.array([1, 2, 3]))
    db = [FeatureVector("other", np.array([900, 2, 3])), q]
    verdict = identify(q, db, d=10)
    assert verdict.first_match == "q"
    assert verdict.matched_ids == ("q",)
    assert verdict.decisions == (False, True)


def test_identify_empty_db_is_no_match():
    q = FeatureVector("q", np.array([1, 2, 3]))
    verdict = identify(q, [], d=10)
    assert verdict.first_match is None
    assert verdict.matched_ids == ()


def test_identify_records_all_acceptors():
    q = FeatureVector("q", np.array([10, 10]))
    db = [FeatureVector(f"c{i}", np.array([10 + i, 10])) for i in range(5)]
    verdict = identify(q, db, d=2)
    assert verdict.matched_ids == ("c0", "c1", "c2")
    assert verdict.first_match == "c0"


def test_accept_matrix_equals_sequential_compare(rng):
    queries = rng.integers(0, 1025, size=(6, 20))
    cands = rng.integers(0, 1025, size=(9, 20))
    d = 150
    mat = accept_matrix(queries, cands, d=d, n=20)
    for i in range(6):
        for j in range(9):
            assert mat[i, j] == compare(queries[i], cands[j], d=d)


def test_sign_feature_of_midgray_is_zero():
    img = np.full((16, 16, 3), 128, dtype=np.uint8)
    sv = extract_sign_feature(encode_jpeg(img, 85), 4)
    assert isinstance(sv, SignVector)
    np.testing.assert_array_equal(sv.bits, 0)


def test_sign_feature_recompression_stable():
    img = blocky_image(6, shape=(64, 80, 3))
    enc = encrypt(img, derive_keys(4, 5))
    first = encode_jpeg(enc, 85)
    second = encode_jpeg(decode_jpeg(first), 75)
    a = extract_sign_feature(first, 40).bits
    b = extract_sign_feature(second, 40).bits
    assert np.count_nonzero(a != b) <= 2
    assert compare_signs(a, a)


def test_feature_file_roundtrip(tmp_path):
    values = np.array([0, 1, 512, 1024, 7], dtype=np.int64)
    path = tmp_path / "f.etcf"
    write_feature_file(path, values)
    np.testing.assert_array_equal(read_feature_file(path), values)


def test_feature_bytes_layout():
    data = feature_to_bytes(np.array([1, 258]))
    assert data[:4] == b"ETCF"
    assert data[4] == 1
    assert data[5:9] == (2).to_bytes(4, "little")
    assert data[9:] == b"\x01\x00\x02\x01"


def test_feature_bytes_rejects_bad_input():
    with pytest.raises(FeatureFormatError):
        feature_to_bytes(np.array([-1]))
    with pytest.raises(FeatureFormatError):
        feature_to_bytes(np.array([1025]))
    with pytest.raises(FeatureFormatError):
        feature_from_bytes(b"NOPE" + bytes(16))
    good = feature_to_bytes(np.array([1, 2, 3]))
    with pytest.raises(FeatureFormatError):
        feature_from_bytes(good[:-1])
    with pytest.raises(FeatureFormatError):
        feature_from_bytes(b"ETCF" + bytes([9]) + good[5:])


def test_feature_text_export():
    assert feature_to_text(np.array([3, 0, 1024])) == "3\n0\n1024\n"


def test_sign_file_roundtrip(tmp_path):
    bits = np.array([1, 0, 1, 1, 0, 0, 0, 1, 1], dtype=np.uint8)
    path = tmp_path / "f.etcs"
    write_sign_file(path, bits)
    np.testing.assert_array_equal(read_sign_file(path), bits)
    raw = signs_to_bytes(bits)
    assert raw[:4] == b"ETCS"
    assert len(raw) == 9 + 2
    with pytest.raises(FeatureFormatError):
        signs_from_bytes(raw[:-1])


def test_verdict_is_plain_data():
    v = MatchVerdict(query_id="q", matched_ids=("a",), decisions=(True, False))
    assert v.first_match == "a"
