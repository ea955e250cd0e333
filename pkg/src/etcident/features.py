"""Feature vectors from encrypted JPEGs and threshold identification.

A feature vector is the absolute value of the first N luminance DC
coefficients of the decoded image.  Recompression moves each DC by at
most a few quantizer steps and re-encryption under a shared k0 moves it
by at most 8 (the negative-positive offset), so a per-element absolute
threshold d separates same-source pairs from unrelated ones without any
correction terms.

The binary feature file format (ETCF) is fixed byte-for-byte: magic
``ETCF``, version byte 1, unsigned 32-bit little-endian N, then N
unsigned 16-bit little-endian values.  Sign-bit vectors for the
simplified sign baseline use the sibling ETCS format: magic ``ETCS``,
version byte 1, u32-LE N, then the bits packed MSB-first into
ceil(N/8) bytes.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import FeatureFormatError
from .jpeg import decode_jpeg, extract_dc_luma

FEATURE_MAGIC = b"ETCF"
SIGN_MAGIC = b"ETCS"
FORMAT_VERSION = 1
MAX_FEATURE_VALUE = 1024

DEFAULT_THRESHOLD = 150


@dataclass(frozen=True)
class FeatureVector:
    """Absolute-DC feature values plus the identifier they belong to."""

    image_id: str
    values: np.ndarray

    def __len__(self) -> int:
        return len(self.values)


@dataclass(frozen=True)
class SignVector:
    """DC sign bits (negative -> 1) for the simplified sign baseline."""

    image_id: str
    bits: np.ndarray

    def __len__(self) -> int:
        return len(self.bits)


@dataclass(frozen=True)
class MatchVerdict:
    """Outcome of scanning a database with one query."""

    query_id: str
    matched_ids: tuple[str, ...]
    decisions: tuple[bool, ...]

    @property
    def first_match(self) -> str | None:
        """The halting-scan view: the first accepting candidate, if any."""
        return self.matched_ids[0] if self.matched_ids else None


def _dc_prefix(jpeg: bytes, n: int) -> np.ndarray:
    dc = extract_dc_luma(decode_jpeg(jpeg))
    if not 1 <= n <= len(dc):
        raise ValueError(f"feature length {n} out of range 1..{len(dc)}")
    return dc[:n]


def extract_feature(jpeg: bytes, n: int, image_id: str = "") -> FeatureVector:
    """First-N |DC| values of an encrypted JPEG, in block raster order."""
    return FeatureVector(image_id=image_id, values=np.abs(_dc_prefix(jpeg, n)))


def extract_sign_feature(jpeg: bytes, n: int, image_id: str = "") -> SignVector:
    """First-N DC sign bits (1 where the DC is negative)."""
    return SignVector(image_id=image_id, bits=(_dc_prefix(jpeg, n) < 0).astype(np.uint8))


def _values_of(vec):
    if isinstance(vec, FeatureVector):
        return vec.values
    if isinstance(vec, SignVector):
        return vec.bits
    return vec


def compare(query, candidate, d: int, n: int | None = None) -> bool:
    """Accept iff |query[i] - candidate[i]| <= d for every i below n.

    Evaluation short-circuits at the first violating element.  With n
    omitted, both vectors must have the same length and are compared in
    full.
    """
    if d < 0:
        raise ValueError(f"threshold d must be non-negative, got {d}")
    q = _values_of(query)
    c = _values_of(candidate)
    if n is None:
        if len(q) != len(c):
            raise ValueError(f"feature length mismatch: {len(q)} vs {len(c)}")
        n = len(q)
    if len(q) < n or len(c) < n:
        raise ValueError(f"both vectors must hold at least {n} values")
    for i in range(n):
        if abs(int(q[i]) - int(c[i])) > d:
            return False
    return True


def compare_signs(query, candidate, n: int | None = None) -> bool:
    """Sign-baseline rule: exact bit equality over the first n bits."""
    return compare(query, candidate, d=0, n=n)


def identify(query: FeatureVector, db, d: int, n: int | None = None) -> MatchVerdict:
    """Scan the database in order, recording every accepting candidate.

    The classic halting behaviour (stop at the first acceptance) is the
    ``first_match`` of the returned verdict; keeping all decisions is what
    makes false-positive counting possible.
    """
    decisions = []
    matched = []
    for candidate in db:
        ok = compare(query, candidate, d=d, n=n)
        decisions.append(ok)
        if ok:
            matched.append(candidate.image_id)
    return MatchVerdict(
        query_id=query.image_id, matched_ids=tuple(matched), decisions=tuple(decisions)
    )


def accept_matrix(queries: np.ndarray, candidates: np.ndarray, d: int, n: int) -> np.ndarray:
    """Vectorized pairwise verdicts: bool matrix of shape (nq, nc).

    Entry (i, j) equals compare(queries[i], candidates[j], d, n); the scan
    order of a sequential database pass never changes a verdict.
    """
    if d < 0:
        raise ValueError(f"threshold d must be non-negative, got {d}")
    q = np.asarray(queries, dtype=np.int64)
    c = np.asarray(candidates, dtype=np.int64)
    if q.shape[1] < n or c.shape[1] < n:
        raise ValueError(f"feature matrices must hold at least {n} values per row")
    diffs = np.abs(q[:, np.newaxis, :n] - c[np.newaxis, :, :n])
    return (diffs <= d).all(axis=2)


# ---------------------------------------------------------------------------
# File formats


def feature_to_bytes(values: np.ndarray) -> bytes:
    vals = np.asarray(values, dtype=np.int64)
    if vals.ndim != 1 or len(vals) == 0:
        raise FeatureFormatError("feature vector must be a non-empty 1-D sequence")
    if vals.min() < 0 or vals.max() > MAX_FEATURE_VALUE:
        raise FeatureFormatError(f"feature values must lie in 0..{MAX_FEATURE_VALUE}")
    header = FEATURE_MAGIC + bytes([FORMAT_VERSION]) + struct.pack("<I", len(vals))
    return header + vals.astype("<u2").tobytes()


def feature_from_bytes(data: bytes) -> np.ndarray:
    if len(data) < 9 or data[:4] != FEATURE_MAGIC:
        raise FeatureFormatError("not an ETCF feature file")
    if data[4] != FORMAT_VERSION:
        raise FeatureFormatError(f"unsupported ETCF version {data[4]}")
    (n,) = struct.unpack_from("<I", data, 5)
    if len(data) != 9 + 2 * n:
        raise FeatureFormatError(f"ETCF payload size mismatch for N={n}")
    values = np.frombuffer(data, dtype="<u2", count=n, offset=9).astype(np.int64)
    if n and values.max() > MAX_FEATURE_VALUE:
        raise FeatureFormatError(f"feature values must lie in 0..{MAX_FEATURE_VALUE}")
    return values


def write_feature_file(path, values: np.ndarray) -> None:
    Path(path).write_bytes(feature_to_bytes(values))


def read_feature_file(path) -> np.ndarray:
    return feature_from_bytes(Path(path).read_bytes())


def feature_to_text(values: np.ndarray) -> str:
    """Human-readable export: one integer per line."""
    return "\n".join(str(int(v)) for v in np.asarray(values)) + "\n"


def signs_to_bytes(bits: np.ndarray) -> bytes:
    b = np.asarray(bits, dtype=np.uint8)
    if b.ndim != 1 or len(b) == 0 or b.max(initial=0) > 1:
        raise FeatureFormatError("sign vector must be a non-empty 1-D bit sequence")
    header = SIGN_MAGIC + bytes([FORMAT_VERSION]) + struct.pack("<I", len(b))
    return header + np.packbits(b).tobytes()


def signs_from_bytes(data: bytes) -> np.ndarray:
    if len(data) < 9 or data[:4] != SIGN_MAGIC:
        raise FeatureFormatError("not an ETCS sign file")
    if data[4] != FORMAT_VERSION:
        raise FeatureFormatError(f"unsupported ETCS version {data[4]}")
    (n,) = struct.unpack_from("<I", data, 5)
    if len(data) != 9 + (n + 7) // 8:
        raise FeatureFormatError(f"ETCS payload size mismatch for N={n}")
    return np.unpackbits(np.frombuffer(data, dtype=np.uint8, offset=9))[:n]


def write_sign_file(path, bits: np.ndarray) -> None:
    Path(path).write_bytes(signs_to_bytes(bits))


def read_sign_file(path) -> np.ndarray:
    return signs_from_bytes(Path(path).read_bytes())
