"""scikit-learn style wrappers around the cipher, extractor and matcher.

These let the pieces compose with sklearn pipelines and grid tooling:

* :class:`BlockScrambleCipher` -- stateless transformer; ``transform``
  encrypts images, ``inverse_transform`` decrypts them.
* :class:`DcFeatureExtractor` -- stateless transformer from JPEG bytes
  (or decoded pixel arrays) to a feature matrix.
* :class:`ThresholdIdentifier` -- ``fit`` stores the database features,
  ``predict`` returns the first accepted label per query.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.exceptions import NotFittedError
from sklearn.utils import check_array

from .cipher import decrypt, default_n_fixed, encrypt
from .features import DEFAULT_THRESHOLD, MatchVerdict, accept_matrix
from .jpeg import decode_jpeg, extract_dc_luma
from .keys import derive_keys


def _as_image_list(X):
    if isinstance(X, np.ndarray) and X.ndim in (2, 3):
        return [X], True
    return list(X), False


class BlockScrambleCipher(BaseEstimator, TransformerMixin):
    """Two-layer block-scrambling encryption as a reversible transformer.

    Parameters
    ----------
    k0 : int
        Seed of the shared permutation layer.
    k : int
        Seed of the changeable layer (tail permutation, dihedral, negpos).
    n_fixed : int or None
        Stable-prefix length; None picks 10% of the block count per image.
    """

    def __init__(self, k0: int = 0, k: int = 0, n_fixed: int | None = None):
        self.k0 = k0
        self.k = k
        self.n_fixed = n_fixed

    def fit(self, X, y=None):
        return self

    def transform(self, X):
        keys = derive_keys(self.k0, self.k)
        images, single = _as_image_list(X)
        out = [encrypt(img, keys, self.n_fixed) for img in images]
        return out[0] if single else out

    def inverse_transform(self, X):
        keys = derive_keys(self.k0, self.k)
        images, single = _as_image_list(X)
        out = [decrypt(img, keys, self.n_fixed) for img in images]
        return out[0] if single else out


class DcFeatureExtractor(BaseEstimator, TransformerMixin):
    """Maps encrypted JPEGs to their first-N |DC| (or DC-sign) rows.

    Items may be JPEG byte strings, filesystem paths, or already decoded
    pixel arrays.  ``kind="abs"`` yields magnitude features, ``"sign"``
    the 0/1 sign bits of the simplified baseline.
    """

    def __init__(self, n_coeffs: int | None = None, kind: str = "abs"):
        self.n_coeffs = n_coeffs
        self.kind = kind

    def fit(self, X, y=None):
        return self

    def _dc_of(self, item) -> np.ndarray:
        if isinstance(item, np.ndarray) and item.ndim in (2, 3):
            return extract_dc_luma(item)
        if isinstance(item, (bytes, bytearray, memoryview)):
            return extract_dc_luma(decode_jpeg(bytes(item)))
        with open(item, "rb") as fh:
            return extract_dc_luma(decode_jpeg(fh.read()))

    def transform(self, X):
        if self.kind not in ("abs", "sign"):
            raise ValueError(f"kind must be 'abs' or 'sign', got {self.kind!r}")
        items, single = _as_image_list(X) if isinstance(X, np.ndarray) else (list(X), False)
        rows = []
        n = self.n_coeffs
        for item in items:
            dc = self._dc_of(item)
            if n is None:
                n = default_n_fixed(len(dc))
            if not 1 <= n <= len(dc):
                raise ValueError(f"feature length {n} out of range 1..{len(dc)}")
            rows.append(np.abs(dc[:n]) if self.kind == "abs" else (dc[:n] < 0).astype(np.int64))
        mat = np.asarray(rows)
        return mat[0] if single else mat


class ThresholdIdentifier(BaseEstimator):
    """Per-element absolute-threshold matcher over a stored feature database.

    ``threshold=0`` together with sign features reproduces the exact-match
    sign baseline.
    """

    def __init__(self, threshold: int = DEFAULT_THRESHOLD, n_coeffs: int | None = None):
        self.threshold = threshold
        self.n_coeffs = n_coeffs

    def fit(self, X, y=None):
        X = check_array(X, dtype=np.int64)
        self.database_ = X
        self.labels_ = np.arange(len(X)) if y is None else np.asarray(y)
        if len(self.labels_) != len(X):
            raise ValueError("labels length does not match database size")
        self.n_features_in_ = X.shape[1]
        return self

    def _check_fitted(self):
        if not hasattr(self, "database_"):
            raise NotFittedError("ThresholdIdentifier must be fitted before use")

    def _n(self) -> int:
        return self.n_coeffs if self.n_coeffs is not None else self.n_features_in_

    def accept_matrix(self, X) -> np.ndarray:
        """Boolean (n_queries, n_database) pairwise acceptance decisions."""
        self._check_fitted()
        X = check_array(X, dtype=np.int64)
        return accept_matrix(X, self.database_, d=self.threshold, n=self._n())

    def predict(self, X):
        """First accepted database label per query; None when nothing accepts."""
        accepts = self.accept_matrix(X)
        out = []
        for row in accepts:
            hits = np.flatnonzero(row)
            out.append(self.labels_[hits[0]] if len(hits) else None)
        return np.asarray(out, dtype=object)

    def verdicts(self, X, query_ids=None) -> list[MatchVerdict]:
        """Full scan verdicts, database order preserved."""
        accepts = self.accept_matrix(X)
        if query_ids is None:
            query_ids = [str(i) for i in range(len(accepts))]
        return [
            MatchVerdict(
                query_id=str(qid),
                matched_ids=tuple(str(self.labels_[j]) for j in np.flatnonzero(row)),
                decisions=tuple(bool(v) for v in row),
            )
            for qid, row in zip(query_ids, accepts)
        ]
