"""Word-word co-occurrence / correlation matrix estimation.

Two estimators are provided: a scaled Gram matrix (1/D) X X' suited to
tf-idf weighted data, and the diagonal-corrected per-document count
estimator used in the anchor-words literature.  Both produce exactly
symmetric storage: only the upper triangle is computed and then mirrored.
"""

from __future__ import annotations

import enum
import struct
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .errors import CorpusFormatError, NumericalError

__all__ = [
    "Estimator",
    "CooccurrenceMatrix",
    "estimate_cooccurrence",
    "save_cooccurrence",
    "load_cooccurrence",
]

# Dense storage when the fill ratio exceeds this threshold (documented,
# not tuned).
DENSE_FILL_THRESHOLD = 0.25

_CACHE_MAGIC = b"ANCP"


class Estimator(enum.Enum):
    SCALED_GRAM = "scaled-gram"
    COUNT_COOCCUR = "count-cooccur"
    # Tag for matrices not produced by an estimator (exact synthetic
    # ground truth loaded from a bundle).
    EXACT = "exact"


@dataclass(frozen=True)
class CooccurrenceMatrix:
    """Symmetric V x V estimate of the word correlation matrix."""

    storage: object  # np.ndarray or scipy.sparse matrix
    estimator_tag: Estimator

    @property
    def n_words(self):
        return self.storage.shape[0]

    def toarray(self):
        if sp.issparse(self.storage):
            return self.storage.toarray()
        return np.asarray(self.storage)

    @classmethod
    def from_upper(cls, full, tag):
        """Build exactly symmetric storage by mirroring the upper triangle
        of ``full`` (never by averaging two asymmetric halves)."""
        if sp.issparse(full):
            upper = sp.triu(full, k=1)
            diag = sp.diags(full.diagonal())
            sym = upper + upper.T + diag
            fill = sym.nnz / max(1, sym.shape[0] * sym.shape[1])
            if fill > DENSE_FILL_THRESHOLD:
                sym = sym.toarray()
            else:
                sym = sym.tocsr()
        else:
            full = np.asarray(full, dtype=float)
            upper = np.triu(full, k=1)
            sym = upper + upper.T + np.diag(np.diag(full))
        return cls(sym, tag)


def estimate_cooccurrence(m, estimator=Estimator.SCALED_GRAM):
    """Estimate the word-word co-occurrence matrix from a term-doc matrix.

    SCALED_GRAM returns (1/D) X X'.  COUNT_COOCCUR requires integer counts
    with every document length >= 2 and returns
    (1/D) sum_d (w_d w_d' - diag(w_d)) / (n_d (n_d - 1)).
    """
    x = m.matrix
    n_docs = m.n_docs
    if n_docs == 0:
        raise CorpusFormatError("cannot estimate co-occurrence with zero documents")
    if estimator == Estimator.SCALED_GRAM:
        gram = (x @ x.T) / n_docs
        return CooccurrenceMatrix.from_upper(gram, Estimator.SCALED_GRAM)
    if estimator == Estimator.COUNT_COOCCUR:
        data = x.tocoo().data
        if data.size and not np.allclose(data, np.round(data)):
            raise CorpusFormatError(
                "count co-occurrence estimator requires integer counts"
            )
        lengths = np.asarray(x.sum(axis=0)).ravel()
        short = np.flatnonzero(lengths < 2)
        if short.size:
            raise NumericalError(
                f"document {m.doc_ids[short[0]]} has length {lengths[short[0]]:g} "
                "< 2; count co-occurrence estimator undefined"
            )
        coef = 1.0 / (lengths * (lengths - 1.0))
        scaled = x @ sp.diags(coef)
        outer = scaled @ x.T
        diag_corr = np.asarray(x @ coef).ravel()
        if sp.issparse(outer):
            outer = outer - sp.diags(diag_corr)
        else:
            outer = outer - np.diag(diag_corr)
        return CooccurrenceMatrix.from_upper(outer / n_docs, Estimator.COUNT_COOCCUR)
    raise CorpusFormatError(f"unknown estimator {estimator!r}")


_TAG_CODES = {
    Estimator.SCALED_GRAM: 0,
    Estimator.COUNT_COOCCUR: 1,
    Estimator.EXACT: 2,
}
_CODE_TAGS = {v: k for k, v in _TAG_CODES.items()}


def save_cooccurrence(p, path):
    """Binary cache: magic, V, estimator tag, then the packed upper
    triangle (row-major, including the diagonal) as little-endian f64."""
    dense = p.toarray()
    v = dense.shape[0]
    iu = np.triu_indices(v)
    payload = np.ascontiguousarray(dense[iu], dtype="<f8")
    with open(path, "wb") as fh:
        fh.write(_CACHE_MAGIC)
        fh.write(struct.pack("<QB", v, _TAG_CODES[p.estimator_tag]))
        fh.write(payload.tobytes())


def load_cooccurrence(path):
    with open(path, "rb") as fh:
        magic = fh.read(4)
        if magic != _CACHE_MAGIC:
            raise CorpusFormatError(f"{path}: not a co-occurrence cache file")
        v, code = struct.unpack("<QB", fh.read(9))
        if code not in _CODE_TAGS:
            raise CorpusFormatError(f"{path}: unknown estimator tag {code}")
        n_upper = v * (v + 1) // 2
        payload = np.frombuffer(fh.read(8 * n_upper), dtype="<f8")
        if payload.size != n_upper:
            raise CorpusFormatError(f"{path}: truncated payload")
    dense = np.zeros((v, v))
    iu = np.triu_indices(v)
    dense[iu] = payload
    dense = dense + np.triu(dense, k=1).T
    return CooccurrenceMatrix.from_upper(dense, _CODE_TAGS[code])
