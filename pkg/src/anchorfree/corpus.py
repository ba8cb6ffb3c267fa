"""Sparse term-document matrices and corpus preprocessing.

File formats (all ASCII / UTF-8 text):

* term-doc matrix: header line ``V D NNZ`` followed by ``NNZ`` lines of
  ``word_index doc_index weight`` with 1-based indices;
* vocabulary: one token per line;
* labels: one small nonnegative integer per line;
* stoplist: one token per line.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .errors import AnchorfreeWarning, CorpusFormatError

__all__ = [
    "TermDocMatrix",
    "LabelSet",
    "load_term_doc",
    "write_term_doc",
    "load_labels",
    "load_stoplist",
    "remove_stopwords",
    "tfidf",
    "ncw_weight",
]


@dataclass(frozen=True)
class TermDocMatrix:
    """A nonnegative V x D word-by-document matrix with metadata.

    ``matrix`` is CSR with one row per vocabulary entry.  Instances are
    immutable; preprocessing operations return new objects.
    """

    matrix: sp.csr_matrix
    vocab: tuple
    doc_ids: tuple

    def __post_init__(self):
        mat = sp.csr_matrix(self.matrix)
        mat.sum_duplicates()
        object.__setattr__(self, "matrix", mat)
        object.__setattr__(self, "vocab", tuple(self.vocab))
        object.__setattr__(self, "doc_ids", tuple(self.doc_ids))
        v, d = mat.shape
        if len(self.vocab) != v:
            raise CorpusFormatError(
                f"vocab has {len(self.vocab)} tokens but matrix has {v} rows"
            )
        if len(self.doc_ids) != d:
            raise CorpusFormatError(
                f"doc_ids has {len(self.doc_ids)} entries but matrix has {d} columns"
            )
        if mat.nnz and mat.data.min() < 0:
            raise CorpusFormatError("term-doc matrix contains negative weights")

    @property
    def n_words(self):
        return self.matrix.shape[0]

    @property
    def n_docs(self):
        return self.matrix.shape[1]

    def toarray(self):
        return self.matrix.toarray()


@dataclass(frozen=True)
class LabelSet:
    """Ground-truth document categories, used only for evaluation."""

    labels: np.ndarray
    n_categories: int

    def __post_init__(self):
        labels = np.asarray(self.labels, dtype=int)
        object.__setattr__(self, "labels", labels)
        if labels.size and (labels.min() < 0 or labels.max() >= self.n_categories):
            raise CorpusFormatError(
                "labels must lie in [0, n_categories)"
            )


def load_term_doc(path, vocab_path, doc_ids=None):
    """Read a term-doc matrix from the coordinate text format.

    Duplicate (word, doc) pairs are a hard error rather than being summed,
    so corpus-preparation bugs surface immediately.
    """
    with open(vocab_path, encoding="utf-8") as fh:
        vocab = [line.rstrip("\n") for line in fh if line.rstrip("\n")]
    with open(path, encoding="utf-8") as fh:
        header = fh.readline()
        parts = header.split()
        if len(parts) != 3:
            raise CorpusFormatError(f"{path}: line 1: expected header 'V D NNZ'")
        try:
            n_words, n_docs, nnz = (int(p) for p in parts)
        except ValueError:
            raise CorpusFormatError(
                f"{path}: line 1: non-integer header fields"
            ) from None
        if n_words != len(vocab):
            raise CorpusFormatError(
                f"header says V={n_words} but vocab file has {len(vocab)} tokens"
            )
        rows = np.empty(nnz, dtype=np.int64)
        cols = np.empty(nnz, dtype=np.int64)
        vals = np.empty(nnz, dtype=np.float64)
        for k in range(nnz):
            line_no = k + 2
            line = fh.readline()
            if not line:
                raise CorpusFormatError(
                    f"{path}: line {line_no}: expected {nnz} entries, file truncated"
                )
            fields = line.split()
            if len(fields) != 3:
                raise CorpusFormatError(
                    f"{path}: line {line_no}: expected 'word doc weight'"
                )
            try:
                w = int(fields[0])
                d = int(fields[1])
                x = float(fields[2])
            except ValueError:
                raise CorpusFormatError(
                    f"{path}: line {line_no}: malformed entry"
                ) from None
            if not (1 <= w <= n_words and 1 <= d <= n_docs):
                raise CorpusFormatError(
                    f"{path}: line {line_no}: index out of range"
                )
            if x < 0:
                raise CorpusFormatError(
                    f"{path}: line {line_no}: negative weight"
                )
            rows[k], cols[k], vals[k] = w - 1, d - 1, x
    seen = set(zip(rows.tolist(), cols.tolist()))
    if len(seen) != nnz:
        raise CorpusFormatError(f"{path}: duplicate (word, doc) entries")
    mat = sp.csr_matrix((vals, (rows, cols)), shape=(n_words, n_docs))
    if doc_ids is None:
        doc_ids = tuple(f"doc{j + 1}" for j in range(n_docs))
    return TermDocMatrix(mat, tuple(vocab), doc_ids)


def write_term_doc(m, path, vocab_path=None):
    """Write a term-doc matrix in the coordinate text format (round-trips
    with :func:`load_term_doc`)."""
    coo = m.matrix.tocoo()
    order = np.lexsort((coo.col, coo.row))
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"{m.n_words} {m.n_docs} {coo.nnz}\n")
        for k in order:
            fh.write(f"{coo.row[k] + 1} {coo.col[k] + 1} {coo.data[k]:.17g}\n")
    if vocab_path is not None:
        with open(vocab_path, "w", encoding="utf-8") as fh:
            for tok in m.vocab:
                fh.write(tok + "\n")


def load_labels(path):
    with open(path, encoding="utf-8") as fh:
        labels = []
        for i, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                labels.append(int(line))
            except ValueError:
                raise CorpusFormatError(
                    f"{path}: line {i}: labels must be integers"
                ) from None
    labels = np.asarray(labels, dtype=int)
    if labels.size == 0:
        raise CorpusFormatError(f"{path}: empty label file")
    return LabelSet(labels, int(labels.max()) + 1)


def load_stoplist(path):
    with open(path, encoding="utf-8") as fh:
        return {line.strip() for line in fh if line.strip()}


def remove_stopwords(m, stoplist):
    """Delete vocabulary rows whose token is in ``stoplist``."""
    keep = [i for i, tok in enumerate(m.vocab) if tok not in stoplist]
    if not keep:
        warnings.warn(
            "stoplist removed the entire vocabulary", AnchorfreeWarning, stacklevel=2
        )
    sub = m.matrix[keep, :] if keep else sp.csr_matrix((0, m.n_docs))
    return TermDocMatrix(sub, tuple(m.vocab[i] for i in keep), m.doc_ids)


def tfidf(m):
    """Reweight raw counts as tf * ln(D / df).

    tf is the raw count and df(v) the number of documents containing word
    v; words present in every document get weight 0 through ln(1) = 0.
    """
    n_docs = m.n_docs
    df = np.asarray((m.matrix > 0).sum(axis=1)).ravel().astype(float)
    idf = np.zeros(m.n_words)
    present = df > 0
    idf[present] = np.log(n_docs / df[present])
    out = sp.diags(idf) @ m.matrix
    return TermDocMatrix(out.tocsr(), m.vocab, m.doc_ids)


def ncw_weight(m):
    """Normalized-cut weighting of document columns.

    Each column x_d is scaled by delta_d**-0.5 where
    delta_d = x_d' (X 1) is the document's connectivity mass (the d-th
    entry of X'X 1).  Documents with zero mass are left unscaled and
    flagged with a warning.
    """
    x = m.matrix
    mass = np.asarray(x.sum(axis=1)).ravel()          # X 1, length V
    delta = x.T @ mass                                 # X'X 1, length D
    delta = np.asarray(delta).ravel()
    scale = np.ones(m.n_docs)
    ok = delta > 0
    scale[ok] = 1.0 / np.sqrt(delta[ok])
    if not ok.all():
        warnings.warn(
            f"{int((~ok).sum())} document(s) have zero connectivity mass; "
            "left unscaled",
            AnchorfreeWarning,
            stacklevel=2,
        )
    out = x @ sp.diags(scale)
    return TermDocMatrix(out.tocsr(), m.vocab, m.doc_ids)
