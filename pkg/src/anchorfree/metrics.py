"""Evaluation metrics: topic coherence, cross-topic similarity count,
document clustering accuracy, and permutation-aligned recovery error."""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from sklearn.cluster import KMeans

from .assignment import Permutation, hungarian
from .errors import AnchorfreeWarning, NumericalError
from .simplex_ls import simplex_lstsq

__all__ = [
    "EvalReport",
    "DocumentWeights",
    "top_words_per_topic",
    "coherence",
    "sim_count",
    "estimate_weights",
    "clustering_accuracy",
    "recovery_error",
]

COHERENCE_EPS = 0.01
DEFAULT_TOP_N = 20

# k-means settings are pinned for reproducibility; the restart count is a
# convention, not a tuned value.
KMEANS_RESTARTS = 10


@dataclass(frozen=True)
class EvalReport:
    coherence_per_topic: list
    sim_count: int
    clust_acc: float
    top_words: list
    recovery_err_c: float = None
    recovery_err_e: float = None


@dataclass(frozen=True)
class DocumentWeights:
    """F x D topic weights, one simplex column per document."""

    w: np.ndarray


def top_words_per_topic(c, n, vocab=None):
    """Leading ``n`` row indices (or tokens) of each topic column, by
    descending weight with index order breaking ties."""
    c = np.asarray(c)
    v, f = c.shape
    n = min(n, v)
    out = []
    for j in range(f):
        order = np.lexsort((np.arange(v), -c[:, j]))[:n]
        if vocab is not None:
            out.append([vocab[i] for i in order])
        else:
            out.append([int(i) for i in order])
    return out


def _presence(counts):
    """Boolean V x D document-presence matrix from raw counts."""
    return (counts.matrix > 0).toarray()


def coherence(top_word_indices, counts, eps=COHERENCE_EPS):
    """Pairwise log-ratio co-occurrence score of one topic's leading words.

    With words ordered by descending topic weight, sums
    log((freq(v_i, v_j) + eps) / freq(v_j)) over ordered pairs j < i,
    where freq counts documents by presence in the raw count matrix."""
    idx = list(top_word_indices)
    present = _presence(counts)
    freq = present.sum(axis=1)
    total = 0.0
    for i in range(1, len(idx)):
        for j in range(i):
            fj = freq[idx[j]]
            if fj == 0:
                raise NumericalError(
                    f"word index {idx[j]} appears in no document; "
                    "coherence denominator undefined"
                )
            co = int(np.count_nonzero(present[idx[i]] & present[idx[j]]))
            total += np.log((co + eps) / fj)
    return float(total)


def sim_count(top_words, n=None):
    """Total pairwise overlap of the topics' leading words, each
    unordered topic pair counted once."""
    lists = [list(t)[:n] if n is not None else list(t) for t in top_words]
    for t in lists:
        if len(set(t)) != len(t):
            raise ValueError("top-word lists must be deduplicated within a topic")
    total = 0
    for i in range(len(lists)):
        for j in range(i):
            total += len(set(lists[i]) & set(lists[j]))
    return total


def estimate_weights(d, c):
    """Per-document simplex-constrained least-squares topic weights.

    Zero documents get the uniform weight vector and a warning."""
    c = np.asarray(c, dtype=float)
    f = c.shape[1]
    cols = d.matrix.toarray()
    zero_docs = np.flatnonzero(cols.sum(axis=0) == 0)
    w = simplex_lstsq(c, cols)
    if zero_docs.size:
        w[:, zero_docs] = 1.0 / f
        warnings.warn(
            f"{zero_docs.size} zero document(s) mapped to uniform weights",
            AnchorfreeWarning,
            stacklevel=2,
        )
    return DocumentWeights(w=w)


def clustering_accuracy(w, labels, seed=0):
    """k-means the document weight columns into n_categories clusters and
    return the fraction of documents correctly assigned after optimally
    matching cluster ids to labels."""
    feats = np.asarray(w.w).T          # D x F
    k = labels.n_categories
    n_docs = feats.shape[0]
    if n_docs < k:
        raise NumericalError(f"{n_docs} documents cannot form {k} clusters")
    km = KMeans(n_clusters=k, init="k-means++", n_init=KMEANS_RESTARTS,
                random_state=seed)
    assign = km.fit_predict(feats)
    confusion = np.zeros((k, k))
    for lab, cl in zip(labels.labels, assign):
        confusion[lab, cl] += 1
    perm, _ = hungarian(-confusion)
    correct = confusion[np.arange(k), perm.mapping].sum()
    return float(correct / n_docs)


def recovery_error(c_star, e_star, c_nat, e_nat):
    """Squared Frobenius recovery errors after resolving the permutation
    ambiguity by minimum-cost column matching.

    Returns (err_c, err_e, perm) with perm mapping estimated column f to
    ground-truth column perm[f]."""
    c_star = np.asarray(c_star, dtype=float)
    c_nat = np.asarray(c_nat, dtype=float)
    if c_star.shape != c_nat.shape:
        raise ValueError("topic matrices must have matching shapes")
    cost = (
        (c_star * c_star).sum(axis=0)[:, None]
        + (c_nat * c_nat).sum(axis=0)[None, :]
        - 2.0 * c_star.T @ c_nat
    )
    perm, _ = hungarian(cost)
    g = perm.mapping
    err_c = float(((c_star - c_nat[:, g]) ** 2).sum())
    err_e = None
    if e_star is not None and e_nat is not None:
        e_star = np.asarray(e_star, dtype=float)
        e_nat = np.asarray(e_nat, dtype=float)
        err_e = float(((e_star - e_nat[np.ix_(g, g)]) ** 2).sum())
    return err_c, err_e, perm
