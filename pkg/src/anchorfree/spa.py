"""Greedy anchor-word baseline: successive projection with orthogonal
deflation, plus constrained least-squares topic recovery from the
selected anchor rows."""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import AnchorfreeWarning, NumericalError
from .factorization import Method, TopicModel, recover_e
from .simplex_ls import simplex_lstsq

__all__ = ["AnchorSet", "spa_anchors", "recover_topics_from_anchors", "spa_factorize"]

# relative squared-norm floor below which the deflated residual is treated
# as numerically annihilated (legitimate directions on hard instances can
# sit around 1e-14 relative, exact annihilation around 1e-30)
_RANK_TOL = 1e-20


@dataclass(frozen=True)
class AnchorSet:
    """Indices of the selected anchor words (distinct, in range)."""

    indices: tuple

    def __post_init__(self):
        idx = tuple(int(i) for i in self.indices)
        object.__setattr__(self, "indices", idx)
        if len(set(idx)) != len(idx):
            raise ValueError("anchor indices must be distinct")


def spa_anchors(data, f):
    """Successive projection on the column-normalized transpose of
    ``data`` (rows index words; for co-occurrence input pass P itself).

    Each step picks the residual column of maximal Euclidean norm
    (argmax ties break toward the smallest index) and deflates the
    residual onto the orthogonal complement of the picks so far."""
    mat = data.toarray() if hasattr(data, "toarray") else np.asarray(data, dtype=float)
    row_sums = mat.sum(axis=1)
    zero = np.flatnonzero(row_sums == 0)
    if zero.size:
        raise NumericalError(
            f"zero-sum row {int(zero[0])} encountered during normalization; "
            "exclude zero rows before anchor selection"
        )
    x = mat.T / row_sums[None, :]
    init_norm2 = float((x * x).sum())
    indices = []
    for step in range(f):
        norms2 = (x * x).sum(axis=0)
        pick = int(np.argmax(norms2))  # first max = smallest index on ties
        if norms2[pick] <= _RANK_TOL * max(init_norm2, 1e-300):
            raise NumericalError(
                f"deflation annihilated the data after {step} anchors; "
                f"requested {f} exceeds the numerical rank"
            )
        q = x[:, pick] / np.sqrt(norms2[pick])
        x = x - np.outer(q, q @ x)
        indices.append(pick)
    return AnchorSet(tuple(indices))


def recover_topics_from_anchors(p, anchors):
    """Topic recovery treating P(anchors, :) as the scaled topic basis.

    Rows of P are normalized to the simplex, each word row is expressed as
    a simplex-constrained least-squares combination of the anchor rows,
    and the combination weights are rescaled by the word marginals to give
    column-stochastic topics.  Zero rows of P yield zero topic rows."""
    dense = p.toarray() if hasattr(p, "toarray") else np.asarray(p, dtype=float)
    v = dense.shape[0]
    idx = list(anchors.indices)
    f = len(idx)
    row_sums = dense.sum(axis=1)
    mask = row_sums != 0
    if not mask[idx].all():
        raise NumericalError("anchor row with zero marginal")
    normalized = np.zeros_like(dense)
    normalized[mask] = dense[mask] / row_sums[mask, None]
    basis = normalized[idx, :]               # F x V
    svals = np.linalg.svd(basis, compute_uv=False)
    if f > 1 and svals[-1] <= 1e-10 * max(svals[0], 1e-300):
        raise NumericalError("anchor rows are rank deficient")
    weights = simplex_lstsq(basis.T, normalized[mask].T)   # F x |mask|
    c = np.zeros((v, f))
    c[mask] = weights.T * row_sums[mask, None]
    # negative word marginals (P need not be elementwise nonnegative) can
    # push entries below zero; clip before renormalizing like the det-max
    # cleanup does
    c = np.clip(c, 0.0, None)
    sums = c.sum(axis=0)
    dead = sums <= 0
    if dead.any():
        warnings.warn(
            f"{int(dead.sum())} recovered topic column(s) vanished; "
            "replaced by the uniform distribution",
            AnchorfreeWarning,
            stacklevel=2,
        )
        c[:, dead] = 1.0 / v
        sums = c.sum(axis=0)
    c = c / sums
    e = recover_e(c, p)
    return TopicModel(c=c, e=e, method_tag=Method.SPA_RECOVER)


def spa_factorize(p, f):
    """Run the full SPA pipeline on a co-occurrence matrix, excluding
    zero rows from anchor selection as the algorithm requires."""
    dense = p.toarray() if hasattr(p, "toarray") else np.asarray(p, dtype=float)
    row_sums = dense.sum(axis=1)
    keep = np.flatnonzero(row_sums != 0)
    sub = dense[np.ix_(keep, keep)]
    picked = spa_anchors(sub, f)
    anchors = AnchorSet(tuple(int(keep[i]) for i in picked.indices))
    return recover_topics_from_anchors(p, anchors), anchors
