"""Minimum-cost linear assignment (permutation matching)."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

__all__ = ["Permutation", "hungarian"]

_TIE_TOL = 1e-9


@dataclass(frozen=True)
class Permutation:
    """A bijection f -> mapping[f] on {0, .., F-1}."""

    mapping: np.ndarray

    def __post_init__(self):
        mapping = np.asarray(self.mapping, dtype=int)
        object.__setattr__(self, "mapping", mapping)
        if sorted(mapping.tolist()) != list(range(mapping.size)):
            raise ValueError("mapping is not a bijection")

    def matrix(self):
        """Permutation matrix Pi with Pi[mapping[f], f] = 1, so that
        (A @ Pi)[:, f] = A[:, mapping[f]]."""
        f = self.mapping.size
        pi = np.zeros((f, f))
        pi[self.mapping, np.arange(f)] = 1.0
        return pi


def hungarian(cost):
    """Minimize sum_f cost[f, perm[f]] over permutations.

    Ties between optimal assignments are broken toward the
    lexicographically smallest mapping: row 0's partner is the smallest
    column completable to an optimal assignment, then row 1's, and so on.
    """
    cost = np.asarray(cost, dtype=float)
    n = cost.shape[0]
    if cost.shape != (n, n):
        raise ValueError("cost matrix must be square")
    if not np.isfinite(cost).all():
        raise ValueError("cost matrix must be finite")
    rows, cols = linear_sum_assignment(cost)
    total = float(cost[rows, cols].sum())
    tol = _TIE_TOL * (1.0 + abs(total))

    mapping = np.empty(n, dtype=int)
    free = list(range(n))
    fixed_cost = 0.0
    for f in range(n):
        for g in sorted(free):
            rest_rows = [r for r in range(f + 1, n)]
            rest_cols = [c for c in free if c != g]
            if rest_rows:
                sub = cost[np.ix_(rest_rows, rest_cols)]
                ri, ci = linear_sum_assignment(sub)
                rest = float(sub[ri, ci].sum())
            else:
                rest = 0.0
            if fixed_cost + cost[f, g] + rest <= total + tol:
                mapping[f] = g
                fixed_cost += cost[f, g]
                free.remove(g)
                break
        else:
            raise RuntimeError("assignment refinement failed")
    return Permutation(mapping), total
