"""Determinant-maximization topic factorization.

Factors a symmetric word co-occurrence matrix P into a column-stochastic
word-topic matrix C and a symmetric topic-topic matrix E by alternating
column-wise maximization of |det M| over the reduced F x F mixing
variable, with one LP pair per column, then recovering C = B M and E by a
two-sided least-squares pullback."""

from __future__ import annotations

import enum
import time
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    AnchorfreeWarning,
    DegenerateTopicsError,
    LpInfeasibleError,
    NumericalError,
)
from .linalg import cofactor_vector, determinant, sqrt_factor, top_eigenpairs
from .lp import LpProblem, Sense, solve_lp

__all__ = [
    "Method",
    "TopicModel",
    "SolverReport",
    "FactorizeOptions",
    "anchor_free_factorize",
    "recover_e",
]

# C entries in (-NEG_CLIP_TOL, 0) are treated as roundoff and clipped;
# anything below signals a rank/scattering violation and is flagged.
NEG_CLIP_TOL = 1e-6
RANK_GAP_WARN = 0.1


class Method(enum.Enum):
    ANCHOR_FREE = "anchorfree"
    SPA_RECOVER = "spa"


@dataclass(frozen=True)
class TopicModel:
    """Column-stochastic word-topic matrix plus topic-topic matrix."""

    c: np.ndarray
    e: np.ndarray
    method_tag: Method


@dataclass(frozen=True)
class SolverReport:
    sweeps: int
    det_trajectory: list
    converged: bool
    lp_calls: int
    wall_time: float


@dataclass(frozen=True)
class FactorizeOptions:
    tol: float = 1e-6
    max_sweeps: int = 50
    seed: int = 0
    strict_rank: bool = False
    retries: int = 3


def recover_e(c_star, p):
    """Two-sided least-squares pullback (C'C)^-1 C'PC (C'C)^-1,
    symmetrized to scrub roundoff."""
    c_star = np.asarray(c_star, dtype=float)
    p_dense = p.toarray() if hasattr(p, "toarray") else np.asarray(p, dtype=float)
    gram = c_star.T @ c_star
    svals = np.linalg.svd(gram, compute_uv=False)
    if svals[-1] <= 1e-12 * max(svals[0], 1e-300):
        raise DegenerateTopicsError("degenerate topics: C'C is singular")
    mid = c_star.T @ p_dense @ c_star
    x = np.linalg.solve(gram, np.linalg.solve(gram, mid).T).T
    return 0.5 * (x + x.T)


def _random_feasible_column(b, s, rng, retries):
    """A vertex of {Bx >= 0, s'x = 1} found by optimizing a random
    objective; used to restart columns with a vanishing cofactor vector."""
    last_err = None
    for _ in range(max(retries, 1)):
        g = rng.standard_normal(s.size)
        try:
            x, _ = solve_lp(LpProblem(g, b, normalizer=s))
            return x
        except NumericalError as err:
            last_err = err
    raise NumericalError(f"could not reinitialize a degenerate column: {last_err}")


def anchor_free_factorize(p, f, opts=None):
    """Alternating determinant maximization on the co-occurrence matrix
    ``p`` with ``f`` topics; returns a (TopicModel, SolverReport) pair."""
    opts = opts or FactorizeOptions()
    if f < 1:
        raise ValueError("need at least one topic")
    t0 = time.perf_counter()
    v = p.shape[0] if hasattr(p, "shape") else p.n_words

    k = min(f + 1, v)
    vals, vecs = top_eigenpairs(p, k, seed=opts.seed)
    if k > f and vals[0] > 0 and vals[f] > RANK_GAP_WARN * max(vals[f - 1], 0):
        msg = (
            f"eigenvalue {f + 1} ({vals[f]:.3e}) exceeds "
            f"{RANK_GAP_WARN:g} x eigenvalue {f} ({vals[f - 1]:.3e}): "
            "rank-F model assumption looks violated"
        )
        if opts.strict_rank:
            raise NumericalError(msg)
        warnings.warn(msg, AnchorfreeWarning, stacklevel=2)
    factor = sqrt_factor(p, f, seed=opts.seed, _eigpairs=(vals, vecs))
    b = factor.b
    s = b.T @ np.ones(v)

    rng = np.random.default_rng(opts.seed)
    m = np.eye(f)
    det_traj = []
    lp_calls = 0
    converged = False
    sweeps = 0
    prev_det = abs(determinant(m))
    for sweep in range(1, opts.max_sweeps + 1):
        sweeps = sweep
        for col in range(f):
            a = cofactor_vector(m, col)
            nrm = np.linalg.norm(a)
            tries = 0
            while nrm <= 1e-300 and tries < opts.retries:
                # remaining columns are rank deficient; restart this one
                m[:, col] = _random_feasible_column(b, s, rng, opts.retries)
                lp_calls += 1
                a = cofactor_vector(m, col)
                nrm = np.linalg.norm(a)
                tries += 1
            if nrm <= 1e-300:
                raise NumericalError(
                    f"cofactor vector vanished at column {col} after "
                    f"{opts.retries} restarts"
                )
            a = a / nrm
            try:
                x_max, v_max = solve_lp(LpProblem(a, b, normalizer=s, sense=Sense.MAX))
                x_min, v_min = solve_lp(LpProblem(a, b, normalizer=s, sense=Sense.MIN))
            except LpInfeasibleError as err:
                raise LpInfeasibleError(
                    f"LP infeasible while updating column {col}: {err}"
                ) from err
            lp_calls += 2
            # tie goes to the max branch for determinism
            m[:, col] = x_max if abs(v_max) >= abs(v_min) else x_min
            det_traj.append(abs(determinant(m)))
        cur_det = det_traj[-1]
        if sweep > 1 and abs(cur_det - prev_det) <= opts.tol * max(prev_det, 1e-300):
            converged = True
            prev_det = cur_det
            break
        prev_det = cur_det

    c = b @ m
    worst = float(c.min(initial=0.0))
    if worst < -NEG_CLIP_TOL:
        warnings.warn(
            f"C has negative entries below -{NEG_CLIP_TOL:g} (worst {worst:.3e}); "
            "the rank/scattering assumptions look violated",
            AnchorfreeWarning,
            stacklevel=2,
        )
    c = np.clip(c, 0.0, None)
    sums = c.sum(axis=0)
    if (sums <= 0).any():
        raise DegenerateTopicsError("a topic column vanished after cleanup")
    c = c / sums
    e = recover_e(c, p)
    report = SolverReport(
        sweeps=sweeps,
        det_trajectory=det_traj,
        converged=converged,
        lp_calls=lp_calls,
        wall_time=time.perf_counter() - t0,
    )
    return TopicModel(c=c, e=e, method_tag=Method.ANCHOR_FREE), report
