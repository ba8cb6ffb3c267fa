"""Small-variable-count linear programs of the form

    max/min  a' x   subject to   B x >= 0,  s' x = 1,

with x in R^F, B in R^{V x F} and s = B' 1 by default.

The solver is a two-phase revised simplex with Bland's anti-cycling rule,
run on the dual system (F equality rows, V + 2 columns) so the working
basis stays F x F regardless of the number of inequality constraints.
Optimal primal vertices are recovered from the simplex multipliers, which
keeps solutions exact to roundoff."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import lu_factor, lu_solve

from .errors import LpInfeasibleError, LpUnboundedError, NumericalError

__all__ = ["Sense", "LpProblem", "solve_lp"]

_RC_TOL = 1e-9       # reduced-cost tolerance (entering test)
_PIV_TOL = 1e-11     # minimum pivot magnitude in the ratio test
_FEAS_TOL = 1e-9     # phase-1 objective threshold for feasibility
_MAX_ITERS = 100_000


class Sense(enum.Enum):
    MAX = "max"
    MIN = "min"


@dataclass(frozen=True)
class LpProblem:
    objective: np.ndarray
    constraint_matrix: np.ndarray
    normalizer: np.ndarray = None
    sense: Sense = Sense.MAX

    def __post_init__(self):
        a = np.asarray(self.objective, dtype=float).ravel()
        b = np.asarray(self.constraint_matrix, dtype=float)
        if b.ndim != 2 or b.shape[1] != a.size:
            raise ValueError("constraint matrix shape inconsistent with objective")
        if b.shape[0] < 1 or a.size < 1:
            raise ValueError("need at least one constraint row and one variable")
        s = self.normalizer
        s = b.T @ np.ones(b.shape[0]) if s is None else np.asarray(s, dtype=float).ravel()
        if s.size != a.size:
            raise ValueError("normalizer length inconsistent with objective")
        object.__setattr__(self, "objective", a)
        object.__setattr__(self, "constraint_matrix", b)
        object.__setattr__(self, "normalizer", s)


def _bland_iterate(a_mat, c, b_rhs, basis, n_allowed):
    """Run Bland's-rule simplex iterations to optimality from a feasible
    basis of the standard-form problem min c'y, A y = b, y >= 0.

    Only columns with index < ``n_allowed`` may enter (this bars phase-1
    artificials during phase 2).  Returns ('optimal', multipliers) or
    ('unbounded', None).  ``basis`` is updated in place."""
    m = a_mat.shape[0]
    for _ in range(_MAX_ITERS):
        lu = lu_factor(a_mat[:, basis])
        x_b = lu_solve(lu, b_rhs)
        np.maximum(x_b, 0.0, out=x_b)  # scrub roundoff from degenerate pivots
        pi = lu_solve(lu, c[basis], trans=1)
        reduced = c[:n_allowed] - pi @ a_mat[:, :n_allowed]
        reduced[np.asarray(basis)[np.asarray(basis) < n_allowed]] = 0.0
        candidates = np.flatnonzero(reduced < -_RC_TOL)
        if candidates.size == 0:
            return "optimal", pi
        enter = int(candidates[0])  # Bland: smallest eligible index
        d = lu_solve(lu, a_mat[:, enter])
        pos = np.flatnonzero(d > _PIV_TOL)
        if pos.size == 0:
            return "unbounded", None
        ratios = x_b[pos] / d[pos]
        theta = ratios.min()
        # Bland: among rows attaining the minimum ratio, leave the one
        # whose basic variable has the smallest index.
        tied = pos[ratios <= theta * (1 + 1e-12) + 1e-300]
        leave_pos = min(tied, key=lambda i: basis[i])
        basis[leave_pos] = enter
    raise NumericalError("simplex iteration limit exceeded")


def _two_phase(a_mat, b_rhs, c):
    """Two-phase revised simplex for min c'y, A y = b, y >= 0.

    Returns ('optimal', pi) with pi the optimality multipliers for the
    full row set, ('infeasible', None), or ('unbounded', None)."""
    m, n = a_mat.shape
    sign = np.where(b_rhs < 0, -1.0, 1.0)
    a1 = a_mat * sign[:, None]
    b1 = b_rhs * sign
    ext = np.hstack([a1, np.eye(m)])
    c1 = np.concatenate([np.zeros(n), np.ones(m)])
    basis = list(range(n, n + m))
    status, _ = _bland_iterate(ext, c1, b1, basis, n + m)
    if status != "optimal":  # phase 1 is bounded below by zero
        raise NumericalError("phase-1 simplex failed to terminate optimally")
    lu = lu_factor(ext[:, basis])
    x_b = lu_solve(lu, b1)
    phase1_obj = float(x_b[[j >= n for j in basis]].sum()) if any(
        j >= n for j in basis
    ) else 0.0
    scale = 1.0 + float(np.abs(b_rhs).max())
    if phase1_obj > _FEAS_TOL * scale:
        return "infeasible", None
    # Drive any artificial still basic (at zero) out of the basis; rows
    # where no real column can pivot are redundant and get dropped.
    keep_rows = np.ones(m, dtype=bool)
    for pos in range(m):
        if basis[pos] < n:
            continue
        lu = lu_factor(ext[:, basis])
        tableau_row = lu_solve(lu, np.eye(m)[:, pos], trans=1) @ a1[:, :n]
        pivots = np.flatnonzero(np.abs(tableau_row) > 1e-9)
        pivots = [j for j in pivots if j not in basis]
        if pivots:
            basis[pos] = int(pivots[0])
        else:
            keep_rows[basis[pos] - n] = False
    if not keep_rows.all():
        rows = np.flatnonzero(keep_rows)
        sub = a1[rows, :]
        basis = [j for j in basis if j < n]
        if len(basis) != rows.size:
            raise NumericalError("inconsistent basis after redundant-row removal")
        status, pi_sub = _bland_iterate(sub, c, b1[rows], basis, n)
        if status != "optimal":
            return status, None
        pi = np.zeros(m)
        pi[rows] = pi_sub
    else:
        status, pi = _bland_iterate(a1, c, b1, basis, n)
        if status != "optimal":
            return status, None
    return "optimal", pi * sign


def solve_lp(prob):
    """Solve the F-variable LP; returns (x, objective value).

    Raises :class:`LpInfeasibleError` when the polytope is empty and
    :class:`LpUnboundedError` when the objective is unbounded over it."""
    a = prob.objective if prob.sense == Sense.MAX else -prob.objective
    b_mat = prob.constraint_matrix
    s = prob.normalizer
    # Row-normalizing the inequality constraints leaves the primal
    # feasible set unchanged and conditions the dual columns.
    norms = np.linalg.norm(b_mat, axis=1)
    rows = norms > 0
    b_scaled = b_mat[rows] / norms[rows, None]
    if b_scaled.shape[0] == 0:
        b_scaled = np.zeros((1, a.size))
    n_rows = b_scaled.shape[0]
    # Dual of (max a'x : Bx >= 0, s'x = 1):
    #   min nu  s.t.  B'y - s nu = -a,  y >= 0,  nu free (split).
    a_mat = np.hstack([b_scaled.T, -s[:, None], s[:, None]])
    c = np.zeros(n_rows + 2)
    c[n_rows] = 1.0
    c[n_rows + 1] = -1.0
    status, pi = _two_phase(a_mat, -a, c)
    if status == "optimal":
        x = -pi
        value = float(prob.objective @ x)
        return x, value
    if status == "unbounded":
        # dual unbounded below => primal infeasible
        raise LpInfeasibleError("feasible region {Bx >= 0, s'x = 1} is empty")
    # Dual infeasible: the primal is unbounded or infeasible; probe with a
    # zero objective, whose dual is always feasible at the origin.
    status0, _ = _two_phase(a_mat, np.zeros(a.size), c)
    if status0 == "optimal":
        raise LpUnboundedError("objective unbounded over the feasible cone")
    raise LpInfeasibleError("feasible region {Bx >= 0, s'x = 1} is empty")
