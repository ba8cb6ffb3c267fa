"""Simplex projection and constrained least squares."""

import itertools

import numpy as np
import pytest

from anchorfree.simplex_ls import project_simplex, project_simplex_columns, simplex_lstsq


def ls_oracle(a, b):
    """Active-set enumeration oracle for min ||b - Aw||, w on the simplex:
    try every support set, solve the equality-constrained problem, keep
    the feasible candidate with smallest residual."""
    f = a.shape[1]
    best = None
    best_w = None
    for r in range(1, f + 1):
        for support in itertools.combinations(range(f), r):
            sub = a[:, support]
            # minimize ||b - sub u|| s.t. 1'u = 1 via KKT
            gram = sub.T @ sub
            kkt = np.zeros((r + 1, r + 1))
            kkt[:r, :r] = gram
            kkt[:r, r] = 1.0
            kkt[r, :r] = 1.0
            rhs = np.concatenate([sub.T @ b, [1.0]])
            try:
                sol = np.linalg.solve(kkt, rhs)
            except np.linalg.LinAlgError:
                continue
            u = sol[:r]
            if u.min() < -1e-10:
                continue
            w = np.zeros(f)
            w[list(support)] = u
            res = float(((b - a @ w) ** 2).sum())
            if best is None or res < best - 1e-12:
                best, best_w = res, w
    return best_w, best


class TestProjection:
    def test_already_on_simplex(self):
        y = np.array([0.2, 0.3, 0.5])
        assert np.allclose(project_simplex(y), y)

    def test_single_coordinate(self):
        assert np.allclose(project_simplex(np.array([5.0, -2.0])), [1.0, 0.0])

    def test_uniform_from_constant(self):
        assert np.allclose(project_simplex(np.zeros(4)), 0.25)

    @pytest.mark.parametrize("seed", range(20))
    def test_is_nearest_simplex_point(self, seed):
        rng = np.random.default_rng(seed)
        y = rng.standard_normal(5)
        p = project_simplex(y)
        assert p.min() >= 0
        assert p.sum() == pytest.approx(1.0, abs=1e-12)
        # no random simplex point may be closer
        for _ in range(200):
            q = rng.dirichlet(np.ones(5))
            assert ((y - p) ** 2).sum() <= ((y - q) ** 2).sum() + 1e-9

    def test_columns_match_single(self):
        rng = np.random.default_rng(9)
        y = rng.standard_normal((6, 8))
        cols = project_simplex_columns(y)
        for j in range(8):
            assert np.allclose(cols[:, j], project_simplex(y[:, j]))


class TestSimplexLstsq:
    def test_exact_column_recovery(self):
        rng = np.random.default_rng(1)
        a = rng.random((20, 4))
        w = simplex_lstsq(a, a[:, 2])
        assert np.allclose(w, [0, 0, 1, 0], atol=1e-6)

    def test_exact_mixture_recovery(self):
        rng = np.random.default_rng(2)
        a = rng.random((30, 3)) + 0.1
        target = 0.5 * a[:, 0] + 0.5 * a[:, 1]
        w = simplex_lstsq(a, target)
        assert np.allclose(w, [0.5, 0.5, 0.0], atol=1e-6)

    @pytest.mark.parametrize("seed", range(15))
    def test_matches_active_set_oracle(self, seed):
        rng = np.random.default_rng(30 + seed)
        a = rng.standard_normal((12, 3))
        b = rng.standard_normal(12)
        w = simplex_lstsq(a, b, tol=1e-12, max_iter=5000)
        _, expected = ls_oracle(a, b)
        got = float(((b - a @ w) ** 2).sum())
        assert got == pytest.approx(expected, rel=1e-6, abs=1e-8)

    def test_multi_rhs_matches_loop(self):
        rng = np.random.default_rng(4)
        a = rng.random((15, 4))
        rhs = rng.random((15, 6))
        batch = simplex_lstsq(a, rhs, tol=1e-12, max_iter=5000)
        for j in range(6):
            single = simplex_lstsq(a, rhs[:, j], tol=1e-12, max_iter=5000)
            assert np.allclose(batch[:, j], single, atol=1e-7)
