"""Eigendecomposition, determinant, and cofactor kernels."""

import itertools

import numpy as np
import pytest

from anchorfree.errors import AnchorfreeWarning, NotPsdError
from anchorfree.linalg import cofactor_vector, determinant, sqrt_factor


def det_by_permutation_expansion(m):
    """Independent oracle: sum over permutations of signed products."""
    m = np.asarray(m, dtype=float)
    n = m.shape[0]
    total = 0.0
    for perm in itertools.permutations(range(n)):
        sign = 1.0
        seen = list(perm)
        # parity via counting inversions
        inv = sum(
            1 for i in range(n) for j in range(i + 1, n) if seen[i] > seen[j]
        )
        sign = -1.0 if inv % 2 else 1.0
        prod = 1.0
        for i in range(n):
            prod *= m[i, perm[i]]
        total += sign * prod
    return total


class TestSqrtFactor:
    def test_diagonal_case(self):
        sf = sqrt_factor(np.diag([4.0, 1.0]), 2)
        assert np.allclose(np.abs(sf.b), [[2.0, 0.0], [0.0, 1.0]])
        assert sf.residual < 1e-14
        assert np.allclose(sf.eigenvalues, [4.0, 1.0])

    def test_rank_one_case(self):
        sf = sqrt_factor(np.ones((2, 2)), 1)
        assert np.allclose(np.abs(sf.b[:, 0]), [1.0, 1.0])
        assert np.allclose(sf.eigenvalues, [2.0])

    def test_exact_rank_reconstruction(self):
        rng = np.random.default_rng(0)
        g = rng.standard_normal((40, 6))
        p = g @ g.T
        sf = sqrt_factor(p, 6)
        assert sf.residual <= 1e-8
        assert np.allclose(sf.b @ sf.b.T, p, atol=1e-8)

    def test_columns_orthogonal(self):
        rng = np.random.default_rng(1)
        g = rng.standard_normal((60, 5))
        sf = sqrt_factor(g @ g.T, 5)
        btb = sf.b.T @ sf.b
        off = btb - np.diag(np.diag(btb))
        assert np.abs(off).max() <= 1e-8 * np.abs(np.diag(btb)).max()

    def test_residual_field_bounds_truth(self):
        rng = np.random.default_rng(2)
        g = rng.standard_normal((30, 8))
        p = g @ g.T
        sf = sqrt_factor(p, 4)  # truncated: nonzero residual
        true_res = np.linalg.norm(sf.b @ sf.b.T - p) / np.linalg.norm(p)
        assert true_res <= sf.residual + 1e-12
        assert sf.residual > 1e-3

    def test_eigenvalues_sorted_nonnegative(self):
        rng = np.random.default_rng(3)
        g = rng.standard_normal((50, 7))
        sf = sqrt_factor(g @ g.T, 7)
        assert (np.diff(sf.eigenvalues) <= 1e-12).all()
        assert (sf.eigenvalues >= 0).all()

    def test_far_from_psd_rejected(self):
        with pytest.raises(NotPsdError):
            sqrt_factor(np.diag([1.0, -1.0, -2.0, -3.0]), 4)

    def test_small_negative_clamped_with_warning(self):
        p = np.diag([1.0, 0.5, -1e-4])
        with pytest.warns(AnchorfreeWarning):
            sf = sqrt_factor(p, 3, tol=1e-8)
        assert sf.eigenvalues[-1] == 0.0

    def test_deterministic_for_fixed_seed(self):
        rng = np.random.default_rng(4)
        g = rng.standard_normal((80, 4))
        p = g @ g.T
        a = sqrt_factor(p, 3, seed=11)
        b = sqrt_factor(p, 3, seed=11)
        assert np.array_equal(a.b, b.b)


class TestDeterminant:
    def test_identity(self):
        assert determinant(np.eye(3)) == 1.0

    def test_two_by_two(self):
        assert determinant(np.array([[1.0, 2.0], [3.0, 4.0]])) == pytest.approx(-2.0)

    def test_duplicated_columns_singular(self):
        m = np.array([[1.0, 1.0, 2.0], [3.0, 3.0, 4.0], [5.0, 5.0, 6.0]])
        assert abs(determinant(m)) <= 1e-12

    @pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
    def test_matches_permutation_expansion(self, n):
        rng = np.random.default_rng(n)
        for _ in range(40):
            m = rng.standard_normal((n, n))
            expected = det_by_permutation_expansion(m)
            assert determinant(m) == pytest.approx(
                expected, rel=1e-10, abs=1e-12
            )


class TestCofactorVector:
    def test_identity_first_column(self):
        assert np.allclose(cofactor_vector(np.eye(2), 0), [1.0, 0.0])

    def test_two_by_two_columns(self):
        m = np.array([[1.0, 2.0], [3.0, 4.0]])
        a0 = cofactor_vector(m, 0)
        assert np.allclose(a0, [4.0, -2.0])
        assert a0 @ m[:, 0] == pytest.approx(determinant(m))
        a1 = cofactor_vector(m, 1)
        assert np.allclose(a1, [-3.0, 1.0])
        assert a1 @ m[:, 1] == pytest.approx(determinant(m))

    @pytest.mark.parametrize("n", [1, 2, 3, 5, 8])
    def test_expansion_identity_random(self, n):
        rng = np.random.default_rng(100 + n)
        for _ in range(50):
            m = rng.standard_normal((n, n))
            det = determinant(m)
            for col in range(n):
                a = cofactor_vector(m, col)
                assert a @ m[:, col] == pytest.approx(
                    det, rel=1e-10, abs=1e-12
                )
