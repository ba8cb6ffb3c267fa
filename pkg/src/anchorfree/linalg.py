"""Dense/sparse numeric kernels: truncated symmetric eigendecomposition,
determinants, and cofactor expansion vectors."""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla
from scipy.linalg import LinAlgWarning, eigh, lu_factor

from .errors import AnchorfreeWarning, EigenConvergenceError, NotPsdError

__all__ = ["SqrtFactor", "sqrt_factor", "top_eigenpairs", "determinant", "cofactor_vector"]

# Negative eigenvalues above -NEG_EIG_TOL * lambda_max are treated as
# sampling/roundoff noise and clamped to zero.
NEG_EIG_TOL = 1e-8


@dataclass(frozen=True)
class SqrtFactor:
    """B with B B' ~= P, built from the top-F eigenpairs of P.

    Columns of ``b`` are orthogonal (b'b is diagonal); ``eigenvalues`` are
    sorted descending and nonnegative after clamping; ``residual`` is the
    relative Frobenius reconstruction error."""

    b: np.ndarray
    eigenvalues: np.ndarray
    residual: float


def _as_array_or_sparse(p):
    if hasattr(p, "storage"):
        return p.storage
    return p


def top_eigenpairs(p, k, seed=0, maxiter=None):
    """Top-k eigenpairs (descending) of a symmetric matrix via ARPACK's
    implicitly restarted Lanczos iteration with a seeded start vector.

    Falls back to a full dense decomposition when k is too close to the
    dimension for the iterative method."""
    mat = _as_array_or_sparse(p)
    v = mat.shape[0]
    if k > v:
        raise ValueError(f"requested {k} eigenpairs of a {v} x {v} matrix")
    if k >= v - 1 or v <= 16:
        dense = mat.toarray() if sp.issparse(mat) else np.asarray(mat, dtype=float)
        vals, vecs = eigh(dense)
        order = np.argsort(vals)[::-1][:k]
        return vals[order].copy(), vecs[:, order].copy()
    v0 = np.random.default_rng(seed).standard_normal(v)
    try:
        vals, vecs = spla.eigsh(mat, k=k, which="LA", v0=v0, maxiter=maxiter)
    except spla.ArpackNoConvergence as exc:
        raise EigenConvergenceError(
            f"eigensolver converged only {len(exc.eigenvalues)}/{k} eigenpairs",
            eigenvalues=exc.eigenvalues,
            eigenvectors=exc.eigenvectors,
        ) from exc
    order = np.argsort(vals)[::-1]
    return vals[order].copy(), vecs[:, order].copy()


def sqrt_factor(p, f, tol=NEG_EIG_TOL, seed=0, _eigpairs=None):
    """Square-root factor B = U diag(sqrt(lambda)) of a symmetric PSD-ish
    matrix from its top-f eigenpairs.

    Small negative eigenvalues (above -tol * lambda_max) are clamped to
    zero; if more than f/2 of the top-f eigenvalues are negative beyond
    tolerance the input is rejected as far from PSD.  Deterministic for a
    fixed seed of the Lanczos start vector."""
    mat = _as_array_or_sparse(p)
    if _eigpairs is not None:
        vals, vecs = _eigpairs
        vals, vecs = vals[:f], vecs[:, :f]
    else:
        vals, vecs = top_eigenpairs(p, f, seed=seed)
    lam_max = max(vals.max(initial=0.0), 0.0)
    floor = -tol * lam_max if lam_max > 0 else -tol
    bad = vals < floor
    if bad.sum() > f / 2:
        raise NotPsdError(
            f"{int(bad.sum())} of the top {f} eigenvalues are negative beyond "
            "tolerance: input far from PSD"
        )
    if bad.any():
        warnings.warn(
            f"clamping {int(bad.sum())} negative eigenvalue(s); worst "
            f"{vals.min():.3e}",
            AnchorfreeWarning,
            stacklevel=2,
        )
    vals = np.maximum(vals, 0.0)
    b = vecs * np.sqrt(vals)[None, :]
    # ||BB' - P||_F accumulated over column blocks: entrywise subtraction
    # stays accurate at machine precision (a trace identity cancels
    # catastrophically near exact rank) without a full V x V scratch.
    v = mat.shape[0]
    arr = None if sp.issparse(mat) else np.asarray(mat, dtype=float)
    if sp.issparse(mat):
        p_norm2 = float((mat.multiply(mat)).sum())
    else:
        p_norm2 = float((arr * arr).sum())
    block = max(1, min(v, 4_000_000 // max(v, 1)))  # ~32 MB scratch cap
    res2 = 0.0
    for start in range(0, v, block):
        cols = slice(start, min(start + block, v))
        chunk = mat[:, cols].toarray() if arr is None else arr[:, cols]
        diff = chunk - b @ b[cols, :].T
        res2 += float((diff * diff).sum())
    residual = np.sqrt(res2) / np.sqrt(p_norm2) if p_norm2 > 0 else 0.0
    return SqrtFactor(b=b, eigenvalues=vals, residual=float(residual))


def determinant(m):
    """Determinant via LU with partial pivoting (singular inputs give 0.0)."""
    m = np.asarray(m, dtype=float)
    n = m.shape[0]
    if m.shape != (n, n):
        raise ValueError("determinant requires a square matrix")
    if n == 0:
        return 1.0
    with warnings.catch_warnings():
        # singular input is a legitimate det = 0 case, not a failure
        warnings.simplefilter("ignore", LinAlgWarning)
        lu, piv = lu_factor(m, check_finite=True)
    sign = 1.0 if (piv != np.arange(n)).sum() % 2 == 0 else -1.0
    diag = np.diag(lu)
    return float(sign * np.prod(diag))


def cofactor_vector(m, col):
    """Vector a with a' m[:, col] == det(m), from the cofactor expansion
    along column ``col`` (0-based): a_k = (-1)**(col + k) * det(minor_k)."""
    m = np.asarray(m, dtype=float)
    n = m.shape[0]
    if not 0 <= col < n:
        raise ValueError(f"column index {col} out of range for {n} x {n} matrix")
    if n == 1:
        return np.ones(1)
    a = np.empty(n)
    reduced = np.delete(m, col, axis=1)
    for k in range(n):
        minor = np.delete(reduced, k, axis=0)
        a[k] = (-1.0) ** (col + k) * determinant(minor)
    return a
