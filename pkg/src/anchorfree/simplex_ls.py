"""Simplex-constrained least squares via accelerated projected gradient.

Solves, for one or many right-hand sides,

    min_w ||b - A w||_2^2   subject to   w >= 0,  1'w = 1,

using FISTA with the sort-based Euclidean projection onto the unit
simplex.  Columns of a multi-RHS problem are independent and iterated
jointly in vectorized form."""

from __future__ import annotations

import numpy as np

__all__ = ["project_simplex", "project_simplex_columns", "simplex_lstsq"]


def project_simplex(y):
    """Euclidean projection of a vector onto {w >= 0, sum w = 1}."""
    return project_simplex_columns(np.asarray(y, dtype=float)[:, None])[:, 0]


def project_simplex_columns(y):
    """Column-wise simplex projection of a k x n matrix."""
    y = np.asarray(y, dtype=float)
    k = y.shape[0]
    u = -np.sort(-y, axis=0)                      # descending per column
    css = np.cumsum(u, axis=0) - 1.0
    idx = np.arange(1, k + 1)[:, None]
    cond = u - css / idx > 0
    rho = k - np.argmax(cond[::-1, :], axis=0) - 1  # last True per column
    theta = css[rho, np.arange(y.shape[1])] / (rho + 1.0)
    return np.maximum(y - theta[None, :], 0.0)


def simplex_lstsq(a, b, tol=1e-8, max_iter=1000):
    """Accelerated projected gradient for simplex-constrained LS.

    ``b`` may be a vector or a matrix of column right-hand sides; the
    return value matches its shape with F-dimensional solutions."""
    a = np.asarray(a, dtype=float)
    single = np.ndim(b) == 1
    rhs = np.asarray(b, dtype=float)
    if single:
        rhs = rhs[:, None]
    f = a.shape[1]
    n = rhs.shape[1]
    gram = a.T @ a
    atb = a.T @ rhs
    lip = float(np.linalg.eigvalsh(gram).max())
    if lip <= 0:
        out = np.full((f, n), 1.0 / f)
        return out[:, 0] if single else out
    step = 1.0 / lip
    x = np.full((f, n), 1.0 / f)
    z = x.copy()
    t = 1.0
    for _ in range(max_iter):
        grad = gram @ z - atb
        x_new = project_simplex_columns(z - step * grad)
        t_new = 0.5 * (1.0 + np.sqrt(1.0 + 4.0 * t * t))
        z = x_new + ((t - 1.0) / t_new) * (x_new - x)
        delta = np.abs(x_new - x).max()
        x, t = x_new, t_new
        if delta <= tol:
            break
    return x[:, 0] if single else x
