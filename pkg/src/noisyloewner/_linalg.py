"""Dense linear-algebra helpers shared by the model classes."""

import warnings

import numpy as np
import scipy.linalg as spla

from .errors import SingularPencil

RANK_TOL = 1e-12
# pivots below this fraction of the largest pivot are treated as exact zeros
_PIVOT_GUARD = np.finfo(float).tiny


def frozen(a, dtype=None):
    """Return a read-only copy of `a`."""
    out = np.array(a, dtype=dtype, copy=True)
    out.setflags(write=False)
    return out


def lu_solve_checked(M, b):
    """Solve ``M x = b`` by partial-pivoted LU, raising on singular `M`."""
    with warnings.catch_warnings():
        warnings.simplefilter('ignore', spla.LinAlgWarning)
        lu, piv = spla.lu_factor(M, check_finite=False)
    _check_pivots(np.abs(np.diag(lu)))
    return spla.lu_solve((lu, piv), b, check_finite=False)


def _check_pivots(pivots):
    top = pivots.max() if pivots.size else 0.0
    if not np.all(np.isfinite(pivots)) or top == 0.0 or pivots.min() <= _PIVOT_GUARD * top:
        raise SingularPencil('matrix s*E - A is singular to working precision')


def hessenberg_solve_checked(M, b):
    """Solve ``M x = b`` for upper Hessenberg `M` by partial-pivoted LU.

    Each elimination step touches one subdiagonal entry, so the cost is
    ``O(n^2)`` instead of ``O(n^3)``. Inputs are not modified.
    """
    U = np.array(M, dtype=complex)
    y = np.array(b, dtype=complex)
    n = U.shape[0]
    for k in range(n - 1):
        if abs(U[k + 1, k]) > abs(U[k, k]):
            U[[k, k + 1], k:] = U[[k + 1, k], k:]
            y[[k, k + 1]] = y[[k + 1, k]]
        if U[k, k] != 0:
            factor = U[k + 1, k] / U[k, k]
            U[k + 1, k:] -= factor * U[k, k:]
            y[k + 1] -= factor * y[k]
    _check_pivots(np.abs(np.diagonal(U)))
    return spla.solve_triangular(U, y, check_finite=False)


def batched_solve(M, b):
    """Solve a stack of systems ``M[k] x[k] = b[k]``.

    Returns the solutions and a boolean mask of the systems that could not
    be solved (their rows in the output are NaN).
    """
    M = np.asarray(M)
    b = np.asarray(b)
    try:
        x = np.linalg.solve(M, b[..., None])[..., 0]
        bad = ~np.all(np.isfinite(x), axis=-1)
    except np.linalg.LinAlgError:
        x = np.full(b.shape, np.nan, dtype=np.result_type(M, b))
        bad = np.zeros(M.shape[0], dtype=bool)
        for k in range(M.shape[0]):
            try:
                x[k] = lu_solve_checked(M[k], b[k])
            except SingularPencil:
                bad[k] = True
        bad |= ~np.all(np.isfinite(x), axis=-1)
    x[bad] = np.nan
    return x, bad


def full_rank(M, tol=RANK_TOL):
    M = np.asarray(M)
    if M.size and not np.any(M - np.diag(np.diagonal(M))):
        sv = np.sort(np.abs(np.diagonal(M)))[::-1]
    else:
        sv = np.linalg.svd(M, compute_uv=False)
    return sv.size > 0 and sv[-1] > tol * sv[0]
