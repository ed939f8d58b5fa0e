"""Full-order linear time-invariant systems and their transfer functions."""

from dataclasses import dataclass
from functools import cached_property
from pathlib import Path

import numpy as np
import scipy.io
import scipy.linalg as spla

from ._linalg import RANK_TOL, frozen, full_rank, hessenberg_solve_checked, lu_solve_checked
from .errors import DimensionMismatch, InfinitePole, NonSimplePoles, ParseError, RankDeficientE

POLE_SEP_TOL = 1e-8


@dataclass(frozen=True, eq=False)
class StateSpaceSystem:
    """SISO descriptor system ``E x' = A x + B u``, ``y = C x`` with real matrices.

    `B` and `C` are stored as 1-D arrays of length `order`; `E` must be
    nonsingular.
    """

    E: np.ndarray
    A: np.ndarray
    B: np.ndarray
    C: np.ndarray

    def __post_init__(self):
        E = np.atleast_2d(np.asarray(self.E, dtype=float))
        A = np.atleast_2d(np.asarray(self.A, dtype=float))
        B = np.asarray(self.B, dtype=float).reshape(-1)
        C = np.asarray(self.C, dtype=float).reshape(-1)
        n = A.shape[0]
        if A.shape != (n, n) or E.shape != (n, n):
            raise DimensionMismatch(f'E {E.shape} and A {A.shape} must be square of equal order')
        if B.shape != (n,) or C.shape != (n,):
            raise DimensionMismatch(f'B {B.shape} and C {C.shape} do not conform with order {n}')
        if not full_rank(E, RANK_TOL):
            raise RankDeficientE('E is singular to the rank tolerance')
        for name, value in zip('EABC', (E, A, B, C)):
            object.__setattr__(self, name, frozen(value))

    @property
    def order(self):
        return self.A.shape[0]

    @cached_property
    def _hessenberg(self):
        # A = Q Hs Q^T for standard systems; None when E is not the identity
        if not np.array_equal(self.E, np.eye(self.order)):
            return None
        Hs, Q = spla.hessenberg(self.A, calc_q=True)
        return Hs, Q.T @ self.B, self.C @ Q


def transfer_function(sys, s):
    """Evaluate ``H(s) = C (sE - A)^{-1} B`` with one partial-pivoted LU solve.

    When ``E = I`` the solve runs on the orthogonally equivalent Hessenberg
    pencil ``sI - Q^T A Q`` (reduction computed once per system), which costs
    ``O(n^2)`` per point instead of ``O(n^3)``.
    """
    s = complex(s)
    reduced = sys._hessenberg
    if reduced is None:
        x = lu_solve_checked(s * sys.E - sys.A, sys.B.astype(complex))
        return complex(sys.C @ x)
    Hs, b, c = reduced
    M = -Hs.astype(complex)
    M[np.diag_indices_from(M)] += s
    return complex(c @ hessenberg_solve_checked(M, b))


def make_penzl():
    """Order-1006 Penzl benchmark (three lightly damped spirals plus 1000 real modes)."""
    n = 1006
    A = np.zeros((n, n))
    for k, w in enumerate((100.0, 200.0, 400.0)):
        A[2 * k:2 * k + 2, 2 * k:2 * k + 2] = [[-1.0, w], [-w, -1.0]]
    A[6:, 6:] = np.diag(-np.arange(1.0, 1001.0))
    B = np.ones(n)
    B[:6] = 10.0
    return StateSpaceSystem(np.eye(n), A, B, B.copy())


def _read_mtx(path):
    try:
        M = scipy.io.mmread(str(path))
    except FileNotFoundError:
        raise ParseError(f'missing required file {path}') from None
    except Exception as exc:
        raise ParseError(f'cannot parse {path}: {exc}') from exc
    if hasattr(M, 'toarray'):
        M = M.toarray()
    M = np.atleast_2d(np.asarray(M))
    if np.iscomplexobj(M):
        raise ParseError(f'{path} holds complex data; only real matrices are supported')
    return M.astype(float)


def load_system(path, input_index=1, output_index=1):
    """Assemble a SISO system from ``{E,A,B,C}.mtx`` MatrixMarket files.

    Parameters
    ----------
    path
        Directory holding the files. ``E.mtx`` may be omitted, which means
        ``E = I``.
    input_index, output_index
        1-based column of `B` and row of `C` to keep when the stored system
        has several inputs or outputs.
    """
    path = Path(path)
    if not path.is_dir():
        raise ParseError(f'{path} is not a directory')
    A = _read_mtx(path / 'A.mtx')
    B = _read_mtx(path / 'B.mtx')
    C = _read_mtx(path / 'C.mtx')
    E = _read_mtx(path / 'E.mtx') if (path / 'E.mtx').exists() else np.eye(A.shape[0])
    n = A.shape[0]
    if A.shape != (n, n):
        raise DimensionMismatch(f'A must be square, got {A.shape}')
    if B.shape[0] != n and B.shape[1] == n:
        B = B.T
    if C.shape[1] != n and C.shape[0] == n:
        C = C.T
    if B.shape[0] != n or C.shape[1] != n:
        raise DimensionMismatch(f'B {B.shape} / C {C.shape} do not conform with A {A.shape}')
    if not 1 <= input_index <= B.shape[1]:
        raise DimensionMismatch(f'input index {input_index} out of range 1..{B.shape[1]}')
    if not 1 <= output_index <= C.shape[0]:
        raise DimensionMismatch(f'output index {output_index} out of range 1..{C.shape[0]}')
    return StateSpaceSystem(E, A, B[:, input_index - 1], C[output_index - 1, :])


def pencil_of(model):
    """Return ``(E, A, B, C)`` for a full-order system or a Loewner model."""
    if isinstance(model, StateSpaceSystem):
        return model.E, model.A, model.B, model.C
    return model.E_hat, model.A_hat, model.B_hat, model.C_hat


def poles_residues(model):
    """Poles and residues of the transfer function of `model`.

    Works for :class:`StateSpaceSystem` and :class:`~noisyloewner.loewner.LoewnerModel`.
    The residue at a simple pole ``lam`` with right/left eigenvectors ``w``,
    ``v`` of the pencil is ``(C w)(v^H B) / (v^H E w)``.

    Returns
    -------
    poles, residues
        Complex arrays of equal length, so that
        ``H(s) = sum(residues / (s - poles))``.
    """
    E, A, B, C = pencil_of(model)
    if not full_rank(E, RANK_TOL):
        raise InfinitePole('E is singular to the rank tolerance; the pencil has infinite eigenvalues')
    lam, vl, vr = spla.eig(A, E, left=True, right=True)
    if not np.all(np.isfinite(lam)):
        raise InfinitePole('pencil has infinite eigenvalues')
    if lam.size > 1:
        gaps = np.abs(lam[:, None] - lam[None, :])
        gaps[np.diag_indices_from(gaps)] = np.inf
        if gaps.min() <= POLE_SEP_TOL * np.abs(lam).max():
            raise NonSimplePoles(f'poles closer than {POLE_SEP_TOL:g} relative; min gap {gaps.min():.3e}')
    num = (C @ vr) * (vl.conj().T @ B)
    den = np.einsum('ki,kl,li->i', vl.conj(), E, vr)
    if np.any(den == 0):
        raise NonSimplePoles('left and right eigenvectors are E-orthogonal (defective pole)')
    return lam, num / den


__all__ = ['StateSpaceSystem', 'transfer_function', 'make_penzl', 'load_system', 'poles_residues',
           'pencil_of']
