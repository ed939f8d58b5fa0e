"""Perturbation bounds for Loewner models learned from noisy data.

All quantities are pointwise in the evaluation point ``s``. With
``G = s E_hat - A_hat`` and ``v = G^{-1} B_hat`` the main objects are

* ``sigma_max = 1 / (kappa_2(G) * zeta_hat)``, the largest noise level for
  which the bounds are guaranteed, and
* ``bound_abs = sigma * (c1 zeta_hat / (1 - sigma zeta_hat kappa_2)
  + c2 (1 + 4 sqrt(r) sigma) / (1 - nu sigma))``, which holds with probability at
  least ``1 - 4 exp(-r/2)`` whenever ``0 < sigma < sigma_max``.
"""

import csv
import math
import warnings
from dataclasses import dataclass, fields

import numpy as np

from ._linalg import lu_solve_checked
from .errors import (ConditionViolated, NonFiniteEntry, OrderMismatch, OrthogonalAngle, SingularPencil,
                     UnstableModel, ZeroOfTransferFunction)
from .loewner import FLOOR_ABS
from .noise import noise_weights, structure_matrices
from .systems import pencil_of, poles_residues

H2_CONSISTENCY_TOL = 1e-6


def spectral_norm(M):
    """Largest singular value of `M` (Euclidean norm for vectors)."""
    M = np.asarray(M)
    if not np.all(np.isfinite(M)):
        raise NonFiniteEntry('matrix has non-finite entries')
    if M.ndim < 2:
        return float(np.linalg.norm(M))
    if M.size == 0:
        return 0.0
    return float(np.linalg.svd(M, compute_uv=False)[0])


def _singular_values(model, s):
    G = model.pencil(s)
    if not np.all(np.isfinite(G)):
        raise NonFiniteEntry('pencil has non-finite entries')
    sv = np.linalg.svd(G, compute_uv=False)
    if sv[0] == 0.0 or sv[-1] <= np.finfo(float).tiny * sv[0]:
        raise SingularPencil(f's = {s} is a pole of the model')
    return G, sv


def condition_number(model, s):
    """``kappa_2(s E_hat - A_hat)``, the ratio of extreme singular values."""
    _, sv = _singular_values(model, s)
    return float(sv[0] / sv[-1])


@dataclass(frozen=True)
class _Constants:
    s: complex
    r: int
    kappa2: float
    norm_pencil: float
    norm_inv: float
    norm_FE: float
    norm_FA: float
    norm_B: float
    norm_C: float
    norm_v: float
    w_mu_inf: float
    w_gamma_inf: float
    cos_angle: float
    h_value: complex
    mode: str

    @property
    def four_root_r(self):
        return 4.0 * math.sqrt(self.r)

    @property
    def zeta_hat(self):
        F = self.norm_FE + self.norm_FA
        return max(self.four_root_r * F / self.norm_pencil, self.four_root_r * self.w_mu_inf / self.norm_B)

    @property
    def sigma_max(self):
        return 1.0 / (self.kappa2 * self.zeta_hat)

    @property
    def nu(self):
        return self.four_root_r * (self.norm_FE + self.norm_FA) * self.norm_inv

    @property
    def c1(self):
        return 2.0 * self.norm_C * self.norm_v * self.kappa2

    @property
    def c2(self):
        return self.four_root_r * self.w_gamma_inf * self.norm_B * self.norm_inv

    def b_growth(self, sigma):
        # bound on ||B + sigma dB|| / ||B||
        if self.mode == 'relative':
            return 1.0 + self.four_root_r * sigma
        return 1.0 + self.four_root_r * sigma * self.w_mu_inf / self.norm_B


def _constants(model, data, s, mode='relative'):
    s = complex(s)
    G, sv = _singular_values(model, s)
    F_E, F_A = structure_matrices(data, s, mode)
    w_mu, w_gamma = noise_weights(data, mode)
    v = lu_solve_checked(G, model.B_hat)
    norm_C = spectral_norm(model.C_hat)
    norm_v = spectral_norm(v)
    h = complex(model.C_hat @ v)
    denom = norm_C * norm_v
    return _Constants(
        s=s, r=model.order, kappa2=float(sv[0] / sv[-1]), norm_pencil=float(sv[0]),
        norm_inv=float(1.0 / sv[-1]), norm_FE=spectral_norm(F_E), norm_FA=spectral_norm(F_A),
        norm_B=spectral_norm(model.B_hat), norm_C=norm_C, norm_v=norm_v,
        w_mu_inf=float(np.abs(w_mu).max()), w_gamma_inf=float(np.abs(w_gamma).max()),
        cos_angle=abs(h) / denom if denom > 0 else 0.0, h_value=h, mode=mode)


def sigma_max(model, data, s, mode='relative'):
    """Largest admissible noise level at `s`.

    ``(1/kappa_2) * min(||G|| / (4 sqrt(r) (||F_E|| + ||F_A||)), ||B|| / (4 sqrt(r) ||w||_inf))``
    where ``w`` is the noise weight of the driving values (``B_hat`` itself in
    relative mode). A level ``sigma`` is admissible iff ``0 < sigma < sigma_max``.
    """
    return _constants(model, data, s, mode).sigma_max


def deterministic_pert_bound(kappa2, zeta):
    """Relative solution error bound ``2 zeta kappa2 / (1 - zeta kappa2)``.

    Valid for perturbations with ``||dG|| <= zeta ||G||`` and ``||db|| <= zeta ||b||``.
    """
    if zeta * kappa2 >= 1.0:
        raise ConditionViolated(f'zeta * kappa2 = {zeta * kappa2:g} >= 1')
    return 2.0 * zeta * kappa2 / (1.0 - zeta * kappa2)


@dataclass(frozen=True)
class BoundReport:
    """Constants and bounds at one ``(s, sigma)``.

    `bound_abs` and `bound_rel` are ``None`` when the noise level is not
    admissible (or, for `bound_rel`, when the relative bound is undefined).
    """

    s: complex
    sigma: float
    kappa2: float
    norm_pencil: float
    norm_FE: float
    norm_FA: float
    zeta_hat: float
    zeta: float
    nu: float
    c1: float
    c2: float
    sigma_max: float
    admissible: bool
    bound_abs: float | None
    bound_rel: float | None
    cos_angle: float
    probability_floor: float


def _abs_bound(k, sigma):
    zh = k.zeta_hat
    return sigma * (k.c1 * zh / (1.0 - sigma * zh * k.kappa2)
                    + k.c2 * k.b_growth(sigma) / (1.0 - k.nu * sigma))


def _rel_bound(k, sigma):
    if abs(k.h_value) <= FLOOR_ABS:
        raise ZeroOfTransferFunction(f's = {k.s} is a zero of the model transfer function')
    if k.cos_angle <= FLOOR_ABS:
        raise OrthogonalAngle('C_hat^* is orthogonal to (sE - A)^{-1} B_hat')
    zk = sigma * k.zeta_hat * k.kappa2
    c_ratio = k.w_gamma_inf / k.norm_C
    return sigma / k.cos_angle * (2.0 * k.zeta_hat * k.kappa2 / (1.0 - zk)
                                  + k.four_root_r * (1.0 + zk) / (1.0 - zk) * c_ratio)


def _report(k, sigma):
    sigma = float(sigma)
    admissible = 0.0 < sigma < k.sigma_max
    bound_abs = bound_rel = None
    if admissible:
        bound_abs = _abs_bound(k, sigma)
        try:
            bound_rel = _rel_bound(k, sigma)
        except (ZeroOfTransferFunction, OrthogonalAngle):
            pass
    return BoundReport(
        s=k.s, sigma=sigma, kappa2=k.kappa2, norm_pencil=k.norm_pencil, norm_FE=k.norm_FE,
        norm_FA=k.norm_FA, zeta_hat=k.zeta_hat, zeta=sigma * k.zeta_hat, nu=k.nu, c1=k.c1, c2=k.c2,
        sigma_max=k.sigma_max, admissible=admissible, bound_abs=bound_abs, bound_rel=bound_rel,
        cos_angle=k.cos_angle, probability_floor=1.0 - 4.0 * math.exp(-k.r / 2.0))


def theorem_bound(model, data, s, sigma, mode='relative'):
    """Full :class:`BoundReport` for ``|H_hat(s) - H_noisy(s)|`` at noise level `sigma`.

    `model` is the noiseless Loewner model and `data` the noiseless samples it
    was built from.
    """
    return _report(_constants(model, data, s, mode), sigma)


def theorem_bounds(model, data, s, sigmas, mode='relative'):
    """Reports for several noise levels at one point, sharing the factorisations."""
    k = _constants(model, data, s, mode)
    return [_report(k, sigma) for sigma in sigmas]


def relative_bound(model, data, s, sigma, mode='relative'):
    """Bound on ``|H_hat(s) - H_noisy(s)| / |H_hat(s)|`` written with ``kappa_2`` and
    ``|cos angle(C_hat^*, (sE - A)^{-1} B_hat)|``."""
    k = _constants(model, data, s, mode)
    if not 0.0 < sigma < k.sigma_max:
        raise ConditionViolated(f'sigma = {sigma:g} is not in (0, sigma_max = {k.sigma_max:g})')
    return _rel_bound(k, sigma)


def cos_angle(model, s):
    """``|C v| / (||C|| ||v||)`` with ``v = (sE - A)^{-1} B``."""
    v = lu_solve_checked(model.pencil(s), model.B_hat)
    denom = spectral_norm(model.C_hat) * spectral_norm(v)
    return abs(complex(model.C_hat @ v)) / denom if denom > 0 else 0.0


def _evaluate(model, s):
    E, A, B, C = pencil_of(model)
    return complex(C @ lu_solve_checked(complex(s) * E - A, B.astype(complex)))


@dataclass(frozen=True)
class H2Error:
    """Pole-residue evaluation of the H2 distance and its consistency residuals."""

    value: float
    squared: complex
    imag_residual: float
    negative_residual: float

    @property
    def consistent(self):
        return max(self.imag_residual, self.negative_residual) <= H2_CONSISTENCY_TOL


def h2_error_details(m1, m2):
    """H2 distance of two stable models with simple poles via reflected-pole evaluations.

    ``||H1 - H2||^2 = sum_i phi1_i (H1 - H2)(-lam1_i) + sum_j phi2_j (H2 - H1)(-lam2_j)``
    where ``lam``, ``phi`` are poles and residues. The formula assumes
    real-symmetric transfer functions.
    """
    E1, *_ = pencil_of(m1)
    E2, *_ = pencil_of(m2)
    if E1.shape != E2.shape:
        raise OrderMismatch(f'models have orders {E1.shape[0]} and {E2.shape[0]}')
    lam1, phi1 = poles_residues(m1)
    lam2, phi2 = poles_residues(m2)
    for name, lam in (('first', lam1), ('second', lam2)):
        if np.any(lam.real >= 0):
            raise UnstableModel(f'{name} model has poles in the closed right half-plane')
    terms = []
    for a, b, lam, phi in ((m1, m2, lam1, phi1), (m2, m1, lam2, phi2)):
        for p, c in zip(lam, phi):
            terms.append(c * _evaluate(a, -p))
            terms.append(-c * _evaluate(b, -p))
    terms = np.array(terms)
    total = complex(terms.sum())
    scale = max(float(np.abs(terms).sum()), FLOOR_ABS)
    return H2Error(value=math.sqrt(max(total.real, 0.0)), squared=total,
                   imag_residual=abs(total.imag) / scale, negative_residual=max(-total.real, 0.0) / scale)


def h2_error(m1, m2):
    """H2 norm of the difference of the transfer functions of `m1` and `m2`."""
    res = h2_error_details(m1, m2)
    if not res.consistent:
        warnings.warn(f'H2 pole-residue sum inconsistent: imaginary residual {res.imag_residual:.2e}, '
                      f'negative residual {res.negative_residual:.2e}', RuntimeWarning, stacklevel=2)
    return res.value


BOUND_REPORT_COLUMNS = tuple(['re_s', 'im_s'] + [f.name for f in fields(BoundReport)][1:])


def _cell(value):
    if value is None:
        return ''
    if isinstance(value, (bool, np.bool_)):
        return str(int(value))
    return repr(float(value))


def write_bound_reports(reports, path):
    """CSV with one row per report; booleans as 0/1 and absent bounds as empty cells."""
    with open(path, 'w', newline='') as f:
        writer = csv.writer(f, lineterminator='\n')
        writer.writerow(BOUND_REPORT_COLUMNS)
        for rep in reports:
            s = complex(rep.s)
            writer.writerow([repr(s.real), repr(s.imag)]
                            + [_cell(getattr(rep, name)) for name in BOUND_REPORT_COLUMNS[2:]])


def read_bound_reports(path):
    out = []
    with open(path, newline='') as f:
        for row in csv.DictReader(f):
            values = {}
            for name in BOUND_REPORT_COLUMNS[2:]:
                cell = row[name]
                if name == 'admissible':
                    values[name] = cell == '1'
                else:
                    values[name] = float(cell) if cell != '' else None
            out.append(BoundReport(s=complex(float(row['re_s']), float(row['im_s'])), **values))
    return out
