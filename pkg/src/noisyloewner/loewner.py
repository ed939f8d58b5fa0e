"""Interpolation points, frequency data and Loewner models."""

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ._linalg import RANK_TOL, batched_solve, frozen, full_rank, lu_solve_checked
from .errors import (DimensionMismatch, DuplicatePoints, InvalidRange, LabelMismatch, LengthMismatch,
                     OddOrder, ParseError, PointCollision, SingularPencil, SingularTransform)
from .systems import transfer_function

POINT_SEP_TOL = 1e-12
FLOOR_ABS = 1e-300
RANDOM_GRID_SIZE = 10**6


def _separation_scale(mu, gamma):
    return POINT_SEP_TOL * max(np.abs(mu).max(), np.abs(gamma).max(), FLOOR_ABS)


@dataclass(frozen=True, eq=False)
class InterpolationSet:
    """Driving points `mu` and measuring points `gamma`, ``r`` of each."""

    mu: np.ndarray
    gamma: np.ndarray

    def __post_init__(self):
        mu = np.asarray(self.mu, dtype=complex).reshape(-1)
        gamma = np.asarray(self.gamma, dtype=complex).reshape(-1)
        if mu.size == 0 or mu.size != gamma.size:
            raise LengthMismatch(f'need r >= 1 points in each set, got {mu.size} and {gamma.size}')
        tol = _separation_scale(mu, gamma)
        if np.abs(mu[:, None] - gamma[None, :]).min() < tol:
            raise PointCollision('a driving point coincides with a measuring point')
        pts = np.concatenate([mu, gamma])
        gaps = np.abs(pts[:, None] - pts[None, :])
        gaps[np.diag_indices_from(gaps)] = np.inf
        if gaps.min() < tol:
            raise DuplicatePoints('interpolation points must be pairwise distinct')
        object.__setattr__(self, 'mu', frozen(mu))
        object.__setattr__(self, 'gamma', frozen(gamma))

    @property
    def r(self):
        return self.mu.size

    @property
    def all_points(self):
        return np.concatenate([self.mu, self.gamma])


@dataclass(frozen=True, eq=False)
class FrequencyData:
    """Transfer-function values at an :class:`InterpolationSet`.

    `sigma` is ``None`` for noiseless samples and the noise level otherwise;
    `mode` records the noise model of noisy samples.
    """

    points: InterpolationSet
    h_mu: np.ndarray
    h_gamma: np.ndarray
    sigma: float | None = None
    mode: str = 'relative'

    def __post_init__(self):
        h_mu = np.asarray(self.h_mu, dtype=complex).reshape(-1)
        h_gamma = np.asarray(self.h_gamma, dtype=complex).reshape(-1)
        r = self.points.r
        if h_mu.size != r or h_gamma.size != r:
            raise LengthMismatch(f'expected {r} values per set, got {h_mu.size} and {h_gamma.size}')
        object.__setattr__(self, 'h_mu', frozen(h_mu))
        object.__setattr__(self, 'h_gamma', frozen(h_gamma))

    @property
    def noisy(self):
        return self.sigma is not None

    @property
    def label(self):
        return f'noisy({self.sigma!r})' if self.noisy else 'noiseless'

    @property
    def r(self):
        return self.points.r


@dataclass(frozen=True, eq=False)
class LoewnerModel:
    """Reduced model ``(E_hat, A_hat, B_hat, C_hat)`` with ``H(s) = C (sE - A)^{-1} B``."""

    E_hat: np.ndarray
    A_hat: np.ndarray
    B_hat: np.ndarray
    C_hat: np.ndarray
    source: str = 'matrices'

    def __post_init__(self):
        E = np.atleast_2d(np.asarray(self.E_hat, dtype=complex))
        A = np.atleast_2d(np.asarray(self.A_hat, dtype=complex))
        B = np.asarray(self.B_hat, dtype=complex).reshape(-1)
        C = np.asarray(self.C_hat, dtype=complex).reshape(-1)
        r = A.shape[0]
        if E.shape != (r, r) or A.shape != (r, r) or B.shape != (r,) or C.shape != (r,):
            raise DimensionMismatch(f'nonconforming shapes E{E.shape} A{A.shape} B{B.shape} C{C.shape}')
        for name, value in zip(('E_hat', 'A_hat', 'B_hat', 'C_hat'), (E, A, B, C)):
            object.__setattr__(self, name, frozen(value))

    @property
    def order(self):
        return self.A_hat.shape[0]

    def pencil(self, s):
        return complex(s) * self.E_hat - self.A_hat


def select_points_log_conjugate(freq_lo, freq_hi, r):
    """Log-spaced imaginary points with alternating signs.

    With ``w_i = 1j * geomspace(freq_lo, freq_hi, r)`` the driving points are
    ``(-1)**i * w_i`` and the measuring points ``(-1)**(i+1) * w_i`` for
    ``i = 1..r``, so each ``w_i`` appears with both signs.
    """
    if not 0 < freq_lo < freq_hi:
        raise InvalidRange(f'need 0 < freq_lo < freq_hi, got {freq_lo}, {freq_hi}')
    if r < 2:
        raise InvalidRange(f'need r >= 2, got {r}')
    w = 1j * np.geomspace(freq_lo, freq_hi, r)
    sign = (-1.0) ** np.arange(1, r + 1)
    return InterpolationSet(sign * w, -sign * w)


def select_points_random(freq_lo, freq_hi, r, seed):
    """Random points in ``[lo, hi] x i[lo, hi]`` together with their conjugates.

    Real and imaginary parts are drawn uniformly from a grid of 10**6 log-spaced
    values. ``r`` base points ``s_k`` are drawn; the pair ``(s_k, conj(s_k))``
    goes to the driving set for odd ``k`` and to the measuring set for even
    ``k``, so both sets are closed under conjugation.
    """
    if not 0 < freq_lo < freq_hi:
        raise InvalidRange(f'need 0 < freq_lo < freq_hi, got {freq_lo}, {freq_hi}')
    if r < 2 or r % 2:
        raise OddOrder(f'random point selection needs an even order r >= 2, got {r}')
    rng = np.random.default_rng(seed)
    grid = np.geomspace(freq_lo, freq_hi, RANDOM_GRID_SIZE)
    idx = rng.integers(0, RANDOM_GRID_SIZE, size=(r, 2))
    base = grid[idx[:, 0]] + 1j * grid[idx[:, 1]]
    pairs = np.stack([base, base.conj()], axis=1)
    return InterpolationSet(pairs[0::2].reshape(-1), pairs[1::2].reshape(-1))


def _sample(sys, points, name):
    out = np.empty(points.size, dtype=complex)
    for i, s in enumerate(points):
        try:
            out[i] = transfer_function(sys, s)
        except SingularPencil as exc:
            raise SingularPencil(f'{name}[{i}] = {s} is a pole of the system') from exc
    return out


def sample_data(sys, points):
    """Noiseless transfer-function samples of `sys` at `points`."""
    return FrequencyData(points, _sample(sys, points.mu, 'mu'), _sample(sys, points.gamma, 'gamma'))


def loewner_matrices(mu, gamma, h_mu, h_gamma):
    """Loewner and shifted Loewner matrices ``(L, Ls)`` of the given samples."""
    mu = np.asarray(mu, dtype=complex)
    gamma = np.asarray(gamma, dtype=complex)
    diff = mu[:, None] - gamma[None, :]
    if np.abs(diff).min() < _separation_scale(mu, gamma):
        raise PointCollision('a driving point coincides with a measuring point')
    h_mu = np.asarray(h_mu, dtype=complex)[:, None]
    h_gamma = np.asarray(h_gamma, dtype=complex)[None, :]
    L = (h_mu - h_gamma) / diff
    Ls = (mu[:, None] * h_mu - gamma[None, :] * h_gamma) / diff
    return L, Ls


def build_loewner(data):
    """Loewner model ``E = -L``, ``A = -Ls``, ``B = H(mu)``, ``C = H(gamma)``."""
    L, Ls = loewner_matrices(data.points.mu, data.points.gamma, data.h_mu, data.h_gamma)
    return LoewnerModel(-L, -Ls, data.h_mu, data.h_gamma, source=data.label)


def evaluate_model(model, s):
    """``C_hat (s E_hat - A_hat)^{-1} B_hat`` via one LU solve."""
    return complex(model.C_hat @ lu_solve_checked(model.pencil(s), model.B_hat))


def evaluate_many(model, s):
    """Evaluate `model` at every entry of `s`.

    Points where the pencil is numerically singular come back as NaN rather
    than raising, so grids can be scanned in one pass.
    """
    s = np.asarray(s, dtype=complex).reshape(-1)
    M = s[:, None, None] * model.E_hat[None] - model.A_hat[None]
    x, _ = batched_solve(M, np.broadcast_to(model.B_hat, (s.size, model.order)))
    return x @ model.C_hat


def verify_interpolation(sys, model, points):
    """Largest relative mismatch between `sys` and `model` over all ``2r`` points.

    `model` carries the provenance of its data; models built from noisy data
    interpolate the noisy samples and are rejected.
    """
    if model.source.startswith('noisy'):
        raise LabelMismatch('model was built from noisy data; it interpolates the noisy samples, not H')
    worst = 0.0
    for s in points.all_points:
        h = transfer_function(sys, s)
        worst = max(worst, abs(h - evaluate_model(model, s)) / max(abs(h), FLOOR_ABS))
    return worst


def apply_transform(model, D1, D2):
    """Equivalent model ``(D1 E D2, D1 A D2, D1 B, C D2)``.

    The transfer function is unchanged; the conditioning of ``sE - A`` is not.
    """
    D1 = np.atleast_2d(np.asarray(D1, dtype=complex))
    D2 = np.atleast_2d(np.asarray(D2, dtype=complex))
    r = model.order
    if D1.shape != (r, r) or D2.shape != (r, r):
        raise DimensionMismatch(f'transforms must be {r}x{r}')
    if not (full_rank(D1, RANK_TOL) and full_rank(D2, RANK_TOL)):
        raise SingularTransform('D1 and D2 must be nonsingular')
    return LoewnerModel(D1 @ model.E_hat @ D2, D1 @ model.A_hat @ D2, D1 @ model.B_hat,
                        model.C_hat @ D2, source=model.source)


FREQUENCY_DATA_COLUMNS = ('set', 'index', 're_point', 'im_point', 're_value', 'im_value')


def write_frequency_data(data, path):
    """Write `data` as CSV with one row per interpolation point."""
    with open(path, 'w', newline='') as f:
        writer = csv.writer(f, lineterminator='\n')
        writer.writerow(FREQUENCY_DATA_COLUMNS)
        for name, pts, vals in (('mu', data.points.mu, data.h_mu), ('gamma', data.points.gamma, data.h_gamma)):
            for i, (p, v) in enumerate(zip(pts, vals)):
                writer.writerow([name, i] + [repr(float(x)) for x in (p.real, p.imag, v.real, v.imag)])


def read_frequency_data(path, sigma=None, mode='relative'):
    """Inverse of :func:`write_frequency_data`."""
    rows = {'mu': {}, 'gamma': {}}
    with open(Path(path), newline='') as f:
        reader = csv.DictReader(f)
        if reader.fieldnames is None or tuple(reader.fieldnames) != FREQUENCY_DATA_COLUMNS:
            raise ParseError(f'expected header {",".join(FREQUENCY_DATA_COLUMNS)}')
        for line in reader:
            try:
                name = line['set']
                idx = int(line['index'])
                p = complex(float(line['re_point']), float(line['im_point']))
                v = complex(float(line['re_value']), float(line['im_value']))
            except (TypeError, ValueError) as exc:
                raise ParseError(f'bad row {line}: {exc}') from exc
            if name not in rows or idx in rows[name]:
                raise ParseError(f'bad or duplicate entry {name}[{idx}]')
            rows[name][idx] = (p, v)
    r = len(rows['mu'])
    if r == 0:
        raise ParseError('no interpolation points in file')
    for name in rows:
        if sorted(rows[name]) != list(range(r)):
            raise ParseError(f'set {name} must have indices 0..{r - 1}')
    mu, h_mu = zip(*(rows['mu'][i] for i in range(r)))
    gamma, h_gamma = zip(*(rows['gamma'][i] for i in range(r)))
    return FrequencyData(InterpolationSet(mu, gamma), h_mu, h_gamma, sigma=sigma, mode=mode)
