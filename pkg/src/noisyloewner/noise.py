"""Complex Gaussian measurement noise and the perturbation it induces in Loewner models.

Noise enters as ``H(mu_i) (1 + sigma eps_i)`` and ``H(gamma_j) (1 + sigma eta_j)``
(relative mode) or ``H + sigma eps`` (absolute mode), with real and imaginary
parts of every ``eps_i``, ``eta_j`` independent standard normals.
"""

import csv
from dataclasses import dataclass

import numpy as np

from ._linalg import frozen
from .errors import LabelMismatch, LengthMismatch, ParseError, PointCollision
from .loewner import FrequencyData, _separation_scale

MODES = ('relative', 'absolute')


@dataclass(frozen=True, eq=False)
class NoiseDraw:
    """One realisation of the noise vectors ``eps`` (driving) and ``eta`` (measuring).

    `seed` and `key` identify the random stream: equal ``(seed, key)`` always
    reproduce the same draw, independent of the order in which draws are made.
    """

    eps: np.ndarray
    eta: np.ndarray
    sigma: float = 0.0
    mode: str = 'relative'
    seed: int = 0
    key: tuple = ()

    def __post_init__(self):
        eps = np.asarray(self.eps, dtype=complex).reshape(-1)
        eta = np.asarray(self.eta, dtype=complex).reshape(-1)
        if eps.size != eta.size:
            raise LengthMismatch(f'eps has {eps.size} entries but eta has {eta.size}')
        if self.mode not in MODES:
            raise ValueError(f'mode must be one of {MODES}, got {self.mode!r}')
        object.__setattr__(self, 'eps', frozen(eps))
        object.__setattr__(self, 'eta', frozen(eta))
        object.__setattr__(self, 'key', tuple(int(k) for k in self.key))

    @property
    def r(self):
        return self.eps.size


def noise_stream(seed, key=()):
    """Generator for the stream identified by ``(seed, *key)``.

    Keys are spawn keys of a :class:`numpy.random.SeedSequence`, so streams for
    different keys are statistically independent.
    """
    return np.random.default_rng(np.random.SeedSequence(int(seed), spawn_key=tuple(int(k) for k in key)))


def draw_noise(r, seed, key=(), sigma=0.0, mode='relative'):
    """Draw ``eps, eta`` of length `r` from the stream ``(seed, *key)``.

    The four real vectors are produced in the fixed order
    ``re(eps), im(eps), re(eta), im(eta)``.
    """
    z = noise_stream(seed, key).standard_normal((4, r))
    return NoiseDraw(z[0] + 1j * z[1], z[2] + 1j * z[3], sigma=sigma, mode=mode, seed=seed, key=key)


def noise_weights(data, mode='relative'):
    """Per-point noise scale: the sampled values (relative) or ones (absolute)."""
    if mode == 'relative':
        return data.h_mu, data.h_gamma
    if mode == 'absolute':
        return np.ones(data.r, dtype=complex), np.ones(data.r, dtype=complex)
    raise ValueError(f'mode must be one of {MODES}, got {mode!r}')


def _check(data, draw):
    if data.noisy:
        raise LabelMismatch(f'expected noiseless data, got {data.label}')
    if draw.r != data.r:
        raise LengthMismatch(f'draw has length {draw.r} but data has r = {data.r}')


def pollute(data, sigma, draw):
    """Noisy copy of `data` at level `sigma` using the noise vectors in `draw`."""
    _check(data, draw)
    if sigma < 0:
        raise ValueError(f'sigma must be nonnegative, got {sigma}')
    w_mu, w_gamma = noise_weights(data, draw.mode)
    return FrequencyData(data.points, data.h_mu + sigma * w_mu * draw.eps,
                         data.h_gamma + sigma * w_gamma * draw.eta, sigma=float(sigma), mode=draw.mode)


@dataclass(frozen=True, eq=False)
class PerturbationStructure:
    """Noise terms of one draw.

    The noisy model is ``(E + sigma dE, A + sigma dA, B + sigma dB, C + sigma dC)``
    with ``dE = -dL`` and ``dA = -dLs``.
    """

    dL: np.ndarray
    dLs: np.ndarray
    dB: np.ndarray
    dC: np.ndarray

    @property
    def dE(self):
        return -self.dL

    @property
    def dA(self):
        return -self.dLs


def delta_matrices(data, draw):
    """Exact noise terms ``dL``, ``dLs``, ``dB``, ``dC`` for one draw.

    ``dL_ij = (w_i eps_i - v_j eta_j) / (mu_i - gamma_j)`` and
    ``dLs_ij = (mu_i w_i eps_i - gamma_j v_j eta_j) / (mu_i - gamma_j)`` where
    ``w``, ``v`` are the noise weights of the driving and measuring values.
    Since the Loewner construction is linear in the data, this perturbation is
    exact, not a linearisation.
    """
    _check(data, draw)
    mu, gamma = data.points.mu, data.points.gamma
    diff = mu[:, None] - gamma[None, :]
    if np.abs(diff).min() < _separation_scale(mu, gamma):
        raise PointCollision('a driving point coincides with a measuring point')
    w_mu, w_gamma = noise_weights(data, draw.mode)
    dB = w_mu * draw.eps
    dC = w_gamma * draw.eta
    dL = (dB[:, None] - dC[None, :]) / diff
    dLs = (mu[:, None] * dB[:, None] - gamma[None, :] * dC[None, :]) / diff
    return PerturbationStructure(frozen(dL), frozen(dLs), frozen(dB), frozen(dC))


def structure_matrices(data, s, mode='relative'):
    """Deterministic factors ``F_E``, ``F_A`` of the pencil perturbation.

    For every draw, ``s dE - dA = diag(eps) @ F_E + F_A @ diag(eta)`` with

    * ``F_E[i, j] = w_i (s - mu_i) / (gamma_j - mu_i)``
    * ``F_A[i, j] = v_j (gamma_j - s) / (gamma_j - mu_i)``
    """
    if data.noisy:
        raise LabelMismatch(f'expected noiseless data, got {data.label}')
    mu, gamma = data.points.mu, data.points.gamma
    s = complex(s)
    denom = gamma[None, :] - mu[:, None]
    if np.abs(denom).min() < _separation_scale(mu, gamma):
        raise PointCollision('a driving point coincides with a measuring point')
    w_mu, w_gamma = noise_weights(data, mode)
    F_E = (w_mu * (s - mu))[:, None] / denom
    F_A = (w_gamma * (gamma - s))[None, :] / denom
    return F_E, F_A


NOISE_DRAW_COLUMNS = ('index', 're_eps', 'im_eps', 're_eta', 'im_eta')


def write_noise_draw(draw, path):
    with open(path, 'w', newline='') as f:
        writer = csv.writer(f, lineterminator='\n')
        writer.writerow(NOISE_DRAW_COLUMNS)
        for i, (e, h) in enumerate(zip(draw.eps, draw.eta)):
            writer.writerow([i] + [repr(float(x)) for x in (e.real, e.imag, h.real, h.imag)])


def read_noise_draw(path, sigma=0.0, mode='relative', seed=0, key=()):
    with open(path, newline='') as f:
        reader = csv.DictReader(f)
        if reader.fieldnames is None or tuple(reader.fieldnames) != NOISE_DRAW_COLUMNS:
            raise ParseError(f'expected header {",".join(NOISE_DRAW_COLUMNS)}')
        rows = list(reader)
    try:
        rows.sort(key=lambda row: int(row['index']))
        if [int(row['index']) for row in rows] != list(range(len(rows))):
            raise ParseError('indices must run 0..r-1')
        eps = [complex(float(row['re_eps']), float(row['im_eps'])) for row in rows]
        eta = [complex(float(row['re_eta']), float(row['im_eta'])) for row in rows]
    except (TypeError, ValueError) as exc:
        raise ParseError(f'bad noise draw file: {exc}') from exc
    return NoiseDraw(eps, eta, sigma=sigma, mode=mode, seed=seed, key=key)
