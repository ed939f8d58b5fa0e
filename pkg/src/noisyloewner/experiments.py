"""Noise-level sweeps, bound audits and transfer-function traces.

Every run is driven by an :class:`ExperimentConfig`. Random numbers come from
keyed streams ``(seed, stream id, ...)`` so that results do not depend on the
order in which replicates are computed.
"""

import csv
import math
from dataclasses import dataclass, field, fields
from pathlib import Path

import numpy as np

from . import __version__
from ._linalg import batched_solve
from .analysis import theorem_bound
from .errors import ConfigError, InadmissiblePoint, SingularPencil
from .loewner import (FLOOR_ABS, build_loewner, evaluate_many, evaluate_model, sample_data,
                      select_points_log_conjugate, select_points_random, write_frequency_data)
from .noise import MODES, draw_noise, pollute
from .systems import load_system, make_penzl, transfer_function

SWEEP_STREAM, AUDIT_STREAM, TRACE_STREAM = 0, 1, 2
DEFAULT_SIGMA_GRID = tuple(float(x) for x in np.logspace(-15, 5, 21))


@dataclass(frozen=True)
class ExperimentConfig:
    system: str = 'penzl'
    input_index: int = 1
    output_index: int = 1
    r: int = 16
    freq_lo: float = 10.0
    freq_hi: float = 1000.0
    point_scheme: str = 'log'
    point_seed: int | None = None
    n_test: int = 200
    sigma_grid: tuple = DEFAULT_SIGMA_GRID
    replicates: int = 10
    seed: int = 0
    noise_mode: str = 'relative'
    out_dir: str | None = None

    def __post_init__(self):
        object.__setattr__(self, 'sigma_grid', tuple(float(x) for x in self.sigma_grid))
        grid = np.array(self.sigma_grid)
        if grid.size == 0 or np.any(grid <= 0) or np.any(np.diff(grid) <= 0):
            raise ConfigError('sigma_grid must be nonempty, positive and strictly increasing')
        if self.replicates < 1:
            raise ConfigError('replicates must be >= 1')
        if self.n_test < 1:
            raise ConfigError('n_test must be >= 1')
        if self.point_scheme not in ('log', 'random'):
            raise ConfigError(f"point_scheme must be 'log' or 'random', got {self.point_scheme!r}")
        if self.noise_mode not in MODES:
            raise ConfigError(f'noise_mode must be one of {MODES}, got {self.noise_mode!r}')
        if not (self.system == 'penzl' or self.system.startswith('path:')):
            raise ConfigError(f"system must be 'penzl' or 'path:<dir>', got {self.system!r}")
        if not 0 < self.freq_lo < self.freq_hi:
            raise ConfigError('need 0 < freq_lo < freq_hi')

    @property
    def points_seed(self):
        return self.seed if self.point_seed is None else self.point_seed


@dataclass(frozen=True, eq=False)
class Problem:
    """Noiseless ingredients shared by all runs of one configuration."""

    config: ExperimentConfig
    system: object
    data: object
    model: object
    test_points: np.ndarray
    h_hat: np.ndarray


def load_config_system(cfg):
    if cfg.system == 'penzl':
        return make_penzl()
    return load_system(cfg.system[len('path:'):], cfg.input_index, cfg.output_index)


def interpolation_points(cfg):
    if cfg.point_scheme == 'log':
        return select_points_log_conjugate(cfg.freq_lo, cfg.freq_hi, cfg.r)
    return select_points_random(cfg.freq_lo, cfg.freq_hi, cfg.r, cfg.points_seed)


def test_grid(cfg):
    """``n_test`` log-spaced points on the imaginary axis in ``[freq_lo, freq_hi]``."""
    return 1j * np.geomspace(cfg.freq_lo, cfg.freq_hi, cfg.n_test)


def prepare(cfg, system=None):
    """Sample the system, build the noiseless model and evaluate it on the test grid."""
    system = load_config_system(cfg) if system is None else system
    data = sample_data(system, interpolation_points(cfg))
    model = build_loewner(data)
    test = test_grid(cfg)
    h_hat = evaluate_many(model, test)
    if not np.all(np.isfinite(h_hat)):
        bad = np.flatnonzero(~np.isfinite(h_hat))
        raise SingularPencil(f'noiseless model has poles at test points {bad.tolist()}')
    return Problem(cfg, system, data, model, test, h_hat)


def sigma_max_profile(problem):
    """``(sigma_max, kappa2)`` at every test point (independent of any noise draw)."""
    reps = [theorem_bound(problem.model, problem.data, s, 0.0, problem.config.noise_mode)
            for s in problem.test_points]
    return np.array([rep.sigma_max for rep in reps]), np.array([rep.kappa2 for rep in reps])


def noisy_values(problem, sigma, draws):
    """Noisy-model transfer function on the test grid for a list of draws.

    Returns an array of shape ``(len(draws), n_test)``; entries where the noisy
    pencil is singular are NaN.
    """
    models = [build_loewner(pollute(problem.data, sigma, d)) for d in draws]
    E = np.array([m.E_hat for m in models])
    A = np.array([m.A_hat for m in models])
    B = np.array([m.B_hat for m in models])
    C = np.array([m.C_hat for m in models])
    test = problem.test_points
    M = test[None, :, None, None] * E[:, None] - A[:, None]
    n_draws, n_test, r = M.shape[:3]
    rhs = np.broadcast_to(B[:, None, :], (n_draws, n_test, r)).reshape(-1, r)
    x, _ = batched_solve(M.reshape(-1, r, r), rhs)
    return np.einsum('dtk,dk->dt', x.reshape(n_draws, n_test, r), C)


@dataclass(frozen=True)
class SweepRow:
    sigma: float
    mean_err: float
    min_err: float
    max_err: float
    violated_count: int
    replicate_errors: tuple = field(default=())
    skipped: int = 0


def sweep_draws(cfg, sigma_index):
    return [draw_noise(cfg.r, cfg.seed, key=(SWEEP_STREAM, sigma_index, rep), mode=cfg.noise_mode)
            for rep in range(cfg.replicates)]


def run_sweep(cfg, problem=None):
    """Mean test-grid error ``e(sigma)`` over replicates for each noise level.

    ``e(sigma)`` is the average of ``|H_hat(s) - H_noisy(s)|`` over the test
    points; points where the noisy model is singular are left out and counted
    in ``skipped``. ``violated_count`` is the number of test points with
    ``sigma >= sigma_max``. Output files are written when ``cfg.out_dir`` is set.
    """
    problem = prepare(cfg) if problem is None else problem
    smax, kappa = sigma_max_profile(problem)
    rows, skipped = [], []
    for si, sigma in enumerate(cfg.sigma_grid):
        vals = noisy_values(problem, sigma, sweep_draws(cfg, si))
        gaps = np.abs(problem.h_hat[None, :] - vals)
        errs = []
        for rep, g in enumerate(gaps):
            ok = np.isfinite(g)
            skipped.extend((sigma, rep, int(t)) for t in np.flatnonzero(~ok))
            errs.append(float(g[ok].mean()) if ok.any() else math.nan)
        rows.append(SweepRow(sigma=sigma, mean_err=float(np.mean(errs)), min_err=float(np.min(errs)),
                             max_err=float(np.max(errs)), violated_count=int(np.sum(sigma >= smax)),
                             replicate_errors=tuple(errs), skipped=int(np.sum(~np.isfinite(gaps)))))
    if cfg.out_dir is not None:
        out = _out_dir(cfg)
        _write_sweep(out / 'sweep.csv', rows, cfg.replicates)
        _write_csv(out / 'violations.csv', ('sigma', 'violated_count', 'n_test'),
                   [(row.sigma, row.violated_count, cfg.n_test) for row in rows])
        _write_csv(out / 'sigma_max.csv', ('index', 'frequency', 'sigma_max', 'kappa2'),
                   [(i, s.imag, m, k) for i, (s, m, k) in enumerate(zip(problem.test_points, smax, kappa))])
        _write_csv(out / 'skipped.csv', ('sigma', 'replicate', 'test_index'), skipped)
        (out / 'plot_sweep.py').write_text(PLOT_SWEEP)
        write_manifest(cfg, out / 'manifest.txt')
    return rows


@dataclass(frozen=True)
class AuditRow:
    s: complex
    sigma: float
    sigma_max: float
    bound_abs: float
    draws: int
    violations: int
    frequency: float
    ceiling: float
    max_error: float


def run_bound_audit(cfg, s_list, sigma, draws, problem=None):
    """Empirical failure frequency of the absolute bound at each point of `s_list`.

    A draw counts as a failure when ``|H_hat(s) - H_noisy(s)|`` exceeds
    ``bound_abs`` or the noisy pencil is singular at ``s``.
    """
    if draws <= 0:
        return []
    problem = prepare(cfg) if problem is None else problem
    reports = [theorem_bound(problem.model, problem.data, s, sigma, cfg.noise_mode) for s in s_list]
    bad = [rep.s for rep in reports if not rep.admissible]
    if bad:
        raise InadmissiblePoint(f'sigma = {sigma:g} is not admissible at {len(bad)} point(s): {bad}', bad)
    ceiling = 4.0 * math.exp(-cfg.r / 2.0)
    rows = []
    for i, rep in enumerate(reports):
        point = Problem(cfg, problem.system, problem.data, problem.model, np.array([rep.s]),
                        np.array([evaluate_model(problem.model, rep.s)]))
        ds = [draw_noise(cfg.r, cfg.seed, key=(AUDIT_STREAM, i, d), mode=cfg.noise_mode) for d in range(draws)]
        err = np.abs(point.h_hat[0] - noisy_values(point, sigma, ds)[:, 0])
        fails = int(np.sum(~(err <= rep.bound_abs)))
        rows.append(AuditRow(s=rep.s, sigma=float(sigma), sigma_max=rep.sigma_max, bound_abs=rep.bound_abs,
                             draws=draws, violations=fails, frequency=fails / draws, ceiling=ceiling,
                             max_error=float(np.nanmax(err)) if np.any(np.isfinite(err)) else math.nan))
    if cfg.out_dir is not None:
        out = _out_dir(cfg)
        _write_csv(out / 'audit.csv',
                   ('re_s', 'im_s', 'sigma', 'sigma_max', 'bound_abs', 'draws', 'violations', 'frequency',
                    'ceiling', 'max_error'),
                   [(row.s.real, row.s.imag, row.sigma, row.sigma_max, row.bound_abs, row.draws,
                     row.violations, row.frequency, row.ceiling, row.max_error) for row in rows])
        write_manifest(cfg, out / 'manifest.txt')
    return rows


@dataclass(frozen=True)
class TraceRow:
    frequency: float
    abs_h: float
    abs_h_hat: float
    abs_h_noisy: float


def run_tf_trace(cfg, sigma, problem=None, full_order=True):
    """``|H|``, ``|H_hat|`` and ``|H_noisy|`` on the test grid for one seeded draw.

    With ``full_order=False`` the (expensive) full-order column is skipped and
    reported as NaN.
    """
    problem = prepare(cfg) if problem is None else problem
    draw = draw_noise(cfg.r, cfg.seed, key=(TRACE_STREAM,), mode=cfg.noise_mode)
    noisy = noisy_values(problem, sigma, [draw])[0]
    rows = []
    for s, hh, hn in zip(problem.test_points, problem.h_hat, noisy):
        h = abs(transfer_function(problem.system, s)) if full_order else math.nan
        rows.append(TraceRow(frequency=s.imag, abs_h=h, abs_h_hat=abs(hh), abs_h_noisy=abs(hn)))
    if cfg.out_dir is not None:
        out = _out_dir(cfg)
        _write_csv(out / 'trace.csv', ('frequency', 'abs_h', 'abs_h_hat', 'abs_h_noisy'),
                   [(row.frequency, row.abs_h, row.abs_h_hat, row.abs_h_noisy) for row in rows])
        (out / 'plot_trace.py').write_text(PLOT_TRACE)
        write_manifest(cfg, out / 'manifest.txt', extra={'trace_sigma': sigma})
    return rows


def trace_gap(rows):
    """Largest relative gap ``|H_noisy - H_hat| / |H_hat|`` seen in magnitudes of a trace."""
    return max(abs(row.abs_h_noisy - row.abs_h_hat) / max(row.abs_h_hat, FLOOR_ABS) for row in rows)


def run_points(cfg, system=None):
    """Sample the interpolation data of `cfg` and write it as ``data.csv``."""
    system = load_config_system(cfg) if system is None else system
    data = sample_data(system, interpolation_points(cfg))
    if cfg.out_dir is not None:
        out = _out_dir(cfg)
        write_frequency_data(data, out / 'data.csv')
        write_manifest(cfg, out / 'manifest.txt')
    return data


def _out_dir(cfg):
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _fmt(value):
    if isinstance(value, (bool, np.bool_)):
        return str(int(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def _write_csv(path, header, rows):
    with open(path, 'w', newline='') as f:
        writer = csv.writer(f, lineterminator='\n')
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])


def _write_sweep(path, rows, replicates):
    header = (['sigma', 'mean_err', 'min_err', 'max_err', 'violated_count', 'skipped']
              + [f'err_rep{k}' for k in range(replicates)])
    _write_csv(path, header, [(row.sigma, row.mean_err, row.min_err, row.max_err, row.violated_count,
                               row.skipped, *row.replicate_errors) for row in rows])


def config_to_lines(cfg):
    lines = []
    for f in fields(cfg):
        if f.name == 'out_dir':
            continue
        value = getattr(cfg, f.name)
        if f.name == 'sigma_grid':
            value = ','.join(repr(x) for x in value)
        elif value is None:
            value = ''
        lines.append(f'{f.name} = {value}')
    return lines


def write_manifest(cfg, path, extra=None):
    lines = [f'version = {__version__}'] + config_to_lines(cfg)
    for key, value in (extra or {}).items():
        lines.append(f'{key} = {_fmt(value)}')
    Path(path).write_text('\n'.join(lines) + '\n')


_INT_KEYS = {'input_index', 'output_index', 'r', 'n_test', 'replicates', 'seed', 'point_seed'}
_FLOAT_KEYS = {'freq_lo', 'freq_hi'}
_IGNORED_KEYS = {'version', 'trace_sigma'}


def parse_config_text(text):
    """Parse ``key = value`` lines (``#`` starts a comment) into config keyword arguments."""
    known = {f.name for f in fields(ExperimentConfig)}
    values = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split('#', 1)[0].strip()
        if not line:
            continue
        if '=' not in line:
            raise ConfigError(f'line {lineno}: expected key = value')
        key, value = (part.strip() for part in line.split('=', 1))
        key = key.replace('-', '_')
        if key in _IGNORED_KEYS:
            continue
        if key not in known:
            raise ConfigError(f'line {lineno}: unknown key {key!r}')
        try:
            if key in _INT_KEYS:
                values[key] = int(value) if value else None
            elif key in _FLOAT_KEYS:
                values[key] = float(value)
            elif key == 'sigma_grid':
                values[key] = tuple(float(x) for x in value.split(','))
            else:
                values[key] = value or None
        except ValueError as exc:
            raise ConfigError(f'line {lineno}: bad value for {key}: {exc}') from exc
    return values


PLOT_SWEEP = '''"""Plot sweep.csv and violations.csv written next to this script."""
import csv
from pathlib import Path

import matplotlib.pyplot as plt

here = Path(__file__).parent
with open(here / "sweep.csv") as f:
    rows = list(csv.DictReader(f))
sigma = [float(r["sigma"]) for r in rows]
mean = [float(r["mean_err"]) for r in rows]
lo = [m - float(r["min_err"]) for m, r in zip(mean, rows)]
hi = [float(r["max_err"]) - m for m, r in zip(mean, rows)]
count = [int(r["violated_count"]) for r in rows]

fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(11, 4))
ax1.errorbar(sigma, mean, yerr=[lo, hi], marker="o", label="error")
ax1.loglog(sigma, [mean[0] * s / sigma[0] for s in sigma], "k--", label="linear growth")
ax1.set_xlabel("std. deviation sigma of noise")
ax1.set_ylabel("mean of error")
ax1.legend()
ax2.semilogx(sigma, count, marker="s")
ax2.set_xlabel("std. deviation sigma of noise")
ax2.set_ylabel("#points violating admissibility")
fig.tight_layout()
fig.savefig(here / "sweep.pdf")
'''

PLOT_TRACE = '''"""Plot trace.csv written next to this script."""
import csv
from pathlib import Path

import matplotlib.pyplot as plt

here = Path(__file__).parent
with open(here / "trace.csv") as f:
    rows = list(csv.DictReader(f))
w = [float(r["frequency"]) for r in rows]
fig, ax = plt.subplots(figsize=(8, 4))
ax.loglog(w, [float(r["abs_h"]) for r in rows], "k-", label="full model")
ax.loglog(w, [float(r["abs_h_hat"]) for r in rows], "b--", label="noiseless Loewner")
ax.loglog(w, [float(r["abs_h_noisy"]) for r in rows], "r:", label="noisy Loewner")
ax.set_xlabel("frequency [rad/s]")
ax.set_ylabel("|H(iw)|")
ax.legend()
fig.tight_layout()
fig.savefig(here / "trace.pdf")
'''
