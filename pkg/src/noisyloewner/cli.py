"""Command-line entry point: ``noisyloewner {sweep,audit,trace,points}``."""

import argparse
import sys
from pathlib import Path

import numpy as np

from .analysis import sigma_max
from .errors import LoewnerError
from .experiments import (ExperimentConfig, parse_config_text, prepare, run_bound_audit, run_points, run_sweep,
                          run_tf_trace, trace_gap)


def _sigma_grid(text):
    """``a,b,c`` for explicit values or ``lo:hi:n`` for ``n`` log-spaced values."""
    if ':' in text:
        lo, hi, n = text.split(':')
        return tuple(float(x) for x in np.logspace(np.log10(float(lo)), np.log10(float(hi)), int(n)))
    return tuple(float(x) for x in text.split(','))


def _complex_list(text):
    return [complex(x.replace(' ', '')) for x in text.split(',')]


# flag destination -> ExperimentConfig field
_FIELDS = {
    'system': 'system', 'input_index': 'input_index', 'output_index': 'output_index', 'order': 'r',
    'freq_lo': 'freq_lo', 'freq_hi': 'freq_hi', 'scheme': 'point_scheme', 'point_seed': 'point_seed',
    'seed': 'seed', 'sigma_grid': 'sigma_grid', 'replicates': 'replicates', 'test_points': 'n_test',
    'noise': 'noise_mode', 'out': 'out_dir',
}


def _common(p):
    p.add_argument('--config', type=Path, help='key = value file; flags given on the command line take precedence')
    p.add_argument('--system', help="'penzl' or 'path:<dir>' with {E,A,B,C}.mtx")
    p.add_argument('--input-index', type=int, help='1-based input column of B')
    p.add_argument('--output-index', type=int, help='1-based output row of C')
    p.add_argument('--order', type=int, help='reduced order r')
    p.add_argument('--freq-lo', type=float)
    p.add_argument('--freq-hi', type=float)
    p.add_argument('--scheme', choices=['log', 'random'])
    p.add_argument('--point-seed', type=int, help='seed of the random point scheme (default: --seed)')
    p.add_argument('--seed', type=int)
    p.add_argument('--sigma-grid', type=_sigma_grid, help="'a,b,c' or 'lo:hi:n' (log-spaced)")
    p.add_argument('--replicates', type=int)
    p.add_argument('--test-points', type=int)
    p.add_argument('--noise', choices=['relative', 'absolute'])
    p.add_argument('--out', help='output directory')


def build_parser():
    parser = argparse.ArgumentParser(prog='noisyloewner', description=__doc__)
    sub = parser.add_subparsers(dest='command', required=True)
    _common(sub.add_parser('sweep', help='error versus noise level over replicates'))
    audit = sub.add_parser('audit', help='empirical validity of the probabilistic error bound')
    _common(audit)
    audit.add_argument('--at', type=_complex_list, required=True,
                       help="comma-separated evaluation points, e.g. '20j,150j'")
    level = audit.add_mutually_exclusive_group()
    level.add_argument('--sigma', type=float, help='noise level')
    level.add_argument('--sigma-fraction', type=float, default=0.1,
                       help='noise level as a fraction of the smallest sigma_max over --at (default 0.1)')
    audit.add_argument('--draws', type=int, default=2000)
    trace = sub.add_parser('trace', help='|H|, |H_hat|, |H_noisy| on the test grid')
    _common(trace)
    trace.add_argument('--sigma', type=float, default=1e-6)
    _common(sub.add_parser('points', help='write the sampled interpolation data'))
    return parser


def config_from_args(args):
    values = {}
    if args.config is not None:
        values.update(parse_config_text(args.config.read_text()))
    for dest, name in _FIELDS.items():
        value = getattr(args, dest, None)
        if value is not None:
            values[name] = value
    return ExperimentConfig(**values)


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        cfg = config_from_args(args)
        if args.command == 'sweep':
            for row in run_sweep(cfg):
                print(f'sigma={row.sigma:.1e}  mean_err={row.mean_err:.3e}  violated={row.violated_count}')
        elif args.command == 'audit':
            problem = prepare(cfg)
            sigma = args.sigma
            if sigma is None:
                sigma = args.sigma_fraction * min(sigma_max(problem.model, problem.data, s, cfg.noise_mode)
                                                  for s in args.at)
            for row in run_bound_audit(cfg, args.at, sigma, args.draws, problem=problem):
                print(f's={row.s}  sigma={row.sigma:.3e}  violations={row.violations}/{row.draws}  '
                      f'ceiling={row.ceiling:.3e}')
        elif args.command == 'trace':
            rows = run_tf_trace(cfg, args.sigma)
            print(f'max relative gap |H_noisy| vs |H_hat|: {trace_gap(rows):.3e}')
        elif args.command == 'points':
            data = run_points(cfg)
            for name, pts in (('mu', data.points.mu), ('gamma', data.points.gamma)):
                print(name, ' '.join(f'{p:.6g}' for p in pts))
    except LoewnerError as exc:
        print(f'error: {exc}', file=sys.stderr)
        return 2
    return 0

