import math

import numpy as np
import pytest

from noisyloewner import ConfigError, InadmissiblePoint, InterpolationSet, sample_data, build_loewner
from noisyloewner.experiments import (ExperimentConfig, Problem, config_to_lines, noisy_values, parse_config_text,
                                      prepare, run_bound_audit, run_points, run_sweep, run_tf_trace,
                                      sigma_max_profile, trace_gap)
import noisyloewner.experiments as experiments


@pytest.fixture
def small_cfg(small_system_dir, tmp_path):
    return ExperimentConfig(system=f'path:{small_system_dir}', r=6, freq_lo=0.1, freq_hi=10.0, n_test=40,
                            sigma_grid=(1e-12, 1e-8, 1e-4, 1.0), replicates=4, seed=3, out_dir=str(tmp_path / 'out'))


class TestConfig:
    @pytest.mark.parametrize('kwargs', [
        {'sigma_grid': ()}, {'sigma_grid': (1e-3, 1e-4)}, {'sigma_grid': (0.0, 1.0)}, {'replicates': 0},
        {'n_test': 0}, {'point_scheme': 'grid'}, {'noise_mode': 'pink'}, {'system': 'cd'},
        {'freq_lo': 10.0, 'freq_hi': 1.0},
    ])
    def test_invalid(self, kwargs):
        with pytest.raises(ConfigError):
            ExperimentConfig(**kwargs)

    def test_defaults(self):
        cfg = ExperimentConfig()
        assert cfg.n_test == 200 and cfg.replicates == 10 and len(cfg.sigma_grid) == 21
        assert cfg.sigma_grid[0] == pytest.approx(1e-15) and cfg.sigma_grid[-1] == pytest.approx(1e5)

    def test_text_roundtrip(self):
        cfg = ExperimentConfig(r=8, point_scheme='random', point_seed=5, sigma_grid=(1e-3, 0.1), noise_mode='absolute')
        assert ExperimentConfig(**parse_config_text('\n'.join(config_to_lines(cfg)))) == cfg

    def test_text_errors(self):
        with pytest.raises(ConfigError):
            parse_config_text('bogus = 1')
        with pytest.raises(ConfigError):
            parse_config_text('r 16')
        with pytest.raises(ConfigError):
            parse_config_text('r = many')
        assert parse_config_text('# comment\n\nversion = 9\nr = 4  # order\n') == {'r': 4}


class TestSweep:
    def test_rows(self, small_cfg):
        rows = run_sweep(small_cfg)
        assert [row.sigma for row in rows] == list(small_cfg.sigma_grid)
        for row in rows:
            assert row.min_err <= row.mean_err <= row.max_err
            assert 0 <= row.violated_count <= small_cfg.n_test
            assert len(row.replicate_errors) == small_cfg.replicates
            # replicate order does not matter
            assert row.mean_err == pytest.approx(np.mean(row.replicate_errors[::-1]), rel=1e-15)

    def test_outputs(self, small_cfg):
        run_sweep(small_cfg)
        out = experiments.Path(small_cfg.out_dir)
        for name in ('sweep.csv', 'violations.csv', 'sigma_max.csv', 'skipped.csv', 'plot_sweep.py', 'manifest.txt'):
            assert (out / name).exists()
        manifest = (out / 'manifest.txt').read_text()
        assert 'version = 0.1.0' in manifest and 'seed = 3' in manifest
        header = (out / 'sweep.csv').read_text().splitlines()[0]
        assert header.startswith('sigma,mean_err,min_err,max_err,violated_count,skipped,err_rep0')
        compile((out / 'plot_sweep.py').read_text(), 'plot_sweep.py', 'exec')

    def test_violations_independent_of_noise(self, small_cfg):
        from dataclasses import replace
        a = run_sweep(replace(small_cfg, out_dir=None))
        b = run_sweep(replace(small_cfg, seed=99, out_dir=None))
        assert [row.violated_count for row in a] == [row.violated_count for row in b]
        assert [row.mean_err for row in a] != [row.mean_err for row in b]

    def test_vanishing_noise(self, small_cfg):
        from dataclasses import replace
        cfg = replace(small_cfg, sigma_grid=(1e-300,), replicates=1, out_dir=None)
        problem = prepare(cfg)
        (row,) = run_sweep(cfg, problem)
        assert row.mean_err <= 1e-12 * np.abs(problem.h_hat).max()

    def test_skipped_points(self, small_cfg, monkeypatch):
        real = experiments.noisy_values

        def with_hole(problem, sigma, draws):
            vals = real(problem, sigma, draws)
            vals[0, 2] = np.nan
            return vals

        monkeypatch.setattr(experiments, 'noisy_values', with_hole)
        rows = run_sweep(small_cfg)
        assert all(row.skipped == 1 for row in rows)
        lines = (experiments.Path(small_cfg.out_dir) / 'skipped.csv').read_text().splitlines()
        assert lines[0] == 'sigma,replicate,test_index' and len(lines) == 1 + len(rows)
        assert all(math.isfinite(row.mean_err) for row in rows)

    def test_penzl_linear_region(self, penzl_problem):
        cfg = ExperimentConfig(sigma_grid=(1e-14, 1e-12, 1e-10, 1e-4), replicates=3)
        rows = run_sweep(cfg, penzl_problem)
        assert [row.violated_count for row in rows] == [0, 0, 0, 200]
        slope = np.polyfit(np.log10([r.sigma for r in rows[:3]]), np.log10([r.mean_err for r in rows[:3]]), 1)[0]
        assert 0.9 <= slope <= 1.1


class TestAudit:
    def test_zero_draws(self, small_cfg):
        assert run_bound_audit(small_cfg, [1j], 1e-9, 0) == []

    def test_inadmissible(self, small_cfg):
        with pytest.raises(InadmissiblePoint) as info:
            run_bound_audit(small_cfg, [1j, 2j], 1e3, 10)
        assert info.value.points == (1j, 2j)

    def test_small_system(self, small_cfg):
        problem = prepare(small_cfg)
        s_list = [0.5j, 3j]
        smax = min(sigma_max_profile(Problem(small_cfg, problem.system, problem.data, problem.model,
                                             np.array(s_list), problem.h_hat[:2]))[0])
        rows = run_bound_audit(small_cfg, s_list, smax / 10, 200, problem=problem)
        assert [row.s for row in rows] == s_list
        for row in rows:
            assert row.draws == 200 and row.ceiling == pytest.approx(4 * math.exp(-3))
            assert row.frequency == row.violations / 200
        assert (experiments.Path(small_cfg.out_dir) / 'audit.csv').exists()

    def test_scalar_example(self, scalar_sys, capsys):
        # reported only: the probability floor is vacuous at r = 1
        cfg = ExperimentConfig(r=1, seed=0)
        pts = InterpolationSet([1j], [-1j])
        data = sample_data(scalar_sys, pts)
        model = build_loewner(data)
        problem = Problem(cfg, scalar_sys, data, model, np.array([0j]), np.array([1.0 + 0j]))
        (row,) = run_bound_audit(cfg, [0j], 1e-3, 2000, problem=problem)
        with capsys.disabled():
            print(f'\nscalar audit: {row.violations}/{row.draws} violations (ceiling {row.ceiling:.3f})')
        assert row.draws == 2000


class TestTrace:
    def test_penzl_log_overlay(self, penzl_problem):
        rows = run_tf_trace(ExperimentConfig(), 1e-6, penzl_problem, full_order=False)
        assert len(rows) == 200 and all(math.isnan(row.abs_h) for row in rows)
        assert trace_gap(rows) <= 1e-2

    def test_random_points_less_robust(self, penzl, penzl_problem):
        log_gap = trace_gap(run_tf_trace(ExperimentConfig(), 1e-6, penzl_problem, full_order=False))
        cfg = ExperimentConfig(point_scheme='random', seed=0)
        rand_gap = trace_gap(run_tf_trace(cfg, 1e-6, prepare(cfg, penzl), full_order=False))
        assert rand_gap > log_gap

    def test_zero_sigma(self, small_cfg):
        rows = run_tf_trace(small_cfg, 0.0)
        for row in rows:
            assert row.abs_h_noisy == pytest.approx(row.abs_h_hat, rel=1e-12)
            assert math.isfinite(row.abs_h) and row.abs_h > 0
        out = experiments.Path(small_cfg.out_dir)
        assert (out / 'trace.csv').exists() and 'trace_sigma = 0.0' in (out / 'manifest.txt').read_text()
        compile((out / 'plot_trace.py').read_text(), 'plot_trace.py', 'exec')


class TestPoints:
    def test_points_file(self, small_cfg):
        data = run_points(small_cfg)
        assert data.r == 6
        lines = (experiments.Path(small_cfg.out_dir) / 'data.csv').read_text().splitlines()
        assert len(lines) == 13

    def test_noisy_values_shape(self, small_cfg):
        from noisyloewner import draw_noise
        problem = prepare(small_cfg)
        vals = noisy_values(problem, 1e-6, [draw_noise(6, 0, key=(k,)) for k in range(3)])
        assert vals.shape == (3, small_cfg.n_test)
