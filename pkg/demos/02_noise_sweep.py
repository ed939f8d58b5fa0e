"""Error of the noisy Loewner model versus noise level, for two point schemes.

Log-conjugate points on the imaginary axis keep the pencil well conditioned and
the error grows linearly in sigma. Random off-axis points give models whose
admissibility condition fails everywhere, even at sigma = 1e-15.
"""
from noisyloewner import make_penzl
from noisyloewner.experiments import ExperimentConfig, prepare, run_sweep

penzl = make_penzl()
for scheme in ('log', 'random'):
    cfg = ExperimentConfig(point_scheme=scheme, seed=0)
    rows = run_sweep(cfg, prepare(cfg, penzl))
    print(f'\n{scheme} points')
    print('   sigma     mean e(sigma)   e/sigma   #points violating')
    for row in rows[::2]:
        print(f'{row.sigma:8.0e}   {row.mean_err:12.3e}  {row.mean_err / row.sigma:8.2e}   {row.violated_count:4d}')

# Pass out_dir to write sweep.csv, violations.csv and plot_sweep.py:
#   run_sweep(ExperimentConfig(out_dir='runs/log'))
