"""Monte-Carlo check of the probabilistic error bound on the Penzl model."""
import math

from noisyloewner import make_penzl, sigma_max, theorem_bound
from noisyloewner.experiments import ExperimentConfig, prepare, run_bound_audit

cfg = ExperimentConfig()
problem = prepare(cfg, make_penzl())

# The bound is only guaranteed below sigma_max, which depends on s
for s in (20j, 150j, 700j):
    smax = sigma_max(problem.model, problem.data, s)
    rep = theorem_bound(problem.model, problem.data, s, smax / 10)
    print(f's = {s}: sigma_max = {smax:.2e}, kappa2 = {rep.kappa2:.2e}, bound at sigma_max/10 = {rep.bound_abs:.2e}')

    (row,) = run_bound_audit(cfg, [s], smax / 10, 2000, problem=problem)
    print(f'   {row.violations}/{row.draws} draws exceed the bound (largest error {row.max_error:.2e})')

print(f'guaranteed failure probability at most 4 exp(-r/2) = {4 * math.exp(-cfg.r / 2):.2e}')
