"""Equivalent realisations share a transfer function but not a condition number.

The bounds are driven by kappa2(sE - A), so they depend on the realisation.
Diagonal scaling can make this number larger or smaller without changing H.
"""
import numpy as np

from noisyloewner import (apply_transform, build_loewner, condition_number, evaluate_model, make_penzl,
                          sample_data, select_points_log_conjugate)

model = build_loewner(sample_data(make_penzl(), select_points_log_conjugate(10, 1000, 16)))
s = 100j

# Equilibrate rows and columns of the pencil at s
G = np.abs(model.pencil(s))
D1 = np.diag(1 / np.sqrt(G.max(axis=1)))
D2 = np.diag(1 / np.sqrt((D1 @ G).max(axis=0)))
scaled = apply_transform(model, D1, D2)

rng = np.random.default_rng(0)
D3 = np.diag(10.0 ** rng.uniform(-3, 3, model.order))
skewed = apply_transform(model, D3, np.eye(model.order))

for name, m in (('original', model), ('equilibrated', scaled), ('random skew', skewed)):
    print(f'{name:13s} kappa2 = {condition_number(m, s):.3e}   H_hat(s) = {evaluate_model(m, s):.10f}')
