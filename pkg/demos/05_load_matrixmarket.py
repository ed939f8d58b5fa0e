"""Run a sweep on a system stored as MatrixMarket files.

Usage: python3 demos/05_load_matrixmarket.py DIR [INPUT OUTPUT]

DIR holds A.mtx, B.mtx, C.mtx and optionally E.mtx. For the CD player use
input 1 and output 2 with frequencies in [2 pi, 200 pi] and r = 20. Without
arguments a small random system is written to a temporary directory first.
"""
import sys
import tempfile
from pathlib import Path

import numpy as np
import scipy.io

from noisyloewner import load_system
from noisyloewner.experiments import ExperimentConfig, run_sweep

if len(sys.argv) > 1:
    path = Path(sys.argv[1])
    inp, out = (int(x) for x in sys.argv[2:4]) if len(sys.argv) > 3 else (1, 1)
    cfg = ExperimentConfig(system=f'path:{path}', input_index=inp, output_index=out, r=20,
                           freq_lo=2 * np.pi, freq_hi=200 * np.pi)
else:
    path = Path(tempfile.mkdtemp())
    # a miniature Penzl-like system: three spirals plus four real modes
    A = np.zeros((10, 10))
    for k, w in enumerate((2.0, 5.0, 9.0)):
        A[2 * k:2 * k + 2, 2 * k:2 * k + 2] = [[-0.2, w], [-w, -0.2]]
    A[6:, 6:] = np.diag([-1.0, -2.0, -3.0, -4.0])
    B = np.ones((10, 1))
    scipy.io.mmwrite(str(path / 'A.mtx'), A)
    scipy.io.mmwrite(str(path / 'B.mtx'), B)
    scipy.io.mmwrite(str(path / 'C.mtx'), B.T)
    inp = out = 1
    cfg = ExperimentConfig(system=f'path:{path}', r=6, freq_lo=0.5, freq_hi=20)

system = load_system(path, inp, out)
print(f'loaded order-{system.order} system from {path}')
for row in run_sweep(cfg):
    print(f'sigma = {row.sigma:7.0e}   mean error = {row.mean_err:.3e}   violated = {row.violated_count}')
