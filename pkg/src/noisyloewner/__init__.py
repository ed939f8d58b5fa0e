"""Loewner rational interpolation from noisy frequency-response data."""

__version__ = '0.1.0'

from .analysis import (BoundReport, condition_number, deterministic_pert_bound, h2_error, h2_error_details,
                       relative_bound, sigma_max, spectral_norm, theorem_bound, theorem_bounds)
from .errors import *  # noqa: F401,F403
from .experiments import ExperimentConfig, run_bound_audit, run_sweep, run_tf_trace
from .loewner import (FrequencyData, InterpolationSet, LoewnerModel, apply_transform, build_loewner,
                      evaluate_many, evaluate_model, sample_data, select_points_log_conjugate,
                      select_points_random, verify_interpolation)
from .noise import NoiseDraw, PerturbationStructure, delta_matrices, draw_noise, pollute, structure_matrices
from .systems import StateSpaceSystem, load_system, make_penzl, poles_residues, transfer_function
