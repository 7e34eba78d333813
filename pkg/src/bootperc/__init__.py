"""Majority bootstrap percolation on G(n, p)."""

from .analytics import (AnalyticParams, RootResult, chernoff_lower, chernoff_upper,
                        classify_regime, delta_upper_bound, expected_R_bound, f_c_theta,
                        find_x0, g_of_c, pi_plus_exact, pi_plus_poisson, pi_upper_first_mark,
                        subcritical_bound)
from .engine import (ActivationRule, ExplorationState, InitialSpec, Trajectory,
                     final_active_fixed_point, iter_exploration, run_percolation,
                     run_with_order)
from .graph import GraphSample, InvalidParameter, degree_histogram, sample_gnp
from .harness import (EnsembleSummary, ExperimentConfig, compare_to_analytic, run_ensemble,
                      sweep_transition)

__version__ = "0.1.0"
