"""Evolutionary dynamics on the simplex: incentives, geometries, time scales."""

from .simplex import (SimplexPoint, GameMatrix, FitnessLandscape, rsp_matrix,
                      linear_fitness, mean_fitness, barycenter, as_state)
from .incentives import (IncentiveSpec, evaluate_incentive, best_reply,
                         effective_landscape, zero_sum_reduce)
from .escorts import (EscortSpec, escort_log, escort_exp, escort_divergence,
                      q_divergence, kl_divergence, escort_weights)
from .metrics import (MetricField, ghat, adaptive_coefficients, metric_log,
                      metric_divergence)
from .dynamics import (TimeScaleSpec, DynamicSpec, Trajectory, MultiPopSpec,
                       BoundaryEvent, delta_step, vector_field,
                       ts_replicator_step, best_reply_step, run_trajectory,
                       multipop_step, run_multipop, common_times,
                       uniform_mutation_matrix)
from .stability import (ess_check, iss_check, eiss_check, g_iss_check,
                        lyapunov_trace, multipop_lyapunov_trace, LyapunovTrace,
                        region_scan, simplex_grid, classify_incentive,
                        IncentiveClassification, convergence_detect,
                        neighborhood_report, StabilityReport, make_divergence)
from .errors import (EvodynError, DomainError, EvaluationError, GeometryError,
                     UnsupportedKindError, ConfigError)

__version__ = "0.1.0"
