"""Delayed predator-prey model: integrator, equilibria, stability and sweeps."""
from .ddesolve import (EventRecord, EventRule, HistorySpec, IntegrationError, Target,
                       Trajectory, dense_eval, integrate)
from .model import (Equilibrium, EquilibriumKind, ModelParams, State, equilibrium_gap,
                    find_equilibria, functional_response, positive_existence_condition, rhs)
from .scenarios import (GridSpec, GridSummary, TrajectoryCategory, classify_trajectory,
                        run_grid, run_scenario)
from .stability import (CharCoefficients, CrossingSet, Linearization, StabilityVerdict, Status,
                        char_coefficients, char_residual, classify_equilibrium,
                        count_unstable_roots, crossing_set, linearize, omega_candidates)

__version__ = "0.1.0"
