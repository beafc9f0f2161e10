"""Integral control of the mean dimer count in a stochastic dimerization network."""
from .controller import ControllerState, control_output, integrate_error
from .ergodicity import DriftCertificate, certify_drift, moment_bound
from .moments import (ConstantVariance, MomentState, TabulatedVariance, ZeroVariance,
                      integrate_closed_loop, integrate_open, moment_rhs)
from .network import CellState, NetworkParams, apply_reaction, generator_apply, propensities
from .ssa import (EnsembleTrace, SimulationConfig, run_closed_loop, simulate_cell_segment,
                  stationary_sweep)
from .stability import (EquilibriumReport, ParamBox, demo_linear_fallacy, gain_bound_case,
                        jacobian, robust_gain_bound, routh_hurwitz_3x3, solve_equilibrium,
                        uniform_gain_bound, variance_bound)

__version__ = "0.1.0"
