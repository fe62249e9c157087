"""Error bounds and sampling plans for truncated sinc-series reconstruction
of non-bandlimited stationary signals, with exact and Monte Carlo checks."""

from .bounds import (BoundBreakdown, SamplingScheme, a_n, a_n_auto, a_tilde, c_n, d_n,
                     s_np, s_np_upper, si_pi, tail_probability, validity_threshold)
from .exceptions import (CapacityError, DomainError, NumericalError, PlanningInfeasible,
                         ValidityError, WKSError)
from .orlicz import GAUSSIAN, OrliczFunction, PowerOrlicz
from .planner import PlanRequest, PlanResult, Schedule, plan, plan_sweep, required_rhs
from .simulate import (McConfig, empirical_lp_exceedance, empirical_sup_rms, simulate_cholesky,
                       simulate_markov)
from .spectral import MaternHalfModel, NormalizedTailModel, TabulatedDensityModel
from .wks import SampleSet, exact_mse, reconstruct, reconstruct_grid, sinc_kernel

__version__ = "0.1.0"

__all__ = [
    "BoundBreakdown",
    "SamplingScheme",
    "a_n",
    "a_n_auto",
    "a_tilde",
    "c_n",
    "d_n",
    "s_np",
    "s_np_upper",
    "si_pi",
    "tail_probability",
    "validity_threshold",
    "CapacityError",
    "DomainError",
    "NumericalError",
    "PlanningInfeasible",
    "ValidityError",
    "WKSError",
    "McConfig",
    "empirical_lp_exceedance",
    "empirical_sup_rms",
    "simulate_cholesky",
    "simulate_markov",
    "GAUSSIAN",
    "OrliczFunction",
    "PowerOrlicz",
    "PlanRequest",
    "PlanResult",
    "Schedule",
    "plan",
    "plan_sweep",
    "required_rhs",
    "MaternHalfModel",
    "NormalizedTailModel",
    "TabulatedDensityModel",
    "SampleSet",
    "exact_mse",
    "reconstruct",
    "reconstruct_grid",
    "sinc_kernel",
]
