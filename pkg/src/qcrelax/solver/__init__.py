"""Built-in LP simplex, binary branch and bound, and MIQCQP primal recovery."""
from .bnb import MipResult, SolveLimits, compute_gap, solve_mip
from .lp import LpProblem, SimplexState, solve_lp
from .recovery import RecoveryResult, primal_recovery

__all__ = ["LpProblem", "SimplexState", "solve_lp", "SolveLimits", "MipResult", "solve_mip",
           "compute_gap", "RecoveryResult", "primal_recovery"]
