"""Piecewise MIP relaxations of box-bounded MIQCQPs with a small built-in MIP solver."""
from .errors import (ConfigError, DomainError, NonFiniteBounds, NumericalFailure, ParseError, QcRelaxError,
                     ValidationError, ValidationFailure)
from .model import (Interval, Method, MipModel, MiqcqpInstance, QuadConstraint, RelaxConfig, Solution, Status,
                    default_tightening_depth)
from .relaxer import RelaxationResult, build_relaxation, predict_counts, validate_relaxation
from .solver import MipResult, SolveLimits, primal_recovery, solve_lp, solve_mip

__version__ = "0.1.0"

__all__ = ["ConfigError", "DomainError", "NonFiniteBounds", "NumericalFailure", "ParseError", "QcRelaxError",
           "ValidationError", "ValidationFailure", "Interval", "Method", "MipModel", "MiqcqpInstance",
           "QuadConstraint", "RelaxConfig", "Solution", "Status", "default_tightening_depth",
           "RelaxationResult", "build_relaxation", "predict_counts", "validate_relaxation", "MipResult",
           "SolveLimits", "primal_recovery", "solve_lp", "solve_mip"]
