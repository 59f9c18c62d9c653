"""Sparse simulation of finite-dimensional registers."""

from .layout import ROLES, LayoutError, Register, RegisterLayout
from .ops import (FourierTransform, GlobalPhase, GroupExponentiation, LocalUnitary, PermutationMark,
                  PhasePredicate, PhaseZero, PrimitiveOp)
from .predicates import Constant, Predicate, RegisterEquals, RegisterIn
from .program import (STATE_CACHE, ReversibleProgram, apply_op, marginal, measure, run_program, simulate,
                      success_probability)
from .state import DENSE_CAP, NORM_MONITOR, NORM_TOL, PRUNE_TOL, NumericalInvariantError, SparseState

__all__ = [
    "ROLES", "LayoutError", "Register", "RegisterLayout",
    "FourierTransform", "GlobalPhase", "GroupExponentiation", "LocalUnitary", "PermutationMark",
    "PhasePredicate", "PhaseZero", "PrimitiveOp",
    "Constant", "Predicate", "RegisterEquals", "RegisterIn",
    "STATE_CACHE", "ReversibleProgram", "apply_op", "marginal", "measure", "run_program", "simulate",
    "success_probability",
    "DENSE_CAP", "NORM_MONITOR", "NORM_TOL", "PRUNE_TOL", "NumericalInvariantError", "SparseState",
]
