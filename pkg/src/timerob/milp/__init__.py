"""Mixed-integer linear models for STL satisfaction and temporal robustness."""
from .encode import (
    EncodingError,
    EncodingIndex,
    Encoder,
    StateVars,
    encode_boolean,
    fixed_state,
    linearize_product,
    milp_async,
    milp_sync,
    state_variables,
)
from .lpformat import export_lp, lp_text, read_lp, write_lp
from .model import LinExpr, MilpModel, ModelError, Sense, Var, VarKind
from .solver import Budget, Solution, SolverError, Status, solve, solve_external, solve_highs

__all__ = [
    "Budget", "Encoder", "EncodingError", "EncodingIndex", "LinExpr", "MilpModel",
    "ModelError", "Sense", "Solution", "SolverError", "StateVars", "Status", "Var",
    "VarKind", "encode_boolean", "export_lp", "fixed_state", "linearize_product",
    "lp_text", "milp_async", "milp_sync", "read_lp", "solve", "solve_external", "solve_highs",
    "state_variables", "write_lp",
]
