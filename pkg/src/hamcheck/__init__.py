from .jet import (
    JetExpr, JetVar, LocalFunctional, boundary_flux_1d, equal_mod_div, euler_operator,
    frechet_apply, higher_euler_operator, jet_derivative, substitute, symbols, total_derivative,
)
from .diffop import LinDiffOp, adjoint, apply, compose, is_skew, op_frechet
from .bracket import (
    BracketStructure, CasimirResult, JacobiReport, SkewnessError, bracket_density,
    casimir_check, derive_evolution, jacobi_check,
)
