"""Poisson brackets of local functionals {F, G} = int dF * P dG.

The Jacobi identity is decided with auxiliary densities standing in for the
variational gradients: P is Hamiltonian iff the cyclic sum
``xi * (D_{P zeta} P) eta + ...`` is a total divergence in the jet space of
(state, xi, eta, zeta).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, NamedTuple, Sequence, Tuple

from .diffop import LinDiffOp, apply, is_skew, op_frechet, skew_defect
from .jet import (
    DOMAINS,
    JetExpr,
    LocalFunctional,
    equal_mod_div,
    euler_operator,
    substitute,
    zero_index,
)


class SkewnessError(ValueError):
    """Raised when an operation needs a skew-adjoint operator and P is not."""

    def __init__(self, defect: LinDiffOp):
        self.defect = defect
        super().__init__(f"operator is not skew-adjoint: P + P* = {defect}")


@dataclass(frozen=True)
class BracketStructure:
    operator: LinDiffOp
    state: str
    domain: str = "S1"

    def __post_init__(self):
        if DOMAINS.get(self.domain) != self.operator.n:
            raise ValueError(f"operator with n={self.operator.n} does not live on {self.domain}")

    @property
    def n(self) -> int:
        return self.operator.n

    @property
    def skew(self) -> bool:
        return is_skew(self.operator)

    def require_skew(self):
        defect = skew_defect(self.operator)
        if not defect.is_zero():
            raise SkewnessError(defect)

    def gradient(self, F: LocalFunctional) -> JetExpr:
        if F.domain != self.domain:
            raise ValueError(f"functional on {F.domain}, bracket on {self.domain}")
        return euler_operator(F.density, self.state)


@dataclass
class JacobiReport:
    passed: bool
    residual: JetExpr
    cyclic_sum: JetExpr
    intermediate: LinDiffOp
    auxiliaries: Tuple[str, ...] = field(default=())

    @property
    def verdict(self) -> str:
        return "pass" if self.passed else "fail"


class CasimirResult(NamedTuple):
    is_casimir: bool
    residual: JetExpr


def _fresh_names(taken: Iterable[str], wanted: Sequence[str]) -> Tuple[str, ...]:
    taken = set(taken)
    out = []
    for name in wanted:
        candidate, k = name, 1
        while candidate in taken:
            candidate = f"{name}{k}"
            k += 1
        taken.add(candidate)
        out.append(candidate)
    return tuple(out)


def _operator_names(P: LinDiffOp) -> set:
    return {name for a in P.coeffs.values() for name in a.dependent_names()}


def bracket_density(B: BracketStructure, F: LocalFunctional, G: LocalFunctional) -> LocalFunctional:
    """{F, G} as a local functional with density dF * P(dG)."""
    B.require_skew()
    density = B.gradient(F) * apply(B.operator, B.gradient(G))
    return LocalFunctional(density, B.domain)


def jacobi_check(B: BracketStructure) -> JacobiReport:
    B.require_skew()
    P, n = B.operator, B.n
    taken = _operator_names(P) | {B.state}
    xi_name, eta_name, zeta_name, theta_name = _fresh_names(taken, ("xi", "eta", "zeta", "theta"))
    xi, eta, zeta, theta = (
        JetExpr.var(name, zero_index(n)) for name in (xi_name, eta_name, zeta_name, theta_name)
    )

    def term(a, b, c):
        return a * apply(op_frechet(P, B.state, apply(P, c)), b)

    cyclic = term(xi, eta, zeta) + term(eta, zeta, xi) + term(zeta, xi, eta)
    passed = equal_mod_div(cyclic, 0)
    return JacobiReport(
        passed=passed,
        residual=JetExpr.const(0, n) if passed else cyclic,
        cyclic_sum=cyclic,
        intermediate=op_frechet(P, B.state, apply(P, theta)),
        auxiliaries=(xi_name, eta_name, zeta_name, theta_name),
    )


def casimir_check(B: BracketStructure, C: LocalFunctional) -> CasimirResult:
    """C is a Casimir iff P(dC) vanishes identically."""
    B.require_skew()
    residual = apply(B.operator, B.gradient(C))
    return CasimirResult(residual.is_zero(), residual)


def derive_evolution(
    B: BracketStructure,
    gradH,
    substitutions: Iterable[Tuple[str, JetExpr]] | None = None,
) -> JetExpr:
    """Right-hand side of state_t = P(gradH), optionally rewritten by substitutions.

    ``gradH`` is either a LocalFunctional (its variational derivative is
    taken) or a gradient expression supplied directly, as needed when the
    Hamiltonian is nonlocal in the state variable.
    """
    B.require_skew()
    if isinstance(gradH, LocalFunctional):
        gradH = B.gradient(gradH)
    rhs = apply(B.operator, gradH)
    for name, replacement in substitutions or ():
        rhs = substitute(rhs, name, replacement)
    return rhs
