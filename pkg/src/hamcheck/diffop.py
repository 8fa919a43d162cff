"""Linear differential operators with differential-polynomial coefficients.

An operator is stored expanded, coefficients to the left of pure powers of
the total derivatives: P = sum_J a_J D_J.  ``m*D_x + D_x*m`` is therefore
kept as ``2*m*D_x + m_x*Id`` and operator equality is syntactic.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Dict, Mapping

from .jet import (
    AXIS_NAMES,
    JetExpr,
    MultiIndex,
    as_expr,
    frechet_apply,
    index_binomial,
    jet_derivative,
    sub_indices,
    zero_index,
)


class LinDiffOp:
    __slots__ = ("coeffs", "n")

    def __init__(self, coeffs: Mapping[MultiIndex, JetExpr] | None = None, n: int = 1):
        self.n = n
        self.coeffs: Dict[MultiIndex, JetExpr] = {}
        for j, a in (coeffs or {}).items():
            j = tuple(j)
            if len(j) != n:
                raise ValueError(f"multi-index {j} does not match n={n}")
            a = as_expr(a, n)
            if not a.is_constant() and a.n != n:
                raise ValueError(f"coefficient has n={a.n}, operator has n={n}")
            if a:
                self.coeffs[j] = self.coeffs.get(j, JetExpr.const(0, n)) + a
        self.coeffs = {j: a for j, a in self.coeffs.items() if a}

    @classmethod
    def identity(cls, n: int = 1) -> "LinDiffOp":
        return cls({zero_index(n): JetExpr.const(1, n)}, n)

    @classmethod
    def d(cls, axis: int = 0, n: int = 1) -> "LinDiffOp":
        if not 0 <= axis < n:
            raise ValueError(f"axis {axis} out of range for n={n}")
        j = [0] * n
        j[axis] = 1
        return cls({tuple(j): JetExpr.const(1, n)}, n)

    @classmethod
    def multiplication(cls, a: JetExpr, n: int | None = None) -> "LinDiffOp":
        n = n or a.n
        return cls({zero_index(n): a}, n)

    @property
    def order(self) -> int:
        return max((sum(j) for j in self.coeffs), default=-1)

    def is_zero(self) -> bool:
        return not self.coeffs

    def coefficient(self, index: MultiIndex) -> JetExpr:
        return self.coeffs.get(tuple(index), JetExpr.const(0, self.n))

    def _check(self, other: "LinDiffOp"):
        if self.n != other.n:
            raise ValueError(f"dimension mismatch: n={self.n} vs n={other.n}")

    def __add__(self, other):
        if isinstance(other, (JetExpr, int, Fraction)):
            other = LinDiffOp.multiplication(as_expr(other, self.n), self.n)
        if not isinstance(other, LinDiffOp):
            return NotImplemented
        self._check(other)
        out = dict(self.coeffs)
        for j, a in other.coeffs.items():
            out[j] = out[j] + a if j in out else a
        return LinDiffOp(out, self.n)

    __radd__ = __add__

    def __neg__(self):
        return LinDiffOp({j: -a for j, a in self.coeffs.items()}, self.n)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        # scalar or coefficient multiplication on the left is plain scaling
        if isinstance(other, (int, Fraction, JetExpr)):
            return LinDiffOp({j: a * other for j, a in self.coeffs.items()}, self.n)
        if isinstance(other, LinDiffOp):
            return compose(self, other)
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction, JetExpr)):
            return LinDiffOp({j: other * a for j, a in self.coeffs.items()}, self.n)
        return NotImplemented

    def __matmul__(self, other):
        return compose(self, other)

    def __call__(self, e) -> JetExpr:
        return apply(self, e)

    def __eq__(self, other):
        if not isinstance(other, LinDiffOp):
            return NotImplemented
        return self.n == other.n and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.n, frozenset(self.coeffs.items())))

    def __str__(self):
        if not self.coeffs:
            return "0"
        order = sorted(self.coeffs, key=lambda j: (-sum(j), tuple(-a for a in j)))
        pieces = []
        for i, j in enumerate(order):
            a = self.coeffs[j]
            powers = [
                f"D_{AXIS_NAMES[k]}" if p == 1 else f"D_{AXIS_NAMES[k]}^{p}"
                for k, p in enumerate(j)
                if p
            ] or ["Id"]
            neg = len(a.terms) == 1 and next(iter(a.terms.values())) < 0
            shown = -a if neg else a
            if shown == 1:
                body = "*".join(powers)
            elif len(shown.terms) == 1:
                body = f"{shown}*" + "*".join(powers)
            else:
                body = f"({shown})*" + "*".join(powers)
            if i == 0:
                pieces.append(("-" if neg else "") + body)
            else:
                pieces.append(f" {'-' if neg else '+'} {body}")
        return "".join(pieces)

    def __repr__(self):
        return f"LinDiffOp({str(self)!r}, n={self.n})"


def apply(P: LinDiffOp, e) -> JetExpr:
    """P(e) = sum_J a_J D_J(e), expanded."""
    e = as_expr(e, P.n)
    if not e.is_constant() and e.n != P.n:
        raise ValueError(f"dimension mismatch: operator n={P.n}, expression n={e.n}")
    out = JetExpr.const(0, P.n)
    for j, a in P.coeffs.items():
        out = out + a * jet_derivative(e, j)
    return out


def compose(P: LinDiffOp, Q: LinDiffOp) -> LinDiffOp:
    """P o Q, moving every D_J of P past the coefficients of Q (Leibniz)."""
    P._check(Q)
    out: Dict[MultiIndex, JetExpr] = {}
    for j, a in P.coeffs.items():
        for k, b in Q.coeffs.items():
            for l in sub_indices(j):
                c = index_binomial(j, l)
                term = a * jet_derivative(b, l) * c
                if not term:
                    continue
                idx = tuple(x - y + z for x, y, z in zip(j, l, k))
                out[idx] = out[idx] + term if idx in out else term
    return LinDiffOp(out, P.n)


def adjoint(P: LinDiffOp) -> LinDiffOp:
    """Formal L2 adjoint: a_J D_J -> (-D)_J o a_J, re-expanded."""
    out: Dict[MultiIndex, JetExpr] = {}
    for j, a in P.coeffs.items():
        sign = -1 if sum(j) % 2 else 1
        for l in sub_indices(j):
            term = jet_derivative(a, l) * (sign * index_binomial(j, l))
            if not term:
                continue
            idx = tuple(x - y for x, y in zip(j, l))
            out[idx] = out[idx] + term if idx in out else term
    return LinDiffOp(out, P.n)


def skew_defect(P: LinDiffOp) -> LinDiffOp:
    """P + P*, the zero operator exactly when P is skew-adjoint."""
    return P + adjoint(P)


def is_skew(P: LinDiffOp) -> bool:
    return skew_defect(P).is_zero()


def op_frechet(P: LinDiffOp, v: str, direction) -> LinDiffOp:
    """Frechet derivative of P(v) in ``direction``: coefficient-wise linearization."""
    direction = as_expr(direction, P.n)
    return LinDiffOp({j: frechet_apply(a, v, direction) for j, a in P.coeffs.items()}, P.n)
