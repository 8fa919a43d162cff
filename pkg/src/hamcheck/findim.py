"""Lie-Poisson structure on so(3)* and the rigid body.

The bracket is {f, g}(m) = m . (grad f x grad g).  With H = 1/2 sum m_k^2/I_k
the flow is m' = m x omega, omega_k = m_k / I_k, which reproduces Euler's
equations I_1 w1' = (I_2 - I_3) w2 w3 (and cyclic) literally.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Sequence, Tuple

import numpy as np

Exponent = Tuple[int, int, int]


class Poly3:
    """Polynomial in m1, m2, m3 with exact rational coefficients."""

    __slots__ = ("terms",)

    def __init__(self, terms: Dict[Exponent, Fraction] | None = None):
        self.terms = {tuple(e): Fraction(c) for e, c in (terms or {}).items() if c}

    @classmethod
    def coordinate(cls, k: int) -> "Poly3":
        e = [0, 0, 0]
        e[k] = 1
        return cls({tuple(e): 1})

    @classmethod
    def const(cls, c) -> "Poly3":
        return cls({(0, 0, 0): c})

    @classmethod
    def monomials(cls, max_degree: int):
        """Every monomial m1^a m2^b m3^c with a + b + c <= max_degree."""
        return [
            cls({(a, b, c): 1})
            for d in range(max_degree + 1)
            for a in range(d + 1)
            for b in range(d - a + 1)
            for c in [d - a - b]
        ]

    def _lift(self, other):
        if isinstance(other, Poly3):
            return other
        if isinstance(other, (int, Fraction)):
            return Poly3.const(other)
        return NotImplemented

    def __add__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = out.get(e, 0) + c
        return Poly3(out)

    __radd__ = __add__

    def __neg__(self):
        return Poly3({e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        out: Dict[Exponent, Fraction] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = (e1[0] + e2[0], e1[1] + e2[1], e1[2] + e2[2])
                out[e] = out.get(e, 0) + c1 * c2
        return Poly3(out)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        out = Poly3.const(1)
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def is_zero(self) -> bool:
        return not self.terms

    def diff(self, k: int) -> "Poly3":
        out = {}
        for e, c in self.terms.items():
            if e[k]:
                f = list(e)
                f[k] -= 1
                out[tuple(f)] = c * e[k]
        return Poly3(out)

    def grad(self):
        return tuple(self.diff(k) for k in range(3))

    def __call__(self, m):
        return sum(c * m[0] ** e[0] * m[1] ** e[1] * m[2] ** e[2] for e, c in self.terms.items())

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for e, c in sorted(self.terms.items(), key=lambda t: (sum(t[0]), t[0]), reverse=True):
            factors = [f"m{k + 1}" if p == 1 else f"m{k + 1}^{p}" for k, p in enumerate(e) if p]
            parts.append("*".join(([str(c)] if c != 1 or not factors else []) + factors))
        return " + ".join(parts).replace("+ -", "- ")

    __repr__ = __str__


M1, M2, M3 = (Poly3.coordinate(k) for k in range(3))


def cross(a, b):
    return (
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    )


def so3_bracket(f: Poly3, g: Poly3) -> Poly3:
    """{f, g} = m . (grad f x grad g)."""
    c = cross(f.grad(), g.grad())
    return M1 * c[0] + M2 * c[1] + M3 * c[2]


@dataclass(frozen=True)
class RigidBodyState:
    m: Tuple
    inertia: Tuple

    def __post_init__(self):
        if len(self.m) != 3 or len(self.inertia) != 3:
            raise ValueError("rigid body state needs three momenta and three moments of inertia")
        if any(i <= 0 for i in self.inertia):
            raise ValueError("moments of inertia must be positive")

    @property
    def omega(self):
        return tuple(mk / ik for mk, ik in zip(self.m, self.inertia))

    def energy(self):
        return sum(mk * mk / ik for mk, ik in zip(self.m, self.inertia)) / 2

    def casimir(self):
        return sum(mk * mk for mk in self.m)


def rigid_body_rhs(s: RigidBodyState):
    """dm/dt = m x omega.  Exact when the state holds Fractions."""
    return cross(s.m, s.omega)


def hamiltonian_poly(inertia: Sequence) -> Poly3:
    i1, i2, i3 = (Fraction(i) for i in inertia)
    return M1 ** 2 * (1 / (2 * i1)) + M2 ** 2 * (1 / (2 * i2)) + M3 ** 2 * (1 / (2 * i3))


CASIMIR = M1 ** 2 + M2 ** 2 + M3 ** 2


class InnerSolveError(RuntimeError):
    def __init__(self, step: int, residual: float):
        self.step = step
        self.residual = residual
        super().__init__(f"implicit midpoint solve did not converge at step {step} (residual {residual:.3e})")


@dataclass
class RigidBodyTrajectory:
    t: np.ndarray
    m: np.ndarray  # shape (steps + 1, 3)
    H: np.ndarray
    C: np.ndarray
    inertia: Tuple[float, float, float]
    dt: float

    def relative_drift(self, name: str) -> float:
        series = getattr(self, name)
        return float(np.max(np.abs(series - series[0])) / abs(series[0]))

    def to_csv(self, path_or_file):
        header = f"# rigid-body I={','.join(map(str, self.inertia))} dt={self.dt} T={self.t[-1]}"
        own = isinstance(path_or_file, str)
        fh = open(path_or_file, "w", newline="") if own else path_or_file
        try:
            fh.write(header + "\n")
            w = csv.writer(fh)
            w.writerow(["t", "m1", "m2", "m3", "H", "C"])
            for k in range(len(self.t)):
                w.writerow([repr(float(self.t[k])), *map(repr, map(float, self.m[k])),
                            repr(float(self.H[k])), repr(float(self.C[k]))])
        finally:
            if own:
                fh.close()


def simulate_rigid_body(
    s: RigidBodyState,
    dt: float,
    T: float,
    tol: float = 1e-13,
    max_iter: int = 100,
) -> RigidBodyTrajectory:
    """Implicit midpoint rule with a fixed-point inner solve.

    The midpoint rule preserves every quadratic invariant, so both
    H and |m|^2 are conserved up to the inner-solve tolerance.
    """
    if dt <= 0 or T <= 0:
        raise ValueError("dt and T must be positive")
    inv_i = 1.0 / np.asarray(s.inertia, dtype=float)
    steps = int(round(T / dt))
    m = np.empty((steps + 1, 3))
    m[0] = np.asarray(s.m, dtype=float)

    def f(y):
        w = y * inv_i
        return np.array([y[1] * w[2] - y[2] * w[1], y[2] * w[0] - y[0] * w[2], y[0] * w[1] - y[1] * w[0]])

    for n in range(steps):
        x = m[n]
        y = x + dt * f(x)
        for _ in range(max_iter):
            with np.errstate(over="ignore", invalid="ignore"):
                y_new = x + dt * f(0.5 * (x + y))
            delta = np.max(np.abs(y_new - y))
            if not np.isfinite(delta):
                raise InnerSolveError(n, float("inf"))
            y = y_new
            if delta <= tol * max(1.0, np.max(np.abs(x))):
                break
        else:
            raise InnerSolveError(n, float(delta))
        m[n + 1] = y

    t = dt * np.arange(steps + 1)
    H = 0.5 * np.sum(m * m * inv_i, axis=1)
    C = np.sum(m * m, axis=1)
    return RigidBodyTrajectory(t, m, H, C, tuple(float(i) for i in s.inertia), dt)
