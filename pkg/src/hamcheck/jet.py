"""Differential polynomials on jet space.

A :class:`JetExpr` is a polynomial with exact rational coefficients in the
jet coordinates ``u, u_x, u_xx, ...`` of one or more dependent variables over
one (circle) or two (torus) independent variables.  Densities never depend
explicitly on ``x``; on a periodic domain that makes "is a total divergence"
decidable through the kernel of the Euler operator.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from math import comb
from numbers import Rational
from typing import Dict, Iterable, Iterator, Mapping, Tuple

MultiIndex = Tuple[int, ...]

AXIS_NAMES = "xy"
DOMAINS = {"S1": 1, "T2": 2}


def zero_index(n: int) -> MultiIndex:
    return (0,) * n


def index_leq(j: MultiIndex, k: MultiIndex) -> bool:
    return all(a <= b for a, b in zip(j, k))


def index_binomial(k: MultiIndex, j: MultiIndex) -> int:
    """Componentwise multi-index binomial coefficient (K choose J)."""
    out = 1
    for a, b in zip(k, j):
        out *= comb(a, b)
    return out


def sub_indices(j: MultiIndex) -> Iterator[MultiIndex]:
    """All multi-indices L with L <= J componentwise."""
    return product(*(range(a + 1) for a in j))


class JetVar:
    """A jet coordinate ``name`` differentiated by the multi-index ``index``."""

    __slots__ = ("name", "index", "_key")

    def __init__(self, name: str, index: MultiIndex):
        if any(a < 0 for a in index):
            raise ValueError(f"negative multi-index {index}")
        self.name = name
        self.index = tuple(index)
        # graded lexicographic within a name
        self._key = (name, sum(self.index), self.index)

    @property
    def order(self) -> int:
        return self._key[1]

    @property
    def n(self) -> int:
        return len(self.index)

    def derive(self, axis: int) -> "JetVar":
        idx = list(self.index)
        idx[axis] += 1
        return JetVar(self.name, tuple(idx))

    def __eq__(self, other):
        return isinstance(other, JetVar) and self._key == other._key

    def __lt__(self, other: "JetVar"):
        return self._key < other._key

    def __hash__(self):
        return hash(self._key)

    def __repr__(self):
        return f"JetVar({self.name!r}, {self.index})"

    def __str__(self):
        suffix = "".join(AXIS_NAMES[i] * a for i, a in enumerate(self.index))
        return f"{self.name}_{suffix}" if suffix else self.name


# A monomial is a tuple of (JetVar, exponent) pairs sorted by JetVar.
Monomial = Tuple[Tuple[JetVar, int], ...]
ONE: Monomial = ()


def _mono_mul(a: Monomial, b: Monomial) -> Monomial:
    if not a:
        return b
    if not b:
        return a
    powers = dict(a)
    for v, p in b:
        powers[v] = powers.get(v, 0) + p
    return tuple(sorted(powers.items(), key=lambda item: item[0]._key))


def _mono_key(m: Monomial):
    degree = sum(p for _, p in m)
    weight = sum(v.order * p for v, p in m)
    return (degree, weight, tuple((v._key, p) for v, p in m))


def _as_fraction(c) -> Fraction:
    if isinstance(c, Fraction):
        return c
    if isinstance(c, (int, Rational)):
        return Fraction(c)
    raise TypeError(f"coefficients must be exact rationals, got {type(c).__name__}")


class JetExpr:
    """Immutable differential polynomial with rational coefficients.

    ``n`` is the number of independent variables (1 or 2).  Constants adapt
    to the dimension of whatever they are combined with.
    """

    __slots__ = ("terms", "n", "_hash")

    def __init__(self, terms: Mapping[Monomial, Fraction] | None = None, n: int = 1):
        if n not in (1, 2):
            raise ValueError("only 1 or 2 independent variables are supported")
        self.n = n
        self.terms: Dict[Monomial, Fraction] = {}
        self._hash = None
        if terms:
            for m, c in terms.items():
                c = _as_fraction(c)
                if c:
                    self.terms[m] = c

    # -- constructors -------------------------------------------------------
    @classmethod
    def const(cls, c, n: int = 1) -> "JetExpr":
        return cls({ONE: _as_fraction(c)}, n)

    @classmethod
    def var(cls, name: str, index: MultiIndex | None = None, n: int | None = None) -> "JetExpr":
        if index is None:
            index = zero_index(n or 1)
        index = tuple(index)
        if n is not None and len(index) != n:
            raise ValueError(f"multi-index {index} does not match n={n}")
        return cls({((JetVar(name, index), 1),): Fraction(1)}, len(index))

    @classmethod
    def from_jetvar(cls, v: JetVar) -> "JetExpr":
        return cls({((v, 1),): Fraction(1)}, v.n)

    @classmethod
    def _raw(cls, terms: Dict[Monomial, Fraction], n: int) -> "JetExpr":
        # terms already free of zeros
        e = cls.__new__(cls)
        e.terms = terms
        e.n = n
        e._hash = None
        return e

    # -- inspection ---------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return all(not m for m in self.terms)

    @property
    def constant_term(self) -> Fraction:
        return self.terms.get(ONE, Fraction(0))

    def jet_variables(self) -> set:
        return {v for m in self.terms for v, _ in m}

    def dependent_names(self) -> set:
        return {v.name for v in self.jet_variables()}

    def degree(self) -> int:
        return max((sum(p for _, p in m) for m in self.terms), default=0)

    def max_order(self, name: str | None = None) -> int:
        return max(
            (v.order for v in self.jet_variables() if name is None or v.name == name),
            default=-1,
        )

    # -- arithmetic ---------------------------------------------------------
    def _coerce(self, other) -> "JetExpr":
        if isinstance(other, JetExpr):
            if other.n == self.n:
                return other
            if other.is_constant():
                return JetExpr._raw(dict(other.terms), self.n)
            if self.is_constant():
                return other
            raise ValueError(f"dimension mismatch: n={self.n} vs n={other.n}")
        if isinstance(other, (int, Fraction, Rational)):
            return JetExpr.const(other, self.n)
        return NotImplemented

    def _dim(self, other: "JetExpr") -> int:
        if self.n == other.n:
            return self.n
        return other.n if self.is_constant() else self.n

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out = dict(self.terms)
        for m, c in other.terms.items():
            s = out.get(m, 0) + c
            if s:
                out[m] = s
            else:
                out.pop(m, None)
        return JetExpr._raw(out, self._dim(other))

    __radd__ = __add__

    def __neg__(self):
        return JetExpr._raw({m: -c for m, c in self.terms.items()}, self.n)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out: Dict[Monomial, Fraction] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = _mono_mul(m1, m2)
                s = out.get(m, 0) + c1 * c2
                if s:
                    out[m] = s
                else:
                    out.pop(m, None)
        return JetExpr._raw(out, self._dim(other))

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction, Rational)) and other != 0:
            return self * (1 / _as_fraction(other))
        return NotImplemented

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            raise ValueError("only nonnegative integer powers are supported")
        out = JetExpr.const(1, self.n)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = JetExpr.const(other, self.n)
        if not isinstance(other, JetExpr):
            return NotImplemented
        if self.terms != other.terms:
            return False
        return self.n == other.n or self.is_constant()

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self.terms.items()))
        return self._hash

    def __bool__(self):
        return bool(self.terms)

    # -- printing -----------------------------------------------------------
    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda item: _mono_key(item[0]))

    def __str__(self):
        if not self.terms:
            return "0"
        pieces = []
        for i, (m, c) in enumerate(self.sorted_terms()):
            sign = "-" if c < 0 else "+"
            a = abs(c)
            factors = [str(v) if p == 1 else f"{v}^{p}" for v, p in m]
            if not factors:
                body = str(a)
            elif a == 1:
                body = "*".join(factors)
            else:
                body = "*".join([str(a)] + factors)
            if i == 0:
                pieces.append(body if sign == "+" else "-" + body)
            else:
                pieces.append(f" {sign} {body}")
        return "".join(pieces)

    def __repr__(self):
        return f"JetExpr({str(self)!r}, n={self.n})"


def symbols(names: str | Iterable[str], n: int = 1):
    """Undifferentiated jet variables, e.g. ``u, v = symbols("u v")``."""
    if isinstance(names, str):
        names = names.replace(",", " ").split()
    out = tuple(JetExpr.var(name, zero_index(n)) for name in names)
    return out[0] if len(out) == 1 else out


def as_expr(e, n: int = 1) -> JetExpr:
    if isinstance(e, JetExpr):
        return e
    return JetExpr.const(e, n)


# ---------------------------------------------------------------------------
# calculus
# ---------------------------------------------------------------------------

def total_derivative(e: JetExpr, axis: int = 0) -> JetExpr:
    """Total derivative D_axis, raising every jet variable on that axis."""
    if not 0 <= axis < e.n:
        raise ValueError(f"axis {axis} out of range for n={e.n}")
    out: Dict[Monomial, Fraction] = {}
    for m, c in e.terms.items():
        for i, (v, p) in enumerate(m):
            rest = m[:i] + ((v, p - 1),) + m[i + 1:] if p > 1 else m[:i] + m[i + 1:]
            new = _mono_mul(rest, ((v.derive(axis), 1),))
            s = out.get(new, 0) + c * p
            if s:
                out[new] = s
            else:
                out.pop(new, None)
    return JetExpr._raw(out, e.n)


def jet_derivative(e: JetExpr, index: MultiIndex) -> JetExpr:
    """D_J applied to ``e`` (product of total derivatives)."""
    for axis, times in enumerate(index):
        for _ in range(times):
            e = total_derivative(e, axis)
    return e


def partial(e: JetExpr, v: JetVar) -> JetExpr:
    """Partial derivative with respect to a single jet coordinate."""
    out: Dict[Monomial, Fraction] = {}
    for m, c in e.terms.items():
        for i, (w, p) in enumerate(m):
            if w == v:
                rest = m[:i] + ((w, p - 1),) + m[i + 1:] if p > 1 else m[:i] + m[i + 1:]
                out[rest] = out.get(rest, 0) + c * p
                break
    return JetExpr._raw({m: c for m, c in out.items() if c}, e.n)


def _vars_of(e: JetExpr, name: str):
    return sorted(v for v in e.jet_variables() if v.name == name)


def frechet_apply(f: JetExpr, v: str, direction: JetExpr) -> JetExpr:
    """Linearization integrand sum_J (df/dv_J) * D_J(direction)."""
    direction = as_expr(direction, f.n)
    out = JetExpr.const(0, f.n)
    for w in _vars_of(f, v):
        out = out + partial(f, w) * jet_derivative(direction, w.index)
    return out


def euler_operator(f: JetExpr, v: str) -> JetExpr:
    """Variational derivative E_v(f) = sum_J (-D)_J df/dv_J."""
    out = JetExpr.const(0, f.n)
    for w in _vars_of(f, v):
        term = jet_derivative(partial(f, w), w.index)
        out = out - term if w.order % 2 else out + term
    return out


def higher_euler_operator(f: JetExpr, v: str, index: MultiIndex) -> JetExpr:
    """Higher Eulerian operator E^J_v(f) = sum_{K >= J} (K choose J) (-D)_{K-J} df/dv_K."""
    index = tuple(index)
    if len(index) != f.n:
        raise ValueError(f"multi-index {index} does not match n={f.n}")
    out = JetExpr.const(0, f.n)
    for w in _vars_of(f, v):
        if not index_leq(index, w.index):
            continue
        rest = tuple(a - b for a, b in zip(w.index, index))
        term = jet_derivative(partial(f, w), rest) * index_binomial(w.index, index)
        out = out - term if sum(rest) % 2 else out + term
    return out


def boundary_flux_1d(f: JetExpr, v: str, direction: str | JetExpr = "w") -> JetExpr:
    """Flux P(w) with frechet_apply(f, v, w) = E_v(f) w + D_x P(w).

    Built from the higher Eulerian operators: P = sum_{j>=1} D_x^{j-1}(E^j(f) w).
    """
    if f.n != 1:
        raise ValueError("boundary_flux_1d needs one independent variable")
    if isinstance(direction, str):
        if direction in f.dependent_names():
            raise ValueError(f"direction variable {direction!r} already occurs in the density")
        direction = JetExpr.var(direction, (0,))
    out = JetExpr.const(0, 1)
    for j in range(1, f.max_order(v) + 1):
        out = out + jet_derivative(higher_euler_operator(f, v, (j,)) * direction, (j - 1,))
    return out


def is_divergence(e: JetExpr) -> bool:
    """True iff the x-free density ``e`` integrates to zero identically on the periodic domain."""
    if e.constant_term:
        return False
    return all(euler_operator(e, name).is_zero() for name in e.dependent_names())


def equal_mod_div(e1: JetExpr, e2) -> bool:
    """Do ``e1`` and ``e2`` define the same functional on S1/T2?"""
    e1 = as_expr(e1)
    return is_divergence(e1 - e2)


def substitute(e: JetExpr, v: str, replacement) -> JetExpr:
    """Replace every v_J by D_J(replacement)."""
    replacement = as_expr(replacement, e.n)
    if v in replacement.dependent_names():
        raise ValueError(f"cyclic substitution: {v} occurs in its own replacement")
    n = e.n if replacement.is_constant() else replacement.n
    if not e.is_constant() and not replacement.is_constant() and e.n != replacement.n:
        raise ValueError("dimension mismatch in substitution")
    cache: Dict[MultiIndex, JetExpr] = {}
    out = JetExpr.const(0, n)
    for m, c in e.terms.items():
        term = JetExpr.const(c, n)
        for w, p in m:
            if w.name == v:
                if w.index not in cache:
                    cache[w.index] = jet_derivative(replacement, w.index)
                factor = cache[w.index]
            else:
                factor = JetExpr.from_jetvar(w)
            term = term * factor ** p
        out = out + term
    return out


@dataclass(frozen=True)
class LocalFunctional:
    """F = integral of ``density`` over the circle (S1) or the torus (T2)."""

    density: JetExpr
    domain: str = "S1"

    def __post_init__(self):
        if self.domain not in DOMAINS:
            raise ValueError(f"unknown domain {self.domain!r}; use S1 or T2")
        n = DOMAINS[self.domain]
        if self.density.n != n:
            if not self.density.is_constant():
                raise ValueError(f"density has n={self.density.n}, domain {self.domain} needs n={n}")
            object.__setattr__(self, "density", JetExpr._raw(dict(self.density.terms), n))

    @property
    def n(self) -> int:
        return DOMAINS[self.domain]

    def gradient(self, v: str) -> JetExpr:
        return euler_operator(self.density, v)

    def equivalent(self, other: "LocalFunctional") -> bool:
        return self.domain == other.domain and equal_mod_div(self.density, other.density)

    def __str__(self):
        return f"int({self.density})"
