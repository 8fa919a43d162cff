"""A small line-oriented language for declaring brackets and functionals.

Example document::

    # Camassa-Holm in the momentum variable m = u - u_xx
    var m, u on S1
    op P = -(2*m*D_x + m_x*Id)
    grad H = u
    subst m -> u - u_xx

Statements:

    var <name>[, <name>...] on S1|T2
    op <name> = <operator-expr>
    func <name> = int(<expr>)
    grad <name> = <expr>
    subst <var> -> <expr>

Expressions use explicit ``*``, ``^`` with a natural exponent, integer and
rational literals (``1/2``), parentheses, and jet variables written with a
derivative suffix: ``u_xxy`` is u differentiated twice in x and once in y.
Operator expressions may also contain ``D_x``, ``D_y`` and ``Id``; a product
of operators is composition, so ``D_x*m`` expands to ``m*D_x + m_x*Id``.
The first declared variable is the state variable of the bracket.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

from .diffop import LinDiffOp
from .jet import DOMAINS, JetExpr, LocalFunctional, zero_index

RESERVED = {"D_x", "D_y", "Id", "int", "var", "op", "func", "grad", "subst", "on"}


class DslError(ValueError):
    """Syntax or semantic error, with 1-based line and column."""

    def __init__(self, message: str, line: int = 1, column: int = 1):
        self.message = message
        self.line = line
        self.column = column
        super().__init__(f"line {line}, column {column}: {message}")


_TOKEN = re.compile(
    r"""
    (?P<ws>[ \t]+)
  | (?P<number>\d+)
  | (?P<ident>[^\W\d]\w*)
  | (?P<arrow>->)
  | (?P<op>[-+*/^(),=])
    """,
    re.VERBOSE | re.UNICODE,
)


@dataclass
class Token:
    kind: str
    text: str
    col: int


def tokenize(text: str, line: int = 1, col0: int = 1) -> List[Token]:
    out: List[Token] = []
    pos = 0
    while pos < len(text):
        if text.startswith("**", pos):
            raise DslError("unexpected '**' (use '^' for powers)", line, col0 + pos)
        m = _TOKEN.match(text, pos)
        if not m and text[pos] == ".":
            raise DslError("decimal numbers are not allowed; write rationals such as 1/2", line, col0 + pos)
        if not m:
            raise DslError(f"unexpected character {text[pos]!r}", line, col0 + pos)
        kind = m.lastgroup
        if kind != "ws":
            out.append(Token(kind, m.group(), col0 + pos))
        pos = m.end()
    out.append(Token("end", "", col0 + len(text)))
    return out


def split_jet_name(ident: str) -> Tuple[str, Tuple[int, int]]:
    """``u_xxy`` -> ("u", (2, 1)); names without a derivative suffix map to (0, 0)."""
    base, sep, suffix = ident.rpartition("_")
    if sep and base and suffix and set(suffix) <= {"x", "y"}:
        return base, (suffix.count("x"), suffix.count("y"))
    return ident, (0, 0)


class _Parser:
    """Recursive descent over one expression; values are JetExpr or LinDiffOp."""

    def __init__(self, tokens: List[Token], variables: Dict[str, str], n: int,
                 allow_ops: bool, line: int):
        self.tokens = tokens
        self.i = 0
        self.variables = variables
        self.n = n
        self.allow_ops = allow_ops
        self.line = line

    @property
    def tok(self) -> Token:
        return self.tokens[self.i]

    def error(self, message: str, tok: Optional[Token] = None):
        tok = tok or self.tok
        raise DslError(message, self.line, tok.col)

    def eat(self, text: str) -> Token:
        if self.tok.text != text:
            what = repr(self.tok.text) if self.tok.kind != "end" else "end of line"
            self.error(f"expected {text!r}, found {what}")
        tok = self.tok
        self.i += 1
        return tok

    def parse(self):
        value = self.expr()
        if self.tok.kind != "end":
            self.error(f"unexpected {self.tok.text!r}")
        return value

    def expr(self):
        value = self.term()
        while self.tok.text in "+-" and self.tok.kind == "op":
            op = self.tok.text
            self.i += 1
            rhs = self.term()
            value = _add(value, rhs) if op == "+" else _add(value, _neg(rhs))
        return value

    def term(self):
        value = self.factor()
        while self.tok.kind == "op" and self.tok.text in "*/":
            if self.tok.text == "*":
                self.i += 1
                value = _mul(value, self.factor())
            else:
                self.i += 1
                tok = self.tok
                if tok.kind != "number":
                    self.error("division is only allowed by an integer literal")
                self.i += 1
                if int(tok.text) == 0:
                    self.error("division by zero", tok)
                value = _mul(value, JetExpr.const(Fraction(1, int(tok.text)), self.n))
        return value

    def factor(self):
        if self.tok.text in ("-", "+") and self.tok.kind == "op":
            neg = self.tok.text == "-"
            self.i += 1
            value = self.factor()
            return _neg(value) if neg else value
        value = self.primary()
        if self.tok.text == "^":
            self.i += 1
            tok = self.tok
            if tok.kind != "number":
                self.error("exponent must be a natural number")
            self.i += 1
            k = int(tok.text)
            result = JetExpr.const(1, self.n) if isinstance(value, JetExpr) else LinDiffOp.identity(self.n)
            for _ in range(k):
                result = _mul(result, value)
            value = result
        return value

    def primary(self):
        tok = self.tok
        if tok.kind == "number":
            self.i += 1
            return JetExpr.const(int(tok.text), self.n)
        if tok.text == "(":
            self.i += 1
            value = self.expr()
            self.eat(")")
            return value
        if tok.kind == "ident":
            self.i += 1
            return self.identifier(tok)
        what = repr(tok.text) if tok.kind != "end" else "end of line"
        self.error(f"unexpected {what}")

    def identifier(self, tok: Token):
        name = tok.text
        if name in ("D_x", "D_y", "Id"):
            if not self.allow_ops:
                self.error(f"{name} is an operator and cannot appear in a density", tok)
            if name == "Id":
                return LinDiffOp.identity(self.n)
            axis = "xy".index(name[-1])
            if axis >= self.n:
                self.error(f"{name} is not defined on a one-dimensional domain", tok)
            if self.tok.text == "(":
                self.error(f"{name} takes no argument; write {name}*(...) to compose")
            return LinDiffOp.d(axis, self.n)
        if name.startswith("D_"):
            self.error(f"unknown operator {name}", tok)
        base, index = split_jet_name(name)
        if base not in self.variables:
            self.error(f"unknown identifier {name!r}", tok)
        if self.n == 1 and index[1]:
            self.error(f"{name}: no y-derivatives on S1", tok)
        return JetExpr.var(base, index[: self.n])


def _promote(a, n):
    return LinDiffOp.multiplication(a, n) if isinstance(a, JetExpr) else a


def _add(a, b):
    if isinstance(a, JetExpr) and isinstance(b, JetExpr):
        return a + b
    n = a.n if isinstance(a, LinDiffOp) else b.n
    return _promote(a, n) + _promote(b, n)


def _neg(a):
    return -a


def _mul(a, b):
    if isinstance(a, JetExpr) and isinstance(b, JetExpr):
        return a * b
    n = a.n if isinstance(a, LinDiffOp) else b.n
    return _promote(a, n) @ _promote(b, n)


@dataclass
class DslDocument:
    variables: Dict[str, str] = field(default_factory=dict)
    operators: Dict[str, LinDiffOp] = field(default_factory=dict)
    functionals: Dict[str, LocalFunctional] = field(default_factory=dict)
    gradients: Dict[str, JetExpr] = field(default_factory=dict)
    substitutions: List[Tuple[str, JetExpr]] = field(default_factory=list)

    @property
    def domain(self) -> str:
        return next(iter(self.variables.values()), "S1")

    @property
    def n(self) -> int:
        return DOMAINS[self.domain]

    @property
    def state(self) -> Optional[str]:
        return next(iter(self.variables), None)

    def names(self) -> set:
        return set(self.variables) | set(self.operators) | set(self.functionals) | set(self.gradients)

    def expr(self, text: str, allow_ops: bool = False, line: int = 1):
        """Parse an expression in the context of this document's declarations."""
        value = _Parser(tokenize(text, line), self.variables, self.n, allow_ops, line).parse()
        if allow_ops:
            return _promote(value, self.n)
        return value

    def functional(self, text: str, line: int = 1, col: int = 1) -> LocalFunctional:
        col += len(text) - len(text.lstrip())
        text = text.strip()
        m = re.fullmatch(r"int\s*\((.*)\)", text, re.S)
        if not m:
            raise DslError("a functional must be written int(<density>)", line, col)
        offset = col + m.start(1)
        density = _Parser(tokenize(m.group(1), line, offset), self.variables, self.n, False, line).parse()
        return LocalFunctional(density, self.domain)

    def substitution(self, text: str, line: int = 1) -> Tuple[str, JetExpr]:
        if "->" not in text:
            raise DslError("substitution must read '<var> -> <expr>'", line, 1)
        name, rhs = (s.strip() for s in text.split("->", 1))
        if name not in self.variables:
            raise DslError(f"unknown identifier {name!r}", line, 1)
        value = self.expr(rhs, line=line)
        if name in value.dependent_names():
            raise DslError(f"cyclic substitution of {name}", line, 1)
        return name, value

    def pretty(self) -> str:
        lines = []
        by_domain: Dict[str, List[str]] = {}
        for name, dom in self.variables.items():
            by_domain.setdefault(dom, []).append(name)
        for dom, names in by_domain.items():
            lines.append(f"var {', '.join(names)} on {dom}")
        for name, P in self.operators.items():
            lines.append(f"op {name} = {P}")
        for name, F in self.functionals.items():
            lines.append(f"func {name} = {F}")
        for name, g in self.gradients.items():
            lines.append(f"grad {name} = {g}")
        for name, e in self.substitutions:
            lines.append(f"subst {name} -> {e}")
        return "\n".join(lines) + "\n"


_STATEMENT = re.compile(r"\s*(var|op|func|grad|subst)\b\s*(.*)$", re.S)


def parse(text: str) -> DslDocument:
    doc = DslDocument()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].rstrip()
        if not line.strip():
            continue
        m = _STATEMENT.match(line)
        if not m:
            col = len(line) - len(line.lstrip()) + 1
            raise DslError(f"unknown statement {line.split()[0]!r}", lineno, col)
        keyword, rest = m.group(1), m.group(2)
        rest_col = m.start(2) + 1
        if keyword == "var":
            vm = re.fullmatch(r"(.+?)\s+on\s+(\S+)\s*", rest)
            if not vm:
                raise DslError("expected 'var <names> on S1|T2'", lineno, rest_col)
            domain = vm.group(2)
            if domain not in DOMAINS:
                raise DslError(f"unknown domain {domain!r}; use S1 or T2", lineno, rest_col + vm.start(2))
            if doc.variables and domain != doc.domain:
                raise DslError("all variables must live on the same domain", lineno, rest_col + vm.start(2))
            for name in (s.strip() for s in vm.group(1).split(",")):
                _declare(doc, name, lineno, rest_col)
                if split_jet_name(name)[1] != (0, 0):
                    raise DslError(f"variable name {name!r} looks like a derivative", lineno, rest_col)
                doc.variables[name] = domain
            continue
        if keyword == "subst":
            doc.substitutions.append(doc.substitution(rest, lineno))
            continue
        am = re.match(r"([^\W\d]\w*)\s*=\s*", rest)
        if not am:
            raise DslError(f"expected '{keyword} <name> = ...'", lineno, rest_col)
        name = am.group(1)
        _declare(doc, name, lineno, rest_col)
        body = rest[am.end():]
        body_col = rest_col + am.end()
        if keyword == "op":
            value = _Parser(tokenize(body, lineno, body_col), doc.variables, doc.n, True, lineno).parse()
            doc.operators[name] = _promote(value, doc.n)
        elif keyword == "func":
            doc.functionals[name] = doc.functional(body, lineno, body_col)
        else:
            doc.gradients[name] = _Parser(tokenize(body, lineno, body_col), doc.variables, doc.n, False, lineno).parse()
    return doc


def _declare(doc: DslDocument, name: str, line: int, col: int):
    if not re.fullmatch(r"[^\W\d]\w*", name):
        raise DslError(f"invalid name {name!r}", line, col)
    if name in RESERVED:
        raise DslError(f"{name!r} is reserved", line, col)
    if name in doc.names():
        raise DslError(f"duplicate declaration of {name!r}", line, col)


def parse_expr(text: str, variables=("u",), domain: str = "S1") -> JetExpr:
    """Convenience: parse a density with the given variables in scope."""
    doc = DslDocument(variables={v: domain for v in variables})
    return doc.expr(text)


def parse_operator(text: str, variables=("m",), domain: str = "S1") -> LinDiffOp:
    doc = DslDocument(variables={v: domain for v in variables})
    return doc.expr(text, allow_ops=True)
