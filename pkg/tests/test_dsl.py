import pytest

from hamcheck.diffop import LinDiffOp, is_skew
from hamcheck.dsl import DslError, parse, parse_expr, parse_operator, split_jet_name
from hamcheck.jet import JetExpr, JetVar


def test_lie_poisson_operator():
    doc = parse("var m on S1\nop P = -(2*m*D_x + m_x*Id)")
    P = doc.operators["P"]
    m = JetExpr.var("m", (0,))
    assert P == LinDiffOp({(1,): -2 * m, (0,): -JetExpr.var("m", (1,))}, 1)
    assert doc.operators["P"] == parse_operator("-(m*D_x + D_x*m)")
    assert is_skew(P)


def test_gardner_hamiltonian():
    doc = parse("var u on S1\nfunc H = int(-1/2*u_x^2 + 1/6*u^3)")
    H = doc.functionals["H"]
    ux, u = JetExpr.var("u", (1,)), JetExpr.var("u", (0,))
    assert H.density == ux ** 2 * -JetExpr.const(1) / 2 + u ** 3 / 6
    assert H.domain == "S1"


@pytest.mark.parametrize(
    "text, line, column, fragment",
    [
        ("var u on S1\nfunc H = int(u_x ** 2)", 2, 18, "**"),
        ("func H = int(u_x ** 2)", 1, 18, "**"),
        ("var u on S1\nop P = D_x(u)", 2, 11, "no argument"),
        ("var u on S1\nfunc H = int(D_x)", 2, 14, "operator"),
        ("var u on S1\nfunc H = int(v)", 2, 14, "unknown identifier"),
        ("var u on S1\nfunc H = int(u_y)", 2, 14, "y-derivatives"),
        ("var u on S1\nfunc H = int(0.5*u)", 2, 15, "rationals"),
        ("var u on S1\nvar u on S1", 2, 5, "duplicate"),
        ("var u on S1\nfunc H = int(u*(u+1)", 2, 20, "expected ')'"),
        ("var u on R3", 1, 10, "domain"),
        ("var u on S1\nfunc H = u^2", 2, None, "int("),
        ("var u on S1\nlet H = u", 2, 1, "unknown statement"),
        ("var u on S1\nfunc H = int(u^-1)", 2, None, None),
        ("var u on S1\nfunc H = int(u/u)", 2, None, None),
    ],
)
def test_errors_carry_positions(text, line, column, fragment):
    with pytest.raises(DslError) as info:
        parse(text)
    err = info.value
    assert err.line == line
    if column is not None:
        assert err.column == column
    if fragment is not None:
        assert fragment in str(err)
    assert f"line {line}" in str(err)


def test_comments_and_blank_lines():
    doc = parse("# header\n\nvar u on S1   # the field\nop P = D_x\n")
    assert doc.state == "u" and "P" in doc.operators


def test_first_variable_is_the_state():
    doc = parse("var m, u on S1\nop P = -(2*m*D_x + m_x*Id)\ngrad H = u")
    assert doc.state == "m"
    assert doc.gradients["H"] == JetExpr.var("u", (0,))


def test_substitution():
    doc = parse("var m, u on S1\nsubst m -> u - u_xx")
    (name, repl), = doc.substitutions
    assert name == "m" and repl == parse_expr("u - u_xx", ("m", "u"))
    with pytest.raises(DslError, match="cyclic"):
        parse("var m on S1\nsubst m -> m_x")


def test_split_jet_name():
    assert split_jet_name("u_xxy") == ("u", (2, 1))
    assert split_jet_name("theta") == ("theta", (0, 0))
    assert str(JetVar("u", (2, 1))) == "u_xxy"


def test_composition_and_powers():
    assert parse_operator("D_x*D_x") == parse_operator("D_x^2")
    assert parse_operator("D_x*m") == parse_operator("m*D_x + m_x*Id")
    P = parse_operator("(m*D_x)*(m*D_x)")
    assert P == parse_operator("m^2*D_x^2 + m*m_x*D_x")
    assert parse_expr("(u + 1)^2") == parse_expr("u^2 + 2*u + 1")
    assert parse_expr("-u^2") == -parse_expr("u^2")
    assert parse_expr("u/2") == parse_expr("1/2*u")


def test_two_dimensional():
    doc = parse("var w on T2\nop P = w_x*D_y - w_y*D_x\nfunc E = int(w_xy^2)")
    assert doc.n == 2 and doc.domain == "T2"
    assert doc.operators["P"].coefficient((0, 1)) == JetExpr.var("w", (1, 0))
    assert doc.functionals["E"].density == JetExpr.var("w", (1, 1)) ** 2


def test_reserved_and_malformed_names():
    for text in ("var D_x on S1", "var Id on S1", "var u_x on S1"):
        with pytest.raises(DslError):
            parse(text)


def test_round_trip_idempotent(documents):
    paths = sorted(documents.glob("*.ham"))
    assert len(paths) >= 5
    for path in paths:
        once = parse(path.read_text()).pretty()
        twice = parse(once).pretty()
        assert once == twice
        original = parse(path.read_text())
        again = parse(once)
        assert original.operators == again.operators
        assert original.functionals == again.functionals
        assert original.gradients == again.gradients
