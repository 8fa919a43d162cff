"""
Deriving evolution equations from a Hamiltonian structure
=========================================================

The evolution of the state is u_t = P(dH), where dH is the variational
derivative of the Hamiltonian. Three classical equations drop out.
"""
from hamcheck import BracketStructure, LocalFunctional, casimir_check, derive_evolution
from hamcheck.dsl import parse_expr, parse_operator

# KdV: P = D_x with the cubic Hamiltonian.
kdv = BracketStructure(parse_operator("D_x", ("u",)), "u")
H = LocalFunctional(parse_expr("-1/2*u_x^2 + 1/6*u^3"))
print("gradient:", kdv.gradient(H))
print("u_t =", derive_evolution(kdv, H))

# %%
# Inviscid Burgers: the Lie-Poisson operator with H = 1/2 int m^2.
lp = BracketStructure(parse_operator("-(2*m*D_x + m_x*Id)", ("m",)), "m")
print("m_t =", derive_evolution(lp, LocalFunctional(parse_expr("1/2*m^2", ("m",)))))

# %%
# Camassa-Holm: same operator, but H = 1/2 int m u with m = u - u_xx is
# nonlocal in m. Its gradient u is supplied directly and m is eliminated
# afterwards by substitution.
names = ("m", "u")
lp2 = BracketStructure(parse_operator("-(2*m*D_x + m_x*Id)", names), "m")
rhs = derive_evolution(lp2, parse_expr("u", names), [("m", parse_expr("u - u_xx", names))])
print("m_t =", rhs)

# %%
# Casimirs commute with everything. int u is one for D_x; int m is not
# one for the Lie-Poisson operator, and the residual shows why.
print(casimir_check(kdv, LocalFunctional(parse_expr("u"))))
print(casimir_check(lp, LocalFunctional(parse_expr("m", ("m",)))))
