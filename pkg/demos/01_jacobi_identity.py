"""
Checking the Jacobi identity of a Hamiltonian operator
======================================================

A skew-adjoint operator P defines the bracket {F, G} = int dF * P(dG).
Skewness makes it antisymmetric; the Jacobi identity is the hard part.
It is decided here with three auxiliary functions xi, eta, zeta: the
cyclic sum of xi * (D_{P zeta} P) eta must be a total divergence.
"""
from hamcheck import BracketStructure, is_skew, jacobi_check
from hamcheck.dsl import parse_operator

# The Lie-Poisson operator on the dual of the Lie algebra of vector fields
# on the circle. Written as -(m D + D m), it is stored in expanded form.
P = parse_operator("-(m*D_x + D_x*m)", ("m",))
print("P =", P)
print("skew-adjoint:", is_skew(P))

report = jacobi_check(BracketStructure(P, "m"))
print("Jacobi:", report.verdict)

# The intermediate operator is P with each coefficient replaced by its
# Frechet derivative in the direction P(theta).
print("D_{P theta} P =", report.intermediate)

# %%
# A constant-coefficient operator passes trivially: its Frechet
# derivative vanishes in every direction.
print("D_x:", jacobi_check(BracketStructure(parse_operator("D_x", ("u",)), "u")).verdict)

# %%
# On the torus, the operator w_x D_y - w_y D_x in the vorticity w
# also satisfies the identity.
P2 = parse_operator("w_x*D_y - w_y*D_x", ("w",), "T2")
print("2D:", jacobi_check(BracketStructure(P2, "w", "T2")).verdict)

# %%
# Skewness alone is not enough. This operator is skew-adjoint, yet the
# cyclic sum is not a divergence; the residual is the sum itself.
bad = parse_operator("2*m_x*D_x + m_xx*Id", ("m",))
report = jacobi_check(BracketStructure(bad, "m"))
print("mutated skew:", is_skew(bad), "Jacobi:", report.verdict)
print("residual has", len(report.residual.terms), "terms")
