"""
The free rigid body
===================

The Lie-Poisson bracket on so(3)* is {f, g}(m) = m . (grad f x grad g).
With H = 1/2 sum m_k^2 / I_k the motion is m' = m x omega, which is
Euler's I_1 w_1' = (I_2 - I_3) w_2 w_3 and its cyclic permutations.
"""
from fractions import Fraction

from hamcheck.findim import (
    CASIMIR, M1, M2, M3, RigidBodyState, rigid_body_rhs, simulate_rigid_body, so3_bracket,
)

print("{m1, m2} =", so3_bracket(M1, M2))
print("{|m|^2, m1^2 m3} =", so3_bracket(CASIMIR, M1 ** 2 * M3))

# Exact arithmetic: I = (1, 2, 3), omega = (1, 1, 1).
s = RigidBodyState((Fraction(1), Fraction(2), Fraction(3)), (Fraction(1), Fraction(2), Fraction(3)))
print("omega' =", [str(d / i) for d, i in zip(rigid_body_rhs(s), s.inertia)])

# %%
# The implicit midpoint rule keeps every quadratic invariant, so both
# the energy and |m|^2 stay put up to the inner-solve tolerance.
traj = simulate_rigid_body(RigidBodyState((1.0, 2.0, 3.0), (1.0, 2.0, 3.0)), dt=1e-3, T=10.0)
print("C drift", traj.relative_drift("C"), " H drift", traj.relative_drift("H"))
print("final m", traj.m[-1])
