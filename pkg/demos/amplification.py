"""The amplification rotation law, and why more iterations can overshoot.

Run from the repository root:  python3 demos/amplification.py
"""

import math

from multamp import AmplificationSpec, grover_iterate, predicted_postamp, select_nu
from multamp.simcore import Circuit, RegisterLayout, StateVector, apply_circuit, roty

U_SQ = 0.167  # the smallest-lattice direct-variant post-selection probability
u = math.sqrt(U_SQ)
theta = math.asin(u)

print(f"u**2 = {U_SQ}, so one synthesis pass keeps {U_SQ:.1%} of the shots")
print(f"{'nu':>3} {'sin((2nu+1)theta)**2':>22} {'measured':>10}")

layout = RegisterLayout([("t", 1)])
synthesis = Circuit(layout, [roty(2.0 * theta, 0)])
spec = AmplificationSpec(synthesis, {"t": 1}, nu=0)
state = StateVector.zero_state(layout)
apply_circuit(state, synthesis)
for nu in range(0, 8):
    if nu:
        grover_iterate(state, spec)
    measured = abs(state.amplitudes[1]) ** 2
    print(f"{nu:3d} {predicted_postamp(u, nu):22.4f} {measured:10.4f}")

print("\nthe law is a rotation, so iterating past the peak rotates AWAY from "
      "the target:")
paper = select_nu(u, "paper")
best = select_nu(u, "optimal")
print(f"  rounding rule picks nu = {paper}: {predicted_postamp(u, paper):.4f}")
print(f"  peak-bracketing rule picks nu = {best}: {predicted_postamp(u, best):.4f}")

print("\nthe same comparison over the published post-selection probabilities:")
print(f"{'u**2':>7} {'nu(round)':>10} {'A2':>7} {'nu(best)':>9} {'A2':>7}")
for u_sq in (0.167, 0.063, 0.016, 0.487, 0.182, 0.048):
    uu = math.sqrt(u_sq)
    a, b = select_nu(uu, "paper"), select_nu(uu, "optimal")
    print(f"{u_sq:7.3f} {a:10d} {predicted_postamp(uu, a):7.3f} "
          f"{b:9d} {predicted_postamp(uu, b):7.3f}")
