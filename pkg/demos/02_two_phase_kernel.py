"""The flat-interface two-phase kernel and its transmission conditions.

The kernel for a medium worth gamma_plus above {x_n = 0} and gamma_minus
below is built from mirror images: on the source side it is the free kernel
over gamma plus a weighted reflection, across the interface it is a plain
rescaling by 2/(gamma_plus + gamma_minus).  The mirror weights are the unique
choice making both the value and the flux continuous, which the residual
check verifies by comparing one-sided closed forms on the interface.
"""

import numpy as np

from eitlab import TwoPhaseCoeffs, transmission_residual, two_phase_gamma

pairs = [(2.0, 1.0), (1.0 + 1.0j, 1.0), (1.0 + 2.0j, 3.0), (2.5 - 0.5j, 0.7 + 0.7j)]
samples = np.column_stack([np.linspace(-2.0, 2.0, 200), np.zeros(200)])

print("pair (gamma_plus, gamma_minus) | mirror weight s | cross coefficient | jumps")
for gp, gm in pairs:
    c = TwoPhaseCoeffs(gp, gm)
    vj, fj = transmission_residual(c, (0.0, -0.3), samples, n=2)
    print(f"  ({gp}, {gm}): s = {c.s:.4f}, 2/(gp+gm) = {c.cross_coefficient:.4f}, "
          f"value jump {vj:.1e}, flux jump {fj:.1e}")

print("\nidentity 1/gp + s = 1/gm + t = 2/(gp+gm):")
c = TwoPhaseCoeffs(1.0 + 1.0j, 1.0)
print(f"  1/gp + s = {1 / c.gamma_plus + c.s}")
print(f"  1/gm + t = {1 / c.gamma_minus + c.t}")
print(f"  2/(gp+gm) = {c.cross_coefficient}")

# equal coefficients collapse every branch to kernel / gamma, exactly
c_eq = TwoPhaseCoeffs(1.5 + 0.5j, 1.5 + 0.5j)
pts = np.array([[0.3, 0.8], [0.3, -0.8]])
vals = two_phase_gamma(pts, np.array([0.0, 0.4]), c_eq, n=2)
print(f"\nuniform reduction, values above/below the interface: {vals}")
