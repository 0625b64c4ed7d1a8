"""Singular solutions: point sources in a layered medium.

G(., y) is the two-phase kernel of the interface nearest the source plus a
finite-energy corrector solved by FEM.  Three sanity checks run below: on a
uniform disk G matches the classical mirror-image Green function; in a strip
stack G is symmetric in its two arguments; and as source and evaluation
point close in on an interior interface from opposite sides, G minus the
rescaled free kernel 2/(g_below + g_above) Gamma stays bounded while both
terms blow up.
"""

import numpy as np

import eitlab as el
from eitlab import laplace_gamma
from eitlab.singular import CorrectorSolver, asymptotics_check, green_correction

# 1. disk with constant coefficient: the mirror-image oracle
disk = el.generate_disk_mesh(1 / 32)
y = np.array([0.3, 0.2])
g = green_correction(disk, el.Admittivity([2.0]), y)
pts = np.array([[0.1, -0.4], [-0.5, 0.1], [0.0, 0.6]])
ystar = y / (y @ y)
exact = (laplace_gamma(pts, y, n=2)
         + np.log(np.linalg.norm(y) * np.linalg.norm(pts - ystar, axis=1))
         / (2 * np.pi)) / 2.0
print("disk image oracle, sample errors:", np.abs(g.evaluate(pts).real - exact))

# 2. symmetry G(x, y) = G(y, x) inside the probe column
p = el.build_partition(2, with_extension=True)
mesh = el.generate_mesh(p, 1 / 64)
solver = CorrectorSolver(mesh, el.Admittivity([1.0, 2.0 + 1.0j]))
x, y = np.array([0.47, 0.23]), np.array([0.55, 0.71])
gx, gy = solver.correction(x), solver.correction(y)
print(f"\nsymmetry: G(x,y) = {gy.evaluate(x[None])[0]:.8f}")
print(f"          G(y,x) = {gx.evaluate(y[None])[0]:.8f}")

# 3. bounded deviation from the cross-interface limit profile
p2 = el.build_partition(2)
mesh2 = el.generate_mesh(p2, 1 / 64)
solver2 = CorrectorSolver(mesh2, el.Admittivity([1.0, 2.0 + 1.0j]))
radii = [p2.r0 * 2.0 ** (-j) for j in range(2, 7)]
rows, slope, verdict = asymptotics_check(solver2, 2, radii)
print("\n radius      |G - c Gamma|   gradient deviation")
for row in rows:
    print(f"  {row.r:.5f}    {row.deviation:.6f}       {row.grad_deviation:.6f}")
print(f"log-deviation slope {slope:+.3f} -> {verdict}")
