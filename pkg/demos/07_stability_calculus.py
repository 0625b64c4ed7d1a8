"""The quantitative stability calculus: modulus, recursion, constants.

Information about the coefficient degrades by one application of the modulus
omega(t) = |log t|^(-1/4) (in three dimensions) per interface crossed.
Composing and inverting omega across N regions produces stability constants
that grow as towers of exponentials; they are tracked here in an iterated-
exponential representation.  The three-sphere checker measures the
log-convexity constant that drives each crossing, with angular monomials
exactly extremal.
"""

import numpy as np

from eitlab.stability import (TAU, ConstantTracker, constant_bound,
                              delta_recursion, omega, omega_inverse,
                              random_harmonic_polynomial, three_sphere_check)

print(f"three-sphere exponent tau = ln(4/3)/ln 4 = {TAU:.6f}")
print(f"radius pattern (r, 3r, 4r) makes monomials extremal: 4^(1-tau) = "
      f"{4.0 ** (1 - TAU):.15f}")

for m in [1, 3, 6]:
    u = (lambda mm: (lambda x, y: ((np.asarray(x) + 1j * np.asarray(y)) ** mm).real))(m)
    print(f"  monomial degree {m}: ratio = {three_sphere_check(u, (0, 0), 1.0):.15f}")
rng = np.random.default_rng(7)
worst = max(three_sphere_check(random_harmonic_polynomial(rng, 6), (0, 0), 0.5)
            for _ in range(200))
print(f"  200 random harmonic polynomials: max ratio {worst:.4f}")

print(f"\nmodulus: omega(e^-3) = {omega(np.exp(-3), 3):.6f} = 3^(-1/4), "
      f"omega^-1(1/2) = {omega_inverse(0.5, 3):.4e} = e^-16")

dr = delta_recursion(eps=1e-6, E=0.5, C=1.5, M=4)
print("\nper-link bound sequence for data gap 1e-6, coefficient gap 0.5:")
for k, b in enumerate(dr.bounds):
    print(f"  after {k} links: {b:.6e}")
print(f"closed form check: {dr.closed_form:.6e}")

tracker = ConstantTracker(n=3, c_base=1.0)
print("\nstability constant vs region count (log10, tower form):")
for N in range(1, 7):
    cb = constant_bound(N, tracker)
    print(f"  N = {N}: log10(bound) = {cb.log10!r}")
print("one extra region squares-and-worse the constant: the exponential"
      " divergence in N, visible as one more exp() per region.")
