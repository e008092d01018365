"""Run the cascade algorithm and compare with the frequency-side product.

At 7pi/6 the iterates converge to the Daubechies scaling function. At pi/2
they do not converge in norm: each iterate takes only the values 0 and 1,
scattered ever more finely over [0, 3), yet integrals against step functions
approach those of chi_[0,3)/3.
"""

import math
import sys

import numpy as np

from cuntzwave import cascade_father, correlation_coeffs, from_theta, mallat_product, mirror_check
from cuntzwave.cascade import pairing, sampled_fourier, step_function_samples

d4 = from_theta("7pi/6")
prev = None
for n in range(6, 13, 2):
    r = cascade_father(d4, n, 8)
    if prev is not None:
        diff = math.sqrt(r.step * np.sum((r.samples_phi - prev) ** 2))
        print(f"iteration {n:>2}: L2 change {diff:.2e}")
    prev = r.samples_phi

r = cascade_father(d4, 14, 10)
w = np.linspace(-10, 10, 9)
phi_hat, _ = mallat_product(d4, w)
print(f"\nproduct formula vs transform of the samples: {np.max(np.abs(phi_hat - sampled_fourier(r, w))):.1e}")

c = correlation_coeffs(cascade_father(d4, 12, 10))
print("correlation coefficients recover the taps:",
      " ".join(f"{c.c[k]:+.4f}" for k in range(4)))

print(f"mirror deviation at 7pi/6: {mirror_check(d4).max:.1e}")

print("\ntheta = pi/2")
half = from_theta("pi/2")
for n in (2, 6, 12):
    r = cascade_father(half, n, 8)
    filled = float(np.mean(r.samples_phi != 0))
    print(f"iteration {n:>2}: <phi, chi[0,3)> = {pairing(r, 0, 3):.6f}  "
          f"<phi, chi[0,1)> = {pairing(r, 0, 1):.6f}  nonzero on {filled:.1%} of the grid")

exact = correlation_coeffs(step_function_samples(10, 3, [(0, 3, 1 / 3)]))
print(f"correlations of chi_[0,3)/3: sum of squares {exact.sum_sq:.12f} (23/81 = {23 / 81:.12f})")

if len(sys.argv) > 1:
    r = cascade_father(d4, 10, 8)
    np.savetxt(sys.argv[1], np.column_stack([r.x, r.samples_phi, r.samples_psi]),
               delimiter=",", header="x,phi,psi", comments="")
    print("samples written to", sys.argv[1])
