"""Compress the Cuntz isometries to the correlation space and read off structure.

The transfer map sigma(A) = sum V_i A V_i* acts on 4x4 matrices. Its fixed
space has the dimension of the commutant of the representation, so a sweep
of the angle shows where the representation stops being irreducible.
"""

import math

import numpy as np

from cuntzwave import build_sigma, build_V, classify, from_theta, intertwiner_basis, spectrum

b = from_theta("7pi/6")
s = build_V(b)
print("correlation space exponents:", s.basis.H)
print("V_0* =")
print(np.array2string(s.V_star[0].real, precision=4, suppress_small=True))
print(f"Cuntz relation on the compression holds to {s.cuntz_residual():.1e}")

print("\nspectrum of sigma at theta = 1.0")
for value, mult in spectrum(build_sigma(build_V(from_theta(1.0)))).eigenvalues:
    print(f"  {value.real:+.6f}  x{mult}")

print("\nfixed-space dimension along 16 angles")
for i in range(16):
    t = f"{2 * i}pi/16" if i else "0"
    dim = spectrum(build_sigma(build_V(from_theta(t)))).fixed_space_dim
    print(f"  {t:>8}: {dim}")

for label in ["pi/2", "3pi/2"]:
    c = classify(from_theta(label))
    print(f"\n{label}: commutant {c.commutant_dim}, summands {c.num_irreducible_summands}, "
          f"peripheral order {c.peripheral_group_order}, UHF pieces {c.uhf_summands}")

basis = intertwiner_basis(from_theta("3pi/2"), from_theta("pi/2"))
print(f"\nintertwiners from 3pi/2 to pi/2: {len(basis)}")
for B in basis:
    B = B / B.flat[np.argmax(np.abs(B))]
    print(np.array2string(B.real, precision=3, suppress_small=True))

generic = [(0.3, 2.0), (1.0, 4.0), (5.0, 5.5)]
dims = [len(intertwiner_basis(from_theta(a), from_theta(c))) for a, c in generic]
print("generic distinct pairs are disjoint:", dims)
print(f"(angles in radians; pi = {math.pi:.6f})")
