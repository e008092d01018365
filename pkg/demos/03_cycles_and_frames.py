"""Decide whether the wavelet system is an orthonormal basis or only a tight frame.

The test looks for cycles of z -> z^2 among the zeros of m_0(-z) on the
circle. The fixed point z = 1 is always there; any other cycle means the
translates of the scaling function are not orthonormal.
"""

import cmath

from cuntzwave import find_cycles, from_theta, haar
from cuntzwave.cycles import circle_zeros, cycle_set, frame_classify
from cuntzwave.filters import substitute_odd

for label, bank in [
    ("haar", haar()),
    ("7pi/6", from_theta("7pi/6")),
    ("pi/2", from_theta("pi/2")),
    ("3pi/2", from_theta("3pi/2")),
    ("haar, z -> z^5", substitute_odd(haar(), 2)),
]:
    cs = cycle_set(bank)
    cycles = ["{" + ", ".join(str(t) for t in c.turns) + "}" for c in cs.cycles]
    print(f"{label:>15}: cycles {' '.join(cycles):<30} {frame_classify(bank).value}")

# a direct look at the zeros for pi/2: the cube roots of unity
print("\nzeros of m0(-z) at pi/2:", [f"{z:.3f}" for z in circle_zeros(from_theta('pi/2').low)])

# cycles planted by hand
zs = [cmath.exp(2j * cmath.pi * k / 7) for k in range(1, 7)]
print("seventh roots of unity split into", [tuple(str(t) for t in c.turns) for c in find_cycles(zs).cycles])
