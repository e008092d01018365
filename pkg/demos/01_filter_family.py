"""Walk around the one-parameter family of genus-2 filters.

Every angle gives a valid four-tap quadrature mirror filter. Two angles are
special: pi/2 spreads the filter over taps 0 and 3, and 3pi/2 over taps 1
and 2. The angle 7pi/6 is the classical Daubechies filter.
"""

import math

import numpy as np

from cuntzwave import from_theta, haar, reflect_theta, unitarity_check, validate


def show(label, bank):
    taps = np.array([bank.coeff(0, k).real for k in range(4)])
    rep = validate(bank)
    print(f"{label:>8}  a = {np.array2string(taps, precision=6, suppress_small=True)}  residual {rep.max_residual:.1e}")


print("low-pass taps along the family")
for label in ["0", "pi/2", "pi", "7pi/6", "3pi/2"]:
    show(label, from_theta(label))

s3 = math.sqrt(3)
want = np.array([1 + s3, 3 + s3, 3 - s3, 1 - s3]) / (4 * math.sqrt(2))
got = np.array([from_theta("7pi/6").coeff(0, k).real for k in range(4)])
print(f"\nDaubechies taps match the closed form to {np.max(np.abs(got - want)):.1e}")

grid = np.linspace(0, 2 * math.pi, 200, endpoint=False)
worst = max(unitarity_check(from_theta(t), 128) for t in grid)
print(f"polyphase matrix is unitary on the circle, worst deviation {worst:.1e} over 200 angles")

# reversing the taps moves theta to pi - theta
b = reflect_theta(from_theta(0.4))
print("reversed taps at 0.4 equal the filter at pi - 0.4:",
      all(abs(b.coeff(0, k) - from_theta(math.pi - 0.4).coeff(0, k)) < 1e-15 for k in range(4)))

print("\nHaar:", haar().low)
