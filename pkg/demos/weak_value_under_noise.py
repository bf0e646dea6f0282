"""How a thermal bath bends the weak value of sigma_z.

Sweeps the post-selection angle for a Southern pre-selected state and prints
the real part of the weak value for a cold and a hot bath, next to the
noiseless reference. Run with ``python demos/weak_value_under_noise.py``.
"""

import numpy as np

from thermoweak import GadChannel, OrthogonalSelection, QubitState, aav_weak_value, weak_value_gad

pre = QubitState(3 * np.pi / 4, 0.0)
print(f"{'theta_f/pi':>10} {'noiseless':>11} {'cold bath':>11} {'hot bath':>11}")
for theta_f in np.linspace(0.05, 0.95, 10) * np.pi:
    post = QubitState(theta_f, 0.99 * np.pi)
    row = [theta_f / np.pi]
    try:
        row.append(aav_weak_value(pre, post).real)
    except OrthogonalSelection:
        row.append(float("nan"))
    for p in (0.0, 0.5):
        row.append(weak_value_gad(pre, post, GadChannel(0.1, p)).real)
    print("{:10.3f} {:11.4f} {:11.4f} {:11.4f}".format(*row))
