"""Closed forms against the brute-force Fock-space simulation, one setup at a time.

The oracle builds the displaced squeezed thermal pointer on a truncated Fock
space, entangles it with the qubit, sends the qubit through the noise channel
and post-selects. Its numbers are printed beside the analytic ones.
"""

import numpy as np

from thermoweak import GadChannel, MeasurementSetup, PointerState, QubitState, evaluate, run_protocol

setup = MeasurementSetup(
    pre=QubitState(2.1, 0.4),
    post=QubitState(0.9, 2.2),
    channel=GadChannel(gamma=0.3, p=0.2),
    pointer=PointerState(a=0.2, b=1.0, r=0.4, chi=np.pi / 5, n_bar=0.5),
    s=0.8,
)

closed = evaluate(setup)
oracle = run_protocol(setup)
print(f"Fock cutoff used: {oracle.cutoff_used}, thermal truncation loss {oracle.truncation_loss:.1e}")
for name in ("p_succ", "overlap", "delta_x", "delta_p"):
    a, b = getattr(closed, name), oracle.scalars()[name]
    print(f"{name:8s} closed {a:+.12f}  oracle {b:+.12f}  |diff| {abs(a - b):.1e}")
