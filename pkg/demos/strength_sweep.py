"""Drive the runner from Python: load a config, run the sweep, inspect the table.

Equivalent CLI call::

    thermoweak sweep --config demos/strength_sweep.cfg --out sweep.csv
"""

from pathlib import Path

import numpy as np

from thermoweak.runner import load_sweep, run_sweep

spec, convention, engine, workers = load_sweep(Path(__file__).with_name("strength_sweep.cfg").read_text())
table = run_sweep(spec, engine or "analytic", convention, workers)

s = table.column("axis1")
p = table.column("p_succ")
turning = np.flatnonzero(np.sign(np.diff(p[1:])) != np.sign(np.diff(p[:-1]))) + 1
print(f"{len(table.rows)} rows; P_succ turns around at s = {np.round(s[turning], 2).tolist()}")
print(table.to_csv().splitlines()[0])
for line in table.to_csv().splitlines()[1:6]:
    print(line)
