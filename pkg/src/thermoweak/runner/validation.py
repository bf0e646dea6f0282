"""Randomised comparison of the closed forms against the Fock oracle."""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from ..calibration import calibrate_convention
from ..closed_form import MeasurementSetup, evaluate, p_succ
from ..conventions import CALIBRATED, PAPER, Convention
from ..fock import MAX_CUTOFF, estimate_cutoff, run_protocol
from ..gad import GadChannel
from ..pointer import PointerState
from ..qubit import QubitState

THRESHOLD = 1e-7
#: Cutoff-convergence tolerance of the oracle runs, a decade below THRESHOLD.
ORACLE_TOL = 1e-8
COMPARED = ("p_succ", "overlap", "delta_x", "delta_p")
#: Setups whose post-selection probability is below this are redrawn: the
#: conditioned moments are divided by P_succ and would amplify oracle noise.
MIN_P_SUCC = 1e-4


def is_feasible(setup: MeasurementSetup) -> bool:
    """Inside the oracle budget: the starting cutoff leaves room for one doubling."""
    return estimate_cutoff(setup) <= MAX_CUTOFF // 2


def random_setup(rng: np.random.Generator) -> MeasurementSetup:
    """Uniform draw from the feasible parameter box.

    Box: angles over the full sphere, gamma in [0, 1], p in [0, 1/2],
    n_bar in [0, 2], r in [0, 1.5], |alpha| <= 6, s in [0, 3],
    sigma in [0.5, 2]. Draws outside the oracle budget or with
    ``P_succ < MIN_P_SUCC`` are rejected.
    """
    while True:
        radius, angle = 6 * math.sqrt(rng.uniform()), rng.uniform(0, 2 * math.pi)
        setup = MeasurementSetup(
            pre=QubitState(rng.uniform(0, math.pi), rng.uniform(0, 2 * math.pi)),
            post=QubitState(rng.uniform(0, math.pi), rng.uniform(0, 2 * math.pi)),
            channel=GadChannel(rng.uniform(0, 1), rng.uniform(0, 0.5)),
            pointer=PointerState(
                a=radius * math.cos(angle),
                b=radius * math.sin(angle),
                r=rng.uniform(0, 1.5),
                chi=rng.uniform(0, math.pi),
                n_bar=rng.uniform(0, 2),
                sigma=rng.uniform(0.5, 2),
            ),
            s=rng.uniform(0, 3),
        )
        if is_feasible(setup) and p_succ(setup, CALIBRATED) >= MIN_P_SUCC:
            return setup


def random_setups(n: int, seed: int) -> list[MeasurementSetup]:
    rng = np.random.default_rng(seed)
    return [random_setup(rng) for _ in range(n)]


@dataclass
class ValidationReport:
    convention: Convention
    calibrated: bool
    grid_size: int
    seed: int
    max_deviation: dict
    worst_setup: dict
    cutoffs: list = field(repr=False, default_factory=list)
    threshold: float = THRESHOLD

    @property
    def passed(self) -> bool:
        return all(v < self.threshold for v in self.max_deviation.values())

    def format(self) -> str:
        c = self.convention
        lines = [
            f"convention: {c.name}" + (" (measured by oracle calibration)" if self.calibrated else " (printed constants)"),
            f"kappa = {c.kappa:.12g}",
            f"kappa_tilde = {c.kappa_tilde:.12g}",
            f"m = {c.phase_multiplicity}",
            f"squeeze_phase_offset = {c.squeeze_phase_offset:.12g}",
            f"coherence_rate = {c.coherence_rate}",
            f"correlation_shift = {c.correlation_shift}",
            f"setups = {self.grid_size} (seed {self.seed})",
            f"cutoffs = {min(self.cutoffs)}..{max(self.cutoffs)}",
        ]
        for q in COMPARED:
            flag = "ok" if self.max_deviation[q] < self.threshold else "FAIL"
            lines.append(f"max |closed - oracle| {q:8s} = {self.max_deviation[q]:.3e}  [{flag}] (setup #{self.worst_setup[q]})")
        lines.append(f"result: {'PASS' if self.passed else 'FAIL'} (threshold {self.threshold:g})")
        return "\n".join(lines) + "\n"


def _compare(setup: MeasurementSetup, conv: Convention) -> tuple[dict, int]:
    rep = run_protocol(setup, tol=ORACLE_TOL)
    res = evaluate(setup, conv)
    return {q: abs(getattr(res, q) - rep.scalars()[q]) for q in COMPARED}, rep.cutoff_used


def validate(grid_size: int = 200, seed: int = 0, paper_mode: bool = False, workers: int = 1) -> ValidationReport:
    """Calibrate (unless ``paper_mode``) and compare both engines on random setups."""
    if paper_mode:
        conv, calibrated = PAPER, False
    else:
        conv, calibrated = calibrate_convention().convention, True
    setups = random_setups(grid_size, seed)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(lambda st: _compare(st, conv), setups))
    else:
        results = [_compare(st, conv) for st in setups]
    max_dev, worst = {}, {}
    for q in COMPARED:
        devs = [d[q] for d, _ in results]
        worst[q] = int(np.argmax(devs))
        max_dev[q] = float(devs[worst[q]])
    return ValidationReport(conv, calibrated, grid_size, seed, max_dev, worst, [n for _, n in results])
