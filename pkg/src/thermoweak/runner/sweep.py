"""Parameter sweeps over a measurement setup with either engine."""

from __future__ import annotations

import io
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from ..closed_form import MeasurementSetup, evaluate, weak_value_general
from ..conventions import Convention, resolve
from ..errors import (
    CutoffTooSmall,
    InvalidConfiguration,
    NoConvergence,
    OrthogonalSelection,
    ZeroPostSelection,
)
from ..fock import run_protocol
from ..gad import kraus_ops

AXES = ("s", "theta_f", "theta_i", "p", "gamma", "b", "r", "chi", "n_bar")
QUANTITIES = ("p_succ", "overlap", "amp_x", "amp_p", "wv_re", "wv_im", "delta_x", "delta_p")
ENGINES = ("analytic", "oracle", "both")

_STATUS = {
    ZeroPostSelection: "zero_postselection",
    NoConvergence: "no_convergence",
    CutoffTooSmall: "cutoff_too_small",
}


def with_value(setup: MeasurementSetup, axis: str, value: float) -> MeasurementSetup:
    """Copy of ``setup`` with one named parameter replaced."""
    if axis == "s":
        return replace(setup, s=value)
    if axis == "theta_f":
        return replace(setup, post=replace(setup.post, theta=value))
    if axis == "theta_i":
        return replace(setup, pre=replace(setup.pre, theta=value))
    if axis in ("p", "gamma"):
        return replace(setup, channel=replace(setup.channel, **{axis: value}))
    if axis in ("b", "r", "chi", "n_bar"):
        return replace(setup, pointer=replace(setup.pointer, **{axis: value}))
    raise InvalidConfiguration(f"unknown sweep axis {axis!r}; expected one of {AXES}")


@dataclass(frozen=True)
class Axis:
    name: str
    start: float
    stop: float
    count: int

    def __post_init__(self):
        if self.name not in AXES:
            raise InvalidConfiguration(f"unknown sweep axis {self.name!r}; expected one of {AXES}")
        if int(self.count) != self.count or self.count < 2:
            raise InvalidConfiguration("sweep count must be an integer >= 2")
        if not (math.isfinite(self.start) and math.isfinite(self.stop)):
            raise InvalidConfiguration("sweep range must be finite")

    def values(self) -> np.ndarray:
        return np.linspace(self.start, self.stop, int(self.count))


@dataclass(frozen=True)
class SweepSpec:
    base: MeasurementSetup
    axis: Axis
    extra_axis: Axis | None = None
    outputs: tuple[str, ...] = QUANTITIES

    def __post_init__(self):
        object.__setattr__(self, "outputs", tuple(self.outputs))
        bad = [q for q in self.outputs if q not in QUANTITIES]
        if bad or not self.outputs:
            raise InvalidConfiguration(f"unknown outputs {bad}; expected a subset of {QUANTITIES}")
        if self.extra_axis is not None and self.extra_axis.name == self.axis.name:
            raise InvalidConfiguration("the two sweep axes must differ")

    def points(self) -> list[tuple[float, float | None]]:
        """Grid points, outer axis major."""
        outer = self.axis.values()
        if self.extra_axis is None:
            return [(float(x), None) for x in outer]
        inner = self.extra_axis.values()
        return [(float(x), float(y)) for x in outer for y in inner]

    def setup_at(self, x: float, y: float | None) -> MeasurementSetup:
        setup = with_value(self.base, self.axis.name, x)
        if y is not None:
            setup = with_value(setup, self.extra_axis.name, y)
        return setup


@dataclass
class SweepTable:
    columns: list[str]
    rows: list[list] = field(default_factory=list)

    def column(self, name: str) -> np.ndarray:
        k = self.columns.index(name)
        return np.array([row[k] for row in self.rows], dtype=float)

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write(",".join(self.columns) + "\n")
        for row in self.rows:
            buf.write(",".join(_cell(v) for v in row) + "\n")
        return buf.getvalue()

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            fh.write(self.to_csv())


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, str):
        return value
    return format(float(value), ".17g")


def analytic_quantities(setup: MeasurementSetup, convention: Convention) -> dict[str, float]:
    res = evaluate(setup, convention)
    return {
        "p_succ": res.p_succ,
        "overlap": res.overlap,
        "amp_x": res.amp_x,
        "amp_p": res.amp_p,
        "wv_re": res.weak_value.real,
        "wv_im": res.weak_value.imag,
        "delta_x": res.delta_x,
        "delta_p": res.delta_p,
    }


def oracle_quantities(setup: MeasurementSetup, tol: float = 1e-9) -> dict[str, float]:
    """Fock-space values; the weak value comes from the Kraus-matrix path."""
    rep = run_protocol(setup, tol=tol)
    sx = setup.pointer.sigma * setup.s
    sp = setup.s / setup.pointer.sigma
    try:
        wv = weak_value_general(setup.pre, setup.post, kraus_ops(setup.channel))
    except OrthogonalSelection:
        wv = complex(math.nan, math.nan)
    return {
        "p_succ": rep.p_succ,
        "overlap": rep.overlap,
        "amp_x": rep.delta_x / sx if sx else math.nan,
        "amp_p": rep.delta_p / sp if sp else math.nan,
        "wv_re": wv.real,
        "wv_im": wv.imag,
        "delta_x": rep.delta_x,
        "delta_p": rep.delta_p,
    }


def _safe(fn, *args) -> tuple[dict | None, str]:
    try:
        return fn(*args), "ok"
    except tuple(_STATUS) as exc:
        return None, _STATUS[type(exc)]


def _columns(spec: SweepSpec, engine: str) -> list[str]:
    cols = ["axis1", "axis2"]
    if engine == "both":
        for q in spec.outputs:
            cols += [f"analytic_{q}", f"oracle_{q}", f"absdiff_{q}"]
    else:
        cols += list(spec.outputs)
    return cols + ["status"]


def _row(spec: SweepSpec, engine: str, conv: Convention, point) -> list:
    x, y = point
    setup = spec.setup_at(x, y)
    nan = {q: math.nan for q in spec.outputs}
    if engine == "analytic":
        values, status = _safe(analytic_quantities, setup, conv)
        return [x, y] + [(values or nan)[q] for q in spec.outputs] + [status]
    if engine == "oracle":
        values, status = _safe(oracle_quantities, setup)
        return [x, y] + [(values or nan)[q] for q in spec.outputs] + [status]
    ana, s1 = _safe(analytic_quantities, setup, conv)
    ora, s2 = _safe(oracle_quantities, setup)
    ana, ora = ana or nan, ora or nan
    cells = [x, y]
    for q in spec.outputs:
        cells += [ana[q], ora[q], abs(ana[q] - ora[q])]
    status = s1 if s1 == s2 else f"{s1};{s2}"
    return cells + [status]


def run_sweep(
    spec: SweepSpec,
    engine: str = "analytic",
    convention: Convention | str | None = None,
    workers: int = 1,
) -> SweepTable:
    """Evaluate every grid point; the row order never depends on ``workers``.

    Grid points where post-selection fails or the oracle cannot converge are
    kept with ``nan`` values and a descriptive ``status``.
    """
    if engine not in ENGINES:
        raise InvalidConfiguration(f"engine must be one of {ENGINES}")
    conv = resolve(convention)
    points = spec.points()
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(lambda pt: _row(spec, engine, conv, pt), points))
    else:
        rows = [_row(spec, engine, conv, pt) for pt in points]
    return SweepTable(_columns(spec, engine), rows)
