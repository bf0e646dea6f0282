"""Curve tables for the five reference figures, evaluated with the literal formulas.

Each preset pins the figure's fixed parameters; every panel sweeps one axis and
draws one curve per bath population (or per squeezing phase for ``fig5``).
Curves are evaluated with the ``PAPER`` convention so they coincide with the
reference plots rather than with the oracle-calibrated closed forms.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from pathlib import Path

from ..closed_form import MeasurementSetup
from ..conventions import PAPER
from ..errors import InvalidConfiguration
from ..gad import GadChannel
from ..pointer import PointerState
from ..qubit import QubitState
from .sweep import Axis, SweepSpec, SweepTable, run_sweep

PI = math.pi
BATH_POPULATIONS = {"p0": 0.0, "p1_4": 0.25, "p1_2": 0.5}
S_AXIS = Axis("s", 0.0, 3.0, 601)
THETA_F_AXIS = Axis("theta_f", 0.0, PI, 721)


@dataclass(frozen=True)
class Curve:
    label: str
    overrides: dict


@dataclass(frozen=True)
class Panel:
    name: str
    axis: Axis
    outputs: tuple[str, ...]
    overrides: dict
    curves: tuple[Curve, ...]


@dataclass(frozen=True)
class FigurePreset:
    id: str
    bindings: dict
    panels: tuple[Panel, ...] = field(default=())

    def base_setup(self) -> MeasurementSetup:
        return build_setup(self.bindings)


def build_setup(values: dict) -> MeasurementSetup:
    """Setup from flat parameter names (``theta_i``, ``phi_f``, ``gamma``, ``n_bar``, ...)."""
    v = dict(values)
    return MeasurementSetup(
        pre=QubitState(v.get("theta_i", 0.0), v.get("phi_i", 0.0)),
        post=QubitState(v.get("theta_f", 0.0), v.get("phi_f", 0.0)),
        channel=GadChannel(v.get("gamma", 0.0), v.get("p", 0.0)),
        pointer=PointerState(
            a=v.get("a", 0.0), b=v.get("b", 0.0), r=v.get("r", 0.0),
            chi=v.get("chi", 0.0), n_bar=v.get("n_bar", 0.0), sigma=v.get("sigma", 1.0),
        ),
        s=v.get("s", 0.0),
    )


def _bath_curves(labels=("p0", "p1_4", "p1_2")) -> tuple[Curve, ...]:
    return tuple(Curve(k, {"p": BATH_POPULATIONS[k]}) for k in labels)


SOUTH = {"theta_i": 3 * PI / 4, "theta_f": PI / 4}
NORTH = {"theta_i": PI / 4, "theta_f": 3 * PI / 4}


def _selection_panels(columns: dict[str, str]) -> tuple[Panel, ...]:
    """The eight-panel layout shared by the success-probability and amplification figures.

    ``columns`` maps the two panel letters of each row to an output; rows are
    the weak-angle sweep and three strength sweeps (bare thermal, momentum
    kick, kick plus position squeezing).
    """
    rows = [
        (THETA_F_AXIS, {"s": 0.01}),
        (S_AXIS, {"b": 0.0, "r": 0.0}),
        (S_AXIS, {"b": 6.0, "r": 0.0}),
        (S_AXIS, {"b": 6.0, "r": 1.2, "chi": 0.0}),
    ]
    letters = "abcdefgh"
    panels = []
    for k, (axis, overrides) in enumerate(rows):
        left, right = letters[2 * k], letters[2 * k + 1]
        for letter in (left, right):
            kind = columns[letter]
            geometry = SOUTH if kind in ("south", "amp_x", "amp_p") else NORTH
            output = "p_succ" if kind in ("south", "north") else kind
            sel = dict(geometry)
            if axis.name == "theta_f":
                sel.pop("theta_f")
            panels.append(Panel(letter, axis, (output,), {**sel, **overrides}, _bath_curves()))
    return tuple(panels)


PRESETS: dict[str, FigurePreset] = {
    "fig2": FigurePreset(
        "fig2",
        {"gamma": 0.1, "phi_i": 0.0, "phi_f": 0.99 * PI},
        tuple(
            Panel(letter, THETA_F_AXIS, (out,), {"theta_i": th}, _bath_curves(("p0", "p1_2")))
            for letter, out, th in (
                ("a", "wv_re", 3 * PI / 4),
                ("b", "wv_im", 3 * PI / 4),
                ("d", "wv_re", PI / 4),
                ("e", "wv_im", PI / 4),
            )
        ),
    ),
    "fig3": FigurePreset(
        "fig3",
        {"gamma": 0.1, "n_bar": 0.5, "phi_i": 0.0, "phi_f": 0.99 * PI},
        _selection_panels({c: ("south" if i % 2 == 0 else "north") for i, c in enumerate("abcdefgh")}),
    ),
    "fig4": FigurePreset(
        "fig4",
        {"n_bar": 0.5, "gamma": 0.8, "r": 0.0, "chi": 0.0, "theta_i": PI / 4, "theta_f": PI / 8,
         "phi_i": 0.0, "phi_f": 0.0},
        tuple(
            Panel(letter, S_AXIS, ("overlap",), {"b": b}, _bath_curves())
            for letter, b in (("a", 0.0), ("b", 2.0))
        ),
    ),
    "fig5": FigurePreset(
        "fig5",
        {"n_bar": 0.5, "gamma": 0.8, "r": 0.5, "b": 2.0, "theta_i": PI / 4, "theta_f": PI / 8,
         "phi_i": 0.0, "phi_f": 0.0},
        tuple(
            Panel(
                letter,
                S_AXIS,
                ("overlap",),
                {"p": BATH_POPULATIONS[key]},
                (
                    Curve("chi0", {"chi": 0.0}),
                    Curve("chi1_4", {"chi": PI / 4}),
                    Curve("chi1_2", {"chi": PI / 2}),
                    Curve("vacuum", {"n_bar": 0.0, "r": 0.0, "b": 0.0}),
                ),
            )
            for letter, key in (("a", "p0"), ("b", "p1_4"), ("c", "p1_2"))
        ),
    ),
    "fig6": FigurePreset(
        "fig6",
        {"gamma": 0.1, "n_bar": 0.5, "phi_i": 0.0, "phi_f": 0.99 * PI},
        _selection_panels({c: ("amp_x" if i % 2 == 0 else "amp_p") for i, c in enumerate("abcdefgh")}),
    ),
}


def get_preset(figure_id: str) -> FigurePreset:
    try:
        return PRESETS[figure_id]
    except KeyError:
        raise InvalidConfiguration(f"unknown figure {figure_id!r}; expected one of {sorted(PRESETS)}") from None


def curve_parameters(preset: FigurePreset, panel: Panel, curve: Curve) -> dict:
    return {**preset.bindings, **panel.overrides, **curve.overrides}


def figure_curves(preset: FigurePreset | str, workers: int = 1) -> dict[str, SweepTable]:
    """One table per ``(panel, curve)``, keyed ``"<fig>_<panel>_<curve>"``."""
    if isinstance(preset, str):
        preset = get_preset(preset)
    tables = {}
    for panel in preset.panels:
        for curve in panel.curves:
            base = build_setup(curve_parameters(preset, panel, curve))
            spec = SweepSpec(base, panel.axis, outputs=panel.outputs)
            tables[f"{preset.id}_{panel.name}_{curve.label}"] = run_sweep(spec, "analytic", PAPER, workers)
    return tables


def write_figure(preset: FigurePreset | str, out_dir, workers: int = 1) -> list[Path]:
    """Write every curve table as CSV plus a ``manifest.json`` of the bindings."""
    if isinstance(preset, str):
        preset = get_preset(preset)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    manifest = {"figure": preset.id, "convention": PAPER.as_dict(), "bindings": preset.bindings, "tables": {}}
    for name, table in figure_curves(preset, workers).items():
        path = out / f"{name}.csv"
        table.write_csv(path)
        written.append(path)
        panel_name, curve_label = name.split("_", 2)[1:]
        panel = next(p for p in preset.panels if p.name == panel_name)
        curve = next(c for c in panel.curves if c.label == curve_label)
        manifest["tables"][name] = {
            "axis": panel.axis.name,
            "range": [panel.axis.start, panel.axis.stop, panel.axis.count],
            "outputs": list(panel.outputs),
            "parameters": curve_parameters(preset, panel, curve),
        }
    path = out / "manifest.json"
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    written.append(path)
    return written
