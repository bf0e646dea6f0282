"""Flat ``key = value`` configuration files with dotted keys.

Example::

    pre.theta = pi:0.75
    post.theta = pi:0.25
    post.phi = pi:0.99
    channel.gamma = 0.1
    channel.p = 0
    pointer.n_bar = 0.5
    measurement.s = 0.01
    sweep.axis = theta_f
    sweep.start = 0
    sweep.stop = pi:1
    sweep.count = 181
    sweep.outputs = wv_re, wv_im

Any numeric value may be written as a multiple of pi with the ``pi:`` prefix.
``channel.q_bar`` may replace ``channel.p`` (the bath population is then
``q_bar / (2 q_bar + 1)``).
"""

from __future__ import annotations

import configparser
import math

from ..closed_form import MeasurementSetup
from ..conventions import resolve
from ..errors import InvalidConfiguration
from ..gad import BathSpec, GadChannel, p_from_bath
from ..pointer import PointerState
from ..qubit import QubitState
from .sweep import Axis, SweepSpec

_SECTION = "config"

SETUP_KEYS = {
    "pre.theta", "pre.phi", "post.theta", "post.phi",
    "channel.gamma", "channel.p", "channel.q_bar",
    "pointer.a", "pointer.b", "pointer.r", "pointer.chi", "pointer.n_bar", "pointer.sigma",
    "measurement.s",
}
SWEEP_KEYS = {
    "sweep.axis", "sweep.start", "sweep.stop", "sweep.count",
    "sweep.axis2", "sweep.start2", "sweep.stop2", "sweep.count2",
    "sweep.outputs", "sweep.engine", "sweep.workers",
}
OTHER_KEYS = {"convention"}


def parse_number(text: str) -> float:
    """``"0.25"`` -> 0.25, ``"pi:0.75"`` -> 0.75 pi."""
    text = text.strip()
    try:
        if text.lower().startswith("pi:"):
            value = float(text[3:]) * math.pi
        else:
            value = float(text)
    except ValueError:
        raise InvalidConfiguration(f"not a number: {text!r}") from None
    if not math.isfinite(value):
        raise InvalidConfiguration(f"value must be finite: {text!r}")
    return value


def read_pairs(text: str) -> dict[str, str]:
    parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"))
    try:
        parser.read_string(f"[{_SECTION}]\n{text}")
    except configparser.Error as exc:
        raise InvalidConfiguration(f"malformed configuration: {exc}") from None
    pairs = dict(parser[_SECTION])
    unknown = sorted(set(pairs) - SETUP_KEYS - SWEEP_KEYS - OTHER_KEYS)
    if unknown:
        raise InvalidConfiguration(f"unknown keys: {', '.join(unknown)}")
    return pairs


def setup_from_pairs(pairs: dict[str, str]) -> MeasurementSetup:
    num = {k: parse_number(v) for k, v in pairs.items() if k in SETUP_KEYS}
    if "channel.p" in num and "channel.q_bar" in num:
        raise InvalidConfiguration("give channel.p or channel.q_bar, not both")
    try:
        p = p_from_bath(BathSpec(q_bar=num["channel.q_bar"])) if "channel.q_bar" in num else num.get("channel.p", 0.0)
        return MeasurementSetup(
            pre=QubitState(num.get("pre.theta", 0.0), num.get("pre.phi", 0.0)),
            post=QubitState(num.get("post.theta", 0.0), num.get("post.phi", 0.0)),
            channel=GadChannel(num.get("channel.gamma", 0.0), p),
            pointer=PointerState(
                **{k.split(".")[1]: v for k, v in num.items() if k.startswith("pointer.")}
            ),
            s=num.get("measurement.s", 0.0),
        )
    except InvalidConfiguration:
        raise
    except ValueError as exc:
        raise InvalidConfiguration(str(exc)) from None


def _axis(pairs: dict[str, str], suffix: str) -> Axis | None:
    name = pairs.get(f"sweep.axis{suffix}")
    if name is None:
        return None
    try:
        return Axis(
            name.strip(),
            parse_number(pairs[f"sweep.start{suffix}"]),
            parse_number(pairs[f"sweep.stop{suffix}"]),
            int(parse_number(pairs[f"sweep.count{suffix}"])),
        )
    except KeyError as exc:
        raise InvalidConfiguration(f"missing key {exc.args[0]}") from None


def sweep_from_pairs(pairs: dict[str, str]) -> SweepSpec:
    axis = _axis(pairs, "")
    if axis is None:
        raise InvalidConfiguration("sweep.axis is required")
    kwargs = {}
    if "sweep.outputs" in pairs:
        kwargs["outputs"] = tuple(q.strip() for q in pairs["sweep.outputs"].split(",") if q.strip())
    return SweepSpec(setup_from_pairs(pairs), axis, _axis(pairs, "2"), **kwargs)


def load_sweep(text: str):
    """Parse a sweep file into ``(spec, convention, engine or None, workers)``."""
    pairs = read_pairs(text)
    spec = sweep_from_pairs(pairs)
    try:
        conv = resolve(pairs.get("convention", "calibrated").strip())
    except ValueError as exc:
        raise InvalidConfiguration(str(exc)) from None
    engine = pairs.get("sweep.engine")
    workers = int(parse_number(pairs.get("sweep.workers", "1")))
    return spec, conv, engine.strip() if engine else None, max(1, workers)


def load_setup(text: str) -> MeasurementSetup:
    return setup_from_pairs(read_pairs(text))
