"""Flat ``key = value`` configuration files with dotted section prefixes.

Example::

    # comments start with '#'
    channel.los.exponent = 2.5
    sweep.alpha = 0.1, 0.2, 0.3, 0.4
    geometry.positions = 7.1,0.3; 5.6,1.6

Omitted keys take the defaults in :data:`DEFAULTS`. A resolved configuration
written back with :func:`dump_settings` loads to an identical
:class:`SweepSpec`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Union

from .channel import ChannelParams, LinkBudget
from .errors import ParseError, ValidationError
from .sim import DEFAULT_D_SOURCE, DEFAULT_FIXED_POSITIONS, Placement, SimConfig

MODES = ("sweep", "selection-freq")


def _float(text: str) -> float:
    value = float(text)
    if not math.isfinite(value):
        raise ValueError("value must be finite")
    return value


def _int(text: str) -> int:
    return int(text)


def _float_list(text: str) -> tuple:
    items = [t.strip() for t in text.split(",") if t.strip()]
    if not items:
        raise ValueError("empty list")
    return tuple(_float(t) for t in items)


def _int_list(text: str) -> tuple:
    out = []
    for t in (t.strip() for t in text.split(",")):
        if not t:
            continue
        if ".." in t:
            lo, hi = t.split("..")
            out.extend(range(int(lo), int(hi) + 1))
        else:
            out.append(int(t))
    if not out:
        raise ValueError("empty list")
    return tuple(out)


def _point(text: str) -> tuple:
    xy = _float_list(text)
    if len(xy) != 2:
        raise ValueError("expected 'x,y'")
    return xy


def _points(text: str) -> tuple:
    return tuple(_point(p) for p in text.split(";") if p.strip())


def _str(text: str) -> str:
    return text.strip()


def _fmt(value) -> str:
    if isinstance(value, tuple):
        if value and isinstance(value[0], tuple):
            return "; ".join(_fmt(p) for p in value)
        return ", ".join(_fmt(v) for v in value)
    if isinstance(value, float):
        return repr(value)
    return str(value)


# key -> (parser, default). A default of None means "derived" (see _resolve).
SCHEMA = {
    "run.mode": (_str, "sweep"),
    "sim.n_trials": (_int, 10_000),
    "sim.seed": (_int, 0),
    "sim.min_distance_m": (_float, 1.0),
    "geometry.d_source_m": (_float, DEFAULT_D_SOURCE),
    "geometry.placement": (_str, "disk"),
    "geometry.center": (_point, None),
    "geometry.radius_m": (_float, 2.0),
    "geometry.inner_radius_m": (_float, 0.0),
    "geometry.positions": (_points, DEFAULT_FIXED_POSITIONS),
    "channel.los.intercept_db": (_float, 0.0),
    "channel.los.exponent": (_float, 2.5),
    "channel.los.sigma_db": (_float, 8.66),
    "channel.nlos.intercept_db": (_float, -25.0),
    "channel.nlos.exponent": (_float, 5.76),
    "channel.nlos.sigma_db": (_float, 9.06),
    "link.gamma_th_db": (_float, 33.18),
    "link.noise_dbm": (_float, -75.0),
    "link.p_max_mw": (_float, 100.0),
    "wpt.a_r_cm2": (_float, 1.0),
    "wpt.alpha": (_float, 0.3),
    "sweep.n": (_int_list, tuple(range(11))),
    "sweep.alpha": (_float_list, (0.1, 0.2, 0.3, 0.4)),
    "sweep.gamma": (_float_list, (0.2, 0.6, 1.0, 1.4)),
    "sweep.max_total_trials": (_int, 50_000_000),
    "output.path": (_str, "results.csv"),
}
DEFAULTS = {k: d for k, (_, d) in SCHEMA.items()}


@dataclass(frozen=True)
class SweepSpec:
    base: SimConfig
    sweep_n: tuple
    sweep_alpha: tuple
    sweep_gamma: tuple
    output_path: str
    mode: str = "sweep"
    max_total_trials: int = 50_000_000
    settings: tuple = ()   # resolved (key, value) pairs, for the manifest

    @property
    def cells(self) -> list:
        """``(n, alpha, gamma)`` triples in output order."""
        ns = (self.base.n_candidates,) if self.mode == "selection-freq" else self.sweep_n
        return [(n, a, g) for n in ns for a in self.sweep_alpha for g in self.sweep_gamma]

    def config_for(self, n: int, alpha: float, gamma: float) -> SimConfig:
        from dataclasses import replace
        return replace(self.base, n_candidates=n, alpha=alpha, gamma_scale=gamma)

    def with_overrides(self, **overrides) -> "SweepSpec":
        """Re-resolve with some settings replaced (keys as in :data:`SCHEMA`)."""
        settings = dict(self.settings)
        settings.update(overrides)
        return build_spec(settings)


def parse_text(text: str) -> dict:
    """Parse config text into ``{key: typed value}``; unknown keys are errors."""
    out = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ParseError("expected 'key = value'", line=lineno)
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in SCHEMA:
            raise ParseError("unknown key", line=lineno, key=key)
        if key in out:
            raise ParseError("duplicate key", line=lineno, key=key)
        parser, _ = SCHEMA[key]
        try:
            out[key] = parser(value)
        except ValueError as exc:
            raise ParseError(f"bad value {value!r}: {exc}", line=lineno, key=key) from None
    return out


def _resolve(given: dict) -> dict:
    settings = dict(DEFAULTS)
    settings.update(given)
    if settings["geometry.center"] is None:
        settings["geometry.center"] = (settings["geometry.d_source_m"], 0.0)
    return settings


def build_spec(given: dict) -> SweepSpec:
    s = _resolve(given)
    if s["run.mode"] not in MODES:
        raise ValidationError(f"run.mode must be one of {MODES}")
    for key in ("wpt.alpha",):
        if not 0 < s[key] <= 1:
            raise ValidationError(f"{key}: alpha ∈ [0,1] required (and alpha > 0)")
    if any(not 0 < a <= 1 for a in s["sweep.alpha"]):
        raise ValidationError("sweep.alpha: alpha ∈ [0,1] required (and alpha > 0)")
    if any(g <= 0 for g in s["sweep.gamma"]):
        raise ValidationError("sweep.gamma: gamma_scale > 0 required")
    if any(n < 0 for n in s["sweep.n"]):
        raise ValidationError("sweep.n: n_candidates >= 0 required")
    if s["wpt.a_r_cm2"] <= 0:
        raise ValidationError("wpt.a_r_cm2 must be > 0")

    selection = s["run.mode"] == "selection-freq"
    kind = "fixed" if selection else s["geometry.placement"]
    placement = Placement(
        kind=kind, center=tuple(s["geometry.center"]), radius=s["geometry.radius_m"],
        inner_radius=s["geometry.inner_radius_m"], positions=tuple(s["geometry.positions"]))
    try:
        los = ChannelParams(s["channel.los.intercept_db"], s["channel.los.exponent"],
                            s["channel.los.sigma_db"])
        nlos = ChannelParams(s["channel.nlos.intercept_db"], s["channel.nlos.exponent"],
                             s["channel.nlos.sigma_db"])
        budget = LinkBudget.from_db(s["link.gamma_th_db"], s["link.noise_dbm"], s["link.p_max_mw"])
    except ValueError as exc:
        raise ValidationError(str(exc)) from None
    n0 = len(placement.positions) if selection else max(s["sweep.n"])
    base = SimConfig(
        n_candidates=n0, d_source=s["geometry.d_source_m"], placement=placement,
        los_params=los, nlos_params=nlos, budget=budget, alpha=s["wpt.alpha"],
        a_r=s["wpt.a_r_cm2"] * 1e-4, gamma_scale=1.0, n_trials=s["sim.n_trials"],
        seed=s["sim.seed"], min_distance=s["sim.min_distance_m"])
    if kind == "fixed" and max(s["sweep.n"]) > len(placement.positions) and not selection:
        raise ValidationError("sweep.n exceeds the number of fixed positions")

    spec = SweepSpec(
        base=base, sweep_n=tuple(s["sweep.n"]), sweep_alpha=tuple(s["sweep.alpha"]),
        sweep_gamma=tuple(s["sweep.gamma"]), output_path=s["output.path"],
        mode=s["run.mode"], max_total_trials=s["sweep.max_total_trials"],
        settings=tuple(sorted(s.items())))
    total = len(spec.cells) * base.n_trials
    if total > spec.max_total_trials:
        raise ValidationError(
            f"sweep needs {total} trials, above sweep.max_total_trials={spec.max_total_trials}")
    return spec


def load_config(path: Union[str, Path]) -> SweepSpec:
    return build_spec(parse_text(Path(path).read_text(encoding="utf-8")))


def dump_settings(spec: SweepSpec) -> str:
    return "".join(f"{k} = {_fmt(v)}\n" for k, v in spec.settings)
