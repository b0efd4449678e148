"""Strict JSON run configuration.

Every physical quantity is given under a unit-suffixed key (``T1_s``,
``x0_m``, ``v_m_per_s``, ``omega_p_rad_per_s``); unknown keys, missing units
and wrong types are rejected with the line of the offending key.
"""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Any

from .collapse_geometry import Bounds, MeasurementSpec, OBSERVABLES, model_from_name
from .planner import ExperimentParams
from .simulation import MeasurementModel, SimulationConfig
from .spacetime import C, Boost, Event
from .two_photon import FinalStateRule, TwoPhotonAmplitude

SCHEMA_VERSION = 1

LAYERS = ("regions", "window", "collapse_lines", "worldlines", "light_cones", "events")

SWEEP_KEYS = {"v_m_per_s": "v", "x0_m": "x0", "T1_s": "T1", "epsilon_s": "epsilon",
              "storage_latency_s": "storage_latency"}


class ConfigError(ValueError):
    def __init__(self, message: str, line: int | None = None, source: str = "<config>"):
        self.line = line
        self.source = source
        self.message = message
        where = f"{source}:{line}" if line else source
        super().__init__(f"{where}: {message}")


@dataclass
class RunConfig:
    """Parsed configuration; blocks absent from the file are ``None``."""

    schema_version: int
    boost: Boost | None = None
    direction: str = "forward"
    events: list[Event] | None = None
    experiment: ExperimentParams | None = None
    sweep: dict | None = None
    amplitude: TwoPhotonAmplitude | None = None
    simulation: dict | None = None
    diagram: dict | None = None
    measurements: list[MeasurementSpec] | None = None


class _Reader:
    def __init__(self, text: str, source: str):
        self.text = text
        self.source = source
        self.lines = text.splitlines()

    def line_of(self, key: str | None) -> int | None:
        if key is None:
            return None
        pat = re.compile(r'"' + re.escape(key) + r'"\s*:')
        for i, line in enumerate(self.lines, 1):
            if pat.search(line):
                return i
        return None

    def fail(self, message: str, key: str | None = None):
        raise ConfigError(message, self.line_of(key), self.source)

    def obj(self, value: Any, path: str, key: str | None) -> dict:
        if not isinstance(value, dict):
            self.fail(f"{path} must be an object", key)
        return value

    def keys(self, obj: dict, path: str, allowed: set[str], required: set[str] = frozenset(),
             parent_key: str | None = None) -> None:
        for k in obj:
            if k not in allowed:
                hint = " (physical quantities need a unit suffix, e.g. '_m', '_s')" \
                    if not re.search(r"_(m|s|m_per_s|rad_per_s)$", k) else ""
                self.fail(f"unknown key {k!r} in {path}{hint}", k)
        for k in sorted(required):
            if k not in obj:
                self.fail(f"missing key {k!r} in {path}", parent_key)

    def one_of(self, obj: dict, path: str, names: tuple[str, ...], parent_key: str | None,
               required: bool = True) -> str | None:
        present = [n for n in names if n in obj]
        if len(present) > 1:
            self.fail(f"{path}: give only one of {', '.join(names)}", present[1])
        if not present:
            if required:
                self.fail(f"{path}: missing one of {', '.join(names)}", parent_key)
            return None
        return present[0]

    def number(self, obj: dict, key: str, path: str, default: float | None = None) -> float:
        if key not in obj:
            if default is None:
                self.fail(f"missing key {key!r} in {path}")
            return default
        v = obj[key]
        if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
            self.fail(f"{path}.{key} must be a finite number", key)
        return float(v)

    def integer(self, obj: dict, key: str, path: str, default: int | None = None) -> int:
        if key not in obj:
            if default is None:
                self.fail(f"missing key {key!r} in {path}")
            return default
        v = obj[key]
        if isinstance(v, bool) or not isinstance(v, int):
            self.fail(f"{path}.{key} must be an integer", key)
        return v

    def choice(self, obj: dict, key: str, path: str, options, default: str | None = None) -> str:
        if key not in obj:
            if default is None:
                self.fail(f"missing key {key!r} in {path}")
            return default
        v = obj[key]
        if v not in options:
            self.fail(f"{path}.{key} must be one of {', '.join(map(str, options))}", key)
        return v

    def str_list(self, obj: dict, key: str, path: str, options, default) -> list[str]:
        if key not in obj:
            return list(default)
        v = obj[key]
        if not isinstance(v, list):
            self.fail(f"{path}.{key} must be a list drawn from {', '.join(options)}", key)
        for x in v:
            if x not in options:
                self.fail(f"{path}.{key}: unknown entry {x!r} (choose from {', '.join(options)})",
                          key)
        return list(v)

    def guarded(self, fn, key: str | None):
        try:
            return fn()
        except ConfigError:
            raise
        except (ValueError, TypeError) as exc:
            self.fail(str(exc), key)


def _event(r: _Reader, obj: dict, path: str, parent: str) -> Event:
    r.obj(obj, path, parent)
    r.keys(obj, path, {"ct_m", "t_s", "x_m"}, {"x_m"}, parent)
    tkey = r.one_of(obj, path, ("ct_m", "t_s"), parent)
    ct = r.number(obj, tkey, path)
    if tkey == "t_s":
        ct *= C
    return r.guarded(lambda: Event(ct, r.number(obj, "x_m", path)), tkey)


def _boost(r: _Reader, obj: dict) -> Boost:
    path = "boost"
    r.obj(obj, path, path)
    r.keys(obj, path, {"beta", "v_m_per_s", "ct_offset_m", "x_offset_m"}, parent_key=path)
    vkey = r.one_of(obj, path, ("beta", "v_m_per_s"), path)
    beta = r.number(obj, vkey, path)
    if vkey == "v_m_per_s":
        beta /= C
    return r.guarded(lambda: Boost(beta, r.number(obj, "ct_offset_m", path, 0.0),
                                   r.number(obj, "x_offset_m", path, 0.0)), vkey)


def _experiment(r: _Reader, obj: dict) -> ExperimentParams:
    path = "experiment"
    r.obj(obj, path, path)
    r.keys(obj, path, {"v_m_per_s", "beta", "x0_m", "T1_s", "cT1_m", "epsilon_s",
                       "c_epsilon_m", "storage_latency_s"}, {"x0_m"}, path)
    vkey = r.one_of(obj, path, ("v_m_per_s", "beta"), path)
    tkey = r.one_of(obj, path, ("T1_s", "cT1_m"), path)
    ekey = r.one_of(obj, path, ("epsilon_s", "c_epsilon_m"), path, required=False)
    v = r.number(obj, vkey, path)
    v = v * C if vkey == "beta" else v
    T1 = r.number(obj, tkey, path)
    T1 = T1 / C if tkey == "cT1_m" else T1
    eps = 0.0 if ekey is None else r.number(obj, ekey, path)
    eps = eps / C if ekey == "c_epsilon_m" else eps
    return r.guarded(lambda: ExperimentParams(
        v, r.number(obj, "x0_m", path), T1, eps,
        r.number(obj, "storage_latency_s", path, 1e-10)), path)


def _sweep(r: _Reader, obj: dict) -> dict:
    path = "sweep"
    r.obj(obj, path, path)
    r.keys(obj, path, set(SWEEP_KEYS), parent_key=path)
    if not obj:
        r.fail("sweep needs at least one parameter range", path)
    out = {}
    for k, rng in obj.items():
        p = f"sweep.{k}"
        r.obj(rng, p, k)
        r.keys(rng, p, {"start", "stop", "count"}, {"start", "stop", "count"}, k)
        count = r.integer(rng, "count", p)
        if count < 1:
            r.fail(f"{p}.count must be >= 1", k)
        out[SWEEP_KEYS[k]] = (r.number(rng, "start", p), r.number(rng, "stop", p), count)
    return out


def _amplitude(r: _Reader, obj: dict) -> TwoPhotonAmplitude:
    path = "amplitude"
    r.obj(obj, path, path)
    names = ("omega_p_rad_per_s", "sigma_sum_rad_per_s", "sigma_diff_rad_per_s", "delta_rad_per_s")
    r.keys(obj, path, set(names), parent_key=path)
    d = TwoPhotonAmplitude()
    return r.guarded(lambda: TwoPhotonAmplitude(
        r.number(obj, names[0], path, d.omega_p), r.number(obj, names[1], path, d.sigma_sum),
        r.number(obj, names[2], path, d.sigma_diff), r.number(obj, names[3], path, d.delta)), path)


def _simulation(r: _Reader, obj: dict) -> dict:
    path = "simulation"
    r.obj(obj, path, path)
    r.keys(obj, path, {"model", "n_events", "seed", "observables", "final_state_rule",
                       "export_events", "export_density"}, {"n_events", "seed"}, path)
    out = {
        "model": r.choice(obj, "model", path, [m.value for m in MeasurementModel],
                          MeasurementModel.UNCOLLAPSED_DOUBLE.value),
        "n_events": r.integer(obj, "n_events", path),
        "seed": r.integer(obj, "seed", path),
        "observables": r.str_list(obj, "observables", path, ("polarization", "frequency"),
                                  ("polarization", "frequency")),
        "final_state_rule": r.choice(obj, "final_state_rule", path,
                                     [f.value for f in FinalStateRule], "outcomes"),
        "export_events": obj.get("export_events", False),
        "export_density": obj.get("export_density", False),
    }
    for flag in ("export_events", "export_density"):
        if not isinstance(out[flag], bool):
            r.fail(f"simulation.{flag} must be true or false", flag)
    r.guarded(lambda: SimulationConfig(out["model"], out["n_events"], out["seed"],
                                       observables=tuple(out["observables"])), path)
    return out


def _measurements(r: _Reader, items: Any) -> list[MeasurementSpec]:
    path = "measurements"
    if not isinstance(items, list):
        r.fail("measurements must be a list", path)
    out = []
    for i, m in enumerate(items):
        p = f"measurements[{i}]"
        r.obj(m, p, path)
        r.keys(m, p, {"detector_id", "ct_m", "t_s", "x_m", "beta", "observable"},
               {"detector_id", "x_m"}, path)
        ev = _event(r, {k: m[k] for k in ("ct_m", "t_s", "x_m") if k in m}, p, path)
        if not isinstance(m["detector_id"], str):
            r.fail(f"{p}.detector_id must be a string", "detector_id")
        out.append(r.guarded(lambda: MeasurementSpec(
            ev, r.number(m, "beta", p, 0.0), m["detector_id"],
            r.choice(m, "observable", p, OBSERVABLES, "polarization")), path))
    return out


def _diagram(r: _Reader, obj: dict) -> dict:
    path = "diagram"
    r.obj(obj, path, path)
    r.keys(obj, path, {"frame", "bounds", "resolution", "layers", "detectors", "model",
                       "observer_beta", "width_px", "height_px"}, {"bounds"}, path)
    b = r.obj(obj["bounds"], "diagram.bounds", "bounds")
    r.keys(b, "diagram.bounds", {"ct_min_m", "ct_max_m", "x_min_m", "x_max_m"},
           {"ct_min_m", "ct_max_m", "x_min_m", "x_max_m"}, "bounds")
    bounds = r.guarded(lambda: Bounds(*(r.number(b, k, "diagram.bounds")
                                        for k in ("ct_min_m", "ct_max_m", "x_min_m", "x_max_m"))),
                       "bounds")
    res = r.obj(obj.get("resolution", {}), "diagram.resolution", "resolution")
    r.keys(res, "diagram.resolution", {"n_ct", "n_x"}, parent_key="resolution")
    n_ct = r.integer(res, "n_ct", "diagram.resolution", 120)
    n_x = r.integer(res, "n_x", "diagram.resolution", 120)
    if n_ct < 1 or n_x < 1:
        r.fail("diagram.resolution must be positive", "resolution")
    model = r.choice(obj, "model", path,
                     ("preferred_frame", "backward_light_cone", "observer_frame"),
                     "preferred_frame")
    observer_beta = r.number(obj, "observer_beta", path, 0.0)
    r.guarded(lambda: model_from_name(model, observer_beta), "observer_beta")
    return {
        "frame": r.choice(obj, "frame", path, ("S", "S_prime"), "S"),
        "bounds": bounds,
        "resolution": (n_ct, n_x),
        "layers": r.str_list(obj, "layers", path, LAYERS, LAYERS),
        "detectors": r.str_list(obj, "detectors", path, ("D1", "D2"), ("D1", "D2")),
        "model": model,
        "observer_beta": observer_beta,
        "width_px": r.integer(obj, "width_px", path, 600),
        "height_px": r.integer(obj, "height_px", path, 600),
    }


def parse_config(text: str, source: str = "<config>") -> RunConfig:
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON: {exc.msg}", exc.lineno, source) from None
    r = _Reader(text, source)
    r.obj(raw, "config", None)
    r.keys(raw, "config", {"schema_version", "boost", "direction", "events", "experiment",
                           "sweep", "amplitude", "simulation", "diagram", "measurements"},
           {"schema_version"})
    version = r.integer(raw, "schema_version", "config")
    if version != SCHEMA_VERSION:
        r.fail(f"unsupported schema_version {version} (expected {SCHEMA_VERSION})",
               "schema_version")
    cfg = RunConfig(version)
    if "boost" in raw:
        cfg.boost = _boost(r, raw["boost"])
    if "direction" in raw:
        cfg.direction = r.choice(raw, "direction", "config", ("forward", "inverse"))
    if "events" in raw:
        if not isinstance(raw["events"], list):
            r.fail("events must be a list", "events")
        cfg.events = [_event(r, e, f"events[{i}]", "events") for i, e in enumerate(raw["events"])]
    if "experiment" in raw:
        cfg.experiment = _experiment(r, raw["experiment"])
    if "sweep" in raw:
        cfg.sweep = _sweep(r, raw["sweep"])
    if "amplitude" in raw:
        cfg.amplitude = _amplitude(r, raw["amplitude"])
    if "simulation" in raw:
        cfg.simulation = _simulation(r, raw["simulation"])
    if "diagram" in raw:
        cfg.diagram = _diagram(r, raw["diagram"])
    if "measurements" in raw:
        cfg.measurements = _measurements(r, raw["measurements"])
    return cfg


def load_config(path: str | Path) -> RunConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc.strerror}", None, str(path)) from None
    return parse_config(text, str(path))
