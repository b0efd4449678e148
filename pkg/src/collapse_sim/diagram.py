"""Spacetime diagrams: a scene in one frame, dumped as CSV layers and SVG 1.1.

``ct`` runs up the page, ``x`` to the right. CSV values use ``repr`` so a
re-import is value-identical; SVG coordinates use a fixed three decimals so
the files are byte-stable.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from xml.sax.saxutils import escape

from .collapse_geometry import (BackwardLightCone, Bounds, MeasurementSpec, RegionMap,
                                boost_measurement, collapse_line, model_from_name, region_map)
from .planner import ExperimentParams, frame_boost, plan
from .spacetime import Event, boost_event

REGION_COLORS = {0: "#fff176", 1: "#e040fb", 2: "#42a5f5", 3: "#66bb6a"}
SINGLE_COLLAPSED_COLOR = "#66bb6a"
MARGIN = 20


@dataclass(frozen=True)
class Segment:
    layer: str
    id: str
    start: Event
    end: Event


@dataclass
class Scene:
    bounds: Bounds
    frame: str
    measurements: list[MeasurementSpec]
    model: object
    resolution: tuple[int, int] = (120, 120)
    layers: tuple[str, ...] = ()
    segments: list[Segment] = field(default_factory=list)
    events: list[tuple[str, Event]] = field(default_factory=list)
    window: list[Event] = field(default_factory=list)
    regions: RegionMap | None = None


def clip_line(point: Event, direction: tuple[float, float], bounds: Bounds,
              s_min: float = -math.inf, s_max: float = math.inf):
    """Clip ``point + s * direction`` (``s_min <= s <= s_max``) to the rectangle.

    Returns ``(start, end)`` or ``None``.
    """
    lo, hi = s_min, s_max
    for p, d, a, b in ((point.ct, direction[0], bounds.ct_min, bounds.ct_max),
                       (point.x, direction[1], bounds.x_min, bounds.x_max)):
        if d == 0.0:
            if p < a or p > b:
                return None
            continue
        s1, s2 = (a - p) / d, (b - p) / d
        lo, hi = max(lo, min(s1, s2)), min(hi, max(s1, s2))
    if not lo <= hi or math.isinf(lo) or math.isinf(hi):
        return None
    return (Event(point.ct + lo * direction[0], point.x + lo * direction[1]),
            Event(point.ct + hi * direction[0], point.x + hi * direction[1]))


def _clip_halfplane(poly, f):
    """Keep the part of a convex polygon where ``f(ct, x) >= 0``."""
    out = []
    n = len(poly)
    for k in range(n):
        a, b = poly[k], poly[(k + 1) % n]
        fa, fb = f(*a), f(*b)
        if fa >= 0:
            out.append(a)
        if (fa >= 0) != (fb >= 0):
            t = fa / (fa - fb)
            out.append((a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])))
    return out


def window_polygon(first: MeasurementSpec, window_beta: float, bounds: Bounds) -> list[Event]:
    """The uncollapsed-measurement window of ``first`` clipped to ``bounds``.

    Points are after ``first`` in the frame given by ``window_beta`` and
    before its collapse line.
    """
    e = first.event
    poly = [(bounds.ct_min, bounds.x_min), (bounds.ct_min, bounds.x_max),
            (bounds.ct_max, bounds.x_max), (bounds.ct_max, bounds.x_min)]
    poly = _clip_halfplane(poly, lambda ct, x: (ct - e.ct) + window_beta * (x - e.x))
    poly = _clip_halfplane(poly, lambda ct, x: -((ct - e.ct) + first.beta * (x - e.x)))
    pts = []
    for ct, x in poly:
        ev = Event(ct, x)
        if not pts or pts[-1] != ev:
            pts.append(ev)
    if len(pts) > 1 and pts[0] == pts[-1]:
        pts.pop()
    return pts if len(pts) >= 3 else []


def _inside(e: Event, b: Bounds) -> bool:
    return b.ct_min <= e.ct <= b.ct_max and b.x_min <= e.x <= b.x_max


def _infinite(layer, ident, point, direction, bounds, out):
    seg = clip_line(point, direction, bounds)
    if seg is not None:
        out.append(Segment(layer, ident, *seg))


def build_scene(cfg) -> Scene:
    """Assemble a scene from a parsed :class:`~collapse_sim.config.RunConfig`."""
    d = cfg.diagram
    if d is None:
        raise ValueError("diagram block missing")
    bounds = d["bounds"]
    model = model_from_name(d["model"], d["observer_beta"])
    to_frame = None
    segments: list[Segment] = []
    events: list[tuple[str, Event]] = []
    if cfg.experiment is not None:
        p: ExperimentParams = cfg.experiment
        pl = plan(p)
        if d["frame"] == "S_prime":
            to_frame = frame_boost(p)
        ms = []
        if "D1" in d["detectors"]:
            ms.append(MeasurementSpec(pl.detection1, 0.0, "D1"))
        if "D2" in d["detectors"]:
            ms.append(MeasurementSpec(pl.detection2, -p.beta, "D2"))
        lab_events = [("(T1,0)", pl.detection1, "D1"), ("A", pl.A, "D2"),
                      ("(T2,X2)", pl.detection2, "D2"), ("(TP,XP)", pl.source, None)]
        world = []
        if "D1" in d["detectors"]:
            world.append(("detector", "D1", Event(0.0, 0.0), Event(1.0, 0.0)))
        if "D2" in d["detectors"]:
            world.append(("detector", "D2", Event(0.0, p.x0), Event(1.0, p.x0 + p.beta)))
        photons = []
        if "D1" in d["detectors"]:
            photons.append(("photon", "photon1", pl.source, pl.detection1))
        if "D2" in d["detectors"]:
            photons.append(("photon", "photon2", pl.source, pl.detection2))
    else:
        ms = list(cfg.measurements or [])
        if d["frame"] == "S_prime":
            if cfg.boost is None:
                raise ValueError("frame S_prime needs a boost block")
            to_frame = cfg.boost
        ms = [m for m in ms if m.detector_id in d["detectors"]] if cfg.measurements else ms
        lab_events = [(f"M{m.detector_id}", m.event, m.detector_id) for m in ms]
        world = [("detector", m.detector_id, m.event,
                  Event(m.event.ct + 1.0, m.event.x + m.detector_velocity)) for m in ms]
        photons = []

    def tr(e: Event) -> Event:
        return e if to_frame is None else boost_event(e, to_frame)

    if to_frame is not None:
        ms = [boost_measurement(m, to_frame) for m in ms]

    if "worldlines" in d["layers"]:
        for layer, ident, a, b in world:
            a2, b2 = tr(a), tr(b)
            _infinite("worldline", ident, a2, (b2.ct - a2.ct, b2.x - a2.x), bounds, segments)
        for layer, ident, a, b in photons:
            a2, b2 = tr(a), tr(b)
            if _inside(a2, bounds) and _inside(b2, bounds):
                segments.append(Segment("photon", ident, a2, b2))
                continue
            seg = clip_line(a2, (b2.ct - a2.ct, b2.x - a2.x), bounds, 0.0, 1.0)
            if seg is not None:
                segments.append(Segment("photon", ident, *seg))
    if "collapse_lines" in d["layers"]:
        for m in ms:
            if isinstance(model, BackwardLightCone):
                for sgn in (-1.0, 1.0):
                    seg = clip_line(m.event, (-1.0, sgn), bounds, 0.0, math.inf)
                    if seg is not None:
                        segments.append(Segment("collapse_line", m.detector_id, *seg))
            else:
                line = collapse_line(m, model)
                _infinite("collapse_line", m.detector_id, m.event, (line.slope, 1.0),
                          bounds, segments)
    if "light_cones" in d["layers"]:
        for m in ms:
            for sgn in (-1.0, 1.0):
                _infinite("light_cone", m.detector_id, m.event, (1.0, sgn), bounds, segments)
    if "events" in d["layers"]:
        for label, e, det in lab_events:
            if det is None or det in d["detectors"]:
                events.append((label, tr(e)))

    window = []
    if "window" in d["layers"] and ms:
        window_beta = ms[1].beta if len(ms) > 1 else 0.0
        window = window_polygon(ms[0], window_beta, bounds)

    regions = None
    if "regions" in d["layers"]:
        regions = region_map(bounds, d["resolution"], ms, model)
    return Scene(bounds, d["frame"], ms, model, d["resolution"], tuple(d["layers"]),
                 segments, events, window, regions)


# -- CSV -------------------------------------------------------------------

def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def regions_csv(rm: RegionMap | None) -> str:
    rows = []
    if rm is not None:
        labels = rm.labels()
        for i, ct in enumerate(rm.ct):
            for j, x in enumerate(rm.x):
                rows.append((i, j, repr(float(ct)), repr(float(x)), labels[i, j]))
    return _csv(("i", "j", "ct_m", "x_m", "region"), rows)


def lines_csv(scene: Scene) -> str:
    rows = [(s.layer, s.id, repr(s.start.ct), repr(s.start.x), repr(s.end.ct), repr(s.end.x))
            for s in scene.segments]
    return _csv(("layer", "id", "ct_start_m", "x_start_m", "ct_end_m", "x_end_m"), rows)


def events_csv(scene: Scene) -> str:
    return _csv(("label", "ct_m", "x_m"),
                [(label, repr(e.ct), repr(e.x)) for label, e in scene.events])


def window_csv(scene: Scene) -> str:
    return _csv(("vertex", "ct_m", "x_m"),
                [(k, repr(e.ct), repr(e.x)) for k, e in enumerate(scene.window)])


def csv_layers(scene: Scene) -> dict[str, str]:
    return {"regions.csv": regions_csv(scene.regions), "lines.csv": lines_csv(scene),
            "events.csv": events_csv(scene), "window.csv": window_csv(scene)}


# -- SVG -------------------------------------------------------------------

LINE_STYLES = {
    "worldline": 'stroke="#c62828" stroke-width="2"',
    "photon": 'stroke="#1565c0" stroke-width="2"',
    "collapse_line": 'stroke="#000000" stroke-width="1.5"',
    "light_cone": 'stroke="#757575" stroke-width="1" stroke-dasharray="4,3"',
}


def render_svg(scene: Scene, width: int = 600, height: int = 600) -> str:
    b = scene.bounds
    sx = width / (b.x_max - b.x_min)
    sy = height / (b.ct_max - b.ct_min)

    def px(x):
        return MARGIN + (x - b.x_min) * sx

    def py(ct):
        return MARGIN + (b.ct_max - ct) * sy

    def f(v):
        return f"{v:.3f}"

    W, H = width + 2 * MARGIN, height + 2 * MARGIN
    out = ['<?xml version="1.0" encoding="UTF-8" standalone="no"?>',
           f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{W}" height="{H}" '
           f'viewBox="0 0 {W} {H}">']
    if scene.regions is not None:
        rm = scene.regions
        single = len(rm.measurements) == 1
        dct = (b.ct_max - b.ct_min) / rm.ct.size
        dx = (b.x_max - b.x_min) / rm.x.size
        out.append('<g id="regions" stroke="none" shape-rendering="crispEdges">')
        for i in range(rm.ct.size):
            row = rm.codes[i]
            j = 0
            while j < row.size:
                k = j
                while k + 1 < row.size and row[k + 1] == row[j]:
                    k += 1
                code = int(row[j])
                color = SINGLE_COLLAPSED_COLOR if single and code == 1 else REGION_COLORS[code]
                top = b.ct_min + (i + 1) * dct
                left = b.x_min + j * dx
                out.append(f'<rect x="{f(px(left))}" y="{f(py(top))}" '
                           f'width="{f((k - j + 1) * dx * sx)}" height="{f(dct * sy)}" '
                           f'fill="{color}"/>')
                j = k + 1
        out.append("</g>")
    if scene.window:
        pts = " ".join(f"{f(px(e.x))},{f(py(e.ct))}" for e in scene.window)
        out.append(f'<polygon id="window" points="{pts}" fill="#ff9800" fill-opacity="0.8" '
                   'stroke="#d50000" stroke-width="1.5" stroke-dasharray="6,3"/>')
    if scene.segments:
        out.append('<g id="lines" fill="none">')
        for s in scene.segments:
            out.append(f'<line class="{s.layer}" data-id="{escape(s.id)}" '
                       f'x1="{f(px(s.start.x))}" y1="{f(py(s.start.ct))}" '
                       f'x2="{f(px(s.end.x))}" y2="{f(py(s.end.ct))}" {LINE_STYLES[s.layer]}/>')
        out.append("</g>")
    if scene.events:
        out.append('<g id="events" font-family="sans-serif" font-size="11">')
        placed: list[tuple[float, float]] = []
        for label, e in scene.events:
            cx, cy = px(e.x), py(e.ct)
            out.append(f'<circle cx="{f(cx)}" cy="{f(cy)}" r="3" fill="#000000"/>')
            # a label next to an earlier event goes on the other side of the dot
            crowded = any(math.hypot(cx - a, cy - b) < 12.0 for a, b in placed)
            placed.append((cx, cy))
            if crowded:
                out.append(f'<text x="{f(cx - 5)}" y="{f(cy + 14)}" text-anchor="end">'
                           f'{escape(label)}</text>')
            else:
                out.append(f'<text x="{f(cx + 5)}" y="{f(cy - 5)}">{escape(label)}</text>')
        out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"


def read_events_csv(text: str) -> list[tuple[str, Event]]:
    """Inverse of :func:`events_csv`."""
    rows = list(csv.DictReader(io.StringIO(text)))
    return [(r["label"], Event(float(r["ct_m"]), float(r["x_m"]))) for r in rows]
