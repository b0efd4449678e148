"""``collapse-sim`` command line.

Exit status 0 covers every physics verdict, including infeasible plans;
2 means the configuration (or the command line) was rejected.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path

from .config import ConfigError, RunConfig, load_config
from .diagram import build_scene, csv_layers, regions_csv, render_svg
from .planner import ExperimentPlan, plan, sweep
from .simulation import SimulationConfig, SimulationReport, compare, generate_events, summarize
from .spacetime import boost_event, inverse_boost
from .two_photon import TwoPhotonAmplitude, density_grid

EXIT_CONFIG = 2


def _require(cfg: RunConfig, *blocks: str) -> None:
    for b in blocks:
        if getattr(cfg, b) is None:
            raise ConfigError(f"command needs a '{b}' block", None, "<config>")


def _emit(files: dict[str, str], out: Path | None, stdout_key: str | None) -> None:
    if out is None:
        if stdout_key is not None:
            sys.stdout.write(files[stdout_key])
        return
    out.mkdir(parents=True, exist_ok=True)
    for name, text in files.items():
        (out / name).write_text(text, encoding="utf-8", newline="\n")


def _g(v: float) -> str:
    return f"{v:.10g}"


# -- transform -------------------------------------------------------------

def transform_csv(cfg: RunConfig) -> str:
    fn = boost_event if cfg.direction == "forward" else inverse_boost
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(("index", "ct_m", "x_m", "ct_out_m", "x_out_m"))
    for k, e in enumerate(cfg.events):
        o = fn(e, cfg.boost)
        w.writerow((k, repr(e.ct), repr(e.x), repr(o.ct), repr(o.x)))
    return buf.getvalue()


def cmd_transform(cfg: RunConfig, args) -> None:
    _require(cfg, "boost", "events")
    _emit({"transform.csv": transform_csv(cfg)}, args.out, "transform.csv")


# -- plan ------------------------------------------------------------------

def plan_text(p: ExperimentPlan) -> str:
    q = p.params
    ev = lambda e: f"(t = {_g(e.t)} s, ct = {_g(e.ct)} m, x = {_g(e.x)} m)"  # noqa: E731
    lines = [
        "Experiment plan",
        f"  v = {_g(q.v)} m/s (beta = {_g(q.beta)}), x0 = {_g(q.x0)} m, T1 = {_g(q.T1)} s, "
        f"epsilon = {_g(q.epsilon)} s, storage latency = {_g(q.storage_latency)} s",
        f"  detector separation dX12      {_g(p.dX12)} m",
        f"  window in S  (exact)          {_g(p.window_rest)} s",
        f"  window in S  (first order)    {_g(p.window_rest_first_order)} s "
        f"(relative discrepancy {_g(p.first_order_discrepancy)})",
        f"  window in S' (moving D2)      {_g(p.window_moving)} s",
        f"  D1 detection in S'            T1' = {_g(p.T1_prime)} s, X1' = {_g(p.X1_prime)} m",
        f"  point A                       {ev(p.A)}",
        f"  D2 detection                  {ev(p.detection2)}",
        f"  source emission               {ev(p.source)}",
        f"  epsilon budget                {_g(p.epsilon_budget)} s",
        f"  required v*dX12 = c^2*dt_s    {_g(p.required_product)} m^2/s",
        f"  required dX12 at this v       {_g(p.required_separation)} m",
        "  verdict                       " + ("FEASIBLE" if p.feasible else
                                              "INFEASIBLE: " + ", ".join(p.infeasibility_reasons)),
    ]
    return "\n".join(lines) + "\n"


def _json(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


SWEEP_COLUMNS = ("v_m_per_s", "x0_m", "T1_s", "epsilon_s", "storage_latency_s", "dX12_m",
                 "window_rest_s", "window_moving_s", "X1_prime_m", "cT2_m", "X2_m", "cTP_m",
                 "XP_m", "required_separation_m", "feasible", "reasons")


def sweep_csv(plans: list[ExperimentPlan]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(SWEEP_COLUMNS)
    for p in plans:
        q = p.params
        w.writerow(tuple(repr(v) for v in (
            q.v, q.x0, q.T1, q.epsilon, q.storage_latency, p.dX12, p.window_rest,
            p.window_moving, p.X1_prime, p.detection2.ct, p.detection2.x, p.source.ct,
            p.source.x, p.required_separation)) + (str(p.feasible).lower(),
                                                   ";".join(p.infeasibility_reasons)))
    return buf.getvalue()


def cmd_plan(cfg: RunConfig, args) -> None:
    _require(cfg, "experiment")
    if args.sweep:
        _require(cfg, "sweep")
        _emit({"sweep.csv": sweep_csv(sweep(cfg.experiment, cfg.sweep))}, args.out, "sweep.csv")
        return
    p = plan(cfg.experiment)
    text = plan_text(p)
    js = _json(p.to_dict())
    _emit({"plan.txt": text, "plan.json": js}, args.out, None)
    if args.out is None:
        sys.stdout.write(text + "--- json ---\n" + js)


# -- simulate --------------------------------------------------------------

def _est(e) -> str:
    if e is None:
        return "-"
    if e.se is None:
        return _g(e.value) if e.value is not None else "-"
    return f"{_g(e.value)} +/- {_g(e.se)}"


def report_text(r: SimulationReport) -> str:
    lines = [f"Simulation: {r.model.value}, n = {r.n_events}, seed = {r.seed}",
             f"  rng                    {r.rng_algorithm}",
             f"  final-state rule       {r.final_state_rule.value}"]
    if r.outcome_counts is not None:
        lines.append("  outcome counts         " +
                     ", ".join(f"{k} {v}" for k, v in r.outcome_counts.items()))
        lines.append(f"  P(same polarization)   {_est(r.p_same_polarization)}")
    if r.mean_sum is not None:
        lines += [f"  mean ws (rad/s)        {_est(r.mean_omega_s)}",
                  f"  mean wi (rad/s)        {_est(r.mean_omega_i)}",
                  f"  mean ws+wi (rad/s)     {_est(r.mean_sum)}",
                  f"  sd ws+wi (rad/s)       {_est(r.sd_sum)}",
                  f"  P(|resid| > 3 s_sum)   {_est(r.fraction_beyond_3_sigma_sum)}"]
    return "\n".join(lines) + "\n"


def events_csv(batch, omega_p: float) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(("pol1", "pol2", "omega_s_rad_per_s", "omega_i_rad_per_s", "residual_rad_per_s"))
    n = len(batch.pol1_v) if batch.pol1_v is not None else len(batch.omega_s)
    for k in range(n):
        row = ["", ""]
        if batch.pol1_v is not None:
            row = ["V" if batch.pol1_v[k] else "H", "V" if batch.pol2_v[k] else "H"]
        if batch.omega_s is not None:
            ws, wi = float(batch.omega_s[k]), float(batch.omega_i[k])
            row += [repr(ws), repr(wi), repr(ws + wi - omega_p)]
        else:
            row += ["", "", ""]
        w.writerow(row)
    return buf.getvalue()


def density_csv(a: TwoPhotonAmplitude) -> str:
    ws, wi, p, pn = density_grid(a)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(("omega_s_rad_per_s", "omega_i_rad_per_s", "p_correlated", "p_factorized"))
    for i, s in enumerate(ws):
        for j, t in enumerate(wi):
            w.writerow((repr(float(s)), repr(float(t)), repr(float(p[i, j])), repr(float(pn[i, j]))))
    return buf.getvalue()


def _sim_config(cfg: RunConfig, args, model=None) -> SimulationConfig:
    s = cfg.simulation
    seed = s["seed"] if args.seed is None else args.seed
    return SimulationConfig(model or s["model"], s["n_events"], seed,
                            cfg.amplitude or TwoPhotonAmplitude(), tuple(s["observables"]),
                            s["final_state_rule"])


def cmd_simulate(cfg: RunConfig, args) -> None:
    _require(cfg, "simulation")
    try:
        sc = _sim_config(cfg, args)
    except ValueError as exc:
        raise ConfigError(str(exc), None, args.config) from None
    if args.compare:
        comp = compare(sc)
        text = (report_text(comp.collapsed) + report_text(comp.uncollapsed)
                + f"variance ratio (uncollapsed/collapsed) {_g(comp.variance_ratio) if comp.variance_ratio else '-'}"
                f", expected {_g(comp.variance_ratio_expected)}\n")
        js = comp.to_json() + "\n"
        files = {"report.txt": text, "report.json": js}
        _emit(files, args.out, None)
        if args.out is None:
            sys.stdout.write(text + "--- json ---\n" + js)
        return
    batch = generate_events(sc)
    rep = summarize(sc, batch)
    text = report_text(rep)
    js = rep.to_json() + "\n"
    files = {"report.txt": text, "report.json": js}
    if cfg.simulation["export_events"] and args.out is not None:
        files["events.csv"] = events_csv(batch, sc.amplitude.omega_p)
    if cfg.simulation["export_density"] and args.out is not None:
        files["density.csv"] = density_csv(sc.amplitude)
    _emit(files, args.out, None)
    if args.out is None:
        sys.stdout.write(text + "--- json ---\n" + js)


# -- diagram / regions -----------------------------------------------------

def cmd_diagram(cfg: RunConfig, args) -> None:
    _require(cfg, "diagram")
    try:
        scene = build_scene(cfg)
    except ValueError as exc:
        raise ConfigError(str(exc), None, args.config) from None
    d = cfg.diagram
    files = {"diagram.svg": render_svg(scene, d["width_px"], d["height_px"])}
    files.update(csv_layers(scene))
    _emit(files, args.out, "diagram.svg")


def cmd_regions(cfg: RunConfig, args) -> None:
    _require(cfg, "diagram")
    if "regions" not in cfg.diagram["layers"]:
        cfg.diagram["layers"] = list(cfg.diagram["layers"]) + ["regions"]
    try:
        scene = build_scene(cfg)
    except ValueError as exc:
        raise ConfigError(str(exc), None, args.config) from None
    _emit({"regions.csv": regions_csv(scene.regions)}, args.out, "regions.csv")


COMMANDS = {"transform": cmd_transform, "plan": cmd_plan, "simulate": cmd_simulate,
            "diagram": cmd_diagram, "regions": cmd_regions}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="collapse-sim", description=__doc__.splitlines()[0])
    ap.add_argument("command", choices=sorted(COMMANDS))
    ap.add_argument("--config", required=True, help="JSON run configuration")
    ap.add_argument("--out", type=Path, default=None, help="output directory (default: stdout)")
    ap.add_argument("--seed", type=int, default=None, help="override simulation.seed")
    ap.add_argument("--compare", action="store_true", help="simulate both measurement models")
    ap.add_argument("--sweep", action="store_true", help="plan over the sweep ranges")
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        COMMANDS[args.command](cfg, args)
    except ConfigError as exc:
        if exc.source == "<config>":
            exc = ConfigError(exc.message, exc.line, args.config)
        print(f"collapse-sim: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return 0


if __name__ == "__main__":
    sys.exit(main())
