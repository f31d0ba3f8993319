"""Command line entry point: ``roguewave <subcommand> [options]``.

Subcommands
-----------
generate   analytic field CSVs (+ line plots), one per --t
analyze    scaleogram CSV + SVG heat map of |psi| - 1 for a field CSV
sample     sensing plan + measurement CSVs for each --t
recover    compressive reconstruction, from measurement files or end to end
detect     append a V-shape detection row for a field CSV
reproduce  the four-cell compressive sampling table; exit 1 if any cell fails

Settings come from ``--config FILE`` (flat ``key=value`` lines), overridden by
flags. ``$ROGUEWAVE_SEED`` is used when no seed is given anywhere.
"""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import io
from .cs_recovery import BpConfig, coherence, make_plan, resolve_seed, sample
from .detection import DEFAULT_THRESHOLD, detect, envelope_scaleogram, normalized_rms
from .errors import RogueWaveError
from .experiments import (
    ExperimentConfig,
    format_table,
    recover_measurements,
    reproduce,
    run_cell,
)
from .signal_model import Grid1D, SolitonKind, evaluate_field

logger = logging.getLogger("roguewave")

_CONFIG_KEYS = {
    "soliton": ("soliton", SolitonKind.parse),
    "n": ("n", int),
    "xmin": ("x_min", float),
    "x_min": ("x_min", float),
    "xmax": ("x_max", float),
    "x_max": ("x_max", float),
    "t": ("times", lambda v: tuple(float(s) for s in v.split(",") if s.strip())),
    "times": ("times", lambda v: tuple(float(s) for s in v.split(",") if s.strip())),
    "m": ("m", int),
    "seed": ("seed", int),
    "tol": ("tol", float),
    "max_iters": ("max_iters", int),
    "max-iters": ("max_iters", int),
    "threshold": ("threshold", float),
    "resample_per_step": ("resample_per_step", lambda v: v.strip().lower() in ("1", "true", "yes", "on")),
    "resample-per-step": ("resample_per_step", lambda v: v.strip().lower() in ("1", "true", "yes", "on")),
    "out": ("out", str),
}


def load_config_file(path) -> dict:
    values = {}
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key = key.strip()
        if not sep or key not in _CONFIG_KEYS:
            raise io.ParseError(path, lineno, f"expected known key=value, got {raw!r}")
        name, conv = _CONFIG_KEYS[key]
        try:
            values[name] = conv(value.strip())
        except ValueError as exc:
            raise io.ParseError(path, lineno, str(exc)) from None
    return values


def build_config(args) -> ExperimentConfig:
    values = load_config_file(args.config) if getattr(args, "config", None) else {}
    flags = {
        "soliton": SolitonKind.parse(args.soliton) if getattr(args, "soliton", None) else None,
        "n": getattr(args, "n", None),
        "x_min": getattr(args, "xmin", None),
        "x_max": getattr(args, "xmax", None),
        "times": tuple(args.t) if getattr(args, "t", None) else None,
        "m": getattr(args, "m", None),
        "seed": getattr(args, "seed", None),
        "tol": getattr(args, "tol", None),
        "max_iters": getattr(args, "max_iters", None),
        "threshold": getattr(args, "threshold", None),
        "resample_per_step": True if getattr(args, "resample_per_step", False) else None,
        "out": getattr(args, "out", None),
    }
    values.update({k: v for k, v in flags.items() if v is not None})
    values["seed"] = resolve_seed(values.get("seed"))
    return ExperimentConfig(**values)


def _tag(t: float) -> str:
    return f"t{t:+g}"


def _field_plot(path, x, curves):
    io.write_text(path, io.field_svg(x, curves))


# --- subcommands --------------------------------------------------------

def cmd_generate(args) -> int:
    cfg = build_config(args)
    out = Path(cfg.out)
    for t in cfg.times:
        f = evaluate_field(cfg.soliton, cfg.grid, t)
        stem = f"field_{cfg.soliton.value}_{_tag(t)}"
        io.write_field(out / f"{stem}.csv", f, soliton=cfg.soliton.value)
        _field_plot(out / f"{stem}.svg", cfg.grid.x, {f"|psi| {cfg.soliton.value} t={t:g}": f.modulus})
        print(out / f"{stem}.csv")
    return 0


def cmd_analyze(args) -> int:
    field, _ = io.read_field(args.field)
    sg = envelope_scaleogram(field)
    out = Path(args.out) if args.out else Path(args.field).parent
    stem = Path(args.field).stem
    io.write_scaleogram(out / f"{stem}_scaleogram.csv", sg)
    io.write_text(
        out / f"{stem}_scaleogram.svg",
        io.scaleogram_svg(sg, title=f"Haar scaleogram of |psi|-1, t={field.time:g}"),
    )
    print(out / f"{stem}_scaleogram.csv")
    return 0


def cmd_sample(args) -> int:
    cfg = build_config(args)
    out = Path(cfg.out)
    for step, t in enumerate(cfg.times):
        plan = cfg.plan_for_step(step)
        f = evaluate_field(cfg.soliton, cfg.grid, t)
        suffix = f"_{_tag(t)}" if cfg.resample_per_step else ""
        io.write_plan(out / f"plan{suffix}.csv", plan)
        path = io.write_measurements(out / f"meas_{cfg.soliton.value}_{_tag(t)}.csv", sample(f, plan))
        print(path)
    return 0


def cmd_recover(args) -> int:
    cfg = build_config(args)
    out = Path(cfg.out)
    summary = out / "summary.jsonl"
    if args.measurements:
        grid = cfg.grid
        meas = io.read_measurements(args.measurements)
        if meas.plan.n != grid.n_points:
            grid = Grid1D(meas.plan.n, cfg.x_min, cfg.x_max)
        result = recover_measurements(meas, grid, cfg.bp)
        record = {
            "source": str(args.measurements),
            "t": meas.time,
            "n": meas.plan.n,
            "m": meas.plan.m,
            "seed": meas.plan.seed,
            "iterations": result.iterations,
            "residual": result.residual,
            "coherence": coherence(meas.plan),
            "converged": result.converged,
            "rms": None,
        }
        if args.reference:
            ref, _ = io.read_field(args.reference)
            record["rms"] = normalized_rms(result.field, ref)
        stem = Path(args.measurements).stem.replace("meas_", "recovered_")
        io.write_field(out / f"{stem}.csv", result.field, converged=result.converged)
        io.append_jsonl(summary, record)
        print(_summary_line(record))
        return 0

    for step, t in enumerate(cfg.times):
        plan = cfg.plan_for_step(step)
        rec, ref, meas, result = run_cell(cfg.soliton, t, plan, cfg.grid, cfg.bp)
        stem = f"{cfg.soliton.value}_{_tag(t)}"
        io.write_plan(out / f"plan_{stem}.csv", plan)
        io.write_measurements(out / f"meas_{stem}.csv", meas)
        io.write_field(out / f"recovered_{stem}.csv", result.field, converged=result.converged)
        _field_plot(
            out / f"recovered_{stem}.svg",
            cfg.grid.x,
            {"|psi| reference": ref.modulus, f"|psi| recovered (M={plan.m})": result.field.modulus},
        )
        record = rec.as_dict()
        record.pop("seconds")
        io.append_jsonl(summary, record)
        print(_summary_line(record))
    return 0


def _summary_line(r: dict) -> str:
    rms = "n/a" if r.get("rms") is None else f"{r['rms']:.3e}"
    return (
        f"t={r['t']:g} m={r['m']} seed={r['seed']} rms={rms} iterations={r['iterations']} "
        f"residual={r['residual']:.2e} converged={str(r['converged']).lower()}"
    )


def cmd_detect(args) -> int:
    field, meta = io.read_field(args.field)
    threshold = args.threshold if args.threshold is not None else DEFAULT_THRESHOLD
    report = detect(field, threshold)
    note = None
    if meta.get("converged") == "false":
        note = f"t={field.time:g}: source field from a non-converged recovery"
    if report.degenerate:
        note = (note + "; " if note else "") + f"t={field.time:g}: flat background, no V-shape"
    out = Path(args.out) if args.out else Path(args.field).parent
    io.append_detection(out / "detection.csv", report, note)
    print(io.DETECTION_HEADER)
    print(io.detection_row(report))
    return 0


def cmd_reproduce(args) -> int:
    seed = resolve_seed(args.seed)
    grid = Grid1D(args.n, args.xmin, args.xmax)
    cfg = BpConfig(feasibility_tol=args.tol, max_iterations=args.max_iters)
    rows = reproduce(m=args.m, seed=seed, n_seeds=args.seeds, grid=grid, cfg=cfg, jobs=args.jobs)
    csv, text = format_table(rows)
    out = Path(args.out)
    io.write_text(out / "reproduce.csv", csv)
    io.write_text(out / "reproduce.txt", text)
    for row in rows:
        for rec in row.records:
            d = rec.as_dict()
            d.pop("seconds")
            io.append_jsonl(out / "summary.jsonl", d)
    for kind in SolitonKind:
        for t in (0.0, 3.0):
            ref = evaluate_field(kind, grid, t)
            result = recover_measurements(sample(ref, make_plan(grid.n_points, args.m, seed)), grid, cfg)
            for label, f in (("analytic", ref), ("recovered", result.field)):
                sg = envelope_scaleogram(f)
                io.write_text(
                    out / f"scaleogram_{kind.value}_{_tag(t)}_{label}.svg",
                    io.scaleogram_svg(sg, title=f"{kind.value} t={t:g} {label}"),
                )
    sys.stdout.write(text)
    failed = [r for r in rows if not r.passed]
    if failed:
        print(f"{len(failed)} of {len(rows)} cells FAILED")
        return 1
    return 0


# --- parser -------------------------------------------------------------

def _experiment_flags(p: argparse.ArgumentParser, recovery: bool = False) -> None:
    p.add_argument("--config", help="flat key=value settings file")
    p.add_argument("--soliton", choices=["peregrine", "ap"])
    p.add_argument("--n", type=int)
    p.add_argument("--xmin", type=float)
    p.add_argument("--xmax", type=float)
    p.add_argument("--t", type=float, action="append", help="time value (repeatable)")
    p.add_argument("--m", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--tol", type=float)
    p.add_argument("--max-iters", dest="max_iters", type=int)
    p.add_argument("--threshold", type=float)
    p.add_argument("--resample-per-step", action="store_true")
    p.add_argument("--out", help="output directory")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="roguewave", description=__doc__.split("\n\n")[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="write analytic field CSVs")
    _experiment_flags(p)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("analyze", help="scaleogram of a field CSV")
    p.add_argument("field")
    p.add_argument("--out")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("sample", help="write sensing plan and measurements")
    _experiment_flags(p)
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("recover", help="compressive reconstruction")
    _experiment_flags(p)
    p.add_argument("--measurements", help="measurement CSV to reconstruct instead of a generated field")
    p.add_argument("--reference", help="reference field CSV for the rms column")
    p.set_defaults(func=cmd_recover)

    p = sub.add_parser("detect", help="V-shape detection on a field CSV")
    p.add_argument("field")
    p.add_argument("--threshold", type=float)
    p.add_argument("--out")
    p.set_defaults(func=cmd_detect)

    p = sub.add_parser("reproduce", help="four-cell compressive sampling table")
    p.add_argument("--n", type=int, default=1024)
    p.add_argument("--xmin", type=float, default=-20.0)
    p.add_argument("--xmax", type=float, default=20.0)
    p.add_argument("--m", type=int, default=64)
    p.add_argument("--seed", type=int)
    p.add_argument("--seeds", type=int, default=20, help="seeds per cell for the medians")
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--max-iters", dest="max_iters", type=int, default=50_000)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out", default="out/reproduce")
    p.set_defaults(func=cmd_reproduce)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return args.func(args)
    except (RogueWaveError, OSError, ValueError) as exc:
        print(f"roguewave: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
