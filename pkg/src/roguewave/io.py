"""Plain-text artifacts: CSV tables with ``#`` comment headers and SVG plots.

Floats are written with 17 significant digits so every double survives a
write/read cycle bit for bit. Line endings are always LF.
"""
from __future__ import annotations

import json
from pathlib import Path
from typing import Iterable

import numpy as np

from .cs_recovery import Measurements, SensingPlan
from .detection import DetectionReport
from .errors import ParseError
from .signal_model import ComplexField, Grid1D
from .wavelet import Scaleogram

FLOAT_FMT = "%.17g"
DETECTION_HEADER = "t,triangularity,apex_x,apex_confidence,alarm"


def fmt(v: float) -> str:
    return FLOAT_FMT % v


def _meta_line(**items) -> str:
    return "# " + " ".join(f"{k}={_meta_value(v)}" for k, v in items.items())


def _meta_value(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return fmt(v)
    return str(v)


def _write_lines(path, lines: Iterable[str]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for line in lines:
            fh.write(line + "\n")
    return path


def _read_table(path):
    """Return (meta, header, rows-with-line-numbers) for a commented CSV."""
    path = Path(path)
    meta: dict[str, str] = {}
    header = None
    rows = []
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ParseError(path, 0, f"cannot read file: {exc}") from exc
    for lineno, raw in enumerate(text.split("\n"), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            for token in line[1:].split():
                if "=" in token:
                    key, _, value = token.partition("=")
                    meta[key] = value
            continue
        cells = line.split(",")
        if header is None:
            header = cells
        else:
            if len(cells) != len(header):
                raise ParseError(path, lineno, f"expected {len(header)} columns, got {len(cells)}")
            rows.append((lineno, cells))
    if header is None:
        raise ParseError(path, 1, "missing header row")
    return meta, header, rows


def _float(path, lineno, text):
    try:
        return float(text)
    except ValueError:
        raise ParseError(path, lineno, f"not a number: {text!r}") from None


def _int(path, lineno, text):
    try:
        return int(text)
    except ValueError:
        raise ParseError(path, lineno, f"not an integer: {text!r}") from None


def _require(path, meta, *keys):
    missing = [k for k in keys if k not in meta]
    if missing:
        raise ParseError(path, 1, f"missing header field(s): {', '.join(missing)}")


# --- fields -------------------------------------------------------------

def write_field(path, field: ComplexField, **meta) -> Path:
    g = field.grid
    lines = [
        "# roguewave field",
        _meta_line(t=field.time),
        _meta_line(n=g.n_points, x_min=g.x_min, x_max=g.x_max),
    ]
    if meta:
        lines.append(_meta_line(**meta))
    lines.append("x,re,im,abs")
    x = g.x
    for xi, v in zip(x, field.values):
        lines.append(f"{fmt(xi)},{fmt(v.real)},{fmt(v.imag)},{fmt(abs(v))}")
    return _write_lines(path, lines)


def read_field(path) -> tuple[ComplexField, dict[str, str]]:
    meta, header, rows = _read_table(path)
    if header[:3] != ["x", "re", "im"]:
        raise ParseError(path, 1, f"unexpected header {','.join(header)}")
    values = np.empty(len(rows), dtype=complex)
    for k, (lineno, cells) in enumerate(rows):
        values[k] = complex(_float(path, lineno, cells[1]), _float(path, lineno, cells[2]))
    if {"n", "x_min", "x_max"} <= meta.keys():
        grid = Grid1D(int(meta["n"]), float(meta["x_min"]), float(meta["x_max"]))
    else:
        # bare x,re,im file: infer a periodic grid from the x column
        xs = [_float(path, ln, c[0]) for ln, c in rows]
        if len(xs) < 2:
            raise ParseError(path, 1, "need at least two rows to infer the grid")
        dx = xs[1] - xs[0]
        grid = Grid1D(len(xs), xs[0], xs[0] + len(xs) * dx)
    if grid.n_points != len(values):
        raise ParseError(path, 1, f"header says n={grid.n_points}, found {len(values)} rows")
    t = float(meta.get("t", "0"))
    return ComplexField(grid=grid, time=t, values=values), meta


# --- sensing plans and measurements -------------------------------------

def write_plan(path, plan: SensingPlan) -> Path:
    lines = [_meta_line(n=plan.n, m=plan.m, seed=plan.seed), "index"]
    lines += [str(int(i)) for i in plan.indices]
    return _write_lines(path, lines)


def _plan_from(path, meta, indices) -> SensingPlan:
    _require(path, meta, "n", "m", "seed")
    try:
        return SensingPlan(int(meta["n"]), int(meta["m"]), np.array(indices, dtype=np.int64), int(meta["seed"]))
    except ValueError as exc:
        raise ParseError(path, 1, str(exc)) from exc


def read_plan(path) -> SensingPlan:
    meta, header, rows = _read_table(path)
    if header != ["index"]:
        raise ParseError(path, 1, f"unexpected header {','.join(header)}")
    return _plan_from(path, meta, [_int(path, ln, c[0]) for ln, c in rows])


def write_measurements(path, meas: Measurements) -> Path:
    p = meas.plan
    lines = [_meta_line(n=p.n, m=p.m, seed=p.seed), _meta_line(t=meas.time), "index,re,im"]
    for i, v in zip(p.indices, meas.values):
        lines.append(f"{int(i)},{fmt(v.real)},{fmt(v.imag)}")
    return _write_lines(path, lines)


def read_measurements(path) -> Measurements:
    meta, header, rows = _read_table(path)
    if header != ["index", "re", "im"]:
        raise ParseError(path, 1, f"unexpected header {','.join(header)}")
    idx = [_int(path, ln, c[0]) for ln, c in rows]
    vals = [complex(_float(path, ln, c[1]), _float(path, ln, c[2])) for ln, c in rows]
    plan = _plan_from(path, meta, idx)
    return Measurements(plan=plan, values=np.array(vals), time=float(meta.get("t", "0")))


# --- scaleograms --------------------------------------------------------

def write_scaleogram(path, sg: Scaleogram) -> Path:
    x = sg.positions()
    lines = ["scale\\position," + ",".join(fmt(v) for v in x)]
    for a, row in zip(sg.scales, sg.magnitudes):
        lines.append(f"{a}," + ",".join(fmt(v) for v in row))
    return _write_lines(path, lines)


def read_scaleogram(path) -> Scaleogram:
    meta, header, rows = _read_table(path)
    if header[0] != "scale\\position":
        raise ParseError(path, 1, "first cell must be 'scale\\position'")
    x = np.array([_float(path, 1, c) for c in header[1:]])
    scales = [_int(path, ln, c[0]) for ln, c in rows]
    mags = np.array([[_float(path, ln, v) for v in c[1:]] for ln, c in rows])
    return Scaleogram(scales=tuple(scales), magnitudes=mags.reshape(len(scales), x.size), x=x)


# --- detection reports --------------------------------------------------

def detection_row(report: DetectionReport) -> str:
    alarm = "true" if report.alarm else "false"
    return ",".join(
        [fmt(report.time), fmt(report.triangularity), fmt(report.apex_x), fmt(report.apex_confidence), alarm]
    )


def append_detection(path, report: DetectionReport, note: str | None = None) -> Path:
    """Append one report row, writing the header first if the file is new."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fresh = not path.exists() or path.stat().st_size == 0
    with open(path, "a", encoding="utf-8", newline="\n") as fh:
        if fresh:
            fh.write(DETECTION_HEADER + "\n")
        if note:
            fh.write(f"# {note}\n")
        fh.write(detection_row(report) + "\n")
    return path


def read_detections(path) -> list[dict]:
    _, header, rows = _read_table(path)
    if ",".join(header) != DETECTION_HEADER:
        raise ParseError(path, 1, f"unexpected header {','.join(header)}")
    out = []
    for ln, c in rows:
        out.append({
            "t": _float(path, ln, c[0]),
            "triangularity": _float(path, ln, c[1]),
            "apex_x": _float(path, ln, c[2]),
            "apex_confidence": _float(path, ln, c[3]),
            "alarm": c[4] == "true",
        })
    return out


def append_jsonl(path, record: dict) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "a", encoding="utf-8", newline="\n") as fh:
        fh.write(json.dumps(record, sort_keys=True) + "\n")
    return path


# --- SVG ----------------------------------------------------------------

def scaleogram_svg(sg: Scaleogram, cell_w: float = 1.0, cell_h: float = 8.0, title: str = "") -> str:
    """Linear gray heat map, min -> white and max -> black; scale 1 on top.

    Horizontal runs of equal gray level are merged into one rect.
    """
    mags = sg.magnitudes
    lo, hi = float(mags.min()), float(mags.max())
    span = hi - lo
    levels = np.zeros(mags.shape, dtype=int) if span == 0 else np.rint(255 * (mags - lo) / span).astype(int)
    rows, cols = mags.shape
    width, height = cols * cell_w, rows * cell_h
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width:g}" height="{height + 20:g}" '
        f'viewBox="0 0 {width:g} {height + 20:g}" shape-rendering="crispEdges">',
        f'<rect x="0" y="0" width="{width:g}" height="{height:g}" fill="#ffffff"/>',
    ]
    for r in range(rows):
        row = levels[r]
        start = 0
        for c in range(1, cols + 1):
            if c == cols or row[c] != row[start]:
                if row[start] > 0:
                    g = 255 - int(row[start])
                    out.append(
                        f'<rect x="{start * cell_w:g}" y="{r * cell_h:g}" width="{(c - start) * cell_w:g}" '
                        f'height="{cell_h:g}" fill="#{g:02x}{g:02x}{g:02x}"/>'
                    )
                start = c
    label = title or f"scales {sg.scales[0]}-{sg.scales[-1]}, |W| in [{lo:.3g}, {hi:.3g}]"
    out.append(f'<text x="2" y="{height + 15:g}" font-family="monospace" font-size="11">{_escape(label)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def field_svg(x, curves: dict[str, np.ndarray], width: int = 640, height: int = 240) -> str:
    """Line plot of one or more real curves sharing the abscissa ``x``."""
    x = np.asarray(x, dtype=float)
    ys = [np.asarray(v, dtype=float) for v in curves.values()]
    lo = min(float(y.min()) for y in ys)
    hi = max(float(y.max()) for y in ys)
    if hi == lo:
        hi = lo + 1.0
    pad = 20

    def px(v):
        return pad + (v - x[0]) / (x[-1] - x[0]) * (width - 2 * pad)

    def py(v):
        return height - pad - (v - lo) / (hi - lo) * (height - 2 * pad)

    colors = ["#000000", "#c0392b", "#2471a3", "#27ae60"]
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}">',
        f'<rect x="0" y="0" width="{width}" height="{height}" fill="#ffffff"/>',
    ]
    for k, (name, y) in enumerate(zip(curves, ys)):
        pts = " ".join(f"{px(a):.2f},{py(b):.2f}" for a, b in zip(x, y))
        color = colors[k % len(colors)]
        dash = ' stroke-dasharray="4 3"' if k else ""
        out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1"{dash} points="{pts}"/>')
        out.append(
            f'<text x="{pad + 4}" y="{pad + 12 * (k + 1)}" font-family="monospace" font-size="11" '
            f'fill="{color}">{_escape(name)}</text>'
        )
    out.append(
        f'<text x="{pad}" y="{height - 4}" font-family="monospace" font-size="10">'
        f"x in [{x[0]:g}, {x[-1]:g}], y in [{lo:.3g}, {hi:.3g}]</text>"
    )
    out.append("</svg>")
    return "\n".join(out) + "\n"


def _escape(s: str) -> str:
    return s.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")


def write_text(path, text: str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
    return path
