"""Experiment result containers and byte-stable file emission.

Outputs per run directory:
  manifest.json   config echo + sha256, master seed, library versions, backend
  results.csv     one row per record; leading `record` column tags the row type
  plotdata.csv    plot-ready wide table (x column + named series)
  report.json     rows + summary + self-checks, machine-readable
  <kind>.svg      optional line plot rendered from the same plot data

Floats are written with repr() (shortest round-trip form), so identical
reports serialize to identical bytes; nothing time- or host-dependent is
recorded.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
import platform
from dataclasses import dataclass, field

import numpy as np
import scipy

from ._core import backend_name
from ._version import __version__
from .config import config_sha256


@dataclass
class Report:
    kind: str
    config: dict
    seed: int
    columns: list
    rows: list = field(default_factory=list)
    plot: dict | None = None
    summary: dict = field(default_factory=dict)
    checks: list = field(default_factory=list)

    def add_row(self, record: str, **values):
        row = {"record": record}
        row.update(values)
        self.rows.append(row)

    def add_check(self, name: str, passed: bool, detail: str = ""):
        self.checks.append({"name": name, "passed": bool(passed), "detail": detail})

    @property
    def all_checks_passed(self) -> bool:
        return all(c["passed"] for c in self.checks)


def _cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def _jsonable(v):
    if isinstance(v, (np.bool_,)):
        return bool(v)
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (np.floating,)):
        return float(v)
    if isinstance(v, np.ndarray):
        return [_jsonable(x) for x in v.tolist()]
    if isinstance(v, dict):
        return {k: _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    return v


def render_csv(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_cell(row.get(col)) for col in header])
    return buf.getvalue()


def manifest_dict(report: Report) -> dict:
    return {
        "kind": report.kind,
        "config": report.config,
        "config_sha256": config_sha256(report.config),
        "seed": report.seed,
        "versions": {
            "gpbounds": __version__,
            "numpy": np.__version__,
            "scipy": scipy.__version__,
            "python": platform.python_version(),
        },
        "backend": backend_name(),
    }


def emit_report(report: Report, outdir: str, *, svg: bool = False) -> list:
    """Write all artifact files; returns the list of paths written."""
    os.makedirs(outdir, exist_ok=True)
    written = []

    def _write(name, text):
        path = os.path.join(outdir, name)
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        written.append(path)

    _write("manifest.json", json.dumps(_jsonable(manifest_dict(report)),
                                       sort_keys=True, indent=2) + "\n")
    _write("results.csv", render_csv(["record"] + list(report.columns), report.rows))

    plot = report.plot
    if plot is not None:
        header = [plot["xlabel"]] + list(plot["series"])
        prows = []
        for i, x in enumerate(plot["x"]):
            row = {plot["xlabel"]: x}
            for name, vals in plot["series"].items():
                row[name] = vals[i]
            prows.append(row)
        _write("plotdata.csv", render_csv(header, prows))
        if svg:
            _write(f"{report.kind}.svg", svg_line_plot(
                plot["x"], plot["series"], title=plot.get("title", report.kind),
                xlabel=plot["xlabel"], ylabel=plot.get("ylabel", ""),
                logx=plot.get("logx", False), logy=plot.get("logy", False)))
    else:
        _write("plotdata.csv", render_csv(["x"], []))

    _write("report.json", json.dumps(_jsonable({
        "kind": report.kind,
        "columns": list(report.columns),
        "rows": report.rows,
        "summary": report.summary,
        "checks": report.checks,
    }), sort_keys=True, indent=2) + "\n")
    return written


def load_results_csv(path: str):
    """(header, rows-as-string-dicts) from an emitted results.csv."""
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        return header, [dict(zip(header, row)) for row in reader]


# ---------------------------------------------------------------------------
# minimal deterministic SVG line plots (no plotting dependency)

_PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"]
_W, _H = 640, 440
_ML, _MR, _MT, _MB = 72, 24, 36, 52


def _ticks(lo: float, hi: float, log: bool):
    if log:
        lo_d, hi_d = math.floor(math.log10(lo)), math.ceil(math.log10(hi))
        step = max(1, (hi_d - lo_d) // 6)
        return [10.0**d for d in range(lo_d, hi_d + 1, step)]
    if hi <= lo:
        return [lo]
    raw = (hi - lo) / 4.0
    mag = 10.0 ** math.floor(math.log10(raw))
    step = min(s * mag for s in (1, 2, 5, 10) if s * mag >= raw)
    first = math.ceil(lo / step) * step
    out = []
    t = first
    while t <= hi + 1e-9 * step:
        out.append(t)
        t += step
    return out


def _fmt_tick(v: float) -> str:
    if v != 0 and (abs(v) >= 1e4 or abs(v) < 1e-3):
        return f"{v:.0e}"
    return f"{v:g}"


def svg_line_plot(x, series: dict, *, title="", xlabel="", ylabel="",
                  logx=False, logy=False) -> str:
    pts = {}
    for name, ys in series.items():
        keep = [(float(a), float(b)) for a, b in zip(x, ys)
                if b is not None and math.isfinite(float(b))
                and (not logy or float(b) > 0) and (not logx or float(a) > 0)]
        if keep:
            pts[name] = keep
    allx = [a for k in pts.values() for a, _ in k]
    ally = [b for k in pts.values() for _, b in k]
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" '
        f'viewBox="0 0 {_W} {_H}" font-family="monospace" font-size="12">',
        f'<rect width="{_W}" height="{_H}" fill="white"/>',
        f'<text x="{_W / 2:.1f}" y="20" text-anchor="middle" font-size="14">{title}</text>',
    ]
    if not allx:
        parts.append('<text x="320" y="220" text-anchor="middle">no finite data</text>')
        parts.append("</svg>")
        return "\n".join(parts) + "\n"

    def span(vals, log):
        lo, hi = min(vals), max(vals)
        if log:
            pad = (math.log10(hi) - math.log10(lo)) * 0.05 or 0.5
            return 10 ** (math.log10(lo) - pad), 10 ** (math.log10(hi) + pad)
        pad = (hi - lo) * 0.05 or max(abs(hi), 1.0) * 0.05
        return lo - pad, hi + pad

    x0, x1 = span(allx, logx)
    y0, y1 = span(ally, logy)

    def tx(v):
        f = (math.log10(v) - math.log10(x0)) / (math.log10(x1) - math.log10(x0)) if logx \
            else (v - x0) / (x1 - x0)
        return _ML + f * (_W - _ML - _MR)

    def ty(v):
        f = (math.log10(v) - math.log10(y0)) / (math.log10(y1) - math.log10(y0)) if logy \
            else (v - y0) / (y1 - y0)
        return _H - _MB - f * (_H - _MT - _MB)

    parts.append(f'<rect x="{_ML}" y="{_MT}" width="{_W - _ML - _MR}" '
                 f'height="{_H - _MT - _MB}" fill="none" stroke="black"/>')
    for t in _ticks(x0, x1, logx):
        if x0 <= t <= x1:
            px = tx(t)
            parts.append(f'<line x1="{px:.2f}" y1="{_H - _MB}" x2="{px:.2f}" '
                         f'y2="{_H - _MB + 5}" stroke="black"/>')
            parts.append(f'<text x="{px:.2f}" y="{_H - _MB + 18}" '
                         f'text-anchor="middle">{_fmt_tick(t)}</text>')
    for t in _ticks(y0, y1, logy):
        if y0 <= t <= y1:
            py = ty(t)
            parts.append(f'<line x1="{_ML - 5}" y1="{py:.2f}" x2="{_ML}" '
                         f'y2="{py:.2f}" stroke="black"/>')
            parts.append(f'<text x="{_ML - 8}" y="{py + 4:.2f}" '
                         f'text-anchor="end">{_fmt_tick(t)}</text>')
    parts.append(f'<text x="{(_ML + _W - _MR) / 2:.1f}" y="{_H - 12}" '
                 f'text-anchor="middle">{xlabel}</text>')
    parts.append(f'<text x="16" y="{(_MT + _H - _MB) / 2:.1f}" text-anchor="middle" '
                 f'transform="rotate(-90 16 {(_MT + _H - _MB) / 2:.1f})">{ylabel}</text>')
    for i, (name, keep) in enumerate(pts.items()):
        color = _PALETTE[i % len(_PALETTE)]
        coords = " ".join(f"{tx(a):.2f},{ty(b):.2f}" for a, b in keep)
        parts.append(f'<polyline points="{coords}" fill="none" stroke="{color}" '
                     f'stroke-width="1.5"/>')
        ly = _MT + 16 + 16 * i
        parts.append(f'<line x1="{_W - _MR - 150}" y1="{ly}" x2="{_W - _MR - 130}" '
                     f'y2="{ly}" stroke="{color}" stroke-width="1.5"/>')
        parts.append(f'<text x="{_W - _MR - 125}" y="{ly + 4}">{name}</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
