"""Deterministic CSV / JSON / SVG writers.

Floats are written with ``repr`` so files round-trip exactly and repeated
runs are byte-identical.
"""

from __future__ import annotations

import csv
import json
import math
import xml.etree.ElementTree as ET
from pathlib import Path

import numpy as np

from .dynamics import EvolutionResult
from .errors import InvalidSpecError
from .response import SweepResult
from .spectral import StateStats

__all__ = [
    "SCHEMA_VERSION",
    "SPECTRUM_COLUMNS",
    "SWEEP_COLUMNS",
    "EVOLUTION_COLUMNS",
    "export",
    "write_csv",
    "write_json",
    "svg_scatter",
    "svg_heatmap",
    "spectrum_svg",
    "sweep_svg",
]

SCHEMA_VERSION = 1
SPECTRUM_COLUMNS = ("idx", "re_E", "im_E", "pr", "mean_x", "mean_y", "residual")
SWEEP_COLUMNS = ("omega", "site", "amplitude")
EVOLUTION_COLUMNS = ("t", "center_x", "center_y", "width_x", "width_y", "log_norm")


def _num(v):
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return repr(float(v))


def write_csv(path, header, rows) -> Path:
    """Write ``header`` and ``rows`` (iterables of numbers or strings)."""
    path = Path(path)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([x if isinstance(x, str) else _num(x) for x in r])
    return path


def _jsonable(o):
    if isinstance(o, dict):
        return {str(k): _jsonable(v) for k, v in o.items()}
    if isinstance(o, (list, tuple)):
        return [_jsonable(v) for v in o]
    if isinstance(o, np.ndarray):
        return _jsonable(o.tolist())
    if isinstance(o, (bool, np.bool_)):
        return bool(o)
    if isinstance(o, (int, np.integer)):
        return int(o)
    if isinstance(o, (float, np.floating)):
        f = float(o)
        return f if math.isfinite(f) else None
    if isinstance(o, (complex, np.complexfloating)):
        return {"re": float(o.real), "im": float(o.imag)}
    return o


def write_json(obj: dict, path) -> Path:
    """Single JSON object with a leading ``schema_version`` key."""
    if not isinstance(obj, dict):
        raise InvalidSpecError("JSON export needs a mapping")
    data = {"schema_version": SCHEMA_VERSION}
    data.update({k: v for k, v in obj.items() if k != "schema_version"})
    path = Path(path)
    path.write_text(json.dumps(_jsonable(data), indent=2, sort_keys=False, allow_nan=False) + "\n")
    return path


# --------------------------------------------------------------------- SVG

_VIRIDIS = ((68, 1, 84), (59, 82, 139), (33, 145, 140), (94, 201, 98), (253, 231, 37))
_W, _H = 640, 480
_ML, _MR, _MT, _MB = 70, 90, 30, 55


def _color(u: float) -> str:
    u = min(max(u, 0.0), 1.0) * (len(_VIRIDIS) - 1)
    i = min(int(u), len(_VIRIDIS) - 2)
    f = u - i
    c = [round(a + (b - a) * f) for a, b in zip(_VIRIDIS[i], _VIRIDIS[i + 1])]
    return "#%02x%02x%02x" % tuple(c)


def _fmt_tick(v: float) -> str:
    return f"{v:.3g}"


class _Frame:
    def __init__(self, xlim, ylim, title, xlabel, ylabel):
        self.xlim = xlim
        self.ylim = ylim
        self.root = ET.Element("svg", xmlns="http://www.w3.org/2000/svg", width=str(_W), height=str(_H), viewBox=f"0 0 {_W} {_H}")
        ET.SubElement(self.root, "rect", x="0", y="0", width=str(_W), height=str(_H), fill="white")
        t = ET.SubElement(self.root, "text", x=str(_W / 2), y="18", **{"text-anchor": "middle", "font-size": "14"})
        t.text = title
        self.plot = ET.SubElement(self.root, "g")
        self._axes(xlabel, ylabel)

    def px(self, x):
        a, b = self.xlim
        return _ML + (x - a) / (b - a) * (_W - _ML - _MR)

    def py(self, y):
        a, b = self.ylim
        return _H - _MB - (y - a) / (b - a) * (_H - _MT - _MB)

    def _axes(self, xlabel, ylabel):
        g = ET.SubElement(self.root, "g", stroke="black", fill="none")
        ET.SubElement(g, "rect", x=str(_ML), y=str(_MT), width=str(_W - _ML - _MR), height=str(_H - _MT - _MB))
        for v in np.linspace(*self.xlim, 5):
            x = self.px(v)
            ET.SubElement(g, "line", x1=f"{x:.2f}", y1=str(_H - _MB), x2=f"{x:.2f}", y2=str(_H - _MB + 5))
            t = ET.SubElement(self.root, "text", x=f"{x:.2f}", y=str(_H - _MB + 18), **{"text-anchor": "middle", "font-size": "11"})
            t.text = _fmt_tick(v)
        for v in np.linspace(*self.ylim, 5):
            y = self.py(v)
            ET.SubElement(g, "line", x1=str(_ML - 5), y1=f"{y:.2f}", x2=str(_ML), y2=f"{y:.2f}")
            t = ET.SubElement(self.root, "text", x=str(_ML - 8), y=f"{y + 4:.2f}", **{"text-anchor": "end", "font-size": "11"})
            t.text = _fmt_tick(v)
        t = ET.SubElement(self.root, "text", x=str((_ML + _W - _MR) / 2), y=str(_H - 12), **{"text-anchor": "middle", "font-size": "13"})
        t.text = xlabel
        cy = (_MT + _H - _MB) / 2
        t = ET.SubElement(self.root, "text", x="18", y=f"{cy:.2f}", transform=f"rotate(-90 18 {cy:.2f})", **{"text-anchor": "middle", "font-size": "13"})
        t.text = ylabel

    def colorbar(self, lo, hi, label):
        x0 = _W - _MR + 20
        top, bot = _MT, _H - _MB
        n = 32
        step = (bot - top) / n
        for i in range(n):
            ET.SubElement(self.root, "rect", x=str(x0), y=f"{bot - (i + 1) * step:.2f}", width="14", height=f"{step + 0.5:.2f}", fill=_color(i / (n - 1)))
        for v, y in ((lo, bot), (hi, top)):
            t = ET.SubElement(self.root, "text", x=str(x0 + 18), y=f"{y + 4:.2f}", **{"font-size": "10"})
            t.text = _fmt_tick(v)
        t = ET.SubElement(self.root, "text", x=str(x0), y=str(top - 8), **{"font-size": "11"})
        t.text = label

    def write(self, path) -> Path:
        path = Path(path)
        ET.ElementTree(self.root).write(path, encoding="utf-8", xml_declaration=True)
        return path


def _lim(vals, extra=()):
    v = np.concatenate([np.asarray(vals, dtype=float).ravel(), np.asarray(extra, dtype=float).ravel()])
    v = v[np.isfinite(v)]
    lo, hi = (float(v.min()), float(v.max())) if v.size else (0.0, 1.0)
    if hi == lo:
        lo, hi = lo - 1.0, hi + 1.0
    pad = 0.05 * (hi - lo)
    return (lo - pad, hi + pad)


def svg_scatter(x, y, path, *, color=None, color_label="", title="", xlabel="x", ylabel="y", box=None, lines=()) -> Path:
    """Scatter plot, optionally colored, with a dashed box and overlay lines.

    Parameters
    ----------
    box : (x_half, y_half), optional
        Dashed rectangle ``|x| <= x_half``, ``|y| <= y_half``.
    lines : sequence of (slope, intercept, dashed)
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.size == 0:
        raise InvalidSpecError("nothing to plot")
    ex = (-box[0], box[0]) if box else ()
    ey = (-box[1], box[1]) if box else ()
    fr = _Frame(_lim(x, ex), _lim(y, ey), title, xlabel, ylabel)
    if color is not None:
        c = np.asarray(color, dtype=float)
        lo, hi = float(np.nanmin(c)), float(np.nanmax(c))
        span = hi - lo if hi > lo else 1.0
        fr.colorbar(lo, hi, color_label)
    for i in range(x.size):
        if not (np.isfinite(x[i]) and np.isfinite(y[i])):
            continue
        fill = _color((c[i] - lo) / span) if color is not None else "#3b528b"
        ET.SubElement(fr.plot, "circle", cx=f"{fr.px(x[i]):.2f}", cy=f"{fr.py(y[i]):.2f}", r="2.2", fill=fill)
    if box:
        x0, x1 = fr.px(-box[0]), fr.px(box[0])
        y0, y1 = fr.py(box[1]), fr.py(-box[1])
        ET.SubElement(fr.plot, "rect", x=f"{x0:.2f}", y=f"{y0:.2f}", width=f"{x1 - x0:.2f}", height=f"{y1 - y0:.2f}", fill="none", stroke="black", **{"stroke-dasharray": "6,4", "class": "bounds"})
    for slope, icpt, dashed in lines:
        xa, xb = fr.xlim
        attrs = {"stroke": "black", "class": "trend"}
        if dashed:
            attrs["stroke-dasharray"] = "4,3"
        ET.SubElement(fr.plot, "line", x1=f"{fr.px(xa):.2f}", y1=f"{fr.py(slope * xa + icpt):.2f}", x2=f"{fr.px(xb):.2f}", y2=f"{fr.py(slope * xb + icpt):.2f}", **attrs)
    return fr.write(path)


def svg_heatmap(matrix, xs, ys, path, *, title="", xlabel="x", ylabel="y", color_label="", row_normalize=True, lines=()) -> Path:
    """Heatmap with one ``rect`` per matrix cell (rows follow ``ys``).

    With ``row_normalize`` each row is scaled by its maximum so the peak of
    every row is visible.  ``lines`` are (slope, intercept, dashed) overlays
    in data coordinates (x against y).
    """
    m = np.asarray(matrix, dtype=float)
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    if m.size == 0 or m.shape != (ys.size, xs.size):
        raise InvalidSpecError("heatmap shape mismatch")
    if row_normalize:
        mx = m.max(axis=1, keepdims=True)
        m = m / np.where(mx > 0, mx, 1.0)
    lo, hi = float(m.min()), float(m.max())
    span = hi - lo if hi > lo else 1.0

    def edges(v):
        if v.size == 1:
            return np.array([v[0] - 0.5, v[0] + 0.5])
        mid = 0.5 * (v[1:] + v[:-1])
        return np.concatenate([[v[0] - (mid[0] - v[0])], mid, [v[-1] + (v[-1] - mid[-1])]])

    xe, ye = edges(xs), edges(ys)
    fr = _Frame((xe[0], xe[-1]), (min(ye[0], ye[-1]), max(ye[0], ye[-1])), title, xlabel, ylabel)
    fr.colorbar(lo, hi, color_label)
    cells = ET.SubElement(fr.plot, "g", **{"class": "cells"})
    for i in range(ys.size):
        ya, yb = fr.py(ye[i]), fr.py(ye[i + 1])
        for j in range(xs.size):
            xa, xb = fr.px(xe[j]), fr.px(xe[j + 1])
            ET.SubElement(cells, "rect", x=f"{min(xa, xb):.2f}", y=f"{min(ya, yb):.2f}", width=f"{abs(xb - xa):.2f}", height=f"{abs(yb - ya):.2f}", fill=_color((m[i, j] - lo) / span))
    for slope, icpt, dashed in lines:
        ya, yb = fr.ylim
        attrs = {"stroke": "white", "class": "trend"}
        if dashed:
            attrs["stroke-dasharray"] = "4,3"
        ET.SubElement(fr.plot, "line", x1=f"{fr.px(slope * ya + icpt):.2f}", y1=f"{fr.py(ya):.2f}", x2=f"{fr.px(slope * yb + icpt):.2f}", y2=f"{fr.py(yb):.2f}", **attrs)
    return fr.write(path)


def spectrum_svg(table, path, bounds=None, title="complex spectrum") -> Path:
    """Re E vs Im E colored by participation ratio, with the CLM bound box."""
    re = [s.re_E for s in table]
    im = [s.im_E for s in table]
    pr = [s.pr for s in table]
    box = (bounds.re_max, bounds.im_max) if bounds is not None else None
    return svg_scatter(re, im, path, color=pr, color_label="PR", title=title, xlabel="Re E", ylabel="Im E", box=box)


def sweep_svg(sweep: SweepResult, path, title="steady-state amplitude", trend=None) -> Path:
    """Sweep heatmap: site on x, omega on y; optional ``(slope, intercept)`` of site vs omega."""
    lines = [(trend[0], trend[1], True)] if trend is not None else ()
    return svg_heatmap(sweep.profiles, np.arange(1, sweep.n_sites + 1), sweep.omegas, path, title=title, xlabel="site j", ylabel="omega", color_label="|psi|/max", lines=lines)


# ------------------------------------------------------------------ export


def _spectrum_rows(table):
    for i, s in enumerate(table):
        yield (i, s.re_E, s.im_E, s.pr, s.mean_x, s.mean_y, s.residual)


def _sweep_rows(sweep: SweepResult):
    for i, w in enumerate(sweep.omegas):
        for j in range(sweep.n_sites):
            yield (float(w), j + 1, float(sweep.profiles[i, j]))


def _evolution_rows(res: EvolutionResult):
    for i, t in enumerate(res.times):
        yield (t, res.center[i, 0], res.center[i, 1], res.width[i, 0], res.width[i, 1], res.log_norm[i])


def export(dataset, fmt: str, path, **options) -> Path:
    """Write a spectrum table, sweep, evolution record or metrics mapping.

    Parameters
    ----------
    dataset : list of StateStats, SweepResult, EvolutionResult or dict
    fmt : {"csv", "json", "svg"}
    path : path-like
    options : passed to the SVG renderer (e.g. ``bounds`` for spectra).

    Raises
    ------
    InvalidSpecError
        Unknown format, empty dataset or unsupported combination.
    OSError
        Unwritable path.
    """
    if fmt not in ("csv", "json", "svg"):
        raise InvalidSpecError(f"unknown format {fmt!r}")
    is_table = isinstance(dataset, (list, tuple)) and all(isinstance(s, StateStats) for s in dataset)
    if is_table and len(dataset) == 0:
        raise InvalidSpecError("empty dataset")
    if is_table:
        if fmt == "csv":
            return write_csv(path, SPECTRUM_COLUMNS, _spectrum_rows(dataset))
        if fmt == "svg":
            return spectrum_svg(dataset, path, **options)
        return write_json({"columns": list(SPECTRUM_COLUMNS), "rows": [list(r) for r in _spectrum_rows(dataset)]}, path)
    if isinstance(dataset, SweepResult):
        if fmt == "csv":
            return write_csv(path, SWEEP_COLUMNS, _sweep_rows(dataset))
        if fmt == "svg":
            return sweep_svg(dataset, path, **options)
        return write_json({"omegas": dataset.omegas, "peaks": dataset.peaks, "profiles": dataset.profiles, "seed": dataset.seed, "kappa": dataset.kappa, "gamma": dataset.gamma}, path)
    if isinstance(dataset, EvolutionResult):
        if fmt == "csv":
            return write_csv(path, EVOLUTION_COLUMNS, _evolution_rows(dataset))
        if fmt == "json":
            return write_json({"columns": list(EVOLUTION_COLUMNS), "rows": [list(r) for r in _evolution_rows(dataset)]}, path)
        return svg_scatter(dataset.times, dataset.center[:, 0], path, title="packet center", xlabel="t", ylabel="center x", **options)
    if isinstance(dataset, dict):
        if not dataset:
            raise InvalidSpecError("empty dataset")
        if fmt != "json":
            raise InvalidSpecError("mappings export to JSON only")
        return write_json(dataset, path)
    raise InvalidSpecError(f"cannot export {type(dataset).__name__}")
