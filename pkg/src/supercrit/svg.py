"""Static SVG line plots.

Output is a standalone SVG 1.1 document. Numbers are printed with a fixed
precision and nothing depends on time or locale, so identical input gives
identical bytes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Sequence
from xml.sax.saxutils import escape

import numpy as np

PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf")


class PlotError(ValueError):
    pass


@dataclass(frozen=True)
class Curve:
    label: str
    x: Sequence[float]
    y: Sequence[float]


@dataclass(frozen=True)
class PlotSpec:
    title: str = ""
    xlabel: str = ""
    ylabel: str = ""
    logx: bool = False
    logy: bool = False
    width: int = 640
    height: int = 400
    # slope of a reference segment on log-log axes, e.g. 2 for O(dr^2)
    guide_order: float | None = None


_MARGIN = (70, 20, 40, 50)  # left, right, top, bottom


def _fmt(v: float) -> str:
    return f"{v:.2f}"


def _tick_label(v: float) -> str:
    return f"{v:.3g}"


class _Axis:
    def __init__(self, lo: float, hi: float, log: bool, a: float, b: float):
        if log:
            lo, hi = math.log10(lo), math.log10(hi)
        if hi == lo:
            pad = abs(lo) * 0.05 or 1.0
            lo, hi = lo - pad, hi + pad
        self.lo, self.hi, self.log, self.a, self.b = lo, hi, log, a, b

    def __call__(self, v: float) -> float:
        if self.log:
            v = math.log10(v)
        return self.a + (v - self.lo) / (self.hi - self.lo) * (self.b - self.a)

    def ticks(self) -> list[float]:
        if self.log:
            return [10.0**e for e in range(math.ceil(self.lo - 1e-9), math.floor(self.hi + 1e-9) + 1)]
        return list(np.linspace(self.lo, self.hi, 5))


def _finite(curve: Curve, logx: bool, logy: bool) -> tuple[np.ndarray, np.ndarray]:
    x = np.asarray(curve.x, dtype=float)
    y = np.asarray(curve.y, dtype=float)
    if x.shape != y.shape:
        raise PlotError(f"curve {curve.label!r}: x and y lengths differ")
    keep = np.isfinite(x) & np.isfinite(y)
    if logx:
        keep &= x > 0
    if logy:
        keep &= y > 0
    return x[keep], y[keep]


def emit_svg(curves: Curve | Sequence[Curve], spec: PlotSpec = PlotSpec()) -> str:
    """Render one or more curves; a legend is drawn when there is more than one."""
    if isinstance(curves, Curve):
        curves = [curves]
    data = [(c.label, *_finite(c, spec.logx, spec.logy)) for c in curves]
    data = [(lab, x, y) for lab, x, y in data if x.size]
    if not data:
        raise PlotError("nothing to plot")
    if spec.guide_order is not None and not (spec.logx and spec.logy):
        raise PlotError("a guide line needs log-log axes")

    xs = np.concatenate([x for _, x, _ in data])
    ys = np.concatenate([y for _, _, y in data])
    left, right, top, bottom = _MARGIN
    W, H = spec.width, spec.height
    ax = _Axis(xs.min(), xs.max(), spec.logx, left, W - right)
    ay = _Axis(ys.min(), ys.max(), spec.logy, H - bottom, top)

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{W}" height="{H}" '
        f'viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="11">',
        f'<rect x="0" y="0" width="{W}" height="{H}" fill="white"/>',
        f'<rect x="{left}" y="{top}" width="{W - left - right}" height="{H - top - bottom}" '
        'fill="none" stroke="black"/>',
    ]
    if spec.title:
        out.append(f'<text x="{W / 2:.1f}" y="{top - 12}" text-anchor="middle" font-size="13">'
                   f"{escape(spec.title)}</text>")
    for v in ax.ticks():
        px = ax(v)
        out.append(f'<line x1="{_fmt(px)}" y1="{H - bottom}" x2="{_fmt(px)}" y2="{H - bottom + 4}" stroke="black"/>')
        out.append(f'<text x="{_fmt(px)}" y="{H - bottom + 16}" text-anchor="middle">{_tick_label(v)}</text>')
    for v in ay.ticks():
        py = ay(v)
        out.append(f'<line x1="{left - 4}" y1="{_fmt(py)}" x2="{left}" y2="{_fmt(py)}" stroke="black"/>')
        out.append(f'<text x="{left - 6}" y="{_fmt(py + 4)}" text-anchor="end">{_tick_label(v)}</text>')
    if spec.xlabel:
        out.append(f'<text x="{(left + W - right) / 2:.1f}" y="{H - 10}" text-anchor="middle">'
                   f"{escape(spec.xlabel)}</text>")
    if spec.ylabel:
        cy = (top + H - bottom) / 2
        out.append(f'<text x="14" y="{cy:.1f}" text-anchor="middle" transform="rotate(-90 14 {cy:.1f})">'
                   f"{escape(spec.ylabel)}</text>")

    for i, (label, x, y) in enumerate(data):
        pts = " ".join(f"{_fmt(ax(a))},{_fmt(ay(b))}" for a, b in zip(x, y))
        out.append(f'<polyline fill="none" stroke="{PALETTE[i % len(PALETTE)]}" stroke-width="1.5" '
                   f'points="{pts}"><title>{escape(label)}</title></polyline>')

    if spec.guide_order is not None:
        # anchored on the first point of the first curve, drawn below it
        _, x0, y0 = data[0]
        xa, xb = x0.min(), x0.max()
        ya = y0[np.argmin(x0)] / 2
        yb = ya * (xb / xa) ** spec.guide_order
        out.append(f'<line class="guide" x1="{_fmt(ax(xa))}" y1="{_fmt(ay(ya))}" x2="{_fmt(ax(xb))}" '
                   f'y2="{_fmt(ay(yb))}" stroke="gray" stroke-dasharray="6,4"/>')
        data = data + [(f"order {spec.guide_order:g}", None, None)]

    if len(data) > 1:
        lx, ly = W - right - 150, top + 8
        for i, (label, x, _) in enumerate(data):
            yy = ly + 16 * i
            colour = "gray" if x is None else PALETTE[i % len(PALETTE)]
            dash = ' stroke-dasharray="6,4"' if x is None else ""
            out.append(f'<line x1="{lx}" y1="{yy}" x2="{lx + 24}" y2="{yy}" stroke="{colour}" stroke-width="1.5"{dash}/>')
            out.append(f'<text x="{lx + 30}" y="{yy + 4}">{escape(label)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def series_plots(series, snapshots: Mapping[float, object] | None = None) -> dict[str, str]:
    """Standard panels for one run: profiles, Sobolev, Besov and scaled decay."""
    t = series.column("t")
    plots = {}
    if snapshots:
        curves = [Curve(f"t = {ts:g}", f.grid.r, f.values) for ts, f in sorted(snapshots.items())]
        plots["profiles"] = emit_svg(curves, PlotSpec("Solution profiles", "r", "u"))
    if np.isfinite(series.column("sobolev_u")).any():
        plots["sobolev"] = emit_svg(
            [Curve("u", t, series.column("sobolev_u")), Curve("u_t", t, series.column("sobolev_ut"))],
            PlotSpec("Critical Sobolev norms", "t", "norm"),
        )
        plots["besov"] = emit_svg(
            [Curve("u", t, series.column("besov_u")), Curve("u_t", t, series.column("besov_ut"))],
            PlotSpec("Critical Besov norms", "t", "norm"),
        )
    plots["decay"] = emit_svg(
        [Curve("scaled L^(p+2)", t, series.column("scaled_lp2")), Curve("scaled L^inf", t, series.column("scaled_linf"))],
        PlotSpec("Scaled decay", "t", "scaled norm"),
    )
    return plots
