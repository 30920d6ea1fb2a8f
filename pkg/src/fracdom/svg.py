"""Minimal deterministic SVG line charts with error bands.

Hand-rolled on purpose: the charts are build artifacts whose bytes must be
identical across runs and machines, so no plotting library (font metrics,
version strings, timestamps) is involved.  Coordinates are formatted with
a fixed precision and series are drawn in input order.
"""
from __future__ import annotations

import math
from typing import Optional, Sequence

__all__ = ["line_chart"]

PALETTE = ("#1f6fb2", "#c04a3a", "#3e8f5a", "#8854a0", "#b28a1f", "#3aa0a8")
WIDTH, HEIGHT = 640, 400
MARGIN_L, MARGIN_R, MARGIN_T, MARGIN_B = 64, 16, 34, 46
N_TICKS = 5


def _fmt(v: float) -> str:
    return f"{v:.2f}"


def _esc(text: str) -> str:
    return (text.replace("&", "&amp;").replace("<", "&lt;")
            .replace(">", "&gt;"))


def _tick_label(v: float) -> str:
    return f"{v:.4g}"


def _axis_range(lo: float, hi: float) -> tuple:
    if not (math.isfinite(lo) and math.isfinite(hi)):
        lo, hi = 0.0, 1.0
    if hi <= lo:
        pad = max(abs(lo), 1.0) * 0.05
        return lo - pad, lo + pad
    pad = (hi - lo) * 0.05
    return lo - pad, hi + pad


def line_chart(series: Sequence[dict], title: str = "", xlabel: str = "",
               ylabel: str = "", path: Optional[str] = None) -> str:
    """Render line series to an SVG string (and optionally a file).

    Each series is a dict with keys ``x`` (list), ``y`` (list), optional
    ``err`` (list, drawn as a translucent band around y), optional
    ``label`` (legend text).  Points with non-finite y are dropped.
    """
    pts_all_x, pts_all_y = [], []
    clean = []
    for item in series:
        xs = [float(v) for v in item["x"]]
        ys = [float(v) for v in item["y"]]
        errs = [float(v) for v in item.get("err", [0.0] * len(ys))]
        keep = [i for i in range(len(xs))
                if math.isfinite(xs[i]) and math.isfinite(ys[i])]
        xs = [xs[i] for i in keep]
        ys = [ys[i] for i in keep]
        errs = [errs[i] if math.isfinite(errs[i]) else 0.0 for i in keep]
        clean.append({"x": xs, "y": ys, "err": errs,
                      "label": str(item.get("label", ""))})
        pts_all_x += xs
        pts_all_y += [y - e for y, e in zip(ys, errs)]
        pts_all_y += [y + e for y, e in zip(ys, errs)]
    x0, x1 = _axis_range(min(pts_all_x, default=0.0), max(pts_all_x, default=1.0))
    y0, y1 = _axis_range(min(pts_all_y, default=0.0), max(pts_all_y, default=1.0))
    iw = WIDTH - MARGIN_L - MARGIN_R
    ih = HEIGHT - MARGIN_T - MARGIN_B

    def px(x: float) -> float:
        return MARGIN_L + (x - x0) / (x1 - x0) * iw

    def py(y: float) -> float:
        return MARGIN_T + (y1 - y) / (y1 - y0) * ih

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" '
           f'height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">',
           f'<rect width="{WIDTH}" height="{HEIGHT}" fill="#ffffff"/>']
    # frame and ticks
    out.append(f'<rect x="{MARGIN_L}" y="{MARGIN_T}" width="{iw}" height="{ih}" '
               'fill="none" stroke="#444444" stroke-width="1"/>')
    for k in range(N_TICKS + 1):
        fx = x0 + (x1 - x0) * k / N_TICKS
        gx = _fmt(px(fx))
        out.append(f'<line x1="{gx}" y1="{MARGIN_T + ih}" x2="{gx}" '
                   f'y2="{MARGIN_T + ih + 5}" stroke="#444444"/>')
        out.append(f'<text x="{gx}" y="{MARGIN_T + ih + 18}" font-size="11" '
                   f'font-family="monospace" text-anchor="middle">'
                   f'{_tick_label(fx)}</text>')
        fy = y0 + (y1 - y0) * k / N_TICKS
        gy = _fmt(py(fy))
        out.append(f'<line x1="{MARGIN_L - 5}" y1="{gy}" x2="{MARGIN_L}" '
                   f'y2="{gy}" stroke="#444444"/>')
        out.append(f'<text x="{MARGIN_L - 8}" y="{gy}" font-size="11" '
                   f'font-family="monospace" text-anchor="end" '
                   f'dominant-baseline="middle">{_tick_label(fy)}</text>')
    if title:
        out.append(f'<text x="{WIDTH // 2}" y="20" font-size="14" '
                   f'font-family="monospace" text-anchor="middle">{_esc(title)}</text>')
    if xlabel:
        out.append(f'<text x="{WIDTH // 2}" y="{HEIGHT - 8}" font-size="12" '
                   f'font-family="monospace" text-anchor="middle">{_esc(xlabel)}</text>')
    if ylabel:
        out.append(f'<text x="14" y="{HEIGHT // 2}" font-size="12" '
                   f'font-family="monospace" text-anchor="middle" '
                   f'transform="rotate(-90 14 {HEIGHT // 2})">{_esc(ylabel)}</text>')
    # error bands below lines, lines below markers
    for idx, item in enumerate(clean):
        color = PALETTE[idx % len(PALETTE)]
        if len(item["x"]) >= 2 and any(e > 0 for e in item["err"]):
            upper = [f"{_fmt(px(x))},{_fmt(py(y + e))}"
                     for x, y, e in zip(item["x"], item["y"], item["err"])]
            lower = [f"{_fmt(px(x))},{_fmt(py(y - e))}"
                     for x, y, e in zip(reversed(item["x"]), reversed(item["y"]),
                                        reversed(item["err"]))]
            out.append(f'<polygon points="{" ".join(upper + lower)}" '
                       f'fill="{color}" fill-opacity="0.15" stroke="none"/>')
    for idx, item in enumerate(clean):
        color = PALETTE[idx % len(PALETTE)]
        if len(item["x"]) >= 2:
            pts = " ".join(f"{_fmt(px(x))},{_fmt(py(y))}"
                           for x, y in zip(item["x"], item["y"]))
            out.append(f'<polyline points="{pts}" fill="none" '
                       f'stroke="{color}" stroke-width="1.5"/>')
        for x, y in zip(item["x"], item["y"]):
            out.append(f'<circle cx="{_fmt(px(x))}" cy="{_fmt(py(y))}" '
                       f'r="2.5" fill="{color}"/>')
    # legend
    ly = MARGIN_T + 12
    for idx, item in enumerate(clean):
        if not item["label"]:
            continue
        color = PALETTE[idx % len(PALETTE)]
        lx = MARGIN_L + iw - 150
        out.append(f'<line x1="{lx}" y1="{ly - 4}" x2="{lx + 18}" y2="{ly - 4}" '
                   f'stroke="{color}" stroke-width="2"/>')
        out.append(f'<text x="{lx + 24}" y="{ly}" font-size="11" '
                   f'font-family="monospace">{_esc(item["label"])}</text>')
        ly += 16
    out.append("</svg>")
    text = "\n".join(out) + "\n"
    if path is not None:
        with open(path, "w") as fh:
            fh.write(text)
    return text
