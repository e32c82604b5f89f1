"""File emitters: binary PGM images and dependency-free SVG line charts."""

from __future__ import annotations

import math
from pathlib import Path

import numpy as np

from .linalg import _as_vector

_PALETTE = ("#1f6fb2", "#c23b22", "#2e8540", "#8054a0", "#b8860b", "#507080")


def emit_pgm(image, dims: tuple[int, int], path) -> Path:
    """Write a [0, 1]-valued image vector as a binary (P5) PGM file.

    The vector is interpreted in column-major order, matching the layout
    produced by the 2-D blur problem; the file itself is row-major as the
    format requires.  Values are clamped to [0, 1] and quantized with
    round-half-up to an 8-bit gray level.
    """
    image = _as_vector(image, "image")
    h, w = int(dims[0]), int(dims[1])
    if image.shape[0] != h * w:
        raise ValueError(f"image length {image.shape[0]} != {h}x{w}")
    pixels = image.reshape((h, w), order="F")
    levels = np.floor(255.0 * np.clip(pixels, 0.0, 1.0) + 0.5).astype(np.uint8)
    path = Path(path)
    with open(path, "wb") as fh:
        fh.write(f"P5\n{w} {h}\n255\n".encode("ascii"))
        fh.write(levels.tobytes())
    return path


def _log10_clipped(values, floor: float = 1e-300) -> list[float]:
    return [math.log10(max(float(v), floor)) for v in values]


def write_line_chart_svg(
    path,
    title: str,
    series: list[tuple[str, np.ndarray]],
    x_label: str = "iteration",
    log_y: bool = True,
) -> Path:
    """Write a minimal multi-series line chart (log10 y by default).

    Every series is a (label, values) pair plotted against 1-based index.
    Output is plain hand-assembled SVG markup with deterministic number
    formatting, so identical inputs give identical bytes.
    """
    width, height = 640.0, 440.0
    left, right, top, bottom = 70.0, 20.0, 40.0, 50.0
    plot_w = width - left - right
    plot_h = height - top - bottom

    drawable = [(label, np.asarray(ys, dtype=float)) for label, ys in series if len(ys) > 0]
    xs_max = max((len(ys) for _, ys in drawable), default=1)
    if log_y:
        transformed = [(label, _log10_clipped(ys)) for label, ys in drawable]
    else:
        transformed = [(label, [float(v) for v in ys]) for label, ys in drawable]
    all_vals = [v for _, ys in transformed for v in ys]
    y_lo = min(all_vals, default=0.0)
    y_hi = max(all_vals, default=1.0)
    if y_hi - y_lo < 1e-12:
        y_hi = y_lo + 1.0

    def x_pos(i: int) -> float:
        frac = (i - 1) / max(xs_max - 1, 1)
        return left + frac * plot_w

    def y_pos(v: float) -> float:
        frac = (v - y_lo) / (y_hi - y_lo)
        return top + (1.0 - frac) * plot_h

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0f}" height="{height:.0f}" '
        f'viewBox="0 0 {width:.0f} {height:.0f}">',
        f'<rect width="{width:.0f}" height="{height:.0f}" fill="white"/>',
        f'<text x="{width / 2:.1f}" y="22" text-anchor="middle" font-size="15" '
        f'font-family="sans-serif">{title}</text>',
        f'<line x1="{left:.1f}" y1="{top:.1f}" x2="{left:.1f}" y2="{top + plot_h:.1f}" '
        f'stroke="black" stroke-width="1"/>',
        f'<line x1="{left:.1f}" y1="{top + plot_h:.1f}" x2="{left + plot_w:.1f}" '
        f'y2="{top + plot_h:.1f}" stroke="black" stroke-width="1"/>',
    ]
    n_ticks = 5
    for k in range(n_ticks):
        v = y_lo + (y_hi - y_lo) * k / (n_ticks - 1)
        y = y_pos(v)
        label = f"1e{v:.1f}" if log_y else f"{v:.3g}"
        parts.append(
            f'<line x1="{left - 4:.1f}" y1="{y:.1f}" x2="{left:.1f}" y2="{y:.1f}" '
            f'stroke="black" stroke-width="1"/>'
        )
        parts.append(
            f'<text x="{left - 8:.1f}" y="{y + 4:.1f}" text-anchor="end" font-size="11" '
            f'font-family="sans-serif">{label}</text>'
        )
    for frac, xv in ((0.0, 1), (0.5, (xs_max + 1) // 2), (1.0, xs_max)):
        x = left + frac * plot_w
        parts.append(
            f'<text x="{x:.1f}" y="{top + plot_h + 18:.1f}" text-anchor="middle" '
            f'font-size="11" font-family="sans-serif">{xv}</text>'
        )
    parts.append(
        f'<text x="{left + plot_w / 2:.1f}" y="{height - 10:.1f}" text-anchor="middle" '
        f'font-size="12" font-family="sans-serif">{x_label}</text>'
    )
    for idx, (label, ys) in enumerate(transformed):
        color = _PALETTE[idx % len(_PALETTE)]
        points = " ".join(f"{x_pos(i + 1):.2f},{y_pos(v):.2f}" for i, v in enumerate(ys))
        parts.append(
            f'<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{points}"/>'
        )
        ly = top + 14 + 16 * idx
        parts.append(
            f'<line x1="{left + plot_w - 120:.1f}" y1="{ly - 4:.1f}" '
            f'x2="{left + plot_w - 100:.1f}" y2="{ly - 4:.1f}" stroke="{color}" '
            f'stroke-width="1.5"/>'
        )
        parts.append(
            f'<text x="{left + plot_w - 95:.1f}" y="{ly:.1f}" font-size="11" '
            f'font-family="sans-serif">{label}</text>'
        )
    parts.append("</svg>")
    path = Path(path)
    path.write_text("\n".join(parts) + "\n", encoding="ascii")
    return path


def write_convergence_svg(path, title: str, residual_history, error_history=None) -> Path:
    """Convergence chart: relative-ish residual and error curves on a log axis."""
    series: list[tuple[str, np.ndarray]] = [("residual", np.asarray(residual_history))]
    if error_history is not None and len(error_history) > 0:
        series.append(("error", np.asarray(error_history)))
    return write_line_chart_svg(path, title, series)
