"""Static SVG renderings of trajectories (no plotting library involved)."""

from __future__ import annotations

from xml.sax.saxutils import escape

import numpy as np

WIDTH = HEIGHT = 600
MAX_POINTS = 2000
COLORS = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf"]


def _decimate(n: int, limit: int = MAX_POINTS) -> np.ndarray:
    if n <= limit:
        return np.arange(n)
    return np.unique(np.linspace(0, n - 1, limit).round().astype(int))


def _polyline(xs, ys, color, width=1.2) -> str:
    pts = " ".join(f"{x:.2f},{y:.2f}" for x, y in zip(xs, ys))
    return f'<polyline fill="none" stroke="{color}" stroke-width="{width}" points="{pts}"/>'


def _document(body: list[str], title: str) -> str:
    head = (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">'
    )
    return "\n".join(
        [head, f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>', f"<title>{escape(title)}</title>", *body, "</svg>", ""]
    )


def simplex_svg(traj, title: str = "trajectory") -> str:
    """Barycentric projection of a 3-species trajectory onto a triangle."""
    X = np.asarray(traj.states, dtype=float)
    if X.shape[1] != 3:
        raise ValueError(f"simplex projection needs exactly 3 species, got {X.shape[1]}")
    totals = X.sum(axis=1)
    if np.any(totals <= 0):
        raise ValueError("simplex projection needs positive totals")
    B = X / totals[:, None]
    margin = 60
    side = WIDTH - 2 * margin
    h = side * np.sqrt(3) / 2
    top = (HEIGHT - h) / 2
    corners = np.array([[margin, top + h], [margin + side, top + h], [WIDTH / 2, top]])
    P = B @ corners
    idx = _decimate(len(P))
    tri = " ".join(f"{x:.2f},{y:.2f}" for x, y in corners)
    body = [f'<polygon points="{tri}" fill="none" stroke="black" stroke-width="1.5"/>']
    offsets = [(-10, 18), (10, 18), (0, -10)]
    anchors = ["end", "start", "middle"]
    for (x, y), (dx, dy), name, anchor in zip(corners, offsets, traj.species, anchors):
        body.append(f'<text x="{x + dx:.2f}" y="{y + dy:.2f}" text-anchor="{anchor}">{escape(name)}</text>')
    body.append(_polyline(P[idx, 0], P[idx, 1], COLORS[0], 0.8))
    body.append(f'<circle cx="{P[0, 0]:.2f}" cy="{P[0, 1]:.2f}" r="3" fill="{COLORS[1]}"/>')
    body.append(f'<text x="{WIDTH / 2}" y="24" text-anchor="middle" font-size="14">{escape(title)}</text>')
    return _document(body, title)


def timeseries_svg(traj, title: str = "trajectory") -> str:
    """One polyline per species against time."""
    t = np.asarray(traj.times, dtype=float)
    X = np.asarray(traj.states, dtype=float)
    left, right, top, bottom = 60, 20, 40, 60
    pw, ph = WIDTH - left - right, HEIGHT - top - bottom
    t0, t1 = float(t[0]), float(t[-1])
    ymax = float(X.max()) if X.size and X.max() > 0 else 1.0
    span_t = t1 - t0 if t1 > t0 else 1.0

    def sx(v):
        return left + (v - t0) / span_t * pw

    def sy(v):
        return top + ph - v / ymax * ph

    body = [
        f'<line x1="{left}" y1="{top + ph}" x2="{left + pw}" y2="{top + ph}" stroke="black"/>',
        f'<line x1="{left}" y1="{top}" x2="{left}" y2="{top + ph}" stroke="black"/>',
    ]
    for frac in (0, 0.5, 1):
        tv = t0 + frac * span_t
        body.append(f'<text x="{sx(tv):.2f}" y="{top + ph + 18}" text-anchor="middle">{tv:.4g}</text>')
        yv = frac * ymax
        body.append(f'<text x="{left - 6}" y="{sy(yv) + 4:.2f}" text-anchor="end">{yv:.3g}</text>')
    body.append(f'<text x="{left + pw / 2}" y="{HEIGHT - 15}" text-anchor="middle">t</text>')
    idx = _decimate(len(t))
    for i, name in enumerate(traj.species):
        color = COLORS[i % len(COLORS)]
        body.append(_polyline(sx(t[idx]), sy(X[idx, i]), color))
        ly = top + 16 * i
        body.append(f'<line x1="{left + pw - 70}" y1="{ly}" x2="{left + pw - 50}" y2="{ly}" stroke="{color}" stroke-width="2"/>')
        body.append(f'<text x="{left + pw - 45}" y="{ly + 4}">{escape(name)}</text>')
    body.append(f'<text x="{WIDTH / 2}" y="24" text-anchor="middle" font-size="14">{escape(title)}</text>')
    return _document(body, title)
