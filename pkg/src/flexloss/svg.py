"""Dependency-free SVG rendering of the three crossover curves."""

from __future__ import annotations

from xml.sax.saxutils import escape

from .analysis import LevelSets

WIDTH, HEIGHT = 640, 480
LEFT, RIGHT, TOP, BOTTOM = 64, 24, 24, 56
COLORS = {"A_g": "#2ca02c", "A_b": "#1f4fd6", "A_r": "#d62728"}
LEGEND = {"A_r": "T_fs - T_ps = 0", "A_b": "T_fs - T_is = 0", "A_g": "T_ps - T_is = 0"}


def _x(k: float) -> float:
    return LEFT + k * (WIDTH - LEFT - RIGHT)


def _y(gamma: float) -> float:
    return HEIGHT - BOTTOM - gamma * (HEIGHT - TOP - BOTTOM)


def _f(v: float) -> str:
    return f"{v:.2f}"


def _text(x, y, body, size=12, anchor="middle", extra=""):
    return (f'<text x="{_f(x)}" y="{_f(y)}" font-size="{size}" text-anchor="{anchor}"'
            f' font-family="sans-serif"{extra}>{escape(body)}</text>')


def _ordering_label(a: str, b: str, c: str) -> str:
    return f"T_{a} < T_{b} < T_{c}"


def render_level_sets(sets: LevelSets) -> str:
    """SVG 1.1 document with the curves, reference line and regime labels."""
    rho = sets.red.rho
    top = rho / (rho + 1)
    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH}" height="{HEIGHT}"'
        f' viewBox="0 0 {WIDTH} {HEIGHT}">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<rect x="{_f(_x(0))}" y="{_f(_y(1))}" width="{_f(_x(1) - _x(0))}" height="{_f(_y(0) - _y(1))}"'
        ' fill="none" stroke="black" stroke-width="1"/>',
    ]
    for i in range(6):
        v = i / 5
        out.append(f'<line x1="{_f(_x(v))}" y1="{_f(_y(0))}" x2="{_f(_x(v))}" y2="{_f(_y(0) + 5)}" stroke="black"/>')
        out.append(_text(_x(v), _y(0) + 18, f"{v:.1f}", size=11))
        out.append(f'<line x1="{_f(_x(0) - 5)}" y1="{_f(_y(v))}" x2="{_f(_x(0))}" y2="{_f(_y(v))}" stroke="black"/>')
        out.append(_text(_x(0) - 8, _y(v) + 4, f"{v:.1f}", size=11, anchor="end"))
    out.append(_text((_x(0) + _x(1)) / 2, HEIGHT - 14, "k", size=14))
    out.append(_text(18, (_y(0) + _y(1)) / 2, "γ", size=14))

    out.append(f'<line x1="{_f(_x(0))}" y1="{_f(_y(top))}" x2="{_f(_x(1))}" y2="{_f(_y(top))}"'
               ' stroke="black" stroke-dasharray="6,4"/>')
    out.append(_text(_x(0.02), _y(top) - 6, f"ρ/(ρ+1) = {top:.4f}", size=11, anchor="start"))

    for curve in (sets.green, sets.blue, sets.red):
        pts = " ".join(f"{_f(_x(k))},{_f(_y(g))}" for k, g in curve.points)
        out.append(f'<polyline fill="none" stroke="{COLORS[curve.which]}" stroke-width="2" points="{pts}"/>')

    ks = sets.red.ks
    green, blue, red = sets.green.gammas, sets.blue.gammas, sets.red.gammas
    mid = len(ks) // 2
    gap_gb = max(range(len(ks)), key=lambda i: blue[i] - green[i])
    gap_br = max(range(len(ks)), key=lambda i: red[i] - blue[i])
    low = max(range(len(ks)), key=lambda i: green[i])
    regions = [
        (ks[mid], (red[mid] + 1) / 2, _ordering_label("is", "ps", "fs")),
        (ks[gap_br], (red[gap_br] + blue[gap_br]) / 2, _ordering_label("is", "fs", "ps")),
        (ks[gap_gb], (blue[gap_gb] + green[gap_gb]) / 2, _ordering_label("fs", "is", "ps")),
        (ks[low], green[low] / 2, _ordering_label("fs", "ps", "is")),
    ]
    for k, g, label in regions:
        out.append(_text(_x(k), _y(g) + 4, label, size=11, extra=' class="region"'))

    lx, ly = _x(0.62), _y(0.97)
    out.append(f'<rect x="{_f(lx - 6)}" y="{_f(ly - 12)}" width="190" height="58" fill="white" stroke="black"/>')
    for n, which in enumerate(("A_r", "A_b", "A_g")):
        yy = ly + n * 17
        out.append(f'<line x1="{_f(lx)}" y1="{_f(yy - 4)}" x2="{_f(lx + 24)}" y2="{_f(yy - 4)}"'
                   f' stroke="{COLORS[which]}" stroke-width="2"/>')
        out.append(_text(lx + 30, yy, LEGEND[which], size=11, anchor="start"))
    out.append("</svg>")
    return "\n".join(out) + "\n"
