"""Report serialization: JSON, CSV and a self-contained SVG score chart."""

from __future__ import annotations

import json
import math
from xml.sax.saxutils import escape

from .analysis import Report

CSV_COLUMNS = ("rank", "dmu", "ka_eps", "ka0", "technically_efficient", "kam_efficient")


def report_to_json(report: Report) -> str:
    return json.dumps(report.to_dict(), indent=2, allow_nan=False) + "\n"


def report_to_csv(report: Report) -> str:
    lines = [",".join(CSV_COLUMNS)]
    for r in report.ranking:
        lines.append(
            f"{r.rank},{r.dmu},{r.ka_eps:.6f},{r.ka0:.6f},"
            f"{str(r.technically_efficient).lower()},{str(r.kam_efficient).lower()}"
        )
    return "\n".join(lines) + "\n"


def render_svg_chart(report: Report, title: str | None = None) -> str:
    """Bar chart of ka_eps in ranking order (most efficient first)."""
    rows = report.ranking
    scores = [r.ka_eps for r in rows]
    hi = max(1.0, max(scores))
    # axis floor: two-decimal floor of the lowest score, at least 0.01 below the top
    lo = max(0.0, min(math.floor(min(scores) * 100) / 100, hi - 0.01))

    bar_w, gap = 22, 6
    left, right, top, bottom = 64, 16, 40, 90
    plot_h = 300
    plot_w = len(rows) * (bar_w + gap) + gap
    width = left + plot_w + right
    height = top + plot_h + bottom

    def ypos(v: float) -> float:
        return top + plot_h * (hi - v) / (hi - lo)

    if title is None:
        title = "KAM efficiency scores, sorted"
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="11">',
        f'<rect x="0" y="0" width="{width}" height="{height}" fill="#ffffff"/>',
        f'<text x="{width / 2:.1f}" y="22" text-anchor="middle" font-size="14">{escape(title)}</text>',
    ]
    ticks = 5
    for t in range(ticks + 1):
        v = lo + (hi - lo) * t / ticks
        y = ypos(v)
        out.append(
            f'<line x1="{left}" y1="{y:.2f}" x2="{left + plot_w}" y2="{y:.2f}" '
            f'stroke="#dddddd" stroke-width="1"/>'
        )
        out.append(
            f'<text x="{left - 6}" y="{y + 4:.2f}" text-anchor="end">{v:.4f}</text>'
        )
    for pos, r in enumerate(rows):
        x = left + gap + pos * (bar_w + gap)
        y = ypos(r.ka_eps)
        h = top + plot_h - y
        fill = "#2b6cb0" if r.kam_efficient else ("#90cdf4" if r.technically_efficient else "#cbd5e0")
        out.append(
            f'<rect class="bar" data-dmu="{escape(r.dmu)}" data-rank="{r.rank}" '
            f'x="{x}" y="{y:.2f}" width="{bar_w}" height="{max(h, 0.0):.2f}" fill="{fill}">'
            f"<title>{escape(r.dmu)}: {r.ka_eps:.6f}</title></rect>"
        )
        lx = x + bar_w / 2
        ly = top + plot_h + 8
        out.append(
            f'<text x="{lx:.1f}" y="{ly}" text-anchor="end" '
            f'transform="rotate(-60 {lx:.1f} {ly})">{escape(r.dmu)}</text>'
        )
    out.append(
        f'<line x1="{left}" y1="{top}" x2="{left}" y2="{top + plot_h}" stroke="#000000"/>'
    )
    out.append(
        f'<line x1="{left}" y1="{top + plot_h}" x2="{left + plot_w}" y2="{top + plot_h}" '
        f'stroke="#000000"/>'
    )
    out.append("</svg>")
    return "\n".join(out) + "\n"
