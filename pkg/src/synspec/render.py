"""Text and SVG renderings of chart documents.

Both renderers take the dictionary produced by :func:`synspec.sseq.chart_json`,
so shipped fixtures can be drawn as well as freshly computed charts.  Stems run
rightward and filtration upward.  A copy of Z is a square, a cyclic group of
order p a dot, and a larger cyclic group a dot labelled with its order.
"""

from __future__ import annotations

from collections import defaultdict
from xml.sax.saxutils import escape

UNIT = 28
MARGIN = 36
COLORS = {"black": "#000000", "blue": "#1f4fd8", "red": "#c8201e", "orange": "#e58a00"}


def _cells(doc: dict) -> dict:
    cells = defaultdict(list)
    for d in doc["dots"]:
        for order in d["group"]:
            cells[(d["stem"], d["filtration"])].append((order, d["color"]))
    for v in cells.values():
        v.sort(key=lambda x: (x[1], x[0]))
    return cells


def _symbol(order: int, p: int) -> str:
    if order == 0:
        return "Z"
    return "o" if order == p else str(order)


def render_text(doc: dict) -> str:
    (n_lo, n_hi), (f_lo, f_hi) = doc["window"]["stems"], doc["window"]["filtrations"]
    p = doc["prime"]
    cells = _cells(doc)
    text = {k: ",".join(_symbol(o, p) for o, _ in v) for k, v in cells.items()}
    width = max([len(t) for t in text.values()] + [len(str(n_hi)), len(str(n_lo)), 1]) + 1
    label_w = max(len(str(f_hi)), len(str(f_lo))) + 1
    lines = [f"{doc['theory']} chart at p={p}, page {doc['page']}"]
    for s in range(f_hi, f_lo - 1, -1):
        row = "".join(text.get((n, s), ".").rjust(width) for n in range(n_lo, n_hi + 1))
        lines.append(str(s).rjust(label_w) + " |" + row)
    lines.append(" " * label_w + " +" + "-" * (width * (n_hi - n_lo + 1)))
    lines.append(" " * (label_w + 2) + "".join(str(n).rjust(width) for n in range(n_lo, n_hi + 1)))
    for d in doc["differentials"]:
        lines.append(f"d{d['r']} from ({d['n']}, {d['s']}) to ({d['n'] - 1}, {d['s'] + d['r']}), rank {d['rank']}")
    for e in doc["extensions"]:
        kind = "exotic " if e["exotic"] else ""
        lines.append(f"{kind}{e['op']}-extension from ({e['from'][0]}, {e['from'][1]}) to ({e['to'][0]}, {e['to'][1]})")
    return "\n".join(lines) + "\n"


def render_svg(doc: dict) -> str:
    (n_lo, n_hi), (f_lo, f_hi) = doc["window"]["stems"], doc["window"]["filtrations"]
    p = doc["prime"]
    w = MARGIN * 2 + UNIT * (n_hi - n_lo + 1)
    h = MARGIN * 2 + UNIT * (f_hi - f_lo + 1)

    def xy(n: float, s: float) -> tuple[float, float]:
        return MARGIN + UNIT * (n - n_lo + 0.5), MARGIN + UNIT * (f_hi - s + 0.5)

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">',
        f'<title>{escape(doc["theory"])} chart at p={p}, page {escape(doc["page"])}</title>',
        f'<rect width="{w}" height="{h}" fill="#ffffff"/>',
    ]
    for n in range(n_lo, n_hi + 1):
        x, _ = xy(n, f_lo)
        out.append(f'<text x="{x:.1f}" y="{h - MARGIN / 3:.1f}" font-size="10" text-anchor="middle">{n}</text>')
    for s in range(f_lo, f_hi + 1):
        _, y = xy(n_lo, s)
        out.append(f'<text x="{MARGIN / 2:.1f}" y="{y + 3:.1f}" font-size="10" text-anchor="middle">{s}</text>')
    for d in doc["differentials"]:
        (x1, y1), (x2, y2) = xy(d["n"], d["s"]), xy(d["n"] - 1, d["s"] + d["r"])
        out.append(f'<line x1="{x1:.1f}" y1="{y1:.1f}" x2="{x2:.1f}" y2="{y2:.1f}" stroke="#555555" stroke-width="1"/>')
    for e in doc["extensions"]:
        (x1, y1), (x2, y2) = xy(*e["from"]), xy(*e["to"])
        color = COLORS["orange"] if e["exotic"] else COLORS["black"]
        out.append(f'<path d="M {x1:.1f} {y1:.1f} Q {(x1 + x2) / 2 + UNIT / 3:.1f} {(y1 + y2) / 2:.1f} '
                   f'{x2:.1f} {y2:.1f}" fill="none" stroke="{color}" stroke-width="1.2" stroke-dasharray="3 2"/>')
    for (n, s), items in sorted(_cells(doc).items()):
        cx, cy = xy(n, s)
        k = len(items)
        for i, (order, color) in enumerate(items):
            x = cx + (i - (k - 1) / 2) * 7
            fill = COLORS.get(color, COLORS["black"])
            if order == 0:
                out.append(f'<rect x="{x - 4:.1f}" y="{cy - 4:.1f}" width="8" height="8" fill="{fill}"/>')
            else:
                out.append(f'<circle cx="{x:.1f}" cy="{cy:.1f}" r="3" fill="{fill}"/>')
                if order != p:
                    out.append(f'<text x="{x + 4:.1f}" y="{cy - 4:.1f}" font-size="8">{order}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
