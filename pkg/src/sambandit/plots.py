"""Deterministic SVG line charts for run logs, sweep tables and success series.

Output is plain text built from the CSV alone, so regenerating from the same
file gives the same bytes.
"""

from __future__ import annotations

import csv
from collections import defaultdict
from pathlib import Path

from .errors import DatasetError

SCHEMAS = {
    "regret": ("trial", "t", "policy", "cumulative_regret"),
    "sweep": ("zeta", "policy", "normalized_regret"),
    "success": ("t", "success_rate"),
}
TITLES = {
    "regret": ("cumulative regret", "t"),
    "sweep": ("normalized regret", "zeta"),
    "success": ("success rate", "t"),
}
COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")
W, H, PAD = 640, 400, 60


def read_table(path):
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        return header, list(reader)


def detect_kind(header, path="csv") -> str:
    """Pick the schema the header matches; name the missing columns otherwise."""
    for kind, cols in SCHEMAS.items():
        if all(c in header for c in cols):
            return kind
    best = max(SCHEMAS, key=lambda k: sum(c in header for c in SCHEMAS[k]))
    missing = [c for c in SCHEMAS[best] if c not in header]
    raise DatasetError(f"{path}: does not match the {best} schema, missing column(s) "
                       f"{', '.join(missing)}")


def series_from(kind: str, rows) -> dict:
    """Map label -> sorted list of (x, y)."""
    acc = defaultdict(lambda: defaultdict(list))
    for r in rows:
        if kind == "regret":
            acc[r["policy"]][int(r["t"])].append(float(r["cumulative_regret"]))
        elif kind == "sweep":
            acc[r["policy"]][float(r["zeta"])].append(float(r["normalized_regret"]))
        else:
            acc[r.get("policy", "success")][int(r["t"])].append(float(r["success_rate"]))
    return {label: [(x, sum(v) / len(v)) for x, v in sorted(pts.items())]
            for label, pts in acc.items()}


def _num(v: float) -> str:
    return f"{v:.6g}"


def render_svg(series: dict, ylabel: str, xlabel: str) -> str:
    xs = [x for pts in series.values() for x, _ in pts]
    ys = [y for pts in series.values() for _, y in pts]
    x0, x1 = (min(xs), max(xs)) if xs else (0.0, 1.0)
    y0, y1 = (min(min(ys), 0.0), max(ys)) if ys else (0.0, 1.0)
    if x1 == x0:
        x1 = x0 + 1.0
    if y1 == y0:
        y1 = y0 + 1.0

    def px(x):
        return PAD + (x - x0) / (x1 - x0) * (W - 2 * PAD)

    def py(y):
        return H - PAD - (y - y0) / (y1 - y0) * (H - 2 * PAD)

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" '
        f'viewBox="0 0 {W} {H}">',
        f'<rect width="{W}" height="{H}" fill="white"/>',
        f'<line x1="{PAD}" y1="{H - PAD}" x2="{W - PAD}" y2="{H - PAD}" stroke="black"/>',
        f'<line x1="{PAD}" y1="{PAD}" x2="{PAD}" y2="{H - PAD}" stroke="black"/>',
        f'<text x="{W / 2}" y="{H - 15}" text-anchor="middle">{xlabel}</text>',
        f'<text x="15" y="{H / 2}" transform="rotate(-90 15 {H / 2})" '
        f'text-anchor="middle">{ylabel}</text>',
        f'<text x="{PAD}" y="{H - PAD + 18}" text-anchor="middle">{_num(x0)}</text>',
        f'<text x="{W - PAD}" y="{H - PAD + 18}" text-anchor="middle">{_num(x1)}</text>',
        f'<text x="{PAD - 6}" y="{H - PAD}" text-anchor="end">{_num(y0)}</text>',
        f'<text x="{PAD - 6}" y="{PAD}" text-anchor="end">{_num(y1)}</text>',
    ]
    for i, label in enumerate(sorted(series)):
        color = COLORS[i % len(COLORS)]
        pts = " ".join(f"{px(x):.2f},{py(y):.2f}" for x, y in series[label])
        out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{pts}"/>')
        out.append(f'<text x="{W - PAD + 4}" y="{PAD + 16 * i}" fill="{color}">{label}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def emit_plots(csv_path, out_dir=None) -> Path:
    """Render one chart for ``csv_path`` and return the SVG path.

    A zero-byte or header-only file yields empty axes.
    """
    csv_path = Path(csv_path)
    out = Path(out_dir) if out_dir is not None else csv_path.parent
    out.mkdir(parents=True, exist_ok=True)
    header, rows = read_table(csv_path)
    if not header:
        kind, series = "empty", {}
        ylabel, xlabel = "value", "t"
    else:
        kind = detect_kind(header, csv_path)
        series = series_from(kind, rows)
        ylabel, xlabel = TITLES[kind]
    target = out / f"{csv_path.stem}.svg"
    target.write_text(render_svg(series, ylabel, xlabel), encoding="utf-8")
    return target
