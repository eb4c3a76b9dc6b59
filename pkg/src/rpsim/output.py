"""CSV and SVG emission.

CSV is the machine contract: one '#'-prefixed metadata block echoing the full
configuration, one header row, then data rows with every numeric field
printed at 12 significant digits.  Identical inputs produce byte-identical
files.  The SVG charts are presentational only -- self-contained polyline
plots for eyeballing a run without a plotting stack.
"""

import io

import numpy as np


def format_number(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return str(bool(x))
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return f"{float(x):.12g}"


def render_csv(columns, rows, meta=None, footer_comments=()) -> str:
    """Build the CSV text: metadata comments, header, rows, footer comments."""
    buf = io.StringIO()
    for key, value in (meta or {}).items():
        buf.write(f"# {key} = {value}\n")
    buf.write(",".join(columns) + "\n")
    for row in rows:
        buf.write(",".join(format_number(v) if not isinstance(v, str) else v
                           for v in row) + "\n")
    for comment in footer_comments:
        buf.write(f"# {comment}\n")
    return buf.getvalue()


def write_csv(path, columns, rows, meta=None, footer_comments=()):
    text = render_csv(columns, rows, meta, footer_comments)
    with open(path, "w", newline="\n") as fh:
        fh.write(text)
    return path


def _ticks(lo, hi, n=5):
    if hi <= lo:
        hi = lo + 1.0
    return np.linspace(lo, hi, n)


def svg_line_chart(path, x, y, title="", xlabel="", ylabel="",
                   width=720, height=440):
    """Minimal self-contained SVG polyline chart (axes, ticks, one series)."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.size != y.size or x.size < 2:
        raise ValueError("need two or more points to draw a line chart")
    ml, mr, mt, mb = 70, 20, 40, 50
    pw, ph = width - ml - mr, height - mt - mb
    x0, x1 = float(x.min()), float(x.max())
    y0, y1 = float(y.min()), float(y.max())
    if y1 - y0 < 1e-300:
        y0, y1 = y0 - 0.5, y1 + 0.5
    pad = 0.05 * (y1 - y0)
    y0, y1 = y0 - pad, y1 + pad

    def px(v):
        return ml + (v - x0) / (x1 - x0) * pw

    def py(v):
        return mt + ph - (v - y0) / (y1 - y0) * ph

    pts = " ".join(f"{px(a):.2f},{py(b):.2f}" for a, b in zip(x, y))
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" '
        f'height="{height}" viewBox="0 0 {width} {height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<text x="{width / 2:.0f}" y="24" text-anchor="middle" '
        f'font-family="sans-serif" font-size="15">{title}</text>',
    ]
    axis_style = 'stroke="black" stroke-width="1"'
    parts.append(f'<line x1="{ml}" y1="{mt + ph}" x2="{ml + pw}" '
                 f'y2="{mt + ph}" {axis_style}/>')
    parts.append(f'<line x1="{ml}" y1="{mt}" x2="{ml}" y2="{mt + ph}" '
                 f'{axis_style}/>')
    for tx in _ticks(x0, x1):
        parts.append(f'<line x1="{px(tx):.2f}" y1="{mt + ph}" '
                     f'x2="{px(tx):.2f}" y2="{mt + ph + 5}" {axis_style}/>')
        parts.append(f'<text x="{px(tx):.2f}" y="{mt + ph + 20}" '
                     f'text-anchor="middle" font-family="sans-serif" '
                     f'font-size="11">{tx:.4g}</text>')
    for ty in _ticks(y0, y1):
        parts.append(f'<line x1="{ml - 5}" y1="{py(ty):.2f}" x2="{ml}" '
                     f'y2="{py(ty):.2f}" {axis_style}/>')
        parts.append(f'<text x="{ml - 8}" y="{py(ty) + 4:.2f}" '
                     f'text-anchor="end" font-family="sans-serif" '
                     f'font-size="11">{ty:.4g}</text>')
    parts.append(f'<text x="{ml + pw / 2:.0f}" y="{height - 10}" '
                 f'text-anchor="middle" font-family="sans-serif" '
                 f'font-size="13">{xlabel}</text>')
    parts.append(f'<text x="18" y="{mt + ph / 2:.0f}" text-anchor="middle" '
                 f'font-family="sans-serif" font-size="13" '
                 f'transform="rotate(-90 18 {mt + ph / 2:.0f})">{ylabel}</text>')
    parts.append(f'<polyline points="{pts}" fill="none" stroke="#1f6fb2" '
                 f'stroke-width="1.5"/>')
    parts.append("</svg>")
    with open(path, "w", newline="\n") as fh:
        fh.write("\n".join(parts) + "\n")
    return path
