"""Dependency-free SVG rendering: error-vs-iteration curves on a log axis
and the three-color efficiency-region heat map."""

from __future__ import annotations

import math

import numpy as np

_PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b",
            "#17becf", "#e377c2"]
_REGION_COLORS = {"prs": "#8c5642", "drs": "#ff9e4a", "fbs_prox_f": "#f4a6c8"}

_FLOOR = 1e-16


def _svg_header(width, height):
    return (f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" '
            f'height="{height}" viewBox="0 0 {width} {height}">\n'
            f'<rect width="{width}" height="{height}" fill="white"/>\n')


def plot_traces(traces, bounds, output_path, title="errors vs iterations"):
    """Log-scale error curves: one solid polyline per trace, one dashed per
    theoretical bound, legend with labels and step-sizes.

    ``traces`` is a list of (label, errors) pairs and ``bounds`` a list of
    (label, errors) pairs rendered dashed; values are clamped at 1e-16
    before taking logs.  An empty input still produces a legend-only file.
    """
    width, height = 640, 420
    ml, mr, mt, mb = 60, 170, 30, 45
    plot_w, plot_h = width - ml - mr, height - mt - mb

    series = [(label, np.asarray(vals, dtype=float), False) for label, vals in traces]
    series += [(label, np.asarray(vals, dtype=float), True) for label, vals in bounds]

    parts = [_svg_header(width, height)]
    parts.append(f'<text x="{ml}" y="20" font-size="13" font-family="sans-serif">{title}</text>\n')
    parts.append(f'<rect x="{ml}" y="{mt}" width="{plot_w}" height="{plot_h}" '
                 'fill="none" stroke="black"/>\n')

    if series:
        n_max = max(len(vals) for _, vals, _ in series)
        all_vals = np.concatenate([np.maximum(vals, _FLOOR) for _, vals, _ in series])
        lo = math.floor(math.log10(all_vals.min()))
        hi = math.ceil(math.log10(all_vals.max()))
        if hi <= lo:
            hi = lo + 1

        def xpix(k):
            return ml + plot_w * (k / max(n_max - 1, 1))

        def ypix(v):
            t = (math.log10(max(v, _FLOOR)) - lo) / (hi - lo)
            return mt + plot_h * (1.0 - t)

        for dec in range(lo, hi + 1):
            y = ypix(10.0 ** dec)
            parts.append(f'<line x1="{ml}" y1="{y:.1f}" x2="{ml + plot_w}" y2="{y:.1f}" '
                         'stroke="#dddddd"/>\n')
            parts.append(f'<text x="{ml - 8}" y="{y + 4:.1f}" font-size="10" '
                         f'font-family="sans-serif" text-anchor="end">1e{dec}</text>\n')
        for frac in (0.0, 0.25, 0.5, 0.75, 1.0):
            k = frac * max(n_max - 1, 1)
            parts.append(f'<text x="{xpix(k):.1f}" y="{height - mb + 16}" font-size="10" '
                         f'font-family="sans-serif" text-anchor="middle">{int(round(k))}</text>\n')

        for i, (label, vals, dashed) in enumerate(series):
            color = _PALETTE[i % len(_PALETTE)]
            pts = " ".join(f"{xpix(k):.2f},{ypix(v):.2f}" for k, v in enumerate(vals))
            dash = ' stroke-dasharray="6,4"' if dashed else ""
            parts.append(f'<polyline points="{pts}" fill="none" stroke="{color}" '
                         f'stroke-width="1.5"{dash}/>\n')

    lx = width - mr + 10
    parts.append(f'<text x="{lx}" y="{mt + 4}" font-size="11" '
                 'font-family="sans-serif" font-weight="bold">legend</text>\n')
    for i, (label, _, dashed) in enumerate(series):
        color = _PALETTE[i % len(_PALETTE)]
        y = mt + 22 + 16 * i
        dash = ' stroke-dasharray="6,4"' if dashed else ""
        parts.append(f'<line x1="{lx}" y1="{y - 4}" x2="{lx + 24}" y2="{y - 4}" '
                     f'stroke="{color}" stroke-width="1.5"{dash}/>\n')
        parts.append(f'<text x="{lx + 30}" y="{y}" font-size="10" '
                     f'font-family="sans-serif">{label}</text>\n')
    parts.append('</svg>\n')
    with open(output_path, "w") as fh:
        fh.write("".join(parts))


def trace_series(result_traces, rates):
    """Build (label, values) pairs for plot_traces from named traces.

    ``rates`` maps each name to the contraction factor used for the dashed
    bound rate^k * error_0.
    """
    traces, bounds = [], []
    for name, trace in result_traces.items():
        tau = trace.step_size
        traces.append((f"{name} (tau={tau:.3g})", trace.errors))
        rate = rates.get(name)
        if rate is not None and len(trace.errors):
            k = np.arange(len(trace.errors))
            bounds.append((f"{name} bound", trace.errors[0] * rate ** k))
    return traces, bounds


def region_map_svg(region, output_path):
    """Heat map of the winning scheme per grid cell, with a legend."""
    n_rho = len(region.rhos)
    n_beta = len(region.betas)
    cell = max(2, min(12, 520 // max(n_beta, 1)))
    width = 80 + n_beta * cell + 150
    height = 60 + n_rho * cell + 40

    parts = [_svg_header(width, height)]
    parts.append('<text x="80" y="24" font-size="13" font-family="sans-serif">'
                 'best optimal rate per (beta, rho)</text>\n')
    for i in range(n_rho):
        # rho increases upward
        y = 40 + (n_rho - 1 - i) * cell
        for j in range(n_beta):
            color = _REGION_COLORS.get(region.winners[i][j].value, "#999999")
            parts.append(f'<rect x="{80 + j * cell}" y="{y}" width="{cell}" '
                         f'height="{cell}" fill="{color}"/>\n')
    parts.append(f'<text x="80" y="{40 + n_rho * cell + 16}" font-size="10" '
                 f'font-family="sans-serif">beta: {region.betas[0]:.3g} .. {region.betas[-1]:.3g}'
                 ' (log)</text>\n')
    parts.append(f'<text x="14" y="40" font-size="10" font-family="sans-serif" '
                 f'transform="rotate(90 14 40)">rho: {region.rhos[0]:.3g} .. '
                 f'{region.rhos[-1]:.3g}</text>\n')
    lx = 80 + n_beta * cell + 16
    parts.append(f'<text x="{lx}" y="44" font-size="11" font-family="sans-serif" '
                 'font-weight="bold">legend</text>\n')
    for k, (name, color) in enumerate(_REGION_COLORS.items()):
        y = 62 + 18 * k
        parts.append(f'<rect x="{lx}" y="{y - 10}" width="12" height="12" fill="{color}"/>\n')
        parts.append(f'<text x="{lx + 18}" y="{y}" font-size="10" '
                     f'font-family="sans-serif">{name}</text>\n')
    parts.append('</svg>\n')
    with open(output_path, "w") as fh:
        fh.write("".join(parts))


def rate_sweep_svg(curves, output_path, title="rate vs step-size"):
    """Rate-versus-tau curves, linear axes; curves is a list of
    (label, taus, values, dashed)."""
    width, height = 640, 420
    ml, mr, mt, mb = 60, 170, 30, 45
    plot_w, plot_h = width - ml - mr, height - mt - mb
    parts = [_svg_header(width, height)]
    parts.append(f'<text x="{ml}" y="20" font-size="13" font-family="sans-serif">{title}</text>\n')
    parts.append(f'<rect x="{ml}" y="{mt}" width="{plot_w}" height="{plot_h}" '
                 'fill="none" stroke="black"/>\n')
    if curves:
        t_lo = min(float(np.min(t)) for _, t, _, _ in curves)
        t_hi = max(float(np.max(t)) for _, t, _, _ in curves)
        span = t_hi - t_lo or 1.0

        def xpix(t):
            return ml + plot_w * (t - t_lo) / span

        def ypix(v):
            return mt + plot_h * (1.0 - min(max(v, 0.0), 1.0))

        for frac in (0.0, 0.5, 1.0):
            y = ypix(frac)
            parts.append(f'<line x1="{ml}" y1="{y:.1f}" x2="{ml + plot_w}" y2="{y:.1f}" '
                         'stroke="#dddddd"/>\n')
            parts.append(f'<text x="{ml - 8}" y="{y + 4:.1f}" font-size="10" '
                         f'font-family="sans-serif" text-anchor="end">{frac}</text>\n')
        for i, (label, taus, vals, dashed) in enumerate(curves):
            color = _PALETTE[i % len(_PALETTE)]
            pts = " ".join(f"{xpix(t):.2f},{ypix(v):.2f}" for t, v in zip(taus, vals))
            dash = ' stroke-dasharray="6,4"' if dashed else ""
            parts.append(f'<polyline points="{pts}" fill="none" stroke="{color}" '
                         f'stroke-width="1.5"{dash}/>\n')
            y = mt + 22 + 16 * i
            lx = width - mr + 10
            parts.append(f'<line x1="{lx}" y1="{y - 4}" x2="{lx + 24}" y2="{y - 4}" '
                         f'stroke="{color}" stroke-width="1.5"{dash}/>\n')
            parts.append(f'<text x="{lx + 30}" y="{y}" font-size="10" '
                         f'font-family="sans-serif">{label}</text>\n')
    parts.append('</svg>\n')
    with open(output_path, "w") as fh:
        fh.write("".join(parts))
