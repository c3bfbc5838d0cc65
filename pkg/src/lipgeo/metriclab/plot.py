"""Static SVG diagnostics: orthogonal 2-d projections of sampled links."""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .mesh import ScaleSamplePlan, sample_link
from .model import GermModel

WIDTH = HEIGHT = 400
MARGIN = 40


def polylines_svg(chains: Sequence[np.ndarray], axes: tuple[int, int] = (0, 1),
                  title: str = "") -> str:
    """Draw point chains projected to coordinates ``axes`` in a fixed square viewport."""
    pts = np.vstack([c[:, list(axes)] for c in chains])
    lo, hi = pts.min(axis=0), pts.max(axis=0)
    span = float(max(hi - lo)) or 1.0
    scale = (WIDTH - 2 * MARGIN) / span

    def xy(p):
        x = MARGIN + (p[0] - lo[0]) * scale
        y = HEIGHT - MARGIN - (p[1] - lo[1]) * scale
        return f"{x:.2f},{y:.2f}"

    lines = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}">',
        f'<text x="{MARGIN}" y="20" font-size="12">{title}</text>',
        f'<line x1="{MARGIN}" y1="{HEIGHT - MARGIN}" x2="{WIDTH - MARGIN}" y2="{HEIGHT - MARGIN}" stroke="grey"/>',
        f'<line x1="{MARGIN}" y1="{MARGIN}" x2="{MARGIN}" y2="{HEIGHT - MARGIN}" stroke="grey"/>',
        f'<text x="{WIDTH - MARGIN}" y="{HEIGHT - 10}" font-size="12">x{axes[0]}</text>',
        f'<text x="5" y="{MARGIN}" font-size="12">x{axes[1]}</text>',
    ]
    for c in chains:
        path = " ".join(xy(p) for p in c[:, list(axes)])
        lines.append(f'<polyline points="{path}" fill="none" stroke="black"/>')
    lines.append("</svg>")
    return "\n".join(lines) + "\n"


def link_svg(model: GermModel, t: float, plan: ScaleSamplePlan | None = None,
             axes: tuple[int, int] = (0, 1)) -> str:
    return polylines_svg(sample_link(model, t, plan), axes, f"{model.name} link at t={t:.3g}")
