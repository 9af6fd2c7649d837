"""Circle-configuration export: JSON tables and SVG via stereographic projection.

Projection is from the north pole ``(0, 0, 1)`` onto the equatorial plane,
``u -> (u1, u2) / (1 - u3)``.  A circle ``{u : c.u = cos r}`` not through
the pole maps to the circle

    center = -(c1, c2) / (c3 - d),    radius^2 = |center|^2 + (c3 + d) / (c3 - d)

with ``d = cos r``; through the pole (``c3 = d``) it becomes the line
``c1 x + c2 y = d``.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass

import numpy as np

from prl.circles import CircleConfiguration, SphericalCircle
from prl.errors import UnsupportedFormat

logger = logging.getLogger(__name__)

POLE_TOL = 1e-6
FORMATS = ("json", "svg")


def stereographic_point(u) -> np.ndarray:
    u = np.asarray(u, dtype=float)
    return u[..., :2] / (1.0 - u[..., 2:3])


@dataclass(frozen=True)
class PlanarImage:
    """Stereographic image of a spherical circle: a circle, or a line near the pole."""

    kind: str
    center: tuple = (0.0, 0.0)
    radius: float = 0.0
    normal: tuple = (0.0, 0.0)
    offset: float = 0.0


def stereographic_circle(circle: SphericalCircle, pole_tol=POLE_TOL) -> PlanarImage:
    c = circle.center
    d = np.cos(circle.radius)
    pole_gap = abs(np.arccos(np.clip(c[2], -1.0, 1.0)) - circle.radius)
    if pole_gap <= pole_tol:
        return PlanarImage("line", normal=(float(c[0]), float(c[1])), offset=float(d))
    den = c[2] - d
    center = -c[:2] / den
    r2 = float(center @ center + (c[2] + d) / den)
    return PlanarImage("circle", center=(float(center[0]), float(center[1])), radius=float(np.sqrt(max(r2, 0.0))))


def _sig(x: float) -> float:
    return float(f"{x:.10g}")


def _as_list(configs):
    if configs is None:
        return []
    if isinstance(configs, CircleConfiguration):
        return [("packing-0", configs)]
    if isinstance(configs, dict):
        return list(configs.items())
    return [(f"packing-{k}", cfg) for k, cfg in enumerate(configs)]


def export_json(configs) -> str:
    doc = {"packings": [
        {"name": name,
         "circles": [{"label": lab, "center": [_sig(v) for v in c.center], "radius": _sig(c.radius)}
                     for lab, c in zip(cfg.labels, cfg.circles)]}
        for name, cfg in _as_list(configs)
    ]}
    return json.dumps(doc, indent=2) + "\n"


def _clip_line(normal, offset, half):
    """Endpoints of ``n . X = offset`` inside the square ``[-half, half]^2``."""
    n = np.asarray(normal, dtype=float)
    nn = np.linalg.norm(n)
    if nn == 0.0:
        return None
    n, offset = n / nn, offset / nn
    base = n * offset
    direction = np.array([-n[1], n[0]])
    ts = []
    for axis in (0, 1):
        if abs(direction[axis]) > 1e-15:
            for bound in (-half, half):
                s = (bound - base[axis]) / direction[axis]
                p = base + s * direction
                if np.all(np.abs(p) <= half + 1e-9):
                    ts.append(s)
    if len(ts) < 2:
        return None
    p, q = base + min(ts) * direction, base + max(ts) * direction
    return p, q


def export_svg(configs, size=600, max_extent=8.0) -> str:
    """Overlay of one or more configurations, one stroke class per configuration."""
    items = _as_list(configs)
    images = []
    warnings = []
    for k, (name, cfg) in enumerate(items):
        for lab, circle in zip(cfg.labels, cfg.circles):
            img = stereographic_circle(circle)
            if img.kind == "line":
                msg = f"{name}/{lab}: circle passes within {POLE_TOL:g} of the projection pole; drawn as a clipped line"
                logger.warning(msg)
                warnings.append(msg)
            images.append((k, name, lab, img))
    extent = 1.2
    for _, _, _, img in images:
        if img.kind == "circle":
            extent = max(extent, abs(img.center[0]) + img.radius, abs(img.center[1]) + img.radius)
    half = min(extent * 1.05, max_extent)
    stroke = 2.0 * half / size
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" '
        f'viewBox="{-half:.6f} {-half:.6f} {2 * half:.6f} {2 * half:.6f}">',
        "<style>",
        f"  circle, line {{ fill: none; stroke-width: {stroke:.6g}; }}",
        "  .equator { stroke: #bbbbbb; stroke-dasharray: 0.02 0.02; }",
        "  .packing-0 { stroke: #1f77b4; }",
        "  .packing-1 { stroke: #d62728; }",
        "  .warning { fill: #d62728; font-size: 0.05px; }",
        "</style>",
        '<g transform="scale(1,-1)">',
        '<circle class="equator" cx="0" cy="0" r="1" />',
    ]
    for k, name, lab, img in images:
        cls = f"packing-{k}"
        if img.kind == "circle":
            out.append(f'<circle class="{cls}" data-packing="{name}" data-label="{lab}" '
                       f'cx="{img.center[0]:.10g}" cy="{img.center[1]:.10g}" r="{img.radius:.10g}" />')
        else:
            seg = _clip_line(img.normal, img.offset, half)
            if seg is not None:
                (x1, y1), (x2, y2) = seg
                out.append(f'<line class="{cls} clipped" data-packing="{name}" data-label="{lab}" '
                           f'x1="{x1:.10g}" y1="{y1:.10g}" x2="{x2:.10g}" y2="{y2:.10g}" />')
    out.append("</g>")
    for n, msg in enumerate(warnings):
        out.append(f'<text class="warning" x="{-half * 0.95:.6f}" y="{-half * 0.9 + n * 0.06 * half:.6f}">'
                   f"warning: {msg}</text>")
    out.append("</svg>")
    return "\n".join(out) + "\n"


def export_circles(configs, fmt="json") -> str:
    """Serialize circle configurations as ``"json"`` or ``"svg"``."""
    if fmt == "json":
        return export_json(configs)
    if fmt == "svg":
        return export_svg(configs)
    raise UnsupportedFormat(f"format {fmt!r} not in {FORMATS}")
