"""SVG and raster output: plain drawings, colour-mapped edges, heatmaps.

Colour tables are Fabio Crameri's romaO (cyclic) and batlow (sequential),
256 entries each, shipped as CSV under ``edgepath/data`` (MIT licence in
``LICENSE-colormaps.txt``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from functools import lru_cache
from importlib import resources
from typing import Literal, Sequence

import numpy as np

from .drawing import Drawing
from .raster import DEFAULT_WIDTH_PX, ViewTransform, fit_view, rasterize

Mode = Literal["plain", "angle-colormap", "distortion-colormap"]


@dataclass(frozen=True)
class RenderStyle:
    width_px: int = DEFAULT_WIDTH_PX
    line_width_px: float = 1.0
    vertex_diameter_px: float = 4.0
    mode: Mode = "plain"
    background: Literal["white", "black"] = "white"
    draw_vertices: bool = True
    directed_angles: bool = False

    def __post_init__(self):
        if self.width_px <= 0 or self.line_width_px <= 0 or self.vertex_diameter_px < 0:
            raise ValueError("render dimensions must be positive")
        if self.mode not in ("plain", "angle-colormap", "distortion-colormap"):
            raise ValueError(f"unknown render mode {self.mode!r}")
        if self.background not in ("white", "black"):
            raise ValueError(f"unknown background {self.background!r}")


@lru_cache(maxsize=None)
def palette(name: str) -> np.ndarray:
    """``(256, 3)`` RGB table in 0..1 for ``"romaO"`` or ``"batlow"``."""
    text = resources.files("edgepath").joinpath("data", f"{name}.csv").read_text()
    table = np.array([[float(v) for v in line.split(",")] for line in text.splitlines() if line.strip()])
    table.setflags(write=False)
    return table


def _rgb(row) -> tuple[int, int, int]:
    return tuple(int(round(255 * c)) for c in row)


def angle_color(angle: float, directed: bool = False) -> tuple[int, int, int]:
    """Cyclic colour for an edge direction; undirected angles wrap at pi."""
    period = 2 * math.pi if directed else math.pi
    frac = math.fmod(angle, period) / period
    if frac < 0:
        frac += 1.0
    idx = int(frac * 256) % 256
    return _rgb(palette("romaO")[idx])


def sequential_color(value: float, vmin: float, vmax: float) -> tuple[int, int, int]:
    if vmax <= vmin:
        idx = 0
    else:
        idx = int(round((value - vmin) / (vmax - vmin) * 255))
        idx = min(max(idx, 0), 255)
    return _rgb(palette("batlow")[idx])


def _hex(rgb) -> str:
    return "#{:02x}{:02x}{:02x}".format(*rgb)


def _fmt(v: float) -> str:
    s = f"{v:.3f}".rstrip("0").rstrip(".")
    return "0" if s in ("-0", "") else s


def straight_angles(drawing: Drawing) -> np.ndarray:
    ea = drawing.graph.edge_array
    if len(ea) == 0:
        return np.zeros(0)
    d = drawing.layout.positions[ea[:, 1]] - drawing.layout.positions[ea[:, 0]]
    return np.arctan2(d[:, 1], d[:, 0])


def render_svg(drawing: Drawing, style: RenderStyle | None = None, *,
               transform: ViewTransform | None = None,
               edge_values: Sequence[float] | None = None,
               value_range: tuple[float, float] | None = None) -> str:
    """SVG document with one ``<path>`` per edge (id order) then one circle per vertex.

    ``edge_values`` feed the distortion colour map; ``value_range`` fixes its
    normalisation so several drawings share one scale.
    """
    style = style or RenderStyle()
    view = transform or fit_view(drawing, width_px=style.width_px)
    bg, ink = ("#ffffff", "#000000") if style.background == "white" else ("#000000", "#ffffff")
    if style.mode == "angle-colormap":
        colors = [_hex(angle_color(a, style.directed_angles)) for a in straight_angles(drawing)]
    elif style.mode == "distortion-colormap":
        if edge_values is None:
            from .metrics import distortion

            edge_values = distortion(drawing).per_edge
        vals = np.asarray(edge_values, dtype=float)
        lo, hi = value_range if value_range is not None else (
            (float(vals.min()), float(vals.max())) if len(vals) else (0.0, 0.0))
        colors = [_hex(sequential_color(v, lo, hi)) for v in vals]
    else:
        colors = [ink] * drawing.graph.edge_count
    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{view.width}" height="{view.height}" '
        f'viewBox="0 0 {view.width} {view.height}">',
        f'<rect width="{view.width}" height="{view.height}" fill="{bg}"/>',
        f'<g fill="none" stroke-width="{_fmt(style.line_width_px)}" stroke-linecap="round" stroke-linejoin="round">',
    ]
    for e, pl in enumerate(drawing.polylines):
        px = view.to_pixels(pl)
        d = "M" + " L".join(f"{_fmt(x)},{_fmt(y)}" for x, y in px)
        out.append(f'<path id="e{e}" stroke="{colors[e]}" d="{d}"/>')
    out.append("</g>")
    if style.draw_vertices:
        r = _fmt(style.vertex_diameter_px / 2)
        out.append(f'<g fill="{ink}">')
        for x, y in view.to_pixels(drawing.layout.positions):
            out.append(f'<circle cx="{_fmt(x)}" cy="{_fmt(y)}" r="{r}"/>')
        out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"


def distortion_heatmap(drawings: Sequence[Drawing], per_edge_distortions: Sequence[Sequence[float]] | None = None,
                       style: RenderStyle | None = None) -> list[str]:
    """One SVG per drawing, coloured by per-edge distortion on a shared min/max scale."""
    if not drawings:
        raise ValueError("need at least one drawing")
    if per_edge_distortions is None:
        from .metrics import distortion

        per_edge_distortions = [distortion(d).per_edge for d in drawings]
    vals = [np.asarray(v, dtype=float) for v in per_edge_distortions]
    nonempty = [v for v in vals if len(v)]
    lo = min(float(v.min()) for v in nonempty) if nonempty else 1.0
    hi = max(float(v.max()) for v in nonempty) if nonempty else 1.0
    style = replace(style or RenderStyle(), mode="distortion-colormap")
    view = fit_view(*drawings, width_px=style.width_px)
    return [render_svg(d, style, transform=view, edge_values=v, value_range=(lo, hi))
            for d, v in zip(drawings, vals)]


def ambiguity_heatmap(cell_counts: np.ndarray, global_max: int, cell_px: int = 1) -> np.ndarray:
    """Grayscale image, 255 * count / global_max per cell, each cell ``cell_px`` square."""
    counts = np.asarray(cell_counts)
    if counts.size and global_max < counts.max():
        raise ValueError(f"global_max {global_max} is below the largest count {counts.max()}")
    if global_max <= 0:
        img = np.zeros(counts.shape, dtype=np.uint8)
    else:
        img = np.rint(255.0 * counts / global_max).astype(np.uint8)
    if cell_px > 1:
        img = np.repeat(np.repeat(img, cell_px, axis=0), cell_px, axis=1)
    return img


def raster_image(drawing: Drawing, style: RenderStyle | None = None,
                 transform: ViewTransform | None = None) -> np.ndarray:
    """Grayscale picture of ``drawing`` through the metrics rasterizer (dark ink on white)."""
    style = style or RenderStyle()
    img = rasterize(drawing, style.width_px, style.line_width_px, style.vertex_diameter_px,
                    draw_vertices=style.draw_vertices, transform=transform).pixels
    return img.copy() if style.background == "black" else (255 - img)


def write_pgm(path, image: np.ndarray) -> None:
    img = np.asarray(image, dtype=np.uint8)
    if img.ndim != 2:
        raise ValueError("PGM needs a 2-D grayscale array")
    with open(path, "wb") as fh:
        fh.write(f"P5\n{img.shape[1]} {img.shape[0]}\n255\n".encode("ascii"))
        fh.write(np.ascontiguousarray(img).tobytes())


def read_pgm(path) -> np.ndarray:
    with open(path, "rb") as fh:
        data = fh.read()
    fields, pos = [], 0
    while len(fields) < 4:
        while data[pos:pos + 1].isspace():
            pos += 1
        end = pos
        while not data[end:end + 1].isspace():
            end += 1
        fields.append(data[pos:end])
        pos = end
    if fields[0] != b"P5":
        raise ValueError("not a binary PGM file")
    w, h, maxval = (int(f) for f in fields[1:])
    if maxval != 255:
        raise ValueError("only 8-bit PGM is supported")
    # exactly one whitespace byte separates the header from the raster
    return np.frombuffer(data[pos + 1: pos + 1 + w * h], dtype=np.uint8).reshape(h, w)


def write_png(path, image: np.ndarray) -> None:
    """PNG output; needs Pillow (``pip install edgepath[png]``)."""
    try:
        from PIL import Image
    except ImportError as exc:  # pragma: no cover - optional dependency
        raise RuntimeError("PNG output requires Pillow; write PGM instead") from exc
    Image.fromarray(np.asarray(image, dtype=np.uint8)).save(path)


def write_image(path, image: np.ndarray) -> None:
    if str(path).lower().endswith(".png"):
        write_png(path, image)
    else:
        write_pgm(path, image)
