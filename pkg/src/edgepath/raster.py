"""Anti-aliased grayscale rasterization of drawings.

Ink is high: 0 is an empty pixel, 255 fully covered. Coverage of a pixel by
a stroke of width ``w`` is ``clip(w/2 + 0.5 - dist, 0, 1)`` where ``dist`` is
the distance from the pixel centre to the stroke's centre line; overlapping
objects composite as ``1 - prod(1 - coverage)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .drawing import Drawing

DEFAULT_WIDTH_PX = 1600


class DegenerateDrawingError(ValueError):
    pass


@dataclass(frozen=True)
class ViewTransform:
    """Uniform scale from drawing units to pixels, y axis pointing down."""

    xmin: float
    ymax: float
    scale: float
    pad: float
    width: int
    height: int

    @classmethod
    def fit(cls, points: np.ndarray, width_px: int = DEFAULT_WIDTH_PX, pad: float = 4.0) -> "ViewTransform":
        pts = np.asarray(points, dtype=np.float64).reshape(-1, 2)
        if len(pts) == 0:
            raise DegenerateDrawingError("cannot fit a view to an empty drawing")
        lo, hi = pts.min(axis=0), pts.max(axis=0)
        bw, bh = hi - lo
        span = bw if bw > 0 else bh
        if not span > 0:
            raise DegenerateDrawingError("all drawing points coincide")
        scale = (width_px - 2 * pad) / span
        height = int(math.ceil(bh * scale + 2 * pad - 1e-9))
        return cls(float(lo[0]), float(hi[1]), float(scale), float(pad), int(width_px), max(height, 1))

    def to_pixels(self, pts) -> np.ndarray:
        p = np.asarray(pts, dtype=np.float64)
        out = np.empty_like(p)
        out[..., 0] = self.pad + (p[..., 0] - self.xmin) * self.scale
        out[..., 1] = self.pad + (self.ymax - p[..., 1]) * self.scale
        return out


def fit_view(*drawings: Drawing, width_px: int = DEFAULT_WIDTH_PX, pad: float = 4.0) -> ViewTransform:
    """One transform covering every given drawing, so images are comparable."""
    pts = np.concatenate([d.all_points() for d in drawings]) if drawings else np.zeros((0, 2))
    return ViewTransform.fit(pts, width_px, pad)


@dataclass(frozen=True, eq=False)
class RasterImage:
    pixels: np.ndarray  # (height, width) uint8
    transform: ViewTransform

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    def binarize(self, gray_threshold: int = 1) -> np.ndarray:
        return self.pixels >= gray_threshold


def _segment_coverage(a: np.ndarray, b: np.ndarray, owner: np.ndarray, half_width: float, shape):
    """Candidate pixels and coverage for a batch of pixel-space segments.

    Walks the major axis one pixel at a time and tests a short run of pixels
    across it, which bounds the work by stroke length rather than bbox area.
    """
    h, w = shape
    reach = half_width + 0.5
    d = b - a
    xmajor = np.abs(d[:, 0]) >= np.abs(d[:, 1])
    # major / minor coordinates
    am = np.where(xmajor, a[:, 0], a[:, 1])
    bm = np.where(xmajor, b[:, 0], b[:, 1])
    an = np.where(xmajor, a[:, 1], a[:, 0])
    bn = np.where(xmajor, b[:, 1], b[:, 0])
    lo = np.floor(np.minimum(am, bm) - reach).astype(np.int64)
    hi = np.floor(np.maximum(am, bm) + reach).astype(np.int64)
    counts = hi - lo + 1
    seg = np.repeat(np.arange(len(a)), counts)
    starts = np.cumsum(counts) - counts
    major = lo[seg] + (np.arange(len(seg)) - starts[seg])
    centre = major + 0.5
    dm = bm - am
    tt = np.where(dm[seg] != 0, (centre - am[seg]) / np.where(dm[seg] != 0, dm[seg], 1.0), 0.0)
    tt = np.clip(tt, 0.0, 1.0)
    minor_c = an[seg] + tt * (bn[seg] - an[seg])
    run = int(math.ceil(reach * 1.5)) + 1
    offs = np.arange(-run, run + 1)
    minor = (np.floor(minor_c)[:, None] + offs[None, :]).astype(np.int64)
    segs = np.repeat(seg, len(offs))
    major = np.repeat(major, len(offs))
    minor = minor.ravel()
    x = np.where(xmajor[segs], major, minor)
    y = np.where(xmajor[segs], minor, major)
    keep = (x >= 0) & (x < w) & (y >= 0) & (y < h)
    x, y, segs = x[keep], y[keep], segs[keep]
    dist = _point_segment_distance(x + 0.5, y + 0.5, a[segs], b[segs])
    cov = np.clip(reach - dist, 0.0, 1.0)
    nz = cov > 0
    return y[nz] * w + x[nz], cov[nz], owner[segs[nz]]


def _point_segment_distance(px, py, a, b):
    d = b - a
    ll = d[:, 0] ** 2 + d[:, 1] ** 2
    safe = np.where(ll > 0, ll, 1.0)
    t = ((px - a[:, 0]) * d[:, 0] + (py - a[:, 1]) * d[:, 1]) / safe
    t = np.where(ll > 0, np.clip(t, 0.0, 1.0), 0.0)
    cx = a[:, 0] + t * d[:, 0]
    cy = a[:, 1] + t * d[:, 1]
    return np.hypot(px - cx, py - cy)


def _disk_coverage(centres: np.ndarray, radius: float, shape):
    h, w = shape
    reach = radius + 0.5
    r = int(math.ceil(reach)) + 1
    offs = np.arange(-r, r + 1)
    ox, oy = np.meshgrid(offs, offs)
    ox, oy = ox.ravel(), oy.ravel()
    base = np.floor(centres).astype(np.int64)
    x = (base[:, 0:1] + ox[None, :]).ravel()
    y = (base[:, 1:2] + oy[None, :]).ravel()
    owner = np.repeat(np.arange(len(centres)), len(ox))
    keep = (x >= 0) & (x < w) & (y >= 0) & (y < h)
    x, y, owner = x[keep], y[keep], owner[keep]
    dist = np.hypot(x + 0.5 - centres[owner, 0], y + 0.5 - centres[owner, 1])
    cov = np.clip(reach - dist, 0.0, 1.0)
    nz = cov > 0
    return y[nz] * w + x[nz], cov[nz], owner[nz]


def _composite(log_clear: np.ndarray, idx, cov, owner):
    """Fold per-object coverage (max within an object) into the running log-transparency."""
    if len(idx) == 0:
        return
    npix = log_clear.size
    key = owner.astype(np.int64) * npix + idx
    order = np.argsort(key, kind="stable")
    key, cov = key[order], cov[order]
    first = np.flatnonzero(np.r_[True, key[1:] != key[:-1]])
    cmax = np.maximum.reduceat(cov, first)
    pix = key[first] % npix
    np.add.at(log_clear, pix, np.log1p(-np.minimum(cmax, 1.0 - 1e-12)))


def _edge_layer(drawing: Drawing, transform: ViewTransform, line_width_px: float, edges=None) -> np.ndarray:
    """Flat log-transparency of the stroked edges."""
    shape = (transform.height, transform.width)
    log_clear = np.zeros(shape[0] * shape[1])
    ids = range(drawing.graph.edge_count) if edges is None else edges
    batch_a, batch_b, batch_o = [], [], []
    pending = 0

    def flush():
        if not batch_a:
            return
        a = np.concatenate(batch_a)
        b = np.concatenate(batch_b)
        o = np.concatenate(batch_o)
        _composite(log_clear, *_segment_coverage(a, b, o, line_width_px / 2.0, shape))
        batch_a.clear(), batch_b.clear(), batch_o.clear()

    for e in ids:
        p = transform.to_pixels(drawing.polylines[e])
        batch_a.append(p[:-1])
        batch_b.append(p[1:])
        batch_o.append(np.full(len(p) - 1, e, dtype=np.int64))
        pending += len(p)
        if pending > 50_000:
            flush()
            pending = 0
    flush()
    return log_clear


def _with_disks(log_clear, drawing, transform, vertex_diameter_px):
    out = log_clear.copy()
    if drawing.graph.vertex_count:
        centres = transform.to_pixels(drawing.layout.positions)
        _composite(out, *_disk_coverage(centres, vertex_diameter_px / 2.0, (transform.height, transform.width)))
    return out


def _image(log_clear, transform) -> RasterImage:
    ink = 1.0 - np.exp(log_clear)
    pixels = np.rint(ink * 255.0).clip(0, 255).astype(np.uint8).reshape(transform.height, transform.width)
    pixels.setflags(write=False)
    return RasterImage(pixels, transform)


def rasterize(
    drawing: Drawing,
    width_px: int = DEFAULT_WIDTH_PX,
    line_width_px: float = 1.0,
    vertex_diameter_px: float = 4.0,
    draw_vertices: bool = False,
    transform: ViewTransform | None = None,
    edges=None,
) -> RasterImage:
    """Render ``drawing`` to a grayscale image with ink accumulating toward 255.

    ``transform`` fixes the pixel mapping (share one between images that are
    compared); by default it is fitted to this drawing alone. ``edges``
    restricts stroking to a subset of edge ids.
    """
    if transform is None:
        transform = fit_view(drawing, width_px=width_px)
    log_clear = _edge_layer(drawing, transform, line_width_px, edges)
    if draw_vertices:
        log_clear = _with_disks(log_clear, drawing, transform, vertex_diameter_px)
    return _image(log_clear, transform)


def rasterize_both(drawing: Drawing, transform: ViewTransform, line_width_px: float = 1.0,
                   vertex_diameter_px: float = 4.0) -> tuple[RasterImage, RasterImage]:
    """The drawing without and with vertex disks, stroking the edges only once."""
    edges = _edge_layer(drawing, transform, line_width_px)
    return _image(edges, transform), _image(_with_disks(edges, drawing, transform, vertex_diameter_px), transform)
