"""Quality metrics for edge drawings: ink reduction, distortion, ambiguity."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .drawing import Drawing
from .graph import Graph, bfs_hops
from .raster import DEFAULT_WIDTH_PX, RasterImage, ViewTransform, fit_view, rasterize_both

log = logging.getLogger(__name__)

ALIGNED, ANTI_ALIGNED = "aligned", "anti-aligned"
MAX_EDGES_PER_WINDOW = 512


@dataclass(frozen=True)
class AmbiguityConfig:
    angle_threshold_theta: float = 7.5
    grid_cell_px: int = 8
    window_cells: int = 3
    delta_range: tuple[int, ...] = (1, 2, 3, 4, 5)
    width_px: int = DEFAULT_WIDTH_PX
    proximity_epsilon: float | None = None  # drawing units; None means one grid cell

    def __post_init__(self):
        if not 0 < self.angle_threshold_theta < 90:
            raise ValueError("angle_threshold_theta must lie in (0, 90) degrees")
        if self.grid_cell_px <= 0:
            raise ValueError("grid_cell_px must be positive")
        if self.window_cells <= 0 or self.window_cells % 2 == 0:
            raise ValueError("window_cells must be a positive odd integer")
        if not self.delta_range or min(self.delta_range) < 1:
            raise ValueError("delta_range must hold hop thresholds >= 1")
        object.__setattr__(self, "delta_range", tuple(sorted(set(int(d) for d in self.delta_range))))

    @property
    def theta_rad(self) -> float:
        return math.radians(self.angle_threshold_theta)

    def cell_size(self, transform: ViewTransform) -> float:
        """Grid cell edge in pixels. An explicit epsilon (drawing units) overrides ``grid_cell_px``."""
        if self.proximity_epsilon is not None:
            return self.proximity_epsilon * transform.scale
        return float(self.grid_cell_px)


# -- ink ---------------------------------------------------------------------


def ink_reduction(bundled: RasterImage, baseline: RasterImage, gray_threshold: int = 1) -> float:
    """Occupied pixels of ``bundled`` over occupied pixels of ``baseline``."""
    if bundled.pixels.shape != baseline.pixels.shape:
        raise ValueError(f"image sizes differ: {bundled.pixels.shape} vs {baseline.pixels.shape}")
    if not 0 <= gray_threshold <= 255:
        raise ValueError("gray_threshold must lie in 0..255")
    denom = int(np.count_nonzero(baseline.binarize(gray_threshold)))
    if denom == 0:
        raise ValueError("baseline image has no occupied pixels")
    return int(np.count_nonzero(bundled.binarize(gray_threshold))) / denom


# -- distortion --------------------------------------------------------------


@dataclass(frozen=True)
class DistortionResult:
    mean: float
    median: float
    per_edge: np.ndarray


def distortion(drawing: Drawing) -> DistortionResult:
    """Per-edge curve length over endpoint distance, with mean and median."""
    pos = drawing.layout.positions
    per = np.empty(drawing.graph.edge_count)
    for e, (s, t) in enumerate(drawing.graph.edges):
        straight = float(np.hypot(*(pos[t] - pos[s])))
        if straight == 0.0:
            raise ValueError(f"edge {e} has zero Euclidean length")
        d = np.diff(drawing.polylines[e], axis=0)
        per[e] = float(np.hypot(d[:, 0], d[:, 1]).sum()) / straight
    if len(per) == 0:
        return DistortionResult(1.0, 1.0, per)
    srt = np.sort(per)
    n = len(srt)
    median = float(srt[n // 2]) if n % 2 else float(0.5 * (srt[n // 2 - 1] + srt[n // 2]))
    return DistortionResult(float(per.mean()), median, per)


# -- ambiguity ---------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class AmbiguityGrid:
    """Per (cell, edge) circular-mean direction of the edge's segments in that cell.

    Arrays are parallel and sorted by (cell_y, cell_x, edge). Angles are in
    ``[0, 2*pi)``, measured in drawing coordinates, following each polyline
    from source to target.
    """

    shape: tuple[int, int]  # (rows, cols)
    cell_x: np.ndarray
    cell_y: np.ndarray
    edge: np.ndarray
    angle: np.ndarray
    cell_px: float

    def cells(self) -> dict[tuple[int, int], dict[int, float]]:
        out: dict[tuple[int, int], dict[int, float]] = {}
        for cx, cy, e, a in zip(self.cell_x.tolist(), self.cell_y.tolist(), self.edge.tolist(), self.angle.tolist()):
            out.setdefault((cx, cy), {})[e] = a
        return out


def _segment_cells(a: np.ndarray, b: np.ndarray):
    """Cells (grid units) crossed by each segment; returns (segment index, cx, cy).

    A segment is split at every grid line it crosses; each piece lies in one
    cell, located by its midpoint.
    """
    d = b - a
    pieces_seg, pieces_t = [np.arange(len(a)), np.arange(len(a))], [np.zeros(len(a)), np.ones(len(a))]
    for axis in (0, 1):
        lo = np.minimum(a[:, axis], b[:, axis])
        hi = np.maximum(a[:, axis], b[:, axis])
        first = np.floor(lo).astype(np.int64) + 1
        last = np.ceil(hi).astype(np.int64) - 1
        cnt = np.maximum(last - first + 1, 0)
        seg = np.repeat(np.arange(len(a)), cnt)
        starts = np.cumsum(cnt) - cnt
        line = first[seg] + (np.arange(len(seg)) - starts[seg])
        t = (line - a[seg, axis]) / d[seg, axis]
        pieces_seg.append(seg)
        pieces_t.append(t)
    seg = np.concatenate(pieces_seg)
    t = np.concatenate(pieces_t)
    order = np.lexsort((t, seg))
    seg, t = seg[order], t[order]
    same = seg[1:] == seg[:-1]
    t0, t1, s = t[:-1][same], t[1:][same], seg[:-1][same]
    real = (t1 - t0) > 1e-12
    t0, t1, s = t0[real], t1[real], s[real]
    tm = 0.5 * (t0 + t1)
    mid = a[s] + tm[:, None] * d[s]
    cells = np.floor(mid).astype(np.int64)
    return s, cells[:, 0], cells[:, 1]


def _group_mean_angle(keys: np.ndarray, cos: np.ndarray, sin: np.ndarray):
    """Circular mean per unique key; returns (unique keys, angle in [0, 2*pi))."""
    uniq, inv = np.unique(keys, return_inverse=True)
    c = np.bincount(inv, weights=cos, minlength=len(uniq))
    s = np.bincount(inv, weights=sin, minlength=len(uniq))
    return uniq, np.mod(np.arctan2(s, c), 2 * np.pi)


def build_ambiguity_grid(drawing: Drawing, config: AmbiguityConfig | None = None,
                         transform: ViewTransform | None = None) -> AmbiguityGrid:
    config = config or AmbiguityConfig()
    if transform is None:
        transform = fit_view(drawing, width_px=config.width_px)
    cell = config.cell_size(transform)
    cols = int(math.ceil(transform.width / cell))
    rows = int(math.ceil(transform.height / cell))
    a_all, b_all, owner, ang = [], [], [], []
    for e, pl in enumerate(drawing.polylines):
        d = np.diff(pl, axis=0)
        nonzero = (d[:, 0] != 0) | (d[:, 1] != 0)
        px = transform.to_pixels(pl) / cell
        a_all.append(px[:-1][nonzero])
        b_all.append(px[1:][nonzero])
        owner.append(np.full(int(nonzero.sum()), e, dtype=np.int64))
        ang.append(np.arctan2(d[nonzero, 1], d[nonzero, 0]))
    if not a_all or sum(len(x) for x in a_all) == 0:
        empty = np.zeros(0, dtype=np.int64)
        return AmbiguityGrid((rows, cols), empty, empty, empty, np.zeros(0), cell)
    a, b = np.concatenate(a_all), np.concatenate(b_all)
    owner, ang = np.concatenate(owner), np.concatenate(ang)
    seg, cx, cy = _segment_cells(a, b)
    cx = np.clip(cx, 0, cols - 1)
    cy = np.clip(cy, 0, rows - 1)
    e = owner[seg]
    n_e = max(drawing.graph.edge_count, 1)
    keys = (cy * cols + cx) * n_e + e
    uniq, mean = _group_mean_angle(keys, np.cos(ang[seg]), np.sin(ang[seg]))
    cell_id, edge = np.divmod(uniq, n_e)
    cy_u, cx_u = np.divmod(cell_id, cols)
    return AmbiguityGrid((rows, cols), cx_u, cy_u, edge, mean, cell)


@dataclass(frozen=True)
class AmbiguousPair:
    a: int
    b: int
    window: tuple[int, int]  # (col, row) of the window's top-left cell
    orientation: str


def _acute_and_orientation(alpha: np.ndarray, beta: np.ndarray):
    dd = np.mod(np.abs(alpha - beta), 2 * np.pi)
    dd = np.minimum(dd, 2 * np.pi - dd)  # directed difference in [0, pi]
    acute = np.minimum(dd, np.pi - dd)  # undirected crossing angle in [0, pi/2]
    return acute, dd < np.pi / 2


def window_aggregate(grid: AmbiguityGrid, window_cells: int):
    """Circular-mean angle of every edge over every window position.

    Windows are ``window_cells`` square, stride 1, fully inside the grid.
    Returns (window col, window row, edge, angle) sorted by row, col, edge,
    plus the number of window columns and rows.
    """
    rows, cols = grid.shape
    wcols = max(cols - window_cells + 1, 1)
    wrows = max(rows - window_cells + 1, 1)
    if len(grid.edge) == 0:
        z = np.zeros(0, dtype=np.int64)
        return z, z, z, np.zeros(0), wcols, wrows
    cos, sin = np.cos(grid.angle), np.sin(grid.angle)
    wx_l, wy_l, e_l, c_l, s_l = [], [], [], [], []
    for oy in range(window_cells):
        for ox in range(window_cells):
            wx = grid.cell_x - ox
            wy = grid.cell_y - oy
            ok = (wx >= 0) & (wx < wcols) & (wy >= 0) & (wy < wrows)
            wx_l.append(wx[ok]), wy_l.append(wy[ok]), e_l.append(grid.edge[ok])
            c_l.append(cos[ok]), s_l.append(sin[ok])
    wx, wy, e = np.concatenate(wx_l), np.concatenate(wy_l), np.concatenate(e_l)
    n_e = int(grid.edge.max()) + 1
    keys = (wy * wcols + wx) * n_e + e
    uniq, ang = _group_mean_angle(keys, np.concatenate(c_l), np.concatenate(s_l))
    win, edge = np.divmod(uniq, n_e)
    wrow, wcol = np.divmod(win, wcols)
    return wcol, wrow, edge, ang, wcols, wrows


def _window_pairs(lo: np.ndarray, size: np.ndarray):
    """Index pairs ``i < j`` within each run ``lo[g] .. lo[g] + size[g]``, run by run."""
    total = int(size.sum())
    run_start = np.repeat(np.cumsum(size) - size, size)
    pos = np.arange(total) - run_start
    elem = np.repeat(lo, size) + pos
    partners = np.repeat(size, size) - 1 - pos
    ii = np.repeat(elem, partners)
    offs = np.arange(len(ii)) - np.repeat(np.cumsum(partners) - partners, partners)
    return ii, ii + 1 + offs


@dataclass(frozen=True, eq=False)
class PairDetection:
    pairs: dict[tuple[int, int], AmbiguousPair]
    cell_counts: np.ndarray  # (rows, cols) detections centred on each cell


def detect_ambiguous_pairs(grid: AmbiguityGrid, config: AmbiguityConfig | None = None) -> PairDetection:
    """Edge pairs whose window-mean directions cross below the angle threshold.

    Each unordered pair is reported once, tagged with the first window (in
    row-major order) that detected it. ``cell_counts`` adds one per detection
    at the centre cell of the detecting window.
    """
    config = config or AmbiguityConfig()
    w = config.window_cells
    theta = config.theta_rad
    rows, cols = grid.shape
    counts = np.zeros((rows, cols), dtype=np.int64)
    wcol, wrow, edge, ang, wcols, _ = window_aggregate(grid, w)
    pairs: dict[tuple[int, int], AmbiguousPair] = {}
    if len(edge) == 0:
        return PairDetection(pairs, counts)
    win = wrow * wcols + wcol
    bounds = np.flatnonzero(np.r_[True, win[1:] != win[:-1], True])
    lo = bounds[:-1]
    size = np.diff(bounds)
    if size.max() > MAX_EDGES_PER_WINDOW:
        log.warning("window holds %d edges; only the first %d are compared", size.max(), MAX_EDGES_PER_WINDOW)
        size = np.minimum(size, MAX_EDGES_PER_WINDOW)
    busy = size >= 2
    lo, size = lo[busy], size[busy]
    n_pairs = size * (size - 1) // 2
    half = w // 2
    # chunks of windows keep the pair arrays to a few million entries
    chunk_end = np.cumsum(n_pairs)
    start = 0
    while start < len(lo):
        base = chunk_end[start - 1] if start else 0
        stop = max(int(np.searchsorted(chunk_end, base + 4_000_000, side="right")), start + 1)
        ii, jj = _window_pairs(lo[start:stop], size[start:stop])
        acute, aligned = _acute_and_orientation(ang[ii], ang[jj])
        hit = acute < theta
        ii, jj, aligned = ii[hit], jj[hit], aligned[hit]
        cy = np.minimum(wrow[ii] + half, rows - 1)
        cx = np.minimum(wcol[ii] + half, cols - 1)
        np.add.at(counts, (cy, cx), 1)
        ea, eb = edge[ii], edge[jj]
        _, first = np.unique(ea * (int(edge.max()) + 1) + eb, return_index=True)
        for k in np.sort(first).tolist():
            key = (int(ea[k]), int(eb[k]))
            if key not in pairs:
                pairs[key] = AmbiguousPair(key[0], key[1], (int(wcol[ii[k]]), int(wrow[ii[k]])),
                                           ALIGNED if aligned[k] else ANTI_ALIGNED)
        start = stop
    return PairDetection(pairs, counts)


@dataclass
class NeighborSets:
    """Reachable neighbours per (edge, endpoint side) with true/false split per delta.

    ``reachable[e][0]`` is the set for the source end of edge ``e``,
    ``reachable[e][1]`` for the target end.
    """

    reachable: list[tuple[set[int], set[int]]]
    false: dict[int, list[tuple[set[int], set[int]]]] = field(default_factory=dict)

    def true(self, delta: int) -> list[tuple[set[int], set[int]]]:
        return [(r0 - f0, r1 - f1) for (r0, r1), (f0, f1) in zip(self.reachable, self.false[delta])]


def reachable_neighbors(graph: Graph, pairs) -> list[tuple[set[int], set[int]]]:
    edges = graph.edges
    sets = [({t}, {s}) for s, t in edges]
    for p in pairs:
        s, t = edges[p.a]
        u, v = edges[p.b]
        if p.orientation == ALIGNED:
            sets[p.a][0].add(v), sets[p.a][1].add(u)
            sets[p.b][0].add(t), sets[p.b][1].add(s)
        else:
            sets[p.a][0].add(u), sets[p.a][1].add(v)
            sets[p.b][0].add(s), sets[p.b][1].add(t)
    for (s, t), (ns, nt) in zip(edges, sets):
        ns.discard(s)
        nt.discard(t)
    return sets


def classify_neighbors(graph: Graph, reachable, delta_range) -> NeighborSets:
    """Split reachable neighbours into true (within ``delta`` hops) and false.

    From a source end hops are counted forward; from a target end they are
    counted backward, so on directed graphs an edge's own opposite endpoint
    is always a true neighbour.
    """
    cap = max(delta_range)
    fwd: dict[int, dict[int, int]] = {}
    bwd: dict[int, dict[int, int]] = {}
    falses = {d: [] for d in delta_range}
    for (s, t), (ns, nt) in zip(graph.edges, reachable):
        if s not in fwd:
            fwd[s] = bfs_hops(graph, s, cap)
        if t not in bwd:
            bwd[t] = bfs_hops(graph, t, cap, reverse=True)
        hs, ht = fwd[s], bwd[t]
        for d in delta_range:
            falses[d].append(
                ({v for v in ns if hs.get(v, cap + 1) > d}, {v for v in nt if ht.get(v, cap + 1) > d})
            )
    return NeighborSets(reachable, falses)


@dataclass(frozen=True, eq=False)
class AmbiguityResult:
    amb: dict[int, float]
    neighbors: NeighborSets
    cell_counts: np.ndarray
    pairs: dict[tuple[int, int], AmbiguousPair]


def ambiguity(drawing: Drawing, graph: Graph | None = None, config: AmbiguityConfig | None = None,
              transform: ViewTransform | None = None) -> AmbiguityResult:
    """Share of perceivable neighbours that are farther than delta hops in the graph."""
    config = config or AmbiguityConfig()
    graph = graph or drawing.graph
    if graph.edges != drawing.graph.edges or graph.vertex_count != drawing.graph.vertex_count:
        raise ValueError("graph does not match the drawing's edge list")
    grid = build_ambiguity_grid(drawing, config, transform)
    det = detect_ambiguous_pairs(grid, config)
    reach = reachable_neighbors(graph, det.pairs.values())
    ns = classify_neighbors(graph, reach, config.delta_range)
    total = sum(len(a) + len(b) for a, b in reach)
    amb = {}
    for d in config.delta_range:
        f = sum(len(a) + len(b) for a, b in ns.false[d])
        amb[d] = f / total if total else 0.0
    return AmbiguityResult(amb, ns, det.cell_counts, det.pairs)


# -- composite report ----------------------------------------------------------


@dataclass(frozen=True, eq=False)
class MetricsReport:
    ink_ratio: float
    distortion_mean: float
    distortion_median: float
    distortion_per_edge: np.ndarray
    amb: dict[int, float]
    ambiguity_cell_counts: np.ndarray
    ink_ratio_with_vertices: float | None = None
    ambiguous_pair_count: int = 0

    def to_dict(self) -> dict:
        return {
            "ink_ratio": self.ink_ratio,
            "ink_ratio_with_vertices": self.ink_ratio_with_vertices,
            "distortion_mean": self.distortion_mean,
            "distortion_median": self.distortion_median,
            "distortion_per_edge": self.distortion_per_edge.tolist(),
            "amb": {str(k): v for k, v in self.amb.items()},
            "ambiguous_pair_count": self.ambiguous_pair_count,
            "ambiguity_cell_counts": self.ambiguity_cell_counts.tolist(),
        }


@dataclass(frozen=True)
class RasterConfig:
    width_px: int = DEFAULT_WIDTH_PX
    line_width_px: float = 1.0
    vertex_diameter_px: float = 4.0
    gray_threshold: int = 1


def evaluate(drawing: Drawing, baseline: Drawing, graph: Graph | None = None,
             ambiguity_config: AmbiguityConfig | None = None,
             raster_config: RasterConfig | None = None) -> MetricsReport:
    """All three metrics of ``drawing``, ink measured against ``baseline``.

    Both drawings are rasterized through one shared view so pixel counts are
    comparable. Ink is reported without and with vertex disks.
    """
    rc = raster_config or RasterConfig()
    ac = ambiguity_config or AmbiguityConfig(width_px=rc.width_px)
    graph = graph or drawing.graph
    view = fit_view(drawing, baseline, width_px=rc.width_px)
    d_plain, d_disks = rasterize_both(drawing, view, rc.line_width_px, rc.vertex_diameter_px)
    b_plain, b_disks = rasterize_both(baseline, view, rc.line_width_px, rc.vertex_diameter_px)
    ink = ink_reduction(d_plain, b_plain, rc.gray_threshold)
    ink_v = ink_reduction(d_disks, b_disks, rc.gray_threshold)
    dist = distortion(drawing)
    amb = ambiguity(drawing, graph, ac, transform=view)
    return MetricsReport(ink, dist.mean, dist.median, dist.per_edge, amb.amb, amb.cell_counts,
                         ink_ratio_with_vertices=ink_v, ambiguous_pair_count=len(amb.pairs))
