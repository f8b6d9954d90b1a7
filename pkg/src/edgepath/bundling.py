"""Edge-Path bundling: route long edges along weighted shortest paths.

Edges are visited longest first. Each one searches for a cheapest path
between its endpoints that avoids itself and every edge bundled so far; if
the path is no longer than ``k`` times the straight edge, the edge is drawn
through the path's vertices and the path's edges are locked so they are
never bundled themselves.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from typing import Literal, NamedTuple, Sequence

import numpy as np

from .drawing import Drawing
from .graph import Graph, Layout, edge_lengths

ThresholdMode = Literal["geometry", "weight"]


@dataclass(frozen=True)
class BundlingParams:
    max_distortion_k: float = 2.0
    edge_weight_exponent_d: float = 2.0
    smoothing: int = 2
    curve_samples_per_segment: int = 8
    threshold_on: ThresholdMode = "geometry"

    def __post_init__(self):
        if not self.max_distortion_k > 1:
            raise ValueError(f"max_distortion_k must be > 1, got {self.max_distortion_k}")
        if not self.edge_weight_exponent_d >= 0:
            raise ValueError(f"edge_weight_exponent_d must be >= 0, got {self.edge_weight_exponent_d}")
        if int(self.smoothing) != self.smoothing or self.smoothing < 1:
            raise ValueError(f"smoothing must be an integer >= 1, got {self.smoothing}")
        if int(self.curve_samples_per_segment) != self.curve_samples_per_segment or self.curve_samples_per_segment < 2:
            raise ValueError("curve_samples_per_segment must be an integer >= 2")
        if self.threshold_on not in ("geometry", "weight"):
            raise ValueError(f"threshold_on must be 'geometry' or 'weight', got {self.threshold_on!r}")


class PathResult(NamedTuple):
    vertices: list[int]
    edges: list[int]
    weighted_cost: float
    geometric_length: float


@dataclass(frozen=True, eq=False)
class BundledDrawing(Drawing):
    """Edge-Path output.

    ``paths[e]`` holds the vertex route of a bundled edge (``None`` when the
    edge stayed straight); ``control_points[e]`` are the route's positions
    after smoothing, and ``polylines[e]`` the sampled render curve.
    """

    control_points: tuple[np.ndarray, ...] = ()
    bundled: np.ndarray = None
    locked: np.ndarray = None
    paths: tuple[list[int] | None, ...] = ()
    params: BundlingParams = BundlingParams()

    @property
    def bundled_count(self) -> int:
        return int(np.count_nonzero(self.bundled))


def _search(adj, weight, length, skip, s, t, budget, prune_key):
    """Dijkstra on total weight with geometric length as secondary key.

    Returns ``(pred, label, pruned)``; ``pred`` maps each settled vertex to
    its ``(previous vertex, edge id)`` and ``label[t]`` is ``(weight, length)``
    if ``t`` was settled. ``prune_key`` selects which accumulated quantity
    (0 = weight, 1 = length) stops expansion once it exceeds ``budget``;
    ``None`` disables pruning.
    """
    label = {s: (0.0, 0.0)}
    pred = {s: (-1, -1)}
    settled = set()
    pruned = False
    heap = [(0.0, 0.0, s)]
    pop, push = heapq.heappop, heapq.heappush
    while heap:
        w, g, u = pop(heap)
        if u in settled:
            continue
        settled.add(u)
        if prune_key is not None and (g if prune_key else w) > budget:
            if prune_key == 0:
                # popped in weight order, nothing cheaper remains
                return pred, None, True
            pruned = True
            continue
        if u == t:
            return pred, (w, g), pruned
        for v, eid in adj[u]:
            if skip[eid] or v in settled:
                continue
            nw = w + weight[eid]
            ng = g + length[eid]
            old = label.get(v)
            if old is None or nw < old[0] or (nw == old[0] and ng < old[1]):
                label[v] = (nw, ng)
                pred[v] = (u, eid)
                push(heap, (nw, ng, v))
    return pred, None, pruned


def _trace(pred, t):
    verts, edges = [t], []
    u = t
    while True:
        p, eid = pred[u]
        if p < 0:
            break
        verts.append(p)
        edges.append(eid)
        u = p
    verts.reverse()
    edges.reverse()
    return verts, edges


def constrained_dijkstra(
    g: Graph,
    layout: Layout,
    weight: Sequence[float],
    skip: Sequence[bool],
    s: int,
    t: int,
    geometric_budget: float,
    *,
    lengths: Sequence[float] | None = None,
    threshold_on: ThresholdMode = "geometry",
    prune: bool = True,
) -> PathResult | None:
    """Cheapest ``s -> t`` path over non-skipped edges, or ``None``.

    Cost is the sum of ``weight``; among equal costs the geometrically
    shorter path wins, then the smaller vertex id in queue order. The path
    is returned only if its length (or weight, with
    ``threshold_on="weight"``) stays within ``geometric_budget``.

    With ``prune`` the search stops expanding vertices whose accumulated
    length already exceeds the budget. That cannot hide a within-budget
    optimum (its prefixes are all within budget), but it can let ``t`` be
    reached by a costlier detour when the true optimum runs over budget. If
    anything was pruned before ``t`` settled, the result is therefore
    re-derived with an unpruned search.
    """
    if s == t:
        raise ValueError("source and target must differ")
    if lengths is None:
        lengths = edge_lengths(g, layout)
    key = 1 if threshold_on == "geometry" else 0
    adj = g.out_adjacency
    pred, lab, pruned = _search(adj, weight, lengths, skip, s, t, geometric_budget, key if prune else None)
    if lab is not None and pruned:
        pred, lab, _ = _search(adj, weight, lengths, skip, s, t, geometric_budget, None)
    if lab is None or lab[key] > geometric_budget:
        return None
    verts, edges = _trace(pred, t)
    return PathResult(verts, edges, lab[0], lab[1])


def smooth_control_points(points, smoothing: int) -> np.ndarray:
    """Insert midpoints between consecutive points ``smoothing - 1`` times."""
    pts = np.asarray(points, dtype=np.float64).reshape(-1, 2)
    if len(pts) < 2:
        raise ValueError("need at least 2 control points")
    if smoothing < 1:
        raise ValueError("smoothing must be >= 1")
    for _ in range(int(smoothing) - 1):
        out = np.empty((2 * len(pts) - 1, 2))
        out[0::2] = pts
        out[1::2] = 0.5 * (pts[:-1] + pts[1:])
        pts = out
    return pts


def curve_polyline(control_points, samples_per_segment: int = 8) -> np.ndarray:
    """Sample a clamped uniform cubic B-spline over ``control_points``.

    The end points are tripled so the curve starts and ends exactly on them.
    Two control points give the straight segment back unchanged.
    """
    cp = np.asarray(control_points, dtype=np.float64).reshape(-1, 2)
    if len(cp) < 2:
        raise ValueError("need at least 2 control points")
    if len(cp) == 2:
        return cp.copy()
    if samples_per_segment < 2:
        raise ValueError("samples_per_segment must be >= 2")
    q = np.concatenate([cp[:1], cp[:1], cp, cp[-1:], cp[-1:]])
    spans = len(q) - 3
    t = np.arange(samples_per_segment) / samples_per_segment
    t2, t3 = t * t, t * t * t
    basis = np.stack(
        [(1 - t) ** 3, 3 * t3 - 6 * t2 + 4, -3 * t3 + 3 * t2 + 3 * t + 1, t3], axis=1
    ) / 6.0
    idx = np.arange(spans)[:, None] + np.arange(4)[None, :]
    windows = q[idx]  # spans x 4 x 2
    pts = np.einsum("sk,nkd->nsd", basis, windows).reshape(-1, 2)
    out = np.concatenate([pts, cp[-1:]])
    out[0] = cp[0]
    return out


def edge_path_bundle(g: Graph, layout: Layout, params: BundlingParams | None = None) -> BundledDrawing:
    params = params or BundlingParams()
    layout.check_covers(g)
    k = params.max_distortion_k
    lengths = edge_lengths(g, layout)
    weights = lengths ** params.edge_weight_exponent_d
    length_list = lengths.tolist()
    weight_list = weights.tolist()
    m = g.edge_count

    lock = [False] * m
    skip = [False] * m
    paths: list[list[int] | None] = [None] * m
    order = sorted(range(m), key=lambda e: (-weight_list[e], e))
    for e in order:
        if lock[e]:
            continue
        straight = length_list[e]
        if straight == 0.0:
            continue
        skip[e] = True
        s, t = g.edges[e]
        p = constrained_dijkstra(
            g, layout, weight_list, skip, s, t, k * straight,
            lengths=length_list, threshold_on=params.threshold_on,
        )
        if p is None:
            skip[e] = False
            continue
        measured = p.geometric_length if params.threshold_on == "geometry" else p.weighted_cost
        if measured > k * straight:
            skip[e] = False
            continue
        for me in p.edges:
            lock[me] = True
        paths[e] = p.vertices

    return _assemble(g, layout, paths, lock, params)


def _assemble(g, layout, paths, lock, params) -> BundledDrawing:
    pos = layout.positions
    control, polylines = [], []
    for e, (s, t) in enumerate(g.edges):
        route = paths[e]
        if route is None:
            cp = pos[[s, t]]
        else:
            cp = smooth_control_points(pos[route], params.smoothing)
        control.append(cp)
        polylines.append(curve_polyline(cp, params.curve_samples_per_segment))
    bundled = np.array([p is not None for p in paths], dtype=bool)
    locked = np.array(lock, dtype=bool)
    for arr in (bundled, locked):
        arr.setflags(write=False)
    return BundledDrawing(
        g, layout, tuple(polylines),
        control_points=tuple(control), bundled=bundled, locked=locked,
        paths=tuple(paths), params=params,
    )


def bundle_stats(drawing: BundledDrawing) -> dict[str, int]:
    bundled = np.asarray(drawing.bundled, dtype=bool)
    locked = np.asarray(drawing.locked, dtype=bool)
    hops = [len(p) - 1 for p in drawing.paths if p is not None]
    return {
        "bundled_count": int(bundled.sum()),
        "locked_count": int(locked.sum()),
        "unbundled_count": int((~bundled & ~locked).sum()),
        "max_path_hops": max(hops, default=0),
    }
