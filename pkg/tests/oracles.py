"""Slow, independent reference implementations the tests compare against."""

from __future__ import annotations

import math

import numpy as np

from edgepath.graph import Graph, Layout


def random_graph(rng: np.random.Generator, n: int, p: float, directed: bool = False) -> tuple[Graph, Layout]:
    pos = rng.uniform(0.0, 1.0, size=(n, 2))
    edges = []
    for u in range(n):
        for v in range(n) if directed else range(u + 1, n):
            if u != v and rng.random() < p:
                edges.append((u, v))
    return Graph(n, tuple(edges), directed), Layout(pos)


def bellman_ford(g: Graph, weight, length, skip, s: int):
    """Lexicographic (weight, length) labels from ``s`` over non-skipped edges.

    Relaxation adds the edge cost to the tail label, the same summation order a
    forward search uses, so costs agree bit for bit.
    """
    inf = (math.inf, math.inf)
    label = [inf] * g.vertex_count
    pred = [None] * g.vertex_count
    label[s] = (0.0, 0.0)
    arcs = []
    for eid, (a, b) in enumerate(g.edges):
        if skip[eid]:
            continue
        arcs.append((a, b, eid))
        if not g.directed:
            arcs.append((b, a, eid))
    for _ in range(g.vertex_count):
        changed = False
        for a, b, eid in arcs:
            if label[a][0] == math.inf:
                continue
            cand = (label[a][0] + weight[eid], label[a][1] + length[eid])
            if cand < label[b]:
                label[b] = cand
                pred[b] = (a, eid)
                changed = True
        if not changed:
            break
    return label, pred


def bf_path(g, weight, length, skip, s, t):
    label, pred = bellman_ford(g, weight, length, skip, s)
    if label[t][0] == math.inf:
        return None
    verts = [t]
    while verts[-1] != s:
        verts.append(pred[verts[-1]][0])
    return verts[::-1], label[t]


def reference_bundle(g: Graph, layout: Layout, k: float, d: float):
    """Algorithm 1 with an unpruned Bellman-Ford search; returns paths per edge."""
    pos = layout.positions
    length = [float(np.hypot(*(pos[b] - pos[a]))) for a, b in g.edges]
    weight = [L ** d for L in length]
    lock = [False] * g.edge_count
    skip = [False] * g.edge_count
    paths = [None] * g.edge_count
    for e in sorted(range(g.edge_count), key=lambda i: (-weight[i], i)):
        if lock[e] or length[e] == 0.0:
            continue
        skip[e] = True
        s, t = g.edges[e]
        found = bf_path(g, weight, length, skip, s, t)
        if found is None or found[1][1] > k * length[e]:
            skip[e] = False
            continue
        verts = found[0]
        for a, b in zip(verts[:-1], verts[1:]):
            for eid, (x, y) in enumerate(g.edges):
                if skip[eid]:
                    continue
                if (x, y) == (a, b) or (not g.directed and (y, x) == (a, b)):
                    lock[eid] = True
                    break
        paths[e] = verts
    return paths, lock


def union_find_components(n, edges):
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            i = parent[i]
        return i

    for a, b in edges:
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[max(ra, rb)] = min(ra, rb)
    return [find(i) for i in range(n)]


# -- ambiguity detector ------------------------------------------------------------


def _clip(a, b, x0, y0, x1, y1):
    """Liang-Barsky: parameter interval of segment ``a -> b`` inside the box, or None."""
    t0, t1 = 0.0, 1.0
    dx, dy = b[0] - a[0], b[1] - a[1]
    for p, q in ((-dx, a[0] - x0), (dx, x1 - a[0]), (-dy, a[1] - y0), (dy, y1 - a[1])):
        if p == 0:
            if q < 0:
                return None
            continue
        r = q / p
        if p < 0:
            t0 = max(t0, r)
        else:
            t1 = min(t1, r)
    return (t0, t1) if t1 - t0 > 1e-12 else None


def _circ_mean(angles):
    return math.atan2(sum(math.sin(a) for a in angles), sum(math.cos(a) for a in angles)) % (2 * math.pi)


def brute_force_pairs(drawing, transform, cell: float, window: int, theta_deg: float):
    """All-pairs detector: clip every segment to every cell, then scan every window."""
    cols = math.ceil(transform.width / cell)
    rows = math.ceil(transform.height / cell)
    cell_angles: dict[tuple[int, int, int], list[float]] = {}
    for e, pl in enumerate(drawing.polylines):
        px = transform.to_pixels(pl)
        for (p, q), (a, b) in zip(zip(pl[:-1], pl[1:]), zip(px[:-1], px[1:])):
            if p[0] == q[0] and p[1] == q[1]:
                continue
            ang = math.atan2(q[1] - p[1], q[0] - p[0])
            for cy in range(rows):
                for cx in range(cols):
                    if _clip(a, b, cx * cell, cy * cell, (cx + 1) * cell, (cy + 1) * cell):
                        cell_angles.setdefault((cx, cy, e), []).append(ang)
    cell_mean = {key: _circ_mean(v) for key, v in cell_angles.items()}
    theta = math.radians(theta_deg)
    found = {}
    for wy in range(max(rows - window + 1, 1)):
        for wx in range(max(cols - window + 1, 1)):
            per_edge: dict[int, list[float]] = {}
            for (cx, cy, e), a in cell_mean.items():
                if wx <= cx < wx + window and wy <= cy < wy + window:
                    per_edge.setdefault(e, []).append(a)
            means = {e: _circ_mean(v) for e, v in per_edge.items()}
            es = sorted(means)
            for i, a in enumerate(es):
                for b in es[i + 1:]:
                    diff = abs(means[a] - means[b]) % (2 * math.pi)
                    diff = min(diff, 2 * math.pi - diff)
                    acute = min(diff, math.pi - diff)
                    if acute < theta and (a, b) not in found:
                        found[(a, b)] = diff < math.pi / 2
    return found
