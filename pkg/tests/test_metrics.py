import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from edgepath.bundling import edge_path_bundle
from edgepath.datasets import CubesSpec, NoiseSpec, generate_cubes, generate_noise, random_spanning_tree, stream
from edgepath.drawing import Drawing, straight_drawing
from edgepath.graph import Graph, Layout, diameter_hops
from edgepath.metrics import (
    ALIGNED,
    ANTI_ALIGNED,
    AmbiguityConfig,
    RasterConfig,
    ambiguity,
    build_ambiguity_grid,
    detect_ambiguous_pairs,
    distortion,
    evaluate,
    ink_reduction,
)
from edgepath.raster import DegenerateDrawingError, RasterImage, ViewTransform, fit_view, rasterize

from oracles import brute_force_pairs


def drawing_of(points, edges, polylines=None, directed=False):
    layout = Layout(np.asarray(points, dtype=float))
    g = Graph(len(points), tuple(edges), directed)
    if polylines is None:
        return straight_drawing(g, layout)
    return Drawing(g, layout, tuple(np.asarray(p, dtype=float) for p in polylines))


# -- raster ------------------------------------------------------------------------


def scanline_count(a, b, half_width, shape):
    """Pixels whose centre lies within half_width + 0.5 of segment a-b, row by row."""
    h, w = shape
    n = 0
    ax, ay = a
    bx, by = b
    for y in range(h):
        cy = y + 0.5
        for x in range(w):
            cx = x + 0.5
            dx, dy = bx - ax, by - ay
            t = ((cx - ax) * dx + (cy - ay) * dy) / (dx * dx + dy * dy)
            t = min(max(t, 0.0), 1.0)
            dist = math.hypot(ax + t * dx - cx, ay + t * dy - cy)
            cov = min(max(half_width + 0.5 - dist, 0.0), 1.0)
            if round(cov * 255) >= 1:
                n += 1
    return n


def test_horizontal_unit_edge_pixel_count():
    d = drawing_of([(0, 0), (1, 0)], [(0, 1)])
    img = rasterize(d, 1600, 1.0)
    assert img.width == 1600
    count = int(img.binarize(1).sum())
    assert 1600 <= count <= 1600 * 3
    a, b = img.transform.to_pixels(d.polylines[0])
    assert count == scanline_count(a, b, 0.5, img.pixels.shape)


@pytest.mark.parametrize("seed", range(3))
def test_diagonal_segment_matches_scanline_oracle(seed):
    rng = np.random.default_rng(seed)
    pts = rng.uniform(0, 1, size=(2, 2))
    d = drawing_of(pts, [(0, 1)])
    img = rasterize(d, 120, 1.5)
    a, b = img.transform.to_pixels(d.polylines[0])
    assert int(img.binarize(1).sum()) == scanline_count(a, b, 0.75, img.pixels.shape)


def test_empty_and_degenerate_drawings_rejected():
    with pytest.raises(DegenerateDrawingError):
        rasterize(drawing_of(np.zeros((0, 2)), []))
    with pytest.raises(DegenerateDrawingError):
        rasterize(drawing_of([(1, 1), (1, 1)], [(0, 1)]))


def test_raster_deterministic_and_aspect():
    g, layout = generate_cubes(CubesSpec("3R", seed=2))
    d = edge_path_bundle(g, layout)
    a = rasterize(d).pixels
    b = rasterize(d).pixels
    assert a.tobytes() == b.tobytes()
    view = fit_view(d)
    pts = d.all_points()
    bw, bh = pts.max(axis=0) - pts.min(axis=0)
    assert view.width == 1600
    assert abs((view.height - 2 * view.pad) - bh * view.scale) < 1.0
    assert math.isclose(view.scale * bw, 1600 - 2 * view.pad)


def test_ink_saturates_at_255():
    d = drawing_of([(0, 0), (1, 0), (0, 0.0), (1, 0.0)], [(0, 1), (2, 3)])
    img = rasterize(d, 200, 3.0)
    assert img.pixels.max() == 255


def test_vertex_disks_add_ink():
    d = drawing_of([(0, 0), (1, 1)], [(0, 1)])
    plain = rasterize(d, 400)
    disks = rasterize(d, 400, draw_vertices=True, transform=plain.transform)
    assert disks.binarize().sum() > plain.binarize().sum()


# -- ink -------------------------------------------------------------------------


def test_ink_identity_and_blank():
    g, layout = generate_cubes(CubesSpec("1R", seed=0))
    img = rasterize(straight_drawing(g, layout))
    assert ink_reduction(img, img) == 1.0
    blank = RasterImage(np.zeros_like(img.pixels), img.transform)
    assert ink_reduction(blank, img) == 0.0
    with pytest.raises(ValueError):
        ink_reduction(img, blank)


def test_ink_size_mismatch():
    a = RasterImage(np.zeros((2, 2), np.uint8), None)
    b = RasterImage(np.ones((3, 2), np.uint8), None)
    with pytest.raises(ValueError):
        ink_reduction(a, b)


def test_ink_threshold_direction():
    base = RasterImage(np.array([[0, 10, 200]], np.uint8), None)
    assert ink_reduction(base, base, 1) == 1.0
    half = RasterImage(np.array([[0, 0, 200]], np.uint8), None)
    assert ink_reduction(half, base, 1) == 0.5
    assert ink_reduction(half, base, 100) == 1.0


# -- distortion ------------------------------------------------------------------


def test_straight_distortion_is_one():
    g, layout = generate_noise(NoiseSpec(200, 3))
    r = distortion(straight_drawing(g, layout))
    assert r.mean == 1.0 and r.median == 1.0
    assert np.all(np.abs(r.per_edge - 1.0) <= 1e-9)


def test_semicircle_distortion():
    th = np.linspace(np.pi, 0.0, 100)
    arc = np.c_[0.5 + 0.5 * np.cos(th), 0.5 * np.sin(th)]
    d = drawing_of([(0, 0), (1, 0)], [(0, 1)], [arc])
    assert abs(distortion(d).mean - math.pi / 2) < 0.01


def test_even_median_averages_middle_pair():
    arc = [(0, 0), (0.5, 0.5), (1, 0)]
    d = drawing_of([(0, 0), (1, 0), (0, 1), (1, 1)], [(0, 1), (2, 3)], [arc, [(0, 1), (1, 1)]])
    r = distortion(d)
    assert r.median == pytest.approx((1.0 + math.sqrt(2)) / 2)
    assert r.median == r.mean


def test_zero_length_edge_distortion_error():
    d = drawing_of([(0, 0), (0, 0), (1, 1)], [(0, 1), (1, 2)])
    with pytest.raises(ValueError):
        distortion(d)


# -- ambiguity grid ----------------------------------------------------------------


def test_horizontal_edge_angles_zero():
    d = drawing_of([(0, 0), (1, 0), (0, 1)], [(0, 1)])
    grid = build_ambiguity_grid(d)
    assert len(grid.angle) > 0
    assert np.allclose(grid.angle, 0.0)
    # every crossed column appears exactly once
    assert len(set(grid.cell_x.tolist())) == len(grid.cell_x)


def test_reversed_edge_shifts_by_pi():
    d = drawing_of([(0, 0), (1, 0), (0, 1)], [(1, 0)])
    grid = build_ambiguity_grid(d)
    assert np.allclose(grid.angle, math.pi)


def test_v_shape_in_one_cell_is_45_degrees():
    # legs of 0.3 cells each, turning at the centre of one cell
    view = ViewTransform(0.0, 10.0, 8.0, 0.0, 80, 80)
    d = drawing_of([(4.35, 5.35), (4.65, 5.65), (0, 0), (10, 10)], [(0, 1)],
                   [[(4.35, 5.35), (4.65, 5.35), (4.65, 5.65)]])
    grid = build_ambiguity_grid(d, AmbiguityConfig(), view)
    assert len(grid.angle) == 1
    assert grid.angle[0] == pytest.approx(math.pi / 4)


# -- pair detection ----------------------------------------------------------------


def pair_set(points, edges, polylines=None, config=None):
    d = drawing_of(points, edges, polylines)
    det = detect_ambiguous_pairs(build_ambiguity_grid(d, config), config)
    return det


def test_parallel_edges_one_cell_apart():
    # bounding box 1 wide -> ~1592 px; 0.005 units ~ 8 px, one cell
    det = pair_set([(0, 0), (1, 0), (0, 0.005), (1, 0.005)], [(0, 1), (2, 3)])
    assert list(det.pairs) == [(0, 1)]
    assert det.pairs[(0, 1)].orientation == ALIGNED
    assert det.cell_counts.sum() > 0


def test_antiparallel_orientation():
    det = pair_set([(0, 0), (1, 0), (0, 0.005), (1, 0.005)], [(0, 1), (3, 2)])
    assert det.pairs[(0, 1)].orientation == ANTI_ALIGNED


def test_perpendicular_crossing_not_ambiguous():
    det = pair_set([(0, 0.5), (1, 0.5), (0.5, 0), (0.5, 1)], [(0, 1), (2, 3)])
    assert det.pairs == {}


def test_five_degree_crossing_is_ambiguous():
    a = math.radians(5)
    pts = [(0, 0.5), (1, 0.5), (0.5 - 0.5 * math.cos(a), 0.5 - 0.5 * math.sin(a)),
           (0.5 + 0.5 * math.cos(a), 0.5 + 0.5 * math.sin(a))]
    det = pair_set(pts, [(0, 1), (2, 3)])
    assert (0, 1) in det.pairs


def test_far_parallel_edges_not_paired():
    det = pair_set([(0, 0), (1, 0), (0, 0.5), (1, 0.5)], [(0, 1), (2, 3)])
    assert det.pairs == {}


@pytest.mark.parametrize("seed", range(50))
def test_detector_matches_brute_force(seed):
    rng = np.random.default_rng(seed)
    n_edges = int(rng.integers(2, 11))
    # tight clusters of near-parallel edges give the detector real work
    base = rng.uniform(0, 2 * np.pi)
    pts, edges, lines = [], [], []
    for i in range(n_edges):
        a = base + rng.normal(0, 0.08) + (np.pi if rng.random() < 0.3 else 0)
        c = rng.uniform(0.3, 0.7, size=2)
        half = rng.uniform(0.1, 0.3) * np.array([np.cos(a), np.sin(a)])
        s, t = c - half, c + half
        mid = (s + t) / 2 + rng.normal(0, 0.01, size=2)
        pts += [s, t]
        edges.append((2 * i, 2 * i + 1))
        lines.append([s, mid, t])
    d = drawing_of(pts, edges, lines)
    config = AmbiguityConfig(width_px=160, grid_cell_px=8)
    view = fit_view(d, width_px=160)
    det = detect_ambiguous_pairs(build_ambiguity_grid(d, config, view), config)
    oracle = brute_force_pairs(d, view, 8.0, 3, 7.5)
    assert set(det.pairs) == set(oracle)
    for key, p in det.pairs.items():
        assert (p.orientation == ALIGNED) == oracle[key]


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10_000))
def test_detection_symmetric_under_edge_relabelling(seed):
    g, layout = generate_noise(NoiseSpec(40, seed))
    d = straight_drawing(g, layout)
    perm = np.random.default_rng(seed).permutation(g.edge_count)
    g2 = Graph(g.vertex_count, tuple(g.edges[i] for i in perm))
    d2 = straight_drawing(g2, layout)
    p1 = {frozenset(k) for k in ambiguity(d).pairs}
    p2 = {frozenset((int(perm[a]), int(perm[b]))) for a, b in ambiguity(d2).pairs}
    assert p1 == p2


# -- ambiguity -------------------------------------------------------------------


def test_no_pairs_means_zero_ambiguity():
    d = drawing_of([(0, 0), (1, 0), (0, 0.5), (0.2, 1)], [(0, 1), (2, 3)])
    r = ambiguity(d)
    assert r.pairs == {}
    assert all(v == 0.0 for v in r.amb.values())
    assert r.neighbors.reachable == [({1}, {0}), ({3}, {2})]


def test_figure_five_configuration():
    s, t, u, v, w, x = range(6)
    pts = [(0, 0), (1, 0), (0, 0.004), (0, -0.004), (1, 0.004), (1, -0.004)]
    edges = [(s, t), (u, w), (v, x), (u, t)]
    detour = [(0, 0.004), (0, 0.5), (1, 0.5), (1, 0)]
    lines = [[pts[a], pts[b]] for a, b in edges[:3]] + [detour]
    d = drawing_of(pts, edges, lines)
    r = ambiguity(d, config=AmbiguityConfig(delta_range=(1,)))
    n_s, n_t = r.neighbors.reachable[0]
    assert n_s == {t, w, x}
    assert n_t == {s, u, v}
    f_s, f_t = r.neighbors.false[1][0]
    assert f_s == {w, x}
    assert f_t == {v}
    t_s, t_t = r.neighbors.true(1)[0]
    assert t_s == {t} and t_t == {s, u}


def cubes_suite(seeds=range(3)):
    for v in ("1R", "2R", "3R", "4R"):
        for seed in seeds:
            g, layout = generate_cubes(CubesSpec(v, seed=seed))
            yield straight_drawing(g, layout)
            yield edge_path_bundle(g, layout)


def test_amb_non_increasing_in_delta():
    for d in cubes_suite():
        amb = ambiguity(d).amb
        vals = [amb[k] for k in sorted(amb)]
        assert all(b <= a for a, b in zip(vals, vals[1:]))
        assert all(0.0 <= a <= 1.0 for a in vals)


def connected_square(seed, n=40):
    rng = stream(seed, 1)
    pos = stream(seed, 0).uniform(0, 1, size=(n, 2))
    edges = random_spanning_tree(range(n), rng)
    extra = set()
    while len(extra) < n // 4:
        a, b = (int(i) for i in rng.choice(n, 2, replace=False))
        if (a, b) not in edges and (b, a) not in edges:
            extra.add((min(a, b), max(a, b)))
    return Graph(n, tuple(edges) + tuple(sorted(extra))), Layout(pos)


@pytest.mark.parametrize("seed", range(5))
def test_amb_reaches_zero_at_diameter(seed):
    g, layout = connected_square(seed)
    diam = diameter_hops(g)
    cfg = AmbiguityConfig(delta_range=tuple(range(1, diam + 1)))
    for d in (straight_drawing(g, layout), edge_path_bundle(g, layout)):
        amb = ambiguity(d, config=cfg).amb
        assert amb[diam] == 0.0
        assert amb[1] > 0.0


def test_directed_opposite_endpoint_always_true():
    g, layout = generate_cubes(CubesSpec("2R", seed=1, directed=True))
    r = ambiguity(edge_path_bundle(g, layout))
    for (s, t), (fs, ft) in zip(g.edges, r.neighbors.false[1]):
        assert t not in fs and s not in ft


def test_grid_halving_is_stable():
    # fixed window cell count on bundled drawings; fixed window span on straight ones
    for v in ("1R", "2R", "3R", "4R"):
        for seed in range(2):
            g, layout = generate_cubes(CubesSpec(v, seed=seed))
            ep = edge_path_bundle(g, layout)
            a8 = ambiguity(ep, config=AmbiguityConfig(grid_cell_px=8)).amb[1]
            a4 = ambiguity(ep, config=AmbiguityConfig(grid_cell_px=4)).amb[1]
            assert abs(a8 - a4) < 0.05, (v, seed, a8, a4)
            st_d = straight_drawing(g, layout)
            s8 = ambiguity(st_d, config=AmbiguityConfig(grid_cell_px=8, window_cells=3)).amb[1]
            s4 = ambiguity(st_d, config=AmbiguityConfig(grid_cell_px=4, window_cells=5)).amb[1]
            assert abs(s8 - s4) < 0.05, (v, seed, s8, s4)


def test_window_cap_warns(caplog, monkeypatch):
    import edgepath.metrics as m

    monkeypatch.setattr(m, "MAX_EDGES_PER_WINDOW", 3)
    pts, edges = [], []
    for i in range(6):
        pts += [(0, i * 1e-4), (1, i * 1e-4)]
        edges.append((2 * i, 2 * i + 1))
    pts.append((0, 1))
    with caplog.at_level("WARNING"):
        ambiguity(drawing_of(pts, edges))
    assert "only the first 3" in caplog.text


def test_config_validation():
    for bad in (dict(angle_threshold_theta=0), dict(angle_threshold_theta=90), dict(window_cells=2),
                dict(delta_range=(0, 1)), dict(grid_cell_px=0)):
        with pytest.raises(ValueError):
            AmbiguityConfig(**bad)
    assert AmbiguityConfig(delta_range=(3, 1, 2)).delta_range == (1, 2, 3)


def test_explicit_epsilon_sets_cell_size():
    view = ViewTransform(0, 1, 100.0, 0, 100, 100)
    assert AmbiguityConfig(proximity_epsilon=0.05).cell_size(view) == pytest.approx(5.0)
    assert AmbiguityConfig().cell_size(view) == 8.0


def test_graph_mismatch_rejected():
    d = drawing_of([(0, 0), (1, 0)], [(0, 1)])
    with pytest.raises(ValueError):
        ambiguity(d, Graph(3, ((0, 1),)))


# -- evaluate ------------------------------------------------------------------------


def test_evaluate_straight_against_itself():
    g, layout = generate_cubes(CubesSpec("4R", seed=9))
    st_d = straight_drawing(g, layout)
    rep = evaluate(st_d, st_d)
    assert rep.ink_ratio == 1.0 and rep.ink_ratio_with_vertices == 1.0
    assert rep.distortion_mean == 1.0 and rep.distortion_median == 1.0
    out = rep.to_dict()
    assert set(out) >= {"ink_ratio", "distortion_mean", "distortion_median", "distortion_per_edge", "amb",
                        "ambiguity_cell_counts"}


def test_evaluate_bundled_saves_ink():
    g, layout = generate_cubes(CubesSpec("2R", seed=9))
    rep = evaluate(edge_path_bundle(g, layout), straight_drawing(g, layout), raster_config=RasterConfig())
    assert rep.ink_ratio < 0.9
    assert rep.distortion_mean > 1.0


@pytest.mark.xfail(strict=True, reason="our Noise samples measure amb ~0.72-0.77, above the published 0.50")
def test_noise_straight_ambiguity_matches_published_value():
    g, layout = generate_noise(NoiseSpec(1000, seed=0))
    amb = ambiguity(straight_drawing(g, layout), g).amb
    assert amb[1] == pytest.approx(0.50, abs=0.05)
