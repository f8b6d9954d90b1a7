"""Command line entry point: generate, bundle, metrics, render, compare.

Exit codes: 0 success, 1 bad input (arguments, files, schema), 2 internal
invariant violation. ``EDGEPATH_OUT_DIR`` sets where outputs go when
``--out`` is not given.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import statistics
import sys
import time
from contextlib import contextmanager
from pathlib import Path

from . import __version__
from .bundling import BundlingParams, bundle_stats, edge_path_bundle
from .datasets import CUBES_VARIANTS, CubesSpec, NoiseSpec, generate_cubes, generate_noise, random_geometric_graph
from .drawing import Drawing, straight_drawing
from .io import GraphFormatError, LoadReport, dump_drawing, load_drawing, load_graph, load_trail_drawing, write_edge_list
from .metrics import AmbiguityConfig, RasterConfig, evaluate
from .raster import DegenerateDrawingError
from .render import RenderStyle, ambiguity_heatmap, distortion_heatmap, raster_image, render_svg, write_image
from .verify import InvariantViolation, check_bundled_drawing

OUT_DIR_ENV = "EDGEPATH_OUT_DIR"


class InputError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise InputError(f"{self.prog}: {message}")


class PhaseTimer:
    """Wall-clock milliseconds per named phase, accumulated over repeats."""

    def __init__(self):
        self.runs: list[dict[str, float]] = []
        self.totals: list[float] = []

    @contextmanager
    def run(self):
        self.runs.append({})
        t0 = time.perf_counter()
        try:
            yield self
        finally:
            self.totals.append((time.perf_counter() - t0) * 1000)

    @contextmanager
    def phase(self, name: str):
        t0 = time.perf_counter()
        try:
            yield
        finally:
            cur = self.runs[-1]
            cur[name] = cur.get(name, 0.0) + (time.perf_counter() - t0) * 1000

    def report(self) -> dict:
        names = list(self.runs[0]) if self.runs else []

        def summary(vals):
            return {"mean_ms": statistics.fmean(vals), "stdev_ms": statistics.stdev(vals) if len(vals) > 1 else 0.0}

        return {
            "repeats": len(self.runs),
            "phases": {n: summary([r.get(n, 0.0) for r in self.runs]) for n in names},
            "total": summary(self.totals),
        }


def timing_report(fn, repeat: int = 1) -> tuple[object, dict]:
    """Call ``fn(timer)`` ``repeat`` times; returns the last result and the timing summary."""
    if repeat < 1:
        raise InputError("--repeat must be >= 1")
    timer = PhaseTimer()
    result = None
    for _ in range(repeat):
        with timer.run():
            result = fn(timer)
    return result, timer.report()


def _out_path(given, default_name):
    if given:
        return Path(given)
    return Path(os.environ.get(OUT_DIR_ENV, ".")) / default_name


def _parse_delta(text: str) -> tuple[int, ...]:
    try:
        if ".." in text:
            lo, hi = text.split("..", 1)
            vals = tuple(range(int(lo), int(hi) + 1))
        else:
            vals = tuple(int(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad delta range {text!r}; use e.g. 1..5 or 1,2,3") from None
    if not vals or min(vals) < 1:
        raise argparse.ArgumentTypeError("delta values must be >= 1")
    return vals


def _read_config(path) -> dict[str, str]:
    out = {}
    try:
        with open(path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, 1):
                line = line.split("#", 1)[0].strip()
                if not line:
                    continue
                if "=" not in line:
                    raise InputError(f"{path}:{lineno}: expected key=value")
                key, val = (p.strip() for p in line.split("=", 1))
                out[key.lstrip("-").replace("-", "_")] = val
    except OSError as exc:
        raise InputError(f"cannot read config {path}: {exc.strerror}") from None
    return out


def _emit(args, payload: dict, text: str) -> None:
    if args.json:
        print(json.dumps(payload, sort_keys=True))
    else:
        print(text)


# -- subcommands -------------------------------------------------------------------


def cmd_generate(args) -> int:
    if args.kind == "cubes":
        spec = CubesSpec(args.variant, args.n, args.side, args.directed, args.seed, args.extra_edges)
        g, layout = generate_cubes(spec)
    elif args.kind == "noise":
        g, layout = generate_noise(NoiseSpec(args.n, args.seed))
    else:
        g, layout = random_geometric_graph(args.n, args.m, args.seed, args.directed)
    out = _out_path(args.out, f"{args.kind}.txt")
    write_edge_list(out, g, layout)
    _emit(args, {"out": str(out), "vertices": g.vertex_count, "edges": g.edge_count, "directed": g.directed},
          f"wrote {out}: {g.vertex_count} vertices, {g.edge_count} edges")
    return 0


def _load_input_graph(path, fmt, directed_flag, report):
    directed = {"auto": None, "on": True, "off": False}[directed_flag]
    return load_graph(path, fmt, directed=directed, report=report)


def cmd_bundle(args) -> int:
    params = BundlingParams(args.k, args.d, args.smoothing, args.samples, args.threshold_on)
    report = LoadReport()

    def once(timer):
        with timer.phase("load"):
            g, layout = _load_input_graph(args.input, args.format, args.directed, report)
        with timer.phase("bundle"):
            drawing = edge_path_bundle(g, layout, params)
        with timer.phase("verify"):
            check_bundled_drawing(drawing)
        return drawing

    drawing, timing = timing_report(once, args.repeat)
    out = _out_path(args.out, "drawing.json")
    dump_drawing(drawing, out)
    if args.straight_out:
        dump_drawing(straight_drawing(drawing.graph, drawing.layout), args.straight_out)
    stats = bundle_stats(drawing)
    payload = {"out": str(out), **stats, "self_loops_dropped": report.self_loops_dropped // args.repeat,
               "duplicates_dropped": report.duplicates_dropped // args.repeat, "timing": timing}
    _emit(args, payload,
          f"wrote {out}: {stats['bundled_count']} bundled, {stats['locked_count']} locked, "
          f"{stats['unbundled_count']} untouched of {drawing.graph.edge_count} edges "
          f"({timing['phases']['bundle']['mean_ms']:.1f} ms bundling)")
    return 0


def _load_any_drawing(path, directed=False) -> Drawing:
    if str(path).lower().endswith(".json"):
        return load_drawing(path)
    return load_trail_drawing(path, directed)


def _check_schema(graph, drawing, what):
    if graph.vertex_count != drawing.graph.vertex_count or graph.edges != drawing.graph.edges:
        raise InputError(f"{what} does not match the graph: "
                         f"{drawing.graph.vertex_count} vertices / {drawing.graph.edge_count} edges vs "
                         f"{graph.vertex_count} / {graph.edge_count}")


def _ambiguity_config(args) -> AmbiguityConfig:
    return AmbiguityConfig(args.theta, args.cell_px, args.window, args.delta, args.width)


def _raster_config(args) -> RasterConfig:
    return RasterConfig(args.width, args.line_width, args.vertex_diameter, args.gray_threshold)


def _resolve_graph(args, drawing):
    if args.graph:
        g, _ = load_graph(args.graph, "edge-list")
        _check_schema(g, drawing, "drawing")
        return g
    return drawing.graph


def cmd_metrics(args) -> int:
    def once(timer):
        with timer.phase("load"):
            drawing = _load_any_drawing(args.drawing)
            graph = _resolve_graph(args, drawing)
            if args.baseline:
                baseline = _load_any_drawing(args.baseline)
                _check_schema(graph, baseline, "baseline")
            else:
                baseline = straight_drawing(graph, drawing.layout)
        with timer.phase("metrics"):
            rep = evaluate(drawing, baseline, graph, _ambiguity_config(args), _raster_config(args))
        return rep

    rep, timing = timing_report(once, args.repeat)
    out = _out_path(args.out, "metrics.json")
    payload = rep.to_dict()
    # timing stays out of the file so reruns are byte-identical
    with open(out, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, sort_keys=True)
        fh.write("\n")
    payload["timing"] = timing
    if args.heatmap:
        counts = rep.ambiguity_cell_counts
        write_image(args.heatmap, ambiguity_heatmap(counts, int(counts.max()) if counts.size else 0, args.cell_px))
    amb = " ".join(f"amb{d}={v:.2f}" for d, v in rep.amb.items())
    _emit(args, {k: v for k, v in payload.items() if k not in ("distortion_per_edge", "ambiguity_cell_counts")},
          f"ink={rep.ink_ratio:.2f} dist={rep.distortion_mean:.2f}/{rep.distortion_median:.2f} {amb}  -> {out}")
    return 0


def cmd_render(args) -> int:
    drawing = _load_any_drawing(args.drawing)
    mode = {"plain": "plain", "angle": "angle-colormap", "distortion": "distortion-colormap"}[args.mode]
    style = RenderStyle(args.width, args.line_width, args.vertex_diameter, mode, args.background,
                        not args.no_vertices, args.directed_angles)
    out = _out_path(args.out, "drawing.svg")
    if str(out).lower().endswith((".pgm", ".png")):
        write_image(out, raster_image(drawing, style))
    else:
        out.write_text(render_svg(drawing, style), encoding="utf-8")
    _emit(args, {"out": str(out), "mode": mode}, f"wrote {out}")
    return 0


def cmd_compare(args) -> int:
    baseline = _load_any_drawing(args.baseline)
    graph = _resolve_graph(args, baseline)
    names = args.names or [Path(p).stem for p in args.drawings]
    if len(names) != len(args.drawings):
        raise InputError("--names must match --drawings in length")
    drawings = []
    for p in args.drawings:
        d = _load_any_drawing(p)
        _check_schema(graph, d, p)
        drawings.append(d)
    ac, rc = _ambiguity_config(args), _raster_config(args)
    reports = [evaluate(d, baseline, graph, ac, rc) for d in drawings]
    out_dir = Path(args.out_dir or os.environ.get(OUT_DIR_ENV, "."))
    out_dir.mkdir(parents=True, exist_ok=True)
    deltas = list(ac.delta_range)
    header = ["name", "ink", "dist_mean", "dist_median"] + [f"amb{d}" for d in deltas]
    rows = [[n, f"{r.ink_ratio:.2f}", f"{r.distortion_mean:.2f}", f"{r.distortion_median:.2f}"]
            + [f"{r.amb[d]:.2f}" for d in deltas] for n, r in zip(names, reports)]
    with open(out_dir / "compare.csv", "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        w.writerows(rows)
    widths = [max(len(str(x)) for x in col) for col in zip(header, *rows)]
    table = "\n".join("  ".join(str(c).rjust(wd) for c, wd in zip(row, widths)) for row in [header, *rows])
    (out_dir / "compare.txt").write_text(table + "\n", encoding="utf-8")
    gmax = max(int(r.ambiguity_cell_counts.max()) if r.ambiguity_cell_counts.size else 0 for r in reports)
    for n, r in zip(names, reports):
        write_image(out_dir / f"{n}_ambiguity.pgm", ambiguity_heatmap(r.ambiguity_cell_counts, gmax, args.cell_px))
    svgs = distortion_heatmap(drawings, [r.distortion_per_edge for r in reports],
                              RenderStyle(width_px=rc.width_px))
    for n, svg in zip(names, svgs):
        (out_dir / f"{n}_distortion.svg").write_text(svg, encoding="utf-8")
    _emit(args, {"rows": [dict(zip(header, row)) for row in rows], "out_dir": str(out_dir)}, table)
    return 0


# -- parser ------------------------------------------------------------------------


def _add_common(p):
    p.add_argument("--json", action="store_true", help="print a machine-readable JSON summary (default: off)")
    p.add_argument("--config", help="flat key=value file whose keys mirror flags; flags win (default: none)")


def _add_metric_flags(p):
    p.add_argument("--graph", help="edge-list file the drawing must match (default: the drawing's own graph)")
    p.add_argument("--theta", type=float, default=7.5, help="ambiguity angle threshold in degrees (default: 7.5)")
    p.add_argument("--delta", type=_parse_delta, default=(1, 2, 3, 4, 5), help="hop thresholds, e.g. 1..5 (default: 1..5)")
    p.add_argument("--cell-px", type=int, default=8, help="ambiguity grid cell size in pixels (default: 8)")
    p.add_argument("--window", type=int, default=3, help="sliding window size in cells, odd (default: 3)")
    p.add_argument("--gray-threshold", type=int, default=1, help="gray value counted as ink, 0..255 (default: 1)")
    _add_raster_flags(p)


def _add_raster_flags(p):
    p.add_argument("--width", type=int, default=1600, help="image width in pixels (default: 1600)")
    p.add_argument("--line-width", type=float, default=1.0, help="edge stroke width in pixels (default: 1)")
    p.add_argument("--vertex-diameter", type=float, default=4.0, help="vertex disk diameter in pixels (default: 4)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="edgepath", description="Edge-Path bundling, drawing metrics and rendering.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    gen = sub.add_parser("generate", help="write a synthetic benchmark graph as an edge list")
    gsub = gen.add_subparsers(dest="kind", required=True, parser_class=_Parser)
    cubes = gsub.add_parser("cubes", help="four-square Cubes 1R-4R benchmark")
    cubes.add_argument("--variant", choices=CUBES_VARIANTS, default="2R", help="Cubes variant (default: 2R)")
    cubes.add_argument("--n", type=int, default=100, help="vertex count, multiple of 4 (default: 100)")
    cubes.add_argument("--side", type=float, default=1.0, help="square side length (default: 1.0)")
    cubes.add_argument("--extra-edges", type=int, default=None, help="extra random edges per square (default: square size // 8)")
    cubes.add_argument("--directed", action="store_true", help="orient edges, half of the inter-square edges each way (default: off)")
    noise = gsub.add_parser("noise", help="random perfect matching in the unit square")
    noise.add_argument("--n", type=int, default=1000, help="vertex count, even (default: 1000)")
    rgg = gsub.add_parser("rgg", help="random geometric graph of the m closest point pairs")
    rgg.add_argument("--n", type=int, default=1700, help="vertex count (default: 1700)")
    rgg.add_argument("--m", type=int, default=6500, help="edge count (default: 6500)")
    rgg.add_argument("--directed", action="store_true", help="orient edges randomly (default: off)")
    for p in (cubes, noise, rgg):
        p.add_argument("--seed", type=int, default=0, help="random seed (default: 0)")
        p.add_argument("--out", help="output edge-list path (default: $EDGEPATH_OUT_DIR/<kind>.txt)")
        _add_common(p)
        p.set_defaults(func=cmd_generate)

    b = sub.add_parser("bundle", help="Edge-Path bundle a graph and write a JSON drawing")
    b.add_argument("--input", required=True, help="graph file")
    b.add_argument("--format", choices=("edge-list", "trail-set"), default="edge-list", help="input format (default: edge-list)")
    b.add_argument("--k", type=float, default=2.0, help="maximum distortion, > 1 (default: 2.0)")
    b.add_argument("--d", type=float, default=2.0, help="edge weight exponent (default: 2)")
    b.add_argument("--smoothing", type=int, default=2, help="control-point smoothing factor (default: 2)")
    b.add_argument("--samples", type=int, default=8, help="curve samples per spline span (default: 8)")
    b.add_argument("--directed", choices=("auto", "on", "off"), default="auto", help="directedness override (default: auto, from file)")
    b.add_argument("--threshold-on", choices=("geometry", "weight"), default="geometry",
                   help="quantity compared against k (default: geometry)")
    b.add_argument("--out", help="output JSON drawing (default: $EDGEPATH_OUT_DIR/drawing.json)")
    b.add_argument("--straight-out", help="also write the straight-line drawing here (default: none)")
    b.add_argument("--repeat", type=int, default=1, help="repeat and average timings N times (default: 1)")
    _add_common(b)
    b.set_defaults(func=cmd_bundle)

    m = sub.add_parser("metrics", help="ink, distortion and ambiguity of a drawing")
    m.add_argument("--drawing", required=True, help="JSON drawing or trail-set file")
    m.add_argument("--baseline", help="straight-line JSON drawing (default: straight lines of the graph)")
    _add_metric_flags(m)
    m.add_argument("--out", help="metrics JSON path (default: $EDGEPATH_OUT_DIR/metrics.json)")
    m.add_argument("--heatmap", help="write the ambiguity heatmap (.pgm or .png) (default: none)")
    m.add_argument("--repeat", type=int, default=1, help="repeat and average timings N times (default: 1)")
    _add_common(m)
    m.set_defaults(func=cmd_metrics)

    r = sub.add_parser("render", help="draw a JSON drawing as SVG (or PGM/PNG by extension)")
    r.add_argument("--drawing", required=True, help="JSON drawing or trail-set file")
    r.add_argument("--mode", choices=("plain", "angle", "distortion"), default="plain", help="edge colouring (default: plain)")
    r.add_argument("--background", choices=("white", "black"), default="white", help="background colour (default: white)")
    r.add_argument("--no-vertices", action="store_true", help="omit vertex disks (default: drawn)")
    r.add_argument("--directed-angles", action="store_true", help="colour by directed angle over 2 pi (default: undirected)")
    _add_raster_flags(r)
    r.add_argument("--out", help="output path (default: $EDGEPATH_OUT_DIR/drawing.svg)")
    _add_common(r)
    r.set_defaults(func=cmd_render)

    c = sub.add_parser("compare", help="metrics table for several drawings against one baseline")
    c.add_argument("--baseline", required=True, help="straight-line JSON drawing")
    c.add_argument("--drawings", nargs="+", required=True, help="JSON drawings to compare")
    c.add_argument("--names", nargs="+", help="row names (default: file stems)")
    _add_metric_flags(c)
    c.add_argument("--out-dir", help="directory for compare.txt/.csv and heatmaps (default: $EDGEPATH_OUT_DIR)")
    _add_common(c)
    c.set_defaults(func=cmd_compare)
    return parser


def _config_path(argv):
    for i, a in enumerate(argv):
        if a == "--config" and i + 1 < len(argv):
            return argv[i + 1]
        if a.startswith("--config="):
            return a.split("=", 1)[1]
    return None


def _leaf_parser(parser, argv):
    sub = parser
    for tok in argv:
        if tok.startswith("-"):
            continue
        acts = [a for a in sub._actions if isinstance(a, argparse._SubParsersAction)]
        if not acts or tok not in acts[0].choices:
            break
        sub = acts[0].choices[tok]
    return sub


def _apply_config(parser, argv):
    """Use config-file values as parser defaults so explicit flags still win."""
    argv = list(sys.argv[1:] if argv is None else argv)
    path = _config_path(argv)
    if path:
        values = _read_config(path)
        sub = _leaf_parser(parser, argv)
        by_dest = {a.dest: a for a in sub._actions}
        unknown = sorted(k for k in values if k not in by_dest or k in ("help", "config"))
        if unknown:
            raise InputError(f"unknown config keys: {', '.join(unknown)}")
        defaults = {}
        for key, raw in values.items():
            act = by_dest[key]
            try:
                if isinstance(act, argparse._StoreTrueAction):
                    val = raw.lower() in ("1", "true", "yes", "on")
                elif act.nargs in ("+", "*"):
                    val = [act.type(v) if act.type else v for v in raw.split()]
                else:
                    val = act.type(raw) if act.type else raw
            except (ValueError, argparse.ArgumentTypeError) as exc:
                raise InputError(f"config {key}={raw!r}: {exc}") from None
            if act.choices is not None and val not in act.choices:
                raise InputError(f"config value {raw!r} not allowed for {key}")
            act.required = False
            defaults[key] = val
        sub.set_defaults(**defaults)
    return parser.parse_args(argv)


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = _apply_config(parser, argv)
        return args.func(args)
    except InvariantViolation as exc:
        print(f"edgepath: internal invariant violated: {exc}", file=sys.stderr)
        return 2
    except (InputError, GraphFormatError, DegenerateDrawingError, FileNotFoundError, argparse.ArgumentTypeError) as exc:
        print(f"edgepath: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"edgepath: invalid input: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"edgepath: {exc}", file=sys.stderr)
        return 1


def main() -> None:  # pragma: no cover
    sys.exit(run())
