"""Edge-Path bundling of pre-embedded graphs, with drawing quality metrics."""

__version__ = "0.1.0"

from .bundling import (
    BundledDrawing,
    BundlingParams,
    PathResult,
    bundle_stats,
    constrained_dijkstra,
    curve_polyline,
    edge_path_bundle,
    smooth_control_points,
)
from .datasets import CubesSpec, NoiseSpec, generate_cubes, generate_noise, random_geometric_graph, random_spanning_tree
from .drawing import Drawing, straight_drawing
from .graph import UNREACHABLE, Edge, Graph, Layout, connected_components, euclidean_length, hop_distance
from .io import GraphFormatError, dump_drawing, load_drawing, load_graph, write_edge_list
from .metrics import (
    AmbiguityConfig,
    MetricsReport,
    ambiguity,
    build_ambiguity_grid,
    detect_ambiguous_pairs,
    distortion,
    evaluate,
    ink_reduction,
)
from .raster import RasterImage, rasterize
from .render import RenderStyle, ambiguity_heatmap, angle_color, distortion_heatmap, render_svg
