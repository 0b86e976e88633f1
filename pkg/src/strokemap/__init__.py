"""Online signature stroke mapping with lost box recovery."""

from .dtw import DtwPath, PathNode, brute_force_path, map_strokes
from .evaluation import divide_sections, mapping_error, render_mapping
from .extremes import DetectionParams, Extreme, ExtremeKind, find_extremes
from .ingest import ColumnMap, Trajectory, load_svc2004, parse_svc2004
from .pipeline import analyze, map_signatures
from .segmentation import Stroke, segment_strokes
from .similarity import LayeredMatrix, build_similarity_layers

__all__ = [
    "ColumnMap", "DetectionParams", "DtwPath", "Extreme", "ExtremeKind",
    "LayeredMatrix", "PathNode", "Stroke", "Trajectory", "analyze",
    "brute_force_path", "build_similarity_layers", "divide_sections",
    "find_extremes", "load_svc2004", "map_signatures", "map_strokes",
    "mapping_error", "parse_svc2004", "render_mapping", "segment_strokes",
]
