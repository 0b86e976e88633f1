"""End-to-end wiring: file -> extremes -> strokes -> layers -> path."""

from __future__ import annotations

from dataclasses import dataclass

from .dtw import DtwPath, map_strokes
from .extremes import DetectionParams, Extreme, find_extremes
from .ingest import Trajectory
from .segmentation import Stroke, segment_strokes
from .similarity import LayeredMatrix, build_similarity_layers


@dataclass(frozen=True)
class Signature:
    traj: Trajectory
    extremes: list[Extreme]
    strokes: list[Stroke]


def analyze(traj: Trajectory, params: DetectionParams = DetectionParams()) -> Signature:
    extremes = find_extremes(traj, params)
    return Signature(traj, extremes, segment_strokes(traj, extremes))


@dataclass(frozen=True)
class Mapping:
    ref: Signature
    test: Signature
    layers: LayeredMatrix
    path: DtwPath


def map_signatures(ref: Signature, test: Signature, lbr: bool = True) -> Mapping:
    layers = build_similarity_layers(ref.strokes, test.strokes, ref.traj, test.traj)
    return Mapping(ref, test, layers, map_strokes(layers, lbr=lbr))
