"""Stroke-pair scores and the three-layer similarity matrix.

Layer 1 scores reference stroke ``i`` against test stroke ``j``. Layer 2 scores
reference stroke ``i`` against test strokes ``j`` and ``j+1`` merged; layer 3
scores reference strokes ``i`` and ``i+1`` merged against test stroke ``j``.
Cells whose merge is not allowed hold NaN.

The pairwise score is a simple composite of border classes and stroke shape.
Nothing downstream depends on its particulars: the path search accepts any
matrix with values in [0, 1].
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

from .ingest import Trajectory
from .segmentation import Stroke

CLASS_WEIGHT = 0.5
SHAPE_WEIGHT = 0.5


@dataclass(frozen=True)
class StrokeFeatures:
    duration: int
    arc_length: float
    net_dx: int
    net_dy: int
    border_class_start: int
    border_class_end: int
    interior_class_bag: tuple[int, ...] = ()

    @property
    def interior_classes(self) -> Counter:
        return Counter(self.interior_class_bag)


def stroke_features(stroke: Stroke, traj: Trajectory) -> StrokeFeatures:
    pts = [traj[i].xy for i in stroke.indices]
    arc = sum(math.dist(a, b) for a, b in zip(pts, pts[1:]))
    return StrokeFeatures(
        duration=len(pts),
        arc_length=arc,
        net_dx=pts[-1][0] - pts[0][0],
        net_dy=pts[-1][1] - pts[0][1],
        border_class_start=stroke.border_start.class_id,
        border_class_end=stroke.border_end.class_id,
        interior_class_bag=tuple(sorted(e.class_id for e in stroke.interior_extremes)),
    )


def _ratio(a: float, b: float) -> float:
    hi = max(a, b)
    if hi == 0:
        return 1.0
    return min(a, b) / hi


def _direction_agreement(a: StrokeFeatures, b: StrokeFeatures) -> float:
    na = math.hypot(a.net_dx, a.net_dy)
    nb = math.hypot(b.net_dx, b.net_dy)
    if na == 0 and nb == 0:
        return 1.0
    if na == 0 or nb == 0:
        return 0.5
    cos = (a.net_dx * b.net_dx + a.net_dy * b.net_dy) / (na * nb)
    return min(1.0, max(0.0, (cos + 1.0) / 2.0))


def stroke_similarity(a: StrokeFeatures, b: StrokeFeatures) -> float:
    """Score in [0, 1]; symmetric, and 1 for identical features."""
    matches = (a.border_class_start == b.border_class_start) + (
        a.border_class_end == b.border_class_end
    )
    class_term = matches / 2
    shape_term = (
        _ratio(a.duration, b.duration)
        + _ratio(a.arc_length, b.arc_length)
        + _direction_agreement(a, b)
    ) / 3
    return CLASS_WEIGHT * class_term + SHAPE_WEIGHT * shape_term


def merge_adjacent(s1: Stroke, s2: Stroke, traj: Trajectory) -> Stroke | None:
    """Join two strokes that share a border inside one pen-down run.

    The shared border becomes an interior extreme of the result. Returns None
    when the strokes do not touch or a pen-up sample separates them.
    """
    if s1.traj_ref != s2.traj_ref or s1.is_dot or s2.is_dot:
        return None
    if s1.end_index != s2.start_index:
        return None
    if not all(traj[i].pen for i in range(s1.start_index, s2.end_index + 1)):
        return None
    return Stroke(
        traj_ref=s1.traj_ref,
        start_index=s1.start_index,
        end_index=s2.end_index,
        border_start=s1.border_start,
        border_end=s2.border_end,
        interior_extremes=s1.interior_extremes + (s1.border_end,) + s2.interior_extremes,
    )


@dataclass
class LayeredMatrix:
    """Three score grids; NaN marks an absent cell."""

    layer1: np.ndarray
    layer2: np.ndarray
    layer3: np.ndarray

    def __post_init__(self):
        self.layer1 = np.asarray(self.layer1, dtype=float)
        r, t = self.layer1.shape
        self.layer2 = _as_grid(self.layer2, (r, max(t - 1, 0)))
        self.layer3 = _as_grid(self.layer3, (max(r - 1, 0), t))
        for n, grid in enumerate(self.layers, 1):
            present = grid[~np.isnan(grid)]
            if present.size and (present.min() < 0 or present.max() > 1):
                raise ValueError(f"layer {n} has scores outside [0, 1]")
        if np.isnan(self.layer1).any():
            raise ValueError("layer 1 may not have absent cells")

    @classmethod
    def single(cls, grid) -> "LayeredMatrix":
        """Wrap one grid as layer 1, with both combinatorial layers absent."""
        return cls(np.asarray(grid, dtype=float), None, None)

    @property
    def shape(self) -> tuple[int, int]:
        return self.layer1.shape

    @property
    def layers(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        return (self.layer1, self.layer2, self.layer3)

    def layer(self, n: int) -> np.ndarray:
        return self.layers[n - 1]

    def score(self, layer: int, i: int, j: int) -> float | None:
        grid = self.layer(layer)
        if 0 <= i < grid.shape[0] and 0 <= j < grid.shape[1]:
            v = grid[i, j]
            return None if math.isnan(v) else float(v)
        return None

    def cells(self) -> Iterator[tuple[int, int, int, float]]:
        """Yield ``(layer, i, j, score)`` for every present cell."""
        for n, grid in enumerate(self.layers, 1):
            for (i, j), v in np.ndenumerate(grid):
                if not math.isnan(v):
                    yield n, i, j, float(v)

    def cell_count(self) -> int:
        return sum(int((~np.isnan(g)).sum()) for g in self.layers)

    def copy(self) -> "LayeredMatrix":
        return LayeredMatrix(self.layer1.copy(), self.layer2.copy(), self.layer3.copy())


def _as_grid(grid, shape) -> np.ndarray:
    if grid is None:
        return np.full(shape, np.nan)
    grid = np.asarray(grid, dtype=float)
    if grid.size == 0 and 0 in shape:
        return np.full(shape, np.nan)
    if grid.shape != shape:
        raise ValueError(f"expected a {shape} grid, got {grid.shape}")
    return grid


def build_similarity_layers(
    ref_strokes: Sequence[Stroke],
    test_strokes: Sequence[Stroke],
    traj_ref: Trajectory,
    traj_test: Trajectory,
) -> LayeredMatrix:
    if not ref_strokes or not test_strokes:
        raise ValueError("both signatures need at least one stroke")
    ref = [stroke_features(s, traj_ref) for s in ref_strokes]
    test = [stroke_features(s, traj_test) for s in test_strokes]
    ref_pairs = _merged_features(ref_strokes, traj_ref)
    test_pairs = _merged_features(test_strokes, traj_test)

    r, t = len(ref), len(test)
    layer1 = np.array([[stroke_similarity(a, b) for b in test] for a in ref])
    layer2 = np.full((r, t - 1), np.nan)
    layer3 = np.full((r - 1, t), np.nan)
    for j, merged in enumerate(test_pairs):
        if merged is not None:
            layer2[:, j] = [stroke_similarity(a, merged) for a in ref]
    for i, merged in enumerate(ref_pairs):
        if merged is not None:
            layer3[i, :] = [stroke_similarity(merged, b) for b in test]
    return LayeredMatrix(layer1, layer2, layer3)


def _merged_features(strokes: Sequence[Stroke], traj: Trajectory):
    out = []
    for a, b in zip(strokes, strokes[1:]):
        merged = merge_adjacent(a, b, traj)
        out.append(None if merged is None else stroke_features(merged, traj))
    return out


def format_layers(layers: LayeredMatrix, precision: int = 4) -> str:
    """Text dump, one block per layer; absent cells are written as ``-``."""
    lines = []
    for n, grid in enumerate(layers.layers, 1):
        lines.append(f"layer {n} {grid.shape[0]} {grid.shape[1]}")
        for row in grid:
            lines.append(
                " ".join("-" if math.isnan(v) else f"{v:.{precision}f}" for v in row)
            )
    return "\n".join(lines) + "\n"


def parse_layers(text: str) -> LayeredMatrix:
    """Read :func:`format_layers` output. Missing layers 2/3 are all-absent."""
    grids: dict[int, np.ndarray] = {}
    lines = [ln.split() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln and not ln[0].startswith("#")]
    k = 0
    while k < len(lines):
        head = lines[k]
        if head[0] != "layer" or len(head) != 4:
            raise ValueError(f"expected 'layer N ROWS COLS', got {' '.join(head)!r}")
        n, rows, cols = (int(v) for v in head[1:])
        body = lines[k + 1:k + 1 + rows]
        if len(body) != rows or any(len(row) != cols for row in body):
            raise ValueError(f"layer {n}: expected {rows} rows of {cols} values")
        grids[n] = np.array(
            [[np.nan if v == "-" else float(v) for v in row] for row in body],
            dtype=float,
        ).reshape(rows, cols)
        k += 1 + rows
    if 1 not in grids:
        raise ValueError("layer 1 is required")
    return LayeredMatrix(grids[1], grids.get(2), grids.get(3))
