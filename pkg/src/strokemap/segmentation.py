"""Cutting trajectories into strokes.

Strokes run between consecutive segment borders of a pen-down run. Borders are
y-maxima and pen events; the remaining extremes stay inside strokes as
features. Adjacent strokes share their border sample.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .extremes import Extreme, ExtremeKind, detect_pen_events
from .ingest import Trajectory, down_runs

BORDER_KINDS = frozenset(
    {ExtremeKind.Y_MAX, ExtremeKind.TOUCHDOWN, ExtremeKind.TAKEOFF, ExtremeKind.DOT}
)


@dataclass(frozen=True)
class Stroke:
    traj_ref: str
    start_index: int
    end_index: int
    border_start: Extreme
    border_end: Extreme
    interior_extremes: tuple[Extreme, ...] = field(default=())

    def __post_init__(self):
        if self.end_index < self.start_index:
            raise ValueError("stroke ends before it starts")
        if self.start_index == self.end_index and not self.is_dot:
            raise ValueError("only a dot stroke may span a single sample")

    @property
    def is_dot(self) -> bool:
        return self.border_start.kind is ExtremeKind.DOT

    @property
    def indices(self) -> range:
        return range(self.start_index, self.end_index + 1)

    def __len__(self) -> int:
        return self.end_index - self.start_index + 1


def segment_strokes(traj: Trajectory, extremes: Sequence[Extreme]) -> list[Stroke]:
    """Split every pen-down run of ``traj`` at its border extremes.

    Pen events are recomputed from ``traj``, so a run always has at least its
    touchdown and takeoff as borders even when ``extremes`` only lists axis
    extremes. Pen-up spans yield no strokes.
    """
    events = detect_pen_events(traj)
    event_indices = {e.index for e in events}
    ordered = sorted(
        events + [e for e in extremes if e.index not in event_indices],
        key=Extreme.sort_key,
    )
    strokes = []
    for run in down_runs(traj):
        inside = [e for e in ordered if run.start_index <= e.index <= run.end_index]
        borders = _unique_by_index(e for e in inside if e.kind in BORDER_KINDS)
        if len(run) == 1:
            dot = borders[0]
            strokes.append(Stroke(traj.source_id, dot.index, dot.index, dot, dot))
            continue
        for a, b in zip(borders, borders[1:]):
            interior = tuple(e for e in inside if a.index < e.index < b.index)
            strokes.append(Stroke(traj.source_id, a.index, b.index, a, b, interior))
    return strokes


def _unique_by_index(extremes) -> list[Extreme]:
    out: list[Extreme] = []
    for e in extremes:
        if out and out[-1].index == e.index:
            continue
        out.append(e)
    return out


def validate_stroke(stroke: Stroke, extremes: Sequence[Extreme] | None = None) -> bool:
    """Check that a stroke between two y-maxima dips through a y-minimum.

    Strokes bordered by a pen event are exempt. ``extremes`` defaults to the
    stroke's own interior extremes.
    """
    if stroke.border_start.kind.is_pen_event or stroke.border_end.kind.is_pen_event:
        return True
    if extremes is None:
        extremes = stroke.interior_extremes
    return any(
        e.kind is ExtremeKind.Y_MIN and stroke.start_index < e.index < stroke.end_index
        for e in extremes
    )
