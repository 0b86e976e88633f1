"""Extreme detection and the nineteen-class extreme taxonomy.

Axis extremes are samples that are the *unique* maximum (or minimum) of the
``window`` samples on either side, further thinned so that two extremes of the
same kind are more than ``gap`` samples apart. Pen events (touchdown, takeoff
and isolated dots) are extremes in their own right.

Classes 0-15 pack four bits::

    bit 3-2  quartet the stroke arrives from (quartet of p(t-1) around p(t))
    bit 1    0 = two-quartet (basic) stroke, 1 = single-quartet (combinatorial)
    bit 0    1 = clockwise, 0 = anticlockwise

Classes 16, 17 and 18 are touchdown, takeoff and dot.

Quartets are named in screen orientation, i.e. "top" is the side of smaller
raw y. That is the orientation in which the cross-product rotation test
``C >= 0`` reads as clockwise, so the two bits agree about geometry.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum, IntEnum
from typing import Sequence

import numpy as np

from .ingest import PenKind, PenRun, Trajectory, pen_runs, down_runs

TOUCHDOWN_CLASS = 16
TAKEOFF_CLASS = 17
DOT_CLASS = 18


class ExtremeKind(str, Enum):
    X_MAX = "x-max"
    X_MIN = "x-min"
    Y_MAX = "y-max"
    Y_MIN = "y-min"
    TOUCHDOWN = "touchdown"
    TAKEOFF = "takeoff"
    DOT = "dot"

    @property
    def is_pen_event(self) -> bool:
        return self in PEN_EVENT_CLASSES


PEN_EVENT_CLASSES = {
    ExtremeKind.TOUCHDOWN: TOUCHDOWN_CLASS,
    ExtremeKind.TAKEOFF: TAKEOFF_CLASS,
    ExtremeKind.DOT: DOT_CLASS,
}

# Sort order for extremes sharing an index; pen events first.
_KIND_ORDER = {
    kind: n
    for n, kind in enumerate(
        sorted(ExtremeKind, key=lambda k: not k.is_pen_event)
    )
}


class Polarity(str, Enum):
    MAX = "max"
    MIN = "min"


class Rotation(str, Enum):
    CLOCKWISE = "clockwise"
    ANTICLOCKWISE = "anticlockwise"
    NONE = "none"


class Quartet(IntEnum):
    TOP_LEFT = 0b00
    TOP_RIGHT = 0b01
    BOTTOM_LEFT = 0b10
    BOTTOM_RIGHT = 0b11

    @property
    def bits(self) -> str:
        return format(int(self), "02b")


# keyed by (sign of dx, sign of dy); dy < 0 is "top"
_QUARTET_BY_SIGNS = {
    (-1, -1): Quartet.TOP_LEFT,
    (1, -1): Quartet.TOP_RIGHT,
    (-1, 1): Quartet.BOTTOM_LEFT,
    (1, 1): Quartet.BOTTOM_RIGHT,
}


class DegenerateGeometryError(ValueError):
    pass


@dataclass(frozen=True)
class DetectionParams:
    window: int = 3
    gap: int = 5

    def __post_init__(self):
        if self.window < 1 or self.gap < 1:
            raise ValueError(
                f"window and gap must be >= 1, got {self.window}, {self.gap}"
            )


def class_id_from_bits(quartet: int, single_quartet: bool, clockwise: bool) -> int:
    return (int(quartet) << 2) | (int(single_quartet) << 1) | int(clockwise)


def bits_of_class(class_id: int) -> tuple[Quartet, bool, bool]:
    """Inverse of :func:`class_id_from_bits` for ids 0-15."""
    if not 0 <= class_id < 16:
        raise ValueError(f"class {class_id} has no bit decomposition")
    return Quartet(class_id >> 2), bool(class_id & 0b10), bool(class_id & 0b01)


@dataclass(frozen=True)
class Extreme:
    index: int
    kind: ExtremeKind
    class_id: int
    rotation: Rotation = Rotation.NONE

    def __post_init__(self):
        if not 0 <= self.class_id <= 18:
            raise ValueError(f"class id {self.class_id} out of range")
        if self.kind.is_pen_event:
            if self.class_id != PEN_EVENT_CLASSES[self.kind]:
                raise ValueError(f"{self.kind.value} must have class "
                                 f"{PEN_EVENT_CLASSES[self.kind]}")
            if self.rotation is not Rotation.NONE:
                raise ValueError("pen events carry no rotation")
        else:
            if self.class_id >= 16:
                raise ValueError(f"axis extreme cannot have class {self.class_id}")
            clockwise = bool(self.class_id & 1)
            if self.rotation is not (
                Rotation.CLOCKWISE if clockwise else Rotation.ANTICLOCKWISE
            ):
                raise ValueError("rotation disagrees with class bit 0")

    @property
    def bits(self) -> str:
        return format(self.class_id, "04b") if self.class_id < 16 else ""

    def sort_key(self):
        return (self.index, _KIND_ORDER[self.kind])


def detect_axis_extremes(
    series: Sequence[float], params: DetectionParams, polarity: Polarity
) -> list[int]:
    """Indices where ``series`` has a unique window extreme of ``polarity``.

    Windows are truncated at the ends of the series. Candidates are then
    scanned left to right and dropped if they lie within ``gap`` samples of
    the last accepted index.
    """
    values = np.asarray(series, dtype=float)
    if values.size == 0:
        return []
    if polarity is Polarity.MIN:
        values = -values
    w, n = params.window, values.size
    pad = np.full(w, -np.inf)
    padded = np.concatenate([pad, values, pad])
    # largest other value in each truncated window; padding never wins
    others = padded[:n].copy()
    for k in range(1, 2 * w + 1):
        if k != w:
            np.maximum(others, padded[k:k + n], out=others)
    candidates = np.flatnonzero(values > others)

    accepted: list[int] = []
    for t in candidates:
        if not accepted or t - accepted[-1] > params.gap:
            accepted.append(int(t))
    return accepted


def detect_pen_events(traj: Trajectory) -> list[Extreme]:
    events = []
    for run in down_runs(traj):
        if len(run) == 1:
            events.append(Extreme(run.start_index, ExtremeKind.DOT, DOT_CLASS))
        else:
            events.append(
                Extreme(run.start_index, ExtremeKind.TOUCHDOWN, TOUCHDOWN_CLASS)
            )
            events.append(Extreme(run.end_index, ExtremeKind.TAKEOFF, TAKEOFF_CLASS))
    return events


def cross(p1, p2, p3) -> float:
    return (p2[0] - p1[0]) * (p3[1] - p2[1]) - (p2[1] - p1[1]) * (p3[0] - p2[0])


def rotation(p1, p2, p3) -> Rotation:
    """Clockwise when the turn p1 -> p2 -> p3 has a non-negative cross product."""
    return Rotation.CLOCKWISE if cross(p1, p2, p3) >= 0 else Rotation.ANTICLOCKWISE


def _sign(v) -> int:
    return (v > 0) - (v < 0)


def quartet_of(neighbor, center, opposite) -> Quartet:
    """Quartet around ``center`` that ``neighbor`` falls in.

    A neighbor lying on an axis through the center is turned toward
    ``opposite`` along the shorter arc, which amounts to borrowing the
    opposite point's sign on the missing coordinate. When the opposite point
    gives no direction either, the neighbor is turned clockwise.
    """
    dx = neighbor[0] - center[0]
    dy = neighbor[1] - center[1]
    if dx == 0 and dy == 0:
        raise DegenerateGeometryError(
            f"neighbor {tuple(neighbor)} coincides with center"
        )
    sx, sy = _sign(dx), _sign(dy)
    if sx == 0:
        sx = _sign(opposite[0] - center[0]) or -sy
    elif sy == 0:
        sy = _sign(opposite[1] - center[1]) or sx
    return _QUARTET_BY_SIGNS[(sx, sy)]


def _pen_event_at(run: PenRun, index: int) -> Extreme:
    if len(run) == 1:
        return Extreme(index, ExtremeKind.DOT, DOT_CLASS)
    if index == run.start_index:
        return Extreme(index, ExtremeKind.TOUCHDOWN, TOUCHDOWN_CLASS)
    return Extreme(index, ExtremeKind.TAKEOFF, TAKEOFF_CLASS)


def classify_extreme(
    traj: Trajectory, index: int, kind: ExtremeKind, runs: Sequence[PenRun] | None = None
) -> Extreme:
    """Classify the axis extreme ``kind`` found at ``index``.

    Samples at either end of a pen-down run have no neighbor on one side and
    are reported as the pen event at that position instead.
    """
    if runs is None:
        runs = pen_runs(traj)
    run = next(r for r in runs if index in r)
    if run.kind is not PenKind.DOWN:
        raise ValueError(f"sample {index} is not pen-down")
    if index in (run.start_index, run.end_index):
        return _pen_event_at(run, index)

    before = traj[index - 1].xy
    here = traj[index].xy
    after = traj[index + 1].xy
    if before == here == after:
        raise DegenerateGeometryError(f"samples around {index} coincide")
    origin = quartet_of(before, here, after)
    destination = quartet_of(after, here, before)
    # Diagonally opposite quartets cannot occur at a strict axis extreme;
    # they are filed as two-quartet strokes.
    single = origin == destination
    turn = rotation(before, here, after)
    class_id = class_id_from_bits(origin, single, turn is Rotation.CLOCKWISE)
    return Extreme(index, kind, class_id, turn)


_AXES = (
    (ExtremeKind.X_MAX, "xs", Polarity.MAX),
    (ExtremeKind.X_MIN, "xs", Polarity.MIN),
    (ExtremeKind.Y_MAX, "ys", Polarity.MAX),
    (ExtremeKind.Y_MIN, "ys", Polarity.MIN),
)


def find_extremes(traj: Trajectory, params: DetectionParams = DetectionParams()) -> list[Extreme]:
    """All axis extremes and pen events of ``traj``, sorted by index.

    Detection runs separately on every pen-down run; pen-up samples never
    produce extremes. An axis extreme that falls on a pen event is dropped in
    favor of the event.
    """
    runs = pen_runs(traj)
    events = detect_pen_events(traj)
    event_indices = {e.index for e in events}
    xs, ys = traj.xs, traj.ys
    found = list(events)
    for run in runs:
        if run.kind is not PenKind.DOWN:
            continue
        lo, hi = run.start_index, run.end_index + 1
        for kind, axis, polarity in _AXES:
            series = (xs if axis == "xs" else ys)[lo:hi]
            for offset in detect_axis_extremes(series, params, polarity):
                index = lo + offset
                if index in event_indices:
                    continue
                found.append(classify_extreme(traj, index, kind, runs))
    return sorted(found, key=Extreme.sort_key)
