"""Reading and writing SVC2004-format signature files.

An SVC2004 file starts with a line holding the number of samples, followed by
one whitespace-separated row per sample. The competition files carry seven
columns (X, Y, timestamp, button status, azimuth, altitude, pressure); only
the first four are read here and everything after them is ignored.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Iterable, Sequence

FIELDS = ("x", "y", "t", "pen")


class ParseError(ValueError):
    """Base class for malformed signature files. ``line`` is 1-based."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class CountMismatchError(ParseError):
    pass


class NonNumericError(ParseError):
    pass


class TooFewColumnsError(ParseError):
    pass


class TimestampOrderError(ParseError):
    pass


@dataclass(frozen=True)
class ColumnMap:
    """Names the meaning of each of the first four columns, in file order."""

    order: tuple[str, str, str, str] = FIELDS

    def __post_init__(self):
        if sorted(self.order) != sorted(FIELDS):
            raise ValueError(
                f"column order must be a permutation of {FIELDS}, got {self.order}"
            )

    @classmethod
    def from_string(cls, text: str) -> "ColumnMap":
        """Build from a comma-separated list such as ``"t,x,y,pen"``."""
        parts = tuple(p.strip().lower() for p in text.split(","))
        if len(parts) != 4:
            raise ValueError(f"expected four column names, got {text!r}")
        return cls(parts)  # type: ignore[arg-type]

    def position(self, field: str) -> int:
        return self.order.index(field)


SVC2004_COLUMNS = ColumnMap(("x", "y", "t", "pen"))
TIME_FIRST_COLUMNS = ColumnMap(("t", "x", "y", "pen"))


@dataclass(frozen=True, slots=True)
class SamplePoint:
    t: int
    x: int
    y: int
    pen: bool

    @property
    def xy(self) -> tuple[int, int]:
        return (self.x, self.y)


@dataclass(frozen=True)
class Trajectory:
    points: tuple[SamplePoint, ...]
    source_id: str = ""

    def __post_init__(self):
        if not self.points:
            raise ValueError("a trajectory needs at least one sample")

    def __len__(self) -> int:
        return len(self.points)

    def __getitem__(self, index: int) -> SamplePoint:
        return self.points[index]

    @property
    def xs(self) -> list[int]:
        return [p.x for p in self.points]

    @property
    def ys(self) -> list[int]:
        return [p.y for p in self.points]

    @property
    def pens(self) -> list[bool]:
        return [p.pen for p in self.points]


class PenKind(str, Enum):
    DOWN = "pen-down"
    UP = "pen-up"


@dataclass(frozen=True)
class PenRun:
    start_index: int
    end_index: int
    kind: PenKind

    def __len__(self) -> int:
        return self.end_index - self.start_index + 1

    def __contains__(self, index: int) -> bool:
        return self.start_index <= index <= self.end_index

    @property
    def indices(self) -> range:
        return range(self.start_index, self.end_index + 1)


def _to_int(token: str, lineno: int) -> int:
    try:
        return int(token)
    except ValueError:
        raise NonNumericError(f"non-numeric token {token!r}", lineno) from None


def parse_svc2004(
    text: str, cmap: ColumnMap = SVC2004_COLUMNS, source_id: str = ""
) -> Trajectory:
    """Parse the contents of an SVC2004 file.

    Blank lines are skipped. Raises a :class:`ParseError` subclass that names
    the offending line for a bad header, a row with fewer than four columns,
    a non-integer token, decreasing timestamps, or a row count that differs
    from the header.
    """
    rows = [(n, line.split()) for n, line in enumerate(text.splitlines(), 1)]
    rows = [(n, tokens) for n, tokens in rows if tokens]
    if not rows:
        raise CountMismatchError("empty file, expected a point count header", 1)

    header_line, header = rows[0]
    if len(header) != 1:
        raise ParseError("header must hold a single point count", header_line)
    declared = _to_int(header[0], header_line)
    if declared < 1:
        raise CountMismatchError(f"declared {declared} points", header_line)

    body = rows[1:]
    if len(body) != declared:
        where = body[-1][0] if body else header_line
        raise CountMismatchError(
            f"declared {declared} points, found {len(body)}", where
        )

    ix, iy, it, ipen = (cmap.position(f) for f in FIELDS)
    points = []
    last_t = None
    for lineno, tokens in body:
        if len(tokens) < 4:
            raise TooFewColumnsError(
                f"expected at least 4 columns, found {len(tokens)}", lineno
            )
        values = [_to_int(tok, lineno) for tok in tokens[:4]]
        t = values[it]
        if last_t is not None and t < last_t:
            raise TimestampOrderError(
                f"timestamp {t} is earlier than the previous {last_t}", lineno
            )
        last_t = t
        points.append(
            SamplePoint(t=t, x=values[ix], y=values[iy], pen=values[ipen] != 0)
        )
    return Trajectory(tuple(points), source_id)


def load_svc2004(path: str | Path, cmap: ColumnMap = SVC2004_COLUMNS) -> Trajectory:
    path = Path(path)
    return parse_svc2004(path.read_text(encoding="utf-8"), cmap, source_id=path.stem)


def serialize_svc2004(traj: Trajectory, cmap: ColumnMap = SVC2004_COLUMNS) -> str:
    """Write the four used columns back out in ``cmap`` order."""
    lines = [str(len(traj))]
    for p in traj.points:
        values = {"x": p.x, "y": p.y, "t": p.t, "pen": int(p.pen)}
        lines.append(" ".join(str(values[f]) for f in cmap.order))
    return "\n".join(lines) + "\n"


def pen_runs(traj: Trajectory) -> list[PenRun]:
    runs = []
    start = 0
    pens = traj.pens
    for i in range(1, len(pens) + 1):
        if i == len(pens) or pens[i] != pens[start]:
            kind = PenKind.DOWN if pens[start] else PenKind.UP
            runs.append(PenRun(start, i - 1, kind))
            start = i
    return runs


def down_runs(traj: Trajectory) -> list[PenRun]:
    return [r for r in pen_runs(traj) if r.kind is PenKind.DOWN]


def reconstruct_polylines(traj: Trajectory) -> list[list[tuple[int, int]]]:
    """One straight-line polyline per pen-down run, vertices copied verbatim."""
    return [
        [traj.points[i].xy for i in run.indices] for run in down_runs(traj)
    ]


def trajectory_from_columns(
    xs: Sequence[int],
    ys: Sequence[int],
    pens: Iterable[bool | int],
    ts: Sequence[int] | None = None,
    source_id: str = "",
) -> Trajectory:
    """Convenience constructor, mostly for tests and synthetic data."""
    pens = list(pens)
    if ts is None:
        ts = [10 * i for i in range(len(xs))]
    if not len(xs) == len(ys) == len(pens) == len(ts):
        raise ValueError("column lengths differ")
    points = tuple(
        SamplePoint(t=int(t), x=int(x), y=int(y), pen=bool(p))
        for x, y, p, t in zip(xs, ys, pens, ts)
    )
    return Trajectory(points, source_id)
