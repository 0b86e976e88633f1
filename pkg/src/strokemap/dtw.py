"""Stroke mapping by greedy similarity maximization over three layers.

The path starts at layer 1, cell (0, 0). From the current node the search
looks one step ahead, to cells whose first consumed strokes are
``(a+1, b)``, ``(a, b+1)`` or ``(a+1, b+1)`` where ``(a, b)`` are the last
reference and test strokes the current node consumed, in any of the three
layers, and hops to the best-scoring one.

With lost box recovery switched on, every hop is counter-checked before it is
taken. The two rectangles spanned between the current node and the candidate
(rows ``i..m-1`` by columns ``j..l`` and rows ``i..k`` by columns ``j..n-1``)
are scanned for a better cell. The decision value is the candidate score minus
the best cell found. A negative value rejects the candidate: its cell is
zeroed in the search's working copy, it is disqualified, and the search
re-selects from the same node.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .similarity import LayeredMatrix

STEPS = ((1, 0), (0, 1), (1, 1))
BRUTE_FORCE_LIMIT = 7


@dataclass(frozen=True)
class PathNode:
    layer: int
    i: int
    j: int
    score: float = 0.0

    @property
    def cell(self) -> tuple[int, int, int]:
        return (self.layer, self.i, self.j)

    @property
    def end(self) -> tuple[int, int]:
        """Last reference and test stroke consumed by this node."""
        if self.layer == 2:
            return (self.i, self.j + 1)
        if self.layer == 3:
            return (self.i + 1, self.j)
        return (self.i, self.j)

    @property
    def ref_strokes(self) -> tuple[int, ...]:
        return (self.i, self.i + 1) if self.layer == 3 else (self.i,)

    @property
    def test_strokes(self) -> tuple[int, ...]:
        return (self.j, self.j + 1) if self.layer == 2 else (self.j,)


@dataclass(frozen=True)
class Decision:
    at: PathNode
    candidate: PathNode
    value: float | None
    accepted: bool


@dataclass
class DtwPath:
    nodes: list[PathNode]
    decisions: list[Decision] = field(default_factory=list)

    @property
    def total(self) -> float:
        return sum(n.score for n in self.nodes)

    @property
    def rejections(self) -> list[Decision]:
        return [d for d in self.decisions if not d.accepted]

    @property
    def cells(self) -> list[tuple[int, int, int]]:
        return [n.cell for n in self.nodes]

    def is_monotone(self) -> bool:
        """Every node starts exactly one step past where its predecessor ended."""
        for prev, node in zip(self.nodes, self.nodes[1:]):
            a, b = prev.end
            if (node.i - a, node.j - b) not in STEPS:
                return False
        return True


@dataclass(frozen=True)
class LostBoxes:
    """The two scan rectangles for a hop, as (rows, cols) ranges."""

    region_a: tuple[range, range]
    region_b: tuple[range, range]

    def __contains__(self, cell) -> bool:
        x, y = cell
        return any(x in rows and y in cols for rows, cols in (self.region_a, self.region_b))

    def cells(self) -> set[tuple[int, int]]:
        out = set()
        for rows, cols in (self.region_a, self.region_b):
            out.update((x, y) for x in rows for y in cols)
        return out


def lost_boxes(current: PathNode, candidate: PathNode, shape: tuple[int, int]) -> LostBoxes:
    i, j = current.end
    k, l = candidate.end
    m, n = shape
    return LostBoxes(
        region_a=(range(i, m), range(j, min(l, n - 1) + 1)),
        region_b=(range(i, min(k, m - 1) + 1), range(j, n)),
    )


def candidates(
    current: PathNode, layers: LayeredMatrix, disqualified: Iterable = ()
) -> list[PathNode]:
    """Every present, non-disqualified cell one step past ``current``."""
    disqualified = set(disqualified)
    a, b = current.end
    out = []
    for di, dj in STEPS:
        for layer in (1, 2, 3):
            cell = (layer, a + di, b + dj)
            if cell in disqualified:
                continue
            score = layers.score(*cell)
            if score is not None:
                out.append(PathNode(*cell, score))
    return out


def _preference(node: PathNode):
    # highest score, then lower layer, smaller i, smaller j
    return (node.score, -node.layer, -node.i, -node.j)


def simmax_next(
    current: PathNode, layers: LayeredMatrix, disqualified: Iterable = ()
) -> PathNode | None:
    found = candidates(current, layers, disqualified)
    return max(found, key=_preference) if found else None


def lost_box_value(
    current: PathNode,
    candidate: PathNode,
    layers: LayeredMatrix,
    disqualified: Iterable = (),
) -> float:
    """Candidate score minus the best other cell in its lost boxes.

    All three layers are scanned. The candidate's own cell and the cells at
    the current position are left out; an empty scan counts as 0.
    """
    disqualified = set(disqualified)
    boxes = lost_boxes(current, candidate, layers.shape)
    here = current.end
    best = 0.0
    for layer, grid in enumerate(layers.layers, 1):
        for x, y in boxes.cells():
            if (x, y) == here or (layer, x, y) == candidate.cell:
                continue
            if (layer, x, y) in disqualified:
                continue
            if x < grid.shape[0] and y < grid.shape[1]:
                v = grid[x, y]
                if not np.isnan(v) and v > best:
                    best = float(v)
    return candidate.score - best


@dataclass(frozen=True)
class StepOutcome:
    accepted: bool
    position: PathNode


def apply_lbr(
    current: PathNode,
    candidate: PathNode,
    value: float,
    working: LayeredMatrix,
    disqualified: set,
) -> StepOutcome:
    """Take the hop when ``value >= 0``; otherwise zero and bar the candidate.

    ``working`` and ``disqualified`` belong to a single search and are updated
    in place.
    """
    if value >= 0:
        return StepOutcome(True, candidate)
    working.layer(candidate.layer)[candidate.i, candidate.j] = 0.0
    disqualified.add(candidate.cell)
    return StepOutcome(False, current)


def map_strokes(layers: LayeredMatrix, lbr: bool = True) -> DtwPath:
    if layers.layer1.size == 0:
        raise ValueError("layer 1 is empty")
    working = layers.copy()
    disqualified: set = set()
    current = PathNode(1, 0, 0, float(layers.layer1[0, 0]))
    nodes = [current]
    decisions = []
    limit = 2 * layers.cell_count()
    while True:
        candidate = simmax_next(current, working, disqualified)
        if candidate is None:
            break
        if len(decisions) >= limit:
            raise RuntimeError("path search did not terminate")
        if lbr:
            value = lost_box_value(current, candidate, working, disqualified)
            outcome = apply_lbr(current, candidate, value, working, disqualified)
        else:
            value, outcome = None, StepOutcome(True, candidate)
        decisions.append(Decision(current, candidate, value, outcome.accepted))
        if outcome.accepted:
            current = candidate
            nodes.append(current)
    return DtwPath(nodes, decisions)


def brute_force_path(grid) -> DtwPath:
    """Best-total path over a single grid by exhaustive enumeration.

    Paths start at (0, 0) and may stop anywhere; each next node lies in the
    next column (same or next row) or in the next row (same or next column).
    Ties go to the lexicographically smallest node sequence.
    """
    grid = np.asarray(grid, dtype=float)
    rows, cols = grid.shape
    if rows > BRUTE_FORCE_LIMIT or cols > BRUTE_FORCE_LIMIT:
        raise ValueError(
            f"brute force is limited to {BRUTE_FORCE_LIMIT}x{BRUTE_FORCE_LIMIT} grids"
        )
    if grid.size == 0:
        raise ValueError("empty grid")

    best_total = -np.inf
    best_path: list[tuple[int, int]] = []

    def visit(path, total):
        nonlocal best_total, best_path
        if total > best_total or (total == best_total and path < best_path):
            best_total, best_path = total, list(path)
        a, b = path[-1]
        successors = {(a, b + 1), (a + 1, b + 1), (a + 1, b), (a + 1, b + 1)}
        for r, c in sorted(successors):
            if r < rows and c < cols:
                path.append((r, c))
                visit(path, total + float(grid[r, c]))
                path.pop()

    visit([(0, 0)], float(grid[0, 0]))
    return DtwPath([PathNode(1, i, j, float(grid[i, j])) for i, j in best_path])


def original_score(layers: LayeredMatrix, node: PathNode) -> float:
    return layers.score(*node.cell)


def lbr_decision_pairs(path: DtwPath) -> list[tuple[Decision, Decision | None]]:
    """Pair every rejection with the hop eventually accepted from the same node."""
    pairs = []
    for k, d in enumerate(path.decisions):
        if d.accepted:
            continue
        accepted = next(
            (e for e in path.decisions[k + 1:] if e.accepted and e.at == d.at), None
        )
        pairs.append((d, accepted))
    return pairs


