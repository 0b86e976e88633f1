"""Human-in-the-loop evaluation of stroke mappings.

A mapped pair is rendered to SVG with the test signature split into five
sections. A reviewer marks each section as failed when any mapping in it is
obviously wrong, and records that in a verdict file::

    pair_id,section,failed
    user1,1,0
    user1,2,1
    ...

The mapping error is the number of failed sections over five times the number
of evaluated pairs.
"""

from __future__ import annotations

import csv
import io
from collections import defaultdict
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence
import xml.etree.ElementTree as ET

from .dtw import DtwPath
from .ingest import Trajectory, down_runs
from .segmentation import Stroke

SECTIONS = 5
VERDICT_HEADER = ("pair_id", "section", "failed")

VERDICT_PREAMBLE = """\
# Mark a section failed (1) only when a mapping in it is obviously wrong.
# When in doubt, judge in favor of the plain similarity maximization result.
"""


class VerdictError(ValueError):
    def __init__(self, message: str, pair_id: str | None = None):
        self.pair_id = pair_id
        super().__init__(message)


@dataclass(frozen=True)
class SectionVerdict:
    signature_pair_id: str
    section: int
    failed: bool


@dataclass(frozen=True)
class MappingErrorReport:
    pairs_evaluated: int
    failed_sections: int

    @property
    def error(self) -> float:
        if self.pairs_evaluated == 0:
            return 0.0
        return self.failed_sections / (SECTIONS * self.pairs_evaluated)

    @property
    def percent(self) -> str:
        return f"{100 * self.error:.2f}%"

    def summary(self) -> str:
        return (
            f"pairs={self.pairs_evaluated} failed_sections={self.failed_sections} "
            f"error={self.percent}"
        )


def divide_sections(strokes: Sequence[Stroke]) -> list[range]:
    """Five contiguous stroke-ordinal ranges, sizes as equal as possible.

    Leftover strokes go to the earliest sections.
    """
    if not strokes:
        raise ValueError("need at least one stroke")
    base, extra = divmod(len(strokes), SECTIONS)
    out, start = [], 0
    for k in range(SECTIONS):
        size = base + (1 if k < extra else 0)
        out.append(range(start, start + size))
        start += size
    return out


def section_of(ordinal: int, sections: Sequence[range]) -> int:
    """1-based section holding stroke ``ordinal``."""
    for k, rng in enumerate(sections, 1):
        if ordinal in rng:
            return k
    raise ValueError(f"stroke {ordinal} is in no section")


def parse_verdicts(text: str) -> list[SectionVerdict]:
    body = [ln for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    if not body:
        raise VerdictError("verdict file is empty")
    reader = csv.reader(body)
    header = tuple(h.strip() for h in next(reader))
    if header != VERDICT_HEADER:
        raise VerdictError(f"expected header {','.join(VERDICT_HEADER)!r}, got {','.join(header)!r}")
    verdicts = []
    for lineno, row in enumerate(reader, 2):
        if len(row) != 3:
            raise VerdictError(f"verdict row {lineno}: expected 3 fields, got {len(row)}")
        pair_id, section, failed = (v.strip() for v in row)
        if not section.isdigit() or failed not in ("0", "1"):
            raise VerdictError(f"verdict row {lineno}: malformed {row!r}", pair_id)
        verdicts.append(SectionVerdict(pair_id, int(section), failed == "1"))
    return verdicts


def load_verdicts(path: str | Path) -> list[SectionVerdict]:
    return parse_verdicts(Path(path).read_text(encoding="utf-8"))


def format_verdicts(verdicts: Iterable[SectionVerdict], preamble: str = VERDICT_PREAMBLE) -> str:
    buf = io.StringIO()
    buf.write(preamble)
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(VERDICT_HEADER)
    for v in verdicts:
        writer.writerow([v.signature_pair_id, v.section, int(v.failed)])
    return buf.getvalue()


def mapping_error(verdicts: Iterable[SectionVerdict]) -> MappingErrorReport:
    by_pair: dict[str, list[SectionVerdict]] = defaultdict(list)
    for v in verdicts:
        by_pair[v.signature_pair_id].append(v)
    failed = 0
    for pair_id, rows in by_pair.items():
        sections = sorted(v.section for v in rows)
        if sections != list(range(1, SECTIONS + 1)):
            raise VerdictError(
                f"pair {pair_id!r} needs one verdict for each section 1-5, "
                f"got sections {sections}",
                pair_id,
            )
        failed += sum(v.failed for v in rows)
    return MappingErrorReport(len(by_pair), failed)


def format_table(plain: MappingErrorReport, recovered: MappingErrorReport) -> str:
    rows = [
        ("Technique Name", "Error Percentage"),
        ("Similarity Maximization", plain.percent),
        ("Similarity Maximization with Lost Box Recovery", recovered.percent),
    ]
    width = max(len(name) for name, _ in rows)
    return "\n".join(f"{name:<{width}}  {value}" for name, value in rows) + "\n"


# -- rendering ---------------------------------------------------------------

CANVAS = (800, 640)
MARGIN = 20
LAYER_COLORS = {1: "#1f77b4", 2: "#d62728", 3: "#2ca02c"}


def _fmt(v: float) -> str:
    return f"{v:.2f}"


class _Frame:
    """Uniform scale plus per-signature offset into a canvas box."""

    def __init__(self, traj: Trajectory, box, scale, flip_y):
        xs, ys = _ink_extent(traj)
        self.xmin, self.ymin, self.ymax = min(xs), min(ys), max(ys)
        self.scale = scale
        self.flip_y = flip_y
        bx, by, bw, bh = box
        self.ox = bx + (bw - (max(xs) - self.xmin) * scale) / 2
        self.oy = by + (bh - (self.ymax - self.ymin) * scale) / 2

    def __call__(self, x, y):
        dy = (self.ymax - y) if self.flip_y else (y - self.ymin)
        return self.ox + (x - self.xmin) * self.scale, self.oy + dy * self.scale


def _ink_extent(traj: Trajectory):
    pts = [traj[i].xy for run in down_runs(traj) for i in run.indices]
    if not pts:
        pts = [p.xy for p in traj.points]
    return [p[0] for p in pts], [p[1] for p in pts]


def _fit_scale(trajs, box_w, box_h) -> float:
    scale = float("inf")
    for traj in trajs:
        xs, ys = _ink_extent(traj)
        w, h = max(xs) - min(xs), max(ys) - min(ys)
        if w > 0:
            scale = min(scale, box_w / w)
        if h > 0:
            scale = min(scale, box_h / h)
    return 1.0 if scale == float("inf") else scale


def _centroid(traj: Trajectory, strokes: Sequence[Stroke], ordinals) -> tuple[float, float]:
    idx = sorted({i for k in ordinals for i in strokes[k].indices})
    return (
        sum(traj[i].x for i in idx) / len(idx),
        sum(traj[i].y for i in idx) / len(idx),
    )


def _draw_signature(parent, traj: Trajectory, frame: _Frame, css_class: str):
    group = ET.SubElement(parent, "g", {"class": css_class})
    for run in down_runs(traj):
        pts = [frame(*traj[i].xy) for i in run.indices]
        if len(pts) == 1:
            ET.SubElement(group, "circle", cx=_fmt(pts[0][0]), cy=_fmt(pts[0][1]), r="1.50")
        else:
            ET.SubElement(
                group, "polyline",
                points=" ".join(f"{_fmt(x)},{_fmt(y)}" for x, y in pts),
            )


def render_mapping(
    ref_traj: Trajectory,
    test_traj: Trajectory,
    path: DtwPath,
    strokes_ref: Sequence[Stroke],
    strokes_test: Sequence[Stroke],
    flip_y: bool = False,
    title: str | None = None,
) -> str:
    """SVG with the reference above the test signature and one line per mapping."""
    width, height = CANVAS
    box_w = width - 2 * MARGIN
    box_h = (height - 3 * MARGIN) / 2
    ref_box = (MARGIN, MARGIN, box_w, box_h)
    test_box = (MARGIN, 2 * MARGIN + box_h, box_w, box_h)
    scale = _fit_scale((ref_traj, test_traj), box_w, box_h)
    ref_frame = _Frame(ref_traj, ref_box, scale, flip_y)
    test_frame = _Frame(test_traj, test_box, scale, flip_y)

    svg = ET.Element("svg", {
        "xmlns": "http://www.w3.org/2000/svg",
        "width": str(width),
        "height": str(height),
        "viewBox": f"0 0 {width} {height}",
    })
    ET.SubElement(svg, "style").text = (
        ".sig polyline{fill:none;stroke:#000;stroke-width:1.2}"
        ".sig circle{fill:#000}"
        ".map line{stroke-width:0.8;stroke-opacity:0.8}"
        ".sections line{stroke:#888;stroke-dasharray:4 3}"
        "text{font-family:sans-serif;font-size:11px;fill:#555}"
    )
    ET.SubElement(svg, "rect", x="0", y="0", width=str(width), height=str(height), fill="#fff")
    if title:
        ET.SubElement(svg, "text", x=str(MARGIN), y="14").text = title

    _draw_signature(svg, ref_traj, ref_frame, "sig ref")
    _draw_signature(svg, test_traj, test_frame, "sig test")

    sect = ET.SubElement(svg, "g", {"class": "sections"})
    top, bottom = test_box[1], test_box[1] + box_h
    sections = divide_sections(strokes_test) if strokes_test else []
    for k, rng in enumerate(sections, 1):
        if not rng:
            continue
        first = strokes_test[rng.start]
        x, _ = test_frame(*test_traj[first.start_index].xy)
        if k > 1:
            ET.SubElement(sect, "line", x1=_fmt(x), y1=_fmt(top), x2=_fmt(x), y2=_fmt(bottom))
        ET.SubElement(sect, "text", x=_fmt(x + 3), y=_fmt(bottom - 3)).text = str(k)

    lines = ET.SubElement(svg, "g", {"class": "map"})
    for node in path.nodes:
        x1, y1 = ref_frame(*_centroid(ref_traj, strokes_ref, node.ref_strokes))
        x2, y2 = test_frame(*_centroid(test_traj, strokes_test, node.test_strokes))
        ET.SubElement(
            lines, "line",
            x1=_fmt(x1), y1=_fmt(y1), x2=_fmt(x2), y2=_fmt(y2),
            stroke=LAYER_COLORS[node.layer],
        )

    ET.indent(svg)
    return ET.tostring(svg, encoding="unicode") + "\n"
