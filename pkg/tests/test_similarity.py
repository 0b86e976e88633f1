import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from conftest import FIXTURES, PAIRS
from strokemap.extremes import Extreme, ExtremeKind, Rotation, find_extremes
from strokemap.ingest import load_svc2004, trajectory_from_columns
from strokemap.pipeline import analyze
from strokemap.segmentation import Stroke, segment_strokes
from strokemap.similarity import (
    LayeredMatrix,
    StrokeFeatures,
    build_similarity_layers,
    format_layers,
    merge_adjacent,
    parse_layers,
    stroke_features,
    stroke_similarity,
)

TD = Extreme(0, ExtremeKind.TOUCHDOWN, 16)


def ymax(i, cls=9):
    return Extreme(i, ExtremeKind.Y_MAX, cls, Rotation.CLOCKWISE)


def test_straight_stroke_features():
    traj = trajectory_from_columns([0, 3, 6], [0, 4, 8], [1, 1, 1])
    s = Stroke("t", 0, 2, TD, Extreme(2, ExtremeKind.TAKEOFF, 17))
    f = stroke_features(s, traj)
    assert (f.duration, f.arc_length, f.net_dx, f.net_dy) == (3, 10.0, 6, 8)
    assert (f.border_class_start, f.border_class_end) == (16, 17)


def test_dot_features():
    traj = trajectory_from_columns([0, 5, 9], [0, 5, 9], [0, 1, 0])
    dot = Extreme(1, ExtremeKind.DOT, 18)
    f = stroke_features(Stroke("t", 1, 1, dot, dot), traj)
    assert (f.duration, f.arc_length) == (1, 0.0)


def test_fixture_stroke_by_hand():
    traj = load_svc2004(FIXTURES / "user1_1.txt")
    sig = analyze(traj)
    s = sig.strokes[1]
    rows = [ln.split() for ln in (FIXTURES / "user1_1.txt").read_text().splitlines()[1:]]
    pts = [(int(r[0]), int(r[1])) for r in rows[s.start_index:s.end_index + 1]]
    arc = 0.0
    for (x1, y1), (x2, y2) in zip(pts, pts[1:]):
        arc += ((x2 - x1) ** 2 + (y2 - y1) ** 2) ** 0.5
    f = stroke_features(s, traj)
    assert f.duration == len(pts)
    assert f.arc_length == pytest.approx(arc, rel=1e-12)
    assert (f.net_dx, f.net_dy) == (pts[-1][0] - pts[0][0], pts[-1][1] - pts[0][1])


def feats(duration=10, arc=100.0, dx=10, dy=0, a=9, b=9, bag=()):
    return StrokeFeatures(duration, arc, dx, dy, a, b, bag)


def test_identical_is_one():
    f = feats()
    assert stroke_similarity(f, f) == 1.0


def test_opposite_directions():
    s = stroke_similarity(feats(dx=10), feats(dx=-10))
    assert s == pytest.approx(0.5 + 0.5 * (2 / 3))
    assert round(s, 3) == 0.833


def test_fully_mismatched():
    a = feats(duration=10, arc=100.0, dx=10, dy=0, a=1, b=2)
    b = feats(duration=20, arc=200.0, dx=0, dy=10, a=3, b=4)
    assert stroke_similarity(a, b) == pytest.approx(0.25)


def test_one_border_class_matches():
    a, b = feats(a=1, b=2), feats(a=1, b=5)
    assert stroke_similarity(a, b) == pytest.approx(0.5 * 0.5 + 0.5)


def test_zero_vectors():
    # one zero displacement is neutral, two are identical
    assert stroke_similarity(feats(dx=0), feats(dx=5)) == pytest.approx(0.5 + 0.5 * (2.5 / 3))
    assert stroke_similarity(feats(dx=0), feats(dx=0)) == 1.0


features = st.builds(
    StrokeFeatures,
    st.integers(1, 400),
    st.floats(0, 5000, allow_nan=False),
    st.integers(-500, 500),
    st.integers(-500, 500),
    st.integers(0, 18),
    st.integers(0, 18),
    st.lists(st.integers(0, 15), max_size=4).map(lambda v: tuple(sorted(v))),
)


@given(features, features)
def test_similarity_symmetric_and_bounded(a, b):
    s = stroke_similarity(a, b)
    assert s == stroke_similarity(b, a)
    assert 0.0 <= s <= 1.0


@given(features)
def test_self_similarity(a):
    assert stroke_similarity(a, a) == pytest.approx(1.0, abs=1e-12)


def run_traj(n=16):
    return trajectory_from_columns(range(n), [0] * n, [1] * n)


def test_merge_adjacent():
    traj = run_traj()
    a = Stroke("t", 0, 7, TD, ymax(7))
    b = Stroke("t", 7, 15, ymax(7), Extreme(15, ExtremeKind.TAKEOFF, 17))
    m = merge_adjacent(a, b, traj)
    assert (m.start_index, m.end_index) == (0, 15)
    assert ymax(7) in m.interior_extremes
    assert m.border_start == TD and m.border_end.kind is ExtremeKind.TAKEOFF


def test_merge_rejections():
    pens = [1] * 5 + [0] * 2 + [1] * 5
    traj = trajectory_from_columns(range(12), [0] * 12, pens)
    a = Stroke("t", 0, 4, TD, Extreme(4, ExtremeKind.TAKEOFF, 17))
    b = Stroke("t", 7, 11, Extreme(7, ExtremeKind.TOUCHDOWN, 16),
               Extreme(11, ExtremeKind.TAKEOFF, 17))
    assert merge_adjacent(a, b, traj) is None
    # touching strokes are still refused when they belong to different signatures
    c = Stroke("t", 0, 2, TD, ymax(2))
    d = Stroke("u", 2, 4, ymax(2), Extreme(4, ExtremeKind.TAKEOFF, 17))
    assert merge_adjacent(c, d, traj) is None
    # not adjacent
    e = Stroke("t", 0, 1, TD, ymax(1))
    assert merge_adjacent(e, Stroke("t", 2, 4, ymax(2), ymax(4)), traj) is None


def test_merge_associative_spans():
    traj = run_traj()
    a = Stroke("t", 0, 4, TD, ymax(4))
    b = Stroke("t", 4, 9, ymax(4), ymax(9))
    c = Stroke("t", 9, 15, ymax(9), Extreme(15, ExtremeKind.TAKEOFF, 17))
    left = merge_adjacent(merge_adjacent(a, b, traj), c, traj)
    right = merge_adjacent(a, merge_adjacent(b, c, traj), traj)
    assert (left.start_index, left.end_index) == (right.start_index, right.end_index)
    assert left.interior_extremes == right.interior_extremes


def test_single_stroke_layers():
    traj = run_traj(4)
    strokes = segment_strokes(traj, [])
    layers = build_similarity_layers(strokes, strokes, traj, traj)
    assert layers.layer1.shape == (1, 1)
    assert layers.layer2.size == 0 and layers.layer3.size == 0
    assert layers.layer1[0, 0] == 1.0


def test_identical_signatures_diagonal():
    ref, test = PAIRS[0]
    sig = analyze(load_svc2004(ref))
    layers = build_similarity_layers(sig.strokes, sig.strokes, sig.traj, sig.traj)
    assert np.all(np.diag(layers.layer1) == 1.0)


@pytest.mark.parametrize("pair", PAIRS, ids=lambda p: p[0].stem[:5])
def test_fixture_layer_shapes(pair):
    ref, test = (analyze(load_svc2004(p)) for p in pair)
    layers = build_similarity_layers(ref.strokes, test.strokes, ref.traj, test.traj)
    r, t = len(ref.strokes), len(test.strokes)
    assert layers.layer1.shape == (r, t)
    assert layers.layer2.shape == (r, t - 1)
    assert layers.layer3.shape == (r - 1, t)
    assert not np.isnan(layers.layer1).any()
    for grid in layers.layers:
        present = grid[~np.isnan(grid)]
        assert ((present >= 0) & (present <= 1)).all()
    # combinatorial cells exist exactly where the merge does
    for j, (a, b) in enumerate(zip(test.strokes, test.strokes[1:])):
        mergeable = merge_adjacent(a, b, test.traj) is not None
        assert (not np.isnan(layers.layer2[:, j]).any()) == mergeable
        assert np.isnan(layers.layer2[:, j]).all() == (not mergeable)


def test_fixture_merge_demotes_border():
    traj = load_svc2004(FIXTURES / "user2_1.txt")
    strokes = segment_strokes(traj, find_extremes(traj))
    a, b = next((a, b) for a, b in zip(strokes, strokes[1:])
                if a.border_end.kind is ExtremeKind.Y_MAX)
    m = merge_adjacent(a, b, traj)
    assert a.border_end in m.interior_extremes
    assert m.border_start == a.border_start and m.border_end == b.border_end


def test_layered_matrix_validation():
    with pytest.raises(ValueError):
        LayeredMatrix.single([[1.5]])
    with pytest.raises(ValueError):
        LayeredMatrix.single([[np.nan, 0.5]])
    with pytest.raises(ValueError):
        LayeredMatrix(np.zeros((2, 2)), np.zeros((2, 2)), None)


def test_layered_matrix_access():
    m = LayeredMatrix(np.array([[.5, .2], [.1, .9]]), np.array([[.3], [np.nan]]), None)
    assert m.score(1, 1, 1) == .9
    assert m.score(2, 0, 0) == .3
    assert m.score(2, 1, 0) is None
    assert m.score(3, 0, 0) is None
    assert m.score(1, 2, 0) is None
    assert m.cell_count() == 5
    copy = m.copy()
    copy.layer1[0, 0] = 0
    assert m.layer1[0, 0] == .5


def test_layers_text_round_trip():
    m = LayeredMatrix(np.array([[.5, .25], [.125, 1.0]]), np.array([[.3], [np.nan]]),
                      np.array([[np.nan, .75]]))
    text = format_layers(m)
    assert text.splitlines()[:3] == ["layer 1 2 2", "0.5000 0.2500", "0.1250 1.0000"]
    back = parse_layers(text)
    for a, b in zip(m.layers, back.layers):
        np.testing.assert_array_equal(a, b)


def test_parse_layers_only_first():
    m = parse_layers("layer 1 1 2\n.5 .4\n")
    assert m.layer2.shape == (1, 1) and math.isnan(m.layer2[0, 0])
    assert m.layer3.shape == (0, 2)
    with pytest.raises(ValueError):
        parse_layers("layer 1 2 2\n.5 .4\n")
