import subprocess
import sys

import pytest

from conftest import DATA, FIXTURES, VERDICTS
from strokemap.cli import run

REF = str(FIXTURES / "user1_1.txt")
TEST = str(FIXTURES / "user1_2.txt")


def call(capsys, *argv):
    code = run(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_parse(capsys, tmp_path):
    target = tmp_path / "copy.txt"
    code, out, _ = call(capsys, "parse", REF, "--out", str(target))
    assert code == 0
    assert out.splitlines()[0] == "points 377"
    assert out.splitlines()[1].startswith("run 0 ")
    code, again, _ = call(capsys, "parse", str(target))
    assert again == out


def test_parse_time_first_columns(capsys, tmp_path):
    f = tmp_path / "t.txt"
    f.write_text("2\n0 10 20 1\n10 11 21 1\n")
    code, out, _ = call(capsys, "parse", str(f), "--columns", "t,x,y,pen")
    assert code == 0 and out == "points 2\nrun 0 1 pen-down\n"


def test_extremes_rows(capsys):
    code, out, _ = call(capsys, "extremes", REF)
    assert code == 0
    first = out.splitlines()[0].split()
    assert first[:3] == ["0", "touchdown", "16"]
    assert all(len(row.split()) == 5 for row in out.splitlines())


def test_window_flags_change_output(capsys):
    _, default, _ = call(capsys, "extremes", REF)
    _, narrow, _ = call(capsys, "extremes", REF, "--l", "1", "--S", "1")
    _, wide, _ = call(capsys, "extremes", REF, "--l", "30", "--S", "40")
    assert len(wide.splitlines()) < len(default.splitlines()) < len(narrow.splitlines())


def test_segment_rows(capsys):
    code, out, _ = call(capsys, "segment", TEST)
    rows = [r.split() for r in out.splitlines()]
    assert code == 0 and len(rows) == 11
    assert rows[0] == ["0", "0", "1", "touchdown/y-max", "16/" + rows[0][4].split("/")[1]]


def test_map_summary(capsys):
    code, out, _ = call(capsys, "map", REF, TEST)
    assert code == 0
    assert out.splitlines()[-1].startswith("total=")
    assert out.splitlines()[0].startswith("0 1 0 0 ")


def test_no_lbr_changes_only_decisions(capsys, tmp_path):
    a, b = tmp_path / "a.txt", tmp_path / "b.txt"
    _, lbr, _ = call(capsys, "map", REF, TEST, "--dump-layers", str(a))
    _, plain, _ = call(capsys, "map", REF, TEST, "--no-lbr", "--dump-layers", str(b))
    count = lambda text: int(text.split("rejections=")[1])
    assert count(plain) == 0 and count(lbr) > 0
    # everything upstream of the path search is identical
    assert a.read_text() == b.read_text()


def test_golden_trace(capsys):
    code, out, _ = call(capsys, "map", "--layers", str(DATA / "golden_matrix.txt"), "--trace")
    assert code == 0
    assert out == (DATA / "golden_trace.txt").read_text()


def test_golden_plain_trace(capsys):
    _, out, _ = call(capsys, "map", "--layers", str(DATA / "golden_matrix.txt"),
                     "--trace", "--no-lbr")
    assert "V=n/a" in out
    assert out.splitlines()[-1] == "total=2.1000 nodes=4 rejections=0"


def test_map_render_and_dump(capsys, tmp_path):
    svg, dump = tmp_path / "m.svg", tmp_path / "l.txt"
    code, _, _ = call(capsys, "map", REF, TEST, "--render", str(svg), "--dump-layers", str(dump))
    assert code == 0
    assert svg.read_text().startswith("<svg")
    assert dump.read_text().startswith("layer 1 8 11")


def test_render(capsys, tmp_path):
    out = tmp_path / "r.svg"
    code, _, _ = call(capsys, "render", REF, TEST, "--no-lbr", "--out", str(out))
    assert code == 0
    assert out.read_text() == (DATA / "user1_plain.svg").read_text()


def test_score_single(capsys):
    code, out, _ = call(capsys, "score", str(VERDICTS / "shifted_sections.csv"))
    assert code == 0
    assert out.strip().endswith("pairs=1 failed_sections=2 error=40.00%")


def test_score_table(capsys):
    code, out, _ = call(capsys, "score", str(VERDICTS / "plain.csv"), str(VERDICTS / "lbr.csv"))
    assert code == 0
    lines = out.splitlines()
    assert lines[2].startswith("Technique Name")
    assert lines[3].startswith("Similarity Maximization ")
    assert lines[4].startswith("Similarity Maximization with Lost Box Recovery")


@pytest.mark.parametrize(
    "argv, code",
    [
        (["frobnicate"], 2),
        (["map", REF], 2),
        (["map", "--layers", "x.txt", REF], 2),
        (["score", "a", "b", "c"], 2),
        (["extremes", REF, "--l", "0"], 2),
        (["parse", "/nonexistent/file.txt"], 5),
    ],
)
def test_error_codes(capsys, argv, code):
    got, _, err = call(capsys, *argv)
    assert got == code
    assert err


def test_malformed_signature(capsys, tmp_path):
    f = tmp_path / "bad.txt"
    f.write_text("3\n1 2 3 1\n")
    code, _, err = call(capsys, "parse", str(f))
    assert code == 3 and "declared 3 points, found 1" in err


def test_malformed_verdicts(capsys, tmp_path):
    f = tmp_path / "v.csv"
    f.write_text("pair_id,section,failed\np,1,0\n")
    code, _, err = call(capsys, "score", str(f))
    assert code == 4 and "'p'" in err


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "strokemap", "parse", REF],
                          capture_output=True, text=True, check=True)
    assert proc.stdout.startswith("points 377")


def test_deterministic(capsys):
    _, a, _ = call(capsys, "map", REF, TEST, "--trace")
    _, b, _ = call(capsys, "map", REF, TEST, "--trace")
    assert a == b
