from pathlib import Path

import pytest

HERE = Path(__file__).parent
FIXTURES = HERE / "fixtures" / "svc2004"
VERDICTS = HERE / "fixtures" / "verdicts"
DATA = HERE / "data"

FIXTURE_FILES = sorted(FIXTURES.glob("user*_*.txt"))
PAIRS = [(FIXTURES / f"user{u}_1.txt", FIXTURES / f"user{u}_2.txt") for u in range(1, 6)]


@pytest.fixture(params=FIXTURE_FILES, ids=lambda p: p.stem)
def fixture_file(request):
    return request.param


def pytest_terminal_summary(terminalreporter):
    import sys
    module = sys.modules.get("test_acceptance")
    results = getattr(module, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted({r["number"] for r in results}):
        parts = [r for r in results if r["number"] == number]
        ok = all(r["ok"] for r in parts)
        seconds = sum(r["seconds"] for r in parts)
        terminalreporter.write_line(
            f"criterion {number}: {'PASS' if ok else 'FAIL'} ({seconds:.2f}s)"
        )
        for r in parts:
            mark = "ok" if r["ok"] else "FAILED"
            terminalreporter.write_line(f"    [{mark}] {r['part']}: {r['detail']}")
