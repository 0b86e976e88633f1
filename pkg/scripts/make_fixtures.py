"""Generate the synthetic SVC2004-format signatures under tests/fixtures/svc2004.

Each user gets a cursive template built from looping cycloid pieces separated
by pen lifts, optionally with a dot. Two genuine samples per user differ by
time warping, sample count, amplitude jitter and sensor noise. Files carry the
seven SVC2004 columns: X Y timestamp button azimuth altitude pressure.

    python scripts/make_fixtures.py [OUTDIR]
"""

import math
import sys
from pathlib import Path

import numpy as np

USERS = 5
SEED = 2004


def make_template(rng):
    pieces = []
    x = 1500.0
    for _ in range(rng.integers(2, 4)):
        loops = int(rng.integers(2, 5))
        length = loops * rng.uniform(500, 800)
        pieces.append({
            "x0": x,
            "y0": rng.uniform(2500, 2900),
            "length": length,
            "loops": loops,
            "radius": rng.uniform(120, 200),
            "heights": rng.uniform(400, 1100, size=loops),
            "slant": rng.uniform(-0.15, 0.25),
            "samples": int(loops * rng.uniform(38, 55)),
        })
        x += length + rng.uniform(250, 500)
    dot = None
    if rng.random() < 0.7:
        host = pieces[int(rng.integers(len(pieces)))]
        dot = (host["x0"] + host["length"] * rng.uniform(0.3, 0.7), host["y0"] - 1500)
    return pieces, dot


def sample_piece(piece, rng, jitter):
    n = max(12, int(piece["samples"] * rng.uniform(0.9, 1.1)))
    s = np.linspace(0.0, 1.0, n)
    phase = rng.uniform(0, 2 * math.pi)
    u = s + jitter * 0.25 * np.sin(2 * math.pi * s + phase) / (2 * math.pi)
    k = piece["loops"]
    heights = piece["heights"] * rng.uniform(1 - jitter, 1 + jitter, size=k)
    hump = np.minimum((u * k).astype(int), k - 1)
    h = heights[hump]
    wave = (1 - np.cos(2 * math.pi * k * u)) / 2
    # y grows downward on screen; humps rise toward smaller y
    y = piece["y0"] - h * wave
    x = (piece["x0"] + piece["length"] * u
         - piece["radius"] * np.sin(2 * math.pi * k * u)
         + piece["slant"] * (piece["y0"] - y))
    x += rng.normal(0, 2.0, n)
    y += rng.normal(0, 2.0, n)
    return x, y


def sample_signature(template, rng, jitter=0.08, offset=(0.0, 0.0)):
    pieces, dot = template
    rows = []
    t = int(rng.integers(3_000_000, 9_000_000))

    def emit(x, y, pen):
        nonlocal t
        rows.append((
            int(round(x + offset[0])), int(round(y + offset[1])), t, int(pen),
            int(rng.integers(1200, 1500)), int(rng.integers(400, 700)),
            int(rng.integers(200, 900)) if pen else 0,
        ))
        t += 10

    last = None
    for piece in pieces:
        x, y = sample_piece(piece, rng, jitter)
        if last is not None:
            for f in np.linspace(0, 1, 6)[1:-1]:
                emit(last[0] + f * (x[0] - last[0]), last[1] + f * (y[0] - last[1]) - 200, 0)
        for a, b in zip(x, y):
            emit(a, b, 1)
        last = (x[-1], y[-1])
    if dot is not None:
        dx, dy = dot
        for f in np.linspace(0, 1, 6)[1:-1]:
            emit(last[0] + f * (dx - last[0]), last[1] + f * (dy - last[1]), 0)
        emit(dx + rng.normal(0, 20), dy + rng.normal(0, 20), 1)
        emit(dx + 60, dy + 40, 0)
    return rows


def write(path, rows):
    lines = [str(len(rows))] + [" ".join(str(v) for v in r) for r in rows]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def main(outdir):
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(SEED)
    for user in range(1, USERS + 1):
        template = make_template(rng)
        for take in (1, 2):
            offset = tuple(rng.normal(0, 60, size=2))
            write(outdir / f"user{user}_{take}.txt",
                  sample_signature(template, rng, offset=offset))


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else Path(__file__).parent.parent
         / "tests" / "fixtures" / "svc2004")
