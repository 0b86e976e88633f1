"""Command-line interface.

    strokemap parse FILE
    strokemap extremes FILE
    strokemap segment FILE
    strokemap map REF TEST [--no-lbr] [--trace] [--render SVG]
    strokemap map --layers MATRIX [--no-lbr] [--trace]
    strokemap render REF TEST --out SVG
    strokemap score VERDICTS [LBR_VERDICTS]
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import evaluation
from .dtw import DtwPath, map_strokes
from .evaluation import VerdictError, load_verdicts, mapping_error, render_mapping
from .extremes import DetectionParams
from .ingest import ColumnMap, ParseError, load_svc2004, pen_runs, serialize_svc2004
from .pipeline import Signature, analyze, map_signatures
from .similarity import format_layers, parse_layers


def _columns(text: str) -> ColumnMap:
    try:
        return ColumnMap.from_string(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _positive(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {value}")
    return value


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--l", dest="window", type=_positive, default=3,
                        help="half-width of the extreme detection window (samples)")
    common.add_argument("--S", dest="gap", type=_positive, default=5,
                        help="minimum gap between extremes of the same kind (samples)")
    common.add_argument("--columns", type=_columns, default=ColumnMap(),
                        help="meaning of the first four columns, default x,y,t,pen")
    common.add_argument("--flip-y", action="store_true",
                        help="draw larger y values higher up when rendering")
    common.add_argument("--out", type=Path, help="write the main output here")

    parser = argparse.ArgumentParser(prog="strokemap", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("parse", parents=[common], help="parse a signature file")
    p.add_argument("file", type=Path)

    p = sub.add_parser("extremes", parents=[common], help="list detected extremes")
    p.add_argument("file", type=Path)

    p = sub.add_parser("segment", parents=[common], help="list strokes")
    p.add_argument("file", type=Path)

    for name in ("map", "render"):
        p = sub.add_parser(name, parents=[common],
                           help="map strokes between two signatures"
                           if name == "map" else "render a mapping as SVG")
        p.add_argument("files", type=Path, nargs="*", metavar="REF TEST")
        p.add_argument("--no-lbr", dest="lbr", action="store_false",
                       help="plain similarity maximization, no lost box recovery")
        if name == "map":
            p.add_argument("--layers", type=Path,
                           help="map a similarity matrix file instead of two signatures")
            p.add_argument("--trace", action="store_true",
                           help="print every path decision")
            p.add_argument("--render", type=Path, metavar="SVG",
                           help="also render the mapping to this file")
            p.add_argument("--dump-layers", type=Path, metavar="FILE",
                           help="write the similarity matrix to this file")

    p = sub.add_parser("score", parents=[common], help="mapping error from verdict files")
    p.add_argument("verdicts", type=Path, nargs="+", metavar="VERDICTS",
                   help="one file, or a plain and an LBR file to tabulate side by side")
    return parser


def _emit(text: str, out: Path | None):
    if out is None:
        sys.stdout.write(text)
    else:
        out.write_text(text, encoding="utf-8")


def _analyze(path: Path, args) -> Signature:
    traj = load_svc2004(path, args.columns)
    return analyze(traj, DetectionParams(args.window, args.gap))


def _cell(node) -> str:
    return f"{node.layer},{node.i},{node.j}"


def format_path(path: DtwPath, trace: bool = False) -> str:
    lines = []
    if trace:
        for k, d in enumerate(path.decisions):
            value = "n/a" if d.value is None else f"{d.value + 0.0:.4f}"
            lines.append(
                f"decide {k} from={_cell(d.at)} to={_cell(d.candidate)} "
                f"score={d.candidate.score:.4f} V={value} "
                f"{'accept' if d.accepted else 'reject'}"
            )
    for k, n in enumerate(path.nodes):
        lines.append(f"{k} {n.layer} {n.i} {n.j} {n.score:.4f}")
    lines.append(
        f"total={path.total:.4f} nodes={len(path.nodes)} "
        f"rejections={len(path.rejections)}"
    )
    return "\n".join(lines) + "\n"


def cmd_parse(args) -> int:
    traj = load_svc2004(args.file, args.columns)
    if args.out is not None:
        args.out.write_text(serialize_svc2004(traj, args.columns), encoding="utf-8")
    lines = [f"points {len(traj)}"]
    lines += [f"run {r.start_index} {r.end_index} {r.kind.value}" for r in pen_runs(traj)]
    sys.stdout.write("\n".join(lines) + "\n")
    return 0


def cmd_extremes(args) -> int:
    sig = _analyze(args.file, args)
    rows = [
        f"{e.index} {e.kind.value} {e.class_id} {sig.traj[e.index].x} {sig.traj[e.index].y}"
        for e in sig.extremes
    ]
    _emit("\n".join(rows) + "\n", args.out)
    return 0


def cmd_segment(args) -> int:
    sig = _analyze(args.file, args)
    rows = [
        f"{k} {s.start_index} {s.end_index} "
        f"{s.border_start.kind.value}/{s.border_end.kind.value} "
        f"{s.border_start.class_id}/{s.border_end.class_id}"
        for k, s in enumerate(sig.strokes)
    ]
    _emit("\n".join(rows) + "\n", args.out)
    return 0


def _two_signatures(args):
    if len(args.files) != 2:
        raise UsageError(f"{args.command} needs a reference and a test file")
    return _analyze(args.files[0], args), _analyze(args.files[1], args)


def cmd_map(args) -> int:
    if args.layers is not None:
        if args.files or args.render:
            raise UsageError("--layers cannot be combined with signature files or --render")
        layers = parse_layers(args.layers.read_text(encoding="utf-8"))
        path = map_strokes(layers, lbr=args.lbr)
    else:
        ref, test = _two_signatures(args)
        mapping = map_signatures(ref, test, lbr=args.lbr)
        layers, path = mapping.layers, mapping.path
        if args.render is not None:
            args.render.write_text(
                render_mapping(ref.traj, test.traj, path, ref.strokes, test.strokes,
                               flip_y=args.flip_y),
                encoding="utf-8",
            )
    if args.dump_layers is not None:
        args.dump_layers.write_text(format_layers(layers), encoding="utf-8")
    _emit(format_path(path, trace=args.trace), args.out)
    return 0


def cmd_render(args) -> int:
    ref, test = _two_signatures(args)
    mapping = map_signatures(ref, test, lbr=args.lbr)
    title = f"{ref.traj.source_id} -> {test.traj.source_id} ({'LBR' if args.lbr else 'plain'})"
    _emit(
        render_mapping(ref.traj, test.traj, mapping.path, ref.strokes, test.strokes,
                       flip_y=args.flip_y, title=title),
        args.out,
    )
    return 0


def cmd_score(args) -> int:
    if len(args.verdicts) > 2:
        raise UsageError("score takes one verdict file, or a plain and an LBR file")
    reports = [mapping_error(load_verdicts(p)) for p in args.verdicts]
    lines = [f"{p}: {r.summary()}" for p, r in zip(args.verdicts, reports)]
    text = "\n".join(lines) + "\n"
    if len(reports) == 2:
        text += evaluation.format_table(*reports)
    _emit(text, args.out)
    return 0


class UsageError(Exception):
    pass


COMMANDS = {
    "parse": cmd_parse,
    "extremes": cmd_extremes,
    "segment": cmd_segment,
    "map": cmd_map,
    "render": cmd_render,
    "score": cmd_score,
}


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"strokemap {args.command}: {exc}", file=sys.stderr)
        return 2
    except ParseError as exc:
        print(f"strokemap: malformed signature file: {exc}", file=sys.stderr)
        return 3
    except VerdictError as exc:
        print(f"strokemap: malformed verdicts: {exc}", file=sys.stderr)
        return 4
    except OSError as exc:
        print(f"strokemap: cannot read or write file: {exc}", file=sys.stderr)
        return 5
    except ValueError as exc:
        print(f"strokemap: {exc}", file=sys.stderr)
        return 1


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
