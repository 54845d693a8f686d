"""Command line: ``helixknots build|verify|sticks|lattice``.

Exit codes: 0 ok, 2 parse error, 3 lattice gate failure, 4 verification
failure, 5 I/O error.
"""
from __future__ import annotations

import argparse
import json
import sys
from math import pi

import numpy as np

from .blocks import DISPLACEMENTS, STICK_WORDS, StickKind, build_stick, validate_stick
from .braid import BraidParseError, GateFailure, assemble_link, parse_braid
from .export import CurveDocument, DocumentError, write_csv, write_obj_polyline, write_obj_tube
from .lattice import LatticeWord, lemma1_gate
from .verify import DEFAULT_DELTA, verify_curves

EXIT_OK, EXIT_PARSE, EXIT_GATE, EXIT_VERIFY, EXIT_IO = 0, 2, 3, 4, 5


def _pi_multiple(x: float) -> str:
    q = x / pi
    if abs(q - round(q)) < 1e-9:
        q = round(q)
        return "0" if q == 0 else f"{q}*pi"
    return f"{x:.12g}"


def _vec(v) -> str:
    return "(" + ", ".join(_pi_multiple(float(x)) for x in v) + ")"


def cmd_build(args) -> int:
    try:
        word = parse_braid(args.braid)
    except BraidParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    try:
        asm = assemble_link(word)
    except GateFailure as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_GATE

    crossings = asm.crossings()
    meta = {
        "source": str(word),
        "components": [{"start": list(s), "lattice_word": str(w)}
                       for w, s in zip(asm.components, asm.starts)],
        "crossings": [{"x": c.position[0], "z": c.position[1], "sign": c.sign} for c in crossings],
    }
    report = None
    if not args.no_verify:
        report = verify_curves(asm.geometry, delta=args.delta)
    doc = CurveDocument(asm.geometry, meta, report.to_dict() if report else None)

    try:
        doc.save(args.out)
        if args.obj:
            with open(args.obj, "w", newline="\n") as fh:
                write_obj_polyline(asm.geometry, fh)
        if args.tube:
            with open(args.tube, "w", newline="\n") as fh:
                write_obj_tube(asm.geometry, fh, radius=args.tube_radius)
        if args.csv:
            with open(args.csv, "w", newline="\n") as fh:
                write_csv(asm.geometry, fh, samples_per_unit=args.samples_per_unit)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO

    print(f"braid {word}: {len(asm.geometry)} closed component(s)")
    for i, c in enumerate(asm.geometry):
        print(f"  component {i}: {len(asm.components[i])} sticks, {len(c)} segments, length {c.length:.6f}")
    signs = [c.sign for c in crossings]
    print(f"crossings in (x,z) diagram: {len(signs)} ({signs.count(1)} positive, {signs.count(-1)} negative)")
    if report is not None:
        print(report.summary())
        if not report.passed:
            return EXIT_VERIFY
    return EXIT_OK


def cmd_verify(args) -> int:
    try:
        doc = CurveDocument.load(args.input)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except DocumentError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    report = verify_curves(doc.curves, samples_per_unit=args.samples_per_unit, delta=args.delta)
    if args.json:
        print(json.dumps(report.to_dict(), indent=2))
    else:
        print(f"{len(doc.curves)} component(s)")
        print(report.summary())
    return EXIT_OK if report.passed else EXIT_VERIFY


def cmd_sticks(args) -> int:
    try:
        kinds = [StickKind.parse(args.name)] if args.name else list(StickKind)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    ok = True
    for k in kinds:
        c = build_stick(k)
        disp = c.terminal_point() - c.initial_point()
        print(f"{k.value}: word {STICK_WORDS[k]} ({len(c)} pieces, length {c.length:.6f})")
        print(f"  displacement {_vec(disp)}  (expected {_vec(DISPLACEMENTS[k])})")
        if args.validate:
            rep = validate_stick(k)
            print(f"  frames vs F: initial {rep.initial_frame_error:.2e}, terminal {rep.terminal_frame_error:.2e}")
            print(f"  displacement error {rep.displacement_error:.2e}")
            print(f"  simplicity: {rep.simplicity_status} (bound {rep.min_distance_bound:.4f})")
            print(f"  tube radius {rep.tube_radius:.6f} (limit pi)")
            print("  " + ("all checks pass" if rep.passed else "FAILED: " + "; ".join(rep.failures)))
            ok &= rep.passed
    return EXIT_OK if ok else EXIT_VERIFY


def cmd_lattice(args) -> int:
    try:
        word = LatticeWord.parse(args.word, closed=args.closed)
        if len(word) == 0:
            raise ValueError("empty lattice word")
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    rep = lemma1_gate(word)
    print(rep.describe())
    return EXIT_OK if rep.passed else EXIT_GATE


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="helixknots",
                                description="Constant-curvature C2 knots from braid words")
    sub = p.add_subparsers(dest="command", required=True)

    b = sub.add_parser("build", help="compile a braid word into closed curves")
    b.add_argument("--braid", required=True, help='braid word, e.g. "1 1 1" or "n=3; 1 -2"')
    b.add_argument("--out", required=True, help="curve document (JSON)")
    b.add_argument("--obj", help="OBJ polyline output")
    b.add_argument("--tube", help="OBJ tube mesh output")
    b.add_argument("--tube-radius", type=float, default=0.4)
    b.add_argument("--csv", help="CSV samples output")
    b.add_argument("--samples-per-unit", type=float, default=50)
    b.add_argument("--delta", type=float, default=DEFAULT_DELTA, help="distance sampling step")
    b.add_argument("--no-verify", action="store_true")
    b.set_defaults(func=cmd_build)

    v = sub.add_parser("verify", help="verify a curve document")
    v.add_argument("--in", dest="input", required=True)
    v.add_argument("--samples-per-unit", type=float, default=1000)
    v.add_argument("--delta", type=float, default=DEFAULT_DELTA)
    v.add_argument("--json", action="store_true", help="print the report as JSON")
    v.set_defaults(func=cmd_verify)

    s = sub.add_parser("sticks", help="show stick words and displacements")
    s.add_argument("--name", help="one of i+ i- j+ j- k+ k-")
    s.add_argument("--validate", action="store_true")
    s.set_defaults(func=cmd_sticks)

    lt = sub.add_parser("lattice", help="run the lattice gate on a word")
    lt.add_argument("--word", required=True, help='e.g. "I+ J+ I- J-"')
    lt.add_argument("--closed", action="store_true")
    lt.set_defaults(func=cmd_lattice)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
