"""Command-line front end.

Exit codes: 0 when every requested check passes, 1 when a check fails,
2 for usage or resource errors.
"""
from __future__ import annotations

import argparse
import json
import random
import sys
from typing import List, Optional

from .arrangement import Arrangement, char_poly, chern_classes, chern_polynomial, reduced_char_poly
from .core.resolve import CutoffTooSmall, ResourceExceeded, matrix_budget
from .orchestrate import DEFAULT_BUDGET, conjecture_sweep, dumps, report, unstable_summary
from .rootsys import ParameterError, deformation

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def parse_range(text: str) -> List[int]:
    """"3", "0..2" or "1,3,5"."""
    try:
        if ".." in text:
            lo, hi = text.split("..")
            return list(range(int(lo), int(hi) + 1))
        return [int(v) for v in text.split(",")]
    except ValueError as exc:
        raise UsageError(f"bad range {text!r}") from exc


def _single(text: str, name: str) -> int:
    vals = parse_range(text)
    if len(vals) != 1:
        raise UsageError(f"--{name} needs a single value here")
    return vals[0]


def _arrangement(args) -> Arrangement:
    if getattr(args, "input", None):
        with open(args.input) as fh:
            return Arrangement.from_json(json.load(fh))
    if args.type != "A":
        raise UsageError("only --type A is supported")
    return deformation(args.m, _single(args.j, "j"), _single(args.k, "k"))


def _emit(args, doc) -> None:
    text = dumps(doc)
    if getattr(args, "out", None):
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _line(text: str):
    from .split import Line
    try:
        return Line.parse(text)
    except ValueError as exc:
        raise UsageError(f"bad line {text!r}") from exc


# commands ---------------------------------------------------------------------

def cmd_build(args) -> int:
    _emit(args, _arrangement(args).to_json())
    return EXIT_OK


def cmd_charpoly(args) -> int:
    A = _arrangement(args)
    doc = {"chi": char_poly(A), "reduced": reduced_char_poly(A)}
    if A.ambient_dim == 3:
        doc["c1"], doc["c2"] = chern_classes(A, 0)
    else:
        doc["chern"] = chern_polynomial(A, 0)[1:]
    _emit(args, doc)
    return EXIT_OK


def cmd_betti(args) -> int:
    from .logmod import minimal_resolution
    A = _arrangement(args)
    res = minimal_resolution(A, args.cutoff)
    _emit(args, {"beta": res.betti.to_json(), "pdim": res.pdim,
                 "hilbert": {str(d): v for d, v in sorted(res.hilbert.items())}})
    return EXIT_OK


def cmd_splitting(args) -> int:
    from .split import is_unstable, jumping_order, splitting_type
    if not args.line:
        raise UsageError("splitting needs --line")
    A = _arrangement(args)
    out = []
    for text in args.line:
        L = _line(text)
        st = splitting_type(A, L)
        out.append({"line": L.to_string(), "a1": st.a1, "a2": st.a2,
                    "order": jumping_order(A, L), "unstable": is_unstable(A, L)})
    _emit(args, out[0] if len(out) == 1 else out)
    return EXIT_OK


def cmd_unstable(args) -> int:
    A = _arrangement(args)
    if A.params is None or A.ambient_dim != 3:
        raise UsageError("unstable scans need an A2 deformation")
    doc = unstable_summary(A, args.scan_bound, args.random, args.seed)
    _emit(args, doc)
    ok = doc.get("matches_catalog") is not False and doc.get("all_tangent_to_conic") is not False
    return EXIT_OK if ok else EXIT_FAIL


def cmd_jumping(args) -> int:
    from .a2geo import jump_catalog
    from .split import jumping_order, splitting_type
    A = _arrangement(args)
    if A.params is None or A.ambient_dim != 3:
        raise UsageError("jumping needs an A2 deformation")
    _, _, j, k = A.params
    rows = []
    ok = True
    for e in jump_catalog(k, j):
        st = splitting_type(A, e.line)
        match = st == e.predicted_splitting
        ok &= match
        rows.append({**e.to_json(), "computed": [st.a1, st.a2], "computed_order": jumping_order(A, e.line),
                     "matches": match})
    _emit(args, {"lines": rows, "all_match": ok})
    return EXIT_OK if ok else EXIT_FAIL


def cmd_steiner_moves(args) -> int:
    from .a2geo import random_line
    from .split import Line
    from .steiner import extension_move, pencil_splitting, reduction_move, steiner_extract
    A = _arrangement(args)
    M = steiner_extract(A)
    doc = {"matrix": M.to_strings(), "shape": list(M.shape)}
    ok = True
    if args.line:
        L = _line(args.line[0])
        R = reduction_move(M, L)
        E = extension_move(R, L, seed=args.seed)
        rng = random.Random(args.seed)
        sample = [random_line(rng) for _ in range(args.random)]
        checks = []
        for H in sample:
            a = pencil_splitting(M, H)
            b = pencil_splitting(E, H)
            checks.append({"line": H.to_string(), "original": [a.a1, a.a2], "round_trip": [b.a1, b.a2]})
            ok &= a == b
        ok &= E.shape == M.shape
        doc.update({"reduced": R.to_strings(), "reduced_shape": list(R.shape),
                    "extended": E.to_strings(), "extended_shape": list(E.shape),
                    "round_trip": checks, "round_trip_ok": ok})
    _emit(args, doc)
    return EXIT_OK if ok else EXIT_FAIL


def cmd_a3(args) -> int:
    from .space3 import dual_betti_equal, scan_unstable_planes
    if args.action != "unstable-planes":
        raise UsageError("a3 supports the action unstable-planes")
    A = deformation(args.m, _single(args.j, "j"), _single(args.k, "k"))
    scan = scan_unstable_planes(A, True, args.scan_bound, args.seed, args.random)
    doc = scan.to_json()
    doc["betti_equal"] = dual_betti_equal(A)
    _emit(args, doc)
    return EXIT_OK if doc["betti_equal"] else EXIT_FAIL


def cmd_sweep(args) -> int:
    rep = conjecture_sweep(args.type, args.m, parse_range(args.j), parse_range(args.k),
                           budget=args.budget, jobs=args.jobs, cache_dir=args.cache_dir,
                           with_unstable=args.with_unstable)
    if args.csv:
        with open(args.csv, "w") as fh:
            fh.write(rep.to_csv())
    _emit(args, rep.to_json())
    return EXIT_OK if rep.all_pass() else EXIT_FAIL


def cmd_report(args) -> int:
    A = _arrangement(args)
    opts = {"betti": not args.no_betti, "lines": args.line or [], "random_lines": args.random,
            "seed": args.seed, "scan": args.scan, "scan_bound": args.scan_bound, "cutoff": args.cutoff}
    _emit(args, report(A, opts))
    return EXIT_OK


# parser -------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="logsheaf", description="Logarithmic sheaves of deformed Weyl arrangements")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--type", default="A")
    common.add_argument("--m", type=int, default=None)
    common.add_argument("--j", default=None)
    common.add_argument("--k", default=None)
    common.add_argument("--line", action="append")
    common.add_argument("--cutoff", type=int, default=None)
    common.add_argument("--scan-bound", type=int, default=3)
    common.add_argument("--random", type=int, default=None)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--out", default=None)
    common.add_argument("--cache-dir", default=None)
    common.add_argument("--input", default=None, help="arrangement JSON instead of --type/--m/--j/--k")
    common.add_argument("--budget", type=int, default=DEFAULT_BUDGET, help="largest dense matrix, in entries")
    sub = p.add_subparsers(dest="command", required=True)
    for name, fn in [("build", cmd_build), ("charpoly", cmd_charpoly), ("betti", cmd_betti),
                     ("splitting", cmd_splitting), ("unstable", cmd_unstable), ("jumping", cmd_jumping),
                     ("steiner-moves", cmd_steiner_moves), ("a3", cmd_a3), ("sweep", cmd_sweep),
                     ("report", cmd_report)]:
        sp = sub.add_parser(name, parents=[common])
        sp.set_defaults(func=fn)
        if name == "a3":
            sp.add_argument("action", nargs="?", default="unstable-planes")
        if name == "sweep":
            sp.add_argument("--jobs", type=int, default=1)
            sp.add_argument("--csv", default=None)
            sp.add_argument("--with-unstable", action="store_true")
        if name == "report":
            sp.add_argument("--scan", action="store_true")
            sp.add_argument("--no-betti", action="store_true")
    return p


_RANDOM_DEFAULTS = {"unstable": 200, "a3": 50, "steiner-moves": 20}
_K_DEFAULTS = {"sweep": "1..5", "a3": "2"}


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    if args.random is None:
        args.random = _RANDOM_DEFAULTS.get(args.command, 0)
    if args.k is None:
        if args.command in _K_DEFAULTS:
            args.k = _K_DEFAULTS[args.command]
        elif not args.input:
            print("error: --k is required", file=sys.stderr)
            return EXIT_USAGE
    if args.j is None:
        args.j = "0..2" if args.command == "sweep" else "0"
    if args.m is None:
        args.m = 3 if args.command == "a3" else 2
    try:
        with matrix_budget(args.budget):
            return args.func(args)
    except (UsageError, ParameterError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ResourceExceeded, CutoffTooSmall) as exc:
        print(f"resource error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
