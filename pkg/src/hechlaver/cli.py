"""Command line entry point.

Exit status: 0 on success, 1 when a check finds a violation, 2 on usage
or parse errors.
"""
from __future__ import annotations

import argparse
import os
import sys
from typing import Optional

from .dichotomy import CertificateError, DichotomyCertificate, check_certificate, solve_dichotomy
from .documents import Document, SyncFamily, parse_document
from .filters import make_filter
from .presentations import PairAutomaton
from .proofkit import CombinatorError, RootedFamily, lemma1_union, sync_intersection
from .sexpr import ParseError, format_tree, parse_set
from .trees import RegularTree, TreeError, sample_branch

USAGE_ERROR, VIOLATION = 2, 1


class UsageError(Exception):
    pass


def filter_arg(text: str):
    kind, _, seed = text.partition(":")
    if kind not in ("frechet", "density", "ultra") or (seed and kind != "ultra"):
        raise argparse.ArgumentTypeError(f"unknown filter {text!r}; use frechet, density or ultra[:SET]")
    try:
        return make_filter(kind, parse_set(seed) if seed else None)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc))


def load(path: str) -> Document:
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise UsageError(f"{path}: {exc.strerror}")
    try:
        return parse_document(text)
    except ParseError as exc:
        raise UsageError(f"{path}: {exc}")


def load_one(path: str, kind: type, what: str):
    try:
        return load(path).only(kind, what)
    except ParseError as exc:
        raise UsageError(f"{path}: {exc}")


def emit(text: str, out: Optional[str]) -> None:
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# -- subcommands ----------------------------------------------------------------


def cmd_solve(args) -> int:
    p = load_one(args.instance, PairAutomaton, "automaton")
    cert = solve_dichotomy(p, args.filter)
    emit(cert.to_text(), args.out)
    return 0


def cmd_check(args) -> int:
    cert = load_one(args.certificate, DichotomyCertificate, "certificate")
    p = load_one(args.instance, PairAutomaton, "automaton") if args.instance else cert.automaton
    try:
        report = check_certificate(p, cert, budget=args.samples, seed=args.seed)
    except CertificateError as exc:
        print(f"violation: {exc}")
        return VIOLATION
    for v in report.violations:
        print(f"violation: {v}")
    if report.ok:
        print(f"ok: {cert.verdict}, {report.samples} branches sampled")
        return 0
    return VIOLATION


def cmd_play(args) -> int:
    from . import games

    game = args.game
    payoff = load_one(args.payoff, PairAutomaton, "automaton")
    if args.vs:
        cert = load_one(args.vs, DichotomyCertificate, "certificate")
        if cert.automaton != payoff:
            raise UsageError("certificate was issued for a different payoff set")
    else:
        cert = solve_dichotomy(payoff, args.filter)
    machine_role = "II" if args.role == "I" else "I"
    try:
        machine = games.machine_strategy(cert.tree, cert.verdict, game, machine_role)
    except games.StrategyError as exc:
        print(f"note: {exc}; the machine plays at random (seed {args.seed})")
        machine = games.RandomStrategy(game, machine_role, args.seed)
    color = sys.stdout.isatty() and "NO_COLOR" not in os.environ
    if args.script:
        try:
            stream = open(args.script)
        except OSError as exc:
            raise UsageError(f"{args.script}: {exc.strerror}")
    else:
        stream = sys.stdin
    try:
        t = games.interactive_session(game, args.role, payoff, machine, stream, sys.stdout,
                                      budget=args.budget, echo=bool(args.script), color=color)
    finally:
        if stream is not sys.stdin:
            stream.close()
    if args.transcript:
        emit(t.to_text(), args.transcript)
    return 0


def cmd_ramsey(args) -> int:
    from .filters import LazyUltra
    from .ramsey import ExtractionError, silver_extract

    coloring = load_one(args.coloring, PairAutomaton, "automaton")
    try:
        seed = parse_set(args.seed_set) if args.seed_set else None
        report = silver_extract(coloring, args.d, args.N, LazyUltra(seed))
    except (ExtractionError, ValueError) as exc:
        raise UsageError(str(exc))
    print("X = " + " ".join(map(str, report.X)))
    print(f"side {report.side}")
    print(f"checked {report.checked} {args.d}-subsets, "
          + ("all monochromatic" if report.monochromatic else "NOT monochromatic"))
    if args.out:
        emit(report.to_text(), args.out)
    return 0 if report.monochromatic else VIOLATION


def cmd_tree_sample(args) -> int:
    t = load_one(args.tree, RegularTree, "tree")
    try:
        res = sample_branch(t, args.scheme, args.length, args.seed)
    except TreeError as exc:
        raise UsageError(str(exc))
    if args.scheme == "lasso":
        prefix, lasso = res
        print(" ".join(map(str, prefix)))
        print(lasso.literal())
    else:
        print(" ".join(map(str, res)))
    return 0


def cmd_tree_classify(args) -> int:
    t = load_one(args.tree, RegularTree, "tree")
    print(t.classify(args.filter))
    return 0


def cmd_union(args) -> int:
    fam = load_one(args.family, RootedFamily, "family")
    try:
        t = lemma1_union(fam, args.filter)
    except CombinatorError as exc:
        raise UsageError(str(exc))
    print(format_tree(t))
    return 0


def cmd_intersect(args) -> int:
    sync = load_one(args.family, SyncFamily, "sync form")
    try:
        t = sync_intersection(sync.base, sync.family, args.filter)
    except CombinatorError as exc:
        raise UsageError(str(exc))
    print(format_tree(t))
    return 0


# -- parser ----------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(USAGE_ERROR, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--filter", type=filter_arg, default=filter_arg("frechet"),
                        help="frechet, density, or ultra[:SET] (default frechet)")
    common.add_argument("--seed", type=int, default=0, help="seed for all randomized behaviour")

    ap = _Parser(prog="hechlaver", description="Hechler/Laver dichotomy solver and game engine")
    sub = ap.add_subparsers(dest="command", parser_class=_Parser)

    s = sub.add_parser("solve", parents=[common], help="solve an instance and print a certificate")
    s.add_argument("instance")
    s.add_argument("--out")
    s.set_defaults(run=cmd_solve)

    c = sub.add_parser("check", parents=[common], help="verify a certificate")
    c.add_argument("certificate")
    c.add_argument("--instance")
    c.add_argument("--samples", type=int, default=100)
    c.set_defaults(run=cmd_check)

    for game in ("game1", "game2"):
        g = sub.add_parser(game, help=f"play {game}")
        gs = g.add_subparsers(dest="action", parser_class=_Parser)
        play = gs.add_parser("play", parents=[common])
        play.add_argument("--payoff", required=True)
        play.add_argument("--as", dest="role", choices=["I", "II"], required=True)
        play.add_argument("--vs", help="certificate supplying the machine's strategy")
        play.add_argument("--script", help="read the human's moves from this file")
        play.add_argument("--budget", type=int, default=20)
        play.add_argument("--transcript", help="save the transcript here")
        play.set_defaults(run=cmd_play, game="g1" if game == "game1" else "g2")

    r = sub.add_parser("ramsey", help="homogeneous sets for clopen colorings")
    rs = r.add_subparsers(dest="action", parser_class=_Parser)
    ex = rs.add_parser("extract", parents=[common])
    ex.add_argument("--coloring", required=True)
    ex.add_argument("--d", type=int, required=True)
    ex.add_argument("--N", type=int, default=10)
    ex.add_argument("--seed-set", help="ultrafilter seed set literal")
    ex.add_argument("--out", help="write the full report here")
    ex.set_defaults(run=cmd_ramsey)

    t = sub.add_parser("tree", help="inspect trees")
    ts = t.add_subparsers(dest="action", parser_class=_Parser)
    sm = ts.add_parser("sample", parents=[common])
    sm.add_argument("tree")
    sm.add_argument("--scheme", choices=["minimal", "random", "lasso"], default="minimal")
    sm.add_argument("--length", type=int, default=8)
    sm.set_defaults(run=cmd_tree_sample)
    cl = ts.add_parser("classify", parents=[common])
    cl.add_argument("tree")
    cl.set_defaults(run=cmd_tree_classify)

    pk = sub.add_parser("proofkit", help="tree combinators")
    ps = pk.add_subparsers(dest="action", parser_class=_Parser)
    un = ps.add_parser("union", parents=[common])
    un.add_argument("family")
    un.set_defaults(run=cmd_union)
    it = ps.add_parser("intersect", parents=[common])
    it.add_argument("family")
    it.set_defaults(run=cmd_intersect)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    if not hasattr(args, "run"):
        ap.print_usage(sys.stderr)
        return USAGE_ERROR
    try:
        return args.run(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR


if __name__ == "__main__":
    sys.exit(main())
