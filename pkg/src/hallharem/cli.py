"""Command-line front end.

Exit codes: 0 for success/pass, 1 for a negative but valid outcome
(infeasible, not a witness, nothing found, verification failed), 2 for
usage or input errors.  Output is deterministic: identical invocations
produce identical bytes.
"""

from __future__ import annotations

import argparse
import sys
from typing import Sequence

from . import core_graph, decomposition, flow_matching, group_kit, harem_engine
from .errors import (
    BallBudgetExceeded,
    WitnessRefuted,
    HallHaremError,
    ParseError,
    SizeGuardError,
)


def _read_text(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path, "r", encoding="utf-8") as fh:
        return fh.read()


def _load_graph(path: str, k_flag: int | None) -> tuple[core_graph.FiniteBipartiteGraph, int]:
    graph, k_header = core_graph.parse_bg(_read_text(path))
    k = k_flag if k_flag is not None else k_header
    if k is None:
        raise ValueError("no k given: pass --k or add a 'k <int>' header")
    return graph, k


def _parse_window(text: str) -> range:
    lo, sep, hi = text.partition("..")
    if not sep:
        raise ValueError(f"window must look like 0..100, got {text!r}")
    return range(int(lo), int(hi))


def _parse_words(rank: int, text: str) -> list[group_kit.Word]:
    return [group_kit.parse_word(rank, tok) for tok in text.split(",") if tok.strip()]


def cmd_finite(args: argparse.Namespace) -> int:
    graph, k = _load_graph(args.file, args.k)
    req = flow_matching.MatchingRequest.all_required(graph, k)
    matching = flow_matching.solve_harem(req)
    if matching is None:
        if args.brute_check:
            if next(iter(flow_matching.brute_force_harem(req)), None) is not None:
                print("BRUTE-CHECK MISMATCH", file=sys.stderr)
                return 2
        print("INFEASIBLE")
        return 1
    if args.brute_check:
        first = next(iter(flow_matching.brute_force_harem(req)), None)
        if first is None or first.stars != matching.stars:
            print("BRUTE-CHECK MISMATCH", file=sys.stderr)
            return 2
    for a, star in sorted(matching.stars.items()):
        print(f"{a} -> {' '.join(str(b) for b in star)}")
    return 0


def _make_engine(args: argparse.Namespace) -> harem_engine.EngineState:
    if args.graph == "f2":
        spec = (
            decomposition.tight_spec(2)
            if args.mode == "tight"
            else decomposition.corollary_spec(2)
        )
        oracle = decomposition.build_action_graph(spec)
        k = args.k if args.k is not None else 2
        h = harem_engine.identity_witness()
    else:
        graph, k = _load_graph(args.file, args.k)
        oracle = graph.as_oracle(name=args.file)
        h = harem_engine.vacuous_witness(len(graph.left_ids))
    return harem_engine.EngineState(oracle, k=k, h=h, max_ball_size=args.max_ball)


def cmd_lazy(args: argparse.Namespace) -> int:
    engine = _make_engine(args)
    try:
        if args.left is not None:
            star = engine.match_left(args.left)
            print(f"L {args.left} -> {' '.join(str(b) for b in star)}")
        else:
            partner = engine.match_right(args.right)
            print(f"R {args.right} -> {partner}")
    except (WitnessRefuted, BallBudgetExceeded) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


def cmd_decompose(args: argparse.Namespace) -> int:
    window = _parse_window(args.window)
    provider: decomposition.DecompProvider
    if args.classic:
        provider = decomposition.ClassicF2Decomp()
    else:
        spec = (
            decomposition.tight_spec(2)
            if args.mode == "tight"
            else decomposition.corollary_spec(2)
        )
        provider = decomposition.ParadoxDecomp(spec, max_ball_size=args.max_ball)
    try:
        lines = list(decomposition.tsv_rows(provider, window))
    except (WitnessRefuted, BallBudgetExceeded) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    out = "\n".join(lines) + "\n"
    if args.out == "-":
        sys.stdout.write(out)
    else:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(out)
    return 0


def _parse_matching(text: str) -> flow_matching.HaremMatching:
    stars: dict[int, tuple[int, ...]] = {}
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        head, sep, tail = line.partition("->")
        if not sep:
            raise ValueError(f"bad matching line: {line!r}")
        stars[int(head.strip())] = tuple(int(t) for t in tail.split())
    return flow_matching.HaremMatching(stars=stars)


def cmd_verify(args: argparse.Namespace) -> int:
    if args.what == "matching":
        if args.file is None or args.matching is None:
            raise ValueError("matching verification needs --file and --matching")
        graph, k = _load_graph(args.file, args.k)
        matching = _parse_matching(_read_text(args.matching))
        report = flow_matching.verify_matching(
            flow_matching.MatchingRequest.all_required(graph, k), matching
        )
        if report.ok:
            print("PASS")
            return 0
        print("FAIL")
        for v in report.violations:
            print(f"  {v}")
        return 1
    if args.classic:
        classic = decomposition.ClassicF2Decomp()
        classify_a = classic.a_member
        if args.classic_defect is not None:
            classify_a = decomposition.planted_defect_classifier(
                classic.a_member, args.classic_defect, classic.k_set.elements[-1]
            )
        report = decomposition.verify_decomposition(
            classify_a, classic.b_member, classic.k_set, args.window_size
        )
    else:
        spec = decomposition.tight_spec(2)
        decomp = decomposition.ParadoxDecomp(spec, max_ball_size=args.max_ball)
        try:
            decomp.run_steps(args.steps)
        except (WitnessRefuted, BallBudgetExceeded) as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 1
        report = decomposition.verify_engine_window(decomp)
    if report.ok:
        print(f"PASS ({report.checked} indices)")
        return 0
    print(f"FAIL ({len(report.violations)} violations)")
    for v in report.violations:
        print(f"  {v}")
    return 1


def cmd_wbt(args: argparse.Namespace) -> int:
    words = _parse_words(args.rank, args.set)
    pair = group_kit.wbt_free(words)
    if pair is None:
        print("NOT-WITNESS")
        return 1
    print(f"WITNESS {pair[0]} {pair[1]}")
    return 0


def cmd_folner(args: argparse.Namespace) -> int:
    words = _parse_words(args.rank, args.set)
    r = group_kit.GeneratorSet.symmetrized(args.rank, words)
    ground = group_kit.ball(r, 0, args.ground_radius)
    found = group_kit.folner_search(words, args.n, ground, args.max_size)
    if found is None:
        print("NONE")
        return 1
    e = group_kit.enumeration(args.rank)
    print(",".join(str(e.index_to_word(i)) for i in sorted(found)))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hallharem",
        description="Finite and lazy perfect (1,k)-matchings, free-group "
        "doubling decompositions, and related searches.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("finite", help="solve a finite instance from a .bg file")
    p.add_argument("file")
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--brute-check", action="store_true")
    p.set_defaults(func=cmd_finite)

    p = sub.add_parser("lazy", help="answer one match query lazily")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--graph", choices=["f2"])
    group.add_argument("--file")
    p.add_argument("--k", type=int, default=None)
    side = p.add_mutually_exclusive_group(required=True)
    side.add_argument("--left", type=int)
    side.add_argument("--right", type=int)
    p.add_argument("--mode", choices=["tight", "corollary"], default="tight")
    p.add_argument("--max-ball", type=int, default=harem_engine.DEFAULT_MAX_BALL)
    p.set_defaults(func=cmd_lazy)

    p = sub.add_parser("decompose", help="dump a decomposition window as TSV")
    p.add_argument("--group", choices=["f2"], default="f2")
    p.add_argument("--window", required=True, help="half-open range, e.g. 0..100")
    p.add_argument("--out", default="-")
    p.add_argument("--classic", action="store_true")
    p.add_argument("--mode", choices=["tight", "corollary"], default="tight")
    p.add_argument("--max-ball", type=int, default=harem_engine.DEFAULT_MAX_BALL)
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("verify", help="verify a decomposition or a matching")
    p.add_argument("--what", choices=["decomposition", "matching"], required=True)
    p.add_argument("--window", dest="window_size", type=int, default=1000)
    p.add_argument("--classic", action="store_true")
    p.add_argument("--classic-defect", type=int, default=None)
    p.add_argument("--steps", type=int, default=2)
    p.add_argument("--file")
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--matching")
    p.add_argument("--max-ball", type=int, default=harem_engine.DEFAULT_MAX_BALL)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("wbt", help="decide whether a word set is a paradox witness")
    p.add_argument("--rank", type=int, required=True)
    p.add_argument("--set", required=True, help="comma-separated words, e.g. a,b")
    p.set_defaults(func=cmd_wbt)

    p = sub.add_parser("folner", help="search for a small set with low boundary ratio")
    p.add_argument("--rank", type=int, required=True)
    p.add_argument("--set", required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--ground-radius", type=int, required=True)
    p.add_argument("--max-size", type=int, required=True)
    p.set_defaults(func=cmd_folner)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        return args.func(args)
    except (ParseError, SizeGuardError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except HallHaremError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
