"""Command-line surface: params, play, verify, fuzz, serve."""

from __future__ import annotations

import argparse
import sys
import time

from .devils import make_devil
from .fuzz import fuzz_implementation, fuzz_lemmas
from .match import run_match, verify_trace
from .params import ParamSet, constraint_violations, solve_params, toy_params
from .rat import rat


def _load_params(args) -> ParamSet:
    if getattr(args, "toy", False):
        ps = toy_params(q=args.toy_q, kappa=args.toy_kappa, xi=rat(args.xi),
                        sigma=rat(args.toy_sigma))
        print("# toy parameters: not theorem-covered", file=sys.stderr)
        return ps
    return solve_params(rat(args.xi), args.kappa)


def cmd_params(args) -> int:
    ps = _load_params(args)
    print(ps.describe())
    bad = constraint_violations(ps)
    if args.check:
        if bad:
            print("violated constraints:")
            for line in bad:
                print(f"  {line}")
            return 1
        print("all parameter constraints hold (exact re-verification)")
    return 0


def cmd_play(args) -> int:
    ps = _load_params(args)
    if args.script:
        import json
        from .devils import ScriptedDevil
        with open(args.script) as fh:
            devil = ScriptedDevil(json.load(fh), args.seed)
    else:
        devil = make_devil(args.devil, args.seed)
    t0 = time.perf_counter()
    rep = run_match(ps, devil, args.horizon, toy=args.toy,
                    stack_lines=args.stack_lines, depth=args.depth)
    dt = time.perf_counter() - t0
    print(rep.summary() + f" [{dt:.1f}s]")
    if args.trace_out:
        with open(args.trace_out, "w") as fh:
            fh.write(rep.trace)
        print(f"trace written to {args.trace_out}")
    return 0 if rep.survived else 1


def cmd_verify(args) -> int:
    with open(args.trace) as fh:
        text = fh.read()
    rep = verify_trace(text, toy=args.toy)
    print(rep.describe())
    return 0 if rep.ok else 1


def cmd_fuzz(args) -> int:
    ps = _load_params(args)
    failed = False
    if args.suite in ("lemmas", "all"):
        t0 = time.perf_counter()
        for rep in fuzz_lemmas(ps, args.trials, args.seed):
            print(rep.describe())
            if not rep.ok:
                failed = True
                for ce in rep.counterexamples[:3]:
                    print(f"  counterexample: {ce}")
        print(f"lemma suites: {time.perf_counter() - t0:.1f}s")
    if args.suite in ("implementation", "all"):
        t0 = time.perf_counter()
        rep = fuzz_implementation(ps, args.big_moves, args.seed)
        print(rep.describe() + f" [{time.perf_counter() - t0:.1f}s]")
        if not rep.ok:
            failed = True
            for v in rep.violations[:5]:
                print(f"  violation: {v}")
    return 1 if failed else 0


def cmd_serve(args) -> int:
    from .service import serve
    ps = _load_params(args)
    serve(ps, host=args.host, port=args.port, toy=args.toy)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="adgame",
        description="Weighted angel-devil game engine and harness")
    sub = p.add_subparsers(dest="cmd", required=True)

    def common(sp, toy=True):
        sp.add_argument("--xi", default="3/4", help="safety fraction (2/3 < xi < 1)")
        sp.add_argument("--kappa", type=int, default=12)
        if toy:
            sp.add_argument("--toy", action="store_true",
                            help="relaxed small parameters (not theorem-covered)")
            sp.add_argument("--toy-q", type=int, default=8)
            sp.add_argument("--toy-kappa", type=int, default=3)
            sp.add_argument("--toy-sigma", default="1/4")

    sp = sub.add_parser("params", help="solve and check the parameter system")
    common(sp)
    sp.add_argument("--check", action="store_true", default=True)
    sp.set_defaults(fn=cmd_params)

    sp = sub.add_parser("play", help="run a match against a built-in devil")
    common(sp)
    sp.add_argument("--devil", default="random",
                    choices=["random", "wall", "adversarial", "zero"])
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--depth", type=int, default=1,
                    help="initial amplifier depth (grows lazily)")
    sp.add_argument("--horizon", type=int, default=1000)
    sp.add_argument("--trace-out", default=None)
    sp.add_argument("--stack-lines", action="store_true")
    sp.add_argument("--script", default=None,
                    help="JSON file of scripted devil turns")
    sp.set_defaults(fn=cmd_play)

    sp = sub.add_parser("verify", help="replay and verify a trace file")
    sp.add_argument("trace")
    sp.add_argument("--toy", action="store_true")
    sp.set_defaults(fn=cmd_verify)

    sp = sub.add_parser("fuzz", help="run the lemma and implementation fuzz")
    common(sp, toy=False)
    sp.add_argument("--suite", default="all",
                    choices=["lemmas", "implementation", "all"])
    sp.add_argument("--trials", type=int, default=10000)
    sp.add_argument("--big-moves", type=int, default=100)
    sp.add_argument("--seed", type=int, default=0)
    sp.set_defaults(fn=cmd_fuzz, toy=False)

    sp = sub.add_parser("serve", help="start the interactive session service")
    common(sp)
    sp.add_argument("--host", default="127.0.0.1")
    sp.add_argument("--port", type=int, default=8642)
    sp.set_defaults(fn=cmd_serve)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
