"""Command-line entry point.

Subcommands: gen, run, verify, enum, search-unfair, render.  Every command
is deterministic given its flags; randomness always flows from an explicit
--seed.  Exit codes: 0 success, 1 a checked property failed or a searched
object was not found, 2 usage or input errors.
"""

from __future__ import annotations

import argparse
import sys
from concurrent.futures import ProcessPoolExecutor

from .lattice import Cell
from .config import ConfigError, all_in_configuration, load, save
from .oracle import StateSpaceTooLarge
from .support import Support, SupportError, check_angle_census, boundary_witness, parse_shape_text
from . import generators, oracle
from .rules import rule_report
from .render import render_svg
from .scheduler import (
    Outcome,
    RandomSequential,
    RoundRobin,
    Scripted,
    run as drive,
)


class UsageError(Exception):
    pass


def _load_support(args: argparse.Namespace) -> Support:
    if args.shape:
        try:
            return generators.shape_by_name(args.shape)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
    if args.random is not None:
        return generators.random_support(args.random, args.seed)
    try:
        with open(args.file, "r", encoding="utf-8") as fh:
            return Support(parse_shape_text(fh.read()))
    except OSError as exc:
        raise UsageError(f"cannot read shape file: {exc}") from None


def _require_simply_connected(s: Support) -> None:
    holes = s.hole_cells()
    if holes:
        sample = sorted(holes)[0]
        raise UsageError(
            f"support is not simply connected: enclosed empty cell at ({sample.q} {sample.r})"
        )


def cmd_gen(args: argparse.Namespace) -> int:
    support = _load_support(args)
    _require_simply_connected(support)
    if args.init == "erosion":
        cfg = generators.erosion_orientation(support)
    elif args.init == "all-in":
        cfg = all_in_configuration(support)
    else:
        portmaps = generators.random_portmaps(support, args.seed)
        cfg = generators.random_registers(
            support, args.seed + 1, args.conflict_prob, portmaps
        )
    save(cfg, args.out)
    print(f"wrote {args.out} ({len(support)} cells)")
    return 0


def cmd_run(args: argparse.Namespace) -> int:
    cfg = load(args.config)
    if args.scheduler == "random":
        kind = RandomSequential(args.seed)
    elif args.scheduler == "roundrobin":
        kind = RoundRobin()
    elif args.scheduler.startswith("script:"):
        with open(args.scheduler[len("script:"):], "r", encoding="utf-8") as fh:
            kind = Scripted(tuple(parse_shape_text(fh.read())))
    else:
        raise UsageError(f"unknown scheduler {args.scheduler!r}")
    trace_fh = open(args.trace, "w", encoding="utf-8") if args.trace else None
    try:
        result = drive(cfg, kind, max_steps=args.max_steps, trace_file=trace_fh)
    finally:
        if trace_fh:
            trace_fh.close()
    if result.outcome is Outcome.FINAL:
        report = rule_report(result.config)
        print(f"FINAL steps={result.steps} sinks={len(report.sinks)}")
        if not report.valid or len(report.sinks) != 1:
            print("final configuration is not a valid single-sink state:")
            print(report.to_text())
            return 1
        return 0
    print(f"CAP steps={result.steps}")
    return 0


def cmd_verify(args: argparse.Namespace) -> int:
    cfg = load(args.config)
    report = rule_report(cfg)
    print(f"valid={'yes' if report.valid else 'no'} sinks={len(report.sinks)}")
    if args.per_particle:
        for line in report.to_records():
            print(line)
    if not report.valid:
        bad = ", ".join(f"({c.q} {c.r})" for c in sorted(report.violating))
        print(f"violations at: {bad}")
        return 1
    if len(report.sinks) != 1:
        print("valid configuration without a unique sink; this should be impossible")
        return 1
    return 0


def _enum_one(payload: tuple[str, tuple[tuple[int, int], ...]]) -> tuple[bool, str]:
    check, cells = payload
    support = Support(Cell(q, r) for q, r in cells)
    if check == "unique-sink":
        rep = oracle.check_unique_sink(support)
        return rep.ok, rep.counterexamples[0] if not rep.ok else ""
    if check == "silence":
        rep = oracle.check_silence(support)
        return rep.ok, rep.mismatches[0] if not rep.ok else ""
    if check == "reach":
        rep = oracle.check_reachability(support)
        return rep.ok, rep.unreachable[0] if not rep.ok else ""
    if check == "angle-census":
        if len(support) < 3 or not support.is_two_connected():
            return True, ""
        return check_angle_census(support), f"census identity fails on {sorted(support.cells)}"
    if check == "boundary-witness":
        if len(support) < 2:
            return True, ""
        try:
            boundary_witness(support)
            return True, ""
        except Exception as exc:  # raise -> counterexample
            return False, f"{sorted(support.cells)}: {exc}"
    raise UsageError(f"unknown check {check!r}")


def cmd_enum(args: argparse.Namespace) -> int:
    supports = generators.enumerate_supports(args.n)
    payloads = [
        (args.check, tuple((c.q, c.r) for c in s.cells)) for s in supports
    ]
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(_enum_one, payloads, chunksize=16))
    else:
        results = [_enum_one(p) for p in payloads]
    failures = [(p, detail) for (ok, detail), p in zip(results, payloads) if not ok]
    print(f"check={args.check} n={args.n} supports={len(supports)}")
    if failures:
        path = f"counterexample-{args.check}-n{args.n}.txt"
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(failures[0][1] + "\n")
        print(f"{len(failures)} counterexamples; first dumped to {path}")
        return 1
    print("0 counterexamples")
    return 0


def cmd_search_unfair(args: argparse.Namespace) -> int:
    candidates: list[Support] = []
    if args.shape:
        candidates.append(generators.shape_by_name(args.shape))
    else:
        for n in range(2, args.max_n + 1):
            candidates.extend(generators.enumerate_supports(n))
        candidates.sort(key=lambda s: (len(s), len(s.edges())))
    for support in candidates:
        if 3 ** len(support.edges()) > args.max_states:
            continue
        found = oracle.find_unfair_cycle(support, max_states=args.max_states)
        if found is None:
            continue
        print(
            f"cycle found: {len(support)} cells, {len(support.edges())} edges, "
            f"period {found.period}"
        )
        if args.out_config:
            save(found.initial_config(), args.out_config)
            print(f"initial configuration written to {args.out_config}")
        if args.out_script:
            with open(args.out_script, "w", encoding="utf-8") as fh:
                for c in found.script:
                    fh.write(f"{c.q} {c.r}\n")
            print(f"activation script written to {args.out_script}")
        return 0
    print("no cycle found within budget")
    return 1


def cmd_render(args: argparse.Namespace) -> int:
    cfg = load(args.config)
    if args.trace:
        with open(args.trace, "r", encoding="utf-8") as fh:
            steps = []
            for raw in fh:
                line = raw.split("#", 1)[0].strip()
                if not line:
                    continue
                parts = line.split()
                steps.append(Cell(int(parts[1]), int(parts[2])))
        from .algorithm import activation_step

        for cell in steps[: args.frame]:
            cfg, _ = activation_step(cfg, cell)
    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write(render_svg(cfg))
    print(f"wrote {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="trielect",
        description="Triangular-grid leader election: generate, run, verify, sweep, render.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="write a configuration file")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--shape", help="named shape (triangle3, lineN, hexagonK, parallelogramWxH)")
    src.add_argument("--random", type=int, metavar="N", help="random support of N cells")
    src.add_argument("--file", help="shape file (one 'q r' per line)")
    p.add_argument("--init", choices=("erosion", "all-in", "random"), default="erosion")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--conflict-prob", type=float, default=0.25)
    p.add_argument("--out", required=True)
    p.set_defaults(fn=cmd_gen)

    p = sub.add_parser("run", help="drive a configuration with a scheduler")
    p.add_argument("--config", required=True)
    p.add_argument("--scheduler", default="random", help="random | roundrobin | script:PATH")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-steps", type=int, default=1_000_000)
    p.add_argument("--trace", help="write a trace log to this path")
    p.set_defaults(fn=cmd_run)

    p = sub.add_parser("verify", help="check the four rules and count sinks")
    p.add_argument("--config", required=True)
    p.add_argument("--per-particle", action="store_true")
    p.set_defaults(fn=cmd_verify)

    p = sub.add_parser("enum", help="sweep all simply connected supports of size N")
    p.add_argument("--n", type=int, required=True)
    p.add_argument(
        "--check",
        required=True,
        choices=("unique-sink", "silence", "reach", "angle-census", "boundary-witness"),
    )
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(fn=cmd_enum)

    p = sub.add_parser("search-unfair", help="look for a periodic execution")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--shape", help="search one named shape")
    src.add_argument("--max-n", type=int, help="scan all supports up to N cells")
    p.add_argument("--max-states", type=int, default=2_000_000)
    p.add_argument("--out-config", help="write the cycle's initial configuration here")
    p.add_argument("--out-script", help="write the cyclic activation script here")
    p.set_defaults(fn=cmd_search_unfair)

    p = sub.add_parser("render", help="render a configuration (or trace frame) as SVG")
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--trace")
    p.add_argument("--frame", type=int, default=0)
    p.set_defaults(fn=cmd_render)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ConfigError, SupportError, StateSpaceTooLarge) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
