"""Command-line entry point.

Every command that takes an input graph writes a run manifest (command
line, seed, configuration, sizes before and after, output paths) so that
the run can be repeated exactly.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time
from pathlib import Path
from typing import Any, Sequence

from . import __version__
from .confluence import emit_matrix, matrix_json, test_all_pairs, test_pair, enumerate_graphs
from .engine import Engine, exhaustive_forward, randomized_exhaustive_deflate, replay_trace
from .errors import VCKernelError
from .graph import Graph, Instance
from .io import (
    GraphFormat,
    emit_dot,
    emit_graph,
    emit_json,
    emit_solution,
    guess_format,
    parse_graph,
    parse_json_trace,
    parse_solution,
)
from .lifting import lift_solution
from .rules.backward import STANDARD_BACKWARD, resolve_backward_name
from .rules.forward import DEFAULT_PIPELINE, STANDARD_FORWARD, resolve_rule_name
from .search import (
    FindConfig,
    InflateDeflateConfig,
    SearchResult,
    find,
    find_and_reduce,
    inflate_deflate,
    local_inflate_deflate,
)
from .solver import branch_and_reduce_solve, brute_force_tau, verify_cover

FORMATS = [f.value for f in GraphFormat]


class CliError(Exception):
    pass


# -- helpers ---------------------------------------------------------------------------


def _rule_list(text: str | None, default: Sequence[str], backward: bool = False) -> tuple[str, ...]:
    if not text:
        return tuple(default)
    resolve = resolve_backward_name if backward else resolve_rule_name
    return tuple(resolve(name.strip()) for name in text.split(",") if name.strip())


def _read_input(args) -> tuple[Graph, str]:
    path = Path(args.input)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc.strerror}") from None
    fmt = args.format or guess_format(path).value
    return parse_graph(text, fmt), hashlib.sha256(text.encode()).hexdigest()


def _write(path: str | None, text: str) -> None:
    if path:
        Path(path).write_text(text, encoding="utf-8")


def _size(instance: Instance) -> dict[str, int]:
    return {"n": instance.graph.n, "m": instance.graph.m, "k": instance.k}


def _out_format(args) -> str:
    if getattr(args, "out_format", None):
        return args.out_format
    return guess_format(args.out).value if args.out else GraphFormat.EDGE_LIST.value


class Run:
    """Collects manifest fields while a command executes."""

    def __init__(self, args, argv: Sequence[str]):
        self.args = args
        self.manifest: dict[str, Any] = {
            "tool": "vckernel",
            "version": __version__,
            "command": args.command,
            "argv": list(argv),
            "seed": getattr(args, "seed", None),
            "config": {k: v for k, v in sorted(vars(args).items()) if k not in ("func", "command")},
            "outputs": {},
        }
        self.started = time.monotonic()

    def output(self, role: str, path: str | None) -> None:
        if path:
            self.manifest["outputs"][role] = path

    def finish(self) -> None:
        self.manifest["seconds"] = round(time.monotonic() - self.started, 3)
        path = getattr(self.args, "manifest", None)
        if path is None and getattr(self.args, "out", None):
            path = self.args.out + ".manifest.json"
        text = json.dumps(self.manifest, indent=2, sort_keys=True) + "\n"
        if path:
            Path(path).write_text(text, encoding="utf-8")
        else:
            sys.stderr.write(text)


def _report_sizes(before: dict[str, int], after: dict[str, int]) -> None:
    print(f"before: n={before['n']} m={before['m']} k={before['k']}")
    print(f"after:  n={after['n']} m={after['m']} k={after['k']}")


def _emit_instance(args, run: Run, engine: Engine, records) -> None:
    if args.out:
        _write(args.out, emit_graph(engine.graph, _out_format(args)))
        run.output("graph", args.out)
    else:
        sys.stdout.write(emit_graph(engine.graph, _out_format(args)))
    if args.trace:
        _write(args.trace, emit_json(records))
        run.output("trace", args.trace)


def _start(args, argv) -> tuple[Run, Engine]:
    run = Run(args, argv)
    graph, digest = _read_input(args)
    run.manifest["input"] = {"path": args.input, "sha256": digest}
    engine = Engine(Instance(graph, 0), seed=args.seed)
    run.manifest["start"] = _size(engine.instance)
    return run, engine


# -- commands ----------------------------------------------------------------------------


def cmd_kernelize(args, argv) -> int:
    run, engine = _start(args, argv)
    rules = _rule_list(args.rules, DEFAULT_PIPELINE)
    before = _size(engine.instance)
    if args.order == "fixed":
        records = exhaustive_forward(engine, rules)
    else:
        records = randomized_exhaustive_deflate(engine, rules, engine.derived_rng("kernelize"))
    after = _size(engine.instance)
    run.manifest["end"] = after
    _emit_instance(args, run, engine, records)
    _report_sizes(before, after)
    run.finish()
    return 0


def _find_config(args) -> FindConfig:
    return FindConfig(
        max_depth=args.depth,
        forward_rules=_rule_list(args.rules, STANDARD_FORWARD),
        backward_rules=_rule_list(args.backward, STANDARD_BACKWARD, backward=True),
        time_limit=args.time_limit,
    )


def _write_sequences(args, run: Run, sequences) -> None:
    report = json.dumps({"sequences": [s.to_json() for s in sequences]}, indent=2, sort_keys=True) + "\n"
    if args.report:
        _write(args.report, report)
        run.output("report", args.report)
    if args.dot:
        _write(args.dot, "".join(emit_dot(s.records, name=f"seq{i}") for i, s in enumerate(sequences)))
        run.output("dot", args.dot)


def cmd_find(args, argv) -> int:
    run, engine = _start(args, argv)
    sequences = find(engine, _find_config(args))
    run.manifest["end"] = _size(engine.instance)
    run.manifest["sequences"] = len(sequences)
    _write_sequences(args, run, sequences)
    for s in sequences:
        print(f"root {s.root}: {','.join(s.rules)} dn={s.delta_n} dk={s.delta_k}")
    print(f"sequences: {len(sequences)}")
    run.finish()
    return 0


def cmd_far(args, argv) -> int:
    run, engine = _start(args, argv)
    before = _size(engine.instance)
    result = find_and_reduce(engine, _find_config(args), _rule_list(args.pipeline, DEFAULT_PIPELINE))
    after = _size(engine.instance)
    run.manifest["end"] = after
    _write_sequences(args, run, result.sequences)
    _emit_instance(args, run, engine, result.records)
    _write_log(args, run, result)
    _report_sizes(before, after)
    run.finish()
    return 0


def _write_log(args, run: Run, result: SearchResult) -> None:
    if not getattr(args, "log", None):
        return
    rows = []
    for entry in result.log:
        row = entry.to_json()
        if not args.log_timing:
            row.pop("seconds")
        rows.append(row)
    _write(args.log, json.dumps(rows, indent=1) + "\n")
    run.output("log", args.log)


def _run_inflate_deflate(args, argv, local: bool) -> int:
    run, engine = _start(args, argv)
    if args.alpha <= 0:
        raise CliError("--alpha must be positive")
    config = InflateDeflateConfig(
        alpha=args.alpha,
        forward_rules=_rule_list(args.rules, STANDARD_FORWARD),
        backward_rules=_rule_list(args.backward, STANDARD_BACKWARD, backward=True),
        iterations=args.iterations,
        time_limit=args.time_limit,
        radius=args.radius if local else None,
    )
    before = _size(engine.instance)
    if local:
        result = local_inflate_deflate(engine, config, engine.derived_rng("local-inflate-deflate"))
    else:
        result = inflate_deflate(engine, config, engine.derived_rng("inflate-deflate"))
    after = _size(engine.instance)
    run.manifest["end"] = after
    run.manifest["iterations"] = len(result.log)
    run.manifest["kept"] = sum(e.kept for e in result.log)
    _emit_instance(args, run, engine, result.records)
    _write_log(args, run, result)
    _report_sizes(before, after)
    run.finish()
    return 0


def cmd_id(args, argv) -> int:
    return _run_inflate_deflate(args, argv, local=False)


def cmd_lid(args, argv) -> int:
    return _run_inflate_deflate(args, argv, local=True)


def cmd_confluence(args, argv) -> int:
    run = Run(args, argv)
    if args.pairs == "all":
        verdicts = test_all_pairs(_rule_list(args.rules, STANDARD_FORWARD), args.max_n, args.trials, jobs=args.jobs)
    else:
        names = [x.strip() for x in args.pairs.split(",")]
        if len(names) != 2:
            raise CliError("--pairs takes 'all' or exactly two rule names")
        verdicts = [test_pair(names[0], names[1], enumerate_graphs(args.max_n), args.trials)]
    matrix = emit_matrix(verdicts)
    print(matrix.to_text())
    for v in verdicts:
        if v.non_confluent:
            w = v.witnesses[0]
            print(f"{v.pair[0]} x {v.pair[1]}: witness {w.graph6} seeds {w.seeds[0]},{w.seeds[1]}")
    if args.out:
        _write(args.out, matrix_json(matrix, verdicts))
        run.output("matrix", args.out)
    run.manifest["non_confluent"] = sum(v.non_confluent for v in verdicts)
    run.finish()
    return 0


def cmd_solve(args, argv) -> int:
    run = Run(args, argv)
    graph, digest = _read_input(args)
    run.manifest["input"] = {"path": args.input, "sha256": digest}
    result = brute_force_tau(graph) if args.method == "brute" else branch_and_reduce_solve(graph)
    if not verify_cover(graph, result.cover):
        raise CliError("solver returned a non-cover")
    print(result.tau)
    print(" ".join(map(str, sorted(result.cover))))
    if args.out:
        _write(args.out, emit_solution(result.cover))
        run.output("solution", args.out)
    run.manifest["tau"] = result.tau
    run.finish()
    return 0


def cmd_lift(args, argv) -> int:
    run = Run(args, argv)
    graph, digest = _read_input(args)
    run.manifest["input"] = {"path": args.input, "sha256": digest}
    try:
        records = parse_json_trace(Path(args.trace).read_text(encoding="utf-8"))
        kernel_cover = parse_solution(Path(args.solution).read_text(encoding="utf-8"))
    except OSError as exc:
        raise CliError(f"cannot read {exc.filename}: {exc.strerror}") from None
    kernel = replay_trace(graph, records, 0)
    if args.ids == "position":
        live = kernel.graph.vertices()
        bad = [x for x in kernel_cover if not 0 <= x < len(live)]
        if bad:
            raise CliError(f"solution ids out of range for a kernel with {len(live)} vertices: {sorted(bad)[:5]}")
        kernel_cover = {live[x] for x in kernel_cover}
    cover = lift_solution(records, kernel.graph, kernel_cover)
    if not verify_cover(graph, cover):
        raise CliError("lifted set is not a vertex cover")
    print(len(cover))
    print(" ".join(map(str, sorted(cover))))
    if args.out:
        _write(args.out, emit_solution(cover))
        run.output("solution", args.out)
    run.manifest["kernel_cover"] = len(kernel_cover)
    run.manifest["lifted_cover"] = len(cover)
    run.manifest["k_final"] = kernel.k
    run.finish()
    return 0


def cmd_convert(args, argv) -> int:
    path = Path(args.input)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc.strerror}") from None
    graph = parse_graph(text, args.from_format or guess_format(path).value)
    to = args.to_format or (guess_format(args.out).value if args.out else GraphFormat.EDGE_LIST.value)
    out = emit_graph(graph, to)
    if args.out:
        _write(args.out, out)
    else:
        sys.stdout.write(out)
    return 0


# -- parser ------------------------------------------------------------------------------------


def _add_io(p: argparse.ArgumentParser, out: bool = True) -> None:
    p.add_argument("--in", dest="input", required=True, help="input graph file")
    p.add_argument("--format", choices=FORMATS[:4], help="input format (default: from suffix)")
    if out:
        p.add_argument("--out", help="output graph file (default: stdout)")
        p.add_argument("--out-format", choices=FORMATS, help="output format (default: from suffix)")
        p.add_argument("--trace", help="write the modification trace as JSON lines")
    p.add_argument("--manifest", help="manifest path (default: OUT.manifest.json, else stderr)")
    p.add_argument("--seed", type=int, default=0)


def _add_search(p: argparse.ArgumentParser) -> None:
    p.add_argument("--rules", help="comma-separated forward rules")
    p.add_argument("--backward", help="comma-separated backward rules")
    p.add_argument("--time-limit", type=float, default=60.0, help="seconds")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="vckernel", description="Vertex cover kernelization with forward and backward rules.")
    parser.add_argument("--version", action="version", version=f"vckernel {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("kernelize", help="exhaustive forward reduction")
    _add_io(p)
    p.add_argument("--rules", help="comma-separated forward rules (default: standard pipeline)")
    p.add_argument("--order", choices=["fixed", "random"], default="fixed")
    p.set_defaults(func=cmd_kernelize)

    for name, func in (("find", cmd_find), ("far", cmd_far)):
        p = sub.add_parser(name, help="Find" if name == "find" else "Find-and-Reduce")
        _add_io(p, out=name == "far")
        _add_search(p)
        p.add_argument("--depth", type=int, choices=[1, 2, 3], default=2)
        p.add_argument("--report", help="JSON report of accepted sequences")
        p.add_argument("--dot", help="DOT rendering of accepted sequences")
        if name == "far":
            p.add_argument("--pipeline", help="forward rules interleaved between searches")
            p.add_argument("--log", help="per-round size log (JSON)")
            p.add_argument("--log-timing", action="store_true", help="include wall-clock seconds in the log")
        p.set_defaults(func=func)

    for name, func, alpha in (("id", cmd_id, 0.1), ("lid", cmd_lid, 0.2)):
        p = sub.add_parser(name, help="Inflate-Deflate" if name == "id" else "local Inflate-Deflate")
        _add_io(p)
        _add_search(p)
        p.add_argument("--alpha", type=float, default=alpha)
        p.add_argument("--radius", type=int, default=2)
        p.add_argument("--iterations", type=int, default=None)
        p.add_argument("--log", help="per-iteration size log (JSON)")
        p.add_argument("--log-timing", action="store_true", help="include wall-clock seconds in the log")
        p.set_defaults(func=func)

    p = sub.add_parser("confluence", help="pairwise confluence test")
    p.add_argument("--max-n", type=int, default=7)
    p.add_argument("--trials", type=int, default=20)
    p.add_argument("--pairs", default="all", help="'all' or 'RuleA,RuleB'")
    p.add_argument("--rules", help="rules for --pairs all (default: all standard forward rules)")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out", help="matrix JSON")
    p.add_argument("--manifest")
    p.set_defaults(func=cmd_confluence)

    p = sub.add_parser("solve", help="exact minimum vertex cover")
    _add_io(p, out=False)
    p.add_argument("--method", choices=["brute", "bnr"], default="bnr")
    p.add_argument("--out", help="solution file")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("lift", help="lift a kernel cover along a trace")
    _add_io(p, out=False)
    p.add_argument("--trace", required=True)
    p.add_argument("--solution", required=True, help="cover of the kernel")
    p.add_argument(
        "--ids",
        choices=["position", "internal"],
        default="position",
        help="solution ids are positions in the written kernel file (default) or trace ids",
    )
    p.add_argument("--out", help="lifted solution file")
    p.set_defaults(func=cmd_lift)

    p = sub.add_parser("convert", help="convert between graph formats")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--from", dest="from_format", choices=FORMATS[:4])
    p.add_argument("--to", dest="to_format", choices=FORMATS)
    p.add_argument("--out")
    p.set_defaults(func=cmd_convert)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    args = build_parser().parse_args(argv)
    try:
        return args.func(args, argv)
    except (CliError, VCKernelError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
