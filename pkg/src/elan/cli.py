"""Command line entry point.

Pipeline subcommands: parse, dump, likelihood, rank, profile, eval.
Exit codes: 0 success, 1 usage error, 2 analysis error.  Data goes to
stdout, diagnostics to stderr, and output is byte-identical across runs
for identical inputs and flags.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import __version__
from . import evaluation as ev
from . import microc as mc
from . import ranking
from .likelihood import LikelihoodEngine, model_by_name
from .profiler import RunInput, profile
from .sdg import Sdg, Vertex, VertexNotFound, build_sdg


class UsageError(Exception):
    pass


class AnalysisError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """argparse exits 2 on bad usage; the contract wants 1."""

    def error(self, message: str) -> None:  # type: ignore[override]
        raise UsageError(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="elan", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version",
                        version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="subcommand", metavar="SUBCOMMAND")

    def add(name: str, help_text: str, **kw) -> argparse.ArgumentParser:
        p = sub.add_parser(name, help=help_text, **kw)
        p.add_argument("source", help="MicroC source file (.mc)")
        return p

    p = add("parse", "parse a program and echo its canonical form")
    p.add_argument("--json", action="store_true", help="emit a JSON summary")

    p = add("dump", "emit the dependence graph")
    p.add_argument("--format", choices=("json", "dot"), default="json")

    p = add("likelihood", "execution likelihood of one source line")
    p.add_argument("--line", type=int, required=True)
    p.add_argument("--start", metavar="FUNC",
                   help="start at this function's entry instead of main")
    p.add_argument("--model", choices=("simple", "heuristic"), default="simple")
    p.add_argument("--json", action="store_true")

    p = add("rank", "rank inspection warnings by execution likelihood")
    p.add_argument("--warnings", required=True, metavar="FILE")
    p.add_argument("--warning-format", choices=("gcc", "json"), default="gcc")
    p.add_argument("--model", choices=("simple", "heuristic"), default="simple")
    p.add_argument("--start", metavar="FUNC")
    p.add_argument("--format", choices=("tsv", "json"), default="tsv")
    p.add_argument("--tiebreak", choices=("location", "severity"),
                   default="location")
    p.add_argument("--jobs", type=int, default=1,
                   help="annotate warnings with this many threads")

    p = add("profile", "run the interpreter over an input set")
    p.add_argument("--inputs", required=True, metavar="FILE",
                   help="JSON array of {name, values}")
    p.add_argument("--step-limit", type=int, default=1_000_000)
    p.add_argument("--lines", action="store_true",
                   help="also emit line-keyed fractions")

    p = add("eval", "compare predicted likelihood against measured fractions")
    p.add_argument("--inputs", required=True, metavar="FILE")
    p.add_argument("--model", choices=("simple", "heuristic", "both"),
                   default="simple")
    p.add_argument("--report", choices=("md", "json"), default="md")
    p.add_argument("--start", metavar="FUNC")
    p.add_argument("--step-limit", type=int, default=1_000_000)
    p.add_argument("--seed", type=int, default=42,
                   help="seed for the shuffled-baseline rows")
    p.add_argument("--shuffles", type=int, default=0,
                   help="append a shuffled-ranking baseline over this many trials")
    return parser


def _read_text(path: str) -> str:
    try:
        with open(path, "r", encoding="utf-8") as handle:
            return handle.read()
    except OSError as exc:
        raise AnalysisError(f"cannot read {path}: {exc.strerror}") from exc


def _load_program(path: str) -> mc.Program:
    return mc.parse_program(_read_text(path), path)


def _resolve_start(sdg: Sdg, name: str | None) -> Vertex | None:
    if name is None:
        if sdg.entry is None:
            raise AnalysisError(
                f"program has no {sdg.program.entry_name!r} function; "
                "use --start")
        return None
    try:
        return sdg.entry_of(name)
    except VertexNotFound:
        raise AnalysisError(f"unknown start function {name!r}") from None


def _load_inputs(path: str) -> list[RunInput]:
    try:
        data = json.loads(_read_text(path))
    except json.JSONDecodeError as exc:
        raise AnalysisError(f"{path}: invalid JSON: {exc}") from exc
    if not isinstance(data, list):
        raise AnalysisError(f"{path}: expected a JSON array of runs")
    runs = []
    for i, obj in enumerate(data):
        try:
            runs.append(RunInput.of(str(obj.get("name", f"run{i}")),
                                    obj["values"]))
        except (TypeError, KeyError, ValueError):
            raise AnalysisError(
                f"{path}: run {i} must be an object with integer 'values'"
            ) from None
    if not runs:
        raise AnalysisError(f"{path}: input set is empty")
    return runs


# -- subcommand bodies ---------------------------------------------------------


def _cmd_parse(args) -> int:
    program = _load_program(args.source)
    if args.json:
        control_points = sum(
            1 for v in build_sdg(program).vertices if v.kind == "control")
        print(json.dumps({
            "file": program.file,
            "functions": [f.name for f in program.functions],
            "entry": program.entry_name,
            "control_points": control_points,
        }, indent=2))
    else:
        sys.stdout.write(mc.format_program(program))
    return 0


def _cmd_dump(args) -> int:
    sdg = build_sdg(_load_program(args.source))
    for note in sdg.diagnostics:
        print(note, file=sys.stderr)
    if args.format == "dot":
        sys.stdout.write(sdg.to_dot())
    else:
        print(json.dumps(sdg.to_json(), indent=2))
    return 0


def _cmd_likelihood(args) -> int:
    program = _load_program(args.source)
    sdg = build_sdg(program)
    start = _resolve_start(sdg, args.start)
    try:
        vertex = sdg.vertex_at(args.source, args.line)
    except VertexNotFound as exc:
        raise AnalysisError(str(exc)) from None
    result = LikelihoodEngine(sdg).query(vertex, start,
                                         model_by_name(args.model))
    payload = {
        "file": program.file,
        "line": args.line,
        "vertex_id": vertex.id,
        "likelihood": result.likelihood,
        "model": result.model,
        "start": result.start.function,
        "unreachable": result.unreachable,
    }
    if args.json:
        print(json.dumps(payload, indent=2))
    else:
        print(f"{program.file}:{args.line}: vertex {vertex.id} "
              f"[{vertex.text}] likelihood {result.likelihood:.6f} "
              f"({result.model} model, start {result.start.function})")
    return 0


def _cmd_rank(args) -> int:
    program = _load_program(args.source)
    sdg = build_sdg(program)
    start = _resolve_start(sdg, args.start)
    report = ranking.normalize_warnings(_read_text(args.warnings),
                                        args.warning_format)
    for note in report.diagnostics:
        print(f"warning: skipped malformed input ({note})", file=sys.stderr)
    if report.duplicates:
        print(f"warning: collapsed {report.duplicates} duplicate warning(s)",
              file=sys.stderr)
    if args.jobs < 1:
        raise UsageError("--jobs must be >= 1")
    items = ranking.rank(sdg, report.records, model_by_name(args.model),
                         start=start, tiebreak=args.tiebreak, jobs=args.jobs)
    if args.format == "json":
        sys.stdout.write(ranking.render_json(items))
    else:
        sys.stdout.write(ranking.render_tsv(items))
    return 0


def _cmd_profile(args) -> int:
    program = _load_program(args.source)
    sdg = build_sdg(program)
    data = profile(program, _load_inputs(args.inputs),
                   step_limit=args.step_limit, sdg=sdg)
    for note in data.errors:
        print(f"warning: {note}", file=sys.stderr)
    payload = {
        "run_count": data.run_count,
        "completed_runs": data.completed_runs,
        "error_runs": data.error_runs,
        "step_limit_runs": data.step_limit_runs,
        "fractions": {str(vid): frac for vid, frac in
                      sorted(data.fractions.items())},
    }
    if args.lines:
        payload["line_fractions"] = data.line_fractions
    print(json.dumps(payload, indent=2))
    return 0


def _eval_metrics(sdg: Sdg, start, model_name: str, fractions):
    engine = LikelihoodEngine(sdg)
    model = model_by_name(model_name)
    predicted = {v.id: engine.query(v, start, model).likelihood
                 for v in sdg.vertices}
    pair = ev.RankingPair(predicted, fractions)
    return (ev.correlation_report(pair),
            ev.threshold_accuracy(predicted, fractions),
            ev.block_likelihood_table(pair))


def _cmd_eval(args) -> int:
    program = _load_program(args.source)
    sdg = build_sdg(program)
    start = _resolve_start(sdg, args.start)
    data = profile(program, _load_inputs(args.inputs),
                   step_limit=args.step_limit, sdg=sdg)
    for note in data.errors:
        print(f"warning: {note}", file=sys.stderr)
    models = ("simple", "heuristic") if args.model == "both" else (args.model,)
    results = {name: _eval_metrics(sdg, start, name, data.fractions)
               for name in models}
    shuffle_rows = None
    if args.shuffles > 0:
        shuffle_rows = ev.shuffled_mean_scores(len(sdg.vertices),
                                               args.shuffles, args.seed)
    if args.report == "json":
        payload = {
            "file": program.file,
            "run_count": data.run_count,
            "models": {name: ev.report_to_json(*metrics)
                       for name, metrics in results.items()},
        }
        if shuffle_rows is not None:
            payload["shuffle_baseline"] = [
                {"fraction": s.fraction, "m": s.m, "mean": s.mean,
                 "std_error": s.std_error, "expected": s.expected}
                for s in shuffle_rows]
        print(json.dumps(payload, indent=2))
        return 0
    if args.model == "both":
        sys.stdout.write(_paired_markdown(results["simple"],
                                          results["heuristic"]))
    else:
        sys.stdout.write(ev.render_report_markdown(*results[args.model]))
    if shuffle_rows is not None:
        lines = ["", "| block | m | shuffled mean | expected m/N |",
                 "|------:|--:|--------------:|-------------:|"]
        for s in shuffle_rows:
            lines.append(f"| {s.fraction:.0%} | {s.m} | {s.mean:.4f} "
                         f"| {s.expected:.4f} |")
        sys.stdout.write("\n".join(lines) + "\n")
    return 0


def _paired_markdown(simple_metrics, heuristic_metrics) -> str:
    s_report, s_table, s_means = simple_metrics
    h_report, h_table, h_means = heuristic_metrics

    def cell(a: float, b: float, digits: int = 3) -> str:
        return f"{a:.{digits}f} - {b:.{digits}f}"

    lines = [
        f"N = {s_report.n} program points; measured 1.0-plateau "
        f"{s_report.plateau_measured}; cells are simple - heuristic",
        "",
        "| block | m | score | random |",
        "|------:|--:|------:|-------:|",
    ]
    for sb, hb in zip(s_report.blocks, h_report.blocks):
        lines.append(f"| {sb.fraction:.0%} | {sb.m} | {cell(sb.score, hb.score)} "
                     f"| {sb.random_baseline:.3f} |")
    lines += ["", "| block | m | mean measured |", "|------:|--:|--------------:|"]
    for sm, hm in zip(s_means, h_means):
        lines.append(f"| {sm.fraction:.0%} | {sm.m} "
                     f"| {cell(sm.mean_measured, hm.mean_measured)} |")

    def pct_pair(a, b) -> str:
        return f"{ev._pct(a.percent)} - {ev._pct(b.percent)}"

    lines += ["", "| predicted | points | % measured 1.0 |",
              "|----------:|-------:|---------------:|"]
    for sa, ha in zip(s_table.always, h_table.always):
        lines.append(f"| {sa.label} | {sa.count} - {ha.count} | {pct_pair(sa, ha)} |")
    lines += ["", "| predicted | points | % measured 0.0 |",
              "|----------:|-------:|---------------:|"]
    for sn, hn in zip(s_table.never, h_table.never):
        lines.append(f"| {sn.label} | {sn.count} - {hn.count} | {pct_pair(sn, hn)} |")
    return "\n".join(lines) + "\n"


_COMMANDS = {
    "parse": _cmd_parse,
    "dump": _cmd_dump,
    "likelihood": _cmd_likelihood,
    "rank": _cmd_rank,
    "profile": _cmd_profile,
    "eval": _cmd_eval,
}


def run(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        if args.subcommand is None:
            raise UsageError("a subcommand is required (see --help)")
        return _COMMANDS[args.subcommand](args)
    except UsageError as exc:
        print(f"elan: usage error: {exc}", file=sys.stderr)
        return 1
    except mc.ParseError as exc:
        print(f"elan: {exc}", file=sys.stderr)
        return 2
    except (AnalysisError, VertexNotFound, ValueError) as exc:
        print(f"elan: error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    raise SystemExit(run())


if __name__ == "__main__":
    main()
