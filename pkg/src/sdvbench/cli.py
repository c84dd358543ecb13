"""Command-line entry point: ``sdvbench <command> ...``."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Sequence

from .analysis import extract_dataflow, parse
from .analysis.syntax import ParseError
from .benchmark import BenchmarkError, load_benchmark, validate_benchmark
from .catalog import CatalogError, flatten, load_catalog, render_api_listing
from .gateway import GatewayError
from .metrics import CodeBleuWeights, HashEmbedder, score_pair
from .prompts import PromptConfig, PromptError, assemble, estimate_tokens, load_bundle
from .runner import (
    RunConfig,
    ablate,
    aggregate,
    compare,
    compare_to_null,
    load_results,
    render_report,
    run,
    save_results,
    select,
    significance_table,
)

METRIC_FAMILIES = ("codebleu", "codebert", "rouge_l", "chrf")


def _out(text: str, path: str | None) -> None:
    if path:
        Path(path).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _read(path: str) -> str:
    return Path(path).read_text(encoding="utf-8")


# -- catalog -----------------------------------------------------------------


def cmd_catalog(args) -> int:
    tree = load_catalog(args.file)
    if args.action == "validate":
        print(f"ok: {len(tree)} nodes, {len(tree.leaves())} leaves")
    elif args.action == "list":
        for e in flatten(tree):
            print("\t".join([e.path, e.kind.label, e.datatype, e.unit or "-"]))
    else:
        sys.stdout.write(render_api_listing(flatten(tree)))
    return 0


# -- prompt ------------------------------------------------------------------


def cmd_prompt(args) -> int:
    sections = args.sections.split(",") if args.sections else None
    config = PromptConfig.of(args.mode, sections)
    prompt = assemble(config, load_catalog(args.catalog), load_bundle(args.bundle))
    _out(prompt.rendered_text, args.out)
    print(
        f"{config.label()}: {len(prompt.sections)} sections, ~{estimate_tokens(prompt.rendered_text)} words, "
        f"sha256 {prompt.fingerprint[:16]}",
        file=sys.stderr,
    )
    return 0


# -- bench -------------------------------------------------------------------


def cmd_bench(args) -> int:
    bench = load_benchmark(args.dir)
    violations = validate_benchmark(bench, load_catalog(args.catalog))
    counts = bench.counts()
    print(f"{len(bench)} items over {len(bench.use_cases)} use cases")
    for level, n in counts["complexity"].items():
        print(f"  {level}: {n}")
    for v in violations:
        print(f"{v.item}: {v.kind}: {v.message}")
    return 1 if violations else 0


# -- analyze -----------------------------------------------------------------


def cmd_analyze(args) -> int:
    tree = parse(_read(args.file))
    if isinstance(tree, ParseError):
        print(f"parse error: {tree}", file=sys.stderr)
        return 1
    if args.action == "parse":
        print(tree.pretty())
    else:
        for line in extract_dataflow(tree).describe():
            print(line)
    return 0


# -- score -------------------------------------------------------------------


def cmd_score(args) -> int:
    families = args.metrics.split(",") if args.metrics else list(METRIC_FAMILIES)
    unknown = [f for f in families if f not in METRIC_FAMILIES]
    if unknown:
        raise SystemExit(f"unknown metric(s): {', '.join(unknown)}")
    report = score_pair(_read(args.cand), _read(args.ref), CodeBleuWeights(), HashEmbedder())
    full = report.to_dict()
    shown = {f: full[f] for f in families}
    shown["flags"] = full["flags"]
    print(json.dumps(shown, indent=2, sort_keys=True))
    return 0


# -- run / report / ablate / compare -----------------------------------------


def cmd_run(args) -> int:
    cfg = RunConfig.load(args.config)
    ctx, bench = cfg.context(offline=True if args.offline else None)
    results = run(cfg.matrix(bench), ctx)
    path = save_results(results, args.results)
    failed = sum(1 for r in results if r.error)
    print(f"{len(results)} results written to {path} ({failed} cell errors, "
          f"{ctx.gateway.provider_calls} provider calls)")
    return 0


def cmd_report(args) -> int:
    results = load_results(args.results)
    rows = aggregate(results)
    pvalues = None
    if args.pvalues != "none":
        pvalues = significance_table(results, rows, mode=args.pvalues, test=args.test)
    _out(render_report(rows, args.format, pvalues=pvalues if args.format == "md" else None), args.out)
    return 0


def cmd_ablate(args) -> int:
    cfg = RunConfig.load(args.config)
    ctx, bench = cfg.context(offline=True if args.offline else None)
    subsets = [s.split(",") for s in args.subset] if args.subset else cfg.ablation_subsets()
    rows = ablate(cfg.ablation_model(), subsets, bench, ctx, cfg.weights, baselines=not args.no_baselines)
    _out(render_report(rows, args.format, key_names=("prompt",)), args.out)
    return 0


def _side(results, spec: str):
    model, sep, technique = spec.partition("/")
    if not sep:
        raise SystemExit(f"expected model/technique, got {spec!r}")
    picked = select(results, model, technique)
    if not picked:
        raise SystemExit(f"no results for {spec!r}")
    return picked


def cmd_compare(args) -> int:
    results = load_results(args.results)
    a = _side(results, args.a)
    if args.b == "null":
        sig = compare_to_null(a, args.test, args.metric, label=f"{args.a} vs null")
    else:
        sig = compare(a, _side(results, args.b), args.test, args.metric, label=f"{args.a} vs {args.b}")
    print(json.dumps(
        {"comparison": sig.comparison, "test": sig.test, "metric": args.metric,
         "n": sig.n, "statistic": sig.statistic, "p_value": sig.p_value},
        indent=2,
    ))
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="sdvbench", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("catalog", help="inspect a signal catalog")
    c.add_argument("action", choices=["validate", "list", "render"])
    c.add_argument("file")
    c.set_defaults(func=cmd_catalog)

    pr = sub.add_parser("prompt", help="assemble a system prompt")
    pr_sub = pr.add_subparsers(dest="action", required=True)
    a = pr_sub.add_parser("assemble")
    a.add_argument("--mode", required=True, choices=["few-shot", "zero-shot", "original"])
    a.add_argument("--catalog", required=True)
    a.add_argument("--bundle", required=True)
    a.add_argument("--sections", help="comma-separated section ids to keep")
    a.add_argument("--out")
    a.set_defaults(func=cmd_prompt)

    b = sub.add_parser("bench", help="benchmark dataset tools")
    b_sub = b.add_subparsers(dest="action", required=True)
    v = b_sub.add_parser("validate")
    v.add_argument("--catalog", required=True)
    v.add_argument("dir")
    v.set_defaults(func=cmd_bench)

    an = sub.add_parser("analyze", help="debug the code analyzer")
    an.add_argument("action", choices=["parse", "dataflow"])
    an.add_argument("file")
    an.set_defaults(func=cmd_analyze)

    s = sub.add_parser("score", help="score one candidate against one reference")
    s.add_argument("--cand", required=True)
    s.add_argument("--ref", required=True)
    s.add_argument("--metrics", help=f"comma-separated subset of {','.join(METRIC_FAMILIES)}")
    s.set_defaults(func=cmd_score)

    r = sub.add_parser("run", help="run the model x technique x item matrix")
    r.add_argument("--config", required=True)
    r.add_argument("--results", default="results", help="output directory (default: ./results)")
    r.add_argument("--offline", action="store_true", help="forbid provider calls")
    r.set_defaults(func=cmd_run)

    rep = sub.add_parser("report", help="aggregate saved results into tables")
    rep.add_argument("--results", required=True)
    rep.add_argument("--format", choices=["csv", "md"], default="md")
    rep.add_argument("--pvalues", choices=["none", "baseline", "null"], default="none")
    rep.add_argument("--test", choices=["wilcoxon", "t"], default="wilcoxon")
    rep.add_argument("--out")
    rep.set_defaults(func=cmd_report)

    ab = sub.add_parser("ablate", help="prompt-section ablation for one model")
    ab.add_argument("--config", required=True)
    ab.add_argument("--subset", action="append", help="comma-separated section ids; repeatable")
    ab.add_argument("--no-baselines", action="store_true")
    ab.add_argument("--format", choices=["csv", "md"], default="md")
    ab.add_argument("--offline", action="store_true")
    ab.add_argument("--out")
    ab.set_defaults(func=cmd_ablate)

    cmp_ = sub.add_parser("compare", help="paired significance test between two result groups")
    cmp_.add_argument("--results", required=True)
    cmp_.add_argument("--a", required=True, help="model/technique")
    cmp_.add_argument("--b", required=True, help="model/technique, or 'null' to test against zero")
    cmp_.add_argument("--test", choices=["wilcoxon", "t"], default="wilcoxon")
    cmp_.add_argument("--metric", default="codebleu")
    cmp_.set_defaults(func=cmd_compare)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (CatalogError, PromptError, BenchmarkError, GatewayError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
