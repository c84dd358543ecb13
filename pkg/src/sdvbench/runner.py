"""Run matrix orchestration, aggregation, significance tests and report tables."""

from __future__ import annotations

import csv
import io
import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

from .analysis.syntax import parses
from .benchmark import Benchmark, BenchmarkItem, filter_benchmark, load_benchmark
from .catalog import SignalTree, load_catalog
from .gateway import Gateway, ModelSpec, regenerate_on_invalid
from .metrics import CodeBleuWeights, EmbeddingProvider, HashEmbedder, HttpEmbedder, MetricReport, score_pair
from .metrics.report import METRIC_COLUMNS
from .prompts import Mode, PromptBundle, PromptConfig, SystemPrompt, assemble, load_bundle
from .stats import paired_t, wilcoxon_signed_rank

__all__ = [
    "AggregateRow",
    "EvalContext",
    "RunConfig",
    "RunMatrix",
    "RunResult",
    "SignificanceResult",
    "Technique",
    "ablate",
    "aggregate",
    "compare",
    "compare_to_null",
    "load_results",
    "render_report",
    "run",
    "save_results",
]

RESULTS_FILE = "results.jsonl"


@dataclass(frozen=True)
class Technique:
    """A prompt configuration with the label it is reported under."""

    label: str
    config: PromptConfig

    @classmethod
    def of(cls, mode: Mode | str, sections: Sequence[str] | None = None, label: str | None = None) -> "Technique":
        cfg = PromptConfig.of(mode, sections)
        return cls(label or cfg.label(), cfg)


STANDARD_TECHNIQUES = (
    Technique.of(Mode.FEW_SHOT),
    Technique.of(Mode.ZERO_SHOT),
    Technique.of(Mode.ORIGINAL),
)


@dataclass(frozen=True)
class RunMatrix:
    models: tuple[ModelSpec, ...]
    techniques: tuple[Technique, ...]
    items: Benchmark
    weights: CodeBleuWeights = CodeBleuWeights()

    def __post_init__(self) -> None:
        if not self.models or not self.techniques or not len(self.items):
            raise ValueError("run matrix axes must be non-empty")

    def __len__(self) -> int:
        return len(self.models) * len(self.techniques) * len(self.items)


@dataclass
class EvalContext:
    catalog: SignalTree
    bundle: PromptBundle
    gateway: Gateway
    embedder: EmbeddingProvider = field(default_factory=HashEmbedder)
    max_attempts: int = 3
    workers: int = 4


@dataclass(frozen=True)
class RunResult:
    model: str
    technique: str
    item: str
    report: MetricReport
    fingerprint: str | None = None
    attempts: int = 0
    valid: bool = False
    error: str | None = None

    def to_dict(self) -> dict:
        return {
            "model": self.model,
            "technique": self.technique,
            "item": self.item,
            "fingerprint": self.fingerprint,
            "attempts": self.attempts,
            "valid": self.valid,
            "error": self.error,
            "report": self.report.to_dict(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "RunResult":
        return cls(
            model=d["model"],
            technique=d["technique"],
            item=d["item"],
            report=MetricReport.from_dict(d["report"]),
            fingerprint=d.get("fingerprint"),
            attempts=d.get("attempts", 0),
            valid=d.get("valid", False),
            error=d.get("error"),
        )


def _run_cell(
    ctx: EvalContext, model: ModelSpec, tech: Technique, system: SystemPrompt | Exception,
    item: BenchmarkItem, weights: CodeBleuWeights,
) -> RunResult:
    base = dict(model=model.label, technique=tech.label, item=item.key)
    if isinstance(system, Exception):
        return RunResult(report=MetricReport.zero(error=True), error=f"prompt: {system}", **base)
    try:
        record = regenerate_on_invalid(
            ctx.gateway, model, system, item.user_prompt, parses, max_attempts=ctx.max_attempts
        )
    except Exception as exc:  # noqa: BLE001 - recorded per cell
        return RunResult(report=MetricReport.zero(error=True), error=f"{type(exc).__name__}: {exc}", **base)
    try:
        report = score_pair(record.extracted_code, item.reference_solution, weights, ctx.embedder)
    except Exception as exc:  # noqa: BLE001
        return RunResult(
            report=MetricReport.zero(error=True),
            fingerprint=record.fingerprint,
            attempts=record.attempt,
            valid=bool(record.valid),
            error=f"{type(exc).__name__}: {exc}",
            **base,
        )
    return RunResult(
        report=report,
        fingerprint=record.fingerprint,
        attempts=record.attempt,
        valid=bool(record.valid),
        **base,
    )


def run(matrix: RunMatrix, ctx: EvalContext) -> list[RunResult]:
    """One result per (model, technique, item) cell, in axis order.

    Failures inside a cell are recorded on its result and never abort the run.
    """
    systems: dict[str, SystemPrompt | Exception] = {}
    for tech in matrix.techniques:
        try:
            systems[tech.label] = assemble(tech.config, ctx.catalog, ctx.bundle)
        except Exception as exc:  # noqa: BLE001
            systems[tech.label] = exc
    cells = [
        (model, tech, item)
        for model in matrix.models
        for tech in matrix.techniques
        for item in matrix.items
    ]

    def work(cell):
        model, tech, item = cell
        return _run_cell(ctx, model, tech, systems[tech.label], item, matrix.weights)

    if ctx.workers <= 1:
        return [work(c) for c in cells]
    with ThreadPoolExecutor(max_workers=ctx.workers) as pool:
        # map() preserves input order regardless of completion order
        return list(pool.map(work, cells))


def save_results(results: Sequence[RunResult], directory: str | os.PathLike) -> Path:
    root = Path(directory)
    root.mkdir(parents=True, exist_ok=True)
    path = root / RESULTS_FILE
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for r in results:
            fh.write(json.dumps(r.to_dict(), sort_keys=True, ensure_ascii=False) + "\n")
    return path


def load_results(directory: str | os.PathLike) -> list[RunResult]:
    path = Path(directory)
    if path.is_dir():
        path = path / RESULTS_FILE
    with open(path, encoding="utf-8") as fh:
        return [RunResult.from_dict(json.loads(line)) for line in fh if line.strip()]


# -- aggregation -------------------------------------------------------------


@dataclass(frozen=True)
class AggregateRow:
    key: tuple[str, ...]
    n: int
    means: dict
    parse_failures: int = 0

    def __getitem__(self, column: str) -> float:
        return self.means[column]


def aggregate(
    results: Iterable[RunResult],
    group_by: Sequence[str] = ("model", "technique"),
) -> list[AggregateRow]:
    """Arithmetic mean of every metric per group, groups in first-seen order."""
    groups: dict[tuple[str, ...], list[RunResult]] = {}
    for r in results:
        groups.setdefault(tuple(getattr(r, g) for g in group_by), []).append(r)
    if not groups:
        raise ValueError("nothing to aggregate")
    rows = []
    for key, members in groups.items():
        flats = [m.report.flat() for m in members]
        cols = flats[0].keys()
        means = {c: sum(f[c] for f in flats) / len(flats) for c in cols}
        failures = sum(1 for m in members if m.report.candidate_parse_failed)
        rows.append(AggregateRow(key, len(members), means, failures))
    return rows


# -- significance ------------------------------------------------------------


@dataclass(frozen=True)
class SignificanceResult:
    comparison: str
    test: str
    statistic: float
    p_value: float
    n: int


_TESTS = {"wilcoxon": wilcoxon_signed_rank, "t": paired_t, "paired-t": paired_t}


def _scores(results: Iterable[RunResult], metric: str) -> dict[str, float]:
    column = METRIC_COLUMNS.get(metric, metric)
    out = {}
    for r in results:
        if r.item in out:
            raise ValueError(f"duplicate item {r.item!r} in one side of a comparison")
        out[r.item] = r.report.flat()[column]
    return out


def compare(
    results_a: Iterable[RunResult],
    results_b: Iterable[RunResult],
    test: str = "wilcoxon",
    metric: str = "codebleu",
    label: str = "a vs b",
) -> SignificanceResult:
    """Paired two-sided test on per-item score differences (a - b)."""
    try:
        fn = _TESTS[test.lower()]
    except KeyError:
        raise ValueError(f"unknown test {test!r}") from None
    a = _scores(results_a, metric)
    b = _scores(results_b, metric)
    if a.keys() != b.keys():
        missing = sorted(a.keys() ^ b.keys())
        raise ValueError(f"unpaired inputs: items {missing[:5]} are not on both sides")
    diffs = [a[k] - b[k] for k in sorted(a)]
    res = fn(diffs)
    return SignificanceResult(label, test.lower(), res.statistic, res.p_value, res.n)


def compare_to_null(
    results: Iterable[RunResult],
    test: str = "wilcoxon",
    metric: str = "codebleu",
    null_value: float = 0.0,
    label: str = "vs null",
) -> SignificanceResult:
    """One-sample version: per-item scores against a fixed ``null_value``."""
    fn = _TESTS[test.lower()]
    scores = _scores(results, metric)
    res = fn([scores[k] - null_value for k in sorted(scores)])
    return SignificanceResult(label, test.lower(), res.statistic, res.p_value, res.n)


def select(results: Iterable[RunResult], model: str | None = None, technique: str | None = None) -> list[RunResult]:
    return [
        r for r in results
        if (model is None or r.model == model) and (technique is None or r.technique == technique)
    ]


# -- ablation ----------------------------------------------------------------

FULL_LABEL = "Full prompt"
NONE_LABEL = "Without prompt"


def ablate(
    model: ModelSpec,
    section_subsets: Sequence[Sequence[str]],
    items: Benchmark,
    ctx: EvalContext,
    weights: CodeBleuWeights = CodeBleuWeights(),
    baselines: bool = True,
) -> list[AggregateRow]:
    """One aggregated row per section subset, after the full and no-prompt baselines."""
    known = set(ctx.bundle.section_ids)
    for subset in section_subsets:
        unknown = [s for s in subset if s not in known]
        if unknown or not subset:
            raise ValueError(f"unknown section id(s) in subset {list(subset)}: {unknown}")
    techniques = []
    if baselines:
        techniques += [Technique.of(Mode.FEW_SHOT, label=FULL_LABEL), Technique.of(Mode.ORIGINAL, label=NONE_LABEL)]
    for subset in section_subsets:
        techniques.append(Technique.of(Mode.FEW_SHOT, subset, label="+".join(subset)))
    if not techniques:
        raise ValueError("nothing to ablate")
    results = run(RunMatrix((model,), tuple(techniques), items, weights), ctx)
    return aggregate(results, group_by=("technique",))


# -- rendering ---------------------------------------------------------------

HEADLINE = [
    ("CodeBLEU", "codebleu.composite"),
    ("CodeBERTScore", "codebert.f1"),
    ("ROUGE-L", "rouge_l.f"),
    ("ChrF", "chrf.score"),
]
SUBMETRICS = [("Syntax", "codebleu.syntax"), ("Dataflow", "codebleu.dataflow")]
_KEY_TITLES = {"model": "Model", "technique": "Technique", "item": "Item"}


def _fmt(x: float) -> str:
    return f"{x:.3f}"


def _md_table(header: list[str], body: list[list[str]]) -> str:
    lines = ["| " + " | ".join(header) + " |", "|" + "|".join("---" for _ in header) + "|"]
    lines += ["| " + " | ".join(row) + " |" for row in body]
    return "\n".join(lines)


def render_report(
    rows: Sequence[AggregateRow],
    fmt: str = "md",
    key_names: Sequence[str] = ("model", "technique"),
    pvalues: dict | None = None,
    title: str | None = None,
) -> str:
    """Serialize aggregated rows.

    CSV carries every column. Markdown renders one table for the headline
    metrics and one for the CodeBLEU syntax/dataflow submetrics. ``pvalues``
    optionally maps ``(row key, headline column)`` to a p-value shown next
    to the score.
    """
    fmt = fmt.lower()
    if fmt == "csv":
        buf = io.StringIO()
        columns = sorted({c for r in rows for c in r.means})
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow([*key_names, "n", "parse_failures", *columns])
        for r in rows:
            writer.writerow([*r.key, r.n, r.parse_failures, *(repr(r.means[c]) for c in columns)])
        return buf.getvalue()
    if fmt not in ("md", "markdown"):
        raise ValueError(f"unknown format {fmt!r}")

    keys = [_KEY_TITLES.get(k, k.capitalize()) for k in key_names]
    head1 = list(keys)
    for name, col in HEADLINE:
        head1.append(name)
        if pvalues is not None:
            head1.append("p-value")
    body1 = []
    for r in rows:
        line = list(r.key)
        for _, col in HEADLINE:
            line.append(_fmt(r.means[col]))
            if pvalues is not None:
                p = pvalues.get((r.key, col))
                line.append("-" if p is None else f"{p:.3g}")
        body1.append(line)
    body2 = [[*r.key, *(_fmt(r.means[c]) for _, c in SUBMETRICS)] for r in rows]
    parts = []
    if title:
        parts.append(f"# {title}\n")
    parts.append("## Metric evaluation\n")
    parts.append(_md_table(head1, body1))
    parts.append("\n## CodeBLEU submetrics\n")
    parts.append(_md_table([*keys, *(n for n, _ in SUBMETRICS)], body2))
    return "\n".join(parts) + "\n"


def significance_table(
    results: Sequence[RunResult],
    rows: Sequence[AggregateRow],
    mode: str = "baseline",
    test: str = "wilcoxon",
    baseline: str = Mode.ORIGINAL.value,
) -> dict:
    """p-values for :func:`render_report`, keyed by ``(row key, column)``.

    ``mode="baseline"`` compares each (model, technique) row with the same
    model's ``baseline`` technique; ``mode="null"`` tests each row's scores
    against zero.
    """
    out = {}
    for r in rows:
        model, technique = r.key
        cell = select(results, model, technique)
        for _, col in HEADLINE:
            if mode == "null":
                sig = compare_to_null(cell, test, col)
            else:
                if technique == baseline:
                    continue
                base = select(results, model, baseline)
                if not base:
                    continue
                sig = compare(cell, base, test, col)
            out[(r.key, col)] = sig.p_value
    return out


# -- configuration -----------------------------------------------------------


@dataclass
class RunConfig:
    catalog: Path
    bundle: Path
    dataset: Path
    cache_dir: Path
    models: list[ModelSpec]
    techniques: list[Technique]
    weights: CodeBleuWeights = CodeBleuWeights()
    workers: int = 4
    offline: bool = False
    max_attempts: int = 3
    embedder: dict = field(default_factory=lambda: {"kind": "hash", "dim": 256})
    item_filter: dict = field(default_factory=dict)
    ablation: dict = field(default_factory=dict)

    @classmethod
    def load(cls, path: str | os.PathLike) -> "RunConfig":
        path = Path(path)
        raw = json.loads(path.read_text(encoding="utf-8"))
        base = path.parent

        def rel(p: str) -> Path:
            q = Path(p)
            return q if q.is_absolute() else base / q

        models = [
            ModelSpec(m["provider"], m["model"], m.get("temperature", 0.0), m.get("max_tokens", 4096))
            for m in raw["models"]
        ]
        techniques = []
        for t in raw.get("techniques", [m.value for m in Mode]):
            if isinstance(t, str):
                techniques.append(Technique.of(t))
            else:
                techniques.append(Technique.of(t["mode"], t.get("sections"), t.get("label")))
        w = raw.get("weights")
        weights = CodeBleuWeights(**w) if w else CodeBleuWeights()
        return cls(
            catalog=rel(raw["catalog"]),
            bundle=rel(raw["bundle"]),
            dataset=rel(raw["dataset"]),
            cache_dir=rel(raw.get("cache_dir", "cache")),
            models=models,
            techniques=techniques,
            weights=weights,
            workers=int(raw.get("workers", 4)),
            offline=bool(raw.get("offline", False)),
            max_attempts=int(raw.get("max_attempts", 3)),
            embedder=raw.get("embedder", {"kind": "hash", "dim": 256}),
            item_filter=raw.get("filter", {}),
            ablation=raw.get("ablation", {}),
        )

    def make_embedder(self) -> EmbeddingProvider:
        kind = self.embedder.get("kind", "hash")
        if kind == "hash":
            return HashEmbedder(int(self.embedder.get("dim", 256)))
        if kind == "http":
            return HttpEmbedder(self.embedder["url"])
        raise ValueError(f"unknown embedder kind {kind!r}")

    def context(self, offline: bool | None = None, gateway: Gateway | None = None) -> tuple[EvalContext, Benchmark]:
        catalog = load_catalog(self.catalog)
        bundle = load_bundle(self.bundle)
        bench = load_benchmark(self.dataset)
        if self.item_filter:
            bench = filter_benchmark(
                bench, self.item_filter.get("complexity"), self.item_filter.get("use_cases")
            )
        gw = gateway or Gateway(self.cache_dir, offline=self.offline if offline is None else offline)
        ctx = EvalContext(catalog, bundle, gw, self.make_embedder(), self.max_attempts, self.workers)
        return ctx, bench

    def matrix(self, bench: Benchmark) -> RunMatrix:
        return RunMatrix(tuple(self.models), tuple(self.techniques), bench, self.weights)

    def ablation_model(self) -> ModelSpec:
        name = self.ablation.get("model")
        for m in self.models:
            if name is None or m.model_name == name:
                return m
        raise ValueError(f"ablation model {name!r} is not among the configured models")

    def ablation_subsets(self) -> list[list[str]]:
        return [list(s) for s in self.ablation.get("subsets", [])]
