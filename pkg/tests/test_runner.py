import csv
import io

import pytest

from conftest import RUN_CONFIG
from sdvbench.benchmark import filter_benchmark
from sdvbench.gateway import Gateway, ModelSpec, ProviderError
from sdvbench.metrics import MetricReport
from sdvbench.providers import MockProvider
from sdvbench.runner import (
    FULL_LABEL,
    NONE_LABEL,
    STANDARD_TECHNIQUES,
    EvalContext,
    RunConfig,
    RunMatrix,
    RunResult,
    Technique,
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

MOCK_A = ModelSpec("mock", "mock-a")
MOCK_B = ModelSpec("mock", "mock-b")


class Broken:
    def complete(self, model, system, user, attempt=1):
        return "```python\nif x\n```"


class Failing:
    def complete(self, model, system, user, attempt=1):
        raise ProviderError("down", retryable=False)


@pytest.fixture
def small(bench):
    return filter_benchmark(bench, use_cases=["speed_guard", "rain_wipers"])


def context(tmp_path, catalog, bundle, **providers):
    gw = Gateway(tmp_path / "cache", providers={"mock": MockProvider(), **providers}, sleep=lambda s: None)
    return EvalContext(catalog, bundle, gw, workers=3)


def test_every_cell_gets_exactly_one_result(tmp_path, catalog, bundle, small):
    matrix = RunMatrix((MOCK_A, MOCK_B), STANDARD_TECHNIQUES, small)
    results = run(matrix, context(tmp_path, catalog, bundle))
    assert len(results) == len(matrix) == 2 * 3 * 6
    cells = [(r.model, r.technique, r.item) for r in results]
    expected = [(m.label, t.label, i.key) for m in matrix.models for t in matrix.techniques for i in small]
    assert cells == expected


def test_cell_failures_do_not_abort(tmp_path, catalog, bundle, small):
    ctx = context(tmp_path, catalog, bundle, broken=Broken(), failing=Failing())
    models = (MOCK_A, ModelSpec("broken", "br"), ModelSpec("failing", "fl"))
    results = run(RunMatrix(models, STANDARD_TECHNIQUES[:1], small), ctx)
    assert len(results) == 3 * len(small)
    by_model = {m.label: select(results, m.label) for m in models}
    assert all(r.error is None for r in by_model["mock-a"])
    for r in by_model["br"]:
        assert r.error is None and not r.valid and r.attempts == 3
        assert r.report.candidate_parse_failed
    for r in by_model["fl"]:
        assert "down" in r.error and r.report.codebleu.composite == 0.0


def test_prompt_assembly_failure_is_per_cell(tmp_path, catalog, bundle, small):
    bad = Technique.of("zero-shot", ["examples"], label="bad")
    results = run(RunMatrix((MOCK_A,), (STANDARD_TECHNIQUES[0], bad), small), context(tmp_path, catalog, bundle))
    assert all(r.error.startswith("prompt:") for r in select(results, technique="bad"))
    assert all(r.error is None for r in select(results, technique="few-shot"))


def test_parallel_and_serial_runs_agree(tmp_path, catalog, bundle, small):
    matrix = RunMatrix((MOCK_A,), STANDARD_TECHNIQUES, small)
    par = run(matrix, context(tmp_path, catalog, bundle))
    ctx = context(tmp_path, catalog, bundle)
    ctx.workers = 1
    assert run(matrix, ctx) == par


def test_results_round_trip(tmp_path, catalog, bundle, small):
    results = run(RunMatrix((MOCK_A,), STANDARD_TECHNIQUES, small), context(tmp_path, catalog, bundle))
    path = save_results(results, tmp_path / "out")
    assert load_results(tmp_path / "out") == results
    assert load_results(path) == results


def _fake(model, technique, item, score):
    rep = MetricReport.zero()
    rep = MetricReport.from_dict({**rep.to_dict(), "codebleu": {**rep.to_dict()["codebleu"], "composite": score}})
    return RunResult(model, technique, item, rep)


def test_aggregate_means_and_bounds():
    rs = [_fake("m", "t", f"i{k}", s) for k, s in enumerate([0.2, 0.4, 0.9])]
    rs.append(_fake("m", "u", "i0", 0.5))
    rows = aggregate(rs)
    assert [r.key for r in rows] == [("m", "t"), ("m", "u")]
    assert rows[0]["codebleu.composite"] == pytest.approx(0.5) and rows[0].n == 3
    scores = [r.report.codebleu.composite for r in rs[:3]]
    assert min(scores) <= rows[0]["codebleu.composite"] <= max(scores)
    with pytest.raises(ValueError):
        aggregate([])


def test_compare_requires_pairing():
    a = [_fake("m", "t", "i1", 0.5), _fake("m", "t", "i2", 0.6)]
    b = [_fake("m", "u", "i1", 0.1)]
    with pytest.raises(ValueError, match="unpaired"):
        compare(a, b)
    with pytest.raises(ValueError, match="unknown test"):
        compare(a, a, test="anova")


def test_compare_identical_sides_gives_p_one():
    a = [_fake("m", "t", f"i{k}", 0.1 * k) for k in range(5)]
    assert compare(a, a).p_value == 1.0
    assert compare(a, a, test="t").p_value == 1.0


def test_compare_to_null():
    a = [_fake("m", "t", f"i{k}", 0.5 + 0.01 * k) for k in range(8)]
    r = compare_to_null(a)
    assert r.n == 8 and r.p_value == pytest.approx(2 / 2**8)


def test_ablation_rows(tmp_path, catalog, bundle, small):
    ctx = context(tmp_path, catalog, bundle)
    rows = ablate(MOCK_A, [], small, ctx)
    assert [r.key for r in rows] == [(FULL_LABEL,), (NONE_LABEL,)]
    rows = ablate(MOCK_A, [list(bundle.section_ids), ["api"]], small, ctx)
    assert [r.key[0] for r in rows] == [FULL_LABEL, NONE_LABEL, "+".join(bundle.section_ids), "api"]
    # the full subset is the few-shot prompt, so its row must equal the baseline
    assert rows[2].means == rows[0].means
    with pytest.raises(ValueError):
        ablate(MOCK_A, [["nope"]], small, ctx)
    with pytest.raises(ValueError):
        ablate(MOCK_A, [], small, ctx, baselines=False)


def test_csv_round_trip_and_markdown_layout(tmp_path, catalog, bundle, small):
    results = run(RunMatrix((MOCK_A, MOCK_B), STANDARD_TECHNIQUES, small), context(tmp_path, catalog, bundle))
    rows = aggregate(results)
    text = render_report(rows, "csv")
    parsed = list(csv.DictReader(io.StringIO(text)))
    assert len(parsed) == len(rows)
    for row, rec in zip(rows, parsed):
        assert (rec["model"], rec["technique"]) == row.key and int(rec["n"]) == row.n
        for col, v in row.means.items():
            assert float(rec[col]) == v

    md = render_report(rows, "md")
    header = md.splitlines()[2]
    assert [c.strip() for c in header.strip("|").split("|")] == [
        "Model", "Technique", "CodeBLEU", "CodeBERTScore", "ROUGE-L", "ChrF"
    ]
    assert "## CodeBLEU submetrics" in md
    assert render_report(rows, "md") == md
    with pytest.raises(ValueError):
        render_report(rows, "html")


def test_pvalue_columns(tmp_path, catalog, bundle, small):
    results = run(RunMatrix((MOCK_A,), STANDARD_TECHNIQUES, small), context(tmp_path, catalog, bundle))
    rows = aggregate(results)
    pv = significance_table(results, rows)
    assert ((("mock-a", "original"), "codebleu.composite")) not in pv
    assert 0 <= pv[(("mock-a", "few-shot"), "codebleu.composite")] <= 1
    md = render_report(rows, "md", pvalues=pv)
    assert md.splitlines()[2].count("p-value") == 4
    null = significance_table(results, rows, mode="null")
    assert len(null) == len(rows) * 4


def test_run_config_loads_shipped_file():
    cfg = RunConfig.load(RUN_CONFIG)
    assert cfg.catalog.is_file() and cfg.dataset.is_dir()
    assert [m.model_name for m in cfg.models] == ["mock-a", "mock-b"]
    assert [t.label for t in cfg.techniques] == ["few-shot", "zero-shot", "original"]
    assert cfg.ablation_model().model_name == "mock-a"
    assert cfg.ablation_subsets() == [["intro"], ["requirements"], ["api"], ["examples"]]


def test_shipped_config_replays_offline_without_provider_calls():
    cfg = RunConfig.load(RUN_CONFIG)
    ctx, bench = cfg.context(offline=True)
    results = run(cfg.matrix(bench), ctx)
    assert len(results) == 72 and all(r.error is None for r in results)
    assert ctx.gateway.provider_calls == 0
    means = {r.key: r["codebleu.composite"] for r in aggregate(results)}
    for m in ("mock-a", "mock-b"):
        assert means[(m, "few-shot")] > means[(m, "zero-shot")] > means[(m, "original")]
