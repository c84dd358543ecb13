import json

import pytest

from conftest import BENCH, BUNDLE, CATALOG, RUN_CONFIG
from sdvbench.cli import main


def run_cli(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def test_catalog_commands(capsys):
    code, out, _ = run_cli(capsys, "catalog", "validate", CATALOG)
    assert code == 0 and "56" in out
    code, out, _ = run_cli(capsys, "catalog", "list", CATALOG)
    assert code == 0 and len(out.splitlines()) == 56
    code, out, _ = run_cli(capsys, "catalog", "render", CATALOG)
    assert out.count("path: ") == 56


def test_catalog_error_exit_code(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{")
    code, _, err = run_cli(capsys, "catalog", "validate", bad)
    assert code == 2 and err


def test_prompt_assemble(tmp_path, capsys):
    out_file = tmp_path / "p.md"
    code, _, err = run_cli(
        capsys, "prompt", "assemble", "--mode", "zero-shot", "--catalog", CATALOG, "--bundle", BUNDLE,
        "--out", out_file,
    )
    assert code == 0 and "sha256" in err
    assert "path: Vehicle." in out_file.read_text()
    code, out, _ = run_cli(capsys, "prompt", "assemble", "--mode", "original", "--catalog", CATALOG, "--bundle", BUNDLE)
    assert code == 0 and out.strip() == ""


def test_bench_validate(capsys):
    code, out, _ = run_cli(capsys, "bench", "validate", "--catalog", CATALOG, BENCH)
    assert code == 0


def test_analyze_and_score(tmp_path, capsys):
    f = tmp_path / "a.py"
    f.write_text("x = 1\ny = x\n")
    code, out, _ = run_cli(capsys, "analyze", "parse", f)
    assert code == 0 and "Assign" in out
    code, out, _ = run_cli(capsys, "analyze", "dataflow", f)
    assert "var0" in out
    code, out, _ = run_cli(capsys, "score", "--cand", f, "--ref", f, "--metrics", "rouge_l,chrf")
    scores = json.loads(out)
    assert code == 0 and set(scores) - {"flags"} == {"rouge_l", "chrf"}
    assert scores["rouge_l"]["f"] == pytest.approx(1.0)


def test_run_report_compare_offline(tmp_path, capsys):
    res = tmp_path / "res"
    code, out, _ = run_cli(capsys, "run", "--config", RUN_CONFIG, "--results", res, "--offline")
    assert code == 0 and out.startswith("72 results") and "0 provider calls" in out
    code, md, _ = run_cli(capsys, "report", "--results", res, "--format", "md", "--pvalues", "baseline")
    assert code == 0 and "p-value" in md
    code, text, _ = run_cli(capsys, "report", "--results", res, "--format", "csv")
    assert len(text.splitlines()) == 1 + 6
    code, out, _ = run_cli(capsys, "compare", "--results", res, "--a", "mock-a/few-shot", "--b", "mock-a/original")
    sig = json.loads(out)
    assert code == 0 and 0 <= sig["p_value"] <= 1 and sig["n"] <= 12
    code, out, _ = run_cli(capsys, "compare", "--results", res, "--a", "mock-a/few-shot", "--b", "null", "--test", "t")
    assert code == 0 and json.loads(out)["test"] == "t"


def test_ablate_offline(capsys):
    code, out, _ = run_cli(capsys, "ablate", "--config", RUN_CONFIG, "--offline", "--subset", "api", "--format", "csv")
    assert code == 0
    assert [line.split(",")[0] for line in out.splitlines()[1:]] == ["Full prompt", "Without prompt", "api"]


def test_missing_file_is_a_clean_error(tmp_path, capsys):
    code, _, err = run_cli(capsys, "catalog", "list", tmp_path / "absent.json")
    assert code == 2 and "absent.json" in err
