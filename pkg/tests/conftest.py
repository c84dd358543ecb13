from __future__ import annotations

import shutil
import sys
from pathlib import Path

import pytest

from sdvbench import DATA_DIR, load_benchmark, load_bundle, load_catalog
from sdvbench.analysis.tokens import TokenKind, tokenize

sys.path.insert(0, str(Path(__file__).parent))

CATALOG = DATA_DIR / "catalog.json"
BUNDLE = DATA_DIR / "prompt_bundle"
BENCH = DATA_DIR / "benchmark"
RUN_CONFIG = DATA_DIR / "run.json"

MINIMAL_CATALOG = {
    "Vehicle": {
        "type": "branch",
        "description": "root",
        "children": {
            "Speed": {"type": "sensor", "datatype": "float", "unit": "km/h", "description": "Vehicle speed."}
        },
    }
}


def rename_identifiers(source: str, prefix: str = "zz") -> str:
    """Consistently rename every identifier token to a fresh name."""
    mapping: dict[str, str] = {}
    out = []
    last = 0
    for tok in tokenize(source):
        if tok.kind is TokenKind.IDENTIFIER:
            new = mapping.setdefault(tok.text, f"{prefix}{len(mapping)}")
            out.append(source[last : tok.offset])
            out.append(new)
            last = tok.offset + len(tok.text)
    out.append(source[last:])
    return "".join(out)


@pytest.fixture(scope="session")
def catalog():
    return load_catalog(CATALOG)


@pytest.fixture(scope="session")
def bundle():
    return load_bundle(BUNDLE)


@pytest.fixture(scope="session")
def bench():
    return load_benchmark(BENCH)


@pytest.fixture()
def data_copy(tmp_path):
    """A writable copy of the shipped fixtures."""
    dst = tmp_path / "data"
    shutil.copytree(DATA_DIR, dst)
    return dst


# acceptance outcomes, filled in by test_acceptance.py and echoed after the run
ACCEPTANCE: dict[int, tuple[str, str]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        status, text = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n:>2}: {status:<4} {text}")
