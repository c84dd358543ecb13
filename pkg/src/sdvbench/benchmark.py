"""Benchmark of prompt/solution pairs: use cases times complexity levels.

Directory layout::

    manifest.json                      {"levels": [...], "use_cases": [...]}
    usecases/<id>/meta.json            title, description, signals per level
    usecases/<id>/<level>/prompt.md
    usecases/<id>/<level>/solution.py
"""

from __future__ import annotations

import enum
import json
import os
from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable

from .analysis.syntax import ParseError, parse
from .catalog import SignalTree

__all__ = [
    "Benchmark",
    "BenchmarkError",
    "BenchmarkItem",
    "Complexity",
    "UseCase",
    "Violation",
    "filter_benchmark",
    "load_benchmark",
    "save_benchmark",
    "validate_benchmark",
]


class BenchmarkError(ValueError):
    pass


class Complexity(str, enum.Enum):
    SIMPLE = "simple"
    MODERATE = "moderate"
    ADVANCED = "advanced"


@dataclass(frozen=True)
class UseCase:
    id: str
    title: str
    description: str = ""


@dataclass(frozen=True)
class BenchmarkItem:
    use_case_id: str
    complexity: Complexity
    user_prompt: str
    reference_solution: str
    signals_used: tuple[str, ...] | None = None

    @property
    def key(self) -> str:
        return f"{self.use_case_id}/{self.complexity.value}"


@dataclass(frozen=True)
class Violation:
    item: str
    kind: str  # unknown-signal | empty-solution | parse-failure
    message: str


@dataclass(frozen=True)
class Benchmark:
    use_cases: tuple[UseCase, ...]
    items: tuple[BenchmarkItem, ...]
    levels: tuple[Complexity, ...] = tuple(Complexity)

    def __len__(self) -> int:
        return len(self.items)

    def __iter__(self):
        return iter(self.items)

    def counts(self) -> dict[str, Counter]:
        return {
            "use_case": Counter(i.use_case_id for i in self.items),
            "complexity": Counter(i.complexity.value for i in self.items),
        }

    def item(self, key: str) -> BenchmarkItem:
        for it in self.items:
            if it.key == key:
                return it
        raise KeyError(key)


def _read_text(path: Path, what: str) -> str:
    if not path.is_file():
        raise BenchmarkError(f"missing {what}: {path}")
    return path.read_text(encoding="utf-8")


def load_benchmark(directory: str | os.PathLike) -> Benchmark:
    root = Path(directory)
    try:
        manifest = json.loads((root / "manifest.json").read_text(encoding="utf-8"))
        levels = tuple(Complexity(l) for l in manifest["levels"])
        uc_ids = list(manifest["use_cases"])
    except (OSError, json.JSONDecodeError, KeyError, ValueError) as exc:
        raise BenchmarkError(f"unreadable manifest: {exc}") from exc
    if len(set(uc_ids)) != len(uc_ids):
        dupes = sorted(k for k, v in Counter(uc_ids).items() if v > 1)
        raise BenchmarkError(f"duplicate use case id(s): {', '.join(dupes)}")

    use_cases = []
    items = []
    for uc_id in uc_ids:
        uc_dir = root / "usecases" / uc_id
        try:
            meta = json.loads(_read_text(uc_dir / "meta.json", f"metadata for {uc_id}"))
        except json.JSONDecodeError as exc:
            raise BenchmarkError(f"{uc_id}: bad meta.json: {exc}") from exc
        use_cases.append(UseCase(uc_id, meta.get("title", uc_id), meta.get("description", "")))
        signals = meta.get("signals", {})
        for level in levels:
            level_dir = uc_dir / level.value
            if not level_dir.is_dir():
                raise BenchmarkError(f"{uc_id}: missing {level.value!r} level")
            prompt = _read_text(level_dir / "prompt.md", f"prompt for {uc_id}/{level.value}")
            solution = _read_text(level_dir / "solution.py", f"solution for {uc_id}/{level.value}")
            sig = signals.get(level.value)
            items.append(
                BenchmarkItem(uc_id, level, prompt, solution, tuple(sig) if sig is not None else None)
            )
    return Benchmark(tuple(use_cases), tuple(items), levels)


def _dump_json(obj) -> str:
    return json.dumps(obj, indent=2, ensure_ascii=False) + "\n"


def save_benchmark(bench: Benchmark, directory: str | os.PathLike) -> None:
    root = Path(directory)
    root.mkdir(parents=True, exist_ok=True)
    manifest = {
        "levels": [l.value for l in bench.levels],
        "use_cases": [u.id for u in bench.use_cases],
    }
    (root / "manifest.json").write_text(_dump_json(manifest), encoding="utf-8")
    by_uc: dict[str, list[BenchmarkItem]] = {}
    for it in bench.items:
        by_uc.setdefault(it.use_case_id, []).append(it)
    for uc in bench.use_cases:
        uc_dir = root / "usecases" / uc.id
        uc_dir.mkdir(parents=True, exist_ok=True)
        meta: dict = {"title": uc.title, "description": uc.description}
        signals = {
            it.complexity.value: list(it.signals_used)
            for it in by_uc.get(uc.id, [])
            if it.signals_used is not None
        }
        if signals:
            meta["signals"] = signals
        (uc_dir / "meta.json").write_text(_dump_json(meta), encoding="utf-8")
        for it in by_uc.get(uc.id, []):
            level_dir = uc_dir / it.complexity.value
            level_dir.mkdir(exist_ok=True)
            (level_dir / "prompt.md").write_text(it.user_prompt, encoding="utf-8")
            (level_dir / "solution.py").write_text(it.reference_solution, encoding="utf-8")


def validate_benchmark(bench: Benchmark, catalog: SignalTree) -> list[Violation]:
    """Data problems found in the benchmark; an empty list means it is clean."""
    out = []
    for it in bench.items:
        for path in it.signals_used or ():
            if path not in catalog:
                out.append(Violation(it.key, "unknown-signal", f"signal {path} is not in the catalog"))
        if not it.reference_solution.strip():
            out.append(Violation(it.key, "empty-solution", "reference solution is empty"))
            continue
        result = parse(it.reference_solution)
        if isinstance(result, ParseError):
            out.append(Violation(it.key, "parse-failure", str(result)))
    return out


def filter_benchmark(
    bench: Benchmark,
    complexity: Iterable[Complexity | str] | None = None,
    use_cases: Iterable[str] | None = None,
) -> Benchmark:
    levels = {Complexity(c) for c in complexity} if complexity is not None else None
    ucs = set(use_cases) if use_cases is not None else None
    items = tuple(
        it
        for it in bench.items
        if (levels is None or it.complexity in levels) and (ucs is None or it.use_case_id in ucs)
    )
    kept_uc = {it.use_case_id for it in items}
    return Benchmark(
        tuple(u for u in bench.use_cases if u.id in kept_uc or (ucs is None and levels is None)),
        items,
        bench.levels if levels is None else tuple(l for l in bench.levels if l in levels),
    )
