"""System-prompt assembly from a prompt bundle and a signal catalog.

A bundle is a directory::

    manifest.json          section order, ids, kinds and titles
    <section>.md           one file per descriptive section
    exemplars/<id>.md      request text, optionally followed by a "## Reasoning" part
    exemplars/<id>.py      solution code

The API-listing and examples sections have no file of their own; their
bodies are generated from the catalog and the exemplars at assembly time.
"""

from __future__ import annotations

import enum
import hashlib
import json
import math
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

from .catalog import SignalTree, flatten, render_api_listing

__all__ = [
    "ExemplarProblem",
    "Mode",
    "PromptBundle",
    "PromptConfig",
    "PromptError",
    "PromptSection",
    "SectionKind",
    "SECTION_SEPARATOR",
    "SystemPrompt",
    "assemble",
    "estimate_tokens",
    "load_bundle",
    "render_exemplars",
    "select_sections",
]

SECTION_SEPARATOR = "\n\n" + "-" * 72 + "\n\n"
_REASONING_HEADING = "## Reasoning"


class PromptError(ValueError):
    pass


class SectionKind(str, enum.Enum):
    DESCRIPTIVE = "descriptive"
    API_LISTING = "api_listing"
    EXAMPLES = "examples"


class Mode(str, enum.Enum):
    FEW_SHOT = "few-shot"
    ZERO_SHOT = "zero-shot"
    ORIGINAL = "original"


@dataclass(frozen=True)
class PromptSection:
    id: str
    kind: SectionKind
    title: str
    body: str

    def __post_init__(self) -> None:
        if not self.body.strip():
            raise PromptError(f"section {self.id!r} has an empty body")

    def render(self) -> str:
        return f"## {self.title}\n\n{self.body.strip()}"


@dataclass(frozen=True)
class ExemplarProblem:
    id: str
    user_request: str
    solution_code: str
    reasoning_notes: str | None = None

    def __post_init__(self) -> None:
        if not self.solution_code.strip():
            raise PromptError(f"exemplar {self.id!r} has no solution code")


@dataclass(frozen=True)
class PromptConfig:
    mode: Mode
    included_section_ids: tuple[str, ...] | None = None
    exemplar_ids: tuple[str, ...] | None = None

    @classmethod
    def of(cls, mode: Mode | str, sections: Iterable[str] | None = None,
           exemplars: Iterable[str] | None = None) -> "PromptConfig":
        mode = Mode(mode)
        if mode is Mode.ORIGINAL:
            return cls(mode)
        return cls(
            mode,
            tuple(sections) if sections is not None else None,
            tuple(exemplars) if exemplars is not None else None,
        )

    def label(self) -> str:
        if self.mode is Mode.ORIGINAL or self.included_section_ids is None:
            return self.mode.value
        return f"{self.mode.value}[{','.join(self.included_section_ids)}]"


@dataclass(frozen=True)
class SystemPrompt:
    sections: tuple[PromptSection, ...]
    rendered_text: str
    fingerprint: str = field(init=False)

    def __post_init__(self) -> None:
        digest = hashlib.sha256(self.rendered_text.encode("utf-8")).hexdigest()
        object.__setattr__(self, "fingerprint", digest)

    @property
    def section_ids(self) -> tuple[str, ...]:
        return tuple(s.id for s in self.sections)

    @classmethod
    def from_sections(cls, sections: Sequence[PromptSection]) -> "SystemPrompt":
        text = SECTION_SEPARATOR.join(s.render() for s in sections)
        if sections:
            text += "\n"
        return cls(tuple(sections), text)


@dataclass(frozen=True)
class _LayoutEntry:
    id: str
    kind: SectionKind
    title: str


@dataclass(frozen=True)
class PromptBundle:
    layout: tuple[_LayoutEntry, ...]
    descriptive: dict
    exemplars: tuple[ExemplarProblem, ...]

    @property
    def section_ids(self) -> tuple[str, ...]:
        return tuple(e.id for e in self.layout)

    def sections(
        self, catalog: SignalTree, exemplar_ids: Sequence[str] | None = None
    ) -> list[PromptSection]:
        """Every section of the bundle, in manifest order, with generated bodies filled in."""
        out = []
        for entry in self.layout:
            if entry.kind is SectionKind.DESCRIPTIVE:
                body = self.descriptive[entry.id]
            elif entry.kind is SectionKind.API_LISTING:
                body = render_api_listing(flatten(catalog))
            else:
                body = render_exemplars(self.pick_exemplars(exemplar_ids))
            out.append(PromptSection(entry.id, entry.kind, entry.title, body))
        return out

    def pick_exemplars(self, ids: Sequence[str] | None) -> list[ExemplarProblem]:
        if ids is None:
            return list(self.exemplars)
        by_id = {e.id: e for e in self.exemplars}
        missing = [i for i in ids if i not in by_id]
        if missing:
            raise PromptError(f"unknown exemplar id(s): {', '.join(missing)}")
        wanted = set(ids)
        return [e for e in self.exemplars if e.id in wanted]


def render_exemplars(exemplars: Sequence[ExemplarProblem]) -> str:
    """Request, then reasoning notes, then fenced solution code for each exemplar."""
    blocks = []
    for e in exemplars:
        parts = [f"### Example: {e.id}", "", "Request:", e.user_request.strip()]
        if e.reasoning_notes:
            parts += ["", "Reasoning:", e.reasoning_notes.strip()]
        parts += ["", "Solution:", "```python", e.solution_code.rstrip("\n"), "```"]
        blocks.append("\n".join(parts))
    return "\n\n".join(blocks)


def _read_exemplar(directory: Path, ex_id: str) -> ExemplarProblem:
    request_path = directory / f"{ex_id}.md"
    solution_path = directory / f"{ex_id}.py"
    if not request_path.is_file() or not solution_path.is_file():
        raise PromptError(f"exemplar {ex_id!r} needs both {ex_id}.md and {ex_id}.py")
    text = request_path.read_text(encoding="utf-8")
    notes = None
    if _REASONING_HEADING in text:
        text, notes = text.split(_REASONING_HEADING, 1)
        notes = notes.strip() or None
    return ExemplarProblem(ex_id, text.strip(), solution_path.read_text(encoding="utf-8"), notes)


def load_bundle(directory: str | os.PathLike) -> PromptBundle:
    root = Path(directory)
    try:
        manifest = json.loads((root / "manifest.json").read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise PromptError(f"cannot read bundle manifest: {exc}") from exc

    layout = []
    descriptive = {}
    seen: set[str] = set()
    for raw in manifest.get("sections", []):
        sid = raw["id"]
        if sid in seen:
            raise PromptError(f"duplicate section id {sid!r}")
        seen.add(sid)
        kind = SectionKind(raw["kind"])
        layout.append(_LayoutEntry(sid, kind, raw.get("title", sid)))
        if kind is SectionKind.DESCRIPTIVE:
            path = root / raw.get("file", f"{sid}.md")
            if not path.is_file():
                raise PromptError(f"section {sid!r}: missing file {path.name}")
            body = path.read_text(encoding="utf-8")
            if not body.strip():
                raise PromptError(f"section {sid!r} has an empty body")
            descriptive[sid] = body

    ex_dir = root / "exemplars"
    exemplars = []
    if ex_dir.is_dir():
        ids = sorted({p.stem for p in ex_dir.iterdir() if p.suffix in (".md", ".py")})
        exemplars = [_read_exemplar(ex_dir, i) for i in ids]
    return PromptBundle(tuple(layout), descriptive, tuple(exemplars))


def select_sections(sections: Sequence[PromptSection], ids: Sequence[str]) -> list[PromptSection]:
    """Sections whose id is in ``ids``, kept in their original order."""
    if not ids:
        raise PromptError("no section ids given")
    known = {s.id for s in sections}
    unknown = [i for i in ids if i not in known]
    if unknown:
        raise PromptError(f"unknown section id(s): {', '.join(unknown)}")
    wanted = set(ids)
    return [s for s in sections if s.id in wanted]


def assemble(
    config: PromptConfig,
    catalog: SignalTree,
    bundle: PromptBundle,
) -> SystemPrompt:
    """Build the system prompt for one prompting mode.

    Few-shot keeps every section; zero-shot drops the examples section;
    original produces an empty prompt. ``included_section_ids`` then narrows
    the result further.
    """
    if config.mode is Mode.ORIGINAL:
        return SystemPrompt.from_sections([])
    sections = bundle.sections(catalog, config.exemplar_ids)
    if config.included_section_ids is not None:
        sections = select_sections(sections, config.included_section_ids)
    if config.mode is Mode.ZERO_SHOT:
        sections = [s for s in sections if s.kind is not SectionKind.EXAMPLES]
    if not sections:
        raise PromptError(f"{config.label()} prompt has no sections")
    return SystemPrompt.from_sections(sections)


def estimate_tokens(text: str, factor: float = 1.0) -> int:
    """Rough token count: whitespace-delimited words times ``factor``."""
    return math.ceil(len(text.split()) * factor)
