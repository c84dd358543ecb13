"""Vehicle-signal catalog: parsing, lookup and the API-listing prompt section.

The catalog format is the nested-map JSON layout used by public VSS exports::

    {"Vehicle": {"type": "branch", "description": "...",
                 "children": {"Speed": {"type": "sensor", "datatype": "float",
                                        "unit": "km/h", "description": "..."}}}}
"""

from __future__ import annotations

import enum
import json
import os
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Any, Iterator, Mapping, Sequence

__all__ = [
    "ApiEntry",
    "CatalogError",
    "NodeKind",
    "SignalNode",
    "SignalTree",
    "flatten",
    "load_catalog",
    "parse_catalog",
    "render_api_listing",
    "resolve_path",
    "serialize_catalog",
]


class CatalogError(ValueError):
    """Raised for malformed catalogs and failed lookups."""

    def __init__(self, message: str, path: str | None = None) -> None:
        self.path = path
        super().__init__(f"{path}: {message}" if path else message)


class NodeKind(str, enum.Enum):
    BRANCH = "branch"
    SENSOR = "sensor"
    ACTUATOR = "actuator"
    ATTRIBUTE = "attribute"

    @property
    def label(self) -> str:
        return self.value.capitalize()

    @property
    def is_leaf(self) -> bool:
        return self is not NodeKind.BRANCH


_INT_TYPES = [f"{p}int{w}" for p in ("", "u") for w in (8, 16, 32, 64)]
BASE_DATATYPES = frozenset(["boolean", "float", "double", "string", "enumeration", *_INT_TYPES])

# keys with a dedicated SignalNode field; anything else lands in ``extra``
_KNOWN_KEYS = frozenset(
    ["type", "datatype", "unit", "description", "allowed", "min", "max", "children"]
)


def _valid_datatype(datatype: str) -> bool:
    base = datatype[:-2] if datatype.endswith("[]") else datatype
    return base in BASE_DATATYPES


@dataclass(frozen=True)
class SignalNode:
    path: str
    kind: NodeKind
    description: str = ""
    datatype: str | None = None
    unit: str | None = None
    allowed_values: tuple[str, ...] | None = None
    min: float | None = None
    max: float | None = None
    children: tuple["SignalNode", ...] = ()
    extra: Mapping[str, Any] = field(default_factory=dict, compare=False)

    @property
    def name(self) -> str:
        return self.path.rsplit(".", 1)[-1]

    @property
    def is_leaf(self) -> bool:
        return self.kind.is_leaf

    def walk(self) -> Iterator["SignalNode"]:
        """Pre-order traversal including this node."""
        yield self
        for child in self.children:
            yield from child.walk()


@dataclass(frozen=True)
class ApiEntry:
    path: str
    kind: NodeKind
    datatype: str
    unit: str | None
    description: str
    allowed_values: str | None = None


class SignalTree:
    """A validated, immutable catalog rooted at a single branch."""

    def __init__(self, root: SignalNode) -> None:
        self._root = root
        index: dict[str, SignalNode] = {}
        for node in root.walk():
            index[node.path] = node
        self._index = MappingProxyType(index)

    @property
    def root(self) -> SignalNode:
        return self._root

    @property
    def index(self) -> Mapping[str, SignalNode]:
        return self._index

    def leaves(self) -> list[SignalNode]:
        return [n for n in self._root.walk() if n.is_leaf]

    def __len__(self) -> int:
        return len(self._index)

    def __contains__(self, path: object) -> bool:
        return path in self._index

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SignalTree):
            return NotImplemented
        return self._root == other._root

    def __repr__(self) -> str:
        return f"SignalTree(root={self._root.path!r}, nodes={len(self)})"


def _parse_kind(raw: Any, path: str) -> NodeKind:
    if not isinstance(raw, str):
        raise CatalogError("missing or non-string 'type'", path)
    try:
        return NodeKind(raw.lower())
    except ValueError:
        raise CatalogError(f"unknown kind tag {raw!r}", path) from None


def _parse_number(value: Any, key: str, path: str) -> float | None:
    if value is None:
        return None
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise CatalogError(f"{key!r} must be a number", path)
    return value


def _parse_node(path: str, body: Any, seen: set[str]) -> SignalNode:
    if not isinstance(body, dict):
        raise CatalogError("node must be a mapping", path)
    if path in seen:
        raise CatalogError("duplicate path", path)
    seen.add(path)
    if getattr(body, "duplicates", ()):
        raise CatalogError(f"duplicate key {body.duplicates[0]!r}", path)

    kind = _parse_kind(body.get("type"), path)
    datatype = body.get("datatype")
    if kind.is_leaf:
        if datatype is None:
            raise CatalogError(f"{kind.label} without datatype", path)
        if not isinstance(datatype, str) or not _valid_datatype(datatype):
            raise CatalogError(f"unknown datatype {datatype!r}", path)
        if "children" in body:
            raise CatalogError(f"{kind.label} cannot have children", path)

    description = body.get("description", "")
    if not isinstance(description, str):
        raise CatalogError("'description' must be a string", path)
    unit = body.get("unit")
    if unit is not None and not isinstance(unit, str):
        raise CatalogError("'unit' must be a string", path)

    allowed = body.get("allowed")
    if allowed is not None:
        if not isinstance(allowed, list):
            raise CatalogError("'allowed' must be a list", path)
        allowed = tuple(str(v) for v in allowed)

    children: list[SignalNode] = []
    raw_children = body.get("children", {})
    if kind is NodeKind.BRANCH:
        if not isinstance(raw_children, dict):
            raise CatalogError("'children' must be a mapping", path)
        if getattr(raw_children, "duplicates", ()):
            raise CatalogError("duplicate path", f"{path}.{raw_children.duplicates[0]}")
        for segment, child_body in raw_children.items():
            if not segment or "." in segment:
                raise CatalogError(f"invalid path segment {segment!r}", path)
            children.append(_parse_node(f"{path}.{segment}", child_body, seen))

    extra = {k: v for k, v in body.items() if k not in _KNOWN_KEYS}
    return SignalNode(
        path=path,
        kind=kind,
        description=description,
        datatype=datatype,
        unit=unit,
        allowed_values=allowed,
        min=_parse_number(body.get("min"), "min", path),
        max=_parse_number(body.get("max"), "max", path),
        children=tuple(children),
        extra=MappingProxyType(extra),
    )


class _Object(dict):
    """Decoded JSON object that remembers keys seen more than once."""

    duplicates: tuple[str, ...] = ()


def _keep_duplicates(pairs: list[tuple[str, Any]]) -> _Object:
    out = _Object()
    dupes = []
    for key, value in pairs:
        if key in out:
            dupes.append(key)
        out[key] = value
    out.duplicates = tuple(dupes)
    return out


def parse_catalog(raw: bytes | str | Mapping[str, Any]) -> SignalTree:
    """Parse a nested-map catalog document into a validated :class:`SignalTree`.

    ``raw`` may be the encoded document or an already-decoded mapping.
    """
    if isinstance(raw, (bytes, bytearray, str)):
        try:
            text = raw.decode("utf-8") if isinstance(raw, (bytes, bytearray)) else raw
            doc = json.loads(text, object_pairs_hook=_keep_duplicates)
        except (UnicodeDecodeError, json.JSONDecodeError) as exc:
            raise CatalogError(f"malformed document: {exc}") from None
    else:
        doc = raw
    if getattr(doc, "duplicates", ()):
        raise CatalogError("duplicate path", doc.duplicates[0])
    if not isinstance(doc, dict) or len(doc) != 1:
        raise CatalogError("malformed document: expected exactly one root node")
    (root_name, root_body), = doc.items()
    if not root_name or "." in root_name:
        raise CatalogError(f"invalid root name {root_name!r}")
    root = _parse_node(root_name, root_body, set())
    if root.kind is not NodeKind.BRANCH:
        raise CatalogError("root must be a branch", root_name)
    return SignalTree(root)


def load_catalog(path: str | os.PathLike) -> SignalTree:
    with open(path, "rb") as fh:
        return parse_catalog(fh.read())


def _node_to_doc(node: SignalNode) -> dict[str, Any]:
    doc: dict[str, Any] = {"type": node.kind.value}
    if node.datatype is not None:
        doc["datatype"] = node.datatype
    if node.unit is not None:
        doc["unit"] = node.unit
    if node.min is not None:
        doc["min"] = node.min
    if node.max is not None:
        doc["max"] = node.max
    if node.allowed_values is not None:
        doc["allowed"] = list(node.allowed_values)
    doc["description"] = node.description
    doc.update(node.extra)
    if node.kind is NodeKind.BRANCH:
        doc["children"] = {c.name: _node_to_doc(c) for c in node.children}
    return doc


def serialize_catalog(tree: SignalTree) -> bytes:
    """Encode a tree back into the nested-map document format."""
    doc = {tree.root.name: _node_to_doc(tree.root)}
    return (json.dumps(doc, indent=2, ensure_ascii=False) + "\n").encode("utf-8")


def _summarize_allowed(values: Sequence[str] | None) -> str | None:
    if not values:
        return None
    return ", ".join(values)


def flatten(tree: SignalTree) -> list[ApiEntry]:
    """One :class:`ApiEntry` per leaf, sorted by the UTF-8 bytes of the path."""
    entries = [
        ApiEntry(
            path=node.path,
            kind=node.kind,
            datatype=node.datatype or "",
            unit=node.unit,
            description=node.description,
            allowed_values=_summarize_allowed(node.allowed_values),
        )
        for node in tree.leaves()
    ]
    entries.sort(key=lambda e: e.path.encode("utf-8"))
    return entries


def _one_line(text: str) -> str:
    return " ".join(text.split())


def render_api_listing(entries: Sequence[ApiEntry]) -> str:
    """Render entries as blank-line separated, fixed-template blocks."""
    if not entries:
        raise CatalogError("cannot render an empty API listing")
    blocks = []
    for e in entries:
        lines = [
            f"path: {e.path}",
            f"kind: {e.kind.label}",
            f"datatype: {e.datatype}",
            f"unit: {e.unit or '-'}",
            f"description: {_one_line(e.description) or '-'}",
        ]
        if e.allowed_values:
            lines.append(f"allowed: {_one_line(e.allowed_values)}")
        blocks.append("\n".join(lines))
    return "\n\n".join(blocks) + "\n"


def resolve_path(tree: SignalTree, path: str) -> SignalNode:
    try:
        return tree.index[path]
    except KeyError:
        raise CatalogError("unknown path", path) from None
