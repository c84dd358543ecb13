from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Collection

from ..analysis.dataflow import DataflowGraph, extract_dataflow
from ..analysis.syntax import Node, ParseError, ParseResult, extract_subtrees, parse
from ..analysis.tokens import metric_tokens
from .bleu import ngram_bleu, weighted_ngram_bleu

__all__ = [
    "CodeBleuReport",
    "CodeBleuWeights",
    "ReferenceParseError",
    "codebleu",
    "combine",
    "dataflow_match",
    "syntax_match",
]


class ReferenceParseError(ValueError):
    """The reference solution itself does not parse; the item cannot be scored."""


@dataclass(frozen=True)
class CodeBleuWeights:
    alpha: float = 0.25
    beta: float = 0.25
    gamma: float = 0.25
    delta: float = 0.25

    def __post_init__(self) -> None:
        ws = (self.alpha, self.beta, self.gamma, self.delta)
        if any(w < 0 or not math.isfinite(w) for w in ws):
            raise ValueError(f"weights must be non-negative, got {ws}")
        if abs(sum(ws) - 1.0) > 1e-9:
            raise ValueError(f"weights must sum to 1, got {sum(ws)!r}")

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.alpha, self.beta, self.gamma, self.delta)


@dataclass(frozen=True)
class CodeBleuReport:
    composite: float
    ngram: float
    weighted_ngram: float
    syntax: float
    dataflow: float
    candidate_parse_failed: bool = False


def combine(ngram: float, weighted: float, syntax: float, dataflow: float, weights: CodeBleuWeights) -> float:
    a, b, g, d = weights.as_tuple()
    return math.fsum((a * ngram, b * weighted, g * syntax, d * dataflow))


def syntax_match(cand: ParseResult, ref: ParseResult) -> float:
    """Share of reference depth-one subtrees also present in the candidate."""
    if isinstance(ref, ParseError):
        raise ReferenceParseError(str(ref))
    if isinstance(cand, ParseError):
        return 0.0
    ref_sub = extract_subtrees(ref)
    cand_sub = extract_subtrees(cand)
    total = sum(ref_sub.values())
    if total == 0:
        return 1.0 if not cand_sub else 0.0
    return sum((ref_sub & cand_sub).values()) / total


def dataflow_match(cand: DataflowGraph, ref: DataflowGraph) -> float:
    ref_keys = ref.edge_keys()
    cand_keys = cand.edge_keys()
    total = sum(ref_keys.values())
    if total == 0:
        return 1.0 if not cand_keys else 0.0
    return sum((ref_keys & cand_keys).values()) / total


def codebleu(
    cand: str,
    ref: str,
    weights: CodeBleuWeights | None = None,
    keywords: Collection[str] | None = None,
    keyword_weight: float = 5.0,
) -> CodeBleuReport:
    weights = weights or CodeBleuWeights()
    ref_tree = parse(ref)
    if isinstance(ref_tree, ParseError):
        raise ReferenceParseError(str(ref_tree))
    cand_tree = parse(cand)
    failed = isinstance(cand_tree, ParseError)

    cand_toks = metric_tokens(cand)
    ref_toks = metric_tokens(ref)
    ng = ngram_bleu(cand_toks, ref_toks)
    wng = weighted_ngram_bleu(cand_toks, ref_toks, keyword_weight=keyword_weight, keywords=keywords)
    syn = syntax_match(cand_tree, ref_tree)
    if failed:
        df = 0.0
    else:
        assert isinstance(cand_tree, Node)
        df = dataflow_match(extract_dataflow(cand_tree), extract_dataflow(ref_tree))
    return CodeBleuReport(combine(ng, wng, syn, df, weights), ng, wng, syn, df, failed)
