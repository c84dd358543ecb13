"""Sentence-level BLEU over code tokens, plain and keyword-weighted."""

from __future__ import annotations

import math
from collections import Counter
from typing import Collection, Sequence

from ..analysis.tokens import KEYWORDS

__all__ = ["DEFAULT_API_KEYWORDS", "default_keywords", "ngram_bleu", "ngrams", "weighted_ngram_bleu"]

# vehicle API verbs that carry as much structure as language keywords
DEFAULT_API_KEYWORDS = frozenset(["get", "set", "subscribe", "set_many", "publish_event"])


def default_keywords() -> frozenset[str]:
    return KEYWORDS | DEFAULT_API_KEYWORDS


def ngrams(tokens: Sequence[str], n: int) -> Counter[tuple[str, ...]]:
    return Counter(tuple(tokens[i : i + n]) for i in range(len(tokens) - n + 1))


def _brevity_penalty(c: int, r: int) -> float:
    if c > r:
        return 1.0
    return math.exp(1.0 - r / c)


def _bleu(
    cand: Sequence[str],
    ref: Sequence[str],
    max_n: int,
    unigram_weight=None,
) -> float:
    if not cand:
        return 0.0
    log_sum = 0.0
    for n in range(1, max_n + 1):
        cand_counts = ngrams(cand, n)
        ref_counts = ngrams(ref, n)
        if n == 1 and unigram_weight is not None:
            num = sum(min(c, ref_counts[g]) * unigram_weight(g[0]) for g, c in cand_counts.items())
            den = sum(c * unigram_weight(g[0]) for g, c in cand_counts.items())
        else:
            num = sum(min(c, ref_counts[g]) for g, c in cand_counts.items())
            den = sum(cand_counts.values())
        if num == 0:
            if n == 1:
                return 0.0
            num, den = 1, den + 1
        log_sum += math.log(num / den)
    score = _brevity_penalty(len(cand), len(ref)) * math.exp(log_sum / max_n)
    return min(1.0, score)


def ngram_bleu(cand: Sequence[str], ref: Sequence[str], max_n: int = 4) -> float:
    """Geometric mean of clipped n-gram precisions times the brevity penalty.

    Orders above one that have no matches are add-one smoothed; an empty
    candidate, or one sharing no unigram with the reference, scores 0.
    """
    return _bleu(cand, ref, max_n)


def weighted_ngram_bleu(
    cand: Sequence[str],
    ref: Sequence[str],
    max_n: int = 4,
    keyword_weight: float = 5.0,
    keywords: Collection[str] | None = None,
) -> float:
    """BLEU whose unigram precision counts keyword tokens ``keyword_weight`` times."""
    kw = default_keywords() if keywords is None else frozenset(keywords)

    def weight(tok: str) -> float:
        return keyword_weight if tok in kw else 1.0

    return _bleu(cand, ref, max_n, weight)
