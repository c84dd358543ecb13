"""Character n-gram F-score on whitespace-normalized text."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass

__all__ = ["ChrfScore", "OrderStats", "chrf", "chrf_statistics", "normalize_whitespace"]


@dataclass(frozen=True)
class ChrfScore:
    precision: float
    recall: float
    score: float


@dataclass(frozen=True)
class OrderStats:
    n: int
    matches: int
    cand_total: int
    ref_total: int


def normalize_whitespace(text: str) -> str:
    return " ".join(text.split())


def _char_ngrams(text: str, n: int) -> Counter[str]:
    return Counter(text[i : i + n] for i in range(len(text) - n + 1))


def chrf_statistics(cand: str, ref: str, n_max: int = 6) -> list[OrderStats]:
    """Clipped match counts and totals per n-gram order, after normalization."""
    cand = normalize_whitespace(cand)
    ref = normalize_whitespace(ref)
    stats = []
    for n in range(1, n_max + 1):
        c = _char_ngrams(cand, n)
        r = _char_ngrams(ref, n)
        matches = sum((c & r).values())
        stats.append(OrderStats(n, matches, sum(c.values()), sum(r.values())))
    return stats


def chrf(cand: str, ref: str, n_max: int = 6, beta: float = 1.0) -> ChrfScore:
    """Macro-averaged character n-gram precision/recall and their F-beta.

    Only orders for which the reference has at least one n-gram take part in
    the average.
    """
    used = [s for s in chrf_statistics(cand, ref, n_max) if s.ref_total > 0]
    if not used or not normalize_whitespace(cand):
        return ChrfScore(0.0, 0.0, 0.0)
    p = sum(s.matches / s.cand_total if s.cand_total else 0.0 for s in used) / len(used)
    r = sum(s.matches / s.ref_total for s in used) / len(used)
    if p == 0.0 and r == 0.0:
        return ChrfScore(0.0, 0.0, 0.0)
    b2 = beta * beta
    return ChrfScore(p, r, (1 + b2) * p * r / (b2 * p + r))
