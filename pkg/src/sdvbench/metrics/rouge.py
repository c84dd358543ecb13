from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

__all__ = ["RougeScore", "lcs_length", "rouge_l"]


@dataclass(frozen=True)
class RougeScore:
    precision: float
    recall: float
    f: float


def lcs_length(a: Sequence[str], b: Sequence[str]) -> int:
    """Length of the longest common subsequence (two-row dynamic program)."""
    if len(a) < len(b):
        a, b = b, a
    prev = [0] * (len(b) + 1)
    for x in a:
        cur = [0]
        for j, y in enumerate(b, 1):
            cur.append(prev[j - 1] + 1 if x == y else max(prev[j], cur[j - 1]))
        prev = cur
    return prev[-1]


def rouge_l(cand: Sequence[str], ref: Sequence[str], beta: float = 1.0) -> RougeScore:
    if not cand or not ref:
        return RougeScore(0.0, 0.0, 0.0)
    lcs = lcs_length(cand, ref)
    p = lcs / len(cand)
    r = lcs / len(ref)
    if p == 0.0 and r == 0.0:
        return RougeScore(0.0, 0.0, 0.0)
    b2 = beta * beta
    return RougeScore(p, r, (1 + b2) * p * r / (r + b2 * p))
