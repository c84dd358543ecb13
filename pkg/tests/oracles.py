"""Brute-force reference implementations used to check the real ones.

Each oracle is deliberately naive: exhaustive enumeration instead of dynamic
programming, plain loops instead of Counters. They share no code with the
package under test.
"""

from __future__ import annotations

import itertools
import json
import random

import numpy as np


def lcs_bruteforce(a, b) -> int:
    """Length of the longest common subsequence by enumerating subsequences of the shorter input."""
    if len(a) > len(b):
        a, b = b, a
    for k in range(len(a), 0, -1):
        for idx in itertools.combinations(range(len(a)), k):
            sub = [a[i] for i in idx]
            it = iter(b)
            if all(any(x == y for y in it) for x in sub):
                return k
    return 0


def char_ngram_counts(text: str, n: int) -> dict:
    out: dict = {}
    for i in range(len(text) - n + 1):
        g = text[i : i + n]
        out[g] = out.get(g, 0) + 1
    return out


def chrf_order_stats(cand: str, ref: str, n: int) -> tuple[int, int, int]:
    """(clipped matches, candidate total, reference total) for one order."""
    c = char_ngram_counts(" ".join(cand.split()), n)
    r = char_ngram_counts(" ".join(ref.split()), n)
    matches = 0
    for g, k in c.items():
        matches += min(k, r.get(g, 0))
    return matches, sum(c.values()), sum(r.values())


def wilcoxon_permutation_p(diffs) -> float:
    """Two-sided p of W+ by enumerating all 2**n sign assignments over average ranks."""
    d = [x for x in diffs if x != 0]
    n = len(d)
    if n == 0:
        return 1.0
    absd = [abs(x) for x in d]
    order = sorted(range(n), key=lambda i: absd[i])
    ranks = [0.0] * n
    i = 0
    while i < n:
        j = i
        while j + 1 < n and absd[order[j + 1]] == absd[order[i]]:
            j += 1
        avg = (i + j + 2) / 2.0
        for k in range(i, j + 1):
            ranks[order[k]] = avg
        i = j + 1
    observed = sum(r for r, x in zip(ranks, d) if x > 0)
    lower = upper = 0
    for signs in itertools.product((0, 1), repeat=n):
        w = sum(r for r, s in zip(ranks, signs) if s)
        if w <= observed + 1e-9:
            lower += 1
        if w >= observed - 1e-9:
            upper += 1
    total = 2**n
    return min(1.0, 2 * min(lower / total, upper / total))


def count_leaves(doc_bytes: bytes) -> int:
    """Leaf count straight from the JSON document, without the catalog parser."""
    doc = json.loads(doc_bytes)
    stack = list(doc.values())
    leaves = 0
    while stack:
        node = stack.pop()
        if node.get("type") == "branch":
            stack.extend(node.get("children", {}).values())
        else:
            leaves += 1
    return leaves


def unigram_precision_bleu1(cand, ref) -> float:
    """BLEU with max_n=1 computed by hand: clipped unigram precision times brevity penalty."""
    if not cand:
        return 0.0
    remaining = list(ref)
    hits = 0
    for t in cand:
        if t in remaining:
            remaining.remove(t)
            hits += 1
    p = hits / len(cand)
    bp = 1.0 if len(cand) > len(ref) else float(np.exp(1 - len(ref) / len(cand)))
    return p * bp


class OrthogonalEmbedder:
    """Distinct tokens map to distinct standard basis vectors."""

    def __init__(self, dim: int = 64) -> None:
        self.dim = dim
        self.index: dict[str, int] = {}

    def embed(self, tokens):
        out = np.zeros((len(tokens), self.dim))
        for i, t in enumerate(tokens):
            j = self.index.setdefault(t, len(self.index))
            out[i, j] = 1.0
        return out


# -- program generator -------------------------------------------------------

_NAMES = ["speed", "limit", "count", "door", "light", "mode", "level", "temp", "value", "flag"]


def random_program(rng: random.Random, max_stmts: int = 8) -> str:
    """A small syntactically valid script over a handful of variables."""
    defined: list[str] = []

    def expr() -> str:
        pool = defined or ["0"]
        kind = rng.randrange(5)
        if kind == 0:
            return str(rng.randrange(100))
        if kind == 1:
            return rng.choice(pool)
        if kind == 2:
            return f"{rng.choice(pool)} {rng.choice('+-*')} {rng.randrange(10)}"
        if kind == 3:
            return f"max({rng.choice(pool)}, {rng.randrange(10)})"
        return f"self.Vehicle.Speed.get({rng.choice(pool)})"

    def block(depth: int, indent: str) -> list[str]:
        lines = []
        for _ in range(rng.randint(1, max_stmts if depth == 0 else 3)):
            choice = rng.randrange(6 if depth < 2 else 2)
            if choice <= 1:
                name = rng.choice(_NAMES)
                lines.append(f"{indent}{name} = {expr()}")
                if name not in defined:
                    defined.append(name)
            elif choice == 2:
                lines.append(f"{indent}if {expr()} > {rng.randrange(50)}:")
                lines += block(depth + 1, indent + "    ")
                if rng.random() < 0.5:
                    lines.append(f"{indent}else:")
                    lines += block(depth + 1, indent + "    ")
            elif choice == 3:
                var = rng.choice(["i", "j", "k"])
                lines.append(f"{indent}for {var} in range({rng.randrange(1, 5)}):")
                defined.append(var)
                lines += block(depth + 1, indent + "    ")
            elif choice == 4:
                lines.append(f"{indent}while {expr()} < {rng.randrange(50)}:")
                lines += block(depth + 1, indent + "    ")
            else:
                lines.append(f"{indent}print({expr()})")
        return lines

    return "\n".join(block(0, "")) + "\n"
