from __future__ import annotations

from dataclasses import asdict, dataclass, field
from typing import Collection

from ..analysis.tokens import metric_tokens
from .chrf import ChrfScore, chrf
from .codebert import CodeBertScore, EmbeddingProvider, HashEmbedder, codebert_score
from .codebleu import CodeBleuReport, CodeBleuWeights, codebleu
from .rouge import RougeScore, rouge_l

__all__ = ["METRIC_COLUMNS", "MetricReport", "score_pair"]

# headline column per metric family, in report order
METRIC_COLUMNS = {
    "codebleu": "codebleu.composite",
    "codebert": "codebert.f1",
    "rouge_l": "rouge_l.f",
    "chrf": "chrf.score",
}


@dataclass(frozen=True)
class MetricReport:
    codebleu: CodeBleuReport
    codebert: CodeBertScore
    rouge_l: RougeScore
    chrf: ChrfScore
    flags: dict = field(default_factory=dict)

    @property
    def candidate_parse_failed(self) -> bool:
        return bool(self.flags.get("candidate_parse_failed", False))

    def flat(self) -> dict[str, float]:
        """Scores keyed ``family.field``; boolean flags are excluded."""
        out: dict[str, float] = {}
        for family in ("codebleu", "codebert", "rouge_l", "chrf"):
            for key, value in asdict(getattr(self, family)).items():
                if isinstance(value, bool):
                    continue
                out[f"{family}.{key}"] = float(value)
        return out

    def to_dict(self) -> dict:
        return {
            "codebleu": asdict(self.codebleu),
            "codebert": asdict(self.codebert),
            "rouge_l": asdict(self.rouge_l),
            "chrf": asdict(self.chrf),
            "flags": dict(self.flags),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "MetricReport":
        return cls(
            codebleu=CodeBleuReport(**d["codebleu"]),
            codebert=CodeBertScore(**d["codebert"]),
            rouge_l=RougeScore(**d["rouge_l"]),
            chrf=ChrfScore(**d["chrf"]),
            flags=dict(d.get("flags", {})),
        )

    @classmethod
    def zero(cls, **flags: bool) -> "MetricReport":
        return cls(
            CodeBleuReport(0.0, 0.0, 0.0, 0.0, 0.0, True),
            CodeBertScore(0.0, 0.0, 0.0),
            RougeScore(0.0, 0.0, 0.0),
            ChrfScore(0.0, 0.0, 0.0),
            {"candidate_parse_failed": True, **flags},
        )


def score_pair(
    cand: str,
    ref: str,
    weights: CodeBleuWeights | None = None,
    embedder: EmbeddingProvider | None = None,
    keywords: Collection[str] | None = None,
    beta: float = 1.0,
) -> MetricReport:
    """All four metrics for one candidate/reference pair.

    Raises :class:`~sdvbench.metrics.codebleu.ReferenceParseError` when the
    reference does not parse.
    """
    embedder = embedder or HashEmbedder()
    cb = codebleu(cand, ref, weights, keywords=keywords)
    cand_toks = metric_tokens(cand)
    ref_toks = metric_tokens(ref)
    return MetricReport(
        codebleu=cb,
        codebert=codebert_score(cand_toks, ref_toks, embedder, beta=beta),
        rouge_l=rouge_l(cand_toks, ref_toks, beta=beta),
        chrf=chrf(cand, ref, beta=beta),
        flags={"candidate_parse_failed": cb.candidate_parse_failed},
    )
