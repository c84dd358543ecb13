"""Code similarity metrics: CodeBLEU and its submetrics, CodeBERTScore, ROUGE-L and ChrF."""

from .bleu import DEFAULT_API_KEYWORDS, default_keywords, ngram_bleu, weighted_ngram_bleu
from .chrf import ChrfScore, chrf, chrf_statistics
from .codebert import CodeBertScore, EmbeddingError, EmbeddingProvider, HashEmbedder, HttpEmbedder, codebert_score
from .codebleu import (
    CodeBleuReport,
    CodeBleuWeights,
    ReferenceParseError,
    codebleu,
    combine,
    dataflow_match,
    syntax_match,
)
from .report import METRIC_COLUMNS, MetricReport, score_pair
from .rouge import RougeScore, lcs_length, rouge_l

__all__ = [
    "DEFAULT_API_KEYWORDS",
    "METRIC_COLUMNS",
    "ChrfScore",
    "CodeBertScore",
    "CodeBleuReport",
    "CodeBleuWeights",
    "EmbeddingError",
    "EmbeddingProvider",
    "HashEmbedder",
    "HttpEmbedder",
    "MetricReport",
    "ReferenceParseError",
    "RougeScore",
    "chrf",
    "chrf_statistics",
    "codebert_score",
    "codebleu",
    "combine",
    "dataflow_match",
    "default_keywords",
    "lcs_length",
    "ngram_bleu",
    "rouge_l",
    "score_pair",
    "syntax_match",
    "weighted_ngram_bleu",
]
