"""Tokenizing, parsing and def-use analysis of playground scripts."""

from .dataflow import DataflowGraph, extract_dataflow
from .syntax import Node, ParseError, Span, extract_subtrees, parse, parses
from .tokens import KEYWORDS, Token, TokenizeError, TokenKind, metric_tokens, tokenize

__all__ = [
    "KEYWORDS",
    "DataflowGraph",
    "Node",
    "ParseError",
    "Span",
    "Token",
    "TokenKind",
    "TokenizeError",
    "extract_dataflow",
    "extract_subtrees",
    "metric_tokens",
    "parse",
    "parses",
    "tokenize",
]
