"""Tokenizer for the Python-style scripting language used by playground scripts."""

from __future__ import annotations

import enum
import keyword
from typing import NamedTuple

__all__ = [
    "KEYWORDS",
    "Token",
    "TokenKind",
    "TokenizeError",
    "metric_tokens",
    "tokenize",
]

KEYWORDS = frozenset(keyword.kwlist)

# longest first so that maximal munch works with a simple prefix scan
_OPERATORS = sorted(
    """
    **= //= >>= <<= != == <= >= += -= *= /= %= &= |= ^= ** // << >> := ->
    + - * / % & | ^ ~ < > = @=
    """.split(),
    key=len,
    reverse=True,
)
_DELIMITERS = frozenset("()[]{},:;.@")
_OPEN = {"(": ")", "[": "]", "{": "}"}
_STRING_PREFIXES = frozenset(
    p.lower() for p in ["r", "u", "f", "b", "br", "rb", "fr", "rf"]
)


class TokenKind(enum.Enum):
    IDENTIFIER = "Identifier"
    KEYWORD = "Keyword"
    NUMBER = "Number"
    STRING = "String"
    OPERATOR = "Operator"
    DELIMITER = "Delimiter"
    NEWLINE = "Newline"
    INDENT = "Indent"
    DEDENT = "Dedent"
    COMMENT = "Comment"

    def __repr__(self) -> str:
        return f"TokenKind.{self.name}"


SYNTHETIC = frozenset([TokenKind.INDENT, TokenKind.DEDENT])


class Token(NamedTuple):
    kind: TokenKind
    text: str
    line: int
    column: int
    offset: int

    @property
    def synthetic(self) -> bool:
        return self.kind in SYNTHETIC

    @property
    def end_offset(self) -> int:
        return self.offset + len(self.text)


class TokenizeError(ValueError):
    def __init__(self, message: str, line: int, column: int) -> None:
        super().__init__(f"{message} at line {line}, column {column}")
        self.message = message
        self.line = line
        self.column = column


class _Lexer:
    def __init__(self, source: str) -> None:
        self.src = source
        self.pos = 0
        self.line = 1
        self.line_start = 0
        self.tokens: list[Token] = []
        self.indents = [0]
        self.brackets: list[str] = []
        self.at_line_start = True

    @property
    def col(self) -> int:
        return self.pos - self.line_start

    def error(self, message: str, pos: int | None = None) -> TokenizeError:
        pos = self.pos if pos is None else pos
        line = self.src.count("\n", 0, pos) + 1
        column = pos - (self.src.rfind("\n", 0, pos) + 1)
        return TokenizeError(message, line, column)

    def emit(self, kind: TokenKind, start: int) -> None:
        text = self.src[start : self.pos]
        self.tokens.append(Token(kind, text, self.line, start - self.line_start, start))

    def newline(self) -> None:
        # pos sits just after a "\n"
        self.line += 1
        self.line_start = self.pos

    def run(self) -> list[Token]:
        src = self.src
        n = len(src)
        while self.pos < n:
            if self.at_line_start and not self.brackets:
                if self.handle_indentation():
                    continue
            ch = src[self.pos]
            if ch == "\n":
                start = self.pos
                self.pos += 1
                if not self.brackets and self.tokens and self._logical_line_open():
                    self.emit(TokenKind.NEWLINE, start)
                self.newline()
                # continuation lines inside brackets carry no indentation
                self.at_line_start = not self.brackets
            elif ch in " \t\f\r":
                self.pos += 1
            elif ch == "\\" and src.startswith("\n", self.pos + 1):
                self.pos += 2
                self.newline()
            elif ch == "#":
                start = self.pos
                end = src.find("\n", self.pos)
                self.pos = n if end < 0 else end
                self.emit(TokenKind.COMMENT, start)
            elif ch.isdigit() or (ch == "." and self.pos + 1 < n and src[self.pos + 1].isdigit()):
                self.number()
            elif ch.isidentifier() or ch == "_":
                self.name_or_string()
            elif ch in "\"'":
                self.string(self.pos)
            else:
                self.punct()
        if self.brackets:
            raise self.error(f"unclosed {self.brackets[-1]!r}")
        while len(self.indents) > 1:
            self.indents.pop()
            self.tokens.append(Token(TokenKind.DEDENT, "", self.line, self.col, self.pos))
        return self.tokens

    def _logical_line_open(self) -> bool:
        for tok in reversed(self.tokens):
            if tok.kind is TokenKind.COMMENT:
                continue
            return tok.kind not in (TokenKind.NEWLINE, TokenKind.INDENT, TokenKind.DEDENT)
        return False

    def handle_indentation(self) -> bool:
        """Measure leading whitespace; returns True if a blank line was consumed."""
        src = self.src
        n = len(src)
        start = self.pos
        width = 0
        while self.pos < n and src[self.pos] in " \t\f":
            width = (width // 8 + 1) * 8 if src[self.pos] == "\t" else width + 1
            self.pos += 1
        if self.pos < n and src[self.pos] == "\r":
            self.pos += 1
        if self.pos >= n:
            return True
        if src[self.pos] == "\n":
            self.pos += 1
            self.newline()
            return True
        self.at_line_start = False
        if src[self.pos] == "#" or src.startswith("\\\n", self.pos):
            # comment-only lines do not affect indentation
            return False
        current = self.indents[-1]
        if width > current:
            self.indents.append(width)
            self.tokens.append(Token(TokenKind.INDENT, "", self.line, self.col, self.pos))
        elif width < current:
            while width < self.indents[-1]:
                self.indents.pop()
                self.tokens.append(Token(TokenKind.DEDENT, "", self.line, self.col, self.pos))
            if width != self.indents[-1]:
                raise self.error("inconsistent indentation", start)
        return False

    def number(self) -> None:
        src = self.src
        start = self.pos
        n = len(src)
        if src.startswith(("0x", "0X", "0o", "0O", "0b", "0B"), self.pos):
            self.pos += 2
            while self.pos < n and (src[self.pos].isalnum() or src[self.pos] == "_"):
                self.pos += 1
        else:
            while self.pos < n and (src[self.pos].isdigit() or src[self.pos] in "_."):
                self.pos += 1
            if self.pos < n and src[self.pos] in "eE":
                nxt = self.pos + 1
                if nxt < n and src[nxt] in "+-":
                    nxt += 1
                if nxt < n and src[nxt].isdigit():
                    self.pos = nxt
                    while self.pos < n and (src[self.pos].isdigit() or src[self.pos] == "_"):
                        self.pos += 1
            if self.pos < n and src[self.pos] in "jJ":
                self.pos += 1
        self.emit(TokenKind.NUMBER, start)

    def name_or_string(self) -> None:
        src = self.src
        start = self.pos
        while self.pos < len(src) and (src[self.pos].isidentifier() or src[self.pos].isdigit() or src[self.pos] == "_"):
            # isidentifier() is False for digits and for some combining marks
            self.pos += 1
        word = src[start : self.pos]
        if word.lower() in _STRING_PREFIXES and self.pos < len(src) and src[self.pos] in "\"'":
            self.string(start)
            return
        kind = TokenKind.KEYWORD if word in KEYWORDS else TokenKind.IDENTIFIER
        self.emit(kind, start)

    def string(self, start: int) -> None:
        src = self.src
        quote_pos = self.pos
        q = src[quote_pos]
        triple = src.startswith(q * 3, quote_pos)
        delim = q * 3 if triple else q
        prefix = src[start:quote_pos].lower()
        raw = "r" in prefix
        self.pos = quote_pos + len(delim)
        n = len(src)
        while True:
            if self.pos >= n:
                raise self.error("unterminated string", start)
            ch = src[self.pos]
            if ch == "\\" and not (raw and self.pos + 1 >= n):
                if self.pos + 1 < n and src[self.pos + 1] == "\n":
                    self.pos += 2
                    self.newline()
                else:
                    self.pos += 2
                continue
            if src.startswith(delim, self.pos):
                self.pos += len(delim)
                break
            if ch == "\n":
                if not triple:
                    raise self.error("unterminated string", start)
                self.pos += 1
                self.newline()
                continue
            self.pos += 1
        tok_line = src.count("\n", 0, start) + 1
        column = start - (src.rfind("\n", 0, start) + 1)
        self.tokens.append(Token(TokenKind.STRING, src[start : self.pos], tok_line, column, start))

    def punct(self) -> None:
        src = self.src
        start = self.pos
        ch = src[start]
        for op in _OPERATORS:
            if src.startswith(op, start):
                self.pos += len(op)
                self.emit(TokenKind.OPERATOR, start)
                return
        if ch in _DELIMITERS:
            self.pos += 1
            if ch in _OPEN:
                self.brackets.append(ch)
            elif ch in ")]}":
                if not self.brackets or _OPEN[self.brackets[-1]] != ch:
                    raise self.error(f"unmatched {ch!r}", start)
                self.brackets.pop()
            self.emit(TokenKind.DELIMITER, start)
            return
        raise self.error(f"unexpected character {ch!r}", start)


def tokenize(source: str) -> list[Token]:
    """Full token stream, including comments and synthetic Indent/Dedent tokens.

    A Newline token is produced for each ``\\n`` that ends a logical line;
    blank lines, comment-only lines and newlines inside brackets produce none.
    """
    return _Lexer(source).run()


_METRIC_EXCLUDED = frozenset(
    [TokenKind.COMMENT, TokenKind.NEWLINE, TokenKind.INDENT, TokenKind.DEDENT]
)


def metric_tokens(source: str) -> list[str]:
    """Token texts used by the n-gram metrics.

    Comments and layout tokens are dropped. Sources that cannot be tokenized
    fall back to whitespace splitting so that scoring never aborts.
    """
    try:
        toks = tokenize(source)
    except TokenizeError:
        return source.split()
    return [t.text for t in toks if t.kind not in _METRIC_EXCLUDED]
