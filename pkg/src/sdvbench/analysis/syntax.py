"""Recursive-descent parser for the playground scripting language.

The accepted grammar is the statement and expression subset that vehicle
scripts actually use: imports, function/async function and class
definitions, assignments, calls, attribute access, subscripts, control flow,
``await``, operators, literals and comprehensions. Anything else is reported
as a :class:`ParseError` value.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Iterator, NamedTuple, Union

from .tokens import Token, TokenizeError, TokenKind, tokenize

__all__ = [
    "Node",
    "ParseError",
    "Span",
    "extract_subtrees",
    "parse",
    "parses",
    "subtree_label",
]


class Span(NamedTuple):
    start_line: int
    start_col: int
    end_line: int
    end_col: int

    def contains(self, other: "Span") -> bool:
        return (self.start_line, self.start_col) <= (other.start_line, other.start_col) and (
            other.end_line,
            other.end_col,
        ) <= (self.end_line, self.end_col)


@dataclass(frozen=True)
class Node:
    kind: str
    children: tuple["Node", ...] = ()
    text: str | None = None
    span: Span = Span(1, 0, 1, 0)

    def walk(self) -> Iterator["Node"]:
        yield self
        for child in self.children:
            yield from child.walk()

    def sexpr(self) -> str:
        """Compact bracketed rendering, e.g. ``Module[Assign[Name x, Constant 1]]``."""
        head = self.kind if self.text is None else f"{self.kind} {self.text}"
        if not self.children:
            return head
        return f"{head}[{', '.join(c.sexpr() for c in self.children)}]"

    def pretty(self, indent: int = 0) -> str:
        pad = "  " * indent
        head = self.kind if self.text is None else f"{self.kind} {self.text!r}"
        lines = [f"{pad}{head}  @{self.span.start_line}:{self.span.start_col}"]
        lines.extend(c.pretty(indent + 1) for c in self.children)
        return "\n".join(lines)


@dataclass(frozen=True)
class ParseError:
    message: str
    line: int
    column: int

    def __str__(self) -> str:
        return f"parse error at line {self.line}, column {self.column}: {self.message}"


ParseResult = Union[Node, ParseError]


class _Fail(Exception):
    def __init__(self, message: str, tok: Token) -> None:
        super().__init__(message)
        self.message = message
        self.tok = tok


# kind of the end-of-input sentinel; callers test at_eof() before trusting kinds
_EOF = TokenKind.NEWLINE
_AUG_OPS = frozenset("+= -= *= /= //= %= **= >>= <<= &= ^= |= @=".split())
_COMPARE_OPS = frozenset("< > == >= <= !=".split())
# binary operator precedence, lowest first
_BINARY_LEVELS = [("|",), ("^",), ("&",), ("<<", ">>"), ("+", "-"), ("*", "/", "//", "%", "@")]
_SIMPLE_STMT_KW = frozenset(
    "pass break continue return raise import from global nonlocal assert del".split()
)

# nodes whose operator is part of their structural identity
_OP_KINDS = frozenset(["BinOp", "UnaryOp", "BoolOp", "Compare", "AugAssign"])


def _token_end(tok: Token) -> tuple[int, int]:
    nl = tok.text.count("\n")
    if nl:
        return tok.line + nl, len(tok.text) - tok.text.rfind("\n") - 1
    return tok.line, tok.column + len(tok.text)


class _Parser:
    def __init__(self, tokens: list[Token]) -> None:
        toks = [t for t in tokens if t.kind is not TokenKind.COMMENT]
        if toks:
            end_line, end_col = _token_end(toks[-1])
        else:
            end_line, end_col = 1, 0
        self.eof = Token(_EOF, "<eof>", end_line, end_col, -1)
        self.toks = toks
        self.i = 0
        self.prev_end = (1, 0)

    # -- token helpers -------------------------------------------------
    @property
    def tok(self) -> Token:
        return self.toks[self.i] if self.i < len(self.toks) else self.eof

    def peek(self, k: int = 1) -> Token:
        j = self.i + k
        return self.toks[j] if j < len(self.toks) else self.eof

    def at_eof(self) -> bool:
        return self.i >= len(self.toks)

    def advance(self) -> Token:
        tok = self.tok
        if not self.at_eof():
            self.i += 1
            if tok.kind not in (TokenKind.NEWLINE, TokenKind.INDENT, TokenKind.DEDENT):
                self.prev_end = _token_end(tok)
        return tok

    def is_op(self, *texts: str) -> bool:
        t = self.tok
        return t.kind in (TokenKind.OPERATOR, TokenKind.DELIMITER) and t.text in texts

    def is_kw(self, *texts: str) -> bool:
        return self.tok.kind is TokenKind.KEYWORD and self.tok.text in texts

    def is_kind(self, kind: TokenKind) -> bool:
        return not self.at_eof() and self.tok.kind is kind

    def expect_op(self, text: str) -> Token:
        if not self.is_op(text):
            raise self.fail(f"expected {text!r}")
        return self.advance()

    def expect_kw(self, text: str) -> Token:
        if not self.is_kw(text):
            raise self.fail(f"expected {text!r}")
        return self.advance()

    def expect_name(self) -> Token:
        if not self.is_kind(TokenKind.IDENTIFIER):
            raise self.fail("expected identifier")
        return self.advance()

    def fail(self, message: str) -> _Fail:
        t = self.tok
        found = "end of input" if self.at_eof() else repr(t.text or t.kind.value)
        return _Fail(f"{message}, found {found}", t)

    def start(self) -> tuple[int, int]:
        t = self.tok
        return t.line, t.column

    def node(self, kind: str, start: tuple[int, int], children=(), text: str | None = None) -> Node:
        end = self.prev_end
        if end < start:
            end = start
        return Node(kind, tuple(children), text, Span(start[0], start[1], end[0], end[1]))

    # -- statements ----------------------------------------------------
    def module(self) -> Node:
        body: list[Node] = []
        while not self.at_eof():
            if self.is_kind(TokenKind.NEWLINE):
                self.advance()
                continue
            if self.is_kind(TokenKind.INDENT):
                raise self.fail("unexpected indent")
            body.extend(self.statement())
        end = self.prev_end if body else (1, 0)
        return Node("Module", tuple(body), None, Span(1, 0, end[0], end[1]))

    def statement(self) -> list[Node]:
        if self.is_kind(TokenKind.KEYWORD):
            kw = self.tok.text
            if kw == "if":
                return [self.if_stmt()]
            if kw == "while":
                return [self.while_stmt()]
            if kw == "for":
                return [self.for_stmt(self.start(), "For")]
            if kw == "def":
                return [self.funcdef(self.start(), "FunctionDef", [])]
            if kw == "class":
                return [self.classdef(self.start(), [])]
            if kw == "try":
                return [self.try_stmt()]
            if kw == "with":
                return [self.with_stmt(self.start(), "With")]
            if kw == "async":
                return [self.async_stmt()]
        if self.is_op("@"):
            return [self.decorated()]
        return self.simple_line()

    def simple_line(self) -> list[Node]:
        stmts = [self.simple_stmt()]
        while self.is_op(";"):
            self.advance()
            if self.is_kind(TokenKind.NEWLINE) or self.at_eof():
                break
            stmts.append(self.simple_stmt())
        self.end_of_line()
        return stmts

    def end_of_line(self) -> None:
        if self.at_eof():
            return
        if self.is_kind(TokenKind.NEWLINE):
            self.advance()
            return
        if self.is_kind(TokenKind.DEDENT):
            return
        raise self.fail("expected end of line")

    def block(self) -> list[Node]:
        self.expect_op(":")
        if not self.is_kind(TokenKind.NEWLINE):
            return self.simple_line()
        self.advance()
        if not self.is_kind(TokenKind.INDENT):
            raise self.fail("expected an indented block")
        self.advance()
        body: list[Node] = []
        while not self.is_kind(TokenKind.DEDENT):
            if self.at_eof():
                break
            if self.is_kind(TokenKind.NEWLINE):
                self.advance()
                continue
            if self.is_kind(TokenKind.INDENT):
                raise self.fail("unexpected indent")
            body.extend(self.statement())
        if self.is_kind(TokenKind.DEDENT):
            self.advance()
        return body

    def if_stmt(self) -> Node:
        start = self.start()
        self.advance()  # 'if' or 'elif'
        test = self.namedexpr_test()
        body = self.block()
        children = [test, *body]
        if self.is_kw("elif"):
            estart = self.start()
            nested = self.if_stmt()
            children.append(self.node("Else", estart, [nested]))
        elif self.is_kw("else"):
            children.append(self.else_clause())
        return self.node("If", start, children)

    def else_clause(self, kind: str = "Else") -> Node:
        start = self.start()
        self.advance()
        return self.node(kind, start, self.block())

    def while_stmt(self) -> Node:
        start = self.start()
        self.advance()
        test = self.namedexpr_test()
        children = [test, *self.block()]
        if self.is_kw("else"):
            children.append(self.else_clause())
        return self.node("While", start, children)

    def for_stmt(self, start: tuple[int, int], kind: str) -> Node:
        self.expect_kw("for")
        target = self.target_list()
        self.expect_kw("in")
        it = self.testlist()
        children = [target, it, *self.block()]
        if self.is_kw("else"):
            children.append(self.else_clause())
        return self.node(kind, start, children)

    def with_stmt(self, start: tuple[int, int], kind: str) -> Node:
        self.expect_kw("with")
        items = [self.with_item()]
        while self.is_op(","):
            self.advance()
            items.append(self.with_item())
        return self.node(kind, start, [*items, *self.block()])

    def with_item(self) -> Node:
        start = self.start()
        children = [self.test()]
        if self.is_kw("as"):
            self.advance()
            children.append(self.target())
        return self.node("withitem", start, children)

    def async_stmt(self) -> Node:
        start = self.start()
        self.advance()
        if self.is_kw("def"):
            return self.funcdef(start, "AsyncFunctionDef", [])
        if self.is_kw("for"):
            return self.for_stmt(start, "AsyncFor")
        if self.is_kw("with"):
            return self.with_stmt(start, "AsyncWith")
        raise self.fail("expected 'def', 'for' or 'with' after 'async'")

    def decorated(self) -> Node:
        start = self.start()
        decorators = []
        while self.is_op("@"):
            dstart = self.start()
            self.advance()
            expr = self.namedexpr_test()
            decorators.append(self.node("Decorator", dstart, [expr]))
            if not self.is_kind(TokenKind.NEWLINE):
                raise self.fail("expected newline after decorator")
            self.advance()
        if self.is_kw("def"):
            return self.funcdef(start, "FunctionDef", decorators)
        if self.is_kw("class"):
            return self.classdef(start, decorators)
        if self.is_kw("async") and self.peek().text == "def":
            self.advance()
            return self.funcdef(start, "AsyncFunctionDef", decorators)
        raise self.fail("expected definition after decorator")

    def funcdef(self, start: tuple[int, int], kind: str, decorators: list[Node]) -> Node:
        self.expect_kw("def")
        name = self.expect_name().text
        self.expect_op("(")
        params = self.parameters(")")
        self.expect_op(")")
        children = list(decorators)
        if params is not None:
            children.append(params)
        if self.is_op("->"):
            rstart = self.start()
            self.advance()
            ann = self.test()
            children.append(self.node("Returns", rstart, [ann]))
        children.extend(self.block())
        return self.node(kind, start, children, name)

    def parameters(self, closer: str) -> Node | None:
        """Parameter list up to ``closer``; ``None`` when there are no parameters."""
        if self.is_op(closer):
            return None
        start = self.start()
        args = []
        while True:
            astart = self.start()
            if self.is_op("/"):
                self.advance()
                args.append(self.node("PosOnlyMarker", astart))
            elif self.is_op("*", "**"):
                star = self.advance().text
                if self.is_kind(TokenKind.IDENTIFIER):
                    args.append(self.param(astart, "vararg" if star == "*" else "kwarg", closer))
                elif star == "*":
                    args.append(self.node("KwOnlyMarker", astart))
                else:
                    raise self.fail("expected parameter name")
            else:
                args.append(self.param(astart, "arg", closer))
            if not self.is_op(","):
                break
            self.advance()
            if self.is_op(closer):
                break
        return self.node("arguments", start, args)

    def param(self, start: tuple[int, int], kind: str, closer: str) -> Node:
        name = self.expect_name().text
        children = []
        # lambda parameters cannot carry annotations
        if closer == ")" and self.is_op(":"):
            self.advance()
            children.append(self.test())
        if self.is_op("="):
            self.advance()
            children.append(self.test())
        return self.node(kind, start, children, name)

    def classdef(self, start: tuple[int, int], decorators: list[Node]) -> Node:
        self.expect_kw("class")
        name = self.expect_name().text
        children = list(decorators)
        if self.is_op("("):
            bstart = self.start()
            self.advance()
            args = self.call_args()
            self.expect_op(")")
            if args:
                children.append(self.node("bases", bstart, args))
        children.extend(self.block())
        return self.node("ClassDef", start, children, name)

    def try_stmt(self) -> Node:
        start = self.start()
        self.advance()
        children = list(self.block())
        handlers = 0
        while self.is_kw("except"):
            hstart = self.start()
            self.advance()
            hchildren = []
            name = None
            if not self.is_op(":"):
                hchildren.append(self.test())
                if self.is_kw("as"):
                    self.advance()
                    name = self.expect_name().text
            hchildren.extend(self.block())
            children.append(self.node("ExceptHandler", hstart, hchildren, name))
            handlers += 1
        if handlers and self.is_kw("else"):
            children.append(self.else_clause())
        has_finally = self.is_kw("finally")
        if has_finally:
            children.append(self.else_clause("Finally"))
        if not handlers and not has_finally:
            raise self.fail("expected 'except' or 'finally'")
        return self.node("Try", start, children)

    def simple_stmt(self) -> Node:
        start = self.start()
        if self.is_kind(TokenKind.KEYWORD) and self.tok.text in _SIMPLE_STMT_KW:
            kw = self.advance().text
            if kw == "pass":
                return self.node("Pass", start)
            if kw == "break":
                return self.node("Break", start)
            if kw == "continue":
                return self.node("Continue", start)
            if kw == "return":
                value = [] if self.at_stmt_end() else [self.testlist_star()]
                return self.node("Return", start, value)
            if kw == "raise":
                children = []
                if not self.at_stmt_end():
                    children.append(self.test())
                    if self.is_kw("from"):
                        self.advance()
                        children.append(self.test())
                return self.node("Raise", start, children)
            if kw == "import":
                return self.import_names(start)
            if kw == "from":
                return self.import_from(start)
            if kw in ("global", "nonlocal"):
                names = [self.name_node()]
                while self.is_op(","):
                    self.advance()
                    names.append(self.name_node())
                return self.node(kw.capitalize(), start, names)
            if kw == "assert":
                children = [self.test()]
                if self.is_op(","):
                    self.advance()
                    children.append(self.test())
                return self.node("Assert", start, children)
            if kw == "del":
                return self.node("Delete", start, self.exprlist())
        return self.expr_stmt(start)

    def at_stmt_end(self) -> bool:
        return self.at_eof() or self.is_kind(TokenKind.NEWLINE) or self.is_kind(TokenKind.DEDENT) or self.is_op(";")

    def name_node(self) -> Node:
        start = self.start()
        name = self.expect_name().text
        return self.node("Name", start, text=name)

    def dotted_name(self) -> str:
        parts = [self.expect_name().text]
        while self.is_op("."):
            self.advance()
            parts.append(self.expect_name().text)
        return ".".join(parts)

    def alias(self, dotted: bool) -> Node:
        start = self.start()
        name = self.dotted_name() if dotted else self.expect_name().text
        children = []
        if self.is_kw("as"):
            self.advance()
            children.append(self.name_node())
        return self.node("alias", start, children, name)

    def import_names(self, start: tuple[int, int]) -> Node:
        names = [self.alias(True)]
        while self.is_op(","):
            self.advance()
            names.append(self.alias(True))
        return self.node("Import", start, names)

    def import_from(self, start: tuple[int, int]) -> Node:
        module = ""
        while self.is_op("."):
            self.advance()
            module += "."
        if not self.is_kw("import"):
            module += self.dotted_name()
        self.expect_kw("import")
        if self.is_op("*"):
            astart = self.start()
            self.advance()
            return self.node("ImportFrom", start, [self.node("alias", astart, text="*")], module)
        paren = self.is_op("(")
        if paren:
            self.advance()
        names = [self.alias(False)]
        while self.is_op(","):
            self.advance()
            if paren and self.is_op(")"):
                break
            names.append(self.alias(False))
        if paren:
            self.expect_op(")")
        return self.node("ImportFrom", start, names, module)

    def expr_stmt(self, start: tuple[int, int]) -> Node:
        first = self.testlist_star()
        if self.is_op("="):
            targets = [first]
            while self.is_op("="):
                self.advance()
                targets.append(self.yield_or_testlist())
            value = targets.pop()
            for t in targets:
                self.check_target(t)
            return self.node("Assign", start, [*targets, value])
        if self.is_kind(TokenKind.OPERATOR) and self.tok.text in _AUG_OPS:
            op = self.advance().text
            self.check_target(first, single=True)
            value = self.yield_or_testlist()
            return self.node("AugAssign", start, [first, value], op)
        if self.is_op(":"):
            self.check_target(first, single=True)
            self.advance()
            children = [first, self.test()]
            if self.is_op("="):
                self.advance()
                children.append(self.yield_or_testlist())
            return self.node("AnnAssign", start, children)
        return self.node("Expr", start, [first])

    def yield_or_testlist(self) -> Node:
        return self.testlist_star()

    def check_target(self, node: Node, single: bool = False) -> None:
        if node.kind in ("Name", "Attribute", "Subscript"):
            return
        if not single and node.kind in ("Tuple", "List"):
            for c in node.children:
                self.check_target(c)
            return
        if not single and node.kind == "Starred":
            self.check_target(node.children[0])
            return
        raise _Fail(f"cannot assign to {node.kind}", Token(TokenKind.OPERATOR, "", node.span.start_line, node.span.start_col, 0))

    # -- expressions ---------------------------------------------------
    def testlist_star(self) -> Node:
        start = self.start()
        first = self.star_or_test()
        if not self.is_op(","):
            return first
        items = [first]
        while self.is_op(","):
            self.advance()
            if self.at_expr_end():
                break
            items.append(self.star_or_test())
        return self.node("Tuple", start, items)

    testlist = testlist_star

    def at_expr_end(self) -> bool:
        return self.at_stmt_end() or self.is_op("=", ")", "]", "}", ":") or (
            self.is_kind(TokenKind.OPERATOR) and self.tok.text in _AUG_OPS
        )

    def star_or_test(self) -> Node:
        if self.is_op("*"):
            start = self.start()
            self.advance()
            return self.node("Starred", start, [self.expr()])
        return self.namedexpr_test()

    def exprlist(self) -> list[Node]:
        items = [self.star_expr()]
        while self.is_op(","):
            self.advance()
            if self.at_expr_end() or self.is_kw("in"):
                break
            items.append(self.star_expr())
        return items

    def star_expr(self) -> Node:
        if self.is_op("*"):
            start = self.start()
            self.advance()
            return self.node("Starred", start, [self.expr()])
        return self.expr()

    def target_list(self) -> Node:
        start = self.start()
        items = self.exprlist()
        for t in items:
            self.check_target(t)
        if len(items) == 1 and not self.prev_was_comma():
            return items[0]
        return self.node("Tuple", start, items)

    def prev_was_comma(self) -> bool:
        prev = self.toks[self.i - 1] if self.i > 0 else None
        return prev is not None and prev.text == ","

    def target(self) -> Node:
        node = self.expr()
        self.check_target(node)
        return node

    def namedexpr_test(self) -> Node:
        start = self.start()
        if self.is_kind(TokenKind.IDENTIFIER) and self.peek().text == ":=":
            target = self.name_node()
            self.advance()
            value = self.test()
            return self.node("NamedExpr", start, [target, value])
        return self.test()

    def test(self) -> Node:
        if self.is_kw("lambda"):
            return self.lambdef()
        start = self.start()
        body = self.or_test()
        if self.is_kw("if"):
            self.advance()
            cond = self.or_test()
            self.expect_kw("else")
            orelse = self.test()
            return self.node("IfExp", start, [cond, body, orelse])
        return body

    def test_nocond(self) -> Node:
        return self.or_test()

    def lambdef(self) -> Node:
        start = self.start()
        self.advance()
        children = []
        params = self.parameters(":")
        if params is not None:
            children.append(params)
        self.expect_op(":")
        children.append(self.test())
        return self.node("Lambda", start, children)

    def or_test(self) -> Node:
        return self._bool_chain("or", self.and_test)

    def and_test(self) -> Node:
        return self._bool_chain("and", self.not_test)

    def _bool_chain(self, op: str, sub) -> Node:
        start = self.start()
        first = sub()
        if not self.is_kw(op):
            return first
        values = [first]
        while self.is_kw(op):
            self.advance()
            values.append(sub())
        return self.node("BoolOp", start, values, op)

    def not_test(self) -> Node:
        if self.is_kw("not"):
            start = self.start()
            self.advance()
            return self.node("UnaryOp", start, [self.not_test()], "not")
        return self.comparison()

    def comp_op(self) -> str | None:
        t = self.tok
        if t.kind is TokenKind.OPERATOR and t.text in _COMPARE_OPS:
            self.advance()
            return t.text
        if self.is_kw("in"):
            self.advance()
            return "in"
        if self.is_kw("not") and self.peek().text == "in" and self.peek().kind is TokenKind.KEYWORD:
            self.advance()
            self.advance()
            return "not in"
        if self.is_kw("is"):
            self.advance()
            if self.is_kw("not"):
                self.advance()
                return "is not"
            return "is"
        return None

    def comparison(self) -> Node:
        start = self.start()
        left = self.expr()
        ops = []
        comparators = []
        while (op := self.comp_op()) is not None:
            ops.append(op)
            comparators.append(self.expr())
        if not ops:
            return left
        return self.node("Compare", start, [left, *comparators], " ".join(ops))

    def expr(self, level: int = 0) -> Node:
        if level == len(_BINARY_LEVELS):
            return self.factor()
        start = self.start()
        left = self.expr(level + 1)
        ops = _BINARY_LEVELS[level]
        while self.is_kind(TokenKind.OPERATOR) and self.tok.text in ops:
            op = self.advance().text
            right = self.expr(level + 1)
            left = self.node("BinOp", start, [left, right], op)
        return left

    def factor(self) -> Node:
        if self.is_kind(TokenKind.OPERATOR) and self.tok.text in ("+", "-", "~"):
            start = self.start()
            op = self.advance().text
            return self.node("UnaryOp", start, [self.factor()], op)
        return self.power()

    def power(self) -> Node:
        start = self.start()
        base = self.await_primary()
        if self.is_op("**"):
            self.advance()
            exp = self.factor()
            return self.node("BinOp", start, [base, exp], "**")
        return base

    def await_primary(self) -> Node:
        if self.is_kw("await"):
            start = self.start()
            self.advance()
            return self.node("Await", start, [self.primary()])
        return self.primary()

    def primary(self) -> Node:
        start = self.start()
        node = self.atom()
        while True:
            if self.is_op("."):
                self.advance()
                name = self.expect_name().text
                node = self.node("Attribute", start, [node], name)
            elif self.is_op("("):
                self.advance()
                args = self.call_args()
                self.expect_op(")")
                node = self.node("Call", start, [node, *args])
            elif self.is_op("["):
                self.advance()
                index = self.subscript_list()
                self.expect_op("]")
                node = self.node("Subscript", start, [node, index])
            else:
                return node

    def call_args(self) -> list[Node]:
        args: list[Node] = []
        while not self.is_op(")"):
            astart = self.start()
            if self.is_op("*"):
                self.advance()
                args.append(self.node("Starred", astart, [self.test()]))
            elif self.is_op("**"):
                self.advance()
                args.append(self.node("keyword", astart, [self.test()]))
            elif self.is_kind(TokenKind.IDENTIFIER) and self.peek().text == "=":
                name = self.advance().text
                self.advance()
                args.append(self.node("keyword", astart, [self.test()], name))
            else:
                value = self.namedexpr_test()
                if self.is_kw("for", "async"):
                    value = self.node("GeneratorExp", astart, [value, *self.comprehensions()])
                args.append(value)
            if not self.is_op(","):
                break
            self.advance()
        return args

    def subscript_list(self) -> Node:
        start = self.start()
        first = self.subscript()
        if not self.is_op(","):
            return first
        items = [first]
        while self.is_op(","):
            self.advance()
            if self.is_op("]"):
                break
            items.append(self.subscript())
        return self.node("Tuple", start, items)

    def subscript(self) -> Node:
        start = self.start()
        lower = None if self.is_op(":") else self.test()
        if not self.is_op(":"):
            if lower is None:
                raise self.fail("expected expression")
            return lower
        self.advance()
        parts = [lower]
        upper = None if self.is_op(":", "]", ",") else self.test()
        parts.append(upper)
        step = None
        if self.is_op(":"):
            self.advance()
            step = None if self.is_op("]", ",") else self.test()
        parts.append(step)
        shape = "".join("x" if p is not None else "_" for p in parts)
        return self.node("Slice", start, [p for p in parts if p is not None], shape)

    def comprehensions(self) -> list[Node]:
        comps = []
        while self.is_kw("for", "async"):
            start = self.start()
            is_async = self.is_kw("async")
            if is_async:
                self.advance()
            self.expect_kw("for")
            target = self.target_list()
            self.expect_kw("in")
            it = self.or_test()
            ifs = []
            while self.is_kw("if"):
                self.advance()
                ifs.append(self.test_nocond())
            comps.append(self.node("comprehension", start, [target, it, *ifs], "async" if is_async else None))
        return comps

    def atom(self) -> Node:
        t = self.tok
        start = self.start()
        if self.at_eof():
            raise self.fail("expected expression")
        if t.kind is TokenKind.IDENTIFIER:
            self.advance()
            return self.node("Name", start, text=t.text)
        if t.kind is TokenKind.NUMBER:
            self.advance()
            return self.node("Constant", start, text=t.text)
        if t.kind is TokenKind.STRING:
            parts = []
            while self.is_kind(TokenKind.STRING):
                parts.append(self.advance().text)
            return self.node("Constant", start, text=" ".join(parts))
        if t.kind is TokenKind.KEYWORD and t.text in ("None", "True", "False"):
            self.advance()
            return self.node("Constant", start, text=t.text)
        if self.is_op("."):
            if self.peek().text == "." and self.peek(2).text == ".":
                self.advance()
                self.advance()
                self.advance()
                return self.node("Constant", start, text="...")
            raise self.fail("expected expression")
        if self.is_op("("):
            return self.paren()
        if self.is_op("["):
            return self.list_display()
        if self.is_op("{"):
            return self.brace_display()
        raise self.fail("expected expression")

    def paren(self) -> Node:
        start = self.start()
        self.advance()
        if self.is_op(")"):
            self.advance()
            return self.node("Tuple", start)
        if self.is_kw("yield"):
            raise self.fail("yield expressions are not supported")
        first = self.star_or_test()
        if self.is_kw("for", "async"):
            comps = self.comprehensions()
            self.expect_op(")")
            return self.node("GeneratorExp", start, [first, *comps])
        if self.is_op(")"):
            self.advance()
            return first
        items = [first]
        while self.is_op(","):
            self.advance()
            if self.is_op(")"):
                break
            items.append(self.star_or_test())
        self.expect_op(")")
        return self.node("Tuple", start, items)

    def list_display(self) -> Node:
        start = self.start()
        self.advance()
        if self.is_op("]"):
            self.advance()
            return self.node("List", start)
        first = self.star_or_test()
        if self.is_kw("for", "async"):
            comps = self.comprehensions()
            self.expect_op("]")
            return self.node("ListComp", start, [first, *comps])
        items = [first]
        while self.is_op(","):
            self.advance()
            if self.is_op("]"):
                break
            items.append(self.star_or_test())
        self.expect_op("]")
        return self.node("List", start, items)

    def brace_display(self) -> Node:
        start = self.start()
        self.advance()
        if self.is_op("}"):
            self.advance()
            return self.node("Dict", start)
        if self.is_op("**"):
            return self.dict_rest(start, [self.dict_unpack()])
        first = self.star_or_test()
        if self.is_op(":"):
            self.advance()
            value = self.test()
            if self.is_kw("for", "async"):
                comps = self.comprehensions()
                self.expect_op("}")
                return self.node("DictComp", start, [first, value, *comps])
            return self.dict_rest(start, [first, value])
        if self.is_kw("for", "async"):
            comps = self.comprehensions()
            self.expect_op("}")
            return self.node("SetComp", start, [first, *comps])
        items = [first]
        while self.is_op(","):
            self.advance()
            if self.is_op("}"):
                break
            items.append(self.star_or_test())
        self.expect_op("}")
        return self.node("Set", start, items)

    def dict_unpack(self) -> Node:
        start = self.start()
        self.expect_op("**")
        return self.node("Starred", start, [self.expr()], "**")

    def dict_rest(self, start: tuple[int, int], items: list[Node]) -> Node:
        while self.is_op(","):
            self.advance()
            if self.is_op("}"):
                break
            if self.is_op("**"):
                items.append(self.dict_unpack())
                continue
            items.append(self.test())
            self.expect_op(":")
            items.append(self.test())
        self.expect_op("}")
        return self.node("Dict", start, items)


def parse(source: str) -> ParseResult:
    """Parse ``source`` into a :class:`Node` tree, or return a :class:`ParseError`.

    Never raises for bad input: tokenizer failures, grammar violations and
    pathological nesting all come back as ``ParseError`` values.
    """
    try:
        tokens = tokenize(source)
    except TokenizeError as exc:
        return ParseError(exc.message, exc.line, exc.column)
    parser = _Parser(tokens)
    try:
        return parser.module()
    except _Fail as exc:
        return ParseError(exc.message, exc.tok.line, exc.tok.column)
    except RecursionError:
        tok = parser.tok
        return ParseError("nesting too deep", tok.line, tok.column)


def parses(source: str) -> bool:
    return isinstance(parse(source), Node)


def subtree_label(node: Node) -> str:
    """Structural label of a node; identifier and literal texts are dropped."""
    if node.kind in _OP_KINDS and node.text is not None:
        return f"{node.kind}:{node.text}"
    if node.kind == "Slice":
        return f"Slice:{node.text}"
    return node.kind


def extract_subtrees(tree: Node) -> Counter[str]:
    """Multiset of depth-one subtrees, one per node that has children.

    Each element is rendered as ``Label(ChildLabel, ...)``.
    """
    out: Counter[str] = Counter()
    for node in tree.walk():
        if node.children:
            inner = ", ".join(subtree_label(c) for c in node.children)
            out[f"{subtree_label(node)}({inner})"] += 1
    return out
