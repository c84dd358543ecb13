"""Intraprocedural def-use analysis over parsed scripts.

Reaching definitions are computed by a forward scan of each scope. Branch
arms are analysed on copies of the incoming state and merged by union; loop
bodies are iterated to a fixpoint so that uses can be reached by definitions
from a previous iteration. Calls are opaque: no flow is modelled through
them.

Variables are renamed positionally by order of first definition, so the
graph is invariant under consistent renaming of identifiers.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Dict, FrozenSet, List, Tuple

from .syntax import Node

__all__ = ["DataflowGraph", "Site", "extract_dataflow"]

Site = Tuple[int, int]
_Var = Tuple[int, str]  # (scope id, name)
_State = Dict[_Var, FrozenSet[Site]]

_SCOPE_KINDS = frozenset(["FunctionDef", "AsyncFunctionDef", "Lambda", "ClassDef"])


@dataclass(frozen=True)
class DataflowGraph:
    defs: tuple[tuple[str, Site], ...]
    uses: tuple[tuple[str, Site], ...]
    edges: tuple[tuple[Site, Site], ...]

    def edge_keys(self) -> Counter[tuple[str, int, int]]:
        """Layout-independent edge multiset used for matching.

        An edge is keyed by its normalized variable together with the ordinal
        of its definition among that variable's definitions and the ordinal
        of its use among that variable's uses.
        """
        def_ord: dict[Site, tuple[str, int]] = {}
        use_ord: dict[Site, int] = {}
        counts: Counter[str] = Counter()
        for var, site in self.defs:
            def_ord[site] = (var, counts[var])
            counts[var] += 1
        counts = Counter()
        for var, site in self.uses:
            use_ord[site] = counts[var]
            counts[var] += 1
        keys: Counter[tuple[str, int, int]] = Counter()
        for use_site, def_site in self.edges:
            var, d = def_ord[def_site]
            keys[(var, d, use_ord[use_site])] += 1
        return keys

    def describe(self) -> list[str]:
        by_site = {site: var for var, site in (*self.defs, *self.uses)}
        return [
            f"{by_site[u]} use@{u[0]}:{u[1]} <- def@{d[0]}:{d[1]}" for u, d in self.edges
        ]


class _Analyzer:
    def __init__(self) -> None:
        self.defs: list[tuple[_Var, Site]] = []
        self.uses: list[tuple[_Var, Site]] = []
        self.edges: set[tuple[Site, Site]] = set()
        self.scopes = 0
        # enclosing scope of each scope; module scope has none
        self.parent: dict[int, int | None] = {0: None}
        # all definitions recorded so far per variable, for free-variable lookups
        self.all_defs: dict[_Var, set[Site]] = {}
        self.local_names: dict[int, set[str]] = {0: set()}
        self.pending_free: list[tuple[int, str, Site]] = []

    # -- bookkeeping ---------------------------------------------------
    def new_scope(self, parent: int) -> int:
        self.scopes += 1
        self.parent[self.scopes] = parent
        self.local_names[self.scopes] = set()
        return self.scopes

    def define(self, scope: int, name: str, site: Site, state: _State) -> None:
        var = (scope, name)
        if (var, site) not in self._def_set:
            self.defs.append((var, site))
            self._def_set.add((var, site))
        self.all_defs.setdefault(var, set()).add(site)
        state[var] = frozenset([site])

    def use(self, scope: int, name: str, site: Site, state: _State) -> None:
        var = (scope, name)
        reaching = state.get(var)
        if reaching is None and name not in self.local_names[scope]:
            self.pending_free.append((scope, name, site))
            return
        if (var, site) not in self._use_set:
            self.uses.append((var, site))
            self._use_set.add((var, site))
        for d in reaching or ():
            self.edges.add((site, d))

    # -- traversal -----------------------------------------------------
    def run(self, tree: Node) -> DataflowGraph:
        self._def_set: set = set()
        self._use_set: set = set()
        self.collect_locals(tree.children, 0)
        self.block(tree.children, 0, {})
        self.resolve_free()
        return self.normalize()

    def collect_locals(self, body, scope: int) -> None:
        """Names bound anywhere in a scope (so uses before binding stay local)."""
        names = self.local_names[scope]
        stack = list(body)
        while stack:
            node = stack.pop()
            if node.kind in _SCOPE_KINDS:
                if node.text:
                    names.add(node.text)
                continue
            for target in _bound_names(node):
                names.add(target)
            stack.extend(node.children)

    def block(self, stmts, scope: int, state: _State) -> _State:
        for stmt in stmts:
            state = self.stmt(stmt, scope, state)
        return state

    def stmt(self, node: Node, scope: int, state: _State) -> _State:
        k = node.kind
        ch = node.children
        if k in ("Assign", "AnnAssign"):
            if k == "Assign":
                targets, value = ch[:-1], ch[-1]
            else:
                targets, value = ch[:1], (ch[2] if len(ch) > 2 else None)
                self.expr(ch[1], scope, state)
            if value is not None:
                self.expr(value, scope, state)
            if k == "Assign" or value is not None:
                for t in targets:
                    self.assign_target(t, scope, state)
            return state
        if k == "AugAssign":
            target, value = ch
            self.expr(value, scope, state)
            self.expr(target, scope, state)
            self.assign_target(target, scope, state)
            return state
        if k == "If":
            test, rest = ch[0], ch[1:]
            self.expr(test, scope, state)
            orelse = rest[-1] if rest and rest[-1].kind == "Else" else None
            body = rest[:-1] if orelse is not None else rest
            out_body = self.block(body, scope, dict(state))
            out_else = self.block(orelse.children, scope, dict(state)) if orelse else state
            return _merge(out_body, out_else)
        if k == "While":
            test, rest = ch[0], ch[1:]
            orelse = rest[-1] if rest and rest[-1].kind == "Else" else None
            body = rest[:-1] if orelse is not None else rest

            def one_pass(s: _State) -> _State:
                self.expr(test, scope, s)
                return self.block(body, scope, dict(s))

            state = self.loop(state, one_pass)
            self.expr(test, scope, state)
            if orelse is not None:
                state = _merge(state, self.block(orelse.children, scope, dict(state)))
            return state
        if k in ("For", "AsyncFor"):
            target, it, rest = ch[0], ch[1], ch[2:]
            orelse = rest[-1] if rest and rest[-1].kind == "Else" else None
            body = rest[:-1] if orelse is not None else rest
            self.expr(it, scope, state)

            def one_pass(s: _State) -> _State:
                s = dict(s)
                self.assign_target(target, scope, s)
                return self.block(body, scope, s)

            state = self.loop(state, one_pass)
            if orelse is not None:
                state = _merge(state, self.block(orelse.children, scope, dict(state)))
            return state
        if k in ("With", "AsyncWith"):
            for item in ch:
                if item.kind == "withitem":
                    self.expr(item.children[0], scope, state)
                    if len(item.children) > 1:
                        self.assign_target(item.children[1], scope, state)
                else:
                    state = self.stmt(item, scope, state)
            return state
        if k == "Try":
            body = [c for c in ch if c.kind not in ("ExceptHandler", "Else", "Finally")]
            handlers = [c for c in ch if c.kind == "ExceptHandler"]
            orelse = next((c for c in ch if c.kind == "Else"), None)
            final = next((c for c in ch if c.kind == "Finally"), None)
            after_body = self.block(body, scope, dict(state))
            # an exception may be raised anywhere in the body
            entry = _merge(state, after_body)
            outs = [self.block(orelse.children, scope, dict(after_body)) if orelse else after_body]
            for h in handlers:
                hs = dict(entry)
                hbody = list(h.children)
                if hbody and hbody[0].kind not in _STMT_KINDS:
                    self.expr(hbody.pop(0), scope, hs)
                if h.text:
                    self.define(scope, h.text, (h.span.start_line, h.span.start_col), hs)
                outs.append(self.block(hbody, scope, hs))
            merged = outs[0]
            for o in outs[1:]:
                merged = _merge(merged, o)
            if final is not None:
                merged = self.block(final.children, scope, merged)
            return merged
        if k in ("FunctionDef", "AsyncFunctionDef", "ClassDef"):
            self.definition(node, scope, state)
            return state
        if k == "Import":
            for alias in ch:
                name = alias.children[0].text if alias.children else alias.text.split(".")[0]
                self.define(scope, name, _alias_site(alias), state)
            return state
        if k == "ImportFrom":
            for alias in ch:
                if alias.text == "*":
                    continue
                name = alias.children[0].text if alias.children else alias.text
                self.define(scope, name, _alias_site(alias), state)
            return state
        if k == "Delete":
            for t in ch:
                if t.kind != "Name":
                    self.expr(t, scope, state)
            return state
        if k in ("Global", "Nonlocal", "Pass", "Break", "Continue"):
            return state
        # Expr, Return, Raise, Assert and anything expression-like
        for c in ch:
            self.expr(c, scope, state)
        return state

    def loop(self, state: _State, one_pass) -> _State:
        current = dict(state)
        while True:
            after = one_pass(current)
            merged = _merge(current, after)
            if merged == current:
                return merged
            current = merged

    def definition(self, node: Node, scope: int, state: _State) -> None:
        inner = self.new_scope(scope)
        inner_state: _State = {}
        body = []
        for c in node.children:
            if c.kind == "Decorator":
                self.expr(c.children[0], scope, state)
            elif c.kind == "arguments":
                for arg in c.children:
                    # annotations and defaults are evaluated in the enclosing scope
                    for sub in arg.children:
                        self.expr(sub, scope, state)
                    if arg.text:
                        self.local_names[inner].add(arg.text)
                        self.define(inner, arg.text, (arg.span.start_line, arg.span.start_col), inner_state)
            elif c.kind in ("Returns", "bases"):
                for sub in c.children:
                    self.expr(sub, scope, state)
            else:
                body.append(c)
        if node.text:
            self.define(scope, node.text, (node.span.start_line, node.span.start_col), state)
        self.collect_locals(body, inner)
        self.block(body, inner, inner_state)

    def lambda_expr(self, node: Node, scope: int, state: _State) -> None:
        inner = self.new_scope(scope)
        inner_state: _State = {}
        for c in node.children[:-1]:
            for arg in c.children:
                for sub in arg.children:
                    self.expr(sub, scope, state)
                if arg.text:
                    self.local_names[inner].add(arg.text)
                    self.define(inner, arg.text, (arg.span.start_line, arg.span.start_col), inner_state)
        self.expr(node.children[-1], inner, inner_state)

    def comprehension(self, node: Node, scope: int, state: _State) -> None:
        comps = [c for c in node.children if c.kind == "comprehension"]
        elts = [c for c in node.children if c.kind != "comprehension"]
        inner = self.new_scope(scope)
        inner_state: _State = {}
        for i, comp in enumerate(comps):
            target, it, *ifs = comp.children
            # the first iterable is evaluated in the enclosing scope
            self.expr(it, scope if i == 0 else inner, state if i == 0 else inner_state)
            for name in _target_names(target):
                self.local_names[inner].add(name)
            self.assign_target(target, inner, inner_state)
            for cond in ifs:
                self.expr(cond, inner, inner_state)
        for e in elts:
            self.expr(e, inner, inner_state)

    def assign_target(self, node: Node, scope: int, state: _State) -> None:
        if node.kind == "Name":
            self.define(scope, node.text, (node.span.start_line, node.span.start_col), state)
        elif node.kind in ("Tuple", "List"):
            for c in node.children:
                self.assign_target(c, scope, state)
        elif node.kind == "Starred":
            self.assign_target(node.children[0], scope, state)
        else:
            # attribute/subscript stores read their base object
            self.expr(node, scope, state)

    def expr(self, node: Node, scope: int, state: _State) -> None:
        k = node.kind
        if k == "Name":
            self.use(scope, node.text, (node.span.start_line, node.span.start_col), state)
            return
        if k == "NamedExpr":
            self.expr(node.children[1], scope, state)
            self.assign_target(node.children[0], scope, state)
            return
        if k == "Lambda":
            self.lambda_expr(node, scope, state)
            return
        if k in ("ListComp", "SetComp", "DictComp", "GeneratorExp"):
            self.comprehension(node, scope, state)
            return
        if k in ("BoolOp", "IfExp"):
            # short-circuit: later operands may or may not run
            for c in node.children:
                self.expr(c, scope, state)
            return
        for c in node.children:
            self.expr(c, scope, state)

    def resolve_free(self) -> None:
        """Link uses of free variables to every definition in an enclosing scope."""
        for scope, name, site in self.pending_free:
            outer = self.parent[scope]
            while outer is not None and name not in self.local_names[outer]:
                outer = self.parent[outer]
            if outer is None:
                continue  # builtin or unknown global
            var = (outer, name)
            defs = self.all_defs.get(var)
            if not defs:
                continue
            self.uses.append((var, site))
            for d in defs:
                self.edges.add((site, d))

    def normalize(self) -> DataflowGraph:
        defs = sorted(self.defs, key=lambda p: p[1])
        order: dict[_Var, str] = {}
        for var, _ in defs:
            if var not in order:
                order[var] = f"var{len(order)}"
        uses = sorted((u for u in self.uses if u[0] in order), key=lambda p: p[1])
        return DataflowGraph(
            defs=tuple((order[v], s) for v, s in defs),
            uses=tuple((order[v], s) for v, s in uses),
            edges=tuple(sorted(self.edges)),
        )


_STMT_KINDS = frozenset(
    """Assign AnnAssign AugAssign If While For AsyncFor With AsyncWith Try FunctionDef
    AsyncFunctionDef ClassDef Import ImportFrom Delete Global Nonlocal Pass Break Continue
    Expr Return Raise Assert""".split()
)


def _alias_site(alias: Node) -> Site:
    target = alias.children[0] if alias.children else alias
    return target.span.start_line, target.span.start_col


def _target_names(node: Node) -> list[str]:
    if node.kind == "Name":
        return [node.text]
    if node.kind in ("Tuple", "List", "Starred"):
        return [n for c in node.children for n in _target_names(c)]
    return []


def _bound_names(node: Node) -> list[str]:
    k = node.kind
    if k == "Assign":
        return [n for t in node.children[:-1] for n in _target_names(t)]
    if k in ("AugAssign", "AnnAssign"):
        return _target_names(node.children[0])
    if k in ("For", "AsyncFor"):
        return _target_names(node.children[0])
    if k == "withitem" and len(node.children) > 1:
        return _target_names(node.children[1])
    if k == "NamedExpr":
        return _target_names(node.children[0])
    if k == "ExceptHandler" and node.text:
        return [node.text]
    if k == "Import":
        return [a.children[0].text if a.children else a.text.split(".")[0] for a in node.children]
    if k == "ImportFrom":
        return [a.children[0].text if a.children else a.text for a in node.children if a.text != "*"]
    return []


def _merge(a: _State, b: _State) -> _State:
    out = dict(a)
    for var, sites in b.items():
        out[var] = out[var] | sites if var in out else sites
    return out


def extract_dataflow(tree: Node) -> DataflowGraph:
    """Def-use graph of a parsed module with positionally normalized variables."""
    return _Analyzer().run(tree)
