"""Reader and printer for the parenthesized text format.

Atoms are naturals, double-quoted strings and bare symbols; ``;`` starts a
comment.  Every parsed node remembers its line and column so later stages
can report errors at the offending form.  The printer is canonical: block
forms put each child on its own indented line, everything else is inline,
so ``format_node(parse(text))`` reproduces canonical text byte for byte.
"""
from __future__ import annotations

import re
from typing import Iterable

from .setalg import PeriodicSet


class ParseError(ValueError):
    def __init__(self, message: str, line: int = 0, col: int = 0):
        self.message, self.line, self.col = message, line, col
        super().__init__(f"line {line}, column {col}: {message}" if line else message)


class Sym(str):
    line = col = 0


class Str(str):
    line = col = 0


class Int(int):
    line = col = 0


class Form(list):
    line = col = 0


def _located(node, line, col):
    node.line, node.col = line, col
    return node


_TOKEN = re.compile(r"""
    (?P<ws>[ \t\r]+) | (?P<nl>\n) | (?P<comment>;[^\n]*)
  | (?P<open>\() | (?P<close>\))
  | (?P<str>"(?:[^"\\\n]|\\.)*")
  | (?P<int>\d+(?![\w@.:-]))
  | (?P<sym>[A-Za-z_][\w@.:+-]*)
""", re.VERBOSE)


def tokenize(text: str):
    line, line_start, pos = 1, 0, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        col = pos - line_start + 1
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, col)
        kind = m.lastgroup
        if kind == "nl":
            line, line_start = line + 1, m.end()
        elif kind not in ("ws", "comment"):
            yield kind, m.group(), line, col
        pos = m.end()


def parse(text: str) -> list:
    """Parse all top-level nodes in ``text``."""
    stack: list[Form] = [Form()]
    for kind, tok, line, col in tokenize(text):
        if kind == "open":
            stack.append(_located(Form(), line, col))
        elif kind == "close":
            if len(stack) == 1:
                raise ParseError("unbalanced ')'", line, col)
            node = stack.pop()
            stack[-1].append(node)
        elif kind == "str":
            body = re.sub(r"\\(.)", r"\1", tok[1:-1])
            stack[-1].append(_located(Str(body), line, col))
        elif kind == "int":
            stack[-1].append(_located(Int(tok), line, col))
        else:
            stack[-1].append(_located(Sym(tok), line, col))
    if len(stack) > 1:
        open_form = stack[-1]
        raise ParseError("unclosed '('", open_form.line, open_form.col)
    return list(stack[0])


def parse_one(text: str):
    nodes = parse(text)
    if len(nodes) != 1:
        raise ParseError(f"expected one form, found {len(nodes)}")
    return nodes[0]


BLOCK_FORMS = {"certificate", "aut", "tree", "configs", "decisions", "family", "part", "sync", "report"}


def _atom(node) -> str:
    if isinstance(node, Str):
        return '"' + node.replace("\\", "\\\\").replace('"', '\\"') + '"'
    if isinstance(node, bool):
        raise TypeError("booleans are not atoms")
    return str(node)


def format_node(node, indent: int = 0) -> str:
    if not isinstance(node, list):
        return _atom(node)
    if len(node) > 1 and isinstance(node[0], str) and node[0] in BLOCK_FORMS:
        pad = " " * (indent + 2)
        body = "\n".join(pad + format_node(child, indent + 2) for child in node[1:])
        return f"({node[0]}\n{body})"
    return "(" + " ".join(format_node(child, indent) for child in node) + ")"


def form(head: str, *children) -> Form:
    return Form([Sym(head), *children])


# -- shared helpers for interpreting nodes -----------------------------------


def fail(node, message: str):
    raise ParseError(message, getattr(node, "line", 0), getattr(node, "col", 0))


def head(node) -> str:
    if isinstance(node, list) and node and isinstance(node[0], Sym):
        return str(node[0])
    if isinstance(node, Sym):
        return str(node)
    return ""


def expect_form(node, name: str) -> list:
    if not isinstance(node, list) or head(node) != name:
        fail(node, f"expected ({name} ...)")
    return node[1:]


def nat(node) -> int:
    if not isinstance(node, Int):
        fail(node, "expected a natural number")
    return int(node)


def symbol(node) -> str:
    if not isinstance(node, Sym):
        fail(node, "expected a name")
    return str(node)


def nats(nodes: Iterable) -> tuple:
    return tuple(nat(n) for n in nodes)


# -- sets --------------------------------------------------------------------

SET_HEADS = {"fin", "cofin", "per", "all", "none"}


def to_set(node) -> PeriodicSet:
    h = head(node)
    if isinstance(node, Sym):
        if h == "all":
            return PeriodicSet.all()
        if h == "none":
            return PeriodicSet.empty()
        fail(node, f"unknown set {h!r}")
    if h == "fin":
        return PeriodicSet.finite(nats(node[1:]))
    if h == "cofin":
        return PeriodicSet.cofinite(nats(node[1:]))
    if h == "per":
        if len(node) != 3 or not all(isinstance(w, Str) for w in node[1:]):
            fail(node, 'expected (per "prefix" "period")')
        try:
            return PeriodicSet(str(node[1]), str(node[2]))
        except ValueError as exc:
            fail(node, str(exc))
    fail(node, "expected a set literal")


def set_node(s: PeriodicSet) -> Form:
    return form("per", Str(s.prefix), Str(s.period))


def parse_set(text: str) -> PeriodicSet:
    return to_set(parse_one(text))


def format_set(s: PeriodicSet) -> str:
    return format_node(set_node(s))


# -- trees, automata, lassos -------------------------------------------------


def tree_node(t) -> Form:
    out = form("tree", form("root", *map(Int, t.root)))
    for q, rs in t.items():
        out.append(form("state", Sym(q), *(form("rule", set_node(g), Sym(n)) for g, n in rs)))
    return out


def to_tree(node):
    from .trees import RegularTree, TreeError

    parts = expect_form(node, "tree")
    root: tuple = ()
    rules: dict = {}
    for part in parts:
        h = head(part)
        if h == "root":
            root = nats(part[1:])
        elif h == "state":
            if len(part) < 2:
                fail(part, "state needs a name")
            name = symbol(part[1])
            if name in rules:
                fail(part, f"duplicate state {name}")
            rs = []
            for r in part[2:]:
                body = expect_form(r, "rule")
                if len(body) != 2:
                    fail(r, "expected (rule SET NAME)")
                rs.append((to_set(body[0]), symbol(body[1])))
            rules[name] = rs
        else:
            fail(part, "expected (root ...) or (state ...)")
    try:
        return RegularTree(rules, root=root)
    except TreeError as exc:
        fail(node, str(exc))


def automaton_node(p) -> Form:
    out = form("aut")
    for q, rs in p.items():
        out.append(form("state", Sym(q), *(
            form("rule", form("x", set_node(xg)), form("y", set_node(yg)), Sym(n)) for xg, yg, n in rs)))
    return out


def to_automaton(node):
    from .presentations import PairAutomaton, PresentationError

    rules: dict = {}
    for part in expect_form(node, "aut"):
        if head(part) != "state" or len(part) < 2:
            fail(part, "expected (state NAME (rule ...) ...)")
        name = symbol(part[1])
        if name in rules:
            fail(part, f"duplicate state {name}")
        rs = []
        for r in part[2:]:
            body = expect_form(r, "rule")
            if len(body) != 3:
                fail(r, "expected (rule (x SET) (y SET) NAME)")
            xs = expect_form(body[0], "x")
            ys = expect_form(body[1], "y")
            if len(xs) != 1 or len(ys) != 1:
                fail(r, "guards take exactly one set")
            rs.append((to_set(xs[0]), to_set(ys[0]), symbol(body[2])))
        rules[name] = rs
    try:
        return PairAutomaton(rules)
    except PresentationError as exc:
        fail(node, str(exc))


def format_automaton(p) -> str:
    return format_node(automaton_node(p))


def format_tree(t) -> str:
    return format_node(tree_node(t))


def lasso_node(x) -> Form:
    return form("lasso", Form(map(Int, x.stem)), Form(map(Int, x.loop)))


def to_lasso(node):
    from .trees import Lasso

    body = expect_form(node, "lasso")
    if len(body) != 2 or not all(isinstance(b, list) for b in body):
        fail(node, "expected (lasso (n ...) (n ...))")
    if not body[1]:
        fail(node, "lasso needs a nonempty repeating word")
    return Lasso(nats(body[0]), nats(body[1]))
