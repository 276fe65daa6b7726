"""Typed reading and canonical printing of whole instance documents."""
from __future__ import annotations

from dataclasses import dataclass, field

from . import sexpr
from .sexpr import ParseError, fail, head


@dataclass
class Document:
    items: list = field(default_factory=list)
    nodes: list = field(default_factory=list)

    def only(self, kind: type, what: str):
        """The single item of type ``kind``; raises ParseError otherwise."""
        found = [x for x in self.items if isinstance(x, kind)]
        if len(found) != 1:
            raise ParseError(f"expected exactly one {what}, found {len(found)}")
        return found[0]


@dataclass
class SyncFamily:
    base: object
    family: list


def _family(node):
    from .proofkit import RootedFamily
    from .setalg import PeriodicSet

    root, parts, excluded = (), [], PeriodicSet.empty()
    for part in node[1:]:
        h = head(part)
        if h == "root":
            root = sexpr.nats(part[1:])
        elif h == "excluded":
            excluded = PeriodicSet.finite(sexpr.nats(part[1:]))
        elif h == "part":
            if len(part) != 3:
                fail(part, "expected (part SET (tree ...))")
            parts.append((sexpr.to_set(part[1]), sexpr.to_tree(part[2])))
        else:
            fail(part, "expected (root ...), (excluded ...) or (part ...)")
    return RootedFamily(root, parts, excluded)


def _family_node(fam):
    from .sexpr import Int, form, set_node, tree_node

    out = form("family", form("root", *map(Int, fam.root)))
    if fam.excluded:
        out.append(form("excluded", *map(Int, fam.excluded.elements())))
    for ix, t in fam.parts:
        out.append(form("part", set_node(ix), tree_node(t)))
    return out


def to_item(node):
    from .dichotomy import to_certificate

    h = head(node)
    if h in sexpr.SET_HEADS:
        return sexpr.to_set(node)
    if h == "tree":
        return sexpr.to_tree(node)
    if h == "aut":
        return sexpr.to_automaton(node)
    if h == "lasso":
        return sexpr.to_lasso(node)
    if h == "certificate":
        return to_certificate(node)
    if h == "family":
        return _family(node)
    if h == "sync":
        trees = [sexpr.to_tree(t) for t in node[1:]]
        if len(trees) < 2:
            fail(node, "expected (sync BASE-TREE K0-TREE ...)")
        return SyncFamily(trees[0], trees[1:])
    fail(node, f"unknown form {h or node!r}")


def item_node(item):
    from .dichotomy import DichotomyCertificate, certificate_node
    from .presentations import PairAutomaton
    from .proofkit import RootedFamily
    from .setalg import PeriodicSet
    from .trees import Lasso, RegularTree

    if isinstance(item, PeriodicSet):
        return sexpr.set_node(item)
    if isinstance(item, RegularTree):
        return sexpr.tree_node(item)
    if isinstance(item, PairAutomaton):
        return sexpr.automaton_node(item)
    if isinstance(item, Lasso):
        return sexpr.lasso_node(item)
    if isinstance(item, DichotomyCertificate):
        return certificate_node(item)
    if isinstance(item, RootedFamily):
        return _family_node(item)
    if isinstance(item, SyncFamily):
        return sexpr.form("sync", *(sexpr.tree_node(t) for t in [item.base, *item.family]))
    raise TypeError(f"cannot print {type(item).__name__}")


def parse_document(text: str) -> Document:
    nodes = sexpr.parse(text)
    return Document([to_item(n) for n in nodes], nodes)


def print_document(doc: Document) -> str:
    return "".join(sexpr.format_node(item_node(x)) + "\n" for x in doc.items)
