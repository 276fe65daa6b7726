"""Two tree combinators used inside the dichotomy argument.

``lemma1_union`` glues rooted Hechler trees ``H_n`` (one for each ``n`` in
a filter set of first moves) into one Hechler tree rooted at ``s``.
``sync_intersection`` intersects a level-synchronized family ``K_n``, where
``K_n`` agrees with the base tree on all levels below ``n + |s|``; at each
level only finitely many members differ from the base, so the
intersection is again Hechler.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .filters import Filter
from .setalg import ALL, EMPTY, PeriodicSet, union_all
from .trees import RegularTree, TreeError, equal_to_depth, product_edges


class CombinatorError(ValueError):
    pass


@dataclass
class RootedFamily:
    """Templates assigned to first moves below the root ``s``.

    ``parts`` pairs an index set with a template tree; the template hangs
    below ``s + (n,)`` for every ``n`` in the index set.  ``excluded`` lists
    the finitely many indices that get no tree.
    """

    root: tuple
    parts: list
    excluded: PeriodicSet = field(default_factory=lambda: EMPTY)

    def index_set(self) -> PeriodicSet:
        return union_all(ix for ix, _ in self.parts)

    def template_for(self, n: int):
        for ix, t in self.parts:
            if n in ix:
                return t
        return None


def lemma1_union(fam: RootedFamily, f: Filter) -> RegularTree:
    sets = [ix for ix, _ in fam.parts]
    for i in range(len(sets)):
        for j in range(i + 1, len(sets)):
            if not sets[i].isdisjoint(sets[j]):
                raise CombinatorError(f"index sets {sets[i].literal()} and {sets[j].literal()} overlap")
    if not fam.excluded.is_finite():
        raise CombinatorError("the excluded index set must be finite")
    if not fam.excluded.isdisjoint(fam.index_set()):
        raise CombinatorError("an excluded index is also assigned a template")
    if not f.in_filter(fam.index_set()):
        raise CombinatorError(f"index set {fam.index_set().literal()} is not in the filter")
    rules = {"top": []}
    for i, (ix, t) in enumerate(fam.parts):
        if t.root:
            raise CombinatorError("templates are re-rooted below s^n and must have a trivial root")
        if t.classify(f) != "hechler":
            raise CombinatorError(f"template {i} is not Hechler mod {f.spec()}")
        if not ix:
            continue
        prefix = f"t{i}."
        rules.update(t.renamed(prefix))
        rules["top"].append((ix, prefix + t.initial))
    return RegularTree.trimmed(rules, "top", fam.root)


def intersect_trees(trees: Sequence[RegularTree]) -> RegularTree:
    """The tree of common nodes of ``trees``, which must share one root."""
    roots = {t.root for t in trees}
    if len(roots) != 1:
        raise CombinatorError("trees have different roots")
    start = tuple(t.initial for t in trees)
    names = {start: "k0"}
    rules = {}
    todo = [start]
    while todo:
        pos = todo.pop(0)
        by_target: dict = {}
        for cell, nxt in product_edges(trees, pos):
            if nxt not in names:
                names[nxt] = f"k{len(names)}"
                todo.append(nxt)
            by_target.setdefault(nxt, []).append(cell)
        rules[names[pos]] = [(union_all(cs), names[n]) for n, cs in by_target.items()]
    return RegularTree(rules, "k0", roots.pop())


def delayed(base: RegularTree, t: RegularTree, level: int) -> RegularTree:
    """Nodes of ``base`` whose moves from ``level`` on also follow ``t`` started afresh there."""
    if level == 0:
        return intersect_trees([base, t.with_root(base.root)])
    gate = {f"g{i}": [(ALL, f"g{i + 1}" if i + 1 < level else "t." + t.initial)]
            for i in range(level)}
    gate.update(t.renamed("t."))
    return intersect_trees([base, RegularTree(gate, "g0", base.root)])


def sync_intersection(h: RegularTree, family: Sequence[RegularTree], f: Filter) -> RegularTree:
    """Intersect ``h`` with ``K_0, ..., K_B`` (and ``K_n = K_B`` for ``n > B``).

    Each ``K_n`` must have the same nodes as ``h`` up to length ``n + |s|``.
    """
    if not family:
        raise CombinatorError("empty family")
    if h.classify(f) != "hechler":
        raise CombinatorError(f"base tree is not Hechler mod {f.spec()}")
    depth0 = len(h.root)
    for n, k in enumerate(family):
        if k.root != h.root:
            raise CombinatorError(f"K_{n} has root {k.root}, expected {h.root}")
        if k.classify(f) != "hechler":
            raise CombinatorError(f"K_{n} is not Hechler mod {f.spec()}")
        if not equal_to_depth(h, k, n + depth0):
            raise CombinatorError(f"K_{n} disagrees with the base tree below level {n + depth0}")
    try:
        return intersect_trees([h, *family])
    except TreeError as exc:
        raise CombinatorError(str(exc)) from exc
