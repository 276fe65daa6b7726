"""Finitely presented subtrees of the tree of finite sequences of naturals.

A :class:`RegularTree` is a deterministic automaton over moves: each state
carries pairwise disjoint guards (eventually periodic sets), and a finite
sequence beneath the root is a node iff the run on it exists.  All nodes
that end in one state share one successor set, which is what makes the
Hechler/Laver classification decidable by a per-state check.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional, Sequence, Union

from .filters import Filter
from .setalg import ALL, EMPTY, PeriodicSet, refine, union_all

Node = tuple
Rule = tuple  # (guard, next-state)


class TreeError(ValueError):
    pass


@dataclass(frozen=True)
class Lasso:
    """An eventually periodic infinite sequence ``stem + loop + loop + ...``."""

    stem: tuple
    loop: tuple

    def __post_init__(self):
        object.__setattr__(self, "stem", tuple(self.stem))
        object.__setattr__(self, "loop", tuple(self.loop))
        if not self.loop:
            raise ValueError("lasso needs a nonempty repeating word")

    def __getitem__(self, i: int) -> int:
        if i < len(self.stem):
            return self.stem[i]
        return self.loop[(i - len(self.stem)) % len(self.loop)]

    def prefix(self, n: int) -> tuple:
        return tuple(self[i] for i in range(n))

    def literal(self) -> str:
        return "(lasso ({}) ({}))".format(" ".join(map(str, self.stem)), " ".join(map(str, self.loop)))


# Positions: a state name, or ("root", i) while still inside the root.
Position = Union[str, tuple]


class RegularTree:
    def __init__(self, rules: Mapping[str, Sequence[Rule]], initial: Optional[str] = None,
                 root: Iterable[int] = ()):
        if not rules:
            raise TreeError("tree needs at least one state")
        self.initial = initial if initial is not None else next(iter(rules))
        self.root = tuple(root)
        if self.initial in rules:
            rules = {self.initial: rules[self.initial], **rules}
        self._rules: dict[str, tuple] = {}
        for state, rs in rules.items():
            kept = []
            for guard, nxt in rs:
                if nxt not in rules:
                    raise TreeError(f"state {state}: rule targets unknown state {nxt}")
                if guard:
                    kept.append((guard, nxt))
            for i in range(len(kept)):
                for j in range(i + 1, len(kept)):
                    if not kept[i][0].isdisjoint(kept[j][0]):
                        raise TreeError(f"state {state}: guards {kept[i][0]} and {kept[j][0]} overlap")
            self._rules[state] = tuple(kept)
        if self.initial not in self._rules:
            raise TreeError(f"unknown initial state {self.initial}")
        unreachable = set(self._rules) - _reachable(self.initial, self._rules)
        if unreachable:
            raise TreeError(f"unreachable states: {sorted(unreachable)}")
        self._guards = {q: union_all(g for g, _ in rs) for q, rs in self._rules.items()}

    @classmethod
    def trimmed(cls, rules, initial=None, root=()) -> "RegularTree":
        """Like the constructor, but silently drops unreachable states."""
        initial = initial if initial is not None else next(iter(rules))
        live = {q: [(g, n) for g, n in rs if g] for q, rs in rules.items()}
        keep = _reachable(initial, live)
        return cls({q: rs for q, rs in live.items() if q in keep}, initial, root)

    # -- structure ------------------------------------------------------

    @property
    def states(self) -> list[str]:
        return list(self._rules)

    def rules(self, state: str) -> tuple:
        return self._rules[state]

    def guard(self, state: str) -> PeriodicSet:
        """Successor set shared by all nodes that end in ``state``."""
        return self._guards[state]

    def next_state(self, state: str, a: int) -> Optional[str]:
        for g, nxt in self._rules[state]:
            if a in g:
                return nxt
        return None

    def items(self):
        return self._rules.items()

    def __eq__(self, other):
        if not isinstance(other, RegularTree):
            return NotImplemented
        return (self.initial, self.root, self._rules) == (other.initial, other.root, other._rules)

    def __hash__(self):
        return hash((self.initial, self.root, tuple(self._rules.items())))

    def __repr__(self):
        return f"<RegularTree root={self.root} states={len(self._rules)}>"

    # -- positions (root-aware) -----------------------------------------

    def start(self) -> Position:
        return ("root", 0) if self.root else self.initial

    def edges(self, pos: Position) -> tuple:
        if isinstance(pos, tuple):
            i = pos[1]
            nxt = ("root", i + 1) if i + 1 < len(self.root) else self.initial
            return ((PeriodicSet.finite([self.root[i]]), nxt),)
        return self._rules[pos]

    def successors_at(self, pos: Position) -> PeriodicSet:
        if isinstance(pos, tuple):
            return PeriodicSet.finite([self.root[pos[1]]])
        return self._guards[pos]

    def advance(self, pos: Position, a: int) -> Optional[Position]:
        for g, nxt in self.edges(pos):
            if a in g:
                return nxt
        return None

    def locate(self, u: Sequence[int]) -> Optional[Position]:
        pos = self.start()
        for a in u:
            pos = self.advance(pos, a)
            if pos is None:
                return None
        return pos

    def run(self, u: Sequence[int]) -> Optional[str]:
        """State reached after ``u``; None if ``u`` is not a node or still inside the root."""
        pos = self.locate(u)
        return pos if isinstance(pos, str) else None

    # -- node queries ------------------------------------------------

    def contains(self, u: Sequence[int]) -> bool:
        return self.locate(u) is not None

    __contains__ = contains

    def successor_set(self, u: Sequence[int]) -> PeriodicSet:
        pos = self.locate(u)
        if pos is None:
            raise TreeError(f"{tuple(u)} is not a node")
        return self.successors_at(pos)

    def classify(self, f: Filter) -> str:
        """``hechler``, ``laver`` or ``neither`` mod ``f`` (beneath the root)."""
        if all(f.in_filter(self._guards[q]) for q in self._rules):
            return "hechler"
        if all(f.is_positive(self._guards[q]) for q in self._rules):
            return "laver"
        return "neither"

    def with_root(self, s: Iterable[int]) -> "RegularTree":
        return RegularTree(self._rules, self.initial, tuple(s))

    def renamed(self, prefix: str) -> dict:
        """Rules with every state name prefixed; used when gluing trees."""
        return {prefix + q: [(g, prefix + n) for g, n in rs] for q, rs in self._rules.items()}

    def cells(self) -> list[PeriodicSet]:
        guards = [g for rs in self._rules.values() for g, _ in rs]
        return [c for c, _ in refine(guards)]


def _reachable(initial, rules) -> set:
    seen = {initial}
    todo = [initial]
    while todo:
        q = todo.pop()
        for g, nxt in rules[q]:
            if g and nxt not in seen:
                seen.add(nxt)
                todo.append(nxt)
    return seen


def full_tree(root=()) -> RegularTree:
    return RegularTree({"q": [(ALL, "q")]}, root=root)


def contains(t: RegularTree, u) -> bool:
    return t.contains(u)


def successor_set(t: RegularTree, u) -> PeriodicSet:
    return t.successor_set(u)


def classify_mod_f(t: RegularTree, f: Filter) -> str:
    return t.classify(f)


def with_root(t: RegularTree, s) -> RegularTree:
    return t.with_root(s)


# -- threshold normal form -------------------------------------------------


@dataclass(frozen=True)
class ThresholdFunction:
    """A bound ``sigma(u)`` for every finite sequence ``u``.

    ``sigma(u)`` is ``exceptions[u]`` when listed, else the bound of the
    state reached by running ``transitions`` on ``u``.  The induced tree
    ``H_sigma`` holds ``u`` iff ``u[n] > sigma(u[:n])`` for all ``n``.
    """

    bounds: Mapping[str, int]
    transitions: Mapping[str, tuple]
    initial: str
    exceptions: Mapping[tuple, int] = field(default_factory=dict)

    @classmethod
    def constant(cls, b: int) -> "ThresholdFunction":
        return cls({"s": b}, {"s": ((ALL, "s"),)}, "s")

    @classmethod
    def by_level(cls, bounds: Sequence[int], exceptions=None) -> "ThresholdFunction":
        """Bound ``bounds[len(u)]``, the last entry repeating forever."""
        names = [f"L{i}" for i in range(len(bounds))]
        trans = {names[i]: ((ALL, names[min(i + 1, len(names) - 1)]),) for i in range(len(names))}
        return cls(dict(zip(names, bounds)), trans, names[0], dict(exceptions or {}))

    def state_at(self, u: Sequence[int]) -> Optional[str]:
        q = self.initial
        for a in u:
            q = _step_rules(self.transitions[q], a)
            if q is None:
                return None
        return q

    def __call__(self, u: Sequence[int]) -> int:
        u = tuple(u)
        if u in self.exceptions:
            return self.exceptions[u]
        q = self.state_at(u)
        if q is None:
            raise TreeError(f"threshold undefined at {u}")
        return self.bounds[q]

    def key(self, u: Sequence[int]):
        """Finite-state summary of ``u``: enough to determine sigma on all extensions."""
        u = tuple(u)
        trie = _prefix_closure(self.exceptions)
        return (self.state_at(u), u if u in trie else None)


def _step_rules(rules, a):
    for g, nxt in rules:
        if a in g:
            return nxt
    return None


def _prefix_closure(nodes) -> set:
    out = set()
    for u in nodes:
        for i in range(len(u) + 1):
            out.add(tuple(u[:i]))
    return out


def _node_name(state: str, u: tuple) -> str:
    return f"{state}@" + ".".join(map(str, u))


def from_threshold(sigma: ThresholdFunction) -> RegularTree:
    """The tree ``H_sigma`` with successor set ``(sigma(u), oo)`` at each node ``u``."""

    def plain_rules(q, b, skip=EMPTY):
        above = PeriodicSet.above(b)
        covered = union_all(g for g, _ in sigma.transitions[q])
        if not above.issubset(covered):
            raise TreeError(f"threshold state {q}: moves {(above - covered)} above {b} have no transition")
        return [((g & above) - skip, nxt) for g, nxt in sigma.transitions[q]]

    rules: dict[str, list] = {q: plain_rules(q, b) for q, b in sigma.bounds.items()}
    trie = _prefix_closure(sigma.exceptions)
    names = {}
    for u in sorted(trie, key=lambda v: (len(v), v)):
        q = sigma.state_at(u)
        if q is None:
            continue
        names[u] = _node_name(q, u)
    for u, name in names.items():
        b = sigma(u)
        kids = sorted(v[-1] for v in names if len(v) == len(u) + 1 and v[:-1] == u and v[-1] > b)
        special = PeriodicSet.finite(kids)
        rs = [(PeriodicSet.finite([a]), names[u + (a,)]) for a in kids]
        rs += plain_rules(sigma.state_at(u), b, special)
        rules[name] = rs
    initial = names.get((), sigma.initial)
    return RegularTree.trimmed(rules, initial)


def threshold_bound(s: PeriodicSet) -> int:
    """Least natural ``b`` with ``(b, oo)`` contained in the cofinite set ``s``."""
    if not s.is_cofinite():
        raise TreeError(f"{s} is not cofinite")
    missing = s.complement()
    return missing.max() if missing else 0


def threshold_from_tree(h: RegularTree) -> ThresholdFunction:
    if h.root:
        raise TreeError("threshold form needs a tree with trivial root")
    bounds = {q: threshold_bound(h.guard(q)) for q in h.states}
    return ThresholdFunction(bounds, {q: h.rules(q) for q in h.states}, h.initial)


def threshold_form(h: RegularTree) -> RegularTree:
    """The subtree ``H_sigma`` of a Frechet-Hechler tree with least bounds."""
    return from_threshold(threshold_from_tree(h))


# -- branches ----------------------------------------------------------------


def _geometric_pick(s: PeriodicSet, rng: random.Random) -> int:
    if not s:
        raise TreeError("node with empty successor set")
    k = 0
    while rng.random() < 0.5:
        k += 1
    if s.is_infinite():
        return s.nth(k)
    return s.nth(k % len(s))


def sample_branch(t: RegularTree, scheme: str = "minimal", length: int = 8, seed: int = 0,
                  stem: Optional[int] = None):
    """Walk ``length`` moves down ``t``.

    ``minimal`` takes least successors; ``random`` takes the k-th successor
    with k geometric(1/2) from ``seed``; ``lasso`` also returns an eventually
    periodic branch whose first ``length`` moves are the returned sequence.
    """
    rng = random.Random(seed)
    if scheme == "lasso":
        lasso = sample_lasso(t, rng, stem)
        return lasso.prefix(length), lasso
    pos = t.start()
    out = []
    for _ in range(length):
        succ = t.successors_at(pos)
        if not succ:
            raise TreeError(f"node {tuple(out)} has no successors")
        a = succ.min() if scheme == "minimal" else _geometric_pick(succ, rng)
        out.append(a)
        pos = t.advance(pos, a)
    return tuple(out)


def sample_lasso(t: RegularTree, rng: random.Random, stem: Optional[int] = None) -> Lasso:
    if stem is None:
        stem = rng.randint(0, 4)
    moves: list[int] = []
    pos = t.start()
    while isinstance(pos, tuple) or len(moves) < stem:
        a = _geometric_pick(t.successors_at(pos), rng)
        moves.append(a)
        pos = t.advance(pos, a)
    # from here the move depends on the state only, so the walk cycles
    choice: dict = {}
    seen: dict = {}
    while pos not in seen:
        seen[pos] = len(moves)
        if pos not in choice:
            choice[pos] = _geometric_pick(t.successors_at(pos), rng)
        moves.append(choice[pos])
        pos = t.advance(pos, choice[pos])
    i = seen[pos]
    return Lasso(tuple(moves[:i]), tuple(moves[i:]))


def minimal_lasso(t: RegularTree) -> Lasso:
    pos = t.start()
    moves, seen = [], {}
    while pos not in seen:
        seen[pos] = len(moves)
        a = t.successors_at(pos).min()
        if a is None:
            raise TreeError("node with empty successor set")
        moves.append(a)
        pos = t.advance(pos, a)
    i = seen[pos]
    return Lasso(tuple(moves[:i]), tuple(moves[i:]))


def common_branch(t1: RegularTree, t2: RegularTree, depth: int) -> tuple:
    """A node of length ``depth`` lying in both trees (least choices)."""
    p1, p2 = t1.start(), t2.start()
    out = []
    for _ in range(depth):
        meet = t1.successors_at(p1) & t2.successors_at(p2)
        if not meet:
            raise TreeError(f"trees part ways at {tuple(out)}")
        a = meet.min()
        out.append(a)
        p1, p2 = t1.advance(p1, a), t2.advance(p2, a)
    return tuple(out)


def common_lasso(t1: RegularTree, t2: RegularTree) -> Lasso:
    """An eventually periodic branch of both trees (least choices)."""
    pos = (t1.start(), t2.start())
    moves, seen = [], {}
    while pos not in seen:
        seen[pos] = len(moves)
        meet = t1.successors_at(pos[0]) & t2.successors_at(pos[1])
        if not meet:
            raise TreeError(f"trees part ways at {tuple(moves)}")
        a = meet.min()
        moves.append(a)
        pos = (t1.advance(pos[0], a), t2.advance(pos[1], a))
    i = seen[pos]
    return Lasso(tuple(moves[:i]), tuple(moves[i:]))


# -- depth-bounded comparison via synchronized products ----------------------


def product_edges(trees: Sequence[RegularTree], positions: tuple, within: Optional[PeriodicSet] = None):
    """Joint moves from a tuple of positions: list of (cell, next positions).

    Only cells along which every tree has a successor are returned.
    """
    edge_lists = [t.edges(p) for t, p in zip(trees, positions)]
    guards = [g for es in edge_lists for g, _ in es]
    out = []
    for cell, _ in refine(guards):
        if within is not None:
            cell = cell & within
            if not cell:
                continue
        rep = cell.min()
        nxt = []
        for es in edge_lists:
            target = next((n for g, n in es if rep in g), None)
            if target is None:
                break
            nxt.append(target)
        else:
            out.append((cell, tuple(nxt)))
    return out


def equal_to_depth(t1: RegularTree, t2: RegularTree, depth: int, starts: Optional[tuple] = None) -> bool:
    """True iff both trees have exactly the same nodes of length <= depth.

    ``starts`` compares the subtrees below a pair of positions instead.
    """
    layer = {starts or (t1.start(), t2.start())}
    for _ in range(depth):
        nxt = set()
        for p1, p2 in layer:
            if t1.successors_at(p1) != t2.successors_at(p2):
                return False
            for _, pair in product_edges((t1, t2), (p1, p2)):
                nxt.add(pair)
        layer = nxt
    return True


def subset_to_depth(t1: RegularTree, t2: RegularTree, depth: int, starts: Optional[tuple] = None) -> bool:
    """True iff every node of ``t1`` of length <= depth is a node of ``t2``."""
    layer = {starts or (t1.start(), t2.start())}
    for _ in range(depth):
        nxt = set()
        for p1, p2 in layer:
            if not t1.successors_at(p1).issubset(t2.successors_at(p2)):
                return False
            for _, pair in product_edges((t1, t2), (p1, p2)):
                nxt.add(pair)
        layer = nxt
    return True
