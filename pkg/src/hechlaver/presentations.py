"""Finitely presented sets ``A = p[T]`` via nondeterministic pair automata.

A rule ``(xGuard, yGuard, next)`` lets a run read the pair ``(x(n), y(n))``
when ``x(n)`` is in ``xGuard`` and ``y(n)`` in ``yGuard``.  Projecting away
``y`` gives the subset construction below: a *witness configuration* is
the set of states some run can be in after reading an ``x``-prefix with
``y`` chosen existentially.

Why alive configurations mean membership: the state-level runs form a
finitely branching tree, so if the configuration stays nonempty forever
there are runs of every length and, by Koenig's lemma, an infinite one;
its rules supply ``y``.  Hence ``p[T]`` is exactly the set of ``x`` along
which the configuration never dies, a closed set.  For properly analytic
sets the ``y``-commitments of ``A_{s,t}`` would have to be tracked
explicitly; here they are absorbed without loss.
"""
from __future__ import annotations

import hashlib
from typing import Mapping, Optional, Sequence

from .setalg import PeriodicSet, refine
from .trees import Lasso

Config = frozenset
DEAD: Config = frozenset()


class PresentationError(ValueError):
    pass


class PairAutomaton:
    def __init__(self, rules: Mapping[str, Sequence[tuple]], initial: Optional[str] = None):
        if not rules:
            raise PresentationError("automaton needs at least one state")
        self.initial = initial if initial is not None else next(iter(rules))
        if self.initial not in rules:
            raise PresentationError(f"unknown initial state {self.initial}")
        rules = {self.initial: rules[self.initial], **rules}
        self._rules: dict[str, tuple] = {}
        for q, rs in rules.items():
            kept = []
            for xg, yg, nxt in rs:
                if nxt not in rules:
                    raise PresentationError(f"state {q}: rule targets unknown state {nxt}")
                # a rule with an empty y-guard can never fire
                if xg and yg:
                    kept.append((xg, yg, nxt))
            self._rules[q] = tuple(kept)
        reach = {self.initial}
        todo = [self.initial]
        while todo:
            q = todo.pop()
            for _, _, nxt in self._rules[q]:
                if nxt not in reach:
                    reach.add(nxt)
                    todo.append(nxt)
        if reach != set(self._rules):
            raise PresentationError(f"unreachable states: {sorted(set(self._rules) - reach)}")
        self._order = {q: i for i, q in enumerate(self._rules)}
        refined = refine([xg for rs in self._rules.values() for xg, _, _ in rs])
        self.cells: list[PeriodicSet] = [c for c, _ in refined]
        self._cell_reps = [c.min() for c in self.cells]
        self._step_cache: dict = {}

    @classmethod
    def trimmed(cls, rules, initial=None) -> "PairAutomaton":
        initial = initial if initial is not None else next(iter(rules))
        live = {q: [r for r in rs if r[0] and r[1]] for q, rs in rules.items()}
        reach = {initial}
        todo = [initial]
        while todo:
            q = todo.pop()
            for _, _, nxt in live[q]:
                if nxt not in reach:
                    reach.add(nxt)
                    todo.append(nxt)
        return cls({q: rs for q, rs in live.items() if q in reach}, initial)

    @property
    def states(self) -> list[str]:
        return list(self._rules)

    def rules(self, q: str) -> tuple:
        return self._rules[q]

    def items(self):
        return self._rules.items()

    def __eq__(self, other):
        if not isinstance(other, PairAutomaton):
            return NotImplemented
        return (self.initial, self._rules) == (other.initial, other._rules)

    def __hash__(self):
        return hash((self.initial, tuple(self._rules.items())))

    def __repr__(self):
        return f"<PairAutomaton states={len(self._rules)} cells={len(self.cells)}>"

    def sort_config(self, c: Config) -> list[str]:
        return sorted(c, key=self._order.__getitem__)

    def digest(self) -> str:
        from .sexpr import format_automaton

        return hashlib.sha256(format_automaton(self).encode()).hexdigest()

    # -- witness configurations ----------------------------------------

    def initial_config(self) -> Config:
        return frozenset([self.initial])

    def cell_index(self, a: int) -> int:
        for i, c in enumerate(self.cells):
            if a in c:
                return i
        raise AssertionError("cells cover the naturals")

    def step(self, c: Config, a: int) -> Config:
        return self.step_by_cell(c)[self.cell_index(a)]

    def step_by_cell(self, c: Config) -> list[Config]:
        """Successor configuration for each cell; ``step`` is constant on cells."""
        if c not in self._step_cache:
            self._step_cache[c] = [self._step_raw(c, rep) for rep in self._cell_reps]
        return self._step_cache[c]

    def _step_raw(self, c: Config, a: int) -> Config:
        return frozenset(nxt for q in c for xg, _, nxt in self._rules[q] if a in xg)

    def step_committed(self, c: Config, a: int, b: int) -> Config:
        return frozenset(nxt for q in c for xg, yg, nxt in self._rules[q] if a in xg and b in yg)

    def residual(self, s: Sequence[int], t: Sequence[int]) -> Config:
        """States reachable reading ``(s[i], t[i])`` for ``i < len(t)``, then ``s`` with free ``y``."""
        if len(t) > len(s):
            raise PresentationError("committed y-prefix longer than x-prefix")
        c = self.initial_config()
        for i, a in enumerate(s):
            c = self.step_committed(c, a, t[i]) if i < len(t) else self.step(c, a)
        return c

    def configs_along(self, x: Sequence[int]) -> list[Config]:
        out = [self.initial_config()]
        for a in x:
            out.append(self.step(out[-1], a))
        return out

    def reachable_configs(self) -> list[Config]:
        """All configurations reachable from the initial one, in discovery order."""
        start = self.initial_config()
        order = [start]
        seen = {start}
        i = 0
        while i < len(order):
            for nxt in self.step_by_cell(order[i]):
                if nxt not in seen:
                    seen.add(nxt)
                    order.append(nxt)
            i += 1
        return order

    # -- membership -----------------------------------------------------

    def member_lasso(self, x: Lasso) -> bool:
        """Exact membership of the eventually periodic ``x`` in ``p[T]``."""
        c = self.initial_config()
        for a in x.stem:
            c = self.step(c, a)
            if not c:
                return False
        seen = set()
        while c not in seen:
            seen.add(c)
            for a in x.loop:
                c = self.step(c, a)
                if not c:
                    return False
        return True

    def alive(self, x: Sequence[int]) -> bool:
        return bool(self.configs_along(x)[-1])

    def witness_for_branch(self, x: Sequence[int]) -> tuple:
        """A ``y``-prefix with ``(x, y)`` readable from the initial state.

        A surviving state is fixed at the end and a state path is chosen
        backwards; each ``y(i)`` is the least element of the chosen rule's
        ``yGuard``.
        """
        configs = self.configs_along(x)
        for i, c in enumerate(configs):
            if not c:
                raise PresentationError(f"configuration dead after {i} moves")
        q = self.sort_config(configs[-1])[0]
        ys = []
        for i in range(len(x) - 1, -1, -1):
            for p in self.sort_config(configs[i]):
                rule = next((r for r in self._rules[p] if x[i] in r[0] and r[2] == q), None)
                if rule is not None:
                    ys.append(rule[1].min())
                    q = p
                    break
            else:
                raise AssertionError("backward witness search lost the run")
        return tuple(reversed(ys))


def step_witness(p: PairAutomaton, c: Config, a: int) -> Config:
    return p.step(c, a)


def residual(p: PairAutomaton, s, t) -> Config:
    return p.residual(s, t)


def member_lasso(p: PairAutomaton, x: Lasso) -> bool:
    return p.member_lasso(x)


def witness_for_branch(p: PairAutomaton, x) -> tuple:
    return p.witness_for_branch(x)
