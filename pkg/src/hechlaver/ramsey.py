"""Increment coding, greedy homogeneous prefixes and the Silver pipeline.

A strictly increasing sequence ``x`` is coded by its increments
``f(0) = x(0)`` and ``f(k+1) = x(k+1) - x(k) - 1``; colorings and Hechler
trees live on increments, where they are regular.

Greedy extraction keeps every subsequence of the prefix ``x_0 < ... <
x_{n-1}`` a node of ``h``.  A candidate ``a`` for ``x_n`` must extend each
such subsequence ``S``: when ``S`` ends in ``l`` at tree state ``q`` this
means ``a - l - 1`` is in the guard of ``q``, i.e. ``a`` lies in that
guard shifted by ``l + 1``.  Only distinct ``(q, l)`` pairs matter, so the
step costs one intersection per pair rather than one per subset.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

from .dichotomy import LAVER_INSIDE, solve_dichotomy
from .filters import Filter, Frechet, LazyUltra
from .presentations import PairAutomaton
from .setalg import PeriodicSet, intersect_all, lcm_period
from .trees import RegularTree


class ExtractionError(ValueError):
    pass


def encode(f: Sequence[int]) -> tuple:
    """Increments to the strictly increasing sequence they code."""
    out, prev = [], -1
    for d in f:
        if d < 0:
            raise ValueError("increments are natural numbers")
        prev = prev + 1 + d
        out.append(prev)
    return tuple(out)


def decode(x: Sequence[int]) -> tuple:
    """Strictly increasing sequence to its increments."""
    out, prev = [], -1
    for a in x:
        if a <= prev:
            raise ValueError(f"{tuple(x)} is not strictly increasing")
        out.append(a - prev - 1)
        prev = a
    return tuple(out)


def range_of_branch(x: Sequence[int]) -> frozenset:
    decode(x)  # validates
    return frozenset(x)


def extract_homogeneous_prefix(h: RegularTree, f: Filter, n: int) -> tuple:
    """``x_0 < ... < x_{n-1}`` with every subsequence's increments a node of ``h``."""
    if h.root:
        raise ExtractionError("increment trees must have a trivial root")
    if h.classify(f) != "hechler":
        raise ExtractionError(f"tree is not Hechler mod {f.spec()}")
    # tails[(q, l)]: some subsequence ends at l with its increments at state q
    tails: set = set()
    xs: list[int] = []
    for _ in range(n):
        demands = [h.guard(h.initial)]
        for q, last in sorted(tails):
            shifted = h.guard(q).shift(last + 1)
            if not f.in_filter(shifted):
                raise ExtractionError(f"shifted successor set {shifted.literal()} is not in the filter")
            demands.append(shifted)
        pool = intersect_all([f.core(), *demands])
        a = pool.min_above(xs[-1] if xs else -1)
        if a is None:
            raise ExtractionError("filter sets have a finite intersection; the filter is not proper")
        new = {(h.next_state(h.initial, a), a)}
        new |= {(h.next_state(q, a - last - 1), a) for q, last in tails}
        tails |= new
        xs.append(a)
    return tuple(xs)


def all_subsequences_are_nodes(h: RegularTree, xs: Sequence[int]) -> int:
    """Check every nonempty subsequence; returns how many were checked."""
    count = 0
    for r in range(1, len(xs) + 1):
        for sub in itertools.combinations(xs, r):
            if decode(sub) not in h:
                raise AssertionError(f"subsequence {sub} is not a node")
            count += 1
    return count


# -- Silver at desk scale ---------------------------------------------------------


def clopen_depth_check(p: PairAutomaton, d: int) -> None:
    """Raise unless membership in ``p[T]`` is decided by the first ``d`` increments.

    Every configuration reachable in exactly ``d`` steps must be dead or
    absorbing-alive (no extension ever dies).
    """
    layer = {p.initial_config()}
    for _ in range(d):
        layer = {n for c in layer for n in p.step_by_cell(c)}
    for c in layer:
        if not c:
            continue
        seen, todo = {c}, [c]
        while todo:
            for n in p.step_by_cell(todo.pop()):
                if not n:
                    raise ExtractionError(f"coloring is not decided after {d} increments")
                if n not in seen:
                    seen.add(n)
                    todo.append(n)


def color(p: PairAutomaton, subset: Sequence[int], d: int) -> bool:
    """Colour of an increasing ``d``-tuple under a depth-``d`` clopen coloring."""
    return bool(p.configs_along(decode(subset)[:d])[-1])


@dataclass
class HomogeneousReport:
    X: tuple
    side: str  # inA | outA
    checked: int
    monochromatic: bool
    filter_spec: str
    decisions: list = field(default_factory=list)

    def to_text(self) -> str:
        from .sexpr import Int, Sym, form, format_node, set_node

        node = form("report", form("X", *map(Int, self.X)), form("side", Sym(self.side)),
                    form("checked", Int(self.checked)),
                    form("monochromatic", Sym("yes" if self.monochromatic else "no")),
                    form("filter", Sym(self.filter_spec.split(":")[0])),
                    form("decisions", *(form("yes" if v else "no", set_node(s)) for s, v in self.decisions)))
        return format_node(node) + "\n"


def silver_extract(coloring: PairAutomaton, d: int, n: int, f: Optional[LazyUltra] = None) -> HomogeneousReport:
    """A length-``n`` prefix of a set all of whose ``d``-subsets get one colour.

    The filter is a lazily decided ultrafilter.  Its first query is the
    residue class of ``m - 1`` mod ``m``, where ``m`` is the lcm of the
    coloring's guard periods; once that class is in the filter every chosen
    point and every increment between chosen points lies in it, so the
    shifted successor sets needed by the greedy step are decided the same
    way as the unshifted ones.
    """
    clopen_depth_check(coloring, d)
    f = LazyUltra() if f is None else f
    m = lcm_period(xg for q in coloring.states for xg, _, _ in coloring.rules(q))
    residue = PeriodicSet.residue(m - 1, m)
    if not f.decide(residue):
        raise ExtractionError(f"ultrafilter rejects {residue.literal()}; choose a seed inside it")
    cert = solve_dichotomy(coloring, f)
    xs = extract_homogeneous_prefix(cert.tree, f, n)
    side = "inA" if cert.verdict == LAVER_INSIDE else "outA"
    want = side == "inA"
    checked, mono = 0, True
    for sub in itertools.combinations(xs, d):
        checked += 1
        if color(coloring, sub, d) != want:
            mono = False
    assert checked == math.comb(n, d)
    return HomogeneousReport(xs, side, checked, mono, f.spec(), list(f.log))
