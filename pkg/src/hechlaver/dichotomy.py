"""The Hechler/Laver dichotomy for finitely presented sets, mod a filter.

The solver works on the finite space of reachable witness configurations.
``W`` is the greatest fixpoint of

    Phi(V) = {c nonempty : {a : step(c, a) in V} is F-positive},

the configurations from which a Laver tree (mod F) can be grown inside A.
Its complement is stratified by corank: the dead configuration has
corank 0, and ``c`` gets corank ``k + 1`` once the moves leading to
corank ``<= k`` form an F-set.  This is the transfinite derivative of the
classical proof collapsed to naturals: with finitely many configurations
every rank is finite and bounded by their number.

A Hechler certificate keeps, at each configuration, exactly the moves that
lower the corank, so every branch dies within ``corank(initial)`` steps and
misses A.  A Laver certificate keeps the moves that stay in ``W``, so every
configuration along every branch is alive and the branch lies in A.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Optional

from .filters import Filter, LazyUltra, make_filter
from .presentations import Config, PairAutomaton
from .setalg import ALL, EMPTY, PeriodicSet, union_all
from .trees import RegularTree, sample_lasso

HECHLER_MISS = "hechlerMiss"
LAVER_INSIDE = "laverInside"


class CertificateError(ValueError):
    pass


@dataclass
class CorankMap:
    configs: list  # reachable configurations, discovery order
    succ: list  # succ[i][j]: index of step(configs[i], cell j)
    gfp: frozenset  # indices of configurations in W
    corank: dict  # index -> corank, for configurations outside W
    iterations: int  # Phi-iterations until the fixpoint was reached

    def name(self, i: int) -> str:
        return f"c{i}"

    def index(self, c: Config) -> int:
        return self.configs.index(c)

    def rank_of(self, c: Config) -> Optional[int]:
        """Corank of ``c``, or None when ``c`` is in ``W``."""
        return self.corank.get(self.index(c))

    def in_gfp(self, c: Config) -> bool:
        return self.index(c) in self.gfp


def _moves_into(p: PairAutomaton, row: list, targets) -> PeriodicSet:
    return union_all(p.cells[j] for j, k in enumerate(row) if k in targets)


def compute_gfp(p: PairAutomaton, f: Filter) -> CorankMap:
    configs = p.reachable_configs()
    index = {c: i for i, c in enumerate(configs)}
    succ = [[index[n] for n in p.step_by_cell(c)] for c in configs]

    w = {i for i, c in enumerate(configs) if c}
    iterations = 0
    while True:
        iterations += 1
        shrunk = {i for i in w if f.is_positive(_moves_into(p, succ[i], w))}
        if shrunk == w:
            break
        w = shrunk

    rank = {i: 0 for i, c in enumerate(configs) if not c}
    level = 0
    while True:
        level += 1
        ranked = set(rank)
        new = {}
        for i in range(len(configs)):
            if i in w or i in rank:
                continue
            if f.in_filter(_moves_into(p, succ[i], ranked)):
                new[i] = level
        if not new:
            break
        rank.update(new)
    outside = set(range(len(configs))) - w
    if set(rank) != outside:
        raise AssertionError("corank stratification does not cover the complement of the fixpoint")
    return CorankMap(configs, succ, frozenset(w), rank, iterations)


def _tree_from_choice(p: PairAutomaton, cm: CorankMap, allowed) -> RegularTree:
    """Tree over configurations keeping, at config i, the cells j with allowed(i, j)."""
    rules = {}
    for i, row in enumerate(cm.succ):
        by_target: dict[int, list] = {}
        for j, k in enumerate(row):
            if allowed(i, k):
                by_target.setdefault(k, []).append(p.cells[j])
        rules[cm.name(i)] = [(union_all(cells), cm.name(k)) for k, cells in sorted(by_target.items())]
    return RegularTree.trimmed(rules, cm.name(0))


def extract_hechler(p: PairAutomaton, f: Filter, cm: CorankMap) -> RegularTree:
    if 0 in cm.gfp:
        raise CertificateError("initial configuration is in the fixpoint; no Hechler certificate")

    def lowers(i, k):
        if i in cm.gfp:
            return False  # never reached from a ranked configuration
        r = cm.corank[i]
        return k == i if r == 0 else cm.corank.get(k, r) < r

    return _tree_from_choice(p, cm, lowers)


def extract_laver(p: PairAutomaton, f: Filter, cm: CorankMap) -> RegularTree:
    if 0 not in cm.gfp:
        raise CertificateError("initial configuration is outside the fixpoint; no Laver certificate")
    return _tree_from_choice(p, cm, lambda i, k: k in cm.gfp)


@dataclass
class DichotomyCertificate:
    verdict: str
    tree: RegularTree
    configs: dict  # name -> (sorted state names, corank or None)
    filter_spec: str
    decisions: list
    automaton: PairAutomaton
    digest: str
    corank_map: Optional[CorankMap] = field(default=None, compare=False, repr=False)

    def config_of(self, name: str) -> frozenset:
        return frozenset(self.configs[name][0])

    def rank(self, name: str) -> Optional[int]:
        return self.configs[name][1]

    @property
    def initial_rank(self) -> Optional[int]:
        return self.rank(self.tree.initial)

    def to_text(self) -> str:
        from .sexpr import format_node

        return format_node(certificate_node(self)) + "\n"


def solve_dichotomy(p: PairAutomaton, f: Filter) -> DichotomyCertificate:
    """Decide whether a Hechler tree misses ``p[T]`` or a Laver tree lies inside it, mod ``f``."""
    cm = compute_gfp(p, f)
    if 0 in cm.gfp:
        verdict, tree = LAVER_INSIDE, extract_laver(p, f, cm)
    else:
        verdict, tree = HECHLER_MISS, extract_hechler(p, f, cm)
    configs = {cm.name(i): (tuple(p.sort_config(c)), cm.corank.get(i)) for i, c in enumerate(cm.configs)}
    decisions = list(f.log) if isinstance(f, LazyUltra) else []
    return DichotomyCertificate(verdict, tree, configs, f.spec(), decisions, p, p.digest(), cm)


def filter_from_spec(spec: str) -> Filter:
    from .sexpr import parse_set

    kind, _, seed = spec.partition(":")
    return make_filter(kind, parse_set(seed) if seed else None)


@dataclass
class CheckReport:
    violations: list
    samples: int = 0

    @property
    def ok(self) -> bool:
        return not self.violations


def check_certificate(p: PairAutomaton, cert: DichotomyCertificate, budget: int = 100,
                      seed: int = 0, f: Optional[Filter] = None) -> CheckReport:
    """Independently re-verify a certificate against the instance ``p``.

    Raises CertificateError when the certificate belongs to another instance.
    """
    if cert.digest != p.digest() or cert.automaton != p:
        raise CertificateError("certificate does not belong to this instance")
    bad: list[str] = []

    if f is None:
        f = filter_from_spec(cert.filter_spec)
    elif f.spec() != cert.filter_spec:
        bad.append(f"filter {f.spec()} differs from certified {cert.filter_spec}")
    if isinstance(f, LazyUltra):
        bad += f.replay(cert.decisions)
    elif cert.decisions:
        bad.append("decision log present for a non-ultrafilter")

    t = cert.tree
    if cert.verdict not in (HECHLER_MISS, LAVER_INSIDE):
        bad.append(f"unknown verdict {cert.verdict}")
        return CheckReport(bad)
    if t.root:
        bad.append("certificate tree must have a trivial root")
    missing = [q for q in t.states if q not in cert.configs]
    if missing:
        bad.append(f"tree states without configuration: {missing}")
        return CheckReport(bad)
    for name, (states, _) in cert.configs.items():
        unknown = [q for q in states if q not in p.states]
        if unknown:
            bad.append(f"{name}: unknown automaton states {unknown}")
            return CheckReport(bad)
    if cert.config_of(t.initial) != p.initial_config():
        bad.append("initial tree state is not the initial configuration")

    # every rule must follow the witness-configuration dynamics
    for q in t.states:
        c = cert.config_of(q)
        for g, n in t.rules(q):
            for cell in p.cells:
                part = g & cell
                if part and p.step(c, part.min()) != cert.config_of(n):
                    bad.append(f"{q}: moves {part.literal()} lead to {sorted(p.step(c, part.min()))}, "
                               f"tree says {n}")

    kind = t.classify(f)
    if cert.verdict == HECHLER_MISS:
        if kind != "hechler":
            bad.append(f"tree classifies {kind}, expected hechler mod {f.spec()}")
        for q in t.states:
            r, c = cert.rank(q), cert.config_of(q)
            if r is None:
                bad.append(f"{q}: fixpoint configuration inside a Hechler certificate")
                continue
            if (r == 0) != (not c):
                bad.append(f"{q}: corank {r} does not match configuration {sorted(c)}")
            if r > 0:
                for _, n in t.rules(q):
                    rn = cert.rank(n)
                    if rn is None or rn >= r:
                        bad.append(f"{q} -> {n}: corank does not descend ({r} -> {rn})")
    else:
        if kind not in ("hechler", "laver"):
            bad.append(f"tree classifies {kind}, expected laver mod {f.spec()}")
        for q in t.states:
            if not cert.config_of(q):
                bad.append(f"{q}: dead configuration inside a Laver certificate")
            if cert.rank(q) is not None:
                bad.append(f"{q}: ranked configuration inside a Laver certificate")

    rng = random.Random(seed)
    want = cert.verdict == LAVER_INSIDE
    samples = 0
    for _ in range(budget):
        try:
            x = sample_lasso(t, rng)
        except ValueError as exc:
            bad.append(f"branch sampling failed: {exc}")
            break
        samples += 1
        if p.member_lasso(x) != want:
            bad.append(f"branch {x.literal()} is {'outside' if want else 'inside'} the set")
            break
    return CheckReport(bad, samples)


# -- text form ------------------------------------------------------------------


def certificate_node(cert: DichotomyCertificate):
    from .sexpr import Int, Str, Sym, automaton_node, form, set_node, tree_node

    kind, _, seed = cert.filter_spec.partition(":")
    filt = form("filter", Sym(kind))
    if seed:
        from .sexpr import parse_set

        filt.append(set_node(parse_set(seed)))
    decisions = form("decisions", *(form("yes" if v else "no", set_node(s)) for s, v in cert.decisions))
    configs = form("configs")
    for name, (states, r) in cert.configs.items():
        configs.append(form("config", Sym(name), form(*states) if states else form_empty(),
                            Sym("gfp") if r is None else Int(r)))
    return form("certificate", form("verdict", Sym(cert.verdict)), form("digest", Str(cert.digest)), filt,
                decisions, automaton_node(cert.automaton), tree_node(cert.tree), configs)


def form_empty():
    from .sexpr import Form

    return Form()


def to_certificate(node) -> DichotomyCertificate:
    from .sexpr import (Int, Str, expect_form, fail, format_set, head, symbol, to_automaton, to_set,
                        to_tree)

    parts = {head(part): part for part in expect_form(node, "certificate")}
    needed = ["verdict", "digest", "filter", "decisions", "aut", "tree", "configs"]
    for key in needed:
        if key not in parts:
            fail(node, f"certificate lacks ({key} ...)")
    verdict = symbol(parts["verdict"][1])
    digest_node = parts["digest"][1]
    if not isinstance(digest_node, Str):
        fail(digest_node, "digest must be a quoted string")
    filt = parts["filter"]
    spec = symbol(filt[1])
    if len(filt) > 2:
        spec += ":" + format_set(to_set(filt[2]))
    decisions = []
    for d in parts["decisions"][1:]:
        if head(d) not in ("yes", "no") or len(d) != 2:
            fail(d, "expected (yes SET) or (no SET)")
        decisions.append((to_set(d[1]), head(d) == "yes"))
    configs = {}
    for c in parts["configs"][1:]:
        body = expect_form(c, "config")
        if len(body) != 3 or not isinstance(body[1], list):
            fail(c, "expected (config NAME (STATE ...) RANK)")
        r = body[2]
        rank = None if head(r) == "gfp" else int(r) if isinstance(r, Int) else fail(r, "rank must be a natural or gfp")
        configs[symbol(body[0])] = (tuple(symbol(s) for s in body[1]), rank)
    aut = to_automaton(parts["aut"])
    return DichotomyCertificate(verdict, to_tree(parts["tree"]), configs, spec, decisions, aut, str(digest_node))


def parse_certificate(text: str) -> DichotomyCertificate:
    from .sexpr import parse_one

    return to_certificate(parse_one(text))
