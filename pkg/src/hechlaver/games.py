"""Game 1 and Game 2: strategies, strategy/tree conversions and matches.

Game 1: player I plays ``n_k``, player II answers ``m_k > n_k``.
Game 2: player I plays an infinite set ``X_k``, player II answers
``m_k in X_k`` (the displayed indexing ``m_0 in X_1`` in the usual
statement of this game is read as a typo for ``m_k in X_k``).
In both games II wins iff ``(m_k)`` lies in the payoff set ``A``.

A history is the list of completed rounds ``(a_k, m_k)``.  Strategies
expose ``key(history)``: a finite summary from which all their future
behaviour is determined, or None when no such summary exists.  Matches use
it to detect eventually periodic plays and decide them exactly.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence, TextIO

from .filters import Frechet
from .presentations import PairAutomaton
from .setalg import ALL, PeriodicSet, union_all
from .trees import (Lasso, RegularTree, ThresholdFunction, from_threshold,
                    threshold_bound)

G1, G2 = "g1", "g2"
I_WINS, II_WINS, UNDECIDED, ILLEGAL = "iWins", "iiWins", "undecidedAtBudget", "illegalMove"


class StrategyError(ValueError):
    pass


class StrategyRefuted(StrategyError):
    """A Game 2 strategy for II whose answers are not cofinite somewhere."""

    def __init__(self, history, refutation: PeriodicSet):
        self.history, self.refutation = tuple(history), refutation
        super().__init__(f"after {list(self.history)} the answers miss infinitely many moves; "
                         f"I refutes with X = {refutation.literal()}")


class ScriptEnded(Exception):
    pass


def _plays(history) -> tuple:
    return tuple(m for _, m in history)


class Strategy:
    game: str
    role: str

    def move(self, history, offer=None):
        raise NotImplementedError

    def key(self, history):
        return None


class TreeWalkStrategy(Strategy):
    """Follow a tree: the four ways of turning a tree into a strategy.

    g1/I   plays the least ``b`` with ``(b, oo)`` inside the successor set;
    g1/II  answers the least successor above ``n``;
    g2/I   plays the successor set itself;
    g2/II  answers the least element of ``X`` among the successors.
    Once the play has left the tree the strategy plays trivially.
    """

    needs = {(G1, "I"): "hechler", (G1, "II"): "laver", (G2, "I"): "laver", (G2, "II"): "hechler"}

    def __init__(self, tree: RegularTree, game: str, role: str):
        if tree.root:
            raise StrategyError("strategies are read off trees with a trivial root")
        need = self.needs[game, role]
        kind = tree.classify(Frechet())
        if need == "laver" and kind == "neither" or need == "hechler" and kind != "hechler":
            raise StrategyError(f"{game} strategy for {role} needs a {need} tree, got {kind}")
        self.tree, self.game, self.role = tree, game, role
        self._positions = {(): tree.start()}

    def position(self, history):
        plays = _plays(history)
        k = len(plays)
        while plays[:k] not in self._positions:
            k -= 1
        pos = self._positions[plays[:k]]
        for i in range(k, len(plays)):
            pos = None if pos is None else self.tree.advance(pos, plays[i])
            self._positions[plays[:i + 1]] = pos
        return pos

    def key(self, history):
        return self.position(history)

    def move(self, history, offer=None):
        pos = self.position(history)
        succ = self.tree.successors_at(pos) if pos is not None else None
        if self.game == G1 and self.role == "I":
            return threshold_bound(succ) if succ is not None else 0
        if self.game == G1:
            m = succ.min_above(offer) if succ is not None else None
            return offer + 1 if m is None else m
        if self.role == "I":
            return succ if succ is not None else ALL
        m = (offer & succ).min() if succ is not None else None
        return offer.min() if m is None else m


class ThresholdStrategy(Strategy):
    """Game 1 player I playing ``sigma(m_0, ..., m_{k-1})``."""

    game, role = G1, "I"

    def __init__(self, sigma: ThresholdFunction):
        self.sigma = sigma

    def move(self, history, offer=None):
        return self.sigma(_plays(history))

    def key(self, history):
        return self.sigma.key(_plays(history))


class LassoStrategy(Strategy):
    """Player I ignoring the opponent: moves ``stem`` then ``loop`` forever."""

    role = "I"

    def __init__(self, game: str, stem: Sequence, loop: Sequence):
        if not loop:
            raise StrategyError("lasso strategy needs a nonempty loop")
        self.game, self.stem, self.loop = game, tuple(stem), tuple(loop)

    def _index(self, k: int) -> int:
        if k < len(self.stem):
            return k
        return len(self.stem) + (k - len(self.stem)) % len(self.loop)

    def move(self, history, offer=None):
        i = self._index(len(history))
        return self.stem[i] if i < len(self.stem) else self.loop[i - len(self.stem)]

    def key(self, history):
        return self._index(len(history))


class CellStrategyII(Strategy):
    """Game 2 player II that scans disjoint cells in priority order.

    In state ``q`` the answer to ``X`` is the least element of ``X`` in the
    first listed cell that meets ``X``; the state then follows that cell's
    transition.  If no cell meets ``X`` there is no answer (an illegal
    move).
    """

    game, role = G2, "II"

    def __init__(self, rules: dict, initial: Optional[str] = None):
        self.rules = {q: tuple(rs) for q, rs in rules.items()}
        self.initial = initial if initial is not None else next(iter(rules))
        for q, rs in self.rules.items():
            for i in range(len(rs)):
                for j in range(i + 1, len(rs)):
                    if not rs[i][0].isdisjoint(rs[j][0]):
                        raise StrategyError(f"state {q}: cells overlap")
                if rs[i][1] not in self.rules:
                    raise StrategyError(f"state {q}: unknown target {rs[i][1]}")

    def state(self, history) -> Optional[str]:
        q = self.initial
        for _, m in history:
            q = next((n for c, n in self.rules[q] if m in c), None)
            if q is None:
                return None
        return q

    def key(self, history):
        return self.state(history)

    def move(self, history, offer=None):
        q = self.state(history)
        if q is None:
            return offer.min()
        for c, _ in self.rules[q]:
            meet = offer & c
            if meet:
                return meet.min()
        return None

    def answers(self, q: str) -> PeriodicSet:
        """All moves this strategy can be driven to answer in state ``q``."""
        cells = [c for c, _ in self.rules[q]]
        uncovered = union_all(cells).complement()
        out = []
        for i, c in enumerate(cells):
            if c and (union_all(cells[i:]) | uncovered).is_infinite():
                out.append(c)
        return union_all(out)


class RandomStrategy(Strategy):
    """Seeded random legal play; sizes are geometric so small moves dominate."""

    def __init__(self, game: str, role: str, seed: int = 0):
        self.game, self.role = game, role
        self.rng = random.Random(seed)

    def _geom(self) -> int:
        k = 0
        while self.rng.random() < 0.5:
            k += 1
        return k

    def move(self, history, offer=None):
        if self.game == G1:
            return self._geom() + self.rng.randint(0, 3) if self.role == "I" else offer + 1 + self._geom()
        if self.role == "II":
            return offer.nth(self._geom())
        return random_infinite_set(self.rng)


def random_infinite_set(rng: random.Random) -> PeriodicSet:
    p = rng.randint(1, 4)
    period = "".join(rng.choice("01") for _ in range(p))
    if "1" not in period:
        period = "1" + period[1:]
    prefix = "".join(rng.choice("01") for _ in range(rng.randint(0, 3)))
    return PeriodicSet(prefix, period)


class ScriptedStrategy(Strategy):
    """Plays a fixed list of moves, whatever happens."""

    def __init__(self, game: str, role: str, moves: Sequence):
        self.game, self.role, self.moves = game, role, list(moves)

    def move(self, history, offer=None):
        if len(history) >= len(self.moves):
            raise ScriptEnded()
        return self.moves[len(history)]


# -- conversions ---------------------------------------------------------------


def g1_strategy_from_hechler(h: RegularTree) -> Strategy:
    return TreeWalkStrategy(h, G1, "I")


def _lasso_threshold(s: LassoStrategy) -> ThresholdFunction:
    names = [f"L{i}" for i in range(len(s.stem) + len(s.loop))]
    moves = list(s.stem) + list(s.loop)
    trans = {}
    for i, q in enumerate(names):
        nxt = i + 1 if i + 1 < len(names) else len(s.stem)
        trans[q] = ((ALL, names[nxt]),)
    return ThresholdFunction(dict(zip(names, moves)), trans, names[0])


def g1_hechler_from_strategy(sigma: Strategy) -> RegularTree:
    """The tree ``H_sigma`` of plays consistent with I's strategy ``sigma``."""
    if isinstance(sigma, ThresholdStrategy):
        return from_threshold(sigma.sigma)
    if isinstance(sigma, TreeWalkStrategy) and (sigma.game, sigma.role) == (G1, "I"):
        t = sigma.tree
        bounds = {q: threshold_bound(t.guard(q)) for q in t.states}
        return from_threshold(ThresholdFunction(bounds, {q: t.rules(q) for q in t.states}, t.initial))
    if isinstance(sigma, LassoStrategy) and sigma.game == G1:
        return from_threshold(_lasso_threshold(sigma))
    raise StrategyError("only finitely presented Game 1 strategies for I can be converted")


def g1_strategy_ii_from_laver(l: RegularTree) -> Strategy:
    return TreeWalkStrategy(l, G1, "II")


def g1_laver_from_strategy_ii(sigma: Strategy) -> RegularTree:
    """All answers II's strategy can give, collected into a tree.

    A tree walk answers every successor except ``0`` (no move exceeds a
    natural number by landing on ``0``).
    """
    if isinstance(sigma, TreeWalkStrategy) and (sigma.game, sigma.role) == (G1, "II"):
        t = sigma.tree
        above = PeriodicSet.above(0)
        rules = {q: [(g & above, n) for g, n in t.rules(q)] for q in t.states}
        return RegularTree.trimmed(rules, t.initial)
    raise StrategyError("only tree-walk Game 1 strategies for II can be converted")


def collect_g1_responses(sigma: Strategy, depth: int, offers=range(21)) -> set:
    """Nodes of length <= depth reachable against the given opponent moves."""
    nodes, layer = {()}, [[]]
    for _ in range(depth):
        nxt = []
        for hist in layer:
            for n in offers:
                m = sigma.move(hist, n)
                if m is None or m <= n:
                    raise StrategyError(f"illegal answer {m} to {n}")
                h2 = hist + [(n, m)]
                if _plays(h2) not in nodes:
                    nodes.add(_plays(h2))
                    nxt.append(h2)
        layer = nxt
    return nodes


def g2_strategy_from_laver_i(l: RegularTree) -> Strategy:
    return TreeWalkStrategy(l, G2, "I")


def g2_laver_from_strategy_i(sigma: Strategy) -> RegularTree:
    """The tree whose successor sets are the sets ``X_s`` played by I."""
    if isinstance(sigma, TreeWalkStrategy) and (sigma.game, sigma.role) == (G2, "I"):
        t = sigma.tree
        return RegularTree({q: list(t.rules(q)) for q in t.states}, t.initial)
    if isinstance(sigma, LassoStrategy) and sigma.game == G2:
        names = [f"L{i}" for i in range(len(sigma.stem) + len(sigma.loop))]
        moves = list(sigma.stem) + list(sigma.loop)
        rules = {}
        for i, q in enumerate(names):
            nxt = i + 1 if i + 1 < len(names) else len(sigma.stem)
            if not moves[i].is_infinite():
                raise StrategyError(f"move {moves[i].literal()} is not an infinite set")
            rules[q] = [(moves[i], names[nxt])]
        return RegularTree(rules, names[0])
    raise StrategyError("only finitely presented Game 2 strategies for I can be converted")


def g2_strategy_ii_from_hechler(h: RegularTree) -> Strategy:
    return TreeWalkStrategy(h, G2, "II")


def g2_hechler_from_strategy_ii(sigma: Strategy) -> RegularTree:
    """The tree of all answers of II; raises StrategyRefuted when some answer set is not cofinite."""
    if isinstance(sigma, TreeWalkStrategy) and (sigma.game, sigma.role) == (G2, "II"):
        t = sigma.tree
        return RegularTree({q: list(t.rules(q)) for q in t.states}, t.initial)
    if not isinstance(sigma, CellStrategyII):
        raise StrategyError("only cell-constant Game 2 strategies for II can be converted")
    rules, todo, seen = {}, [sigma.initial], {sigma.initial}
    paths = {sigma.initial: ()}
    while todo:
        q = todo.pop(0)
        answers = sigma.answers(q)
        if not answers.is_cofinite():
            raise StrategyRefuted(paths[q], answers.complement())
        rules[q] = [(c & answers, n) for c, n in sigma.rules[q] if c & answers]
        for c, n in rules[q]:
            if n not in seen:
                seen.add(n)
                paths[n] = paths[q] + (c.min(),)
                todo.append(n)
    return RegularTree(rules, sigma.initial)


def strategies_agree(s1: Strategy, s2: Strategy, depth: int, cells: Sequence[PeriodicSet],
                     probes: Sequence = ()) -> bool:
    """Move-by-move comparison on all legally reachable positions up to ``depth``.

    Positions are explored by joint key.  Against player I the opponent
    answers with one representative per cell (the least legal one); player
    II is offered every move in ``probes`` and its own answers extend the
    play.  This covers everything when both strategies only depend on their
    keys and are constant on the cells.
    """
    layer = {(s1.key([]), s2.key([])): []}
    for _ in range(depth + 1):
        nxt = {}
        for hist in layer.values():
            steps = []
            if s1.role == "I":
                a = s1.move(hist)
                if a != s2.move(hist):
                    return False
                for c in cells:
                    m = c.min_above(a) if s1.game == G1 else (c & a).min() if c & a else None
                    if m is not None:
                        steps.append((a, m))
            else:
                for x in probes:
                    m = s1.move(hist, x)
                    if m != s2.move(hist, x):
                        return False
                    if m is not None:
                        steps.append((x, m))
            for step in steps:
                h2 = hist + [step]
                nxt.setdefault((s1.key(h2), s2.key(h2)), h2)
        layer = nxt
    return True


# -- matches --------------------------------------------------------------------


@dataclass
class GameTranscript:
    game: str
    rounds: list = field(default_factory=list)  # (a_k, m_k)
    outcome: str = UNDECIDED
    evidence: str = ""
    pending: Optional[tuple] = None  # (role, move) of an illegal move

    def plays(self) -> tuple:
        return _plays(self.rounds)

    def to_text(self) -> str:
        from .sexpr import format_set

        def show(x):
            return format_set(x) if isinstance(x, PeriodicSet) else str(x)

        lines = [f"game {self.game}"]
        for a, m in self.rounds:
            lines += [f"I {show(a)}", f"II {show(m)}"]
        if self.pending:
            lines.append(f"{self.pending[0]} {show(self.pending[1])}")
        lines.append(f"outcome {self.outcome}" + (f": {self.evidence}" if self.evidence else ""))
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "GameTranscript":
        from .sexpr import ParseError, parse_set

        lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
        if not lines or not lines[0].startswith("game "):
            raise ParseError("transcript must start with 'game g1' or 'game g2'", 1, 1)
        game = lines[0].split()[1]
        if game not in (G1, G2):
            raise ParseError(f"unknown game {game!r}", 1, 6)
        if not lines[-1].startswith("outcome "):
            raise ParseError("transcript must end with an outcome line", len(lines), 1)
        t = cls(game)
        head, _, ev = lines[-1][len("outcome "):].partition(":")
        t.outcome, t.evidence = head.strip(), ev.strip()
        moves = []
        for i, ln in enumerate(lines[1:-1], start=2):
            role, _, body = ln.partition(" ")
            if role not in ("I", "II"):
                raise ParseError(f"expected 'I' or 'II', got {role!r}", i, 1)
            if role != ("I" if len(moves) % 2 == 0 else "II"):
                raise ParseError("moves must alternate I, II", i, 1)
            try:
                mv = parse_set(body) if game == G2 and role == "I" else int(body)
            except ValueError as exc:
                raise ParseError(f"bad move {body!r}: {exc}", i, len(role) + 2)
            moves.append(mv)
        t.rounds = [(moves[k], moves[k + 1]) for k in range(0, len(moves) - 1, 2)]
        if len(moves) % 2:
            t.pending = ("I", moves[-1])
        return t


def illegal_reason(game: str, role: str, move, offer=None) -> Optional[str]:
    """Why ``move`` is illegal, or None when it is legal."""
    if role == "I":
        if game == G1:
            if not isinstance(move, int) or isinstance(move, bool) or move < 0:
                return f"{move!r} is not a natural number"
        elif not isinstance(move, PeriodicSet) or not move.is_infinite():
            return f"{move!r} is not an infinite set"
        return None
    if not isinstance(move, int) or isinstance(move, bool) or move < 0:
        return f"{move!r} is not a natural number"
    if game == G1 and move <= offer:
        return f"{move} does not exceed {offer}"
    if game == G2 and move not in offer:
        return f"{move} is not in {offer.literal()}"
    return None


def play_match(game: str, player_i: Strategy, player_ii: Strategy, payoff: PairAutomaton,
               budget: int = 50, on_round: Optional[Callable] = None) -> GameTranscript:
    """Play up to ``budget`` rounds; II wins iff the play lies in ``payoff``'s set."""
    t = GameTranscript(game)
    c = payoff.initial_config()
    seen: dict = {}
    for k in range(budget):
        ki, kii = player_i.key(t.rounds), player_ii.key(t.rounds)
        if ki is not None and kii is not None:
            joint = (ki, kii, c)
            if joint in seen:
                ms = t.plays()
                x = Lasso(ms[:seen[joint]], ms[seen[joint]:])
                t.outcome = II_WINS if payoff.member_lasso(x) else I_WINS
                t.evidence = f"play repeats as {x.literal()}"
                return t
            seen[joint] = k
        try:
            a = player_i.move(t.rounds)
            why = illegal_reason(game, "I", a)
            if why:
                t.pending, t.outcome, t.evidence = ("I", a), ILLEGAL, f"I: {why}"
                return t
            m = player_ii.move(t.rounds, a)
        except ScriptEnded:
            t.evidence = f"script ended after {k} rounds"
            return t
        why = illegal_reason(game, "II", m, a)
        if why:
            t.rounds.append((a, m))
            t.outcome, t.evidence = ILLEGAL, f"II: {why}"
            return t
        t.rounds.append((a, m))
        c = payoff.step(c, m)
        if on_round:
            on_round(t, c)
        if not c:
            t.outcome, t.evidence = I_WINS, f"witness configuration dead after round {k}"
            return t
    t.evidence = f"alive after {budget} rounds"
    return t


def validate_transcript(t: GameTranscript, payoff: PairAutomaton) -> list[str]:
    """Re-check legality and the recorded outcome of a transcript."""
    problems = []
    rounds = t.rounds
    last_illegal = t.outcome == ILLEGAL and t.evidence.startswith("II")
    for k, (a, m) in enumerate(rounds):
        why = illegal_reason(t.game, "I", a)
        if why:
            problems.append(f"round {k}: I: {why}")
        why = illegal_reason(t.game, "II", m, a) if not why else None
        if why and not (last_illegal and k == len(rounds) - 1):
            problems.append(f"round {k}: II: {why}")
    configs = payoff.configs_along(t.plays())
    death = next((i for i, c in enumerate(configs) if not c), None)
    if t.outcome == I_WINS and t.evidence.startswith("witness"):
        if death is None:
            problems.append("recorded death but the play is alive")
        elif death != len(rounds):
            problems.append(f"configuration died at round {death - 1}, recorded later")
    elif t.outcome in (I_WINS, II_WINS):
        from .sexpr import parse_one, to_lasso

        try:
            x = to_lasso(parse_one(t.evidence.split("as", 1)[1]))
        except (ValueError, IndexError):
            problems.append("outcome lacks a lasso witness")
            return problems
        if x.prefix(len(rounds)) != t.plays():
            problems.append("lasso witness does not extend the recorded play")
        if payoff.member_lasso(x) != (t.outcome == II_WINS):
            problems.append("lasso witness decides the other way")
    elif death is not None and t.outcome != ILLEGAL:
        problems.append(f"configuration dead at round {death - 1} but outcome is {t.outcome}")
    return problems


# -- interactive play ---------------------------------------------------------------


class HumanStrategy(Strategy):
    """Reads moves from a stream, re-prompting until a legal one arrives."""

    def __init__(self, game: str, role: str, stream: TextIO, out: TextIO, echo: bool = False):
        self.game, self.role, self.stream, self.out, self.echo = game, role, stream, out, echo

    def _prompt(self, history, offer) -> str:
        k = len(history)
        if self.role == "I":
            menu = "a natural number" if self.game == G1 else "an infinite set, e.g. (per \"\" \"10\") or (cofin 0 1)"
        elif self.game == G1:
            menu = f"a natural number greater than {offer}"
        else:
            menu = f"an element of {offer.describe()}"
        return f"round {k}, you are {self.role}: play {menu}> "

    def move(self, history, offer=None):
        from .sexpr import parse_set

        while True:
            self.out.write(self._prompt(history, offer))
            line = self.stream.readline()
            if not line:
                self.out.write("\n")
                raise ScriptEnded()
            text = line.strip()
            if self.echo:
                self.out.write(text + "\n")
            if not text or text.startswith("#"):
                continue
            try:
                mv = parse_set(text) if self.game == G2 and self.role == "I" else int(text)
            except ValueError as exc:
                self.out.write(f"cannot read {text!r}: {exc}\n")
                continue
            why = illegal_reason(self.game, self.role, mv, offer)
            if why:
                self.out.write(f"illegal: {why}\n")
                continue
            return mv


def interactive_session(game: str, human_role: str, payoff: PairAutomaton, machine: Strategy,
                        stream: TextIO, out: TextIO, budget: int = 20, echo: bool = False,
                        color: bool = False) -> GameTranscript:
    human = HumanStrategy(game, human_role, stream, out, echo)
    if machine.role == human_role:
        raise StrategyError(f"machine strategy plays {machine.role}, the same role as the human")
    player_i, player_ii = (human, machine) if human_role == "I" else (machine, human)

    def show(t, c):
        a, m = t.rounds[-1]
        a_text = a.describe() if isinstance(a, PeriodicSet) else a
        state = "alive " + "{" + ", ".join(payoff.sort_config(c)) + "}" if c else "dead"
        if color:
            state = ("\x1b[32m" if c else "\x1b[31m") + state + "\x1b[0m"
        out.write(f"  I played {a_text}, II played {m}; configuration {state}\n")

    t = play_match(game, player_i, player_ii, payoff, budget, on_round=show)
    out.write(f"outcome {t.outcome}" + (f": {t.evidence}" if t.evidence else "") + "\n")
    return t


def machine_strategy(tree: RegularTree, verdict: str, game: str, role: str) -> Strategy:
    """The winning strategy a dichotomy certificate provides for ``role``."""
    if verdict == "hechlerMiss" and role == "I":
        return TreeWalkStrategy(tree, game, "I")
    if verdict == "laverInside" and role == "II":
        return TreeWalkStrategy(tree, game, "II")
    raise StrategyError(f"a {verdict} certificate gives no {game} strategy for {role}")


def tree_cells(*trees: RegularTree) -> list[PeriodicSet]:
    """Common refinement of the guards of several trees."""
    from .setalg import refine

    return [c for c, _ in refine([g for t in trees for q in t.states for g, _ in t.rules(q)])]
