import itertools
import random

import pytest
from hypothesis import given, settings, strategies as st

from hechlaver.presentations import DEAD, PairAutomaton, PresentationError
from hechlaver.setalg import ALL, PeriodicSet
from hechlaver.sexpr import format_automaton, parse_one, to_automaton
from hechlaver.trees import Lasso

from gen import random_automaton
from oracles import brute_member, brute_residual

EVENS = PeriodicSet.residue(0, 2)
# exists a constant y with every x(n) > y(0): guess y(0) = c in state "c"
CONST = PairAutomaton({
    "s": [(PeriodicSet.above(c), PeriodicSet.finite([c]), f"k{c}") for c in range(3)],
    **{f"k{c}": [(PeriodicSet.above(c), PeriodicSet.finite([c]), f"k{c}")] for c in range(3)},
})


def raw(p):
    """Predicates for the brute-force oracles, read off the guards bitwise."""
    return {q: [(xg.bit, yg.bit, n) for xg, yg, n in p.rules(q)] for q in p.states}


def y_symbols(p):
    cells = PairAutomaton({"y": [(yg, ALL, "y") for q in p.states for _, yg, _ in p.rules(q)]}).cells
    return sorted(set(range(8)) | {c.min() for c in cells})


def test_step_examples():
    p = PairAutomaton({"q": [(ALL, ALL, "q")]})
    assert p.step(DEAD, 3) == DEAD
    assert p.step(p.initial_config(), 5) == {"q"}
    assert p.reachable_configs() == [frozenset({"q"})]


def test_residual_examples():
    p = PairAutomaton({"q": [(ALL, EVENS, "q")]})
    assert p.residual((), ()) == {"q"}
    assert p.residual((4,), (1,)) == DEAD
    with pytest.raises(PresentationError):
        p.residual((1,), (1, 2))


def test_member_lasso_examples():
    everything = PairAutomaton({"q": [(ALL, ALL, "q")]})
    assert everything.member_lasso(Lasso((), (3, 1)))
    evens_only = PairAutomaton({"q": [(EVENS, ALL, "q")]})
    assert not evens_only.member_lasso(Lasso((), (1,)))
    assert CONST.member_lasso(Lasso((), (1,)))
    assert not CONST.member_lasso(Lasso((1,), (0,)))
    with pytest.raises(ValueError):
        Lasso((1,), ())


def test_member_lasso_const_brute():
    for x in [Lasso((), (1,)), Lasso((1,), (0,)), Lasso((2, 3), (1, 5))]:
        assert CONST.member_lasso(x) == brute_member(raw(CONST), "s", x.stem, x.loop, range(5), 30)


def test_witness_examples():
    everything = PairAutomaton({"q": [(ALL, ALL, "q")]})
    assert everything.witness_for_branch((4, 4, 4)) == (0, 0, 0)
    y = CONST.witness_for_branch((1, 1, 1))
    assert y == (0, 0, 0)
    assert CONST.residual((1, 1, 1), y)
    with pytest.raises(PresentationError):
        CONST.witness_for_branch((1, 0))


def test_empty_y_guard_stripped():
    p = PairAutomaton({"q": [(ALL, PeriodicSet.empty(), "q")]})
    assert p.rules("q") == ()
    assert p.step(p.initial_config(), 0) == DEAD


def test_unreachable_rejected():
    with pytest.raises(PresentationError):
        PairAutomaton({"q": [(ALL, ALL, "q")], "r": [(ALL, ALL, "r")]})


def test_text_roundtrip_and_digest():
    text = format_automaton(CONST)
    p = to_automaton(parse_one(text))
    assert format_automaton(p) == text and p.digest() == CONST.digest()


@given(st.integers(0, 2 ** 31))
@settings(max_examples=60, deadline=None)
def test_step_and_residual_against_brute_force(seed):
    rng = random.Random(seed)
    p = random_automaton(rng, 4)
    r, ys = raw(p), y_symbols(p)
    for c in p.reachable_configs():
        for cell in p.cells:
            a = cell.min()
            want = frozenset(n for q in c for xg, _, n in r[q] if xg(a))
            assert p.step(c, a) == want
            b = cell.nth(1) if cell.is_infinite() or len(cell) > 1 else a
            assert p.step(c, b) == want
    for _ in range(10):
        s = tuple(rng.randint(0, 9) for _ in range(3))
        t = (rng.choice(ys),)
        assert p.residual(s, t) == brute_residual(r, p.initial, s, t, ys)
    s = tuple(rng.randint(0, 9) for _ in range(4))
    folded = p.initial_config()
    for a in s:
        folded = p.step(folded, a)
    assert p.residual(s, ()) == folded


@given(st.integers(0, 2 ** 31))
@settings(max_examples=60, deadline=None)
def test_member_lasso_against_brute_force(seed):
    rng = random.Random(seed)
    p = random_automaton(rng, 4)
    r, ys = raw(p), y_symbols(p)
    horizon = 2 ** len(p.states) * 4 + 20
    for _ in range(5):
        x = Lasso([rng.randint(0, 9) for _ in range(rng.randint(0, 3))],
                  [rng.randint(0, 9) for _ in range(rng.randint(1, 3))])
        assert p.member_lasso(x) == brute_member(r, p.initial, x.stem, x.loop, ys, horizon)
        if p.member_lasso(x):
            u = x.prefix(6)
            y = p.witness_for_branch(u)
            assert p.residual(u, y)


@given(st.integers(0, 2 ** 31))
@settings(max_examples=40, deadline=None)
def test_step_monotone(seed):
    rng = random.Random(seed)
    p = random_automaton(rng, 4)
    subsets = [frozenset(c) for k in range(len(p.states) + 1) for c in itertools.combinations(p.states, k)]
    for _ in range(20):
        c, d = rng.choice(subsets), rng.choice(subsets)
        c = c & d
        a = rng.randint(0, 12)
        assert p.step(c, a) <= p.step(d, a)
