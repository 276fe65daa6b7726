"""The ten acceptance criteria, one test each.

Every test records its outcome in ``conftest.CRITERIA`` so the terminal
summary prints one pass/fail line per criterion.
"""
import io
import itertools
import random
import time

from hechlaver.dichotomy import (HECHLER_MISS, LAVER_INSIDE, CertificateError, check_certificate,
                                 parse_certificate, solve_dichotomy)
from hechlaver.filters import Density, Frechet, LazyUltra
from hechlaver.games import (G1, G2, I_WINS, II_WINS, UNDECIDED, GameTranscript, LassoStrategy, RandomStrategy,
                             ScriptedStrategy, g1_hechler_from_strategy, g1_laver_from_strategy_ii,
                             g1_strategy_from_hechler, g1_strategy_ii_from_laver, g2_hechler_from_strategy_ii,
                             g2_laver_from_strategy_i, g2_strategy_from_laver_i, g2_strategy_ii_from_hechler,
                             interactive_session, machine_strategy, play_match, strategies_agree, tree_cells)
from hechlaver.presentations import PairAutomaton
from hechlaver.proofkit import RootedFamily, lemma1_union, sync_intersection
from hechlaver.ramsey import decode, extract_homogeneous_prefix, silver_extract
from hechlaver.setalg import ALL, EMPTY, PeriodicSet
from hechlaver.trees import common_branch, sample_lasso, subset_to_depth

from conftest import CRITERIA
from gen import (clopen_automaton, exhaustive_family, mask_pair, random_automaton, random_hechler, random_laver,
                 random_partition, random_set, random_sync_family)
from oracles import oracle_verdict, subsequences

F = Frechet()


def record(n, ok, title, detail):
    CRITERIA[n] = (ok, title, detail)
    print(f"criterion {n} {'PASS' if ok else 'FAIL'}: {title} ({detail})")
    assert ok, detail


def first_move(guard):
    return PairAutomaton({"q0": [(guard, ALL, "q1")], "q1": [(ALL, ALL, "q1")]})


ODD135 = first_move(PeriodicSet.finite([1, 3, 5]))
EVEN_START = first_move(PeriodicSet.residue(0, 2))


def random_instances(count, seed):
    rng = random.Random(seed)
    return [random_automaton(rng) for _ in range(count)]


# -- 1 ---------------------------------------------------------------------------


def test_criterion_1_oracle_equivalence():
    start = time.perf_counter()
    total = agree = 0
    mismatches = []
    for rules in exhaustive_family():
        pair = mask_pair(rules)
        if pair is None:
            continue
        p, aut = pair
        want = oracle_verdict(aut)
        for f in (F, Density()):
            total += 1
            got = solve_dichotomy(p, f).verdict
            if got == want:
                agree += 1
            elif len(mismatches) < 3:
                mismatches.append(rules)
    elapsed = time.perf_counter() - start
    instances = total // 2
    ok = instances >= 500 and agree == total and elapsed < 60
    record(1, ok, "dichotomy agrees with the backward-induction oracle",
           f"{instances} instances x 2 filters, {agree}/{total} agree, {elapsed:.1f}s"
           + (f", first mismatches {mismatches}" if mismatches else ""))


# -- 2 and 3 ---------------------------------------------------------------------


def _corrupted_fixtures():
    """(description, instance, tampered certificate)."""
    def corrupt(p, f, old, new):
        text = solve_dichotomy(p, f).to_text()
        assert old in text
        return parse_certificate(text.replace(old, new, 1))

    out = [
        ("verdict flipped", ODD135, corrupt(ODD135, F, "hechlerMiss", "laverInside")),
        ("guard shrunk", ODD135, corrupt(ODD135, F, '(rule (per "101010" "1") c1)', '(rule (per "" "10") c1)')),
        ("corank forged", ODD135, corrupt(ODD135, F, "(config c0 (q0) 1)", "(config c0 (q0) 0)")),
        ("decision flipped", ODD135, corrupt(ODD135, LazyUltra(), '(yes (per "" "1"))', '(no (per "" "1"))')),
        ("laver guard widened", EVEN_START,
         corrupt(EVEN_START, F, '(rule (per "" "10") c1)', '(rule (per "" "1") c1)')),
        ("other instance", EVEN_START, solve_dichotomy(ODD135, F)),
    ]
    cert = solve_dichotomy(ODD135, F)
    out.append(("digest zeroed", ODD135, parse_certificate(cert.to_text().replace(cert.digest, "0" * 64))))
    return out


def _rejected(p, cert):
    try:
        return not check_certificate(p, cert).ok
    except CertificateError:
        return True


HECHLER_CERTS: list = []


def test_criterion_2_certificate_soundness():
    checked = violations = 0
    first = None
    for kind, f_make in (("frechet", Frechet), ("density", Density)):
        for i, p in enumerate(random_instances(200, 2000 if kind == "frechet" else 3000)):
            cert = parse_certificate(solve_dichotomy(p, f_make()).to_text())
            report = check_certificate(p, cert, budget=100, seed=i)
            checked += 1
            if not report.ok or report.samples != 100:
                violations += 1
                first = first or (kind, i, report.violations)
            if cert.verdict == HECHLER_MISS:
                HECHLER_CERTS.append((p, cert, i))
    fixtures = _corrupted_fixtures()
    accepted = [name for name, p, cert in fixtures if not _rejected(p, cert)]
    ok = violations == 0 and not accepted
    record(2, ok, "certificates pass the independent checker",
           f"{checked} certificates, {violations} with violations, "
           f"{len(fixtures) - len(accepted)}/{len(fixtures)} corrupted fixtures rejected"
           + (f", first failure {first}" if first else "") + (f", accepted {accepted}" if accepted else ""))


def test_criterion_3_corank_descent():
    if not HECHLER_CERTS:  # run standalone
        for i, p in enumerate(random_instances(200, 2000)):
            cert = solve_dichotomy(p, F)
            if cert.verdict == HECHLER_MISS:
                HECHLER_CERTS.append((p, cert, i))
    branches = exceptions = 0
    for p, cert, seed in HECHLER_CERTS:
        t = cert.tree
        bound = cert.rank(t.initial)
        rng = random.Random(seed)
        for _ in range(100):
            x = sample_lasso(t, rng)
            branches += 1
            state, rank, steps = t.initial, bound, 0
            configs = p.configs_along(x.prefix(bound + 1))
            fine = True
            while rank > 0:
                nxt = t.next_state(state, x[steps])
                if nxt is None or cert.rank(nxt) is None or cert.rank(nxt) >= rank:
                    fine = False
                    break
                state, rank, steps = nxt, cert.rank(nxt), steps + 1
            if not fine or steps > bound or configs[steps]:
                exceptions += 1
    ok = exceptions == 0 and branches > 0
    record(3, ok, "corank strictly descends to the dead configuration",
           f"{len(HECHLER_CERTS)} hechlerMiss certificates, {branches} branches, {exceptions} exceptions")


# -- 4 ---------------------------------------------------------------------------


def test_criterion_4_exclusivity():
    rng = random.Random(4)
    both_laver = both_hechler = branch_failures = 0
    demos = 0
    for i in range(50):
        a, comp = clopen_automaton(rng, rng.randint(1, 3), flip=bool(i % 2))
        seed = random_set(rng) if i % 3 == 0 else None
        while seed is not None and not seed.is_infinite():
            seed = random_set(rng)
        shared = LazyUltra(seed)
        ca, cc = solve_dichotomy(a, shared), solve_dichotomy(comp, shared)
        both_laver += ca.verdict == cc.verdict == LAVER_INSIDE
        both_hechler += ca.verdict == cc.verdict == HECHLER_MISS
        # the certificates fit together: a branch of the hechler tree (missing
        # its set) inside the laver tree (inside the other set) is consistent,
        # and would contradict a laver certificate for the first set
        for ch, cl, ph, pl in ((ca, cc, a, comp), (cc, ca, comp, a)):
            if ch.verdict == HECHLER_MISS and cl.verdict == LAVER_INSIDE:
                u = common_branch(ch.tree, cl.tree, 8)
                dead = not ph.configs_along(u)[-1]
                alive = bool(pl.configs_along(u)[-1])
                branch_failures += not (dead and alive)
                demos += 1
    ok = both_laver == 0 and both_hechler == 0 and branch_failures == 0 and demos == 50
    record(4, ok, "a set and its complement are never both laverInside",
           f"50 pairs, {both_laver} both laverInside, {both_hechler} both hechlerMiss, "
           f"{demos} common branches at depth 8, {branch_failures} inconsistent")


# -- 5 ---------------------------------------------------------------------------


def test_criterion_5_combinators():
    rng = random.Random(5)
    union_ok = sync_ok = 0
    for _ in range(100):
        root = tuple(rng.randint(0, 5) for _ in range(rng.randint(0, 2)))
        excluded = PeriodicSet.finite(rng.sample(range(6), rng.randint(0, 2)))
        parts = [(ix, random_hechler(rng)) for ix in random_partition(rng, ~excluded, rng.randint(1, 3))]
        fam = RootedFamily(root, parts, excluded)
        t = lemma1_union(fam, F)
        good = t.classify(F) == "hechler" and t.successor_set(root) == ~excluded
        for ix, template in parts:
            for n in itertools.islice(ix.elements(limit=40), 3):
                pair = (t.locate(root + (n,)), template.start())
                good &= subset_to_depth(t, template, 5, starts=pair)
                good &= subset_to_depth(template, t, 5, starts=pair[::-1])
        union_ok += good
    for _ in range(100):
        h, fam = random_sync_family(rng)
        t = sync_intersection(h, fam, F)
        good = t.classify(F) == "hechler" and subset_to_depth(t, h, 5)
        good &= all(subset_to_depth(t, k, 5) for k in fam)
        sync_ok += good
    ok = union_ok == 100 and sync_ok == 100
    record(5, ok, "union and synchronized intersection stay Hechler",
           f"union {union_ok}/100, intersection {sync_ok}/100, containment to depth 5")


# -- 6 ---------------------------------------------------------------------------


def test_criterion_6_all_subsequences():
    rng = random.Random(6)
    h = random_hechler(rng)
    while h.root:
        h = random_hechler(rng)
    start = time.perf_counter()
    xs = extract_homogeneous_prefix(h, F, 12)
    inside = sum(1 for sub in subsequences(xs) if decode(sub) in h)
    elapsed = time.perf_counter() - start
    ok = len(xs) == 12 and inside == 4095 and elapsed < 5
    record(6, ok, "every subsequence of the extracted prefix is a node",
           f"X = {xs}, {inside}/4095 subsequences inside, {elapsed:.2f}s")


# -- 7 ---------------------------------------------------------------------------


def gap_coloring(d, guard):
    states = {f"s{i}": [(ALL, ALL, f"s{i + 1}")] for i in range(d - 1)}
    states[f"s{d - 1}"] = [(guard, ALL, "acc")]
    states["acc"] = [(ALL, ALL, "acc")]
    return PairAutomaton(states, "s0")


def test_criterion_7_silver():
    results = []
    ok = True
    cases = [("gap parity", gap_coloring(2, PeriodicSet.residue(1, 2)), 2, 45,
              lambda s: (s[1] - s[0]) % 2 == 0),
             ("gap mod 3", gap_coloring(3, PeriodicSet.residue(2, 3)), 3, 120,
              lambda s: (s[2] - s[1]) % 3 == 0)]
    for name, coloring, d, expected, truth in cases:
        report = silver_extract(coloring, d, 10)
        colours = {truth(s) for s in itertools.combinations(report.X, d)}
        again = silver_extract(coloring, d, 10, LazyUltra.following(report.decisions))
        good = (len(report.X) == 10 and report.checked == expected and report.monochromatic
                and colours == {report.side == "inA"} and again.X == report.X)
        ok &= good
        results.append(f"{name}: X={report.X} {report.side} {report.checked} checked, replay "
                       + ("identical" if again.X == report.X else "differs"))
    record(7, ok, "Silver extraction yields monochromatic sets", "; ".join(results))


# -- 8 ---------------------------------------------------------------------------


def test_criterion_8_games():
    rng = random.Random(8)
    wins = matches = over_bound = 0
    lasso_wins = laver_matches = 0
    instance_seed = 0
    while matches < 500 or laver_matches < 100:
        p = random_automaton(rng)
        instance_seed += 1
        cert = solve_dichotomy(p, F)
        if cert.verdict == HECHLER_MISS and matches < 500:
            sigma = g1_strategy_from_hechler(cert.tree)
            bound = cert.rank(cert.tree.initial)
            for k in range(5):
                if matches == 500:
                    break
                t = play_match(G1, sigma, RandomStrategy(G1, "II", 10 * instance_seed + k), p, bound + 5)
                matches += 1
                wins += t.outcome == I_WINS
                over_bound += len(t.rounds) > bound
        elif cert.verdict == LAVER_INSIDE and laver_matches < 100 and cert.tree.classify(F) != "neither":
            tau = g1_strategy_ii_from_laver(cert.tree)
            stem = [rng.randint(0, 6) for _ in range(rng.randint(0, 3))]
            loop = [rng.randint(0, 6) for _ in range(rng.randint(1, 3))]
            t = play_match(G1, LassoStrategy(G1, stem, loop), tau, p, 500)
            laver_matches += 1
            lasso_wins += t.outcome == II_WINS and "lasso" in t.evidence

    roundtrips = []
    for seed in range(25):
        r = random.Random(seed)
        h, l = random_hechler(r), random_laver(r)
        s = g1_strategy_from_hechler(h)
        a = strategies_agree(s, g1_strategy_from_hechler(g1_hechler_from_strategy(s)), 6,
                             tree_cells(h, g1_hechler_from_strategy(s)))
        s = g1_strategy_ii_from_laver(l)
        b = strategies_agree(s, g1_strategy_ii_from_laver(g1_laver_from_strategy_ii(s)), 6, tree_cells(l),
                             probes=range(15))
        s = g2_strategy_from_laver_i(l)
        c = strategies_agree(s, g2_strategy_from_laver_i(g2_laver_from_strategy_i(s)), 6, tree_cells(l))
        s = g2_strategy_ii_from_hechler(h)
        probes = [random_set(r) | PeriodicSet.residue(r.randint(0, 2), 3) for _ in range(6)]
        d = strategies_agree(s, g2_strategy_ii_from_hechler(g2_hechler_from_strategy_ii(s)), 6, tree_cells(h),
                             probes=probes)
        roundtrips.append((a, b, c, d))
    identical = [all(col) for col in zip(*roundtrips)]
    ok = wins == 500 and over_bound == 0 and lasso_wins == 100 and all(identical)
    record(8, ok, "certificate strategies win their games",
           f"hechlerMiss: {wins}/500 iWins, {over_bound} past the corank bound; "
           f"laverInside: {lasso_wins}/100 iiWins by lasso; roundtrips identical {sum(identical)}/4 at depth 6")


# -- 9 ---------------------------------------------------------------------------


def test_criterion_9_filters():
    rng = random.Random(9)
    u = LazyUltra()
    kernel_finite = 0
    for _ in range(1000):
        s = random_set(rng, max_prefix=5, max_period=6)
        u.decide(s if rng.random() < 0.5 else s.complement())
        kernel_finite += not u.kernel.is_infinite()
    verdicts = dict(u.log)
    both = sum(1 for s, v in verdicts.items() if v and verdicts.get(s.complement()))
    neither = sum(1 for s in verdicts if not u.decide(s) and not u.decide(s.complement()))
    density = Density()
    axiom_failures = 0
    axiom_failures += not density.in_filter(ALL) or density.in_filter(EMPTY)
    for _ in range(1000):
        a, b = random_set(rng), random_set(rng)
        if density.in_filter(a) and density.in_filter(b) and not density.in_filter(a & b):
            axiom_failures += 1
        if density.in_filter(a) and not density.in_filter(a | b):
            axiom_failures += 1
        if density.in_filter(a) and not density.is_positive(a):
            axiom_failures += 1
        if density.in_filter(a) and density.in_filter(a.complement()):
            axiom_failures += 1
        if not a.is_infinite() and density.is_positive(a):
            axiom_failures += 1
    ok = kernel_finite == 0 and both == 0 and neither == 0 and axiom_failures == 0
    record(9, ok, "lazy ultrafilter stays consistent and density obeys the filter axioms",
           f"{len(u.log)} distinct ultra queries, {both} set/complement pairs both accepted, "
           f"{neither} pairs both rejected, {kernel_finite} finite kernels; {axiom_failures} density axiom failures")


# -- 10 --------------------------------------------------------------------------


def _session(game, payoff, script, human="II"):
    cert = solve_dichotomy(payoff, F)
    machine = machine_strategy(cert.tree, cert.verdict, game, "I" if human == "II" else "II")
    out = io.StringIO()
    t = interactive_session(game, human, payoff, machine, io.StringIO(script), out, echo=True)
    return t, out.getvalue()


def _token(rng):
    kind = rng.random()
    if kind < 0.2:
        return rng.choice(["", "x", "-3", "1.5", "(per", "all all"])
    return str(rng.randint(0, 12))


def _reprompts(out):
    """Every rejected input is followed by a prompt for the same round."""
    lines = out.splitlines()
    for i, line in enumerate(lines):
        if line.startswith(("illegal:", "cannot read")):
            before = lines[i - 1].split(",")[0] if i else None
            after = lines[i + 1].split(",")[0] if i + 1 < len(lines) else None
            if before is None or not before.startswith("round ") or before != after:
                return False
    return True


def test_criterion_10_repl():
    rng = random.Random(10)
    replay_diffs = reprompt_failures = late = undecided_ok = 0
    sessions = 0
    for game in (G1, G2):
        for _ in range(100):
            script = "\n".join(_token(rng) for _ in range(rng.randint(1, 6))) + "\n"
            t1, out1 = _session(game, ODD135, script)
            t2, out2 = _session(game, ODD135, script)
            sessions += 1
            text = t1.to_text()
            replay = play_match(game, ScriptedStrategy(game, "I", [a for a, _ in t1.rounds]),
                                ScriptedStrategy(game, "II", [m for _, m in t1.rounds]), ODD135)
            if out1 != out2 or text != t2.to_text() or GameTranscript.from_text(text).to_text() != text:
                replay_diffs += 1
            if t1.rounds and replay.to_text() != text:
                replay_diffs += 1
            if not _reprompts(out1):
                reprompt_failures += 1
            if t1.outcome == I_WINS:
                late += len(t1.rounds) > 2
            elif t1.outcome == UNDECIDED and "script ended" in t1.evidence and not t1.rounds:
                undecided_ok += 1
            else:
                late += 1
    decided = sessions - undecided_ok
    ok = replay_diffs == 0 and reprompt_failures == 0 and late == 0 and decided > 0
    record(10, ok, "scripted REPL sessions replay and {1,3,5} ends iWins within 2 rounds",
           f"{sessions} sessions, {decided} decided iWins, {undecided_ok} scripts with no legal move, "
           f"{replay_diffs} replay differences, {reprompt_failures} re-prompt failures, {late} late or lost")
