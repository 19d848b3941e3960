import itertools
import random

import pytest

from conftest import seeded_profiles
from elimvote.constructions import build_example2, build_thm4_family, build_thm5_family
from elimvote.engines import Electorate, RuleSpec, elects, parse_rule, run_electorate, run_rule
from elimvote.generate import random_profile
from elimvote.manipulation import (
    BudgetExceeded,
    ManipulationQuery,
    find_coalition_frontier,
    find_manipulation,
    find_manipulation_brute,
    find_manipulation_frontier,
    min_coalition,
    sequential_manipulate,
    verify_strategy,
)
from elimvote.profile import ELIMINATE_EARLIEST, ELIMINATE_LATEST, Profile, TieBreakPolicy
from elimvote.reduction import build_veto_reduction
from elimvote.scoring import PLURALITY, VETO
from elimvote.verify import default_cover_instance


def random_case(rng, m_max=5, w_max=7):
    p = random_profile(rng.randint(2, m_max), rng.randint(1, w_max), rng)
    order = list(p.candidates)
    rng.shuffle(order)
    pol = TieBreakPolicy(tuple(order), rng.choice([ELIMINATE_EARLIEST, ELIMINATE_LATEST]))
    if rng.random() < 0.3:
        pol = pol.optimistic(rng.choice(p.candidates))
    pref = pol.optimistic_for if pol.optimistic_for is not None else rng.choice(p.candidates)
    return p, pol, pref


def test_sincere_winner_needs_no_manipulators():
    p, a, pol = build_thm4_family(2)
    q = ManipulationQuery(parse_rule("eliminate:veto"), p, a, 0, pol)
    res = find_manipulation_brute(q)
    assert res.decision and res.witness == []
    assert min_coalition("eliminate:veto", p, a, 3, pol) == 0


def test_thm5_single_coombs_manipulator():
    p, a, pol = build_thm5_family(3)
    res = find_manipulation_brute(ManipulationQuery(parse_rule("coombs"), p, a, 1, pol))
    assert res.decision and res.witness[0][0] == a
    assert min_coalition("coombs", p, a, 2, pol, solver="brute") == 1


def test_thm5_veto_single_manipulator_fails():
    p, a, pol = build_thm5_family(3)
    q = ManipulationQuery(parse_rule("eliminate:veto"), p, a, 1, pol)
    assert not find_manipulation_brute(q).decision
    assert not find_manipulation_frontier("eliminate-veto", p, a, pol).decision
    assert min_coalition("eliminate:veto", p, a, 3, pol) == 2


def test_brute_budget_is_a_hard_error():
    p, a, pol = build_thm5_family(4)
    with pytest.raises(BudgetExceeded):
        find_manipulation_brute(ManipulationQuery(parse_rule("coombs"), p, a, 2, pol), budget=100)
    with pytest.raises(BudgetExceeded) as err:
        min_coalition("eliminate:veto", p, a, 4, pol, solver="brute", budget=10_000)
    assert err.value.lower_bound == 2


def test_frontier_budget_is_a_hard_error():
    red = build_veto_reduction(default_cover_instance(2, 6, 0, solvable=False))
    with pytest.raises(BudgetExceeded):
        find_manipulation_frontier("eliminate-veto", red.profile, red.preferred, red.policy, budget=500)


@pytest.mark.parametrize("variant, rule", [("stv", "eliminate:plurality"), ("eliminate-veto", "eliminate:veto"),
                                           ("coombs", "coombs")])
def test_frontier_agrees_with_brute(variant, rule):
    rng = random.Random(variant)
    spec = parse_rule(rule)
    for _ in range(120):
        p, pol, pref = random_case(rng)
        brute = find_manipulation_brute(ManipulationQuery(spec, p, pref, 1, pol))
        front = find_manipulation_frontier(variant, p, pref, pol)
        assert brute.decision == front.decision
        if front.decision:
            assert elects(spec, Electorate.of(p, front.witness), pol, pref)


@pytest.mark.parametrize("rule", ["eliminate:plurality", "eliminate:veto", "coombs"])
def test_coalition_frontier_agrees_with_brute(rule):
    rng = random.Random(rule)
    spec = parse_rule(rule)
    for _ in range(40):
        p, pol, pref = random_case(rng, m_max=4, w_max=6)
        for k in (2, 3):
            brute = find_manipulation_brute(ManipulationQuery(spec, p, pref, k, pol))
            front = find_coalition_frontier(spec, p, pref, k, pol)
            assert brute.decision == front.decision, (k, p, pol, pref)


def test_frontier_reconstruction_replays_targets():
    rng = random.Random(99)
    for rule, slot in (("eliminate:veto", 1), ("eliminate:plurality", 0)):
        spec = parse_rule(rule)
        hits = 0
        for _ in range(150):
            p, pol, pref = random_case(rng)
            pol = pol.deterministic()
            res = find_coalition_frontier(spec, p, pref, 1, pol)
            if not res.decision:
                continue
            hits += 1
            (ballot,) = res.witness
            tr = run_electorate(spec, Electorate.of(p, [ballot]), pol, record=True)
            seen = []
            for r in tr.rounds:
                live = [c for c in ballot if c in r.remaining]
                tgt = live[-1] if slot else live[0]
                if not seen or seen[-1] != tgt:
                    seen.append(tgt)
            searched = [t[slot] for t in res.targets[0]]
            assert seen == searched[: len(seen)]
        assert hits > 10


def test_frontier_refuses_far_ahead_veto_loser():
    # preferred has 3 more vetoes than anyone else: one ballot cannot save it
    p = Profile.from_rankings("abc", [["b", "c", "a"], ["c", "b", "a"]], [2, 2])
    pol = TieBreakPolicy.default(p)
    assert not find_manipulation_frontier("eliminate-veto", p, 0, pol).decision


def test_frontier_finds_gadget_manipulation():
    red = build_veto_reduction(default_cover_instance(1, 3))
    res = find_manipulation_frontier("eliminate-veto", red.profile, red.preferred, red.policy)
    assert res.decision
    tr = run_electorate(parse_rule("eliminate:veto"), Electorate.of(red.profile, res.witness), red.policy)
    assert tr.winner == red.preferred


def test_frontier_refutes_gadget_no_instance():
    red = build_veto_reduction(default_cover_instance(2, 6, solvable=False))
    assert not find_manipulation_frontier("eliminate-veto", red.profile, red.preferred, red.policy).decision


def test_monotone_in_coalition_size():
    rng = random.Random(4)
    rules = [parse_rule(r) for r in ("eliminate:borda", "nanson", "coombs", "eliminate:veto", "divide:plurality")]
    for _ in range(40):
        p, pol, pref = random_case(rng, m_max=3, w_max=5)
        for spec in rules:
            prev = False
            for k in range(3):
                now = find_manipulation(ManipulationQuery(spec, p, pref, k, pol), "brute").decision
                assert now or not prev
                prev = now


def test_auto_solver_choice():
    p, a, pol = build_thm5_family(3)
    assert find_manipulation(ManipulationQuery(parse_rule("coombs"), p, a, 1, pol)).solver == "frontier"
    assert find_manipulation(ManipulationQuery(parse_rule("baldwin"), p, a, 1, pol)).solver == "brute"
    with pytest.raises(ValueError):
        find_manipulation(ManipulationQuery(parse_rule("coombs"), p, a, 1, pol), "magic")


def test_example2_adaptive_strategy():
    p, pol, pref = build_example2()
    res = sequential_manipulate(PLURALITY, p, pref, pol)
    assert res.decision
    assert verify_strategy(PLURALITY, p, pref, pol, res.strategy)
    tops = [p.names[res.strategy[alive][0]] for alive in sorted(res.strategy, key=len, reverse=True)]
    assert tops[:3] == ["a", "a", "b"]
    assert "p" in tops


def test_example2_fixed_ballot_fails():
    p, pol, pref = build_example2()
    res = sequential_manipulate(PLURALITY, p, pref, pol, fixed=True)
    assert not res.decision and res.stats["ballots_tried"] == 362880


def test_sequential_sincere_winner():
    p = Profile.from_rankings("abc", [["a", "b", "c"]], [3])
    res = sequential_manipulate(VETO, p, 0, TieBreakPolicy.default(p))
    assert res.decision and verify_strategy(VETO, p, 0, TieBreakPolicy.default(p), res.strategy)


def test_adaptive_dominates_fixed():
    rng = random.Random(8)
    for _ in range(60):
        p, pol, pref = random_case(rng, m_max=4, w_max=6)
        pol = pol.deterministic()
        for base in (PLURALITY, VETO):
            fixed = find_manipulation_brute(ManipulationQuery(RuleSpec("sequential", base), p, pref, 1, pol))
            adaptive = sequential_manipulate(base, p, pref, pol)
            if fixed.decision:
                assert adaptive.decision
            if adaptive.decision:
                assert verify_strategy(base, p, pref, pol, adaptive.strategy)


def test_query_validation():
    p, a, pol = build_thm5_family(2)
    with pytest.raises(ValueError):
        ManipulationQuery("coombs", p, a, -1, pol)
    with pytest.raises(ValueError):
        ManipulationQuery("coombs", p, 99, 1, pol)
    assert ManipulationQuery("coombs", p, a, 1, pol).rule == RuleSpec("coombs")
