"""Exact manipulation solvers.

Three strategies are offered.  Brute force enumerates every multiset of k
ballots.  The frontier solver exploits the fact that under plurality- and
veto-based elimination only a ballot's current top and/or bottom among the
survivors matters.  The sequential solver searches adaptive strategies.
"""

from __future__ import annotations

import itertools
import math
import os
from dataclasses import dataclass, field
from typing import Sequence

from .engines import Electorate, RuleSpec, Strategy, elects, parse_rule, run_electorate
from .profile import CandidateId, Profile, TieBreakPolicy
from .scoring import PLURALITY, VETO, instantiate

DEFAULT_BUDGET = 10_000_000


def default_budget() -> int:
    env = os.environ.get("ELIMVOTE_BUDGET")
    return int(env) if env else DEFAULT_BUDGET


class BudgetExceeded(RuntimeError):
    """The search would need more nodes than allowed.

    ``lower_bound`` is set by :func:`min_coalition`: every smaller coalition
    size was refuted before the budget ran out.
    """

    def __init__(self, message: str, nodes: int = 0, lower_bound: int | None = None):
        super().__init__(message)
        self.nodes = nodes
        self.lower_bound = lower_bound


@dataclass(frozen=True)
class ManipulationQuery:
    rule: RuleSpec
    profile: Profile
    preferred: CandidateId
    k: int
    policy: TieBreakPolicy

    def __post_init__(self):
        if isinstance(self.rule, str):
            object.__setattr__(self, "rule", parse_rule(self.rule))
        if self.k < 0:
            raise ValueError("manipulator count must be nonnegative")
        if self.preferred not in self.profile.candidates:
            raise ValueError("preferred candidate is not in the profile")


@dataclass
class ManipulationResult:
    decision: bool
    witness: list[tuple[CandidateId, ...]] | None = None
    strategy: dict[frozenset, tuple[CandidateId, ...]] | None = None
    stats: dict[str, int] = field(default_factory=dict)
    solver: str = ""
    # frontier solver only: per manipulator, the (top, bottom) targets in order
    targets: list[list[tuple]] | None = None

    def __bool__(self):
        return self.decision


class _Counter:
    def __init__(self, budget: int):
        self.budget = budget
        self.nodes = 0

    def tick(self):
        self.nodes += 1
        if self.nodes > self.budget:
            raise BudgetExceeded(f"node budget {self.budget} exhausted", self.nodes)


def _check(spec, el, policy, preferred, witness) -> None:
    if not elects(spec, el.plus(witness), policy, preferred):
        raise AssertionError("solver produced a witness that does not elect the preferred candidate")


# ------------------------------------------------------------ brute force


def find_manipulation_brute(query: ManipulationQuery, budget: int | None = None) -> ManipulationResult:
    """Try every multiset of ``k`` complete ballots."""
    budget = default_budget() if budget is None else budget
    spec, policy, preferred = query.rule, query.policy, query.preferred
    cands = query.profile.candidates
    n_ballots = math.factorial(len(cands))
    space = math.comb(n_ballots + query.k - 1, query.k)
    if space > budget:
        raise BudgetExceeded(
            f"{space} ballot multisets exceed the node budget {budget}", 0
        )
    el = Electorate.of(query.profile)
    fast = _single_ballot_evaluator(spec, el, policy, preferred) if query.k == 1 else None
    tried = 0
    perms = list(itertools.permutations(cands))
    for combo in itertools.combinations_with_replacement(perms, query.k):
        tried += 1
        ok = fast(combo[0]) if fast is not None else elects(spec, el.plus(combo), policy, preferred)
        if ok:
            witness = list(combo)
            _check(spec, el, policy, preferred, witness)
            return ManipulationResult(True, witness, stats={"nodes": tried, "ballots_tried": tried}, solver="brute")
    return ManipulationResult(False, stats={"nodes": tried, "ballots_tried": tried}, solver="brute")


def _single_ballot_evaluator(spec: RuleSpec, el: Electorate, policy: TieBreakPolicy, preferred):
    """Memoized evaluator for one extra ballot under plurality/veto elimination.

    The outcome depends only on the sequence of candidates the ballot reaches
    as its live top (or bottom), so each stretch of rounds is cached on that
    sequence.
    Returns None when no shortcut applies.
    """
    comb = spec.combinator
    if policy.optimistic_for is not None:
        return None
    if comb in ("eliminate", "sequential") and spec.base in (PLURALITY, VETO):
        bottom = spec.base == VETO
    else:
        return None
    # target sequence -> (finished, result) or (False, survivors when the last
    # target fell); a target only changes when it is eliminated
    cache: dict[tuple, tuple] = {}
    sincere: dict[frozenset, dict] = {}
    start = frozenset(el.cands)

    def segment(alive, t):
        while len(alive) > 1:
            scores = sincere.get(alive)
            if scores is None:
                scores = el.bottoms(alive) if bottom else el.tops(alive)
                sincere[alive] = scores
            scores = dict(scores)
            scores[t] += 1
            target = max(scores.values()) if bottom else min(scores.values())
            loser = policy.loser([c for c, v in scores.items() if v == target])
            alive = alive - {loser}
            if loser == t and len(alive) > 1:
                return (False, alive)
        return (True, preferred in alive)

    def evaluate(ballot):
        order = ballot[::-1] if bottom else ballot
        alive = start
        if len(alive) == 1:
            return preferred in alive
        key = ()
        while True:
            t = next(c for c in order if c in alive)
            key = key + (t,)
            seg = cache.get(key)
            if seg is None:
                seg = cache[key] = segment(alive, t)
            if seg[0]:
                return seg[1]
            alive = seg[1]

    return evaluate


# ------------------------------------------------------------ frontier search

_MODES = {
    ("eliminate", PLURALITY): "top",
    ("sequential", PLURALITY): "top",
    ("eliminate", VETO): "bottom",
    ("sequential", VETO): "bottom",
    ("coombs", None): "both",
}


def frontier_mode(spec: RuleSpec) -> str | None:
    """``top``, ``bottom`` or ``both`` when the frontier solver applies."""
    return _MODES.get((spec.combinator, spec.base))


def find_manipulation_frontier(variant: str, profile: Profile, preferred: CandidateId,
                               policy: TieBreakPolicy, budget: int | None = None) -> ManipulationResult:
    """Single-manipulator frontier search for ``stv`` or ``eliminate-veto``."""
    rules = {"stv": "eliminate:plurality", "eliminate-veto": "eliminate:veto", "coombs": "coombs"}
    if variant not in rules:
        raise ValueError(f"frontier search supports {sorted(rules)}, got {variant!r}")
    return find_coalition_frontier(parse_rule(rules[variant]), profile, preferred, 1, policy, budget)


def find_coalition_frontier(spec: RuleSpec, profile: Profile, preferred: CandidateId, k: int,
                            policy: TieBreakPolicy, budget: int | None = None) -> ManipulationResult:
    """Search over the manipulators' active targets.

    Each manipulator carries a live top and/or bottom target.  A new target
    is picked only when the current one is eliminated, so any accepting
    target history can be laid out as one concrete ballot.  Failed states
    are memoized on (remaining set, multiset of current targets).
    """
    mode = frontier_mode(spec)
    if mode is None:
        raise ValueError(f"frontier search does not support {spec}")
    counter = _Counter(default_budget() if budget is None else budget)
    el = Electorate.of(profile)
    optimistic = policy.optimistic_for is not None
    use_top = mode in ("top", "both")
    use_bot = mode in ("bottom", "both")
    sincere: dict[frozenset, tuple[dict, dict]] = {}
    failed: set = set()

    def tallies(alive):
        t = sincere.get(alive)
        if t is None:
            t = (el.tops(alive) if use_top else None, el.bottoms(alive) if use_bot else None)
            sincere[alive] = t
        return t

    def choices(alive, top, bot):
        """Valid (top, bottom) replacements for one manipulator."""
        live = sorted(alive)
        tops = live if use_top and (top is None or top not in alive) else [top]
        bots = live if use_bot and (bot is None or bot not in alive) else [bot]
        out = []
        for t in tops:
            for b in bots:
                if use_top and use_bot and t == b and len(alive) > 1:
                    continue
                out.append((t, b))
        return out

    def go(alive, targets, hist):
        counter.tick()
        if len(alive) == 1:
            return preferred in alive
        key = (alive, tuple(sorted(targets)))
        if key in failed:
            return False
        tops, bots = tallies(alive)
        if mode == "both":
            firsts = dict(tops)
            for t, _ in targets:
                firsts[t] += 1
            lead = max(firsts, key=firsts.__getitem__)
            if 2 * firsts[lead] > el.total + k:
                if lead == preferred:
                    return True
                failed.add(key)
                return False
        if use_bot:
            scores = dict(bots)
            for _, b in targets:
                scores[b] += 1
            target = max(scores.values())
        else:
            scores = dict(tops)
            for t, _ in targets:
                scores[t] += 1
            target = min(scores.values())
        tied = sorted(c for c, v in scores.items() if v == target)
        losers = tied if optimistic else [policy.loser(tied)]
        for x in losers:
            rest = alive - {x}
            per = [
                choices(rest, t, b) if (t == x or b == x) else [(t, b)]
                for t, b in targets
            ]
            for combo in itertools.product(*per):
                new_hist = [h + [c] if c != old else h for h, c, old in zip(hist, combo, targets)]
                if go(rest, list(combo), new_hist):
                    hist[:] = new_hist
                    return True
        failed.add(key)
        return False

    start = frozenset(el.cands)
    if k == 0:
        ok = elects(spec, el, policy, preferred)
        return ManipulationResult(ok, [] if ok else None, stats={"nodes": 0, "ballots_tried": 1}, solver="frontier")
    for init in itertools.combinations_with_replacement(choices(start, None, None), k):
        hist = [[c] for c in init]
        if go(start, list(init), hist):
            witness = [_ballot_from_history(h, el.cands, policy, preferred, use_top, use_bot) for h in hist]
            _check(spec, el, policy, preferred, witness)
            return ManipulationResult(True, witness, stats={"nodes": counter.nodes, "states": len(failed)},
                                      solver="frontier", targets=hist)
    return ManipulationResult(False, stats={"nodes": counter.nodes, "states": len(failed)}, solver="frontier")


def _ballot_from_history(hist, cands, policy, preferred, use_top, use_bot) -> tuple[CandidateId, ...]:
    """Tops in order at the head, bottoms reversed at the tail, fillers between
    in policy order with ``preferred`` placed best."""
    tops, bots = [], []
    for t, b in hist:
        if use_top and t not in tops:
            tops.append(t)
        if use_bot and b not in bots:
            bots.append(b)
    placed_top = set(tops)
    bots = [b for b in bots if b not in placed_top]
    used = placed_top | set(bots)
    filler = sorted((c for c in cands if c not in used),
                    key=lambda c: (c != preferred, -policy.protection(c)))
    return tuple(tops + filler + bots[::-1])


# ------------------------------------------------------------ dispatch


def find_manipulation(query: ManipulationQuery, solver: str = "auto", budget: int | None = None) -> ManipulationResult:
    if solver == "sequential":
        if query.k != 1:
            raise ValueError("the sequential solver handles one manipulator")
        return sequential_manipulate(query.rule.base, query.profile, query.preferred, query.policy, budget)
    if solver == "auto":
        solver = "frontier" if frontier_mode(query.rule) is not None else "brute"
    if solver == "frontier":
        return find_coalition_frontier(query.rule, query.profile, query.preferred, query.k, query.policy, budget)
    if solver == "brute":
        return find_manipulation_brute(query, budget)
    raise ValueError(f"unknown solver {solver!r}")


def min_coalition(rule: RuleSpec | str, profile: Profile, preferred: CandidateId, k_max: int,
                  policy: TieBreakPolicy, solver: str = "auto", budget: int | None = None) -> int | None:
    """Smallest k ≤ k_max for which k manipulators succeed, or None."""
    if isinstance(rule, str):
        rule = parse_rule(rule)
    for k in range(k_max + 1):
        try:
            res = find_manipulation(ManipulationQuery(rule, profile, preferred, k, policy), solver, budget)
        except BudgetExceeded as exc:
            exc.lower_bound = k
            raise
        if res.decision:
            return k
    return None


# ------------------------------------------------------------ adaptive strategies


def sequential_manipulate(base, profile: Profile, preferred: CandidateId, policy: TieBreakPolicy,
                          budget: int | None = None, fixed: bool = False) -> ManipulationResult:
    """Search adaptive strategies for one manipulator in sequential(base).

    The manipulator sees which candidates remain before each round and may
    cast a fresh ballot.  For plurality and veto only the supported (or
    vetoed) candidate matters, so only that choice is branched on.  With
    ``fixed=True`` the search is restricted to repeating one ballot.
    """
    if fixed:
        spec = RuleSpec("sequential", base)
        return find_manipulation_brute(ManipulationQuery(spec, profile, preferred, 1, policy), budget)
    counter = _Counter(default_budget() if budget is None else budget)
    el = Electorate.of(profile)
    optimistic = policy.optimistic_for is not None
    memo: dict[frozenset, tuple[CandidateId, ...] | None] = {}

    def options(alive):
        live = sorted(alive, key=lambda c: (c != preferred, -policy.protection(c)))
        if base == PLURALITY:
            for c in sorted(alive):
                yield (c,) + tuple(x for x in live if x != c)
        elif base == VETO:
            for c in sorted(alive):
                yield tuple(x for x in live if x != c) + (c,)
        else:
            yield from itertools.permutations(sorted(alive))

    def losers(alive, ballot):
        if base == VETO:
            scores = el.bottoms(alive)
            scores[ballot[-1]] += 1
            target = max(scores.values())
        else:
            vec = instantiate(base, len(alive)).entries
            scores = el.tops(alive) if base == PLURALITY else el.positional(alive, vec)
            if base == PLURALITY:
                scores[ballot[0]] += 1
            else:
                for pos, c in enumerate(ballot):
                    scores[c] += vec[pos]
            target = min(scores.values())
        tied = sorted(c for c, v in scores.items() if v == target)
        return tied if optimistic else [policy.loser(tied)]

    def win(alive) -> bool:
        if len(alive) == 1:
            return preferred in alive
        if alive in memo:
            return memo[alive] is not None
        memo[alive] = None
        for ballot in options(alive):
            counter.tick()
            if any(win(alive - {x}) for x in losers(alive, ballot)):
                memo[alive] = ballot
                return True
        return False

    start = frozenset(el.cands)
    if not win(start):
        return ManipulationResult(False, stats={"nodes": counter.nodes}, solver="sequential")
    strategy: dict[frozenset, tuple[CandidateId, ...]] = {}
    alive = start
    while len(alive) > 1:
        ballot = memo[alive]
        strategy[alive] = ballot
        alive = alive - {next(x for x in losers(alive, ballot) if win(alive - {x}))}
    return ManipulationResult(True, strategy=strategy, stats={"nodes": counter.nodes}, solver="sequential")


def strategy_function(strategy: dict[frozenset, Sequence[CandidateId]]) -> Strategy:
    """Adapter from a remaining-set table to the engine's strategy callback."""
    def play(alive, k):
        return strategy[frozenset(alive)]
    return play


def verify_strategy(base, profile: Profile, preferred: CandidateId, policy: TieBreakPolicy,
                    strategy: dict[frozenset, Sequence[CandidateId]]) -> bool:
    spec = RuleSpec("sequential", base)
    tr = run_electorate(spec, Electorate.of(profile), policy.deterministic(), record=False,
                        strategy=strategy_function(strategy))
    return tr.winner == preferred
