"""Voting rules and elimination combinators.

Every runner returns an :class:`EliminationTrace`.  Rules built on veto
(``eliminate:veto``, ``coombs``, ``sequential:veto``) record veto-scores, i.e.
the weight of ballots placing a candidate last, and eliminate the maximum.
All other positional rules record ordinary scores and eliminate the minimum.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

from .profile import (
    Ballot,
    CandidateId,
    Profile,
    ProfileError,
    ScoreTable,
    TieBreakPolicy,
    positional_scores,
)
from .scoring import BORDA, PLURALITY, VETO, RuleFamily, instantiate, parse_family

COMBINATORS = ("none", "eliminate", "divide", "sequential", "coombs")
DEMO_RULES = ("thm1-alpha", "thm2-sat")

LOSER_ELIMINATED = "loser-eliminated"
MAJORITY_REACHED = "majority-reached"
ONE_LEFT = "one-left"
ALL_AT_MEAN = "all-at-mean"
POSITIONAL = "positional"

_ALIASES = {
    "stv": ("eliminate", "plurality"),
    "baldwin": ("eliminate", "borda"),
    "nanson": ("divide", "borda"),
    "coombs": ("coombs", None),
    "exhaustive": ("sequential", "plurality"),
}


@dataclass(frozen=True)
class RuleSpec:
    combinator: str
    base: RuleFamily | str | None = None

    def __post_init__(self):
        if self.combinator not in COMBINATORS:
            raise ValueError(f"unknown combinator {self.combinator!r}")
        if self.combinator == "coombs":
            if self.base not in (None, VETO):
                raise ValueError("coombs is veto-based and takes no base rule")
            object.__setattr__(self, "base", None)
            return
        if self.base is None:
            raise ValueError(f"{self.combinator} needs a base rule")
        if isinstance(self.base, str):
            if self.base not in DEMO_RULES:
                raise ValueError(f"unknown demo rule {self.base!r}")
            if self.combinator == "sequential":
                raise ValueError("demo rules compose with eliminate/divide only")

    @property
    def is_demo(self) -> bool:
        return isinstance(self.base, str)

    def __str__(self):
        if self.combinator == "coombs":
            return "coombs"
        return f"{self.combinator}:{self.base}"


def parse_rule(spec: str) -> RuleSpec:
    """``<combinator>:<base>``, a bare base (plain positional rule) or an alias
    such as ``stv``, ``baldwin``, ``nanson``, ``coombs``."""
    spec = spec.strip()
    if spec in _ALIASES:
        comb, base = _ALIASES[spec]
        return RuleSpec(comb, None if base is None else parse_family(base))
    head, sep, rest = spec.partition(":")
    if head in COMBINATORS and head != "none":
        if head == "coombs":
            if rest:
                raise ValueError("coombs takes no base rule")
            return RuleSpec("coombs")
        if not rest:
            raise ValueError(f"{head} needs a base rule")
        base = rest if rest in DEMO_RULES else parse_family(rest)
        return RuleSpec(head, base)
    if head == "none":
        spec = rest
    if spec in DEMO_RULES:
        return RuleSpec("none", spec)
    return RuleSpec("none", parse_family(spec))


@dataclass
class Round:
    k: int
    remaining: frozenset[CandidateId]
    scores: ScoreTable
    eliminated: frozenset[CandidateId]
    reason: str


@dataclass
class EliminationTrace:
    rule: str
    rounds: list[Round]
    winner: CandidateId
    stop_reason: str
    names: tuple[str, ...] = field(repr=False, default=())
    ranking: tuple[CandidateId, ...] | None = None

    @property
    def elimination_order(self) -> list[CandidateId]:
        out = []
        for r in self.rounds:
            out.extend(sorted(r.eliminated))
        return out

    def same_outcome(self, other: "EliminationTrace") -> bool:
        """Rounds, scores and winner agree (rule label ignored)."""
        if self.winner != other.winner or len(self.rounds) != len(other.rounds):
            return False
        for a, b in zip(self.rounds, other.rounds):
            if (a.k, a.remaining, a.eliminated, a.reason) != (b.k, b.remaining, b.eliminated, b.reason):
                return False
            if a.scores.scores != b.scores.scores:
                return False
        return True

    # ---- export

    def to_dict(self) -> dict:
        n = self.names or tuple(str(i) for i in range(max((max(r.remaining) for r in self.rounds), default=self.winner) + 1))
        d = {
            "rule": self.rule,
            "rounds": [
                {
                    "k": r.k,
                    "remaining": [n[c] for c in sorted(r.remaining)],
                    "scores": {n[c]: v for c, v in sorted(r.scores.items())},
                    "eliminated": [n[c] for c in sorted(r.eliminated)],
                    "reason": r.reason,
                }
                for r in self.rounds
            ],
            "stop_reason": self.stop_reason,
        }
        if self.ranking is not None:
            d["ranking"] = [n[c] for c in self.ranking]
        d["winner"] = n[self.winner]
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    def to_text(self) -> str:
        d = self.to_dict()
        lines = [f"rule: {d['rule']}"]
        for r in d["rounds"]:
            scores = " ".join(f"{c}={v}" for c, v in r["scores"].items())
            elim = ",".join(r["eliminated"]) or "-"
            lines.append(
                f"round {r['k']} | remaining: {','.join(r['remaining'])} | scores: {scores}"
                f" | eliminated: {elim} | {r['reason']}"
            )
        if "ranking" in d:
            lines.append("ranking: " + " > ".join(d["ranking"]))
        lines.append(f"stop: {d['stop_reason']}")
        lines.append(f"winner: {d['winner']}")
        return "\n".join(lines) + "\n"


# ------------------------------------------------------------ raw tallies


class Electorate:
    """Raw ranking/weight arrays; cheaper to extend than a validated Profile."""

    __slots__ = ("names", "rankings", "weights", "cands", "total")

    def __init__(self, names, rankings, weights, cands):
        self.names = names
        self.rankings = rankings
        self.weights = weights
        self.cands = tuple(cands)
        self.total = sum(weights)

    @classmethod
    def of(cls, profile: Profile, extra: Iterable[Sequence[CandidateId]] = ()) -> "Electorate":
        rankings = [b.ranking for b in profile.ballots]
        weights = [b.multiplicity for b in profile.ballots]
        for r in extra:
            rankings.append(tuple(r))
            weights.append(1)
        return cls(profile.names, rankings, weights, profile.candidates)

    def plus(self, extra: Iterable[Sequence[CandidateId]]) -> "Electorate":
        extra = [tuple(r) for r in extra]
        return Electorate(self.names, self.rankings + extra, self.weights + [1] * len(extra), self.cands)

    def profile(self) -> Profile:
        return Profile(
            self.names,
            tuple(Ballot(r, w) for r, w in zip(self.rankings, self.weights)),
            self.cands,
        )

    # scores over an arbitrary alive set, recomputed from scratch

    def tops(self, alive) -> dict[CandidateId, int]:
        out = dict.fromkeys(alive, 0)
        for r, w in zip(self.rankings, self.weights):
            for c in r:
                if c in out:
                    out[c] += w
                    break
        return out

    def bottoms(self, alive) -> dict[CandidateId, int]:
        out = dict.fromkeys(alive, 0)
        for r, w in zip(self.rankings, self.weights):
            for c in reversed(r):
                if c in out:
                    out[c] += w
                    break
        return out

    def positional(self, alive, vector) -> dict[CandidateId, int]:
        out = dict.fromkeys(alive, 0)
        for r, w in zip(self.rankings, self.weights):
            pos = 0
            for c in r:
                if c in out:
                    out[c] += w * vector[pos]
                    pos += 1
        return out

    def restricted(self, alive) -> Profile:
        alive = frozenset(alive)
        cands = tuple(c for c in self.cands if c in alive)
        return Profile(
            self.names,
            tuple(Ballot(tuple(c for c in r if c in alive), w) for r, w in zip(self.rankings, self.weights)),
            cands,
        )


class _PointerTally:
    """Incremental first/last-place counts under one-at-a-time elimination."""

    def __init__(self, el: Electorate):
        self.el = el
        n = len(el.rankings)
        self.alive = set(el.cands)
        self.top_ptr = [0] * n
        self.bot_ptr = [len(r) - 1 for r in el.rankings]
        self.top_of: dict[CandidateId, list[int]] = {c: [] for c in el.cands}
        self.bot_of: dict[CandidateId, list[int]] = {c: [] for c in el.cands}
        self.top = dict.fromkeys(el.cands, 0)
        self.bot = dict.fromkeys(el.cands, 0)
        for i, (r, w) in enumerate(zip(el.rankings, el.weights)):
            self.top_of[r[0]].append(i)
            self.bot_of[r[-1]].append(i)
            self.top[r[0]] += w
            self.bot[r[-1]] += w

    def remove(self, x: CandidateId):
        self.alive.discard(x)
        rankings, weights, alive = self.el.rankings, self.el.weights, self.alive
        if len(alive) == 0:
            return
        for i in self.top_of.pop(x):
            r = rankings[i]
            p = self.top_ptr[i] + 1
            while r[p] not in alive:
                p += 1
            self.top_ptr[i] = p
            self.top_of[r[p]].append(i)
            self.top[r[p]] += weights[i]
        for i in self.bot_of.pop(x):
            r = rankings[i]
            p = self.bot_ptr[i] - 1
            while r[p] not in alive:
                p -= 1
            self.bot_ptr[i] = p
            self.bot_of[r[p]].append(i)
            self.bot[r[p]] += weights[i]
        del self.top[x]
        del self.bot[x]


def _direction(base) -> str:
    return "max" if base == VETO else "min"


def _round_scores(el: Electorate, tally: _PointerTally | None, alive, base) -> dict[CandidateId, int]:
    if base == VETO:
        return dict(tally.bot) if tally is not None else el.bottoms(alive)
    if base == PLURALITY:
        return dict(tally.top) if tally is not None else el.tops(alive)
    return el.positional(alive, instantiate(base, len(alive)).entries)


def _pick(scores: dict[CandidateId, int], direction: str, policy: TieBreakPolicy) -> CandidateId:
    target = max(scores.values()) if direction == "max" else min(scores.values())
    return policy.loser([c for c, v in scores.items() if v == target])


def _mk_trace(spec, el, rounds, winner, reason, ranking=None) -> EliminationTrace:
    return EliminationTrace(str(spec), rounds, winner, reason, el.names, ranking)


# ------------------------------------------------------------ positional


def run_positional(profile: Profile, family: RuleFamily, policy: TieBreakPolicy) -> tuple[tuple[CandidateId, ...], ScoreTable]:
    """Full ranking by descending score; ties ordered by the policy."""
    table = positional_scores(profile, instantiate(family, profile.c).entries, k=1)
    ranking = tuple(sorted(profile.candidates, key=lambda c: (-table[c], -policy.protection(c))))
    return ranking, table


# ------------------------------------------------------------ demo rules


def _thm2_value(name: str) -> int:
    try:
        v = int(name)
    except ValueError:
        raise ProfileError(f"thm2-sat candidates must be integers, got {name!r}") from None
    if v < 0 or str(v) != name:
        raise ProfileError(f"thm2-sat candidate names must be canonical nonnegative integers, got {name!r}")
    return v


def run_demo(rule_id: str, profile: Profile) -> tuple[CandidateId, ...]:
    """Ranking produced by one of the two artificial demonstration rules.

    ``thm1-alpha`` returns the unanimous order if every ballot agrees and the
    alphabetical order otherwise.  ``thm2-sat`` treats ballots headed by
    candidate 0 as positive 1-in-3 clauses and every other ballot as a truth
    assignment (true = ranked above 0).
    """
    if rule_id == "thm1-alpha":
        first = profile.ballots[0].ranking
        if all(b.ranking == first for b in profile.ballots):
            return first
        return tuple(sorted(profile.candidates, key=lambda c: profile.names[c]))
    if rule_id != "thm2-sat":
        raise ValueError(f"unknown demo rule {rule_id!r}")

    value = {c: _thm2_value(profile.names[c]) for c in profile.candidates}
    by_value = {v: c for c, v in value.items()}
    if 0 not in by_value or 1 not in by_value:
        raise ProfileError("thm2-sat needs candidates 0 and 1")
    zero, one = by_value[0], by_value[1]
    others = sorted((c for c in profile.candidates if c not in (zero, one)), key=value.__getitem__)
    if profile.c == 2:
        pro_zero = sum(b.multiplicity for b in profile.ballots if b.ranking[0] == zero)
        # exact tie goes to the numerically smaller candidate
        w = zero if 2 * pro_zero >= profile.total_weight else one
        return (w, one if w == zero else zero)

    clauses = []
    assignments = []
    for b in profile.ballots:
        r = b.ranking
        if r[0] == zero:
            clauses.append(frozenset(r[1:4]))
        else:
            assignments.append(frozenset(r[: r.index(zero)]))
    sat = any(all(len(cl & truth) == 1 for cl in clauses) for truth in assignments)
    w = zero if sat else one
    return (w, one if w == zero else zero, *others)


# ------------------------------------------------------------ eliminate / divide / coombs


def run_eliminate(base: RuleFamily | str, profile: Profile, policy: TieBreakPolicy) -> EliminationTrace:
    """Remove the base rule's last-placed candidate until one remains."""
    return _eliminate(RuleSpec("eliminate", base), Electorate.of(profile), policy, record=True)


def _eliminate(spec: RuleSpec, el: Electorate, policy: TieBreakPolicy, record: bool = True,
               strategy: Callable | None = None, coombs: bool = False) -> EliminationTrace:
    base = VETO if coombs else spec.base
    demo = isinstance(base, str)
    tally = _PointerTally(el) if base in (VETO, PLURALITY) else None
    alive = set(el.cands)
    rounds: list[Round] = []
    k = 0
    direction = "max" if base == VETO else "min"
    while len(alive) > 1:
        k += 1
        if demo:
            ranking = run_demo(base, el.restricted(alive))
            scores = {c: len(ranking) - 1 - i for i, c in enumerate(ranking)}
            loser = ranking[-1]
        else:
            scores = _round_scores(el, tally, alive, base)
            extra = None
            if strategy is not None:
                extra = _strategy_ballot(strategy, frozenset(alive), k)
                _add_ballot_scores(scores, extra, base)
            if coombs:
                firsts = dict(tally.top)
                if extra is not None:
                    firsts[extra[0]] += 1
                total = el.total + (1 if extra is not None else 0)
                leader = max(firsts, key=firsts.__getitem__)
                if 2 * firsts[leader] > total:
                    if record:
                        rounds.append(Round(k, frozenset(alive), ScoreTable(scores, k), frozenset(), MAJORITY_REACHED))
                    return _mk_trace(spec, el, rounds, leader, MAJORITY_REACHED)
            loser = _pick(scores, direction, policy)
        if record:
            rounds.append(Round(k, frozenset(alive), ScoreTable(scores, k), frozenset((loser,)), LOSER_ELIMINATED))
        alive.discard(loser)
        if tally is not None:
            tally.remove(loser)
    (winner,) = alive
    return _mk_trace(spec, el, rounds, winner, ONE_LEFT)


def run_coombs(profile: Profile, policy: TieBreakPolicy) -> EliminationTrace:
    """eliminate(veto) that stops as soon as someone holds a strict majority
    of first places."""
    return _eliminate(RuleSpec("coombs"), Electorate.of(profile), policy, record=True, coombs=True)


def run_divide(base: RuleFamily | str, profile: Profile, policy: TieBreakPolicy) -> EliminationTrace:
    """Remove every candidate at or below the mean score, round after round.

    If that would remove everyone, the most protected candidate wins.
    Non-scoring bases drop the bottom half of their ranking instead.
    """
    return _divide(RuleSpec("divide", base), Electorate.of(profile), policy, record=True)


def _divide(spec: RuleSpec, el: Electorate, policy: TieBreakPolicy, record: bool = True) -> EliminationTrace:
    base = spec.base
    alive = set(el.cands)
    rounds: list[Round] = []
    k = 0
    while len(alive) > 1:
        k += 1
        m = len(alive)
        if isinstance(base, str):
            ranking = run_demo(base, el.restricted(alive))
            scores = {c: m - 1 - i for i, c in enumerate(ranking)}
            out = frozenset(ranking[m - m // 2 :])
        else:
            scores = el.positional(alive, instantiate(base, m).entries)
            total = sum(scores.values())
            out = frozenset(c for c, v in scores.items() if m * v <= total)
        if out >= alive:
            winner = policy.most_protected(alive)
            if record:
                rounds.append(Round(k, frozenset(alive), ScoreTable(scores, k), frozenset(alive - {winner}), ALL_AT_MEAN))
            return _mk_trace(spec, el, rounds, winner, ALL_AT_MEAN)
        if record:
            rounds.append(Round(k, frozenset(alive), ScoreTable(scores, k), out, LOSER_ELIMINATED))
        alive -= out
    (winner,) = alive
    return _mk_trace(spec, el, rounds, winner, ONE_LEFT)


# ------------------------------------------------------------ sequential


Strategy = Callable[[frozenset, int], Sequence[CandidateId]]


def _strategy_ballot(strategy: Strategy, alive: frozenset, k: int) -> tuple[CandidateId, ...]:
    ballot = tuple(strategy(alive, k))
    if len(ballot) != len(alive) or set(ballot) != alive:
        raise ProfileError(f"strategy ballot in round {k} must rank exactly the remaining candidates")
    return ballot


def _add_ballot_scores(scores: dict, ballot: Sequence[CandidateId], base: RuleFamily) -> None:
    if base == VETO:
        scores[ballot[-1]] += 1
    else:
        vec = instantiate(base, len(ballot)).entries
        for pos, c in enumerate(ballot):
            scores[c] += vec[pos]


def run_sequential(base: RuleFamily, profile: Profile, policy: TieBreakPolicy,
                   strategy: Strategy | None = None) -> EliminationTrace:
    """Re-vote every round over the remaining candidates.

    Sincere voters cast their true ranking restricted to the survivors.
    ``strategy(remaining, k)`` supplies the one designated voter's ballot in
    round ``k``; without it the trace equals ``run_eliminate``.
    """
    spec = RuleSpec("sequential", base)
    return _eliminate(spec, Electorate.of(profile), policy, record=True, strategy=strategy)


# ------------------------------------------------------------ dispatch


def run_rule(spec: RuleSpec | str, profile: Profile, policy: TieBreakPolicy | None = None,
             strategy: Strategy | None = None) -> EliminationTrace:
    if isinstance(spec, str):
        spec = parse_rule(spec)
    if policy is None:
        policy = TieBreakPolicy.default(profile)
    return run_electorate(spec, Electorate.of(profile), policy, record=True, strategy=strategy)


def run_electorate(spec: RuleSpec, el: Electorate, policy: TieBreakPolicy, record: bool = False,
                   strategy: Strategy | None = None) -> EliminationTrace:
    """Dispatch on raw arrays; ``record=False`` skips building score tables."""
    comb = spec.combinator
    if comb == "none":
        profile = el.profile()
        if spec.is_demo:
            ranking = run_demo(spec.base, profile)
            return _mk_trace(spec, el, [], ranking[0], POSITIONAL, ranking)
        ranking, table = run_positional(profile, spec.base, policy)
        rounds = [Round(1, frozenset(el.cands), table, frozenset(), POSITIONAL)] if record else []
        return _mk_trace(spec, el, rounds, ranking[0], POSITIONAL, ranking)
    if comb == "eliminate":
        return _eliminate(spec, el, policy, record)
    if comb == "sequential":
        return _eliminate(spec, el, policy, record, strategy=strategy)
    if comb == "coombs":
        return _eliminate(spec, el, policy, record, coombs=True)
    return _divide(spec, el, policy, record)


def winner(spec: RuleSpec | str, profile: Profile, policy: TieBreakPolicy | None = None) -> CandidateId:
    return run_rule(spec, profile, policy).winner


# ------------------------------------------------------------ optimistic ties


def possible_winners(spec: RuleSpec, el: Electorate, policy: TieBreakPolicy) -> frozenset[CandidateId]:
    """Every candidate that wins under some resolution of elimination ties."""
    memo: dict[frozenset, frozenset] = {}
    comb = spec.combinator
    if comb == "none":
        if spec.is_demo:
            return frozenset([run_demo(spec.base, el.profile())[0]])
        scores = el.positional(el.cands, instantiate(spec.base, len(el.cands)).entries)
        best = max(scores.values())
        return frozenset(c for c, v in scores.items() if v == best)
    base = VETO if comb == "coombs" else spec.base

    def go(alive: frozenset) -> frozenset:
        if len(alive) == 1:
            return alive
        if alive in memo:
            return memo[alive]
        m = len(alive)
        if isinstance(base, str):
            ranking = run_demo(base, el.restricted(alive))
            out = frozenset(ranking[m - m // 2 :]) if comb == "divide" else frozenset(ranking[-1:])
            res = go(alive - out)
        elif comb == "divide":
            scores = el.positional(alive, instantiate(base, m).entries)
            total = sum(scores.values())
            out = frozenset(c for c, v in scores.items() if m * v <= total)
            res = alive if out >= alive else go(alive - out)
        else:
            if comb == "coombs":
                firsts = el.tops(alive)
                lead = max(firsts, key=firsts.__getitem__)
                if 2 * firsts[lead] > el.total:
                    memo[alive] = frozenset([lead])
                    return memo[alive]
            scores = _round_scores(el, None, alive, base)
            target = max(scores.values()) if base == VETO else min(scores.values())
            res = frozenset()
            for c, v in scores.items():
                if v == target:
                    res |= go(alive - {c})
        memo[alive] = res
        return res

    return go(frozenset(el.cands))


def elects(spec: RuleSpec, el: Electorate, policy: TieBreakPolicy, preferred: CandidateId,
           strategy: Strategy | None = None) -> bool:
    """Does ``preferred`` win?  Honors ``policy.optimistic_for``."""
    if policy.optimistic_for is not None and strategy is None and spec.combinator != "sequential":
        return preferred in possible_winners(spec, el, policy)
    return run_electorate(spec, el, policy, record=False, strategy=strategy).winner == preferred
