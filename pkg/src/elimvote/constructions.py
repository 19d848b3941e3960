"""Explicit elections: separation families, the sequential example, adjoint
padding and the exact-cover oracle.

The veto hardness gadget lives in :mod:`elimvote.reduction`.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass

from .profile import (
    ELIMINATE_EARLIEST,
    ELIMINATE_LATEST,
    Ballot,
    CandidateId,
    Profile,
    TieBreakPolicy,
)
from .scoring import ScoringVector


# ------------------------------------------------------------ exact cover


@dataclass(frozen=True)
class CoverInstance:
    """Ground set {1..n} and m triples over it."""

    n: int
    sets: tuple[tuple[int, int, int], ...]

    def __post_init__(self):
        sets = tuple(tuple(int(x) for x in s) for s in self.sets)
        object.__setattr__(self, "sets", sets)
        if self.n < 1:
            raise ValueError("ground set must be nonempty")
        for s in sets:
            if len(s) != 3 or len(set(s)) != 3:
                raise ValueError(f"every set needs 3 distinct elements, got {list(s)}")
            if not all(1 <= x <= self.n for x in s):
                raise ValueError(f"set {list(s)} leaves the ground set 1..{self.n}")

    @property
    def m(self) -> int:
        return len(self.sets)

    @classmethod
    def from_json(cls, text: str) -> "CoverInstance":
        data = json.loads(text)
        if not isinstance(data, dict) or "n" not in data or "sets" not in data:
            raise ValueError("cover instance needs fields 'n' and 'sets'")
        return cls(int(data["n"]), tuple(tuple(s) for s in data["sets"]))

    def to_json(self) -> str:
        return json.dumps({"n": self.n, "sets": [list(s) for s in self.sets]})


def cover_oracle(instance: CoverInstance) -> tuple[int, ...] | None:
    """Lexicographically smallest exact cover, as 1-based set indices."""
    if instance.n % 3:
        raise ValueError(f"ground set size {instance.n} is not divisible by 3")
    universe = set(range(1, instance.n + 1))
    for idx in itertools.combinations(range(instance.m), instance.n // 3):
        covered = set().union(*(instance.sets[i] for i in idx))
        if covered == universe:
            return tuple(i + 1 for i in idx)
    return None


def is_cover(instance: CoverInstance, cover) -> bool:
    cover = tuple(cover)
    if len(cover) != instance.n // 3 or len(set(cover)) != len(cover):
        return False
    if not all(1 <= i <= instance.m for i in cover):
        return False
    covered = set().union(*(instance.sets[i - 1] for i in cover)) if cover else set()
    return covered == set(range(1, instance.n + 1))


# ------------------------------------------------------------ separation families


def _cyclic(seq, j):
    return seq[j:] + seq[:j]


def build_thm4_family(n: int) -> tuple[Profile, CandidateId, TieBreakPolicy]:
    """3n ballots over a, b, c, d1..dn where eliminate(veto) elects a but
    Coombs elects b.

    The returned policy breaks ties in favour of a (optimistic mode).
    """
    if n < 2:
        raise ValueError("family needs n >= 2")
    ds = [f"d{i}" for i in range(1, n + 1)]
    names = ["a", "b", "c", *ds]
    rankings = []
    for j in range(n):
        rankings.append(["a", *_cyclic(ds, j), "b", "c"])
    for j in range(n):
        rankings.append(["b", "a", *_cyclic(ds, j), "c"])
    for j in range(n):
        rankings.append(["c", "b", "a", *_cyclic(ds, j)])
    profile = Profile.from_rankings(names, rankings)
    policy = TieBreakPolicy.from_names(profile, ["c", "b", *ds, "a"], ELIMINATE_EARLIEST, "a")
    return profile, profile.index("a"), policy


def build_thm5_family(n: int) -> tuple[Profile, CandidateId, TieBreakPolicy]:
    """2n ballots over a, b, d1..dn where one Coombs manipulator suffices
    but eliminate(veto) needs many."""
    if n < 2:
        raise ValueError("family needs n >= 2")
    ds = [f"d{i}" for i in range(1, n + 1)]
    names = ["a", "b", *ds]
    rankings = [["a", "b", *_cyclic(ds, j)] for j in range(n)]
    rankings += [["b", *_cyclic(ds, j), "a"] for j in range(n)]
    profile = Profile.from_rankings(names, rankings)
    policy = TieBreakPolicy.from_names(profile, ["b", *ds, "a"], ELIMINATE_EARLIEST, "a")
    return profile, profile.index("a"), policy


# ------------------------------------------------------------ sequential example

EXAMPLE2_NAMES = ("a", "b", "c", "d", "e", "f", "g", "h", "p")
EXAMPLE2_PREFIXES = (
    (1, "a h p"),
    (1, "c a h p"),
    (1, "d a h p"),
    (3, "g a h p"),
    (2, "b h p"),
    (2, "e b h p"),
    (2, "f b h p"),
    (6, "h p"),
    (5, "p h"),
)
EXAMPLE2_PRIORITY = ("p", "g", "c", "d", "a", "e", "f", "b", "h")


def build_example2() -> tuple[Profile, TieBreakPolicy, CandidateId]:
    """Nine weighted ballots (total weight 23) under sequential(plurality).

    Unlisted tail positions are filled alphabetically.  Ties eliminate the
    candidate latest in the priority list, so h is the first to go and p the
    last.
    """
    rankings, weights = [], []
    for w, prefix in EXAMPLE2_PREFIXES:
        head = prefix.split()
        tail = [c for c in EXAMPLE2_NAMES if c not in head]
        rankings.append(head + tail)
        weights.append(w)
    profile = Profile.from_rankings(EXAMPLE2_NAMES, rankings, weights)
    policy = TieBreakPolicy.from_names(profile, EXAMPLE2_PRIORITY, ELIMINATE_LATEST)
    return profile, policy, profile.index("p")


# the manipulator's supported candidate in each round of the winning strategy
EXAMPLE2_STRATEGY = ("a", "a", "b", "b", "a", "p", "p", "p")


def example2_strategy(profile: Profile):
    """Round-indexed plurality strategy: support the listed candidate, then
    the rest by roster order."""
    picks = [profile.index(n) for n in EXAMPLE2_STRATEGY]

    def play(alive, k):
        top = picks[k - 1]
        if top not in alive:
            top = profile.index("p")
        return (top,) + tuple(c for c in sorted(alive) if c != top)

    return play


# ------------------------------------------------------------ adjoint padding


def cyclic_block(profile: Profile) -> list[tuple[CandidateId, ...]]:
    """The m cyclic shifts of the candidate order c_1, ..., c_m."""
    cands = profile.candidates
    return [tuple(_cyclic(list(cands), j)) for j in range(len(cands))]


def build_adjoint_padding(V: Profile, k: int, vector: ScoringVector | tuple[int, ...]) -> Profile:
    """reverse(V) plus s_1·(|V| + k + 1) copies of every cyclic shift.

    The padding gives each candidate the same score under any scoring
    vector, so it only fixes the elimination order after the first round.
    """
    if V.c < 3:
        raise ValueError("padding needs at least 3 candidates")
    s1 = tuple(vector)[0]
    copies = s1 * (V.total_weight + k + 1)
    rev = V.reversed()
    if copies == 0:
        return rev
    block = tuple(Ballot(r, copies) for r in cyclic_block(V))
    return Profile(V.names, rev.ballots + block, V.candidates)
