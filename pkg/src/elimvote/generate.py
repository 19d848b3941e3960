"""Seeded random profiles."""

from __future__ import annotations

import random
import string

from .profile import Ballot, Profile


def candidate_names(m: int) -> tuple[str, ...]:
    if m <= 26:
        return tuple(string.ascii_lowercase[:m])
    return tuple(f"c{i}" for i in range(1, m + 1))


def random_profile(m: int, weight: int, seed: int | random.Random, names=None, max_mult: int = 3) -> Profile:
    """Uniform random rankings with total weight ``weight``.

    Identical rankings are merged; multiplicities of a single draw are capped
    at ``max_mult``.
    """
    rng = seed if isinstance(seed, random.Random) else random.Random(seed)
    names = tuple(names) if names is not None else candidate_names(m)
    if weight < 1:
        raise ValueError("total weight must be positive")
    counts: dict[tuple[int, ...], int] = {}
    left = weight
    while left:
        w = rng.randint(1, min(max_mult, left))
        r = list(range(m))
        rng.shuffle(r)
        counts[tuple(r)] = counts.get(tuple(r), 0) + w
        left -= w
    return Profile(names, tuple(Ballot(r, w) for r, w in counts.items()))


def random_thm2_profile(m: int, voters: int, seed: int | random.Random) -> Profile:
    """Profile over candidates named 0..m for the SAT demonstration rule.

    About a third of the ballots put 0 on top and therefore act as clauses.
    """
    if m < 3:
        raise ValueError("need candidates 0..m with m >= 3")
    rng = seed if isinstance(seed, random.Random) else random.Random(seed)
    names = tuple(str(i) for i in range(m + 1))
    ballots = []
    for _ in range(voters):
        rest = list(range(1, m + 1))
        rng.shuffle(rest)
        if rng.random() < 0.35:
            r = [0] + rest
        else:
            r = rest[:]
            r.insert(rng.randint(0, m), 0)
        ballots.append(Ballot(tuple(r), 1))
    return Profile(names, tuple(ballots))
