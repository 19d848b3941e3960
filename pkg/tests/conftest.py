import random

import pytest
from hypothesis import strategies as st

from elimvote.generate import random_profile
from elimvote.profile import Ballot, Profile


def to_named(profile):
    """Plain (weight, [names]) ballots for the oracles."""
    return [(b.multiplicity, [profile.names[c] for c in b.ranking]) for b in profile.ballots]


def named_rounds(trace, profile):
    n = profile.names
    return [
        (frozenset(n[c] for c in r.remaining), {n[c]: v for c, v in r.scores.items()}, {n[c] for c in r.eliminated})
        for r in trace.rounds
    ]


def seeded_profiles(count, seed, m_range=(2, 5), max_weight=9):
    rng = random.Random(seed)
    for _ in range(count):
        yield random_profile(rng.randint(*m_range), rng.randint(1, max_weight), rng)


@st.composite
def profiles(draw, min_m=1, max_m=5, max_ballots=6, max_mult=3):
    m = draw(st.integers(min_m, max_m))
    names = tuple("abcdefgh"[:m])
    n = draw(st.integers(1, max_ballots))
    ballots = []
    for _ in range(n):
        r = draw(st.permutations(range(m)))
        ballots.append(Ballot(tuple(r), draw(st.integers(1, max_mult))))
    return Profile(names, tuple(ballots))


@pytest.fixture
def abc():
    return Profile.from_rankings("abc", [["a", "b", "c"], ["b", "c", "a"]], [2, 1])
