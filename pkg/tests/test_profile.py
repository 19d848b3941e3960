import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import profiles
from elimvote.constructions import build_example2, build_thm4_family, build_thm5_family
from elimvote.profile import (
    ELIMINATE_EARLIEST,
    ELIMINATE_LATEST,
    Ballot,
    Profile,
    ProfileError,
    ScoreTable,
    TieBreakPolicy,
    condorcet_winner,
    last_place_counts,
    majority_winner,
    parse_profile,
    positional_scores,
    select_loser,
    serialize_profile,
)


def test_parse_single_line():
    p = parse_profile("candidates: a,b,c\n3: a > b > c\n")
    assert p.names == ("a", "b", "c")
    assert p.ballots == (Ballot((0, 1, 2), 3),)
    assert p.total_weight == 3


def test_parse_comments_and_blank_lines():
    text = "# header\n\ncandidates: x, y  # trailing\n1: y > x\n\n2: x > y # note\n"
    p = parse_profile(text)
    assert p.rankings_by_name() == [(1, ("y", "x")), (2, ("x", "y"))]


def test_example2_profile_shape():
    p, _, _ = build_example2()
    assert p.c == 9
    assert len({b.ranking for b in p.ballots}) == 9
    assert parse_profile(serialize_profile(p)) == p


@pytest.mark.parametrize(
    "body, message, line",
    [
        ("1: a > a > b", "duplicate", 2),
        ("1: a > b", "missing c", 2),
        ("1: a > b > z", "unknown", 2),
        ("0: a > b > c", "positive", 2),
        ("-2: a > b > c", "positive", 2),
        ("1: a > b > c\nx: a > b > c", "multiplicity", 3),
        ("a > b > c", "expected", 2),
    ],
)
def test_parse_errors_carry_line_numbers(body, message, line):
    with pytest.raises(ProfileError) as err:
        parse_profile("candidates: a,b,c\n" + body + "\n")
    assert message in str(err.value)
    assert err.value.line == line


def test_parse_needs_header_and_ballots():
    with pytest.raises(ProfileError):
        parse_profile("1: a > b\n")
    with pytest.raises(ProfileError):
        parse_profile("candidates: a,b\n")
    with pytest.raises(ProfileError):
        parse_profile("candidates: a,a\n1: a > a\n")


@given(profiles())
def test_serialize_round_trip(p):
    text = serialize_profile(p)
    assert parse_profile(text) == p
    assert serialize_profile(parse_profile(text)) == text


def test_restrict_examples():
    thm4, _, _ = build_thm4_family(2)
    assert thm4.restrict(set()) == thm4
    c = thm4.index("c")
    r = thm4.restrict({c})
    starts = [new.ranking[:2] for old, new in zip(thm4.ballots, r.ballots) if old.ranking[0] == c]
    assert starts == [(thm4.index("b"), thm4.index("a"))] * 2
    one = thm4.restrict(set(thm4.candidates) - {c})
    assert all(b.ranking == (c,) for b in one.ballots)
    with pytest.raises(ProfileError):
        thm4.restrict(thm4.candidates)


@given(profiles(min_m=3), st.data())
def test_restrict_idempotent_and_commuting(p, data):
    cands = list(p.candidates)
    a = set(data.draw(st.lists(st.sampled_from(cands), max_size=1)))
    b = set(data.draw(st.lists(st.sampled_from([c for c in cands if c not in a]), max_size=1)))
    assert p.restrict(a).restrict(a) == p.restrict(a)
    assert p.restrict(a).restrict(b) == p.restrict(b).restrict(a) == p.restrict(a | b)
    for orig, new in zip(p.ballots, p.restrict(a).ballots):
        assert new.multiplicity == orig.multiplicity
        assert list(new.ranking) == [c for c in orig.ranking if c not in a]


def test_positional_scores_examples():
    p, _, _ = build_example2()
    s = positional_scores(p, (1,) + (0,) * 8)
    assert (s[p.index("h")], s[p.index("p")], s[p.index("g")]) == (6, 5, 3)
    assert set(positional_scores(p, (0,) * 9).scores.values()) == {0}
    with pytest.raises(ValueError):
        positional_scores(p, (1, 0))
    thm4, _, _ = build_thm4_family(2)
    assert last_place_counts(thm4)[thm4.index("c")] == 4


@given(profiles(), st.data())
def test_positional_scores_linear_in_multiplicity(p, data):
    vec = sorted(data.draw(st.lists(st.integers(0, 5), min_size=p.c, max_size=p.c)), reverse=True)
    doubled = Profile(p.names, tuple(Ballot(b.ranking, 2 * b.multiplicity) for b in p.ballots))
    s, d = positional_scores(p, vec), positional_scores(doubled, vec)
    assert all(d[c] == 2 * s[c] for c in p.candidates)
    dup = Profile(p.names, p.ballots + p.ballots[:1])
    extra = positional_scores(Profile(p.names, p.ballots[:1]), vec)
    assert all(positional_scores(dup, vec)[c] == s[c] + extra[c] for c in p.candidates)


def test_select_loser_examples():
    assert select_loser({0: 3, 1: 1, 2: 2}, TieBreakPolicy((0, 1, 2))) == 1
    # s2 before p under eliminate-earliest
    pol = TieBreakPolicy((5, 0, 9), ELIMINATE_EARLIEST)
    assert select_loser({5: 7, 9: 7}, pol, "max") == 5
    p, policy, _ = build_example2()
    tied = {p.index(c): 6 for c in "abhp"}
    assert p.names[select_loser(tied, policy)] == "h"


@given(st.dictionaries(st.integers(0, 5), st.integers(0, 20), min_size=1), st.integers(0, 50),
       st.sampled_from([ELIMINATE_EARLIEST, ELIMINATE_LATEST]), st.sampled_from(["min", "max"]))
def test_select_loser_shift_invariant(scores, shift, conv, direction):
    pol = TieBreakPolicy(tuple(range(6)), conv)
    shifted = {c: v + shift for c, v in scores.items()}
    assert select_loser(scores, pol, direction) == select_loser(shifted, pol, direction)


def test_majority_winner_examples():
    thm4, _, _ = build_thm4_family(2)
    assert majority_winner(thm4.restrict({thm4.index("c")})) == thm4.index("b")
    thm5, _, _ = build_thm5_family(3)
    assert majority_winner(thm5) is None
    single = Profile(("x",), (Ballot((0,), 4),))
    assert majority_winner(single) == 0


def test_condorcet_examples():
    p = Profile.from_rankings("abc", [["a", "b", "c"], ["b", "c", "a"]], [2, 1])
    assert condorcet_winner(p) == 0
    cyc = Profile.from_rankings("abc", [["a", "b", "c"], ["b", "c", "a"], ["c", "a", "b"]])
    assert condorcet_winner(cyc) is None
    u = Profile.from_rankings("abc", [["c", "a", "b"]], [5])
    assert condorcet_winner(u) == 2


@given(profiles(min_m=2, max_m=2))
def test_majority_matches_condorcet_on_two_candidates(p):
    mw, cw = majority_winner(p), condorcet_winner(p)
    if mw is not None and cw is not None:
        assert mw == cw
    assert (mw is None) == (cw is None)


def test_policy_conventions():
    p = Profile.from_rankings("abcd", [["a", "b", "c", "d"]])
    early = TieBreakPolicy.from_names(p, ["c", "a"], ELIMINATE_EARLIEST)
    assert early.priority == (2, 0, 1, 3)
    assert early.loser([0, 2, 3]) == 2
    assert early.most_protected([0, 2, 3]) == 3
    late = TieBreakPolicy.from_names(p, ["c", "a"], ELIMINATE_LATEST)
    assert late.loser([0, 2, 3]) == 3
    assert late.optimistic(1).optimistic_for == 1
    assert late.optimistic(1).deterministic().optimistic_for is None
    with pytest.raises(ValueError):
        TieBreakPolicy((0, 0, 1))
    with pytest.raises(ValueError):
        TieBreakPolicy((0, 1), "coin-flip")


def test_profile_invariants():
    with pytest.raises(ProfileError):
        Profile(("a", "b"), (Ballot((0,), 1),))
    with pytest.raises(ProfileError):
        Profile(("a", "a"), (Ballot((0, 1), 1),))
    with pytest.raises(ProfileError):
        Profile(("a", "b"), ())
    with pytest.raises(ProfileError):
        Ballot((0, 1), 0)
    with pytest.raises(ProfileError):
        Profile(("a>b", "c"), (Ballot((0, 1), 1),))


def test_score_table_helpers():
    t = ScoreTable({0: 2, 1: 3}, 4)
    assert t.total() == 5 and len(t) == 2 and list(t) == [0, 1] and t[1] == 3
