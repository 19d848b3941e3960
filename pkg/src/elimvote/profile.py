"""Candidates, weighted ballots, profiles and tie-breaking.

Candidates are plain integer ids indexing ``Profile.names``.  Ids are stable
under :meth:`Profile.restrict`, so a trace can refer to the same candidate
in every round.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

CandidateId = int

ELIMINATE_EARLIEST = "eliminate-earliest"
ELIMINATE_LATEST = "eliminate-latest"
CONVENTIONS = (ELIMINATE_EARLIEST, ELIMINATE_LATEST)

_RESERVED = set(",>:#\n")


class ProfileError(ValueError):
    """Raised for malformed ballots or ballot files.

    ``line`` is the 1-based line number in the source text when known.
    """

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


@dataclass(frozen=True)
class Ballot:
    ranking: tuple[CandidateId, ...]
    multiplicity: int = 1

    def __post_init__(self):
        if self.multiplicity < 1:
            raise ProfileError(f"multiplicity must be positive, got {self.multiplicity}")


@dataclass(frozen=True)
class Profile:
    """Weighted complete strict rankings over the active candidates.

    ``names`` is the full name table.  ``candidates`` lists the ids still in
    play (all of them unless the profile came from :meth:`restrict`).
    """

    names: tuple[str, ...]
    ballots: tuple[Ballot, ...]
    candidates: tuple[CandidateId, ...] = None  # type: ignore[assignment]

    def __post_init__(self):
        names = tuple(self.names)
        object.__setattr__(self, "names", names)
        object.__setattr__(self, "ballots", tuple(self.ballots))
        if self.candidates is None:
            object.__setattr__(self, "candidates", tuple(range(len(names))))
        else:
            object.__setattr__(self, "candidates", tuple(sorted(self.candidates)))
        if len(set(names)) != len(names):
            raise ProfileError("candidate names must be unique")
        for name in names:
            if not name or name != name.strip() or _RESERVED & set(name):
                raise ProfileError(f"invalid candidate name {name!r}")
        if not self.candidates:
            raise ProfileError("profile needs at least one candidate")
        if not self.ballots:
            raise ProfileError("profile needs at least one ballot")
        active = set(self.candidates)
        if not active <= set(range(len(names))):
            raise ProfileError("active candidate outside the name table")
        for ballot in self.ballots:
            if len(ballot.ranking) != len(active) or set(ballot.ranking) != active:
                raise ProfileError(
                    "ballot must rank every active candidate exactly once: "
                    + " > ".join(self._label(c) for c in ballot.ranking)
                )

    def _label(self, c):
        return self.names[c] if 0 <= c < len(self.names) else str(c)

    @classmethod
    def from_rankings(
        cls,
        names: Sequence[str],
        rankings: Iterable[Sequence[str | int]],
        weights: Iterable[int] | None = None,
    ) -> "Profile":
        """Build a profile from rankings given as names or ids."""
        names = tuple(names)
        index = {n: i for i, n in enumerate(names)}
        rankings = list(rankings)
        weights = [1] * len(rankings) if weights is None else list(weights)
        ballots = []
        for ranking, w in zip(rankings, weights, strict=True):
            ids = tuple(index[c] if isinstance(c, str) else int(c) for c in ranking)
            ballots.append(Ballot(ids, w))
        return cls(names, tuple(ballots))

    @property
    def c(self) -> int:
        return len(self.candidates)

    @property
    def total_weight(self) -> int:
        return sum(b.multiplicity for b in self.ballots)

    def index(self, name: str) -> CandidateId:
        try:
            return self.names.index(name)
        except ValueError:
            raise ProfileError(f"unknown candidate {name!r}") from None

    def name(self, c: CandidateId) -> str:
        return self.names[c]

    def with_ballots(self, extra: Iterable[Ballot | Sequence[CandidateId]]) -> "Profile":
        """Return a copy with ``extra`` ballots appended."""
        more = tuple(b if isinstance(b, Ballot) else Ballot(tuple(b), 1) for b in extra)
        return Profile(self.names, self.ballots + more, self.candidates)

    def restrict(self, removed: Iterable[CandidateId]) -> "Profile":
        removed = frozenset(removed)
        if not removed:
            return self
        survivors = tuple(c for c in self.candidates if c not in removed)
        if not survivors:
            raise ProfileError("cannot remove every candidate")
        ballots = tuple(
            Ballot(tuple(c for c in b.ranking if c not in removed), b.multiplicity)
            for b in self.ballots
        )
        return Profile(self.names, ballots, survivors)

    def reversed(self) -> "Profile":
        """Every ballot with its ranking flipped."""
        ballots = tuple(Ballot(b.ranking[::-1], b.multiplicity) for b in self.ballots)
        return Profile(self.names, ballots, self.candidates)

    def rankings_by_name(self) -> list[tuple[int, tuple[str, ...]]]:
        return [(b.multiplicity, tuple(self.names[c] for c in b.ranking)) for b in self.ballots]


@dataclass(frozen=True)
class TieBreakPolicy:
    """Deterministic resolution of elimination ties.

    ``priority`` lists every candidate id.  Under ``eliminate-earliest`` the
    tied candidate appearing first in ``priority`` is eliminated; under
    ``eliminate-latest`` the one appearing last.  ``optimistic_for`` is only
    read by the manipulation solvers, which then branch over every tied loser
    instead of applying the convention.
    """

    priority: tuple[CandidateId, ...]
    convention: str = ELIMINATE_LATEST
    optimistic_for: CandidateId | None = None
    _rank: Mapping[CandidateId, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "priority", tuple(self.priority))
        if self.convention not in CONVENTIONS:
            raise ValueError(f"unknown tie-break convention {self.convention!r}")
        if len(set(self.priority)) != len(self.priority):
            raise ValueError("tie-break priority repeats a candidate")
        if self.optimistic_for is not None and self.optimistic_for not in self.priority:
            raise ValueError("optimistic_for must be a listed candidate")
        sign = 1 if self.convention == ELIMINATE_LATEST else -1
        # larger protection value = survives ties longer
        object.__setattr__(
            self, "_rank", {c: -sign * i for i, c in enumerate(self.priority)}
        )

    @classmethod
    def default(cls, profile: Profile) -> "TieBreakPolicy":
        """Roster order, earlier-listed candidates protected."""
        return cls(tuple(range(len(profile.names))), ELIMINATE_LATEST)

    @classmethod
    def from_names(
        cls,
        profile: Profile,
        names: Sequence[str],
        convention: str = ELIMINATE_LATEST,
        optimistic_for: str | None = None,
    ) -> "TieBreakPolicy":
        """Priority from a (possibly partial) list of names.

        Unlisted candidates are appended in roster order.
        """
        head = [profile.index(n) for n in names]
        seen = set(head)
        tail = [c for c in range(len(profile.names)) if c not in seen]
        opt = None if optimistic_for is None else profile.index(optimistic_for)
        return cls(tuple(head + tail), convention, opt)

    def protection(self, c: CandidateId) -> int:
        return self._rank[c]

    def loser(self, tied: Iterable[CandidateId]) -> CandidateId:
        return min(tied, key=self._rank.__getitem__)

    def most_protected(self, cands: Iterable[CandidateId]) -> CandidateId:
        return max(cands, key=self._rank.__getitem__)

    def deterministic(self) -> "TieBreakPolicy":
        return TieBreakPolicy(self.priority, self.convention, None)

    def optimistic(self, c: CandidateId) -> "TieBreakPolicy":
        return TieBreakPolicy(self.priority, self.convention, c)


@dataclass
class ScoreTable:
    """Scores of one round, keyed by candidate id."""

    scores: dict[CandidateId, int]
    k: int = 0

    def __getitem__(self, c: CandidateId) -> int:
        return self.scores[c]

    def __iter__(self):
        return iter(self.scores)

    def __len__(self):
        return len(self.scores)

    def items(self):
        return self.scores.items()

    def total(self) -> int:
        return sum(self.scores.values())


def positional_scores(profile: Profile, vector: Sequence[int], k: int = 0) -> ScoreTable:
    """score(c) = sum over ballots of multiplicity * vector[position of c]."""
    vector = tuple(vector)
    if len(vector) != profile.c:
        raise ValueError(f"scoring vector has length {len(vector)}, expected {profile.c}")
    scores = dict.fromkeys(profile.candidates, 0)
    for b in profile.ballots:
        w = b.multiplicity
        for pos, c in enumerate(b.ranking):
            scores[c] += w * vector[pos]
    return ScoreTable(scores, k)


def last_place_counts(profile: Profile, k: int = 0) -> ScoreTable:
    """Veto-score: weight of ballots ranking each candidate last."""
    scores = dict.fromkeys(profile.candidates, 0)
    for b in profile.ballots:
        scores[b.ranking[-1]] += b.multiplicity
    return ScoreTable(scores, k)


def first_place_counts(profile: Profile, k: int = 0) -> ScoreTable:
    scores = dict.fromkeys(profile.candidates, 0)
    for b in profile.ballots:
        scores[b.ranking[0]] += b.multiplicity
    return ScoreTable(scores, k)


def worst_candidates(scores: Mapping[CandidateId, int] | ScoreTable, direction: str = "min") -> list[CandidateId]:
    """All candidates holding the worst score (lowest, or highest for veto-scores)."""
    items = scores.items()
    if direction == "min":
        target = min(v for _, v in items)
    elif direction == "max":
        target = max(v for _, v in items)
    else:
        raise ValueError(f"direction must be 'min' or 'max', got {direction!r}")
    return [c for c, v in scores.items() if v == target]


def select_loser(
    scores: Mapping[CandidateId, int] | ScoreTable,
    policy: TieBreakPolicy,
    direction: str = "min",
) -> CandidateId:
    """The candidate to eliminate; ties resolved by the policy convention."""
    return policy.loser(worst_candidates(scores, direction))


def majority_winner(profile: Profile) -> CandidateId | None:
    """Candidate ranked first by strictly more than half the total weight."""
    firsts = first_place_counts(profile)
    total = profile.total_weight
    for c, v in firsts.items():
        if 2 * v > total:
            return c
    return None


def pairwise_matrix(profile: Profile) -> dict[tuple[CandidateId, CandidateId], int]:
    """Weight of ballots preferring x to y, for every ordered pair."""
    out = {(x, y): 0 for x in profile.candidates for y in profile.candidates if x != y}
    for b in profile.ballots:
        r = b.ranking
        for i, x in enumerate(r):
            for y in r[i + 1 :]:
                out[x, y] += b.multiplicity
    return out


def condorcet_winner(profile: Profile) -> CandidateId | None:
    """Candidate beating every other one in a strict pairwise majority."""
    m = pairwise_matrix(profile)
    for x in profile.candidates:
        if all(m[x, y] > m[y, x] for y in profile.candidates if y != x):
            return x
    return None


# ---------------------------------------------------------------- ballot files


def parse_profile(text: str) -> Profile:
    """Parse the ballot-file format.

    ::

        # comment
        candidates: a,b,c
        3: a > b > c
    """
    names: tuple[str, ...] | None = None
    index: dict[str, int] = {}
    ballots: list[Ballot] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if names is None:
            key, sep, rest = line.partition(":")
            if not sep or key.strip() != "candidates":
                raise ProfileError("expected 'candidates:' header", lineno)
            names = tuple(n.strip() for n in rest.split(","))
            if any(not n for n in names):
                raise ProfileError("empty candidate name", lineno)
            if len(set(names)) != len(names):
                raise ProfileError("duplicate candidate in header", lineno)
            index = {n: i for i, n in enumerate(names)}
            continue
        head, sep, rest = line.partition(":")
        if not sep:
            raise ProfileError("expected '<multiplicity>: ranking'", lineno)
        try:
            weight = int(head.strip())
        except ValueError:
            raise ProfileError(f"bad multiplicity {head.strip()!r}", lineno) from None
        if weight < 1:
            raise ProfileError(f"multiplicity must be positive, got {weight}", lineno)
        ranking = []
        seen = set()
        for tok in rest.split(">"):
            tok = tok.strip()
            if tok not in index:
                raise ProfileError(f"unknown candidate {tok!r}", lineno)
            c = index[tok]
            if c in seen:
                raise ProfileError(f"duplicate candidate {tok!r} in ranking", lineno)
            seen.add(c)
            ranking.append(c)
        if len(ranking) != len(names):
            missing = [n for n in names if index[n] not in seen]
            raise ProfileError(f"ranking is missing {', '.join(missing)}", lineno)
        ballots.append(Ballot(tuple(ranking), weight))
    if names is None:
        raise ProfileError("empty ballot file")
    if not ballots:
        raise ProfileError("ballot file has no ballots")
    return Profile(names, tuple(ballots))


def format_ballot(profile: Profile, ballot: Ballot) -> str:
    return f"{ballot.multiplicity}: " + " > ".join(profile.names[c] for c in ballot.ranking)


def serialize_profile(profile: Profile) -> str:
    """Inverse of :func:`parse_profile` for unrestricted profiles."""
    if profile.c != len(profile.names):
        # compact to the active candidates so the file stays self-consistent
        keep = profile.candidates
        remap = {c: i for i, c in enumerate(keep)}
        names = tuple(profile.names[c] for c in keep)
        ballots = tuple(Ballot(tuple(remap[c] for c in b.ranking), b.multiplicity) for b in profile.ballots)
        profile = Profile(names, ballots)
    lines = ["candidates: " + ",".join(profile.names)]
    lines += [format_ballot(profile, b) for b in profile.ballots]
    return "\n".join(lines) + "\n"
