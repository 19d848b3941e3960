"""Scoring vectors, named rule families and the adjoint transform."""

from __future__ import annotations

from dataclasses import dataclass

HEISMAN = (3, 2, 1)
EUROVISION = (12, 10, 8, 7, 6, 5, 4, 3, 2, 1)

FAMILY_KINDS = ("plurality", "veto", "borda", "kapproval", "heisman", "eurovision", "custom", "truncated")


@dataclass(frozen=True)
class ScoringVector:
    entries: tuple[int, ...]

    def __post_init__(self):
        entries = tuple(int(e) for e in self.entries)
        object.__setattr__(self, "entries", entries)
        if not entries:
            raise ValueError("scoring vector needs at least one entry")
        if any(e < 0 for e in entries):
            raise ValueError(f"scoring vector entries must be nonnegative: {entries}")
        if any(a < b for a, b in zip(entries, entries[1:])):
            raise ValueError(f"scoring vector must be nonincreasing: {entries}")

    def __len__(self):
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def __getitem__(self, i):
        return self.entries[i]

    @property
    def degenerate(self) -> bool:
        return len(set(self.entries)) == 1


@dataclass(frozen=True)
class RuleFamily:
    """A positional rule that knows how to regenerate itself for m candidates.

    ``entries`` is used by ``custom`` and ``truncated``; ``k`` by ``kapproval``.
    """

    kind: str
    entries: tuple[int, ...] = ()
    k: int = 0

    def __post_init__(self):
        if self.kind not in FAMILY_KINDS:
            raise ValueError(f"unknown rule family {self.kind!r}")
        object.__setattr__(self, "entries", tuple(int(e) for e in self.entries))
        if self.kind == "kapproval" and self.k < 1:
            raise ValueError("k-approval needs k >= 1")
        if self.kind in ("custom", "truncated"):
            ScoringVector(self.entries)
        if self.kind == "heisman":
            object.__setattr__(self, "entries", HEISMAN)
        elif self.kind == "eurovision":
            object.__setattr__(self, "entries", EUROVISION)

    @property
    def is_veto(self) -> bool:
        return self.kind == "veto"

    def __str__(self):
        if self.kind == "kapproval":
            return f"kapproval:{self.k}"
        if self.kind == "custom":
            return "custom:" + ",".join(map(str, self.entries))
        if self.kind == "truncated":
            return "trunc:" + ",".join(map(str, self.entries))
        return self.kind


PLURALITY = RuleFamily("plurality")
VETO = RuleFamily("veto")
BORDA = RuleFamily("borda")


def instantiate(family: RuleFamily, m: int) -> ScoringVector:
    """The length-m scoring vector of ``family``.

    Named families are regenerated for the current number of candidates.
    Explicit vectors are cut to their first m entries; truncated ones are
    zero-padded.  A cut vector that became constant falls back to plurality,
    since a constant vector cannot separate candidates.
    """
    if m < 1:
        raise ValueError("need at least one candidate")
    kind = family.kind
    if kind == "plurality":
        return ScoringVector((1,) + (0,) * (m - 1))
    if kind == "veto":
        return ScoringVector((1,) * (m - 1) + (0,))
    if kind == "borda":
        return ScoringVector(tuple(range(m - 1, -1, -1)))
    if kind == "kapproval":
        if m == 1:
            return ScoringVector((1,))
        # k >= m would approve everyone; approve all but the last instead
        ones = min(family.k, m - 1)
        return ScoringVector((1,) * ones + (0,) * (m - ones))
    entries = family.entries
    if kind == "custom" and m > len(entries):
        raise ValueError(f"custom vector of length {len(entries)} cannot score {m} candidates")
    vec = entries[:m] + (0,) * max(0, m - len(entries))
    if m > 1 and len(set(vec)) == 1:
        return instantiate(PLURALITY, m)
    return ScoringVector(vec)


def adjoint(v: ScoringVector | tuple[int, ...]) -> ScoringVector:
    """(s_1 - s_m, s_1 - s_{m-1}, ..., s_1 - s_1)."""
    s = tuple(v)
    return ScoringVector(tuple(s[0] - x for x in reversed(s)))


def parse_family(spec: str) -> RuleFamily:
    """Parse ``plurality | veto | borda | kapproval:<k> | heisman | eurovision
    | custom:<s1,s2,...> | trunc:<s1,...,sk>``."""
    spec = spec.strip()
    name, _, arg = spec.partition(":")
    try:
        if name in ("plurality", "veto", "borda", "heisman", "eurovision") and not arg:
            return RuleFamily(name)
        if name == "kapproval":
            return RuleFamily("kapproval", k=int(arg))
        if name == "custom":
            return RuleFamily("custom", tuple(int(x) for x in arg.split(",")))
        if name == "trunc":
            return RuleFamily("truncated", tuple(int(x) for x in arg.split(",")))
    except ValueError as exc:
        raise ValueError(f"bad rule family {spec!r}: {exc}") from None
    raise ValueError(f"unknown rule family {spec!r}")
