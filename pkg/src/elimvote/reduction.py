"""Exact-cover to eliminate(veto) gadget.

Given a 3-COVER instance the builder emits an election in which one extra
ballot can make ``p`` win exactly when a cover exists.  Vote types are
described bottom-up (least preferred first), which is how the gadget is
easiest to reason about: only a ballot's bottom survivor matters to veto.

Candidate roles
    preferred      p
    item           d0, d1..dn
    first-loser    a_i, abar_i
    second-line    b_i, bbar_i
    pump           p_i
    switch         s1, s2
    garbage        one g per vote line, collects veto points late on
    garbage-prime  one g' per vote line, kept at the top so p cannot reach
                   a majority early (this matters for Coombs)
"""

from __future__ import annotations

import itertools
import json
from dataclasses import asdict, dataclass, field

from .constructions import CoverInstance, is_cover
from .engines import EliminationTrace, Electorate
from .profile import ELIMINATE_EARLIEST, Ballot, CandidateId, Profile, TieBreakPolicy


@dataclass(frozen=True)
class ReductionConstants:
    f1: int
    f2: int
    f3: int
    f4: int
    f12: int
    f123: int
    X: int

    @classmethod
    def for_instance(cls, m: int, n: int, X: int) -> "ReductionConstants":
        k = 2 * m + 3
        f1, f2, f3 = 11 * k, 8 * k, 3 + k
        c = cls(f1, f2, f3, 2 * m - 2 * n // 3 + 3, f1 + f2, f1 + f2 + f3, X)
        if c.f4 <= 0 or X <= 16 * m**5:
            raise ValueError("gadget constants leave f4 or X out of range")
        return c

    def violations(self, m: int) -> list[str]:
        """Names of the design inequalities these constants break.

        The stock instantiation breaks ``f1 >= f2+2f3+2`` when m < 3; the
        round-by-round replay in :func:`check_phase_invariants` is what
        certifies a particular gadget.
        """
        f1, f2, f3 = self.f1, self.f2, self.f3
        rules = {
            "f12 = f1+f2": self.f12 == f1 + f2,
            "f123 = f1+f2+f3": self.f123 == f1 + f2 + f3,
            "f1 >= f2+2f3+2": f1 >= f2 + 2 * f3 + 2,
            "2f2 >= f1+2": 2 * f2 >= f1 + 2,
            "2f2 >= f3+2": 2 * f2 >= f3 + 2,
            "f1 >= f3+2": f1 >= f3 + 2,
            "f_i >= 2m+3": min(f1, f2, f3) >= 2 * m + 3,
            "f4 > 0": self.f4 > 0,
            "X > 16m^5": self.X > 16 * m**5,
        }
        return [name for name, ok in rules.items() if not ok]


@dataclass(frozen=True)
class VoteLine:
    """One vote type: ``bottom`` prefix (least preferred first) and its count."""

    line: int
    bottom: tuple[str, ...]
    multiplicity: int
    garbage: str | None


@dataclass
class ReductionOutput:
    instance: CoverInstance
    profile: Profile
    preferred: CandidateId
    policy: TieBreakPolicy
    roles: dict[CandidateId, str]
    constants: ReductionConstants
    lines: list[VoteLine] = field(repr=False, default_factory=list)

    def id(self, name: str) -> CandidateId:
        return self.profile.index(name)

    @property
    def m(self) -> int:
        return self.instance.m

    @property
    def n(self) -> int:
        return self.instance.n

    def sidecar(self) -> str:
        """Roles, constants and the tie-break order as JSON."""
        names = self.profile.names
        return json.dumps(
            {
                "instance": json.loads(self.instance.to_json()),
                "preferred": names[self.preferred],
                "constants": asdict(self.constants),
                "tiebreak": {
                    "priority": [names[c] for c in self.policy.priority],
                    "convention": self.policy.convention,
                },
                "roles": {names[c]: r for c, r in sorted(self.roles.items())},
            },
            indent=2,
        )


def _x_floor(m: int, n: int, f1: int, f2: int, f3: int, f4: int) -> int:
    # every multiplicity X - (something) must stay positive, and X has to
    # dominate the pump totals reached before garbage collection starts
    sigma_s1 = (n + 3) * (4 * f2 + f1)
    sigma_pm = 2 * f2 * (n + 4) + f1
    sigma_p1 = 2 * f2 * (5 * (m - 1) + n + 4) + (f1 if m == 1 else 0)
    return max(16 * m**5, sigma_s1, sigma_pm, sigma_p1, f1 + f2 + f3,
               2 * f2 * (m + 2) + f1 + f4 + n + 2) + 1


def _names(m: int, n: int) -> dict[str, list[str]]:
    r = range(1, m + 1)
    return {
        "preferred": ["p"],
        "item": [f"d{i}" for i in range(n + 1)],
        "first-loser": [f"a{i}" for i in r] + [f"abar{i}" for i in r],
        "second-line": [f"b{i}" for i in r] + [f"bbar{i}" for i in r],
        "pump": [f"p{i}" for i in r],
        "switch": ["s1", "s2"],
    }


def _vote_lines(inst: CoverInstance, K: ReductionConstants) -> list[tuple[int, tuple[str, ...], object, str | None]]:
    """Vote types in table order with symbolic multiplicities for block P2."""
    m, n = inst.m, inst.n
    f1, f2, f3, f4, f12, f123, X = K.f1, K.f2, K.f3, K.f4, K.f12, K.f123, K.X
    out = []

    def add(line, bottom, mult, key):
        out.append((line, tuple(bottom), mult, key))

    add(1, ["p"], X - 1, "p")
    add(2, ["d0"], X - f4, "d0")
    for i in range(1, n + 1):
        add(3, [f"d{i}"], X - 3, f"d{i}")
    for i in range(1, m + 1):
        add(4, [f"b{i}"], X - 6, f"b{i}")
        for j in inst.sets[i - 1]:
            add(5, [f"b{i}", f"d{j}"], 2, f"b{i}d{j}")
    for i in range(1, m + 1):
        add(6, [f"bbar{i}"], X - 2, f"bbar{i}")
        add(7, [f"bbar{i}", "d0"], 2, f"bbar{i}d0")
    for bar, other_b in (("", "b"), ("bar", "bbar")):
        first = f"a{bar}"
        partner = "abar" if bar == "" else "a"
        line0 = 8 if bar == "" else 13
        for i in range(1, m + 1):
            add(line0, [f"{first}{i}"], X - f123 if i < m else X - f12, f"{first}{i}")
            add(line0 + 1, [f"{first}{i}", f"{other_b}{i}"], f1, f"{first}{i}{other_b}{i}")
            add(line0 + 2, [f"{first}{i}", f"{partner}{i}", f"p{i}"], f2, f"{first}{i}{partner}{i}p{i}")
            if i < m:
                add(line0 + 3, [f"{first}{i}", f"{partner}{i}", f"{first}{i + 1}"], f3,
                    f"{first}{i}{partner}{i}{first}{i + 1}")
        # three extra veto points so a1 and abar1 open the election tied at X+3
        add(line0 + 4, [f"{first}1"], 3, f"{first}1x")
    for i in range(1, m + 1):
        for j in range(i + 1, m + 1):
            for line, tag in ((18, "a"), (19, "abar"), (20, "b"), (21, "bbar"), (22, "p")):
                add(line, [f"p{i}", f"{tag}{j}"], 2 * f2, f"p{i}{tag}{j}")
    for i in range(1, m + 1):
        add(23, [f"p{i}", "p"], 2 * f2, f"p{i}p")
        add(24, [f"p{i}", "d0"], 2 * f2, f"p{i}d0")
        for k in range(1, n + 1):
            add(25, [f"p{i}", f"d{k}"], 2 * f2, f"p{i}d{k}")
        add(26, [f"p{i}", "s1"], 2 * f2, f"p{i}s1")
        if i == m:
            add(27, [f"p{m}", "s1"], f1, f"p{m}s1x")
        add(28, [f"p{i}", "s2"], 2 * f2, f"p{i}s2")
    add(29, ["s1", "p"], 4 * f2 + f1, "s1p")
    add(30, ["s1", "d0"], 4 * f2 + f1, "s1d0")
    for k in range(1, n + 1):
        add(31, ["s1", f"d{k}"], 4 * f2 + f1, f"s1d{k}")
    add(32, ["s1", "s2"], 4 * f2 + f1, "s1s2")
    add(33, ["d0", "s2"], 1, "d0s2")
    for k in range(1, n + 1):
        add(34, [f"d{k}", "s2"], 1, f"d{k}s2")
    add(35, ["s2"], X - n - 3, None)
    for i in range(1, m + 1):
        add(36, [f"p{i}"], ("fill", f"p{i}"), f"p{i}")
    add(37, ["s1"], ("fill", "s1"), "s1")
    return out


def gadget_size(m: int, n: int) -> tuple[int, int]:
    """(candidates, distinct ballots) predicted from the line inventory."""
    lines = 19 * m + 8 + 3 * n + n * m + 5 * m * (m - 1) // 2
    return n + 5 * m + 4 + 2 * lines, lines + 1


def build_veto_reduction(instance: CoverInstance) -> ReductionOutput:
    """The gadget election for ``instance``."""
    m, n = instance.m, instance.n
    if n % 3 or n < 3:
        raise ValueError(f"ground set size must be a positive multiple of 3, got {n}")
    if 2 * m - 2 * n // 3 + 3 <= 0:
        raise ValueError(f"{m} sets are too few for a gadget over {n} items")
    k = 2 * m + 3
    f1, f2, f3, f4 = 11 * k, 8 * k, 3 + k, 2 * m - 2 * n // 3 + 3
    K = ReductionConstants.for_instance(m, n, _x_floor(m, n, f1, f2, f3, f4))

    raw = _vote_lines(instance, K)
    groups = _names(m, n)
    base = [c for role in groups.values() for c in role]
    garbage = [f"g_{key}" for _, _, _, key in raw if key is not None]
    primes = [f"g'_{key}" for _, _, _, key in raw if key is not None]
    names = base + garbage + primes
    if len(set(names)) != len(names):
        raise AssertionError("garbage collector names collide")
    index = {nm: i for i, nm in enumerate(names)}
    g_items = [f"g_d{i}" for i in range(n + 1)]

    # tallies over block P1 fix the block P2 multiplicities
    sigma = {}
    for line, bottom, mult, _ in raw:
        if line <= 35:
            sigma[bottom[0]] = sigma.get(bottom[0], 0) + mult

    ballots, lines = [], []
    for line, bottom, mult, key in raw:
        if isinstance(mult, tuple):
            mult = K.X - sigma.get(mult[1], 0)
        if mult < 1:
            raise AssertionError(f"line {line} has nonpositive multiplicity {mult}")
        order = list(bottom)
        top = []
        if key is not None:
            order.append(f"g_{key}")
            top = [f"g'_{key}"]
        placed = set(order) | set(top) | {"p"}
        order += [g for g in g_items if g not in placed]
        placed |= set(g_items)
        order += [c for c in names if c not in placed]
        if "p" not in bottom:
            order.append("p")
        order += top
        assert len(order) == len(names)
        ballots.append(Ballot(tuple(index[c] for c in reversed(order)), mult))
        lines.append(VoteLine(line, bottom, mult, key))

    profile = Profile(tuple(names), tuple(ballots))
    head = ["s2", "d0", "p"] + [f"d{i}" for i in range(1, n + 1)]
    policy = TieBreakPolicy.from_names(profile, head, ELIMINATE_EARLIEST)
    roles = {index[c]: role for role, cs in groups.items() for c in cs}
    roles.update({index[g]: "garbage" for g in garbage})
    roles.update({index[g]: "garbage-prime" for g in primes})
    return ReductionOutput(instance, profile, index["p"], policy, roles, K, lines)


def cover_to_ballot(red: ReductionOutput, cover) -> tuple[CandidateId, ...]:
    """The manipulator's ballot for a cover, most preferred first.

    From the bottom up: for each group i the pair a_i/abar_i, with a_i lowest
    when i is in the cover; then d0, then s2.  p goes on top and everything
    else sits in between in roster order.
    """
    if not is_cover(red.instance, cover):
        raise ValueError(f"{sorted(cover)} is not an exact cover")
    return _pattern_ballot(red, set(cover))


def _pattern_ballot(red: ReductionOutput, chosen: set[int]) -> tuple[CandidateId, ...]:
    bottom = []
    for i in range(1, red.m + 1):
        pair = [f"a{i}", f"abar{i}"]
        bottom += pair if i in chosen else pair[::-1]
    bottom += ["d0", "s2"]
    ids = [red.id(c) for c in bottom]
    used = set(ids) | {red.preferred}
    middle = [c for c in red.profile.candidates if c not in used]
    return (red.preferred, *middle[::-1], *ids[::-1])


def canonical_ballots(red: ReductionOutput):
    """One templated ballot per subset of sets, valid cover or not."""
    for bits in itertools.product((False, True), repeat=red.m):
        yield _pattern_ballot(red, {i + 1 for i, b in enumerate(bits) if b})


# ------------------------------------------------------------ verification


@dataclass
class PhaseCheck:
    round: int
    claim: str
    passed: bool
    detail: str = ""


@dataclass
class PhaseReport:
    checks: list[PhaseCheck]

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def first_failure(self) -> PhaseCheck | None:
        return next((c for c in self.checks if not c.passed), None)

    def summary(self) -> str:
        bad = self.first_failure
        if bad is None:
            return f"all {len(self.checks)} phase checks hold"
        return f"round {bad.round}: {bad.claim} fails ({bad.detail})"


def check_phase_invariants(trace: EliminationTrace, red: ReductionOutput) -> PhaseReport:
    """Replay the round claims of the gadget against a trace.

    Veto-scores are recomputed from the sincere ballots alone, so the trace
    may come from the gadget with or without the manipulator's ballot.
    """
    if not trace.rounds or trace.rounds[0].remaining != frozenset(red.profile.candidates):
        raise ValueError("trace does not start from the gadget's candidate set")
    m, n = red.m, red.n
    el = Electorate.of(red.profile)
    nm = red.profile.names
    i_ = red.id
    checks: list[PhaseCheck] = []

    def add(k, claim, ok, detail=""):
        checks.append(PhaseCheck(k, claim, bool(ok), detail))

    rounds = {r.k: r for r in trace.rounds}
    need = 4 * m + 2
    if len(trace.rounds) < need:
        add(len(trace.rounds), f"trace reaches round {need}", False, f"only {len(trace.rounds)} rounds")
        return PhaseReport(checks)

    def out(k):
        (x,) = rounds[k].eliminated
        return x

    for i in range(m):
        k = 4 * i + 1
        r = rounds[k]
        s = el.bottoms(r.remaining)
        a, abar = i_(f"a{i + 1}"), i_(f"abar{i + 1}")
        excluded = {i_(f"a{j}") for j in range(1, i + 2)} | {i_(f"abar{j}") for j in range(1, i + 2)}
        excluded |= {i_(f"b{j}") for j in range(1, i + 1)} | {i_(f"bbar{j}") for j in range(1, i + 1)}
        live = a in s and abar in s
        add(k, f"a{i + 1} and abar{i + 1} tied on top", live and s[a] == s[abar],
            f"{s.get(a)} vs {s.get(abar)}" if live else "pair not alive")
        if live:
            rest = [c for c in s if c not in excluded]
            worst = max(rest, key=s.__getitem__) if rest else None
            lead = worst is None or s[a] >= s[worst] + 3
            add(k, f"a{i + 1} leads every other candidate by 3", lead,
                "" if worst is None else f"{s[a]} vs {nm[worst]}={s[worst]}")
        first = out(k)
        add(k, f"a{i + 1} or abar{i + 1} eliminated", first in (a, abar), nm[first])
        b, bbar = i_(f"b{i + 1}"), i_(f"bbar{i + 1}")
        add(k + 1, "matching second-line candidate eliminated", out(k + 1) == (b if first == a else bbar), nm[out(k + 1)])
        add(k + 2, "partner first-loser eliminated", out(k + 2) == (abar if first == a else a), nm[out(k + 2)])
        add(k + 3, f"pump p{i + 1} eliminated", out(k + 3) == i_(f"p{i + 1}"), nm[out(k + 3)])
    add(4 * m + 1, "s1 eliminated", out(4 * m + 1) == i_("s1"), nm[out(4 * m + 1)])

    k = 4 * m + 2
    s1 = el.bottoms(red.profile.candidates)
    s = el.bottoms(rounds[k].remaining)
    p, d0, s2 = i_("p"), i_("d0"), i_("s2")
    alive = all(c in s for c in [p, s2] + [i_(f"d{j}") for j in range(n + 1)])
    add(k, "p, s2 and all items alive", alive)
    if not alive:
        return PhaseReport(checks)
    grow = s[p] - s1[p]
    y = {j: (s[i_(f"d{j}")] - s1[i_(f"d{j}")]) - grow for j in range(n + 1)}
    for j in range(n + 1):
        add(k, f"y{j} is even and nonnegative", y[j] >= 0 and y[j] % 2 == 0, str(y[j]))
    for j in range(1, n + 1):
        lhs, rhs = s[p], s[i_(f"d{j}")] - 1 + 2 - y[j]
        add(k, f"p versus d{j}", lhs == rhs, f"{lhs} vs {rhs}")
    lhs, rhs = s[p], s[d0] - 1 + 2 * (m - n // 3 + 1) - y[0]
    add(k, "p versus d0", lhs == rhs, f"{lhs} vs {rhs}")
    lhs, rhs = s[p], s[s2] - 1 + (n + 1) + 2
    add(k, "p versus s2", lhs == rhs, f"{lhs} vs {rhs}")
    return PhaseReport(checks)
