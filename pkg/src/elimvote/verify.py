"""Self-checking suites that rebuild each construction and test its claims."""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field

from .constructions import (
    CoverInstance,
    build_adjoint_padding,
    build_example2,
    build_thm4_family,
    build_thm5_family,
    cover_oracle,
    example2_strategy,
    is_cover,
)
from .engines import Electorate, RuleSpec, elects, parse_rule, run_electorate, run_rule, run_sequential
from .generate import random_profile
from .manipulation import (
    ManipulationQuery,
    find_manipulation_brute,
    find_manipulation_frontier,
    min_coalition,
    sequential_manipulate,
    verify_strategy,
)
from .profile import Profile, TieBreakPolicy, last_place_counts, majority_winner, positional_scores, select_loser
from .reduction import build_veto_reduction, canonical_ballots, check_phase_invariants, cover_to_ballot, gadget_size
from .scoring import BORDA, PLURALITY, instantiate

SUITES = ("thm3", "thm4", "thm5", "thm6", "thm9", "example2")


@dataclass
class Report:
    suite: str
    params: dict
    results: list[tuple[str, bool, str]] = field(default_factory=list)

    def check(self, name: str, ok: bool, detail: str = "") -> bool:
        self.results.append((name, bool(ok), detail))
        return bool(ok)

    @property
    def ok(self) -> bool:
        return all(ok for _, ok, _ in self.results)

    def to_text(self) -> str:
        params = " ".join(f"{k}={v}" for k, v in self.params.items())
        lines = [f"suite: {self.suite} {params}".rstrip()]
        for name, ok, detail in self.results:
            lines.append(f"{'PASS' if ok else 'FAIL'} {name}" + (f": {detail}" if detail else ""))
        lines.append(f"result: {'pass' if self.ok else 'fail'}")
        return "\n".join(lines) + "\n"

    def to_dict(self) -> dict:
        return {
            "suite": self.suite,
            "params": self.params,
            "checks": [{"name": n, "passed": ok, "detail": d} for n, ok, d in self.results],
            "passed": self.ok,
        }


# ------------------------------------------------------------ example 2


def verify_example2(budget: int | None = None) -> Report:
    rep = Report("example2", {})
    profile, policy, p = build_example2()
    rep.check("total weight is 23", profile.total_weight == 23, str(profile.total_weight))
    plur = positional_scores(profile, instantiate(PLURALITY, profile.c).entries)
    rep.check("plurality tally h=6 p=5 g=3",
              (plur[profile.index("h")], plur[p], plur[profile.index("g")]) == (6, 5, 3))
    narrative = run_sequential(PLURALITY, profile, policy, example2_strategy(profile))
    rep.check("narrated strategy elects p", narrative.winner == p, profile.names[narrative.winner])
    adaptive = sequential_manipulate(PLURALITY, profile, p, policy, budget)
    ok = adaptive.decision and verify_strategy(PLURALITY, profile, p, policy, adaptive.strategy)
    rep.check("adaptive manipulation exists", ok, f"{adaptive.stats['nodes']} nodes")
    fixed = find_manipulation_brute(ManipulationQuery(RuleSpec("sequential", PLURALITY), profile, p, 1, policy), budget)
    rep.check("no fixed ballot elects p", not fixed.decision, f"{fixed.stats['ballots_tried']} ballots tried")
    return rep


# ------------------------------------------------------------ separation families


def _cyclic_ok(profile: Profile, start: int, n: int) -> bool:
    blocks = [b.ranking[start:start + n] for b in profile.ballots]
    for g in range(0, len(blocks), n):
        grp = blocks[g:g + n]
        if sorted(grp) != sorted(tuple(grp[0][j:] + grp[0][:j]) for j in range(n)):
            return False
    return True


def verify_thm4(n: int = 2, budget: int | None = None) -> Report:
    rep = Report("thm4", {"n": n})
    profile, a, policy = build_thm4_family(n)
    rep.check(f"{3 * n} ballots over {n + 3} candidates", len(profile.ballots) == 3 * n and profile.c == n + 3)
    veto = run_rule("eliminate:veto", profile, policy)
    rep.check("eliminate(veto) elects a without manipulators", veto.winner == a, profile.names[veto.winner])
    coombs = run_rule("coombs", profile, policy)
    rep.check("Coombs elects b", profile.names[coombs.winner] == "b", profile.names[coombs.winner])
    k = min_coalition("coombs", profile, a, 2 * n, policy, budget=budget)
    rep.check("Coombs needs at least 2 manipulators", k is not None and k >= 2, f"minimum coalition {k}")
    return rep


def verify_thm5(n: int = 3, budget: int | None = None) -> Report:
    rep = Report("thm5", {"n": n})
    profile, a, policy = build_thm5_family(n)
    rep.check(f"{2 * n} ballots over {n + 2} candidates", len(profile.ballots) == 2 * n and profile.c == n + 2)
    rep.check("no majority winner", majority_winner(profile) is None)
    k = min_coalition("coombs", profile, a, 1, policy, budget=budget)
    rep.check("one Coombs manipulator suffices", k == 1, f"minimum coalition {k}")
    k = min_coalition("eliminate:veto", profile, a, n, policy, budget=budget)
    rep.check(f"eliminate(veto) needs at least {n - 1} manipulators", k is None or k >= n - 1, f"minimum coalition {k}")
    return rep


# ------------------------------------------------------------ gadget


def default_cover_instance(m: int, n: int, seed: int = 0, solvable: bool = True) -> CoverInstance:
    """A partition of 1..n padded with seeded random triples.

    With ``solvable=False`` every triple contains item 1, so no cover exists
    once n >= 6.
    """
    rng = random.Random(seed)
    if solvable:
        sets = [tuple(range(3 * i + 1, 3 * i + 4)) for i in range(n // 3)][:m]
    else:
        sets = []
    while len(sets) < m:
        if solvable:
            sets.append(tuple(sorted(rng.sample(range(1, n + 1), 3))))
        else:
            sets.append((1, *sorted(rng.sample(range(2, n + 1), 2))))
    return CoverInstance(n, tuple(sets))


def _gadget_checks(rep: Report, inst: CoverInstance, rule: str, tag: str) -> None:
    red = build_veto_reduction(inst)
    m, n = inst.m, inst.n
    K = red.constants
    k = 2 * m + 3
    rep.check(f"{tag}constants follow the formulas",
              (K.f1, K.f2, K.f3, K.f4, K.f12, K.f123) == (11 * k, 8 * k, 3 + k, 2 * m - 2 * n // 3 + 3, 19 * k, 19 * k + k + 3),
              f"X={K.X}")
    size = (red.profile.c, len(red.profile.ballots))
    rep.check(f"{tag}candidate and ballot counts", size == gadget_size(m, n), f"{size}")
    s = last_place_counts(red.profile)
    X = K.X
    special = {red.id("a1"), red.id("abar1")}
    ok = all(s[c] == X + 3 for c in special) and all(v <= X for c, v in s.items() if c not in special)
    rep.check(f"{tag}opening veto-scores", ok)
    spec = parse_rule(rule)
    el = Electorate.of(red.profile)
    cover = cover_oracle(inst)
    if cover is not None:
        ballot = cover_to_ballot(red, cover)
        tr = run_electorate(spec, el.plus([ballot]), red.policy, record=True)
        rep.check(f"{tag}cover ballot elects p under {rule}", tr.winner == red.preferred, red.profile.names[tr.winner])
        veto_tr = run_electorate(parse_rule("eliminate:veto"), el.plus([ballot]), red.policy, record=True)
        phase = check_phase_invariants(veto_tr, red)
        rep.check(f"{tag}phase invariants", phase.ok, phase.summary())
    mismatches = []
    for bits, ballot in zip(itertools.product((False, True), repeat=m), canonical_ballots(red)):
        chosen = tuple(i + 1 for i, b in enumerate(bits) if b)
        wins = elects(spec, el.plus([ballot]), red.policy, red.preferred)
        if wins != is_cover(inst, chosen):
            mismatches.append(chosen)
    rep.check(f"{tag}canonical ballots elect p exactly for covers", not mismatches,
              f"{2 ** m} patterns" + (f", mismatches {mismatches}" if mismatches else ""))


def verify_gadget(m: int = 1, n: int = 3, rule: str = "eliminate:veto", instance: CoverInstance | None = None,
                  seed: int = 0) -> Report:
    suite = "thm3" if rule == "eliminate:veto" else "thm9"
    if instance is not None:
        rep = Report(suite, {"m": instance.m, "n": instance.n})
        _gadget_checks(rep, instance, rule, "")
        return rep
    rep = Report(suite, {"m": m, "n": n, "seed": seed})
    _gadget_checks(rep, default_cover_instance(m, n, seed), rule, "yes-instance: ")
    if n >= 6 and m >= 1:
        _gadget_checks(rep, default_cover_instance(m, n, seed, solvable=False), rule, "no-instance: ")
    return rep


# ------------------------------------------------------------ adjoint padding


def thm6_trial(V: Profile, policy: TieBreakPolicy | None = None) -> tuple[bool, bool]:
    """(witness found, padding claim holds) for one manipulator under Borda."""
    policy = policy or TieBreakPolicy.default(V)
    rev = V.reversed()
    cm, c1 = V.candidates[-1], V.candidates[0]
    el = Electorate.of(rev)
    vec = instantiate(BORDA, V.c).entries
    witness = None
    for w in itertools.permutations(V.candidates):
        scores = el.plus([w]).positional(V.candidates, vec)
        if select_loser(scores, policy, "min") == cm:
            witness = w
            break
    if witness is None:
        return False, True
    padded = build_adjoint_padding(V, 1, vec)
    tr = run_electorate(RuleSpec("eliminate", BORDA), Electorate.of(padded, [witness]), policy)
    return True, tr.winner == c1


def verify_thm6(trials: int = 50, seed: int = 0) -> Report:
    rep = Report("thm6", {"trials": trials, "seed": seed})
    rng = random.Random(seed)
    found = held = 0
    for _ in range(trials):
        V = random_profile(rng.choice((3, 4)), rng.randint(1, 6), rng)
        f, ok = thm6_trial(V)
        found += f
        held += ok
    rep.check("padding turns last place into a c1 victory", held == trials, f"{held}/{trials} ({found} with a witness)")
    return rep


def run_suite(name: str, n: int | None = None, m: int | None = None, trials: int | None = None,
              seed: int = 0, budget: int | None = None, instance: CoverInstance | None = None) -> Report:
    if name == "example2":
        return verify_example2(budget)
    if name == "thm4":
        return verify_thm4(n or 2, budget)
    if name == "thm5":
        return verify_thm5(n or 3, budget)
    if name == "thm6":
        return verify_thm6(trials or 50, seed)
    if name in ("thm3", "thm9"):
        rule = "eliminate:veto" if name == "thm3" else "coombs"
        return verify_gadget(m or 1, n or 3, rule, instance, seed)
    raise ValueError(f"unknown suite {name!r}; choose from {', '.join(SUITES)}")
