"""``elimvote`` command line.

Exit codes: 0 success, 1 manipulation answered no (or a verify suite
failed), 2 usage or input error, 3 node budget exceeded.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
from pathlib import Path

from .constructions import CoverInstance, build_example2, build_thm4_family, build_thm5_family, cover_oracle
from .engines import Electorate, RuleSpec, elects, parse_rule, run_rule
from .generate import random_profile
from .manipulation import BudgetExceeded, ManipulationQuery, default_budget, find_manipulation
from .profile import (
    CONVENTIONS,
    ELIMINATE_EARLIEST,
    ELIMINATE_LATEST,
    Ballot,
    Profile,
    ProfileError,
    TieBreakPolicy,
    format_ballot,
    parse_profile,
    serialize_profile,
)
from .reduction import build_veto_reduction
from .verify import SUITES, run_suite

EXIT_OK, EXIT_NO, EXIT_USAGE, EXIT_BUDGET = 0, 1, 2, 3


class UsageError(Exception):
    pass


# ------------------------------------------------------------ helpers


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def _write_atomic(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        os.unlink(tmp)
        raise


def _emit(text: str, out: str | None) -> None:
    if out:
        _write_atomic(Path(out), text)
    else:
        sys.stdout.write(text)


def parse_tiebreak(spec: str | None, profile: Profile, optimistic: str | None = None) -> TieBreakPolicy:
    """``earliest:<names>`` / ``latest:<names>`` or ``@sidecar.json``.

    Listed names come first in the priority; unlisted candidates follow in
    roster order.  Without a spec the roster order is used with the
    latest-listed tied candidate eliminated.
    """
    if spec is None:
        policy = TieBreakPolicy.default(profile)
        return policy if optimistic is None else policy.optimistic(profile.index(optimistic))
    if spec.startswith("@"):
        data = json.loads(_read(spec[1:]))
        tb = data.get("tiebreak", data)
        return TieBreakPolicy.from_names(profile, tb["priority"], tb["convention"], optimistic)
    head, sep, rest = spec.partition(":")
    conventions = {"earliest": ELIMINATE_EARLIEST, "latest": ELIMINATE_LATEST}
    conventions.update({c: c for c in CONVENTIONS})
    if head not in conventions:
        raise UsageError(f"tie-break spec must start with earliest: or latest:, got {spec!r}")
    names = [n.strip() for n in rest.split(",") if n.strip()]
    return TieBreakPolicy.from_names(profile, names, conventions[head], optimistic)


def _load_profile(path: str) -> Profile:
    return parse_profile(_read(path))


def _directive(text: str, key: str) -> str | None:
    for line in text.splitlines():
        line = line.strip()
        if line.startswith(f"# {key}:"):
            return line.split(":", 1)[1].strip()
    return None


def _policy_for(args, profile: Profile, text: str, optimistic: str | None = None) -> TieBreakPolicy:
    # a ``# tiebreak:`` comment in the ballot file is used when no flag is given
    spec = args.tiebreak if args.tiebreak is not None else _directive(text, "tiebreak")
    return parse_tiebreak(spec, profile, optimistic)


# ------------------------------------------------------------ commands


def cmd_run(args) -> int:
    spec = parse_rule(args.rule)
    text = _read(args.profile)
    profile = parse_profile(text)
    policy = _policy_for(args, profile, text)
    trace = run_rule(spec, profile, policy)
    _emit(trace.to_text() if args.format == "text" else trace.to_json() + "\n", args.out)
    return EXIT_OK


def cmd_manipulate(args) -> int:
    spec = parse_rule(args.rule)
    text = _read(args.profile)
    profile = parse_profile(text)
    optimistic = args.prefer if args.optimistic else None
    policy = _policy_for(args, profile, text, optimistic)
    preferred = profile.index(args.prefer)
    solver = args.solver
    if solver == "sequential" and spec.combinator != "sequential":
        raise UsageError("the sequential solver needs a sequential:<base> rule")
    budget = args.budget if args.budget is not None else default_budget()
    res = find_manipulation(ManipulationQuery(spec, profile, preferred, args.k, policy), solver, budget)
    report = {"decision": "yes" if res.decision else "no", "solver": res.solver, "stats": res.stats}
    if res.witness is not None:
        lines = [format_ballot(profile, Ballot(b, 1)) for b in res.witness]
        # re-parse the extended ballot file and replay it before printing
        extended = parse_profile(serialize_profile(profile) + "".join(l + "\n" for l in lines))
        if not elects(spec, Electorate.of(extended), policy, preferred):
            raise AssertionError("witness failed to re-verify")
        report["witness"] = lines
    if res.strategy is not None:
        names = profile.names
        report["strategy"] = [
            {"remaining": [names[c] for c in sorted(alive)], "ballot": " > ".join(names[c] for c in ballot)}
            for alive, ballot in sorted(res.strategy.items(), key=lambda kv: (-len(kv[0]), sorted(kv[0])))
        ]
    if args.format == "text":
        out = [f"decision: {report['decision']}", f"solver: {res.solver}"]
        out += [f"witness: {l}" for l in report.get("witness", [])]
        out += [f"round {i + 1}: {s['ballot']}" for i, s in enumerate(report.get("strategy", []))]
        out += [f"{k}: {v}" for k, v in res.stats.items()]
        _emit("\n".join(out) + "\n", args.out)
    else:
        _emit(json.dumps(report, indent=2) + "\n", args.out)
    return EXIT_OK if res.decision else EXIT_NO


def _load_instance(path: str) -> CoverInstance:
    try:
        return CoverInstance.from_json(_read(path))
    except (ValueError, TypeError, KeyError) as exc:
        raise UsageError(f"bad cover instance {path}: {exc}") from None


def cmd_reduce(args) -> int:
    red = build_veto_reduction(_load_instance(args.instance))
    out = Path(args.out)
    header = f"# tiebreak: earliest:{','.join(red.profile.names[c] for c in red.policy.priority)}\n"
    votes = header + serialize_profile(red.profile)
    sidecar = red.sidecar() + "\n"
    _write_atomic(out / "reduction.votes", votes)
    _write_atomic(out / "reduction.json", sidecar)
    sys.stdout.write(f"wrote {out / 'reduction.votes'} ({red.profile.c} candidates) and {out / 'reduction.json'}\n")
    return EXIT_OK


def cmd_oracle(args) -> int:
    inst = _load_instance(args.instance)
    cover = cover_oracle(inst)
    sys.stdout.write(json.dumps({"cover": None if cover is None else list(cover)}) + "\n")
    return EXIT_OK


def cmd_verify(args) -> int:
    instance = _load_instance(args.instance) if args.instance else None
    budget = args.budget if args.budget is not None else default_budget()
    rep = run_suite(args.suite, n=args.n, m=args.m, trials=args.trials, seed=args.seed, budget=budget, instance=instance)
    _emit(rep.to_text() if args.format == "text" else json.dumps(rep.to_dict(), indent=2) + "\n", args.out)
    return EXIT_OK if rep.ok else EXIT_NO


def cmd_gen(args) -> int:
    if args.kind == "random":
        if args.m is None or args.voters is None:
            raise UsageError("gen random needs --m and --voters")
        profile = random_profile(args.m, args.voters, args.seed)
        text = f"# seed: {args.seed}\n" + serialize_profile(profile)
    elif args.kind == "example2":
        profile, policy, _ = build_example2()
        text = _family_text(profile, policy)
    else:
        build = build_thm4_family if args.kind == "thm4" else build_thm5_family
        profile, _, policy = build(args.n or (2 if args.kind == "thm4" else 3))
        text = _family_text(profile, policy)
    _emit(text, args.out)
    return EXIT_OK


def _family_text(profile: Profile, policy: TieBreakPolicy) -> str:
    conv = "earliest" if policy.convention == ELIMINATE_EARLIEST else "latest"
    order = ",".join(profile.names[c] for c in policy.priority)
    return f"# tiebreak: {conv}:{order}\n" + serialize_profile(profile)


# ------------------------------------------------------------ parser


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="elimvote", description="Elimination voting rules and manipulation solvers.")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, fmt=True):
        if fmt:
            p.add_argument("--format", choices=("json", "text"), default="json")
        p.add_argument("--out", help="write output here instead of stdout")

    p = sub.add_parser("run", help="run an election and print its trace")
    p.add_argument("--rule", required=True)
    p.add_argument("--profile", required=True)
    p.add_argument("--tiebreak", help="earliest:<names> | latest:<names> | @sidecar.json")
    common(p)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("manipulate", help="search for a manipulation")
    p.add_argument("--rule", required=True)
    p.add_argument("--profile", required=True)
    p.add_argument("--prefer", required=True)
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--solver", choices=("auto", "brute", "frontier", "sequential"), default="auto")
    p.add_argument("--budget", type=int)
    p.add_argument("--tiebreak")
    p.add_argument("--optimistic", action="store_true", help="break elimination ties in favour of --prefer")
    common(p)
    p.set_defaults(func=cmd_manipulate)

    p = sub.add_parser("reduce", help="build a hardness gadget")
    p.add_argument("kind", choices=("cover2veto",))
    p.add_argument("--instance", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_reduce)

    p = sub.add_parser("oracle", help="solve a source problem by brute force")
    p.add_argument("kind", choices=("cover",))
    p.add_argument("--instance", required=True)
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("verify", help="rebuild a construction and check its claims")
    p.add_argument("suite", choices=SUITES)
    p.add_argument("--n", type=int)
    p.add_argument("--m", type=int)
    p.add_argument("--trials", type=int)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--budget", type=int)
    p.add_argument("--instance")
    common(p)
    p.set_defaults(func=cmd_verify, format="text")

    p = sub.add_parser("gen", help="write a profile")
    p.add_argument("kind", choices=("random", "thm4", "thm5", "example2"))
    p.add_argument("--m", type=int)
    p.add_argument("--voters", type=int)
    p.add_argument("--n", type=int)
    p.add_argument("--seed", type=int, default=0)
    common(p, fmt=False)
    p.set_defaults(func=cmd_gen)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except BudgetExceeded as exc:
        print(f"elimvote: budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (UsageError, ProfileError, ValueError, KeyError) as exc:
        print(f"elimvote: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
