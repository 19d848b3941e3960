"""Adaptive versus fixed manipulation of sequential plurality on the nine-candidate election."""

from elimvote.constructions import build_example2
from elimvote.constructions import example2_strategy
from elimvote.engines import RuleSpec, run_sequential
from elimvote.manipulation import ManipulationQuery, find_manipulation_brute, sequential_manipulate
from elimvote.scoring import PLURALITY

profile, policy, p = build_example2()
print(f"{profile.total_weight} sincere voters over {profile.c} candidates; manipulator wants {profile.names[p]}")

trace = run_sequential(PLURALITY, profile, policy, example2_strategy(profile))
print(trace.to_text())

res = sequential_manipulate(PLURALITY, profile, p, policy)
print("adaptive search:", "yes" if res.decision else "no", res.stats)

fixed = find_manipulation_brute(ManipulationQuery(RuleSpec("sequential", PLURALITY), profile, p, 1, policy))
print("best fixed ballot:", "yes" if fixed.decision else "no", fixed.stats)
