"""Build a cover gadget, show the winning ballot, and search it from scratch."""

import sys

from elimvote.constructions import cover_oracle
from elimvote.engines import Electorate, parse_rule, run_electorate
from elimvote.manipulation import find_manipulation_frontier
from elimvote.reduction import build_veto_reduction, check_phase_invariants, cover_to_ballot
from elimvote.verify import default_cover_instance

m, n = (int(x) for x in sys.argv[1:3]) if len(sys.argv) > 2 else (2, 6)
for solvable in (True, False):
    red = build_veto_reduction(default_cover_instance(m, n, solvable=solvable))
    cover = cover_oracle(red.instance)
    print(f"sets {red.instance.sets}: cover {cover}; {red.profile.c} candidates, "
          f"{red.profile.total_weight} voters, X={red.constants.X}")
    if cover is not None:
        ballot = cover_to_ballot(red, cover)
        tr = run_electorate(parse_rule("eliminate:veto"), Electorate.of(red.profile, [ballot]), red.policy,
                            record=True)
        print(f"  cover ballot elects {red.profile.names[tr.winner]}; {check_phase_invariants(tr, red).summary()}")
    res = find_manipulation_frontier("eliminate-veto", red.profile, red.preferred, red.policy)
    print(f"  exhaustive frontier search: {'yes' if res.decision else 'no'} {res.stats}")
