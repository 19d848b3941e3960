"""Coalition sizes that separate Coombs from eliminate(veto)."""

from elimvote.constructions import build_thm4_family, build_thm5_family
from elimvote.manipulation import min_coalition

for n in (2, 3, 4):
    profile, a, policy = build_thm4_family(n)
    print(f"family A, n={n}: veto needs {min_coalition('eliminate:veto', profile, a, 2 * n, policy)}, "
          f"Coombs needs {min_coalition('coombs', profile, a, 2 * n, policy)}")

for n in (3, 4, 5):
    profile, a, policy = build_thm5_family(n)
    print(f"family B, n={n}: Coombs needs {min_coalition('coombs', profile, a, n, policy)}, "
          f"veto needs {min_coalition('eliminate:veto', profile, a, n, policy)}")
