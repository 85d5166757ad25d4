"""Exhaustive search over the policy space.

The valid policies are exactly the N-subsets of {0, ..., S-1} with S
appended, so there are C(S, N) of them and lexicographic enumeration is a
combinations walk.  Brute force is the reference judge for every other
solver in the package; it evaluates with the direct recursion so its answers
stay independent of the closed forms used elsewhere.
"""

import itertools
import math
from collections.abc import Iterator

from .core import EPS_B, Instance, Policy, _direct_b_wq, validate_instance

ENUMERATION_LIMIT = 10_000_000


def policy_count(inst: Instance) -> int:
    """Number of valid policies, C(S, N)."""
    return math.comb(inst.S, inst.N)


def iter_policies(inst: Instance) -> Iterator[Policy]:
    """Yield every valid policy in lexicographic order."""
    s = inst.S
    for front in itertools.combinations(range(s), inst.N):
        yield front + (s,)


def brute_force_optimum(inst: Instance, force: bool = False,
                        eps_b: float = EPS_B) -> tuple[Policy, float] | None:
    """Enumerate everything and return (policy, wq) for the best feasible one.

    Ties go to the lexicographically smallest policy because enumeration is
    lexicographic and only strict improvements replace the leader.  Returns
    None when no policy meets the back-room target.  Spaces larger than
    ENUMERATION_LIMIT are refused unless force is set.
    """
    validate_instance(inst)
    count = policy_count(inst)
    if count > ENUMERATION_LIMIT and not force:
        raise ValueError(
            f"policy space has {count} members, above the enumeration limit "
            f"{ENUMERATION_LIMIT}; pass force=True to enumerate anyway")
    target = inst.Bl - eps_b
    best: Policy | None = None
    best_wq = math.inf
    for pol in iter_policies(inst):
        b, wq = _direct_b_wq(inst, pol)
        if b >= target and wq < best_wq:
            best, best_wq = pol, wq
    if best is None:
        return None
    return best, best_wq
