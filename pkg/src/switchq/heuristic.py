"""The switching heuristic P1 of Berman, Wang and Sapna (2005).

Starting from the all-late policy, the walk repeatedly moves the smallest
movable switching point down one step while the back-room requirement holds,
and repairs a broken requirement by moving points back up.  An index guard J
freezes everything at or above the last index whose decrement broke
feasibility, which keeps the walk from cycling forever.  The best feasible
policy seen is returned; it is guaranteed optimal only when it is one of the
two extreme policies.
"""

from collections.abc import Sequence
from dataclasses import dataclass, field
from functools import partial

from .core import (EPS_B, Instance, Policy, _fast_eval, evaluate_b_wq,
                   max_backroom_policy, validate_instance)

IMPROVE_EPS = 1e-12


def type1_eligible(pol: Sequence[int], i: int) -> bool:
    """Can k_i move down one step without breaking the ordering?"""
    return pol[i] - pol[i - 1] > 1 if i > 0 else pol[0] > 0


def type2_eligible(pol: Sequence[int], i: int) -> bool:
    """Can k_i move up one step without breaking the ordering?"""
    return pol[i + 1] - pol[i] > 1


@dataclass
class HeuristicStep:
    """One evaluated policy along the walk."""

    policy: Policy
    B: float
    Wq: float
    action: str


@dataclass
class HeuristicResult:
    status: str              # "solved" or "infeasible"
    policy: Policy | None
    wq: float | None
    steps: int               # policy evaluations performed
    trace: list[HeuristicStep] = field(default_factory=list)


def run_p1(inst: Instance, eps_b: float = EPS_B,
           improve_eps: float = IMPROVE_EPS) -> HeuristicResult:
    """Run the heuristic and return the best feasible policy it visits.

    Follows the published steps with the J guard: only indices below J may
    move, and J drops to j* whenever decrementing k_{j*} breaks the
    requirement.  One reading quirk is resolved here: when nothing below J
    can move down, the current policy is feasible with its prefix packed at
    the minimum, so moving points up could only bounce back and forth; the
    walk stops instead.  The walk may still pass through a policy twice right
    after a repair, but J shrinks each time, so it always terminates.
    """
    validate_instance(inst)
    s, n = inst.S, inst.N
    k = list(max_backroom_policy(inst))
    trace: list[HeuristicStep] = []
    evaluate = _fast_eval(inst) or partial(evaluate_b_wq, inst)
    dec_label = [f"dec k{t}" for t in range(n)]
    inc_label = [f"inc k{t}" for t in range(n)]

    def look(action: str) -> tuple[float, float]:
        pol = tuple(k)
        b, wq = evaluate(pol)
        trace.append(HeuristicStep(pol, b, wq, action))
        return b, wq

    target = inst.Bl - eps_b
    b, wq = look("start")
    if b < target:
        return HeuristicResult("infeasible", None, None, len(trace), trace)
    best_pol, best_wq = tuple(k), wq
    big_j = n
    # Indices below floor cannot move down: a decrement at j leaves the gaps
    # below j alone, and a repair that moves k_j back up reopens only index j,
    # so the downward scan never needs to revisit anything smaller.
    floor = 0
    cap = 20 * (n + 1) * (s + 2) + 100
    while True:
        if len(trace) > cap:
            raise RuntimeError("heuristic exceeded its move budget; this is a bug")
        j = None
        for t in range(floor, big_j):
            if type1_eligible(k, t):
                j = t
                break
        if j is None:
            break
        floor = j
        k[j] -= 1
        b, wq = look(dec_label[j])
        if b < target:
            big_j = j
            while True:
                j2 = next((t for t in range(big_j) if type2_eligible(k, t)), None)
                if j2 is None:
                    return HeuristicResult("solved", best_pol, best_wq, len(trace), trace)
                if j2 < floor:
                    floor = j2
                k[j2] += 1
                b, wq = look(inc_label[j2])
                if b >= target:
                    break
        if wq < best_wq - improve_eps:
            best_pol, best_wq = tuple(k), wq
    return HeuristicResult("solved", best_pol, best_wq, len(trace), trace)
