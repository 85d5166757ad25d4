"""Steady-state evaluation of worker-switching policies.

A facility staffs N cross-trained workers who split their time between a
front room and a back room.  Customers arrive at rate lam, each front-room
worker serves at rate mu, and at most S customers fit in the system; arrivals
that find S customers are lost.  A switching policy k = (k_0, ..., k_N) with
k_N = S sends workers to the front as the crowd grows: exactly i workers
serve while the customer count lies in (k_{i-1}, k_i].  Nobody serves at or
below k_0, so the count never falls below k_0 and the chain lives on
{k_0, ..., S}.

F is the expected number of workers serving, B = N - F the expected number in
the back room, and Wq the expected queueing wait of an admitted customer.
Policies must keep B at or above the target Bl while minimizing Wq.

Two independent evaluation routes are provided.  ``evaluate_direct`` runs the
birth-death balance recursion state by state; ``evaluate_closed_form``
assembles the same distribution from geometric-series identities anchored at
the switching points.  They must agree to near machine precision, and the
test suite leans on that redundancy.
"""

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

EPS_B = 1e-9

# Ratio handling for the geometric series in the closed forms.
_NEAR_ONE_TOL = 1e-6    # |r - 1| below this: sum term by term, the quotient form cancels
_NEAR_ONE_TOL_FM = 1e-3  # wider window for the first moment (quadratic cancellation)
_LOG_SPACE_LIMIT = 300.0  # exponent * |ln ratio| beyond this: work with logarithms
_RESCALE_HI = 1e100
_CUMPROD_LIMIT = 600.0  # S * ln(lam/mu) beyond this: a running product may overflow

Policy = tuple[int, ...]


@dataclass(frozen=True)
class Instance:
    """One staffing problem: capacity, workers, rates, back-room target."""

    S: int
    N: int
    lam: float
    mu: float
    Bl: float


@dataclass
class Metrics:
    """Steady-state summary of one policy on one instance."""

    p: list[float]   # P(j) for j = 0..S; zero below k_0
    F: float         # expected workers serving in the front room
    B: float         # expected workers in the back room, N - F
    L: float         # expected customers in the system
    Wq: float        # expected queueing wait of an admitted customer
    pBlock: float    # P(S), probability an arrival is lost


def validate_instance(inst: Instance) -> None:
    """Raise ValueError unless the instance is well formed."""
    if not isinstance(inst.S, int) or isinstance(inst.S, bool) or inst.S < 1:
        raise ValueError(f"S must be an integer >= 1, got {inst.S!r}")
    if not isinstance(inst.N, int) or isinstance(inst.N, bool) or not 1 <= inst.N <= inst.S:
        raise ValueError(f"N must be an integer in [1, S], got {inst.N!r} with S={inst.S}")
    for name, value in (("lam", inst.lam), ("mu", inst.mu)):
        if not isinstance(value, (int, float)) or isinstance(value, bool) \
                or not math.isfinite(value) or value <= 0:
            raise ValueError(f"{name} must be a finite positive rate, got {value!r}")
    if not isinstance(inst.Bl, (int, float)) or isinstance(inst.Bl, bool) \
            or not math.isfinite(inst.Bl) or not 0 <= inst.Bl <= inst.N:
        raise ValueError(f"Bl must lie in [0, N], got {inst.Bl!r} with N={inst.N}")


def validate_policy(inst: Instance, pol: Policy) -> None:
    """Raise ValueError unless pol is a valid switching policy for inst."""
    if len(pol) != inst.N + 1:
        raise ValueError(f"policy needs {inst.N + 1} entries, got {len(pol)}")
    for v in pol:
        if not isinstance(v, int) or isinstance(v, bool):
            raise ValueError(f"policy entries must be integers, got {v!r}")
    if pol[0] < 0:
        raise ValueError(f"k_0 must be nonnegative, got {pol[0]}")
    if pol[-1] != inst.S:
        raise ValueError(f"k_N must equal S={inst.S}, got {pol[-1]}")
    for i in range(1, len(pol)):
        if pol[i] <= pol[i - 1]:
            raise ValueError(f"switching points must strictly increase, got {pol}")


def min_wait_policy(inst: Instance) -> Policy:
    """The all-early policy: every worker switches in as soon as possible.

    It has the smallest Wq and the smallest B of any policy, so if it meets
    the back-room target it is optimal outright.
    """
    return tuple(range(inst.N)) + (inst.S,)


def max_backroom_policy(inst: Instance) -> Policy:
    """The all-late policy: every worker switches in as late as possible.

    It has the largest B of any policy, so if it misses the back-room target
    the instance has no feasible policy at all.
    """
    return tuple(range(inst.S - inst.N, inst.S)) + (inst.S,)


def is_feasible(m: Metrics, inst: Instance, eps: float = EPS_B) -> bool:
    """Back-room requirement test with a small slack for float rounding."""
    return m.B >= inst.Bl - eps


# ---------------------------------------------------------------------------
# direct route: run the balance recursion


def evaluate_direct(inst: Instance, pol: Policy) -> Metrics:
    """Evaluate a policy by running the balance recursion.

    On the segment served by i workers, q(j+1) = q(j) * lam / (i * mu); when
    the running value grows past float range the filled prefix is rescaled
    (the common factor cancels during normalization).  A shrinking value is
    left alone: the per-state ratio only falls along the walk, so a tiny tail
    stays tiny and may harmlessly underflow to zero.
    """
    validate_instance(inst)
    validate_policy(inst, pol)
    s, n, lam, mu = inst.S, inst.N, inst.lam, inst.mu
    k0 = pol[0]
    q = [0.0] * (s + 1)
    q[k0] = 1.0
    cur = 1.0
    j = k0
    for i in range(1, n + 1):
        step = lam / (i * mu)
        while j < pol[i]:
            cur *= step
            j += 1
            q[j] = cur
            if cur > _RESCALE_HI:
                for t in range(k0, j + 1):
                    q[t] /= cur
                cur = 1.0
    tot = math.fsum(q[k0:])
    p = [0.0] * (s + 1)
    for t in range(k0, s + 1):
        p[t] = q[t] / tot
    f = math.fsum(i * p[j] for i in range(1, n + 1) for j in range(pol[i - 1] + 1, pol[i] + 1))
    big_l = math.fsum(t * p[t] for t in range(k0, s + 1))
    admitted = lam * (1.0 - p[s])
    wq = big_l / admitted - 1.0 / mu if admitted > 0.0 else math.inf
    return Metrics(p=p, F=f, B=n - f, L=big_l, Wq=wq, pBlock=p[s])


def _direct_b_wq(inst: Instance, pol: Policy) -> tuple[float, float]:
    """Aggregates-only version of evaluate_direct for tight enumeration loops.

    Skips validation and the normalized vector; callers pass trusted policies.
    """
    s, n, lam, mu = inst.S, inst.N, inst.lam, inst.mu
    k0 = pol[0]
    q = [0.0] * (s + 1)
    q[k0] = 1.0
    cur = 1.0
    j = k0
    for i in range(1, n + 1):
        step = lam / (i * mu)
        while j < pol[i]:
            cur *= step
            j += 1
            q[j] = cur
            if cur > _RESCALE_HI:
                for t in range(k0, j + 1):
                    q[t] /= cur
                cur = 1.0
    tot = math.fsum(q[k0:])
    f = math.fsum(i * q[j] for i in range(1, n + 1) for j in range(pol[i - 1] + 1, pol[i] + 1)) / tot
    big_l = math.fsum(t * q[t] for t in range(k0, s + 1)) / tot
    p_s = q[s] / tot
    admitted = lam * (1.0 - p_s)
    wq = big_l / admitted - 1.0 / mu if admitted > 0.0 else math.inf
    return n - f, wq


# ---------------------------------------------------------------------------
# vectorized route: the balance recursion as one cumulative product


class _Workspace:
    """Reusable per-instance buffers for ``evaluate_b_wq``.

    step_buf[t] holds the balance ratio into state t for the policy of the
    previous call.  Search and heuristic walks move one switching point by
    one step at a time, which changes the segment of a single state, so most
    calls patch one entry instead of refilling the buffer.
    """

    __slots__ = ("s", "n", "lam", "mu", "rs", "t_all", "step_buf", "q_buf",
                 "views", "last")

    def __init__(self, inst: Instance):
        self.s, self.n, self.lam, self.mu = inst.S, inst.N, inst.lam, inst.mu
        self.rs = self.lam / (np.arange(1.0, self.n + 1.0) * self.mu)
        self.t_all = np.arange(0.0, self.s + 1.0)
        self.step_buf = np.empty(self.s + 1)
        self.q_buf = np.empty(self.s + 1)
        self.views: dict[int, tuple] = {}  # per k_0; the buffers never move
        self.last: Policy | None = None

    def _refill(self, pol: Policy) -> None:
        d = np.diff(np.asarray(pol))
        self.step_buf[pol[0] + 1:] = np.repeat(self.rs, d)

    def _sync(self, pol: Policy) -> None:
        last = self.last
        self.last = pol
        if last is None:
            self._refill(pol)
            return
        moved = -1
        for i in range(self.n):
            if pol[i] != last[i]:
                moved = i
                break
        if moved < 0:
            return
        if abs(pol[moved] - last[moved]) != 1 or pol[moved + 1:] != last[moved + 1:]:
            self._refill(pol)
        elif pol[moved] < last[moved]:
            self.step_buf[last[moved]] = self.rs[moved]
        elif moved > 0:
            self.step_buf[pol[moved]] = self.rs[moved - 1]
        # raising k_0 only shrinks the live range; no entry changes

    def b_wq(self, pol: Policy) -> tuple[float, float]:
        self._sync(pol)
        k0 = pol[0]
        parts = self.views.get(k0)
        if parts is None:
            m = self.s - k0
            parts = (self.step_buf[k0 + 1:], self.t_all[k0 + 1:], self.q_buf[:m], m)
            self.views[k0] = parts
        sv, tv, q, m = parts
        np.multiply.accumulate(sv, out=q)
        tot = 1.0 + float(np.add.reduce(q))
        p_s = float(q[m - 1]) / tot
        big_l = (k0 + float(np.dot(tv, q))) / tot
        # flow balance: admissions lam*(1 - P(S)) match completions mu*F,
        # because the count never drops below the number of workers serving
        f = self.lam / self.mu * (1.0 - p_s)
        admitted = self.lam * (1.0 - p_s)
        wq = big_l / admitted - 1.0 / self.mu if admitted > 0.0 else math.inf
        return self.n - f, wq


@lru_cache(maxsize=32)
def _workspace(inst: Instance) -> _Workspace:
    return _Workspace(inst)


def _fast_eval(inst: Instance):
    """Bound vectorized evaluator, or None when the product could overflow.

    Lets tight loops skip the per-call cache lookup in evaluate_b_wq.
    """
    if inst.lam <= inst.mu or inst.S * math.log(inst.lam / inst.mu) <= _CUMPROD_LIMIT:
        return _workspace(inst).b_wq
    return None


# ---------------------------------------------------------------------------
# closed-form route: geometric series anchored at the switching points


def _geom_sum(r: float, n: int) -> float:
    """Sum of r**t for t in 0..n-1, stable near r = 1."""
    if n <= 0:
        return 0.0
    if r == 1.0:
        return float(n)
    if abs(r - 1.0) < _NEAR_ONE_TOL:
        return math.fsum(r ** t for t in range(n))
    return (1.0 - r ** n) / (1.0 - r)


def _geom_first_moment(r: float, n: int) -> float:
    """Sum of t * r**t for t in 0..n-1.

    The quotient form cancels quadratically at r = 1, so the term-by-term
    window is wider here than for the plain sum.
    """
    if n <= 1:
        return 0.0
    if r == 1.0:
        return n * (n - 1) / 2.0
    d = r - 1.0
    if abs(d) < _NEAR_ONE_TOL_FM:
        return math.fsum(t * r ** t for t in range(1, n))
    return r * (1.0 - n * r ** (n - 1) + (n - 1) * r ** n) / (d * d)


def _log_geom_sum(r: float, n: int) -> float:
    """log of _geom_sum(r, n) without leaving float range."""
    if n <= 0:
        return -math.inf
    if r == 1.0:
        return math.log(n)
    if abs(r - 1.0) < _NEAR_ONE_TOL:
        return math.log(math.fsum(r ** t for t in range(n)))
    if r < 1.0:
        return math.log1p(-(r ** n)) - math.log1p(-r)
    return n * math.log(r) + math.log1p(-(r ** -n)) - math.log(r - 1.0)


def _logsumexp(xs: list[float]) -> float:
    m = max(xs)
    if m == -math.inf:
        return m
    return m + math.log(math.fsum(math.exp(x - m) for x in xs))


def _log_geom_first_moment(r: float, n: int) -> float:
    """log of _geom_first_moment(r, n) without leaving float range."""
    if n <= 1:
        return -math.inf
    if abs(r - 1.0) < _NEAR_ONE_TOL_FM:
        return math.log(math.fsum(t * r ** t for t in range(1, n)))
    lr = math.log(r)
    return _logsumexp([math.log(t) + t * lr for t in range(1, n)])


def _needs_log_space(inst: Instance, pol: Policy) -> bool:
    """True when some power in the closed forms would strain float range."""
    lam, mu = inst.lam, inst.mu
    llm = abs(math.log(lam / mu))
    lx = 0.0
    for i in range(1, inst.N + 1):
        if (pol[i - 1] - pol[0] + 1) * llm > _LOG_SPACE_LIMIT:
            return True
        r = lam / (i * mu)
        if (pol[i] - pol[i - 1]) * abs(math.log(r)) > _LOG_SPACE_LIMIT:
            return True
        if i >= 2:
            lx += (pol[i - 1] - pol[i - 2]) * math.log(i - 1)
            if lx > _LOG_SPACE_LIMIT:
                return True
    return False


def _aggregates_plain(inst: Instance, pol: Policy):
    """Closed-form anchors and aggregates in ordinary arithmetic.

    Returns (pk, rs, logpk, F, L) where pk[i] = P(k_i), rs[i] is the ratio on
    the segment starting at k_i, and logpk is None on this route.
    """
    s, n, lam, mu = inst.S, inst.N, inst.lam, inst.mu
    lam_mu = lam / mu
    x = 1.0
    bsums = [1.0]
    for i in range(1, n + 1):
        if i >= 2:
            x *= (1.0 / (i - 1)) ** (pol[i - 1] - pol[i - 2])
        r = lam / (i * mu)
        bsums.append(x * lam_mu ** (pol[i - 1] - pol[0] + 1) / i * _geom_sum(r, pol[i] - pol[i - 1]))
    pk = [1.0 / math.fsum(bsums)]
    rs = [lam / ((i + 1) * mu) for i in range(n)]
    for i in range(n):
        pk.append(pk[i] * rs[i] ** (pol[i + 1] - pol[i]))
    psums = [pk[i] * _geom_sum(rs[i], pol[i + 1] - pol[i]) for i in range(n)]
    f = math.fsum((i + 1) * (psums[i] - pk[i] + pk[i + 1]) for i in range(n))
    big_l = math.fsum(pol[i] * psums[i] + pk[i] * _geom_first_moment(rs[i], pol[i + 1] - pol[i])
                      for i in range(n)) + s * pk[n]
    return pk, rs, None, f, big_l


def _aggregates_log(inst: Instance, pol: Policy):
    """Same anchors and aggregates computed through logarithms."""
    s, n, lam, mu = inst.S, inst.N, inst.lam, inst.mu
    llm = math.log(lam / mu)
    lx = 0.0
    logb = [0.0]
    for i in range(1, n + 1):
        if i >= 2:
            lx -= (pol[i - 1] - pol[i - 2]) * math.log(i - 1)
        r = lam / (i * mu)
        logb.append(lx + (pol[i - 1] - pol[0] + 1) * llm - math.log(i)
                    + _log_geom_sum(r, pol[i] - pol[i - 1]))
    logz = _logsumexp(logb)
    rs = [lam / ((i + 1) * mu) for i in range(n)]
    logpk = [-logz]
    for i in range(n):
        logpk.append(logpk[i] + (pol[i + 1] - pol[i]) * math.log(rs[i]))
    pk = [math.exp(v) for v in logpk]
    psums = [math.exp(logpk[i] + _log_geom_sum(rs[i], pol[i + 1] - pol[i])) for i in range(n)]
    f = math.fsum((i + 1) * (psums[i] - pk[i] + pk[i + 1]) for i in range(n))
    parts = []
    for i in range(n):
        d = pol[i + 1] - pol[i]
        fm = math.exp(logpk[i] + _log_geom_first_moment(rs[i], d)) if d > 1 else 0.0
        parts.append(pol[i] * psums[i] + fm)
    big_l = math.fsum(parts) + s * pk[n]
    return pk, rs, logpk, f, big_l


def evaluate_closed_form(inst: Instance, pol: Policy) -> Metrics:
    """Evaluate a policy from geometric-series identities.

    Switches to log-space arithmetic when the involved powers would strain
    float range; agreement with evaluate_direct is then slightly looser.
    """
    validate_instance(inst)
    validate_policy(inst, pol)
    s, n, lam, mu = inst.S, inst.N, inst.lam, inst.mu
    if _needs_log_space(inst, pol):
        pk, rs, logpk, f, big_l = _aggregates_log(inst, pol)
    else:
        pk, rs, logpk, f, big_l = _aggregates_plain(inst, pol)
    p = [0.0] * (s + 1)
    for i in range(n):
        if logpk is None:
            for j in range(pol[i], pol[i + 1]):
                p[j] = pk[i] * rs[i] ** (j - pol[i])
        else:
            lr = math.log(rs[i])
            for j in range(pol[i], pol[i + 1]):
                p[j] = math.exp(logpk[i] + (j - pol[i]) * lr)
    p[s] = pk[n]
    admitted = lam * (1.0 - pk[n])
    wq = big_l / admitted - 1.0 / mu if admitted > 0.0 else math.inf
    return Metrics(p=p, F=f, B=n - f, L=big_l, Wq=wq, pBlock=pk[n])


def evaluate_b_wq(inst: Instance, pol: Policy) -> tuple[float, float]:
    """B and Wq only; the fast path for search and heuristics.

    Runs the balance recursion as one cumulative product over reusable
    per-instance buffers.  The product peaks where the per-state ratio
    crosses one and only shrinks afterwards, so it cannot overflow unless
    S * ln(lam/mu) is large; beyond that the closed forms take over (a tail
    that underflows to zero is harmless either way).  Skips validation and
    the distribution vector; callers pass trusted policies.
    """
    n, lam, mu = inst.N, inst.lam, inst.mu
    if lam <= mu or inst.S * math.log(lam / mu) <= _CUMPROD_LIMIT:
        return _workspace(inst).b_wq(pol)
    if _needs_log_space(inst, pol):
        pk, _, _, f, big_l = _aggregates_log(inst, pol)
    else:
        pk, _, _, f, big_l = _aggregates_plain(inst, pol)
    admitted = lam * (1.0 - pk[n])
    wq = big_l / admitted - 1.0 / mu if admitted > 0.0 else math.inf
    return n - f, wq
