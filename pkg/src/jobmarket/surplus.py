"""Exact surplus maximization: firm surplus tables and efficient matchings.

A firm's surplus on a pool S is the best it can do hiring any subset of S
at the going disutilities:

    V_f(S) = max over T subset of S of  [ u_f(T) - sum of d_w(f) over T ].

"Tight" sets are those achieving their own surplus (the raw value equals
V_f); the empty set is always tight. The efficient matching maximizes the
sum of firm surpluses over disjoint pools via a dynamic program on
(firm prefix, worker subset); assigned sets are always tight, with ties
broken toward minimum cardinality and then lexicographic worker order.

All arithmetic runs on integers after clearing denominators once per solve
(exactness is preserved; results are converted back to Fraction).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import lcm
from typing import Iterable, Mapping, Optional, Sequence

from .model import (
    ConditionReport,
    Market,
    Matching,
    Profile,
    RationalLike,
    SetFunction,
    SizeLimitError,
    as_fraction,
    validate_profile,
)
from .setfn import is_submodular
from .subsets import bit_indices, canonical_key

#: brute_force_matching enumerates (m+1)^n assignments; keep it honest but finite.
BRUTE_FORCE_WORKER_CAP = 8
BRUTE_FORCE_FIRM_CAP = 4


@dataclass(frozen=True)
class FirmSurplusTable:
    """V_f on every subset of the universe, with tight-set markers."""

    firm: str
    universe: tuple[str, ...]
    values: tuple[Fraction, ...]
    tight: tuple[bool, ...]

    def _mask(self, workers: Iterable[str]) -> int:
        index = {w: i for i, w in enumerate(self.universe)}
        mask = 0
        for w in workers:
            if w not in index:
                raise ValueError(f"unknown worker {w!r}")
            mask |= 1 << index[w]
        return mask

    def value_of(self, workers: Iterable[str]) -> Fraction:
        return self.values[self._mask(workers)]

    def is_tight(self, workers: Iterable[str]) -> bool:
        return self.tight[self._mask(workers)]


@dataclass(frozen=True)
class EfficientSolution:
    """An efficient matching and its total surplus.

    ties_broken is set by the dynamic program when some firm had several
    optimal tight pools (the canonical rule then picked one); the
    brute-force path always reports False there.
    """

    matching: Matching
    total: Fraction
    ties_broken: bool = False


def _int_surplus_table(values: Sequence[int], costs: Sequence[int]) -> tuple[list[int], list[int], list[bool]]:
    """raw, V_f, and tightness over all masks, in integer arithmetic."""
    n = len(costs)
    size = 1 << n
    cost_sum = [0] * size
    for mask in range(1, size):
        low = mask & -mask
        cost_sum[mask] = cost_sum[mask ^ low] + costs[low.bit_length() - 1]
    raw = [values[mask] - cost_sum[mask] for mask in range(size)]
    vf = [0] * size
    for mask in range(1, size):
        best = raw[mask]
        rest = mask
        while rest:
            low = rest & -rest
            child = vf[mask ^ low]
            if child > best:
                best = child
            rest ^= low
        vf[mask] = best
    tight = [raw[mask] == vf[mask] for mask in range(size)]
    return raw, vf, tight


class MarketSolver:
    """One denominator-cleared solve of a (market, profile) pair.

    Exposes the value function on every worker subset (so all exclusion
    queries come from a single dynamic program) plus the canonical
    matching reconstruction.
    """

    def __init__(
        self,
        market: Market,
        profile: Optional[Profile] = None,
        *,
        allow_outside_domain: bool = False,
    ) -> None:
        self.market = market
        self.profile = market.require_profile(profile)
        validate_profile(market, self.profile, require_in_box=not allow_outside_domain)
        n = market.n
        size = 1 << n
        den = 1
        for _, fn in market.firms:
            for v in fn.values:
                den = lcm(den, v.denominator)
        for row in self.profile.rows:
            for d in row:
                den = lcm(den, d.denominator)
        self.den = den
        self.vf: list[list[int]] = []
        self.tight: list[list[bool]] = []
        for j, (_, fn) in enumerate(market.firms):
            costs = [int(self.profile.rows[i][j] * den) for i in range(n)]
            values = [int(v * den) for v in fn.values]
            _, vf, tight = _int_surplus_table(values, costs)
            self.vf.append(vf)
            self.tight.append(tight)
        nfirms = len(market.firms)
        dp = [[0] * size for _ in range(nfirms + 1)]
        for k in range(nfirms - 1, -1, -1):
            vfk = self.vf[k]
            nxt = dp[k + 1]
            cur = dp[k]
            for s in range(size):
                best = nxt[s]
                t = s
                while t:
                    cand = vfk[t] + nxt[s ^ t]
                    if cand > best:
                        best = cand
                    t = (t - 1) & s
                cur[s] = best
        self.dp = dp
        self._solution: Optional[EfficientSolution] = None

    def total(self) -> Fraction:
        return Fraction(self.dp[0][self.market.full_mask], self.den)

    def value_on(self, available_mask: int) -> Fraction:
        """Max total surplus using only workers inside available_mask."""
        return Fraction(self.dp[0][available_mask], self.den)

    def value_excluding_mask(self, excluded_mask: int) -> Fraction:
        return self.value_on(self.market.full_mask & ~excluded_mask)

    def solution(self) -> EfficientSolution:
        if self._solution is not None:
            return self._solution
        market = self.market
        s = market.full_mask
        assignment: dict[str, Optional[str]] = {}
        ties = False
        for k, (name, _) in enumerate(market.firms):
            target = self.dp[k][s]
            vfk = self.vf[k]
            tightk = self.tight[k]
            nxt = self.dp[k + 1]
            best_key = None
            best_t = 0
            count = 0
            t = s
            while True:
                if tightk[t] and vfk[t] + nxt[s ^ t] == target:
                    count += 1
                    key = canonical_key(t)
                    if best_key is None or key < best_key:
                        best_key, best_t = key, t
                if t == 0:
                    break
                t = (t - 1) & s
            if count > 1:
                ties = True
            for i in bit_indices(best_t):
                assignment[market.workers[i]] = name
            s ^= best_t
        for i in bit_indices(s):
            assignment[market.workers[i]] = None
        matching = Matching.from_dict(market.workers, assignment)
        self._solution = EfficientSolution(matching, self.total(), ties)
        return self._solution


def firm_surplus(
    m: Market,
    firm: str,
    u: Optional[Profile] = None,
    *,
    allow_outside_domain: bool = False,
) -> FirmSurplusTable:
    """V_f over every subset, with tight-set markers."""
    fn = m.utility(firm)
    profile = m.require_profile(u)
    validate_profile(m, profile, require_in_box=not allow_outside_domain)
    column = profile.column(firm)
    den = 1
    for v in fn.values:
        den = lcm(den, v.denominator)
    for d in column:
        den = lcm(den, d.denominator)
    values = [int(v * den) for v in fn.values]
    costs = [int(d * den) for d in column]
    _, vf, tight = _int_surplus_table(values, costs)
    return FirmSurplusTable(
        firm=firm,
        universe=m.workers,
        values=tuple(Fraction(x, den) for x in vf),
        tight=tuple(tight),
    )


def efficient_matching(
    m: Market, u: Optional[Profile] = None, *, allow_outside_domain: bool = False
) -> EfficientSolution:
    return MarketSolver(m, u, allow_outside_domain=allow_outside_domain).solution()


def max_surplus_excluding(
    m: Market,
    u: Optional[Profile] = None,
    excluded: Iterable[str] = (),
    *,
    allow_outside_domain: bool = False,
) -> Fraction:
    """Best total surplus once the excluded workers leave the market."""
    solver = MarketSolver(m, u, allow_outside_domain=allow_outside_domain)
    index = m.worker_index
    mask = 0
    for w in excluded:
        if w not in index:
            raise ValueError(f"unknown worker {w!r}")
        mask |= 1 << index[w]
    return solver.value_excluding_mask(mask)


def _canonical_best_subset(values: Sequence[int], costs: Sequence[int], pool: int) -> int:
    """Min-cardinality, lexicographically first argmax of raw value within pool."""
    best_raw: Optional[int] = None
    best_key = None
    best_t = 0
    t = pool
    while True:
        raw = values[t]
        for i in bit_indices(t):
            raw -= costs[i]
        key = canonical_key(t)
        if best_raw is None or raw > best_raw or (raw == best_raw and key < best_key):
            best_raw, best_key, best_t = raw, key, t
        if t == 0:
            break
        t = (t - 1) & pool
    return best_t


def brute_force_matching(m: Market, u: Optional[Profile] = None) -> EfficientSolution:
    """Exhaustive oracle over all (m+1)^n worker-to-firm assignments.

    Independent of the dynamic program on purpose: it enumerates raw
    assignments recursively and keeps the best total. Only the total is
    canonical; the returned matching shrinks each firm's pool to its best
    raw subset but does not canonicalize across ties between assignments.
    """
    profile = m.require_profile(u)
    validate_profile(m, profile, require_in_box=False)
    n = m.n
    nfirms = len(m.firms)
    if n > BRUTE_FORCE_WORKER_CAP:
        raise SizeLimitError(f"brute force capped at {BRUTE_FORCE_WORKER_CAP} workers")
    if nfirms > BRUTE_FORCE_FIRM_CAP:
        raise SizeLimitError(f"brute force capped at {BRUTE_FORCE_FIRM_CAP} firms")
    den = 1
    for _, fn in m.firms:
        for v in fn.values:
            den = lcm(den, v.denominator)
    for row in profile.rows:
        for d in row:
            den = lcm(den, d.denominator)
    tables = [[int(v * den) for v in fn.values] for _, fn in m.firms]
    costs = [[int(profile.rows[i][j] * den) for i in range(n)] for j in range(nfirms)]

    best_total = 0  # empty assignment is always feasible
    best_pools: list[int] = [0] * nfirms
    pools = [0] * nfirms

    def recurse(i: int, cost_acc: int) -> None:
        nonlocal best_total, best_pools
        if i == n:
            total = -cost_acc
            for j in range(nfirms):
                total += tables[j][pools[j]]
            if total > best_total:
                best_total = total
                best_pools = pools.copy()
            return
        recurse(i + 1, cost_acc)  # unmatched
        bit = 1 << i
        for j in range(nfirms):
            pools[j] |= bit
            recurse(i + 1, cost_acc + costs[j][i])
            pools[j] ^= bit

    recurse(0, 0)
    assignment: dict[str, Optional[str]] = {w: None for w in m.workers}
    for j, (name, _) in enumerate(m.firms):
        hired = _canonical_best_subset(tables[j], costs[j], best_pools[j])
        for i in bit_indices(hired):
            assignment[m.workers[i]] = name
    return EfficientSolution(
        Matching.from_dict(m.workers, assignment), Fraction(best_total, den), False
    )


def check_marginal_product_order(
    m: Market, u: Optional[Profile] = None
) -> ConditionReport:
    """Group marginal products at market level never exceed the firm level.

    For the canonical efficient matching and every firm f with assigned set
    A, every S inside A must satisfy

        V(W) - V(W minus S)  <=  V_f(A) - V_f(A minus S).
    """
    solver = MarketSolver(m, u)
    sol = solver.solution()
    index = m.worker_index
    for k, (name, _) in enumerate(m.firms):
        assigned = sol.matching.workers_of(name)
        amask = 0
        for w in assigned:
            amask |= 1 << index[w]
        vfk = solver.vf[k]
        sub = amask
        while True:
            lhs_num = solver.dp[0][m.full_mask] - solver.dp[0][m.full_mask & ~sub]
            rhs_num = vfk[amask] - vfk[amask ^ sub]
            if lhs_num > rhs_num:
                return ConditionReport(
                    verdict=False,
                    witness={
                        "firm": name,
                        "removed": [m.workers[i] for i in bit_indices(sub)],
                        "market_marginal": str(Fraction(lhs_num, solver.den)),
                        "firm_marginal": str(Fraction(rhs_num, solver.den)),
                    },
                    details="market-level marginal product exceeds the firm-level one",
                )
            if sub == 0:
                break
            sub = (sub - 1) & amask
    return ConditionReport(verdict=True)


def check_tight_sets_downward_closed(
    u_f: SetFunction, costs: Mapping[str, RationalLike]
) -> ConditionReport:
    """Under a submodular utility, subsets of tight sets are tight.

    When the premise fails the verdict is trivially true and the details
    carry a "premise false" flag.
    """
    premise = is_submodular(u_f)
    if not premise.verdict:
        return ConditionReport(
            verdict=True, details="premise false: utility is not submodular"
        )
    missing = [w for w in u_f.universe if w not in costs]
    if missing:
        raise ValueError(f"cost missing for worker {missing[0]!r}")
    cost_fr = [as_fraction(costs[w]) for w in u_f.universe]
    if any(c < 0 for c in cost_fr):
        raise ValueError("costs must be nonnegative")
    den = 1
    for v in u_f.values:
        den = lcm(den, v.denominator)
    for c in cost_fr:
        den = lcm(den, c.denominator)
    values = [int(v * den) for v in u_f.values]
    icosts = [int(c * den) for c in cost_fr]
    _, _, tight = _int_surplus_table(values, icosts)
    for mask in range(1 << u_f.n):
        if not tight[mask]:
            continue
        for i in bit_indices(mask):
            child = mask ^ (1 << i)
            if not tight[child]:
                return ConditionReport(
                    verdict=False,
                    witness={
                        "tight_set": list(u_f.members(mask)),
                        "subset": list(u_f.members(child)),
                    },
                    details="a subset of a tight set is not tight",
                )
    return ConditionReport(verdict=True, details="premise holds")
