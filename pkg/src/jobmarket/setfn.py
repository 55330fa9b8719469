"""Valuation-class checks for set functions: substitutes conditions, demand.

Every checker returns a ConditionReport whose witness, when the verdict is
false, contains the exact sets and values of the first violated inequality
in scan order (subsets ascending by bit pattern, workers ascending by
index). Witnesses are plain dicts with rationals rendered as strings so
they can be re-checked and serialized as-is.
"""

from __future__ import annotations

from fractions import Fraction
from math import lcm
from typing import Iterable, Mapping, Optional

from .model import ConditionReport, RationalLike, SetFunction, as_fraction
from .subsets import bit_indices


def marginal(h: SetFunction, s: Iterable[str], w: str) -> Fraction:
    """h(S) - h(S minus w); requires w in S."""
    mask = h.mask_of(s)
    try:
        bit = 1 << h.index[w]
    except KeyError:
        raise ValueError(f"unknown worker {w!r}") from None
    if not mask & bit:
        raise ValueError(f"worker {w!r} is not in the given set")
    return h.values[mask] - h.values[mask ^ bit]


def marginal_set(h: SetFunction, s: Iterable[str], sp: Iterable[str]) -> Fraction:
    """h(S) - h(S minus Sp); requires Sp a subset of S."""
    mask = h.mask_of(s)
    sub = h.mask_of(sp)
    if sub & ~mask:
        raise ValueError("second set must be a subset of the first")
    return h.values[mask] - h.values[mask ^ sub]


def _sum_of_marginals(h: SetFunction, mask: int) -> Fraction:
    vals = h.values
    vs = vals[mask]
    total = Fraction(0)
    for i in bit_indices(mask):
        total += vs - vals[mask ^ (1 << i)]
    return total


def is_weak_substitutes(h: SetFunction) -> ConditionReport:
    """h(S) >= sum over w in S of the w-marginal at S, for every S."""
    for mask in range(1 << h.n):
        total = _sum_of_marginals(h, mask)
        if h.values[mask] < total:
            return ConditionReport(
                verdict=False,
                witness={
                    "subset": list(h.members(mask)),
                    "value": str(h.values[mask]),
                    "marginal_sum": str(total),
                },
                details="set value is below the sum of its members' marginals",
            )
    return ConditionReport(verdict=True)


def _first_submodularity_violation(
    h: SetFunction,
) -> Optional[tuple[int, int, int]]:
    """First (base mask, i, j) with h(S+i) + h(S+j) < h(S+i+j) + h(S)."""
    vals = h.values
    n = h.n
    for base in range(1 << n):
        for i in range(n):
            bi = 1 << i
            if base & bi:
                continue
            vi = vals[base | bi]
            for j in range(i + 1, n):
                bj = 1 << j
                if base & bj:
                    continue
                if vi + vals[base | bj] < vals[base | bi | bj] + vals[base]:
                    return (base, i, j)
    return None


def is_submodular(h: SetFunction) -> ConditionReport:
    """Diminishing marginals; checked in the adjacent-pair form.

    A violation at base S with workers w, w' is reported in nested form:
    w's marginal on the smaller set S+w is strictly below its marginal on
    the larger set S+w+w'.
    """
    hit = _first_submodularity_violation(h)
    if hit is None:
        return ConditionReport(verdict=True)
    base, i, j = hit
    bi, bj = 1 << i, 1 << j
    smaller = base | bi
    larger = base | bi | bj
    m_small = h.values[smaller] - h.values[base]
    m_large = h.values[larger] - h.values[base | bj]
    return ConditionReport(
        verdict=False,
        witness={
            "smaller_set": list(h.members(smaller)),
            "larger_set": list(h.members(larger)),
            "worker": h.universe[i],
            "marginal_smaller": str(m_small),
            "marginal_larger": str(m_large),
        },
        details="a worker's marginal grows when the set grows",
    )


def is_strong_substitutes(h: SetFunction) -> ConditionReport:
    """h(S) - h(S minus S') >= sum over w in S' of the w-marginal at S.

    S' ranges over all nonempty subsets of S, S itself included (at S'=S
    this is exactly the weak-substitutes inequality, which is what makes
    this condition the stronger one).
    """
    vals = h.values
    for mask in range(1 << h.n):
        idx = bit_indices(mask)
        if not idx:
            continue
        vs = vals[mask]
        marg = {i: vs - vals[mask ^ (1 << i)] for i in idx}
        # ascending submask order for the canonical witness
        for sub in range(1, mask + 1):
            if sub & ~mask:
                continue
            drop = vs - vals[mask ^ sub]
            total = sum((marg[i] for i in bit_indices(sub)), Fraction(0))
            if drop < total:
                return ConditionReport(
                    verdict=False,
                    witness={
                        "set": list(h.members(mask)),
                        "removed": list(h.members(sub)),
                        "value_drop": str(drop),
                        "marginal_sum": str(total),
                    },
                    details="removing a group costs less than its members' marginals",
                )
    return ConditionReport(verdict=True)


def check_submodularity_equivalence(h: SetFunction) -> ConditionReport:
    """is_submodular and is_strong_substitutes must agree on every table."""
    sub = is_submodular(h)
    strong = is_strong_substitutes(h)
    if sub.verdict == strong.verdict:
        return ConditionReport(verdict=True, details=f"both {sub.verdict}")
    return ConditionReport(
        verdict=False,
        witness={
            "submodular": sub.verdict,
            "strong_substitutes": strong.verdict,
            "submodular_witness": sub.witness,
            "strong_substitutes_witness": strong.witness,
        },
        details="checkers disagree",
    )


def demand_set(
    h: SetFunction, prices: Mapping[str, RationalLike]
) -> set[frozenset[str]]:
    """All subsets maximizing h(S) - p(S) at the given nonnegative prices."""
    missing = [w for w in h.universe if w not in prices]
    if missing:
        raise ValueError(f"price missing for worker {missing[0]!r}")
    unknown = set(prices) - set(h.universe)
    if unknown:
        raise ValueError(f"price for unknown worker {sorted(unknown)[0]!r}")
    p = [as_fraction(prices[w]) for w in h.universe]
    if any(x < 0 for x in p):
        raise ValueError("prices must be nonnegative")
    best: Fraction = Fraction(0)
    arg: list[int] = [0]
    psum = [Fraction(0)] * (1 << h.n)
    for mask in range(1, 1 << h.n):
        low = mask & -mask
        psum[mask] = psum[mask ^ low] + p[low.bit_length() - 1]
        net = h.values[mask] - psum[mask]
        if net > best:
            best, arg = net, [mask]
        elif net == best:
            arg.append(mask)
    return {frozenset(h.members(m)) for m in arg}


def _scaled_values(h: SetFunction) -> tuple[list[int], int]:
    den = 1
    for v in h.values:
        den = lcm(den, v.denominator)
    return [int(v * den) for v in h.values], den


def is_gross_substitutes(
    h: SetFunction, *, find_price_refutation: bool = False
) -> ConditionReport:
    """Local-exchange test for gross substitutes on a monotone table.

    For every pair of sets S, T and every w in S minus T, moving w across
    (possibly swapping it against some w' in T minus S) must not lose value:

        h(S) + h(T) <= max of  h(S-w) + h(T+w)
                       and     h(S-w+w') + h(T+w-w')  over w' in T minus S.

    Non-monotone tables are rejected. On a false verdict with
    find_price_refutation=True, a bounded deterministic search over prices
    derived from the table's marginal values tries to exhibit a price pair
    p <= p' (one coordinate raised) under which some worker with an
    unchanged price is demanded at p but dropped from every demanded set at
    p'; when the bounded family contains none, the witness simply omits it.
    """
    if not h.is_monotone():
        raise ValueError("gross-substitutes test requires a weakly increasing table")
    vals, _ = _scaled_values(h)
    n = h.n
    size = 1 << n
    for s in range(size):
        for t in range(size):
            diff = s & ~t
            if not diff:
                continue
            lhs = vals[s] + vals[t]
            for i in bit_indices(diff):
                bi = 1 << i
                best = vals[s ^ bi] + vals[t | bi]
                if best >= lhs:
                    continue
                for j in bit_indices(t & ~s):
                    bj = 1 << j
                    cand = vals[(s ^ bi) | bj] + vals[(t | bi) ^ bj]
                    if cand > best:
                        best = cand
                        if best >= lhs:
                            break
                if best < lhs:
                    exact_best = h.values[s ^ bi] + h.values[t | bi]
                    for j in bit_indices(t & ~s):
                        bj = 1 << j
                        exact_best = max(
                            exact_best,
                            h.values[(s ^ bi) | bj] + h.values[(t | bi) ^ bj],
                        )
                    witness = {
                        "set_a": list(h.members(s)),
                        "set_b": list(h.members(t)),
                        "worker": h.universe[i],
                        "combined_value": str(h.values[s] + h.values[t]),
                        "best_exchange": str(exact_best),
                    }
                    if find_price_refutation:
                        ref = _search_price_refutation(h)
                        if ref is not None:
                            witness["price_refutation"] = ref
                    return ConditionReport(
                        verdict=False,
                        witness=witness,
                        details="local exchange loses value; not gross substitutes",
                    )
    return ConditionReport(verdict=True)


def _candidate_prices(h: SetFunction, worker: str) -> list[Fraction]:
    """Distinct marginals of the worker, plus 0 and midpoints between neighbors."""
    i = h.index[worker]
    bit = 1 << i
    seen = {Fraction(0)}
    for mask in range(1 << h.n):
        if mask & bit:
            continue
        seen.add(h.values[mask | bit] - h.values[mask])
    levels = sorted(seen)
    out = list(levels)
    for a, b in zip(levels, levels[1:]):
        out.append((a + b) / 2)
    return sorted(out)


def _demand_union(h: SetFunction, p: list[Fraction]) -> int:
    """Union mask of all demanded sets at price vector p (worker order)."""
    best = Fraction(0)
    union = 0
    psum = [Fraction(0)] * (1 << h.n)
    for mask in range(1, 1 << h.n):
        low = mask & -mask
        psum[mask] = psum[mask ^ low] + p[low.bit_length() - 1]
        net = h.values[mask] - psum[mask]
        if net > best:
            best, union = net, mask
        elif net == best:
            union |= mask
    return union


_REFUTATION_BUDGET = 60_000


def _search_price_refutation(h: SetFunction) -> Optional[dict]:
    cands = [_candidate_prices(h, w) for w in h.universe]
    total = 1
    for c in cands:
        total *= len(c)
    if total > _REFUTATION_BUDGET:
        return None
    from itertools import product

    for base in product(*cands):
        p = list(base)
        at_p = _demand_union(h, p)
        if at_p == 0:
            continue
        for j in range(h.n):
            for raised in cands[j]:
                if raised <= p[j]:
                    continue
                q = list(p)
                q[j] = raised
                at_q = _demand_union(h, q)
                dropped = at_p & ~at_q & ~(1 << j)
                if dropped:
                    k = dropped & -dropped
                    w = h.universe[k.bit_length() - 1]
                    return {
                        "prices": {u: str(x) for u, x in zip(h.universe, p)},
                        "raised_prices": {u: str(x) for u, x in zip(h.universe, q)},
                        "raised_worker": h.universe[j],
                        "dropped_worker": w,
                    }
    return None


def verify_price_refutation(
    h: SetFunction,
    prices: Mapping[str, RationalLike],
    raised_prices: Mapping[str, RationalLike],
    dropped_worker: str,
) -> bool:
    """Re-check a refutation: p <= p', dropped worker's price unchanged,
    demanded somewhere at p, demanded nowhere at p'."""
    p = [as_fraction(prices[w]) for w in h.universe]
    q = [as_fraction(raised_prices[w]) for w in h.universe]
    if any(a > b for a, b in zip(p, q)):
        return False
    i = h.index[dropped_worker]
    if p[i] != q[i]:
        return False
    bit = 1 << i
    return bool(_demand_union(h, p) & bit) and not _demand_union(h, q) & bit
