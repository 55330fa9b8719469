"""Adversarial disutility profiles that turn valuation defects into failures.

Two constructions, both verified end to end before being returned:

* a weak-substitutes violation at a set S becomes a profile on which the
  pivot mechanism hands firm f exactly S and a wage bill above u_f(S),
  so the firm's payoff is negative;

* a submodularity violation at (S, wl, wk) becomes a profile on which the
  firm is assigned S plus both workers yet would strictly gain by firing
  the pair, so the outcome is not strongly individually rational.

The profiles are 0/ubar valued: workers meant for the target firm report 0
there and ubar everywhere else, all other workers report the reverse.

Every certificate carries the outcome it is about. Usually that is the
solver's own outcome (`canonical=True`). The exception is a submodularity
violation whose full set T = S + {wl, wk} contains a zero-marginal worker:
the least-cardinality tie-break then never hands the firm all of T, under
any profile, and the firing argument can genuinely be out of the solver's
reach (a three-worker table with exactly one violating triple suffices).
The salary formula p(w) = V(W) - V(W minus w) + d_w does not depend on
which efficient matching is chosen, so the construction instead exhibits
an alternative matching with the same total surplus, prices it with the
pivot formula, and verifies the firing gain there (`canonical=False`).
Verification failures raise ConstructionError instead of returning a bad
certificate.

`generate` builds seeded random markets from a few named families, for
search and for the self-test corpus.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Optional

from .model import Market, Matching, Outcome, Profile, SetFunction
from .setfn import _first_submodularity_violation, is_weak_substitutes
from .subsets import bit_indices
from .surplus import MarketSolver
from .pivot import VcgResult, check_ir, check_outcome_sir, vcg


class ConstructionError(RuntimeError):
    """A candidate profile failed its post-construction verification."""


@dataclass(frozen=True)
class AdversarialProfile:
    """A verified certificate: the profile plus what it makes go wrong.

    `outcome` is the efficient pivot-priced outcome the certificate talks
    about; `canonical` records whether it is the solver's own outcome or an
    exhibited alternative with the same total surplus.
    """

    kind: str  # "ir" or "sir"
    firm: str
    subset: tuple[str, ...]
    pair: Optional[tuple[str, str]]
    profile: Profile
    outcome: Outcome
    canonical: bool
    summary: dict

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "firm": self.firm,
            "subset": list(self.subset),
            "pair": list(self.pair) if self.pair is not None else None,
            "profile": self.profile.to_dict(),
            "outcome": {
                "matching": self.outcome.matching.to_dict(),
                "salaries": {w: str(s) for w, s in self.outcome.salaries},
            },
            "canonical": self.canonical,
            "summary": self.summary,
        }


def find_ws_violation(h: SetFunction) -> Optional[tuple[str, ...]]:
    """First weak-substitutes violator in ascending bit-pattern order.

    Scanning masks as integers visits every strict subset of a set before
    the set itself, so the first hit is inclusion-minimal; minimality is
    what makes the individual-rationality construction tie-proof.
    """
    report = is_weak_substitutes(h)
    if report.verdict:
        return None
    return tuple(report.witness["subset"])


def find_submodularity_violation(
    h: SetFunction,
) -> Optional[tuple[tuple[str, ...], str, str]]:
    """First (S, wl, wk) with u(S+wl) + u(S+wk) < u(S+wl+wk) + u(S)."""
    hit = _first_submodularity_violation(h)
    if hit is None:
        return None
    base, i, j = hit
    return (h.members(base), h.universe[i], h.universe[j])


def iter_submodularity_violations(
    h: SetFunction,
) -> Iterator[tuple[tuple[str, ...], str, str]]:
    """All violating triples, base mask ascending, then worker pairs."""
    vals = h.values
    n = h.n
    for base in range(1 << n):
        for i in range(n):
            bi = 1 << i
            if base & bi:
                continue
            for j in range(i + 1, n):
                bj = 1 << j
                if base & bj:
                    continue
                if vals[base | bi] + vals[base | bj] < vals[base | bi | bj] + vals[base]:
                    yield (h.members(base), h.universe[i], h.universe[j])


def adversarial_profile(m: Market, firm: str, inside: Iterable[str]) -> Profile:
    """0/ubar profile steering `inside` to `firm` and everyone else away."""
    if firm not in m.firm_names:
        raise ValueError(f"unknown firm {firm!r}")
    inside_set = set(inside)
    unknown = inside_set - set(m.workers)
    if unknown:
        raise ValueError(f"unknown worker {sorted(unknown)[0]!r}")
    top = m.ubar
    entries = {}
    for w in m.workers:
        if w in inside_set:
            entries[w] = {f: (Fraction(0) if f == firm else top) for f in m.firm_names}
        else:
            entries[w] = {f: (top if f == firm else Fraction(0)) for f in m.firm_names}
    return Profile.from_dict(m.workers, m.firm_names, entries)


def _verified_result(m: Market, profile: Profile, firm: str, want_mask: int) -> VcgResult:
    r = vcg(m, profile)
    hired = r.outcome.matching.workers_of(firm)
    fn = m.utility(firm)
    if fn.mask_of(hired) != want_mask:
        raise ConstructionError(
            f"firm {firm} was assigned {list(hired)}, "
            f"construction needs {list(fn.members(want_mask))}"
        )
    return r


def construct_ir_violation(
    m: Market, firm: str, subset: Iterable[str]
) -> AdversarialProfile:
    """Profile on which the pivot outcome pays firm `firm` less than nothing.

    `subset` must violate weak substitutes for the firm's utility; each of
    its members is then paid their full marginal, and those marginals sum
    past the set's value. Raises ConstructionError if the verified outcome
    deviates (possible when `subset` is not inclusion-minimal).
    """
    fn = m.utility(firm)
    smask = fn.mask_of(subset)
    marginals = {
        fn.universe[i]: fn.values[smask] - fn.values[smask ^ (1 << i)]
        for i in bit_indices(smask)
    }
    if fn.values[smask] >= sum(marginals.values(), Fraction(0)):
        raise ValueError("subset does not violate weak substitutes for this firm")
    members = fn.members(smask)
    profile = adversarial_profile(m, firm, members)
    r = _verified_result(m, profile, firm, smask)
    for w in members:
        if r.salary(w) != marginals[w]:
            raise ConstructionError(
                f"salary of {w} is {r.salary(w)}, expected the marginal {marginals[w]}"
            )
    payoff = r.firm_payoff(firm)
    expected = fn.values[smask] - sum(marginals.values(), Fraction(0))
    if payoff != expected:
        raise ConstructionError(f"firm payoff {payoff}, expected {expected}")
    if payoff >= 0 or check_ir(r).verdict:
        raise ConstructionError("outcome is individually rational after all")
    return AdversarialProfile(
        kind="ir",
        firm=firm,
        subset=members,
        pair=None,
        profile=profile,
        outcome=r.outcome,
        canonical=True,
        summary={
            "firm_payoff": str(payoff),
            "salaries": {w: str(marginals[w]) for w in members},
        },
    )


def _restricted(fn: SetFunction, keep: tuple[str, ...]) -> SetFunction:
    """The same utility on a sub-universe (values read off the full table)."""
    idx = tuple(fn.index[w] for w in keep)
    values = []
    for sub in range(1 << len(keep)):
        mask = 0
        for b in bit_indices(sub):
            mask |= 1 << idx[b]
        values.append(fn.values[mask])
    return SetFunction(tuple(keep), tuple(values))


def _exhibited_matching(
    m: Market, profile: Profile, firm: str, inside: tuple[str, ...]
) -> Matching:
    """Hand `inside` to `firm`, match everyone else optimally without them."""
    taken = set(inside)
    assignment: dict[str, Optional[str]] = {
        w: (firm if w in taken else None) for w in m.workers
    }
    outside = tuple(w for w in m.workers if w not in taken)
    others = tuple((g, fn) for g, fn in m.firms if g != firm)
    if outside and others:
        names = [g for g, _ in others]
        entries = {w: {g: profile.get(w, g) for g in names} for w in outside}
        sub = Market(
            outside,
            tuple((g, _restricted(fn, outside)) for g, fn in others),
            Profile.from_dict(outside, names, entries),
        )
        for w, g in MarketSolver(sub).solution().matching.assignment:
            if g is not None:
                assignment[w] = g
    return Matching.from_dict(m.workers, assignment)


def _realized_total(m: Market, profile: Profile, matching: Matching) -> Fraction:
    total = Fraction(0)
    for name, fn in m.firms:
        hired = matching.workers_of(name)
        bill = sum((profile.get(w, name) for w in hired), Fraction(0))
        total += fn.value(fn.mask_of(hired)) - bill
    return total


def construct_sir_violation(
    m: Market, firm: str, subset: Iterable[str], wl: str, wk: str
) -> AdversarialProfile:
    """Profile on which `firm` hires subset + {wl, wk} but wants to fire the pair.

    The triple must violate submodularity:
    u(S+wl) + u(S+wk) < u(S+wl+wk) + u(S). The pair's pivot salaries then
    cost the firm more than the pair adds. When the solver's own outcome
    already hires T = S + {wl, wk}, the certificate is about that outcome;
    otherwise a tie has shrunk the hire, and the certificate exhibits an
    alternative matching with the same total surplus (verified exactly)
    that does hand the firm T, priced by the same pivot formula.
    """
    fn = m.utility(firm)
    smask = fn.mask_of(subset)
    for w in (wl, wk):
        if w not in fn.index:
            raise ValueError(f"unknown worker {w!r}")
    bl, bk = 1 << fn.index[wl], 1 << fn.index[wk]
    if wl == wk or smask & (bl | bk):
        raise ValueError("wl and wk must be distinct workers outside the subset")
    tmask = smask | bl | bk
    vals = fn.values
    if vals[smask | bl] + vals[smask | bk] >= vals[tmask] + vals[smask]:
        raise ValueError("triple does not violate submodularity for this firm")
    inside = fn.members(tmask)
    profile = adversarial_profile(m, firm, inside)
    solver = MarketSolver(m, profile)
    sol = solver.solution()
    total = sol.total
    if fn.mask_of(sol.matching.workers_of(firm)) == tmask:
        matching = sol.matching
        canonical = True
    else:
        matching = _exhibited_matching(m, profile, firm, inside)
        canonical = False
        realized = _realized_total(m, profile, matching)
        if realized != total:
            raise ConstructionError(
                f"exhibited assignment totals {realized}, the optimum is {total}"
            )
    salaries: dict[str, Fraction] = {}
    for i, w in enumerate(m.workers):
        g = matching.firm_of(w)
        if g is not None:
            salaries[w] = total - solver.value_excluding_mask(1 << i) + profile.get(w, g)
    outcome = Outcome.build(matching, salaries)
    expected = {wl: vals[tmask] - vals[tmask ^ bl], wk: vals[tmask] - vals[tmask ^ bk]}
    for w in (wl, wk):
        if outcome.salary[w] != expected[w]:
            raise ConstructionError(
                f"salary of {w} is {outcome.salary[w]}, expected {expected[w]}"
            )
    bill = {w: outcome.salary[w] for w in inside}
    keep_s = vals[smask] - sum((bill[w] for w in fn.members(smask)), Fraction(0))
    keep_t = vals[tmask] - sum(bill.values(), Fraction(0))
    gain = keep_s - keep_t
    if gain <= 0:
        raise ConstructionError("firing the pair does not help after all")
    if check_outcome_sir(m, outcome, profile).verdict:
        raise ConstructionError("outcome is strongly individually rational after all")
    return AdversarialProfile(
        kind="sir",
        firm=firm,
        subset=fn.members(smask),
        pair=(wl, wk),
        profile=profile,
        outcome=outcome,
        canonical=canonical,
        summary={
            "hired": list(inside),
            "payments": {w: str(expected[w]) for w in (wl, wk)},
            "firing_gain": str(gain),
        },
    )


def demonstrate_ir_violation(m: Market, firm: str) -> AdversarialProfile:
    """Certificate that the firm's non-weak-substitutes utility breaks IR."""
    witness = find_ws_violation(m.utility(firm))
    if witness is None:
        raise ValueError(f"utility of firm {firm!r} satisfies weak substitutes")
    return construct_ir_violation(m, firm, witness)


def demonstrate_sir_violation(m: Market, firm: str) -> AdversarialProfile:
    """Certificate that the firm's non-submodular utility breaks firing-proofness.

    Violating triples whose full set has strictly positive marginals
    throughout are tried first: their certificates are about the solver's
    own outcome. Triples with a zero-marginal member come after and yield
    exhibited-outcome certificates (see construct_sir_violation).
    """
    fn = m.utility(firm)
    vals = fn.values
    triples = list(iter_submodularity_violations(fn))
    if not triples:
        raise ValueError(f"utility of firm {firm!r} is submodular")

    def taut(triple: tuple[tuple[str, ...], str, str]) -> bool:
        subset, wl, wk = triple
        tmask = fn.mask_of(subset) | (1 << fn.index[wl]) | (1 << fn.index[wk])
        return all(vals[tmask ^ (1 << i)] < vals[tmask] for i in bit_indices(tmask))

    ordered = [t for t in triples if taut(t)] + [t for t in triples if not taut(t)]
    last: Optional[ConstructionError] = None
    for subset, wl, wk in ordered:
        try:
            return construct_sir_violation(m, firm, subset, wl, wk)
        except ConstructionError as err:
            last = err
    raise ConstructionError(
        f"none of the {len(ordered)} violating triples verified; last failure: {last}"
    )


# ---- seeded market families -------------------------------------------------


def _gen_additive(rng: random.Random, workers: tuple[str, ...]) -> SetFunction:
    return SetFunction.additive(
        workers, {w: Fraction(rng.randint(0, 8), 2) for w in workers}
    )


def _gen_budget_additive(rng: random.Random, workers: tuple[str, ...]) -> SetFunction:
    values = {w: Fraction(rng.randint(1, 8), 2) for w in workers}
    budget = Fraction(rng.randint(1, 10), 2)
    return SetFunction.budget_additive(workers, budget, values)


def _gen_unit_demand(rng: random.Random, workers: tuple[str, ...]) -> SetFunction:
    return SetFunction.unit_demand(
        workers, {w: Fraction(rng.randint(0, 8), 2) for w in workers}
    )


def _gen_random_submodular(rng: random.Random, workers: tuple[str, ...]) -> SetFunction:
    # concave-of-cardinality plus weighted coverage; both parts are
    # submodular and monotone, and sums preserve that
    n = len(workers)
    increments = sorted(
        (Fraction(rng.randint(0, 4), 2) for _ in range(n)), reverse=True
    )
    prefix = [Fraction(0)]
    for inc in increments:
        prefix.append(prefix[-1] + inc)
    ground = n + rng.randint(1, n + 1)
    covers = [
        frozenset(rng.sample(range(ground), rng.randint(0, min(3, ground))))
        for _ in workers
    ]
    weight = Fraction(rng.randint(0, 2), 2)
    values = []
    for mask in range(1 << n):
        covered: set[int] = set()
        for i in bit_indices(mask):
            covered |= covers[i]
        values.append(prefix[mask.bit_count()] + weight * len(covered))
    return SetFunction(tuple(workers), tuple(values))


def _gen_random_monotone(rng: random.Random, workers: tuple[str, ...]) -> SetFunction:
    n = len(workers)
    vals = [Fraction(0)] * (1 << n)
    bumps = (Fraction(0), Fraction(0), Fraction(1, 2), Fraction(1), Fraction(2))
    for mask in range(1, 1 << n):
        base = max(vals[mask ^ (1 << i)] for i in bit_indices(mask))
        vals[mask] = base + rng.choice(bumps)
    return SetFunction(tuple(workers), tuple(vals))


_FAMILIES = {
    "additive": _gen_additive,
    "budget_additive": _gen_budget_additive,
    "unit_demand": _gen_unit_demand,
    "random_submodular": _gen_random_submodular,
    "random_monotone": _gen_random_monotone,
}

GENERATOR_KINDS = tuple(sorted(_FAMILIES))


def generate(kind: str, n: int, m: int, seed: int = 0) -> Market:
    """Seeded market: n workers, m firms of the named family, disutilities
    drawn from the quarter grid {0, ubar/4, ..., ubar}.

    Same (kind, n, m, seed) always yields the same market.
    """
    if kind not in _FAMILIES:
        raise ValueError(f"unknown kind {kind!r}; choose one of {GENERATOR_KINDS}")
    if n < 0 or m < 0:
        raise ValueError("worker and firm counts must be nonnegative")
    rng = random.Random(f"{kind}:{n}:{m}:{seed}")
    workers = tuple(f"w{i}" for i in range(1, n + 1))
    make = _FAMILIES[kind]
    firms = tuple((f"f{j}", make(rng, workers)) for j in range(1, m + 1))
    peak = max((fn.values[fn.full_mask] for _, fn in firms), default=Fraction(0))
    grid = [peak * Fraction(i, 4) for i in range(5)] if peak > 0 else [Fraction(0)]
    entries = {
        w: {name: rng.choice(grid) for name, _ in firms} for w in workers
    }
    profile = Profile.from_dict(workers, [name for name, _ in firms], entries)
    return Market(workers, firms, profile)
