"""Pivot payments for the matching market and the incentive checks on them.

Each matched worker is paid their externality plus their reported
disutility at the firm they join:

    p(w) = V(W) - V(W minus w) + d_w(firm of w),

unmatched workers are paid 0. Worker payoffs are then exactly the
marginal products V(W) - V(W minus w); a firm's payoff is its utility
minus its wage bill. All exclusion values come from the same dynamic
program as the efficient matching, so a full result costs one solve.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Optional

from .model import ConditionReport, Market, Outcome, Profile
from .stability import outcome_payoffs
from .surplus import MarketSolver


@dataclass(frozen=True)
class VcgResult:
    """Efficient matching, pivot salaries, and every agent's payoff."""

    market: Market
    outcome: Outcome
    total: Fraction
    worker_payoffs: tuple[tuple[str, Fraction], ...]
    firm_payoffs: tuple[tuple[str, Fraction], ...]
    surplus_excluding: tuple[tuple[str, Fraction], ...]
    ties_broken: bool

    def salary(self, worker: str) -> Fraction:
        return self.outcome.salary[worker]

    def worker_payoff(self, worker: str) -> Fraction:
        return dict(self.worker_payoffs)[worker]

    def firm_payoff(self, firm: str) -> Fraction:
        return dict(self.firm_payoffs)[firm]

    def to_dict(self) -> dict:
        return {
            "total_surplus": str(self.total),
            "matching": self.outcome.matching.to_dict(),
            "salaries": {w: str(s) for w, s in self.outcome.salaries},
            "worker_payoffs": {w: str(x) for w, x in self.worker_payoffs},
            "firm_payoffs": {f: str(x) for f, x in self.firm_payoffs},
            "surplus_excluding": {w: str(x) for w, x in self.surplus_excluding},
            "ties_broken": self.ties_broken,
        }


def vcg(
    m: Market, u: Optional[Profile] = None, *, allow_outside_domain: bool = False
) -> VcgResult:
    solver = MarketSolver(m, u, allow_outside_domain=allow_outside_domain)
    sol = solver.solution()
    total = sol.total
    profile = solver.profile
    excluding: list[tuple[str, Fraction]] = []
    salaries: dict[str, Fraction] = {}
    worker_payoffs: list[tuple[str, Fraction]] = []
    for i, w in enumerate(m.workers):
        drop = solver.value_excluding_mask(1 << i)
        excluding.append((w, drop))
        payoff = total - drop
        worker_payoffs.append((w, payoff))
        firm = sol.matching.firm_of(w)
        if firm is None:
            salaries[w] = Fraction(0)
        else:
            salaries[w] = payoff + profile.get(w, firm)
    outcome = Outcome.build(sol.matching, salaries)
    firm_payoffs: list[tuple[str, Fraction]] = []
    for name, fn in m.firms:
        hired = sol.matching.workers_of(name)
        bill = sum((salaries[w] for w in hired), Fraction(0))
        firm_payoffs.append((name, fn.value(fn.mask_of(hired)) - bill))
    return VcgResult(
        market=m,
        outcome=outcome,
        total=total,
        worker_payoffs=tuple(worker_payoffs),
        firm_payoffs=tuple(firm_payoffs),
        surplus_excluding=tuple(excluding),
        ties_broken=sol.ties_broken,
    )


def check_ir(r: VcgResult) -> ConditionReport:
    """Every agent's payoff is nonnegative (firms scanned first)."""
    for name, payoff in r.firm_payoffs:
        if payoff < 0:
            return ConditionReport(
                verdict=False,
                witness={"agent": name, "kind": "firm", "payoff": str(payoff)},
                details=f"firm {name} runs a deficit of {-payoff}",
            )
    for w, payoff in r.worker_payoffs:
        if payoff < 0:
            return ConditionReport(
                verdict=False,
                witness={"agent": w, "kind": "worker", "payoff": str(payoff)},
                details=f"worker {w} ends below their outside option by {-payoff}",
            )
    return ConditionReport(verdict=True)


def _firing_improvement(m: Market, o: Outcome) -> Optional[ConditionReport]:
    """First firm that gains by firing part of its assigned set, if any.

    A firm keeping R out of its assigned set A (salaries fixed) gets
    u_f(R) minus the wages of R; the scan covers every R inside A.
    """
    salary = o.salary
    for name, fn in m.firms:
        hired = o.matching.workers_of(name)
        amask = fn.mask_of(hired)
        base = fn.value(amask) - sum((salary[w] for w in hired), Fraction(0))
        keep = amask
        while True:
            kept = fn.members(keep)
            alt = fn.value(keep) - sum((salary[w] for w in kept), Fraction(0))
            if alt > base:
                return ConditionReport(
                    verdict=False,
                    witness={
                        "firm": name,
                        "keep": list(kept),
                        "improvement": str(alt - base),
                    },
                    details=f"firm {name} gains {alt - base} by keeping only {list(kept)}",
                )
            if keep == 0:
                break
            keep = (keep - 1) & amask
    return None


def check_sir(r: VcgResult) -> ConditionReport:
    """Individual rationality plus: no firm gains by firing a subset."""
    ir = check_ir(r)
    if not ir.verdict:
        return ConditionReport(
            verdict=False,
            witness={"individual_rationality": ir.witness},
            details="fails individual rationality outright: " + ir.details,
        )
    found = _firing_improvement(r.market, r.outcome)
    if found is not None:
        return found
    return ConditionReport(verdict=True)


def check_outcome_ir(
    m: Market, o: Outcome, u: Optional[Profile] = None
) -> ConditionReport:
    """Individual rationality of an arbitrary outcome, not just a solver's.

    Firms are scanned first, then workers, mirroring check_ir.
    """
    firm_payoffs, worker_payoffs = outcome_payoffs(m, o, u)
    for name in m.firm_names:
        payoff = firm_payoffs[name]
        if payoff < 0:
            return ConditionReport(
                verdict=False,
                witness={"agent": name, "kind": "firm", "payoff": str(payoff)},
                details=f"firm {name} runs a deficit of {-payoff}",
            )
    for w in m.workers:
        payoff = worker_payoffs[w]
        if payoff < 0:
            return ConditionReport(
                verdict=False,
                witness={"agent": w, "kind": "worker", "payoff": str(payoff)},
                details=f"worker {w} ends below their outside option by {-payoff}",
            )
    return ConditionReport(verdict=True)


def check_outcome_sir(
    m: Market, o: Outcome, u: Optional[Profile] = None
) -> ConditionReport:
    """check_sir for an arbitrary outcome: IR plus the firing scan."""
    ir = check_outcome_ir(m, o, u)
    if not ir.verdict:
        return ConditionReport(
            verdict=False,
            witness={"individual_rationality": ir.witness},
            details="fails individual rationality outright: " + ir.details,
        )
    found = _firing_improvement(m, o)
    if found is not None:
        return found
    return ConditionReport(verdict=True)


def check_strategy_proofness(
    m: Market,
    worker: str,
    k: int = 6,
    u: Optional[Profile] = None,
    *,
    allow_outside_domain: bool = False,
) -> ConditionReport:
    """No grid misreport of one worker's disutilities beats truth-telling.

    The worker's reported row ranges over {0, ubar/k, ..., ubar}^m; their
    realized payoff under a misreport uses the true disutility at whatever
    firm the mechanism then assigns. Everyone else reports truthfully.
    """
    if k < 1:
        raise ValueError("grid density k must be at least 1")
    if worker not in m.worker_index:
        raise ValueError(f"unknown worker {worker!r}")
    truth = MarketSolver(m, u, allow_outside_domain=allow_outside_domain)
    profile = truth.profile
    wi = m.worker_index[worker]
    excl = truth.value_excluding_mask(1 << wi)
    truthful = truth.total() - excl
    true_row = profile.row(worker)
    top = m.ubar
    if top == 0:
        grid: tuple[Fraction, ...] = (Fraction(0),)
    else:
        grid = tuple(top * Fraction(i, k) for i in range(k + 1))
    checked = 0
    for combo in product(grid, repeat=len(m.firms)):
        if combo == true_row:
            continue
        checked += 1
        shifted = MarketSolver(
            m,
            profile.with_row(worker, combo),
            allow_outside_domain=allow_outside_domain,
        )
        sol = shifted.solution()
        firm = sol.matching.firm_of(worker)
        if firm is None:
            payoff = Fraction(0)
        else:
            j = m.firm_names.index(firm)
            payoff = shifted.total() - excl + combo[j] - true_row[j]
        if payoff > truthful:
            return ConditionReport(
                verdict=False,
                witness={
                    "worker": worker,
                    "report": {f: str(combo[j]) for j, f in enumerate(m.firm_names)},
                    "payoff": str(payoff),
                    "truthful_payoff": str(truthful),
                },
                details=f"worker {worker} gains {payoff - truthful} by misreporting",
            )
    return ConditionReport(
        verdict=True, details=f"checked {checked} grid misreports (k={k})"
    )
