"""Core stability of outcomes: blocking coalitions and how to pay them.

A firm f and a worker set S block an outcome when the surplus they can
generate together exceeds their combined payoffs under it:

    u_f(S) - sum d_w(f)  >  payoff(f) + sum payoff(w)   over w in S.

The constructed deviation gives the firm half the slack and splits the
other half equally among the coalition's workers, so every member is
strictly better off. S = empty set is allowed (it catches firms running
a deficit); the scan order is firms as declared, then subsets in
ascending bit-pattern order, so the reported block is canonical.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .model import ConditionReport, Market, Outcome, Profile


@dataclass(frozen=True)
class Block:
    """A profitable deviation: the firm, the coalition, and payments."""

    firm: str
    coalition: tuple[str, ...]
    payments: tuple[tuple[str, Fraction], ...]
    slack: Fraction

    def to_dict(self) -> dict:
        return {
            "firm": self.firm,
            "coalition": list(self.coalition),
            "payments": {w: str(p) for w, p in self.payments},
            "slack": str(self.slack),
        }


def outcome_payoffs(
    m: Market, o: Outcome, u: Optional[Profile] = None
) -> tuple[dict[str, Fraction], dict[str, Fraction]]:
    """(firm payoffs, worker payoffs) induced by an outcome."""
    profile = m.require_profile(u)
    salary = o.salary
    firm_payoffs: dict[str, Fraction] = {}
    for name, fn in m.firms:
        hired = o.matching.workers_of(name)
        bill = sum((salary[w] for w in hired), Fraction(0))
        firm_payoffs[name] = fn.value(fn.mask_of(hired)) - bill
    worker_payoffs: dict[str, Fraction] = {}
    for w, firm in o.matching.assignment:
        if firm is None:
            worker_payoffs[w] = Fraction(0)
        else:
            worker_payoffs[w] = salary[w] - profile.get(w, firm)
    return firm_payoffs, worker_payoffs


def _scan_for_block(
    m: Market,
    o: Outcome,
    profile: Profile,
    allowed_mask_of: dict[str, int],
) -> Optional[Block]:
    firm_payoffs, worker_payoffs = outcome_payoffs(m, o, profile)
    for name, fn in m.firms:
        allowed = allowed_mask_of[name]
        column = {w: profile.get(w, name) for w in m.workers}
        # ascending bit-pattern order over subsets of `allowed`
        sub = 0
        while True:
            members = fn.members(sub)
            raw = fn.value(sub) - sum((column[w] for w in members), Fraction(0))
            have = firm_payoffs[name] + sum(
                (worker_payoffs[w] for w in members), Fraction(0)
            )
            excess = raw - have
            if excess > 0:
                share = excess / (2 * len(members)) if members else Fraction(0)
                payments = tuple(
                    (w, column[w] + worker_payoffs[w] + share) for w in members
                )
                return Block(name, members, payments, excess)
            if sub == allowed:
                break
            # next subset of `allowed` in increasing numeric order
            sub = (sub - allowed) & allowed
    return None


def find_block(m: Market, o: Outcome, u: Optional[Profile] = None) -> Optional[Block]:
    """First blocking pair over all firms and all worker subsets."""
    profile = m.require_profile(u)
    full = m.full_mask
    return _scan_for_block(m, o, profile, {name: full for name in m.firm_names})


def find_weak_block(
    m: Market, o: Outcome, u: Optional[Profile] = None
) -> Optional[Block]:
    """Blocking restricted to each firm's own hires plus unmatched workers."""
    profile = m.require_profile(u)
    index = m.worker_index
    unmatched = 0
    for w in o.matching.unmatched_workers:
        unmatched |= 1 << index[w]
    allowed: dict[str, int] = {}
    for name in m.firm_names:
        own = 0
        for w in o.matching.workers_of(name):
            own |= 1 << index[w]
        allowed[name] = own | unmatched
    return _scan_for_block(m, o, profile, allowed)


def is_stable(m: Market, o: Outcome, u: Optional[Profile] = None) -> ConditionReport:
    """True iff no firm-coalition pair blocks the outcome."""
    block = find_block(m, o, u)
    if block is None:
        return ConditionReport(verdict=True)
    return ConditionReport(
        verdict=False,
        witness=block.to_dict(),
        details=(
            f"firm {block.firm} and {list(block.coalition)} improve "
            f"on the outcome with slack {block.slack}"
        ),
    )
