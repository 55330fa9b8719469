"""Seeded self-test: random markets pushed through every cross-check.

Each suite re-derives something two independent ways (dynamic program vs
exhaustive search, checker vs checker, guarantee direction vs constructed
counterexample) and records any disagreement. All randomness flows from
one seed, so a failure line is reproducible by rerunning with the same
arguments.

Checks call into sibling modules through their module objects on purpose:
the test suite swaps implementations out to confirm the self-test actually
catches corrupted results.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

import jobmarket.necessity as necessity
import jobmarket.setfn as setfn
import jobmarket.stability as stability
import jobmarket.surplus as surplus
import jobmarket.pivot as pivot

from .model import Market, Profile

Corpus = list[tuple[str, Market]]


@dataclass(frozen=True)
class SuiteResult:
    name: str
    checked: int
    failures: tuple[str, ...]

    @property
    def ok(self) -> bool:
        return not self.failures


@dataclass(frozen=True)
class SelftestReport:
    seed: int
    trials: int
    grid: int
    suites: tuple[SuiteResult, ...]

    @property
    def ok(self) -> bool:
        return all(s.ok for s in self.suites)

    def lines(self) -> list[str]:
        out = []
        for s in self.suites:
            mark = "ok" if s.ok else "FAIL"
            out.append(f"{mark:4} {s.name}: {s.checked} checks, {len(s.failures)} failures")
            out.extend(f"     {f}" for f in s.failures[:5])
            if len(s.failures) > 5:
                out.append(f"     ... and {len(s.failures) - 5} more")
        verdict = "all suites passed" if self.ok else "SELF-TEST FAILED"
        out.append(f"{verdict} (trials={self.trials}, seed={self.seed}, grid={self.grid})")
        return out

    def to_dict(self) -> dict:
        return {
            "ok": self.ok,
            "seed": self.seed,
            "trials": self.trials,
            "grid": self.grid,
            "suites": [
                {
                    "name": s.name,
                    "checked": s.checked,
                    "failures": list(s.failures),
                }
                for s in self.suites
            ],
        }


def _random_profile(rng: random.Random, m: Market) -> Profile:
    top = m.ubar
    grid = [top * Fraction(i, 4) for i in range(5)] if top > 0 else [Fraction(0)]
    entries = {
        w: {f: rng.choice(grid) for f in m.firm_names} for w in m.workers
    }
    return Profile.from_dict(m.workers, m.firm_names, entries)


def _oracle_equivalence(corpus: Corpus) -> SuiteResult:
    failures = []
    for label, m in corpus:
        fast = surplus.efficient_matching(m)
        slow = surplus.brute_force_matching(m)
        if fast.total != slow.total:
            failures.append(f"{label}: dp total {fast.total} != brute force {slow.total}")
        if surplus.max_surplus_excluding(m, excluded=()) != fast.total:
            failures.append(f"{label}: excluding nobody changed the total")
    return SuiteResult("oracle_equivalence", len(corpus), tuple(failures))


def _marginal_product_order(corpus: Corpus) -> SuiteResult:
    failures = []
    for label, m in corpus:
        report = surplus.check_marginal_product_order(m)
        if not report.verdict:
            failures.append(f"{label}: {report.witness}")
    return SuiteResult("marginal_product_order", len(corpus), tuple(failures))


def _submodularity_equivalence(corpus: Corpus) -> SuiteResult:
    failures = []
    checked = 0
    for label, m in corpus:
        for name, fn in m.firms:
            checked += 1
            report = setfn.check_submodularity_equivalence(fn)
            if not report.verdict:
                failures.append(f"{label}/{name}: {report.witness}")
    return SuiteResult("submodularity_equivalence", checked, tuple(failures))


def _tight_sets_closed(corpus: Corpus) -> SuiteResult:
    failures = []
    checked = 0
    for label, m in corpus:
        profile = m.disutilities
        for name, fn in m.firms:
            checked += 1
            costs = dict(zip(m.workers, profile.column(name)))
            report = surplus.check_tight_sets_downward_closed(fn, costs)
            if not report.verdict:
                failures.append(f"{label}/{name}: {report.witness}")
    return SuiteResult("tight_sets_downward_closed", checked, tuple(failures))


def _truthful_dominance(corpus: Corpus, grid: int) -> SuiteResult:
    failures = []
    checked = 0
    for label, m in corpus:
        for w in m.workers:
            checked += 1
            report = pivot.check_strategy_proofness(m, w, grid)
            if not report.verdict:
                failures.append(f"{label}/{w}: {report.witness}")
    return SuiteResult("truthful_dominance", checked, tuple(failures))


def _ir_iff_weak_substitutes(corpus: Corpus, rng: random.Random) -> SuiteResult:
    failures = []
    for label, m in corpus:
        bad = [name for name, fn in m.firms if not setfn.is_weak_substitutes(fn).verdict]
        if not bad:
            for profile in (m.disutilities, _random_profile(rng, m)):
                report = pivot.check_ir(pivot.vcg(m, profile))
                if not report.verdict:
                    failures.append(f"{label}: all firms weak-substitutes yet {report.witness}")
        else:
            try:
                necessity.demonstrate_ir_violation(m, bad[0])
            except Exception as err:  # noqa: BLE001 - any escape is a finding
                failures.append(f"{label}/{bad[0]}: no certificate ({err})")
    return SuiteResult("ir_iff_weak_substitutes", len(corpus), tuple(failures))


def _sir_iff_submodular(corpus: Corpus, rng: random.Random) -> SuiteResult:
    failures = []
    for label, m in corpus:
        bad = [name for name, fn in m.firms if not setfn.is_submodular(fn).verdict]
        if not bad:
            for profile in (m.disutilities, _random_profile(rng, m)):
                report = pivot.check_sir(pivot.vcg(m, profile))
                if not report.verdict:
                    failures.append(f"{label}: all firms submodular yet {report.witness}")
        else:
            try:
                cert = necessity.demonstrate_sir_violation(m, bad[0])
            except Exception as err:  # noqa: BLE001 - any escape is a finding
                failures.append(f"{label}/{bad[0]}: no certificate ({err})")
                continue
            if pivot.check_outcome_sir(m, cert.outcome, cert.profile).verdict:
                failures.append(f"{label}/{bad[0]}: certificate outcome is firing-proof")
            elif cert.canonical and pivot.check_sir(pivot.vcg(m, cert.profile)).verdict:
                failures.append(f"{label}/{bad[0]}: canonical certificate does not replay")
    return SuiteResult("sir_iff_submodular", len(corpus), tuple(failures))


def _valuation_chain(corpus: Corpus) -> SuiteResult:
    failures = []
    checked = 0
    for label, m in corpus:
        for name, fn in m.firms:
            checked += 1
            subm = setfn.is_submodular(fn).verdict
            if subm:
                if not setfn.is_weak_substitutes(fn).verdict:
                    failures.append(f"{label}/{name}: submodular but not weak-substitutes")
            else:
                if setfn.is_gross_substitutes(fn).verdict:
                    failures.append(f"{label}/{name}: gross-substitutes but not submodular")
    return SuiteResult("valuation_chain", checked, tuple(failures))


def _block_is_sound(m: Market, block) -> bool:
    """Substitute the block's payments back into the two inequalities."""
    r = pivot.vcg(m)
    firm_payoffs, worker_payoffs = stability.outcome_payoffs(m, r.outcome)
    fn = m.utility(block.firm)
    paid = dict(block.payments)
    new_firm = fn.subset_value(block.coalition) - sum(paid.values(), Fraction(0))
    conds = [new_firm - firm_payoffs[block.firm]]
    for w in block.coalition:
        conds.append(paid[w] - m.disutilities.get(w, block.firm) - worker_payoffs[w])
    return all(c >= 0 for c in conds) and any(c > 0 for c in conds)


def _stability_agreement(corpus: Corpus) -> SuiteResult:
    """Stable implies firing-proof implies rational; blocks re-verify.

    Also samples the cited direction that markets of gross-substitutes
    firms leave the pivot outcome unblocked.
    """
    failures = []
    for label, m in corpus:
        r = pivot.vcg(m)
        stable = stability.is_stable(m, r.outcome)
        sir = pivot.check_sir(r)
        ir = pivot.check_ir(r)
        if stable.verdict and not sir.verdict:
            failures.append(f"{label}: stable yet a firm wants to fire: {sir.witness}")
        if sir.verdict and not ir.verdict:
            failures.append(f"{label}: firing-proof yet not individually rational")
        block = stability.find_block(m, r.outcome)
        if (block is None) != stable.verdict:
            failures.append(f"{label}: is_stable disagrees with find_block")
        if block is not None:
            if not _block_is_sound(m, block):
                failures.append(f"{label}: block fails substitution: {block.to_dict()}")
            if all(setfn.is_gross_substitutes(fn).verdict for _, fn in m.firms):
                failures.append(f"{label}: gross-substitutes firms yet blocked")
    return SuiteResult("stability", len(corpus), tuple(failures))


def run(trials: int = 200, seed: int = 0, grid: int = 6) -> SelftestReport:
    """Run every suite over a seeded corpus of random markets."""
    if trials < 0:
        raise ValueError("trials must be nonnegative")
    if grid < 1:
        raise ValueError("grid density must be at least 1")
    rng = random.Random(f"selftest:{seed}")
    corpus: Corpus = []
    for t in range(trials):
        kind = necessity.GENERATOR_KINDS[t % len(necessity.GENERATOR_KINDS)]
        n = rng.randint(1, 5)
        nfirms = rng.randint(1, 3)
        s = rng.randint(0, 10**6)
        corpus.append(
            (f"{kind}(n={n},m={nfirms},seed={s})", necessity.generate(kind, n, nfirms, s))
        )
    small = [(label, m) for label, m in corpus if len(m.firms) <= 2]
    truthful = (small or corpus)[: max(1, trials // 10)]
    suites = (
        _oracle_equivalence(corpus),
        _marginal_product_order(corpus),
        _submodularity_equivalence(corpus),
        _tight_sets_closed(corpus),
        _truthful_dominance(truthful, grid),
        _ir_iff_weak_substitutes(corpus, rng),
        _sir_iff_submodular(corpus, rng),
        _valuation_chain(corpus),
        _stability_agreement(corpus),
    )
    return SelftestReport(seed=seed, trials=trials, grid=grid, suites=suites)
