"""Command-line front end.

Commands:
    classify   per-firm valuation verdicts (monotone, substitute classes)
    solve      efficient matching and total surplus
    vcg        pivot salaries, payoffs, rationality verdicts
    stability  blocking search against the pivot outcome
    necessity  adversarial profile construction for one firm
    gen        seeded random market to stdout
    selftest   cross-check suites on random markets

Exit codes: 0 success, 1 the checked property fails (vcg: IR or SIR false;
stability: blocked; selftest: any suite failure), 2 bad input. Output is
deterministic for a fixed input and seed; --json emits a stable schema with
all rationals as exact strings.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Optional, Sequence

from . import selftest as selftest_mod
from .marketio import (
    MarketFormatError,
    dumps_market,
    load_market,
    load_profile,
    market_digest,
)
from .model import ConditionReport, Market, Profile
from .necessity import (
    GENERATOR_KINDS,
    demonstrate_ir_violation,
    demonstrate_sir_violation,
    find_submodularity_violation,
    find_ws_violation,
    generate,
)
from .setfn import (
    is_gross_substitutes,
    is_strong_substitutes,
    is_submodular,
    is_weak_substitutes,
)
from .stability import find_block, find_weak_block
from .surplus import efficient_matching
from .pivot import check_ir, check_sir, vcg


def _fmt_value(v) -> str:
    if isinstance(v, bool):
        return "yes" if v else "no"
    if isinstance(v, (list, tuple)):
        return "{" + ",".join(str(x) for x in v) + "}"
    if isinstance(v, dict):
        return "{" + " ".join(f"{k}={_fmt_value(x)}" for k, x in v.items()) + "}"
    return str(v)


def _fmt_witness(witness: Optional[dict]) -> str:
    if not witness:
        return ""
    return " ".join(f"{k}={_fmt_value(v)}" for k, v in witness.items())


def _cond_dict(r: ConditionReport) -> dict:
    return {"verdict": r.verdict, "witness": r.witness, "details": r.details}


def _emit(args, lines: list[str], payload: dict) -> None:
    if args.json:
        print(json.dumps(payload, indent=2, sort_keys=True))
    else:
        for line in lines:
            print(line)


def _load(args) -> Market:
    return load_market(args.market)


def _profile_for(args, m: Market) -> Optional[Profile]:
    if getattr(args, "profile", None):
        return load_profile(args.profile, m)
    return None


def cmd_classify(args) -> int:
    m = _load(args)
    lines = [f"market {market_digest(m)}"]
    firms_out = []
    for name, fn in m.firms:
        monotone = fn.is_monotone()
        entry: dict = {"firm": name, "monotone": monotone}
        if monotone:
            checks = {
                "weak_substitutes": is_weak_substitutes(fn),
                "submodular": is_submodular(fn),
                "strong_substitutes": is_strong_substitutes(fn),
                "gross_substitutes": is_gross_substitutes(fn),
            }
            flags = " ".join(
                f"{k}={_fmt_value(r.verdict)}" for k, r in checks.items()
            )
            lines.append(f"firm {name}: monotone=yes {flags}")
            for k, r in checks.items():
                entry[k] = _cond_dict(r)
                if not r.verdict:
                    lines.append(f"  {k} witness: {_fmt_witness(r.witness)}")
        else:
            lines.append(
                f"firm {name}: monotone=no (substitute classes need a weakly increasing table)"
            )
        firms_out.append(entry)
    _emit(args, lines, {"command": "classify", "market": market_digest(m), "firms": firms_out})
    return 0


def cmd_solve(args) -> int:
    m = _load(args)
    sol = efficient_matching(m, _profile_for(args, m))
    assign = " ".join(
        f"{w}->{f if f is not None else '-'}" for w, f in sol.matching.assignment
    )
    lines = [
        f"market {market_digest(m)}",
        f"total_surplus {sol.total}",
        f"matching {assign}".rstrip(),
        f"ties_broken {_fmt_value(sol.ties_broken)}",
    ]
    payload = {
        "command": "solve",
        "market": market_digest(m),
        "total_surplus": str(sol.total),
        "matching": sol.matching.to_dict(),
        "ties_broken": sol.ties_broken,
    }
    _emit(args, lines, payload)
    return 0


def cmd_vcg(args) -> int:
    m = _load(args)
    r = vcg(m, _profile_for(args, m))
    ir = check_ir(r)
    sir = check_sir(r)
    lines = [f"market {market_digest(m)}", f"total_surplus {r.total}"]
    for w, f in r.outcome.matching.assignment:
        firm = f if f is not None else "-"
        lines.append(
            f"worker {w}: firm={firm} salary={r.salary(w)} payoff={r.worker_payoff(w)}"
        )
    for f, payoff in r.firm_payoffs:
        lines.append(f"firm {f}: payoff={payoff}")
    lines.append(f"individually_rational {_fmt_value(ir.verdict)}")
    if not ir.verdict:
        lines.append(f"  witness: {_fmt_witness(ir.witness)}")
    lines.append(f"firing_proof {_fmt_value(sir.verdict)}")
    if not sir.verdict:
        lines.append(f"  witness: {_fmt_witness(sir.witness)}")
    payload = {
        "command": "vcg",
        "market": market_digest(m),
        "result": r.to_dict(),
        "individually_rational": _cond_dict(ir),
        "firing_proof": _cond_dict(sir),
    }
    _emit(args, lines, payload)
    return 0 if ir.verdict and sir.verdict else 1


def cmd_stability(args) -> int:
    m = _load(args)
    profile = _profile_for(args, m)
    r = vcg(m, profile)
    block = find_block(m, r.outcome, profile)
    weak = find_weak_block(m, r.outcome, profile)
    lines = [f"market {market_digest(m)}", f"stable {_fmt_value(block is None)}"]
    if block is not None:
        pay = " ".join(f"{w}={p}" for w, p in block.payments)
        lines.append(
            f"  block: firm={block.firm} coalition={_fmt_value(list(block.coalition))} "
            f"slack={block.slack} payments {pay}".rstrip()
        )
    lines.append(f"weakly_stable {_fmt_value(weak is None)}")
    if weak is not None:
        lines.append(
            f"  weak block: firm={weak.firm} coalition={_fmt_value(list(weak.coalition))} "
            f"slack={weak.slack}"
        )
    payload = {
        "command": "stability",
        "market": market_digest(m),
        "stable": block is None,
        "block": block.to_dict() if block is not None else None,
        "weakly_stable": weak is None,
        "weak_block": weak.to_dict() if weak is not None else None,
    }
    _emit(args, lines, payload)
    return 0 if block is None else 1


def cmd_necessity(args) -> int:
    m = _load(args)
    if args.firm not in m.firm_names:
        raise MarketFormatError(f"unknown firm {args.firm!r}")
    fn = m.utility(args.firm)
    lines = [f"market {market_digest(m)}", f"firm {args.firm}"]
    payload: dict = {"command": "necessity", "market": market_digest(m), "firm": args.firm}
    if find_submodularity_violation(fn) is None:
        lines.append("submodular: no SIR construction")
        payload["sir"] = None
    else:
        cert = demonstrate_sir_violation(m, args.firm)
        wl, wk = cert.pair
        lines.append(
            f"not submodular: firing {wl},{wk} beside {_fmt_value(list(cert.subset))} "
            f"gains {cert.summary['firing_gain']}"
        )
        if not cert.canonical:
            hire = ",".join(cert.outcome.matching.workers_of(args.firm))
            lines.append(
                f"  (at the equally efficient matching that hires {{{hire}}};"
                " the tie-broken one dodges the violation)"
            )
        lines.extend(_profile_lines(cert.profile))
        payload["sir"] = cert.to_dict()
    if find_ws_violation(fn) is None:
        lines.append("weak substitutes: no IR construction")
        payload["ir"] = None
    else:
        cert = demonstrate_ir_violation(m, args.firm)
        lines.append(
            f"not weak substitutes: hiring {_fmt_value(list(cert.subset))} "
            f"pays out {cert.summary['firm_payoff']}"
        )
        lines.extend(_profile_lines(cert.profile))
        payload["ir"] = cert.to_dict()
    _emit(args, lines, payload)
    return 0


def _profile_lines(profile: Profile) -> list[str]:
    out = ["  profile:"]
    for w in profile.workers:
        row = " ".join(f"{f}={profile.get(w, f)}" for f in profile.firms)
        out.append(f"    {w}: {row}")
    return out


def cmd_gen(args) -> int:
    m = generate(args.kind, args.workers, args.firms, args.seed)
    sys.stdout.write(dumps_market(m))
    return 0


def cmd_selftest(args) -> int:
    report = selftest_mod.run(args.trials, args.seed, args.grid)
    _emit(args, report.lines(), {"command": "selftest", **report.to_dict()})
    return 0 if report.ok else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="jobmarket",
        description="Exact matching, pivot payments, and valuation analysis "
        "for job markets with transferable salaries.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name: str, func, help_: str, market: bool = True, profile: bool = False):
        p = sub.add_parser(name, help=help_)
        p.set_defaults(func=func)
        if market:
            p.add_argument("market", help="market JSON file")
        if profile:
            p.add_argument(
                "--profile", help="disutility JSON file (overrides embedded matrix)"
            )
        p.add_argument("--json", action="store_true", help="emit JSON instead of text")
        return p

    add("classify", cmd_classify, "valuation class verdicts per firm")
    add("solve", cmd_solve, "efficient matching and total surplus", profile=True)
    add("vcg", cmd_vcg, "pivot salaries, payoffs, rationality verdicts", profile=True)
    add("stability", cmd_stability, "blocking search on the pivot outcome", profile=True)
    p = add("necessity", cmd_necessity, "adversarial profile for one firm")
    p.add_argument("--firm", required=True, help="firm to construct against")
    p = add("gen", cmd_gen, "emit a seeded random market", market=False)
    p.add_argument("kind", choices=GENERATOR_KINDS)
    p.add_argument("workers", type=int)
    p.add_argument("firms", type=int)
    p.add_argument("--seed", type=int, default=0)
    p = add("selftest", cmd_selftest, "run the cross-check suites", market=False)
    p.add_argument("--trials", type=int, default=60)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--grid", type=int, default=6)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except MarketFormatError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    except ValueError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2


def entry() -> None:
    sys.exit(main(sys.argv[1:]))


if __name__ == "__main__":
    sys.exit(main(sys.argv[1:]))
