"""Domain types for many-to-one job-matching markets with salaries.

A market has a finite ordered universe of workers, firms with set-valued
production utilities over worker subsets, and per-worker per-firm
disutilities of employment (the workers' private types). All numbers are
exact rationals (fractions.Fraction); nothing in this package compares
floats.

Utility tables are stored explicitly, one value per subset of the universe,
indexed by bitmask (see subsets.py). Convenience families (additive,
budget-additive, unit-demand) are compiled down to tables at construction
time, so every downstream algorithm sees one representation.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Mapping, Optional, Sequence, Union

from .subsets import bit_indices, mask_of, members

#: Hard cap on universe size; tables are dense with 2^n entries.
WORKER_CAP = 20

RationalLike = Union[Fraction, int, str]


class SizeLimitError(ValueError):
    """Raised when an input exceeds a documented size cap."""


def as_fraction(x: RationalLike) -> Fraction:
    """Coerce int / Fraction / rational string ("3", "3/4", "0.25")."""
    if isinstance(x, float):
        raise TypeError(f"floats are not accepted, got {x!r}; pass a string or Fraction")
    return Fraction(x)


@dataclass(frozen=True)
class ConditionReport:
    """Outcome of a checkable condition.

    Attributes:
        verdict: whether the condition holds.
        witness: when verdict is False, a JSON-able dict that lets the
            caller re-check the violated inequality independently.
        details: free-form note (e.g. premise flags for conditional checks).
    """

    verdict: bool
    witness: Optional[dict] = None
    details: str = ""

    def __post_init__(self) -> None:
        if not self.verdict and self.witness is None:
            raise ValueError("false verdict requires a witness")


@dataclass(frozen=True)
class SetFunction:
    """Normalized set function on subsets of an ordered worker universe.

    values[mask] is the function's value on the subset encoded by mask.
    values[0] (the empty set) must be 0. Monotonicity is not enforced here;
    validate_market reports on it.
    """

    universe: tuple[str, ...]
    values: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        n = len(self.universe)
        if n > WORKER_CAP:
            raise SizeLimitError(f"universe of {n} workers exceeds cap of {WORKER_CAP}")
        if len(set(self.universe)) != n:
            raise ValueError("duplicate worker ids in universe")
        if len(self.values) != 1 << n:
            raise ValueError(
                f"table has {len(self.values)} entries, expected {1 << n} "
                "(one per subset, no implicit completion)"
            )
        if self.values[0] != 0:
            raise ValueError(f"empty set must map to 0, got {self.values[0]}")

    @cached_property
    def index(self) -> dict[str, int]:
        return {w: i for i, w in enumerate(self.universe)}

    @property
    def n(self) -> int:
        return len(self.universe)

    @property
    def full_mask(self) -> int:
        return (1 << len(self.universe)) - 1

    def value(self, mask: int) -> Fraction:
        return self.values[mask]

    def mask_of(self, workers: Iterable[str]) -> int:
        return mask_of(self.index, workers)

    def members(self, mask: int) -> tuple[str, ...]:
        return members(mask, self.universe)

    def subset_value(self, workers: Iterable[str]) -> Fraction:
        return self.values[self.mask_of(workers)]

    def first_monotonicity_violation(self) -> Optional[tuple[int, int]]:
        """First (submask, supermask) adjacent pair with a value drop.

        Scans subsets in ascending mask order, added worker in index order;
        adjacent pairs suffice because monotonicity failures compose along
        one-element chains.
        """
        vals = self.values
        for s in range(1 << self.n):
            vs = vals[s]
            for i in range(self.n):
                bit = 1 << i
                if s & bit:
                    continue
                if vals[s | bit] < vs:
                    return (s, s | bit)
        return None

    def is_monotone(self) -> bool:
        return self.first_monotonicity_violation() is None

    # ---- ingestion-time families, all compiled to explicit tables ----

    @classmethod
    def from_table(
        cls, universe: Sequence[str], table: Mapping[tuple[str, ...], RationalLike]
    ) -> "SetFunction":
        """Build from a total mapping {tuple-of-worker-ids: value}.

        Every subset of the universe must be present exactly once; missing
        or duplicate entries are errors.
        """
        universe = tuple(universe)
        index = {w: i for i, w in enumerate(universe)}
        vals: list[Optional[Fraction]] = [None] * (1 << len(universe))
        for key, raw in table.items():
            m = mask_of(index, key)
            if vals[m] is not None:
                raise ValueError(f"subset {key!r} appears twice in table")
            vals[m] = as_fraction(raw)
        missing = [members(m, universe) for m, v in enumerate(vals) if v is None]
        if missing:
            raise ValueError(f"table is missing {len(missing)} subsets, first {missing[0]!r}")
        return cls(universe, tuple(vals))  # type: ignore[arg-type]

    @classmethod
    def additive(
        cls, universe: Sequence[str], values: Mapping[str, RationalLike]
    ) -> "SetFunction":
        universe = tuple(universe)
        per = [as_fraction(values.get(w, 0)) for w in universe]
        out = [Fraction(0)] * (1 << len(universe))
        for m in range(1, 1 << len(universe)):
            low = m & -m
            out[m] = out[m ^ low] + per[low.bit_length() - 1]
        return cls(universe, tuple(out))

    @classmethod
    def budget_additive(
        cls,
        universe: Sequence[str],
        budget: RationalLike,
        values: Mapping[str, RationalLike],
    ) -> "SetFunction":
        """min(budget, sum of per-worker values); budget must be >= 0."""
        cap = as_fraction(budget)
        if cap < 0:
            raise ValueError("budget must be nonnegative")
        base = cls.additive(universe, values)
        return cls(base.universe, tuple(min(cap, v) for v in base.values))

    @classmethod
    def unit_demand(
        cls, universe: Sequence[str], values: Mapping[str, RationalLike]
    ) -> "SetFunction":
        """max over hired workers of the per-worker value (0 on the empty set)."""
        universe = tuple(universe)
        per = [as_fraction(values.get(w, 0)) for w in universe]
        out = [Fraction(0)] * (1 << len(universe))
        for m in range(1, 1 << len(universe)):
            low = m & -m
            out[m] = max(out[m ^ low], per[low.bit_length() - 1])
        return cls(universe, tuple(out))


@dataclass(frozen=True)
class Profile:
    """Disutility matrix: rows follow worker order, columns firm order."""

    workers: tuple[str, ...]
    firms: tuple[str, ...]
    rows: tuple[tuple[Fraction, ...], ...]

    def __post_init__(self) -> None:
        if len(self.rows) != len(self.workers):
            raise ValueError("one row per worker required")
        for r in self.rows:
            if len(r) != len(self.firms):
                raise ValueError("one entry per firm required in every row")

    @cached_property
    def worker_index(self) -> dict[str, int]:
        return {w: i for i, w in enumerate(self.workers)}

    @cached_property
    def firm_index(self) -> dict[str, int]:
        return {f: i for i, f in enumerate(self.firms)}

    @classmethod
    def from_dict(
        cls,
        workers: Sequence[str],
        firms: Sequence[str],
        entries: Mapping[str, Mapping[str, RationalLike]],
    ) -> "Profile":
        rows = []
        for w in workers:
            if w not in entries:
                raise ValueError(f"disutilities missing worker {w!r}")
            row = entries[w]
            unknown = set(row) - set(firms)
            if unknown:
                raise ValueError(f"worker {w!r} lists unknown firm {sorted(unknown)[0]!r}")
            missing = [f for f in firms if f not in row]
            if missing:
                raise ValueError(f"worker {w!r} is missing firm {missing[0]!r}")
            rows.append(tuple(as_fraction(row[f]) for f in firms))
        unknown_workers = set(entries) - set(workers)
        if unknown_workers:
            raise ValueError(f"disutilities list unknown worker {sorted(unknown_workers)[0]!r}")
        return cls(tuple(workers), tuple(firms), tuple(rows))

    def get(self, worker: str, firm: str) -> Fraction:
        return self.rows[self.worker_index[worker]][self.firm_index[firm]]

    def row(self, worker: str) -> tuple[Fraction, ...]:
        return self.rows[self.worker_index[worker]]

    def column(self, firm: str) -> tuple[Fraction, ...]:
        j = self.firm_index[firm]
        return tuple(r[j] for r in self.rows)

    def with_row(self, worker: str, row: Sequence[Fraction]) -> "Profile":
        """Copy with one worker's row replaced (used for misreport grids)."""
        if len(row) != len(self.firms):
            raise ValueError("row length must match firm count")
        i = self.worker_index[worker]
        rows = list(self.rows)
        rows[i] = tuple(Fraction(x) for x in row)
        return Profile(self.workers, self.firms, tuple(rows))

    def to_dict(self) -> dict[str, dict[str, str]]:
        return {
            w: {f: str(self.rows[i][j]) for j, f in enumerate(self.firms)}
            for i, w in enumerate(self.workers)
        }


@dataclass(frozen=True)
class Market:
    """Workers, firms with utilities, and (optionally) embedded disutilities.

    Every firm's utility must live on exactly this market's worker universe,
    in the same order. `disutilities` may be None for markets shipped without
    a type profile; operations that need one take it explicitly.
    """

    workers: tuple[str, ...]
    firms: tuple[tuple[str, SetFunction], ...]
    disutilities: Optional[Profile] = None
    ubar: Fraction = field(init=False)

    def __post_init__(self) -> None:
        if len(set(self.workers)) != len(self.workers):
            raise ValueError("duplicate worker ids")
        names = [name for name, _ in self.firms]
        if len(set(names)) != len(names):
            raise ValueError("duplicate firm ids")
        if len(self.workers) > WORKER_CAP:
            raise SizeLimitError(
                f"{len(self.workers)} workers exceeds cap of {WORKER_CAP}"
            )
        for name, fn in self.firms:
            if fn.universe != self.workers:
                raise ValueError(
                    f"firm {name!r} utility universe {fn.universe} does not match "
                    f"market workers {self.workers}"
                )
        if self.disutilities is not None:
            if self.disutilities.workers != self.workers or self.disutilities.firms != tuple(
                names
            ):
                raise ValueError("disutility matrix does not match market workers/firms")
        peak = max((fn.values[fn.full_mask] for _, fn in self.firms), default=Fraction(0))
        object.__setattr__(self, "ubar", peak)

    @cached_property
    def firm_names(self) -> tuple[str, ...]:
        return tuple(name for name, _ in self.firms)

    @cached_property
    def utilities(self) -> dict[str, SetFunction]:
        return {name: fn for name, fn in self.firms}

    @cached_property
    def worker_index(self) -> dict[str, int]:
        return {w: i for i, w in enumerate(self.workers)}

    @property
    def n(self) -> int:
        return len(self.workers)

    @property
    def full_mask(self) -> int:
        return (1 << len(self.workers)) - 1

    def utility(self, firm: str) -> SetFunction:
        try:
            return self.utilities[firm]
        except KeyError:
            raise ValueError(f"unknown firm {firm!r}") from None

    def require_profile(self, profile: Optional[Profile]) -> Profile:
        p = profile if profile is not None else self.disutilities
        if p is None:
            raise ValueError("market has no embedded disutilities and none were supplied")
        return p


def ubar(m: Market) -> Fraction:
    """Largest full-hire utility across firms; 0 for a firmless market."""
    return m.ubar


def validate_market(m: Market) -> ConditionReport:
    """Check firm monotonicity and nonnegative disutilities.

    The witness names the first violated inequality in scan order: firms in
    declared order (adjacent subset pairs, ascending), then the disutility
    matrix in worker-major order.
    """
    for name, fn in m.firms:
        hit = fn.first_monotonicity_violation()
        if hit is not None:
            sub, sup = hit
            return ConditionReport(
                verdict=False,
                witness={
                    "kind": "monotonicity",
                    "firm": name,
                    "subset": list(fn.members(sub)),
                    "superset": list(fn.members(sup)),
                    "values": [str(fn.values[sub]), str(fn.values[sup])],
                },
                details=f"firm {name} value drops when adding a worker",
            )
    if m.disutilities is not None:
        for i, w in enumerate(m.workers):
            for j, f in enumerate(m.firm_names):
                d = m.disutilities.rows[i][j]
                if d < 0:
                    return ConditionReport(
                        verdict=False,
                        witness={
                            "kind": "negative_disutility",
                            "worker": w,
                            "firm": f,
                            "value": str(d),
                        },
                        details=f"disutility of {w} at {f} is negative",
                    )
    return ConditionReport(verdict=True)


def validate_profile(
    m: Market, profile: Profile, *, require_in_box: bool = True
) -> None:
    """Reject profiles that do not fit the market.

    Entries must be nonnegative; by default they must also lie in the
    [0, ubar] box (pass require_in_box=False to admit larger reports).
    """
    if profile.workers != m.workers or profile.firms != m.firm_names:
        raise ValueError("profile workers/firms do not match market")
    cap = m.ubar
    for i, w in enumerate(m.workers):
        for j, f in enumerate(m.firm_names):
            d = profile.rows[i][j]
            if d < 0:
                raise ValueError(f"negative disutility {d} for {w} at {f}")
            if require_in_box and d > cap:
                raise ValueError(
                    f"disutility {d} for {w} at {f} exceeds ubar={cap}; "
                    "pass allow_outside_domain=True to accept"
                )


@dataclass(frozen=True)
class Matching:
    """Assignment of workers to firms (None = unmatched), stored worker-major.

    The firm-side view is derived from the worker-side assignment, so the
    two views cannot disagree.
    """

    assignment: tuple[tuple[str, Optional[str]], ...]

    @cached_property
    def _by_worker(self) -> dict[str, Optional[str]]:
        return dict(self.assignment)

    def firm_of(self, worker: str) -> Optional[str]:
        return self._by_worker[worker]

    def workers_of(self, firm: str) -> tuple[str, ...]:
        return tuple(w for w, f in self.assignment if f == firm)

    @property
    def matched_workers(self) -> tuple[str, ...]:
        return tuple(w for w, f in self.assignment if f is not None)

    @property
    def unmatched_workers(self) -> tuple[str, ...]:
        return tuple(w for w, f in self.assignment if f is None)

    def to_dict(self) -> dict[str, Optional[str]]:
        return dict(self.assignment)

    @classmethod
    def from_dict(
        cls, workers: Sequence[str], assignment: Mapping[str, Optional[str]]
    ) -> "Matching":
        return cls(tuple((w, assignment.get(w)) for w in workers))


@dataclass(frozen=True)
class Outcome:
    """A matching plus salaries. Unmatched workers must be paid exactly 0."""

    matching: Matching
    salaries: tuple[tuple[str, Fraction], ...]

    def __post_init__(self) -> None:
        paid = {w for w, _ in self.salaries}
        assigned = {w for w, _ in self.matching.assignment}
        if paid != assigned:
            raise ValueError("salaries must cover exactly the market's workers")
        by_worker = dict(self.salaries)
        for w, f in self.matching.assignment:
            if by_worker[w] < 0:
                raise ValueError(f"negative salary for {w}")
            if f is None and by_worker[w] != 0:
                raise ValueError(f"unmatched worker {w} must have salary 0")

    @cached_property
    def salary(self) -> dict[str, Fraction]:
        return dict(self.salaries)

    @classmethod
    def build(
        cls, matching: Matching, salaries: Mapping[str, Fraction]
    ) -> "Outcome":
        return cls(
            matching,
            tuple((w, Fraction(salaries.get(w, 0))) for w, _ in matching.assignment),
        )
