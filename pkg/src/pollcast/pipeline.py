"""One forecast pipeline for both the CLI and the HTTP service.

Method variants:

    raw           - plain latest-vote counts
    standardized  - transition-matrix correction anchored to official results
    fixed         - standardized, then named party groups pinned to their
                    official prior totals

Order of operations for the fixed variants: standardize, fix groups, apply
the threshold, apportion seats.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from . import bias
from .apportion import allocate_seats
from .bias import DEFAULT_SMALL_CLASS_FLOOR, InsufficientPriorDataError, VoteRecord
from .ingest import OfficialResults
from .registry import PartyRegistry

RAW = "raw"
STANDARDIZED = "standardized"
FIXED = "fixed"
METHOD_KINDS = (RAW, STANDARDIZED, FIXED)


@dataclass(frozen=True)
class MethodSpec:
    kind: str
    groups: tuple[str, ...] = ()

    def __post_init__(self):
        if self.kind not in METHOD_KINDS:
            raise ValueError(f"unknown method {self.kind!r}, expected one of {METHOD_KINDS}")
        if self.kind != FIXED and self.groups:
            raise ValueError(f"method {self.kind!r} does not take fixed groups")
        if self.kind == FIXED and not self.groups:
            raise ValueError("the fixed method needs at least one group id")

    @classmethod
    def parse(cls, text: str, groups: str | None = None) -> "MethodSpec":
        """Parse ``raw``, ``standardized``, ``fixed:AY,YH`` or ``fixed`` + groups arg."""
        kind, _, inline = text.strip().partition(":")
        kind = kind.strip().lower()
        parts = [g.strip() for g in (inline or groups or "").split(",") if g.strip()]
        return cls(kind=kind, groups=tuple(parts))

    @property
    def label(self) -> str:
        if self.kind == RAW:
            return "Raw"
        if self.kind == STANDARDIZED:
            return "Stand."
        return "Fixed: " + ",".join(self.groups)


@dataclass(frozen=True)
class ForecastRun:
    """Everything one method variant produced on one snapshot."""

    method: MethodSpec
    votes: dict[str, float]  # forecast vote counts per current party (post-fix)
    seats: dict[str, int]
    vote_share: dict[str, float]
    total_devices: int
    prior_devices: int  # devices usable for standardization
    house_size: int


def default_method_suite(registry: PartyRegistry) -> list[MethodSpec]:
    """Raw, standardized, and the escalating fixed-group combinations.

    With groups (g1..gn) the fixed variants pin g1 alone, then everything but
    the last group, then all of them.
    """
    methods = [MethodSpec(RAW), MethodSpec(STANDARDIZED)]
    group_ids = tuple(g.id for g in registry.fixed_groups)
    lengths = sorted({1, max(len(group_ids) - 1, 1), len(group_ids)})
    for length in lengths:
        if group_ids:
            methods.append(MethodSpec(FIXED, group_ids[:length]))
    return methods


def run_forecast(
    records: Iterable[VoteRecord],
    registry: PartyRegistry,
    official: OfficialResults | None,
    method: MethodSpec,
    *,
    house_size: int | None = None,
    threshold=None,
    floor: int = DEFAULT_SMALL_CLASS_FLOOR,
) -> ForecastRun:
    """Run one method variant over a vote-log snapshot.

    ``house_size`` and ``threshold`` default to the registry's current
    election; passing them overrides the config for what-if runs.
    """
    election = registry.election(registry.current_election)
    house = election.house_size if house_size is None else house_size
    cutoff = election.threshold_fraction if threshold is None else threshold

    latest = bias.latest_votes(records)
    total_devices = len(latest)
    prior_devices = sum(
        1
        for r in latest.values()
        if r.prior_party is not None and r.prior_party != registry.abstention_code
    )

    current_codes = registry.codes_of(registry.current_election)
    if method.kind == RAW:
        tallies = bias.raw_forecast(latest)
        votes = {code: tallies.get(code, 0) for code in current_codes}
    else:
        if official is None:
            raise ValueError("standardized methods need the official prior-election results")
        counts = bias.build_counts(latest, registry)
        if counts.total() == 0:
            raise InsufficientPriorDataError(
                "no respondents disclosed a usable prior vote"
            )
        transition = bias.normalize(counts)
        results = bias.build_results_vector(official.counts, transition)
        votes = bias.forecast(transition, results)
        if method.kind == FIXED:
            groups = [registry.group(g) for g in method.groups]
            votes = bias.apply_group_fixes(votes, groups, official.counts)

    allocation = allocate_seats(votes, house, cutoff)
    as_float = {code: float(v) for code, v in votes.items()}
    total_votes = sum(as_float.values())
    share = {code: v / total_votes for code, v in as_float.items()}
    return ForecastRun(
        method=method,
        votes=as_float,
        seats=allocation.seats,
        vote_share=share,
        total_devices=total_devices,
        prior_devices=prior_devices,
        house_size=house,
    )
