"""Sample-bias correction pipeline.

Dedup the vote log to one effective vote per device, tally a counts matrix
between prior and current parties, column-normalize it into a transition
matrix, anchor it to the official prior-election results, and read off the
forecast. Equivalently, each respondent who disclosed prior party j carries
the weight v[j]/c[j]: the weighted sample agrees with the official results.

Respondents who abstained (or said nothing) about the prior election are
excluded from the standardized forecast but still counted in the raw one;
turnout change is deliberately not modeled.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, replace
from datetime import datetime
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

import numpy as np

from .registry import FixedGroup, PartyRegistry

#: Weight classes smaller than this many respondents get flagged (never rejected).
DEFAULT_SMALL_CLASS_FLOOR = 30


class InsufficientPriorDataError(ValueError):
    """No usable prior-vote disclosures to standardize on."""


@dataclass(frozen=True)
class VoteRecord:
    """One vote event. ``seq`` is the storage sequence number when known."""

    device_id: str
    timestamp: datetime
    current_party: str
    prior_party: str | None = None
    region: str | None = None
    seq: int | None = None


@dataclass(frozen=True)
class CountsMatrix:
    """Respondent tallies, rows = current parties, columns = prior parties."""

    current_parties: tuple[str, ...]
    prior_parties: tuple[str, ...]
    counts: np.ndarray  # int64, shape (len(current), len(prior))

    def column_totals(self) -> np.ndarray:
        return self.counts.sum(axis=0)

    def total(self) -> int:
        return int(self.counts.sum())


@dataclass(frozen=True)
class TransitionMatrix:
    """Column-stochastic matrix of prior->current vote-change probabilities."""

    current_parties: tuple[str, ...]
    prior_parties: tuple[str, ...]
    probabilities: np.ndarray  # float64, same shape as the counts matrix
    column_support: frozenset[str]


@dataclass(frozen=True)
class WeightClass:
    respondents: int
    weight: float
    flagged: bool


@dataclass(frozen=True)
class WeightTable:
    """Per prior-party respondent counts and calibration weights."""

    classes: dict[str, WeightClass]
    floor: int


def _order_key(position: int, record: VoteRecord) -> tuple[datetime, int]:
    # Timestamp decides; equal timestamps fall back to storage order because
    # client clocks are untrusted.
    return (record.timestamp, record.seq if record.seq is not None else position)


def latest_votes(log: Iterable[VoteRecord]) -> dict[str, VoteRecord]:
    """Effective vote per device: the latest record, with the prior vote merged.

    A later record that did not restate the prior vote inherits the device's
    most recent disclosed prior (the abstention code counts as a disclosure).
    """
    ordered = sorted(enumerate(log), key=lambda item: _order_key(item[0], item[1]))
    latest: dict[str, VoteRecord] = {}
    known_prior: dict[str, str] = {}
    for _, record in ordered:
        latest[record.device_id] = record
        if record.prior_party is not None:
            known_prior[record.device_id] = record.prior_party
    for device, record in latest.items():
        if record.prior_party is None and device in known_prior:
            latest[device] = replace(record, prior_party=known_prior[device])
    return latest


def build_counts(latest: Mapping[str, VoteRecord], registry: PartyRegistry) -> CountsMatrix:
    """Tally devices with a known, non-abstention prior vote.

    Devices that abstained in the prior election or never disclosed are left
    out entirely; the raw forecast still sees them.
    """
    current = registry.codes_of(registry.current_election)
    prior = registry.codes_of(registry.prior_election)
    row = {code: i for i, code in enumerate(current)}
    col = {code: j for j, code in enumerate(prior)}
    counts = np.zeros((len(current), len(prior)), dtype=np.int64)
    for record in latest.values():
        if record.prior_party is None or record.prior_party == registry.abstention_code:
            continue
        try:
            counts[row[record.current_party], col[record.prior_party]] += 1
        except KeyError as exc:
            raise KeyError(
                f"vote record for device {record.device_id!r} references unknown party {exc}"
            ) from exc
    return CountsMatrix(current_parties=current, prior_parties=prior, counts=counts)


def normalize(counts: CountsMatrix) -> TransitionMatrix:
    """Divide each nonzero column by its total; empty columns stay zero."""
    totals = counts.column_totals()
    probabilities = np.zeros(counts.counts.shape, dtype=np.float64)
    np.divide(counts.counts, totals, where=totals > 0, out=probabilities)
    support = frozenset(
        code for code, total in zip(counts.prior_parties, totals) if total > 0
    )
    return TransitionMatrix(
        current_parties=counts.current_parties,
        prior_parties=counts.prior_parties,
        probabilities=probabilities,
        column_support=support,
    )


def build_results_vector(
    official: Mapping[str, int], transition: TransitionMatrix
) -> dict[str, int]:
    """Restrict official prior-election counts to parties the sample can speak for.

    Prior parties with no respondents are dropped (they would get infinite
    weight); zero-vote entries are dropped too. Invalid/discarded official
    rows never reach this point, the results parser removes them.
    """
    restricted = {
        code: official[code]
        for code in transition.prior_parties
        if code in transition.column_support and official.get(code, 0) > 0
    }
    if not restricted:
        raise InsufficientPriorDataError(
            "official results share no parties with the respondent sample"
        )
    return restricted


def forecast(transition: TransitionMatrix, results: Mapping[str, "int | float"]) -> dict[str, float]:
    """Predicted current-election vote counts: the transition matrix applied to v.

    The total is conserved because supported columns each sum to one.
    """
    unknown = set(results) - transition.column_support
    if unknown:
        raise ValueError(
            "dimension mismatch: results vector entries outside the transition "
            f"matrix support: {sorted(unknown)}"
        )
    vector = np.zeros(len(transition.prior_parties), dtype=np.float64)
    for j, code in enumerate(transition.prior_parties):
        if code in results:
            vector[j] = results[code]
    predicted = transition.probabilities @ vector
    return dict(zip(transition.current_parties, predicted.tolist()))


def respondent_weights(
    counts: CountsMatrix,
    results: Mapping[str, "int | float"],
    floor: int = DEFAULT_SMALL_CLASS_FLOOR,
) -> WeightTable:
    """Weight v[j]/c[j] per prior-party class, flagging classes below the floor.

    Small classes get high-variance weights; the flag is a warning, never an
    error.
    """
    totals = dict(zip(counts.prior_parties, counts.column_totals().tolist()))
    classes: dict[str, WeightClass] = {}
    for code, official_count in results.items():
        respondents = int(totals.get(code, 0))
        if respondents <= 0:
            raise InsufficientPriorDataError(
                f"no respondents disclosed prior party {code!r}; restrict the "
                "results vector to the sample support first"
            )
        classes[code] = WeightClass(
            respondents=respondents,
            weight=official_count / respondents,
            flagged=respondents < floor,
        )
    return WeightTable(classes=classes, floor=floor)


def raw_forecast(latest: Mapping[str, VoteRecord]) -> dict[str, int]:
    """Plain vote counts per current party, no prior-vote requirement."""
    return dict(Counter(record.current_party for record in latest.values()))


def apply_group_fixes(
    forecast_votes: Mapping[str, "int | float | Fraction"],
    groups: Sequence[FixedGroup],
    official: Mapping[str, int],
) -> dict:
    """Pin each group's current-party total to its official prior-election total.

    Group members are rescaled in proportion to their pre-fix forecast shares
    (an all-zero group splits the target equally); everything outside the
    groups is untouched. Fixed entries come back as exact rationals so the
    pinned totals hold exactly.
    """
    claimed: dict[str, str] = {}
    for group in groups:
        for code in group.current_parties:
            if code in claimed:
                raise ValueError(
                    f"overlapping fixed groups: {code!r} is in both "
                    f"{claimed[code]!r} and {group.id!r}"
                )
            claimed[code] = group.id

    fixed = dict(forecast_votes)
    for group in groups:
        missing = sorted(p for p in group.prior_parties if p not in official)
        if missing:
            raise ValueError(f"group {group.id!r}: no official counts for {missing}")
        absent = sorted(c for c in group.current_parties if c not in fixed)
        if absent:
            raise ValueError(f"group {group.id!r}: not in the forecast vector: {absent}")
        target = Fraction(sum(official[p] for p in group.prior_parties))
        members = sorted(group.current_parties)
        shares = {code: Fraction(fixed[code]) for code in members}
        pool = sum(shares.values())
        if pool == 0:
            for code in members:
                fixed[code] = target / len(members)
        else:
            for code in members:
                fixed[code] = target * shares[code] / pool
    return fixed
