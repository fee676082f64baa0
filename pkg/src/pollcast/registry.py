"""Parties, elections, and the registry that ties them together.

The registry is loaded once from a JSON document and is immutable afterwards,
so it can be shared freely across threads.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

class _AbstainedMarker:
    """Singleton marker for the reserved 'did not vote' prior-vote code."""

    __slots__ = ()

    def __repr__(self) -> str:
        return "ABSTAINED"


#: Returned by :func:`resolve_party` when the code is the abstention code.
ABSTAINED = _AbstainedMarker()


@dataclass(frozen=True)
class Election:
    id: str
    house_size: int
    threshold_fraction: Fraction


@dataclass(frozen=True)
class Party:
    code: str
    election: str
    display_name: str
    group_tags: frozenset[str] = frozenset()


@dataclass(frozen=True)
class FixedGroup:
    """A sectorial bloc whose forecast vote total gets pinned to prior results."""

    id: str
    prior_parties: frozenset[str]
    current_parties: frozenset[str]


@dataclass(frozen=True)
class PartyRegistry:
    elections: tuple[Election, ...]
    parties: tuple[Party, ...]
    fixed_groups: tuple[FixedGroup, ...]
    abstention_code: str
    current_election: str
    prior_election: str

    def election(self, election_id: str) -> Election:
        for election in self.elections:
            if election.id == election_id:
                return election
        raise KeyError(f"unknown election {election_id!r}")

    def parties_of(self, election_id: str) -> tuple[Party, ...]:
        """Parties of one election, in registry (display) order."""
        return tuple(p for p in self.parties if p.election == election_id)

    def codes_of(self, election_id: str) -> tuple[str, ...]:
        return tuple(p.code for p in self.parties_of(election_id))

    def group(self, group_id: str) -> FixedGroup:
        for g in self.fixed_groups:
            if g.id == group_id:
                return g
        raise KeyError(f"unknown fixed group {group_id!r}")


def resolve_party(registry: PartyRegistry, election_id: str, code: str):
    """Resolve a party code within one election.

    Returns the :class:`Party`, the :data:`ABSTAINED` marker for the reserved
    abstention code, or ``None`` when the code is unknown (callers decide
    whether that is an error).
    """
    if code == registry.abstention_code:
        return ABSTAINED
    for party in registry.parties:
        if party.election == election_id and party.code == code:
            return party
    return None


def validate_registry(registry: PartyRegistry) -> list[str]:
    """Collect every invariant violation; an empty list means the registry is valid.

    Violations are data, not failures: the same registry always yields the
    same report, in the same order.
    """
    violations: list[str] = []
    election_ids = [e.id for e in registry.elections]

    for i, election in enumerate(registry.elections):
        if election_ids.count(election.id) > 1:
            violations.append(f"elections[{i}]: duplicate election id {election.id!r}")
        if election.house_size < 1:
            violations.append(
                f"elections[{election.id}]: house_size must be >= 1, got {election.house_size}"
            )
        if not (0 <= election.threshold_fraction < 1):
            violations.append(
                f"elections[{election.id}]: threshold_fraction must be in [0, 1), "
                f"got {election.threshold_fraction}"
            )

    for role, election_id in (
        ("current_election", registry.current_election),
        ("prior_election", registry.prior_election),
    ):
        if election_id not in election_ids:
            violations.append(f"{role}: unknown election {election_id!r}")
    if registry.current_election == registry.prior_election:
        violations.append("current_election and prior_election must differ")

    seen: set[tuple[str, str]] = set()
    for i, party in enumerate(registry.parties):
        if party.election not in election_ids:
            violations.append(f"parties[{i}]: unknown election {party.election!r}")
        key = (party.election, party.code)
        if key in seen:
            violations.append(
                f"parties[{i}]: duplicate code {party.code!r} in election {party.election!r}"
            )
        seen.add(key)
        if party.code == registry.abstention_code:
            violations.append(
                f"parties[{i}]: code {party.code!r} collides with the abstention code"
            )

    prior_codes = set(registry.codes_of(registry.prior_election))
    current_codes = set(registry.codes_of(registry.current_election))
    group_ids = [g.id for g in registry.fixed_groups]
    claimed_prior: dict[str, str] = {}
    claimed_current: dict[str, str] = {}
    for g in registry.fixed_groups:
        where = f"fixed_groups[{g.id}]"
        if group_ids.count(g.id) > 1:
            violations.append(f"{where}: duplicate group id")
        if not g.prior_parties:
            violations.append(f"{where}.prior_parties: must not be empty")
        if not g.current_parties:
            violations.append(f"{where}.current_parties: must not be empty")
        for code in sorted(g.prior_parties):
            if code not in prior_codes:
                violations.append(f"{where}.prior_parties: unknown code {code!r}")
            elif code in claimed_prior:
                violations.append(
                    f"{where}.prior_parties: overlapping prior_parties, "
                    f"{code!r} already claimed by group {claimed_prior[code]!r}"
                )
            else:
                claimed_prior[code] = g.id
        for code in sorted(g.current_parties):
            if code not in current_codes:
                violations.append(f"{where}.current_parties: unknown code {code!r}")
            elif code in claimed_current:
                violations.append(
                    f"{where}.current_parties: overlapping current_parties, "
                    f"{code!r} already claimed by group {claimed_current[code]!r}"
                )
            else:
                claimed_current[code] = g.id

    return violations


def decimal_fraction(value) -> Fraction:
    """Turn a config-supplied number into an exact fraction.

    Floats are interpreted as the decimal literal they round-trip to
    (``0.0325`` means 13/400, not the nearest binary double), because
    thresholds are human-entered decimals, not measured data.
    """
    if isinstance(value, float):
        return Fraction(str(value))
    return Fraction(value)


def parse_registry(doc: dict) -> PartyRegistry:
    """Build a registry from a parsed JSON document. Structural errors raise ValueError."""
    try:
        elections = tuple(
            Election(
                id=str(e["id"]),
                house_size=int(e["house_size"]),
                threshold_fraction=decimal_fraction(e["threshold_fraction"]),
            )
            for e in doc["elections"]
        )
        groups = tuple(
            FixedGroup(
                id=str(g["id"]),
                prior_parties=frozenset(g["prior_parties"]),
                current_parties=frozenset(g["current_parties"]),
            )
            for g in doc.get("fixed_groups", ())
        )
        parties = []
        for p in doc["parties"]:
            code = str(p["code"])
            declared = frozenset(p.get("group_tags", ()))
            derived = frozenset(
                g.id for g in groups if code in g.prior_parties or code in g.current_parties
            )
            parties.append(
                Party(
                    code=code,
                    election=str(p["election"]),
                    display_name=str(p.get("display_name", code)),
                    group_tags=declared | derived,
                )
            )
        return PartyRegistry(
            elections=elections,
            parties=tuple(parties),
            fixed_groups=groups,
            abstention_code=str(doc["abstention_code"]),
            current_election=str(doc["current_election"]),
            prior_election=str(doc["prior_election"]),
        )
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed registry document: {exc}") from exc


def load_registry(path: str | Path) -> PartyRegistry:
    with open(path, encoding="utf-8") as fh:
        return parse_registry(json.load(fh))
