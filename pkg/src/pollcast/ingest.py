"""Parsers for the external file formats.

Vote logs are JSON Lines, one event per line:

    {"device_id": "...", "ts": "2015-03-16T14:22:07Z", "party_2015": "LIKUD",
     "party_2013": null, "region": null}

Obfuscated exports use the same schema with ``pseudonym`` instead of
``device_id`` plus a ``seq`` field. Official results are CSV with the header
``party,votes,valid``; rows flagged ``valid=false`` are the illegal or
discarded votes and are kept out of the usable counts.

Parsing is total: malformed lines turn into positioned errors, never abort
the stream.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from datetime import date, datetime, timezone
from pathlib import Path
from typing import Iterable

from .bias import VoteRecord
from .registry import ABSTAINED, PartyRegistry, resolve_party


@dataclass(frozen=True)
class ParseError:
    line: int  # 1-based line number
    message: str

    def __str__(self) -> str:
        return f"line {self.line}: {self.message}"


def parse_timestamp(text: str) -> datetime:
    """ISO-8601 timestamp to an aware UTC datetime.

    Accepts a trailing ``Z``, an explicit offset, a naive timestamp (taken as
    UTC), or a bare date (midnight UTC) as written by day-granularity exports.
    """
    raw = text.strip()
    if raw.endswith(("Z", "z")):
        raw = raw[:-1] + "+00:00"
    try:
        parsed = datetime.fromisoformat(raw)
    except ValueError:
        try:
            parsed = datetime.combine(date.fromisoformat(raw), datetime.min.time())
        except ValueError:
            raise ValueError(f"bad timestamp {text!r}") from None
    if parsed.tzinfo is None:
        return parsed.replace(tzinfo=timezone.utc)
    return parsed.astimezone(timezone.utc)


def format_timestamp(ts: datetime) -> str:
    if ts.tzinfo is None:
        ts = ts.replace(tzinfo=timezone.utc)
    return ts.astimezone(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


def parse_vote_line(
    line: str, number: int, registry: PartyRegistry
) -> VoteRecord | ParseError:
    """One JSONL vote event; returns a positioned error instead of raising."""
    try:
        doc = json.loads(line)
    except json.JSONDecodeError as exc:
        return ParseError(number, f"invalid JSON: {exc.msg}")
    if not isinstance(doc, dict):
        return ParseError(number, "expected a JSON object")

    device = doc.get("device_id") or doc.get("pseudonym")
    if not device or not isinstance(device, str):
        return ParseError(number, "missing device id")

    ts_raw = doc.get("ts")
    if not isinstance(ts_raw, str):
        return ParseError(number, "missing timestamp")
    try:
        ts = parse_timestamp(ts_raw)
    except ValueError as exc:
        return ParseError(number, str(exc))

    current = doc.get("party_2015")
    resolved = resolve_party(registry, registry.current_election, current) if current else None
    if not isinstance(current, str) or resolved is None or resolved is ABSTAINED:
        return ParseError(number, f"unknown party code {current!r} for the current election")

    prior = doc.get("party_2013")
    if prior is not None:
        if not isinstance(prior, str) or resolve_party(registry, registry.prior_election, prior) is None:
            return ParseError(number, f"unknown party code {prior!r} for the prior election")

    region = doc.get("region")
    if region is not None and not isinstance(region, str):
        return ParseError(number, f"region must be a string, got {region!r}")

    seq = doc.get("seq")
    if seq is not None and not isinstance(seq, int):
        return ParseError(number, f"seq must be an integer, got {seq!r}")

    return VoteRecord(
        device_id=device,
        timestamp=ts,
        current_party=current,
        prior_party=prior,
        region=region,
        seq=seq,
    )


def parse_vote_log(
    lines: Iterable[str], registry: PartyRegistry
) -> tuple[list[VoteRecord], list[ParseError]]:
    """Parse a whole vote log; blank lines are skipped."""
    records: list[VoteRecord] = []
    errors: list[ParseError] = []
    for number, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        parsed = parse_vote_line(line, number, registry)
        if isinstance(parsed, ParseError):
            errors.append(parsed)
        else:
            records.append(parsed)
    return records, errors


def load_vote_log(
    path: str | Path, registry: PartyRegistry
) -> tuple[list[VoteRecord], list[ParseError]]:
    with open(path, encoding="utf-8") as fh:
        return parse_vote_log(fh, registry)


def serialize_vote_record(record: VoteRecord) -> str:
    """The JSONL form of a record; inverse of :func:`parse_vote_line`."""
    doc = {
        "device_id": record.device_id,
        "ts": format_timestamp(record.timestamp),
        "party_2015": record.current_party,
        "party_2013": record.prior_party,
        "region": record.region,
    }
    if record.seq is not None:
        doc["seq"] = record.seq
    return json.dumps(doc, ensure_ascii=False, sort_keys=False)


@dataclass(frozen=True)
class OfficialResults:
    """Official prior-election vote counts, with discarded rows set aside."""

    election: str | None
    counts: dict[str, int]
    discarded: dict[str, int]

    def total(self) -> int:
        return sum(self.counts.values())


_TRUTHY = {"true", "1", "yes", "y"}
_FALSY = {"false", "0", "no", "n"}


def parse_official_results(
    lines: Iterable[str], election: str | None = None
) -> tuple[OfficialResults, list[ParseError]]:
    """Parse the ``party,votes,valid`` CSV. Malformed rows become positioned errors."""
    counts: dict[str, int] = {}
    discarded: dict[str, int] = {}
    errors: list[ParseError] = []

    reader = csv.reader(lines)
    header_seen = False
    for number, row in enumerate(reader, start=1):
        if not row or all(not cell.strip() for cell in row):
            continue
        cells = [cell.strip() for cell in row]
        if not header_seen:
            if [c.lower() for c in cells[:3]] != ["party", "votes", "valid"]:
                errors.append(ParseError(number, "expected header 'party,votes,valid'"))
            header_seen = True
            continue
        if len(cells) < 3:
            errors.append(ParseError(number, f"expected 3 columns, got {len(cells)}"))
            continue
        party, votes_raw, valid_raw = cells[0], cells[1], cells[2].lower()
        if not party:
            errors.append(ParseError(number, "empty party code"))
            continue
        try:
            votes = int(votes_raw)
        except ValueError:
            errors.append(ParseError(number, f"votes must be an integer, got {votes_raw!r}"))
            continue
        if votes < 0:
            errors.append(ParseError(number, f"votes must be non-negative, got {votes}"))
            continue
        if valid_raw not in _TRUTHY | _FALSY:
            errors.append(ParseError(number, f"valid must be true/false, got {cells[2]!r}"))
            continue
        if party in counts or party in discarded:
            errors.append(ParseError(number, f"duplicate party code {party!r}"))
            continue
        if valid_raw in _TRUTHY:
            counts[party] = votes
        else:
            discarded[party] = votes

    return OfficialResults(election=election, counts=counts, discarded=discarded), errors


def load_official_results(
    path: str | Path, election: str | None = None
) -> tuple[OfficialResults, list[ParseError]]:
    with open(path, encoding="utf-8", newline="") as fh:
        return parse_official_results(fh, election)
