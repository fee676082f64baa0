"""Append-only vote store with crash-safe recovery, snapshots, and export.

One writer, many readers. Every append is flushed and fsynced before the
sequence number is handed back, so an acknowledged event survives a crash.
A torn tail (the process died mid-write, before acknowledging) is silently
truncated on the next open; torn data anywhere else is corruption and
refuses to load.
"""

from __future__ import annotations

import hashlib
import hmac
import json
import os
import threading
from dataclasses import dataclass, replace
from datetime import datetime, timezone
from pathlib import Path
from typing import Sequence, TextIO

from .bias import VoteRecord
from .ingest import format_timestamp, parse_timestamp


class CorruptLogError(RuntimeError):
    """The stored log contains a torn or out-of-order record before EOF."""


def _decode_stored_line(raw: bytes) -> VoteRecord:
    doc = json.loads(raw.decode("utf-8"))
    if not isinstance(doc, dict):
        raise ValueError("expected a JSON object")
    device = doc.get("device_id") or doc.get("pseudonym")
    if not device:
        raise ValueError("missing device id")
    return VoteRecord(
        device_id=device,
        timestamp=parse_timestamp(doc["ts"]),
        current_party=doc["party_2015"],
        prior_party=doc.get("party_2013"),
        region=doc.get("region"),
        seq=int(doc["seq"]),
    )


class VoteStore:
    """File-backed append-only event log with snapshot isolation.

    Appends are serialized by an internal lock; snapshots are immutable
    tuples, so readers never observe a torn or partially applied event.
    """

    def __init__(self, path: str | Path):
        self._path = Path(path)
        self._lock = threading.Lock()
        self._records: list[VoteRecord] = []
        self._recover()
        self._fh = open(self._path, "ab")

    def _recover(self) -> None:
        if not self._path.exists():
            self._path.touch()
            return
        data = self._path.read_bytes()
        offset = 0
        good_length = 0
        last_seq = 0
        line_no = 0
        while offset < len(data):
            newline = data.find(b"\n", offset)
            if newline == -1:
                break  # torn tail: written but never acknowledged
            line_no += 1
            raw = data[offset:newline]
            try:
                record = _decode_stored_line(raw)
            except (ValueError, KeyError, TypeError) as exc:
                raise CorruptLogError(
                    f"corrupt record at byte offset {offset} (line {line_no}): {exc}"
                ) from exc
            if record.seq <= last_seq:
                raise CorruptLogError(
                    f"corrupt record at byte offset {offset} (line {line_no}): "
                    f"sequence {record.seq} does not increase past {last_seq}"
                )
            last_seq = record.seq
            self._records.append(record)
            offset = newline + 1
            good_length = offset
        if good_length < len(data):
            # Drop the unacknowledged tail so the next append starts clean.
            with open(self._path, "r+b") as fh:
                fh.truncate(good_length)

    @property
    def path(self) -> Path:
        return self._path

    @property
    def high_water(self) -> int:
        with self._lock:
            return self._records[-1].seq if self._records else 0

    def append(self, record: VoteRecord) -> int:
        """Durably append one event and return its sequence number.

        The caller is responsible for having validated the record against the
        registry; storage failures surface as OSError and are retryable.
        """
        with self._lock:
            seq = (self._records[-1].seq if self._records else 0) + 1
            stored = replace(record, seq=seq)
            line = _serialize_stored(stored)
            self._fh.write(line.encode("utf-8"))
            self._fh.flush()
            os.fsync(self._fh.fileno())
            self._records.append(stored)
            return seq

    def snapshot(self) -> tuple[tuple[VoteRecord, ...], int]:
        """An immutable prefix of the log plus its high-water sequence number."""
        with self._lock:
            records = tuple(self._records)
            return records, (records[-1].seq if records else 0)

    def close(self) -> None:
        with self._lock:
            if not self._fh.closed:
                self._fh.flush()
                os.fsync(self._fh.fileno())
                self._fh.close()

    def __enter__(self) -> "VoteStore":
        return self

    def __exit__(self, *exc_info) -> None:
        self.close()


def _serialize_stored(record: VoteRecord) -> str:
    doc = {
        "seq": record.seq,
        "device_id": record.device_id,
        "ts": format_timestamp(record.timestamp),
        "party_2015": record.current_party,
        "party_2013": record.prior_party,
        "region": record.region,
    }
    return json.dumps(doc, ensure_ascii=False) + "\n"


# --- Obfuscated export -----------------------------------------------------

GRANULARITIES = ("minute", "hour", "day", "month")


@dataclass(frozen=True)
class ExportConfig:
    """Obfuscation settings: pseudonym salt, timestamp granularity, region handling."""

    salt: str
    granularity: str = "day"
    region_mode: str = "keep"  # or "drop"

    def __post_init__(self):
        if self.granularity not in GRANULARITIES:
            raise ValueError(f"granularity must be one of {GRANULARITIES}")
        if self.region_mode not in ("keep", "drop"):
            raise ValueError("region_mode must be 'keep' or 'drop'")
        if not self.salt:
            raise ValueError("an export salt is required")


def pseudonymize(device_id: str, salt: str) -> str:
    """Salted one-way pseudonym, stable within one export."""
    digest = hmac.new(salt.encode("utf-8"), device_id.encode("utf-8"), hashlib.sha256)
    return digest.hexdigest()[:16]


def truncate_timestamp(ts: datetime, granularity: str) -> str:
    ts = ts.astimezone(timezone.utc)
    if granularity == "minute":
        return ts.strftime("%Y-%m-%dT%H:%M:00Z")
    if granularity == "hour":
        return ts.strftime("%Y-%m-%dT%H:00:00Z")
    if granularity == "day":
        return ts.strftime("%Y-%m-%d")
    if granularity == "month":
        return ts.strftime("%Y-%m-01")
    raise ValueError(f"granularity must be one of {GRANULARITIES}")


def export_obfuscated(
    records: Sequence[VoteRecord], config: ExportConfig, out: TextIO
) -> int:
    """Write the obfuscated JSONL export; returns the record count.

    Device ids become salted pseudonyms, timestamps are truncated, regions
    kept or dropped per config. The sequence number rides along so that
    within-device event order survives the truncation, which is what keeps
    forecasts on the export identical to forecasts on the original.
    """
    count = 0
    for record in records:
        doc = {
            "pseudonym": pseudonymize(record.device_id, config.salt),
            "ts": truncate_timestamp(record.timestamp, config.granularity),
            "party_2015": record.current_party,
            "party_2013": record.prior_party,
            "region": record.region if config.region_mode == "keep" else None,
            "seq": record.seq,
        }
        out.write(json.dumps(doc, ensure_ascii=False) + "\n")
        count += 1
    return count


def export_to_path(
    records: Sequence[VoteRecord], config: ExportConfig, path: str | Path
) -> int:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        return export_obfuscated(records, config, fh)
