import io
import json
import threading

import pytest

from pollcast.bias import latest_votes
from pollcast.ingest import parse_vote_log
from pollcast.store import (
    CorruptLogError,
    ExportConfig,
    VoteStore,
    export_obfuscated,
    pseudonymize,
    truncate_timestamp,
)

from conftest import rec


class TestAppendAndSnapshot:
    def test_first_append_is_sequence_one(self, tmp_path):
        with VoteStore(tmp_path / "log.jsonl") as store:
            assert store.append(rec("x", 0, "A")) == 1
            assert store.high_water == 1

    def test_history_is_retained_not_overwritten(self, tmp_path):
        with VoteStore(tmp_path / "log.jsonl") as store:
            store.append(rec("x", 0, "A"))
            store.append(rec("x", 5, "B"))
            records, mark = store.snapshot()
            assert mark == 2
            assert [r.current_party for r in records] == ["A", "B"]
            assert latest_votes(records)["x"].current_party == "B"

    def test_empty_store_snapshot(self, tmp_path):
        with VoteStore(tmp_path / "log.jsonl") as store:
            assert store.snapshot() == ((), 0)

    def test_snapshot_is_immutable_under_later_appends(self, tmp_path):
        with VoteStore(tmp_path / "log.jsonl") as store:
            store.append(rec("x", 0, "A"))
            snapshot, mark = store.snapshot()
            store.append(rec("y", 1, "B"))
            assert len(snapshot) == 1 and mark == 1

    def test_reopen_preserves_acknowledged_events(self, tmp_path):
        path = tmp_path / "log.jsonl"
        with VoteStore(path) as store:
            store.append(rec("x", 0, "A", prior="P", region="NORTH"))
            store.append(rec("y", 1, "B"))
        with VoteStore(path) as reopened:
            records, mark = reopened.snapshot()
            assert mark == 2
            assert records[0].prior_party == "P"
            assert records[0].region == "NORTH"
            assert reopened.append(rec("z", 2, "A")) == 3

    def test_concurrent_appends_snapshots_are_prefixes(self, tmp_path):
        with VoteStore(tmp_path / "log.jsonl") as store:
            stop = threading.Event()
            def writer():
                for i in range(300):
                    store.append(rec(f"d{i}", i, "A"))
                stop.set()
            thread = threading.Thread(target=writer)
            thread.start()
            try:
                while not stop.is_set():
                    records, mark = store.snapshot()
                    assert [r.seq for r in records] == list(range(1, mark + 1))
            finally:
                thread.join()
            assert store.high_water == 300


class TestCrashRecovery:
    def test_torn_tail_is_discarded_and_truncated(self, tmp_path):
        path = tmp_path / "log.jsonl"
        with VoteStore(path) as store:
            store.append(rec("x", 0, "A"))
        with open(path, "ab") as fh:
            fh.write(b'{"seq": 2, "device_id": "y", "ts": "2015-03-0')  # crash mid-write
        with VoteStore(path) as recovered:
            records, mark = recovered.snapshot()
            assert mark == 1  # the torn event was never acknowledged
            assert recovered.append(rec("y", 1, "B")) == 2
        with VoteStore(path) as reread:
            assert reread.high_water == 2

    def test_torn_record_before_eof_is_corruption(self, tmp_path):
        path = tmp_path / "log.jsonl"
        with VoteStore(path) as store:
            store.append(rec("x", 0, "A"))
            store.append(rec("y", 1, "B"))
        data = path.read_bytes().splitlines(keepends=True)
        path.write_bytes(data[0][: len(data[0]) // 2].rstrip(b"\n") + b"\n" + data[1])
        with pytest.raises(CorruptLogError, match="line 1"):
            VoteStore(path)

    def test_non_increasing_sequence_is_corruption(self, tmp_path):
        path = tmp_path / "log.jsonl"
        line = {"seq": 5, "device_id": "x", "ts": "2015-03-01T10:00:00Z",
                "party_2015": "A", "party_2013": None, "region": None}
        with open(path, "w") as fh:
            fh.write(json.dumps(line) + "\n")
            fh.write(json.dumps({**line, "seq": 5}) + "\n")
        with pytest.raises(CorruptLogError, match="sequence"):
            VoteStore(path)


class TestObfuscatedExport:
    def test_day_truncation(self):
        record = rec("x", 0, "A")
        assert truncate_timestamp(record.timestamp, "day") == "2015-03-01"

    def test_granularities(self):
        from pollcast.ingest import parse_timestamp

        ts = parse_timestamp("2015-03-16T14:22:07Z")
        assert truncate_timestamp(ts, "minute") == "2015-03-16T14:22:00Z"
        assert truncate_timestamp(ts, "hour") == "2015-03-16T14:00:00Z"
        assert truncate_timestamp(ts, "day") == "2015-03-16"
        assert truncate_timestamp(ts, "month") == "2015-03-01"

    def test_pseudonyms_are_stable_within_a_salt(self):
        assert pseudonymize("dev-1", "salt-a") == pseudonymize("dev-1", "salt-a")
        assert pseudonymize("dev-1", "salt-a") != pseudonymize("dev-2", "salt-a")

    def test_different_salts_give_disjoint_mappings(self):
        devices = [f"dev-{i}" for i in range(200)]
        first = {pseudonymize(d, "salt-a") for d in devices}
        second = {pseudonymize(d, "salt-b") for d in devices}
        assert first.isdisjoint(second)

    def test_export_schema(self, tmp_path):
        with VoteStore(tmp_path / "log.jsonl") as store:
            store.append(rec("x", 0, "A", prior="P", region="NORTH"))
            store.append(rec("x", 60 * 24, "B"))
            records, _ = store.snapshot()
        out = io.StringIO()
        count = export_obfuscated(records, ExportConfig(salt="s3cret"), out)
        assert count == 2
        lines = [json.loads(line) for line in out.getvalue().splitlines()]
        assert lines[0]["ts"] == "2015-03-01"
        assert lines[1]["ts"] == "2015-03-02"
        assert lines[0]["pseudonym"] == lines[1]["pseudonym"]
        assert "device_id" not in lines[0]
        assert lines[0]["seq"] == 1 and lines[1]["seq"] == 2
        assert lines[0]["region"] == "NORTH"

    def test_region_drop_mode(self):
        record = rec("x", 0, "A", region="NORTH", seq=1)
        out = io.StringIO()
        export_obfuscated([record], ExportConfig(salt="s", region_mode="drop"), out)
        assert json.loads(out.getvalue())["region"] is None

    def test_export_reimports_with_preserved_order(self, tmp_path, registry):
        with VoteStore(tmp_path / "log.jsonl") as store:
            store.append(rec("x", 0, "LIKUD", prior="LIKUD_BEYTENU"))
            store.append(rec("x", 30, "MERETZ"))  # same day after truncation
            records, _ = store.snapshot()
        out = io.StringIO()
        export_obfuscated(records, ExportConfig(salt="s"), out)
        reparsed, errors = parse_vote_log(out.getvalue().splitlines(), registry)
        assert errors == []
        effective = latest_votes(reparsed)
        (device,) = effective
        # seq tie-break keeps the later vote on top despite equal day stamps
        assert effective[device].current_party == "MERETZ"
        assert effective[device].prior_party == "LIKUD_BEYTENU"

    def test_salt_is_required(self):
        with pytest.raises(ValueError, match="salt"):
            ExportConfig(salt="")
