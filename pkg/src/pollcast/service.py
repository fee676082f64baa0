"""The live polling service.

Thin HTTP layer over the store and the forecast pipeline: submit or change a
vote, list parties, fetch any forecast variant, per-device history, and the
regional distribution. Forecasts are computed on immutable snapshots and
cached by (method, groups, high-water mark), so reads never block on writes
and two identical calls between writes return identical responses.
"""

from __future__ import annotations

import threading
import time
from collections import OrderedDict, deque
from dataclasses import dataclass
from datetime import datetime, timezone

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from .apportion import EmptyElectorateError
from .bias import DEFAULT_SMALL_CLASS_FLOOR, InsufficientPriorDataError, VoteRecord, latest_votes
from .ingest import OfficialResults, format_timestamp
from .pipeline import ForecastRun, MethodSpec, run_forecast
from .registry import ABSTAINED, PartyRegistry, resolve_party
from .store import VoteStore


@dataclass
class ServiceConfig:
    small_class_floor: int = DEFAULT_SMALL_CLASS_FLOOR
    rate_limit_enabled: bool = True
    submits_per_minute: int = 30
    forecast_cache_size: int = 32


class ApiError(Exception):
    def __init__(self, status: int, code: str, message: str):
        super().__init__(message)
        self.status = status
        self.code = code
        self.message = message


class VoteSubmission(BaseModel):
    device_id: str
    party: str
    prior_party: str | None = None  # prior-election code or the abstention code
    region: str | None = None


class _RateLimiter:
    """Sliding one-minute window per key; device token and client IP both count."""

    def __init__(self, per_minute: int):
        self.per_minute = per_minute
        self._hits: dict[str, deque] = {}
        self._lock = threading.Lock()

    def allow(self, *keys: str) -> bool:
        now = time.monotonic()
        with self._lock:
            for key in keys:
                window = self._hits.setdefault(key, deque())
                while window and now - window[0] > 60.0:
                    window.popleft()
                if len(window) >= self.per_minute:
                    return False
            for key in keys:
                self._hits[key].append(now)
            return True


class _ForecastCache:
    def __init__(self, size: int):
        self.size = size
        self._entries: OrderedDict[tuple, ForecastRun] = OrderedDict()
        self._lock = threading.Lock()

    def get(self, key: tuple) -> ForecastRun | None:
        with self._lock:
            run = self._entries.get(key)
            if run is not None:
                self._entries.move_to_end(key)
            return run

    def put(self, key: tuple, run: ForecastRun) -> None:
        with self._lock:
            self._entries[key] = run
            self._entries.move_to_end(key)
            while len(self._entries) > self.size:
                self._entries.popitem(last=False)


def _forecast_payload(run: ForecastRun, high_water: int) -> dict:
    return {
        "method": {"kind": run.method.kind, "groups": list(run.method.groups)},
        "house_size": run.house_size,
        "seats": run.seats,
        "vote_share": run.vote_share,
        "sample": {
            "total_devices": run.total_devices,
            "prior_devices": run.prior_devices,
        },
        "high_water": high_water,
    }


def create_app(
    registry: PartyRegistry,
    store: VoteStore,
    official: OfficialResults | None = None,
    config: ServiceConfig | None = None,
    static_dir: "str | None" = None,
) -> FastAPI:
    config = config or ServiceConfig()
    app = FastAPI(title="pollcast", version="0.1.0")
    limiter = _RateLimiter(config.submits_per_minute)
    cache = _ForecastCache(config.forecast_cache_size)

    @app.exception_handler(ApiError)
    async def _api_error(_request: Request, exc: ApiError):
        return JSONResponse(
            status_code=exc.status, content={"code": exc.code, "message": exc.message}
        )

    @app.get("/api/healthz")
    def healthz():
        return {"status": "ok", "high_water": store.high_water}

    @app.get("/api/parties")
    def parties():
        election = registry.current_election
        return {
            "election": election,
            "abstention_code": registry.abstention_code,
            "prior_election": registry.prior_election,
            "parties": [
                {
                    "code": p.code,
                    "display_name": p.display_name,
                    "group_tags": sorted(p.group_tags),
                }
                for p in registry.parties_of(election)
            ],
            "prior_parties": [
                {
                    "code": p.code,
                    "display_name": p.display_name,
                    "group_tags": sorted(p.group_tags),
                }
                for p in registry.parties_of(registry.prior_election)
            ],
        }

    @app.post("/api/votes", status_code=201)
    def submit_vote(submission: VoteSubmission, request: Request):
        if not submission.device_id.strip():
            raise ApiError(400, "bad_request", "missing device id")
        if config.rate_limit_enabled:
            client_ip = request.client.host if request.client else "unknown"
            if not limiter.allow(f"device:{submission.device_id}", f"ip:{client_ip}"):
                raise ApiError(429, "rate_limited", "too many votes, slow down")
        resolved = resolve_party(registry, registry.current_election, submission.party)
        if resolved is None or resolved is ABSTAINED:
            raise ApiError(
                400, "unknown_party", f"unknown party code {submission.party!r}"
            )
        if submission.prior_party is not None:
            prior = resolve_party(registry, registry.prior_election, submission.prior_party)
            if prior is None:
                raise ApiError(
                    400,
                    "unknown_party",
                    f"unknown prior-election party code {submission.prior_party!r}",
                )
        record = VoteRecord(
            device_id=submission.device_id,
            timestamp=datetime.now(timezone.utc),  # server clock is authoritative
            current_party=submission.party,
            prior_party=submission.prior_party,
            region=submission.region,
        )
        try:
            seq = store.append(record)
        except OSError as exc:
            raise ApiError(503, "storage_error", f"vote not stored, retry: {exc}")
        return {
            "seq": seq,
            "device_id": record.device_id,
            "ts": format_timestamp(record.timestamp),
        }

    @app.get("/api/votes/{device_id}/history")
    def history(device_id: str):
        records, _ = store.snapshot()
        events = [
            {
                "seq": r.seq,
                "ts": format_timestamp(r.timestamp),
                "party": r.current_party,
                "prior_party": r.prior_party,
                "region": r.region,
            }
            for r in records
            if r.device_id == device_id
        ]
        return {"device_id": device_id, "events": events}

    @app.get("/api/forecast")
    def forecast(method: str = "raw", groups: str | None = None):
        try:
            spec = MethodSpec.parse(method, groups)
        except ValueError as exc:
            raise ApiError(400, "bad_method", str(exc))
        records, mark = store.snapshot()
        key = (spec.kind, spec.groups, mark)
        run = cache.get(key)
        if run is None:
            try:
                run = run_forecast(
                    records, registry, official, spec, floor=config.small_class_floor
                )
            except KeyError as exc:
                raise ApiError(400, "unknown_group", str(exc.args[0]))
            except InsufficientPriorDataError as exc:
                raise ApiError(409, "insufficient_prior_data", str(exc))
            except EmptyElectorateError as exc:
                raise ApiError(409, "empty_electorate", str(exc))
            except ValueError as exc:
                raise ApiError(400, "bad_request", str(exc))
            cache.put(key, run)
        return _forecast_payload(run, mark)

    @app.get("/api/stats/regions")
    def region_stats():
        records, mark = store.snapshot()
        latest = latest_votes(records)
        regions: dict[str, dict[str, int]] = {}
        for record in latest.values():
            region = record.region if record.region is not None else "unknown"
            per_party = regions.setdefault(region, {})
            per_party[record.current_party] = per_party.get(record.current_party, 0) + 1
        return {"regions": regions, "total_devices": len(latest), "high_water": mark}

    if static_dir is not None:
        # serve the browser client from the same origin; API routes win
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=static_dir, html=True), name="ui")

    return app
