"""Live polling and election forecasting with prior-vote bias correction."""

from .apportion import EmptyElectorateError, SeatAllocation, allocate_seats, apply_threshold, dhondt_oracle
from .bias import (
    CountsMatrix,
    InsufficientPriorDataError,
    TransitionMatrix,
    VoteRecord,
    WeightTable,
    apply_group_fixes,
    build_counts,
    build_results_vector,
    forecast,
    latest_votes,
    normalize,
    raw_forecast,
    respondent_weights,
)
from .ingest import OfficialResults, ParseError, parse_official_results, parse_vote_log
from .pipeline import ForecastRun, MethodSpec, default_method_suite, run_forecast
from .registry import (
    ABSTAINED,
    Election,
    FixedGroup,
    Party,
    PartyRegistry,
    load_registry,
    parse_registry,
    resolve_party,
    validate_registry,
)
from .store import CorruptLogError, ExportConfig, VoteStore, export_obfuscated

__version__ = "0.1.0"
