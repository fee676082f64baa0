from datetime import datetime, timedelta, timezone
from pathlib import Path

import pytest

from pollcast.bias import VoteRecord
from pollcast.ingest import load_official_results
from pollcast.registry import (
    Election,
    FixedGroup,
    Party,
    PartyRegistry,
    decimal_fraction,
    load_registry,
)

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"

T0 = datetime(2015, 3, 1, 12, 0, 0, tzinfo=timezone.utc)


@pytest.fixture(scope="session")
def registry():
    return load_registry(FIXTURES / "registry_2015.json")


@pytest.fixture(scope="session")
def official():
    results, errors = load_official_results(FIXTURES / "official_2013.csv", "2013")
    assert not errors
    return results


@pytest.fixture(scope="session")
def demo_votes_path():
    return FIXTURES / "demo_votes.jsonl"


def make_registry(
    current_codes,
    prior_codes,
    groups=(),
    threshold="0.0325",
    house_size=120,
    abstention="ABSTAINED",
):
    """Small synthetic registry for unit tests."""
    parties = [Party(code=c, election="cur", display_name=c) for c in current_codes]
    parties += [Party(code=p, election="pri", display_name=p) for p in prior_codes]
    return PartyRegistry(
        elections=(
            Election(id="pri", house_size=house_size, threshold_fraction=decimal_fraction("0.02")),
            Election(id="cur", house_size=house_size, threshold_fraction=decimal_fraction(threshold)),
        ),
        parties=tuple(parties),
        fixed_groups=tuple(
            FixedGroup(id=g[0], prior_parties=frozenset(g[1]), current_parties=frozenset(g[2]))
            for g in groups
        ),
        abstention_code=abstention,
        current_election="cur",
        prior_election="pri",
    )


def rec(device, minutes, current, prior=None, region=None, seq=None):
    """Shorthand VoteRecord at T0 + minutes."""
    return VoteRecord(
        device_id=device,
        timestamp=T0 + timedelta(minutes=minutes),
        current_party=current,
        prior_party=prior,
        region=region,
        seq=seq,
    )
