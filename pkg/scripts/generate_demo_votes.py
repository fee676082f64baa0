#!/usr/bin/env python3
"""Regenerate fixtures/demo_votes.jsonl, the committed synthetic vote log.

Deterministic (seeded). Roughly a third of the devices disclose their prior
vote; a slice of those abstained; Ale Yarok is heavily over-represented
relative to its official prior votes, so pinning its group visibly moves the
seat table. About one device in ten changes its vote later.
"""

import json
import sys
from datetime import datetime, timedelta, timezone
from pathlib import Path

import numpy as np

REPO = Path(__file__).resolve().parent.parent
OUT = REPO / "fixtures" / "demo_votes.jsonl"

REGIONS = ["JERUSALEM", "NORTH", "HAIFA", "CENTER", "TEL_AVIV", "SOUTH", "JUDEA_SAMARIA"]

CURRENT = [
    "MAHANE_ZIONI", "LIKUD", "YESH_ATID", "BAYIT_YEHUDI", "YACHAD", "MERETZ",
    "ARAB_UNION", "KULANU", "ALE_YAROK", "SHAS", "YAHADUT_HATORA", "ISRAEL_BEYTENU",
]

# Sampled vote-intention shares: deliberately skewed toward parties with
# active online supporters (Ale Yarok, Meretz, Yachad) and away from the
# sectorial parties, mimicking an opt-in online sample.
CURRENT_SHARES = [0.23, 0.13, 0.12, 0.09, 0.08, 0.10, 0.02, 0.05, 0.09, 0.03, 0.015, 0.045]

# Prior-vote distribution conditioned on the 2015 choice (who discloses what).
PRIOR_GIVEN_CURRENT = {
    "MAHANE_ZIONI": {"AVODA": 0.45, "HATNUA": 0.2, "YESH_ATID": 0.15, "KADIMA": 0.1, "MERETZ": 0.1},
    "LIKUD": {"LIKUD_BEYTENU": 0.85, "SHAS": 0.05, "BAYIT_YEHUDI": 0.1},
    "YESH_ATID": {"YESH_ATID": 0.8, "KADIMA": 0.1, "LIKUD_BEYTENU": 0.1},
    "BAYIT_YEHUDI": {"BAYIT_YEHUDI": 0.75, "LIKUD_BEYTENU": 0.2, "YAHADUT_HATORA": 0.05},
    "YACHAD": {"SHAS": 0.4, "OZMA_LAAM": 0.3, "LIKUD_BEYTENU": 0.2, "AM_SHALEM": 0.1},
    "MERETZ": {"MERETZ": 0.75, "AVODA": 0.15, "HATNUA": 0.1},
    "ARAB_UNION": {"HADASH": 0.4, "RAAM_TAAL": 0.35, "BALAD": 0.25},
    "KULANU": {"LIKUD_BEYTENU": 0.5, "YESH_ATID": 0.3, "KADIMA": 0.2},
    "ALE_YAROK": {"ALE_YAROK": 0.6, "MERETZ": 0.2, "YESH_ATID": 0.2},
    "SHAS": {"SHAS": 0.9, "AM_SHALEM": 0.1},
    "YAHADUT_HATORA": {"YAHADUT_HATORA": 1.0},
    "ISRAEL_BEYTENU": {"LIKUD_BEYTENU": 0.9, "YESH_ATID": 0.1},
}

N_DEVICES = 900
DISCLOSE_RATE = 0.36
ABSTAINED_SHARE = 0.08  # of disclosers
REVOTE_RATE = 0.1
START = datetime(2015, 2, 14, 8, 0, 0, tzinfo=timezone.utc)


def main() -> int:
    rng = np.random.default_rng(20150317)
    lines = []
    clock = START
    for i in range(N_DEVICES):
        device = f"dev-{i:04d}"
        current = rng.choice(CURRENT, p=CURRENT_SHARES)
        prior = None
        if rng.random() < DISCLOSE_RATE:
            if rng.random() < ABSTAINED_SHARE:
                prior = "ABSTAINED"
            else:
                table = PRIOR_GIVEN_CURRENT[current]
                prior = rng.choice(list(table), p=list(table.values()))
        region = str(rng.choice(REGIONS)) if rng.random() < 0.7 else None
        clock += timedelta(minutes=int(rng.integers(3, 90)))
        lines.append(
            {
                "device_id": device,
                "ts": clock.strftime("%Y-%m-%dT%H:%M:%SZ"),
                "party_2015": str(current),
                "party_2013": prior,
                "region": region,
            }
        )
        if rng.random() < REVOTE_RATE:
            clock += timedelta(minutes=int(rng.integers(60, 4000)))
            lines.append(
                {
                    "device_id": device,
                    "ts": clock.strftime("%Y-%m-%dT%H:%M:%SZ"),
                    "party_2015": str(rng.choice(CURRENT, p=CURRENT_SHARES)),
                    "party_2013": None,  # inherits the earlier disclosure
                    "region": region,
                }
            )

    lines.sort(key=lambda doc: doc["ts"])
    with open(OUT, "w", encoding="utf-8") as fh:
        for doc in lines:
            fh.write(json.dumps(doc, ensure_ascii=False) + "\n")
    print(f"wrote {len(lines)} events to {OUT}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
