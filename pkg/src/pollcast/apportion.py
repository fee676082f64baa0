"""Seat apportionment: quota-floor allocation plus highest-averages remainders.

The house index is the total qualifying vote divided by the house size; each
party first receives the floor of votes/index, then remaining seats go one at
a time to the party with the highest votes/(seats+1) quotient. With the
tie-breaking rule below this is exactly equivalent to a pure sequential
highest-averages (D'Hondt) allocation, which :func:`dhondt_oracle` implements
independently as a cross-check. Surplus vote agreements are not supported.

All arithmetic is exact: vote values convert to `Fraction` by value (a float
is the dyadic rational it already is), threshold fractions convert by their
decimal literal. No epsilon comparisons, no platform-dependent ties.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

from .registry import decimal_fraction

Votes = Mapping[str, "int | float | Fraction"]


class EmptyElectorateError(ValueError):
    """The vote vector contains no votes at all."""


@dataclass(frozen=True)
class SeatAllocation:
    seats: dict[str, int]
    house_size: int


def _exact_votes(votes: Votes) -> dict[str, Fraction]:
    exact: dict[str, Fraction] = {}
    for code, value in votes.items():
        if isinstance(value, float) and not math.isfinite(value):
            raise ValueError(f"vote count for {code!r} is not finite: {value!r}")
        rational = Fraction(value)
        if rational < 0:
            raise ValueError(f"vote count for {code!r} is negative: {value!r}")
        exact[code] = rational
    return exact


def apply_threshold(votes: Votes, threshold_fraction) -> set[str]:
    """Party codes whose vote count reaches the electoral threshold.

    A party qualifies iff it has any votes and its count is >= the threshold
    fraction of the grand total (the boundary is inclusive).
    """
    fraction = decimal_fraction(threshold_fraction)
    if not (0 <= fraction < 1):
        raise ValueError(f"threshold_fraction must be in [0, 1), got {threshold_fraction!r}")
    exact = _exact_votes(votes)
    total = sum(exact.values())
    if total == 0:
        raise EmptyElectorateError("empty electorate: no votes in the vote vector")
    cutoff = fraction * total
    return {code for code, count in exact.items() if count > 0 and count >= cutoff}


def _beats(challenger: tuple[Fraction, Fraction, str], best: tuple[Fraction, Fraction, str]) -> bool:
    """Highest quotient wins; ties go to the higher raw vote, then the smaller code."""
    if challenger[0] != best[0]:
        return challenger[0] > best[0]
    if challenger[1] != best[1]:
        return challenger[1] > best[1]
    return challenger[2] < best[2]


def allocate_seats(votes: Votes, house_size: int, threshold_fraction) -> SeatAllocation:
    """Allocate the full house among parties passing the threshold.

    Below-threshold parties stay in the result with zero seats. The seat
    total always equals ``house_size``.
    """
    if house_size < 1:
        raise ValueError(f"house_size must be >= 1, got {house_size}")
    qualifying = apply_threshold(votes, threshold_fraction)
    if not qualifying:
        raise ValueError("no party reaches the electoral threshold")

    exact = _exact_votes(votes)
    moded = sum(exact[code] for code in qualifying)
    index = moded / house_size
    seats = {code: 0 for code in votes}
    for code in qualifying:
        seats[code] = int(exact[code] / index)

    contenders = sorted(qualifying)
    for _ in range(house_size - sum(seats.values())):
        best = None
        for code in contenders:
            entry = (exact[code] / (seats[code] + 1), exact[code], code)
            if best is None or _beats(entry, best):
                best = entry
        seats[best[2]] += 1

    return SeatAllocation(seats=seats, house_size=house_size)


def dhondt_oracle(votes: Votes, house_size: int) -> SeatAllocation:
    """Pure sequential highest-averages allocation over qualifying parties.

    Awards every seat one at a time, with the same tie-breaking rule as
    :func:`allocate_seats`. Kept independent so the two can be checked
    against each other.
    """
    if house_size < 1:
        raise ValueError(f"house_size must be >= 1, got {house_size}")
    exact = _exact_votes(votes)
    if not any(exact.values()):
        raise EmptyElectorateError("empty electorate: no votes in the vote vector")

    contenders = sorted(code for code, count in exact.items() if count > 0)
    seats = {code: 0 for code in votes}
    quotient = {code: exact[code] for code in contenders}
    for _ in range(house_size):
        best = contenders[0]
        for code in contenders[1:]:
            if _beats((quotient[code], exact[code], code), (quotient[best], exact[best], best)):
                best = code
        seats[best] += 1
        quotient[best] = exact[best] / (seats[best] + 1)

    return SeatAllocation(seats=seats, house_size=house_size)
