from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pollcast.apportion import (
    EmptyElectorateError,
    allocate_seats,
    apply_threshold,
    dhondt_oracle,
)


class TestApplyThreshold:
    def test_simple_cut(self):
        assert apply_threshold({"A": 97, "B": 3}, 0.0325) == {"A"}

    def test_zero_threshold_keeps_every_party_with_votes(self):
        votes = {"A": 5, "B": 1, "C": 0}
        assert apply_threshold(votes, 0) == {"A", "B"}

    def test_boundary_is_inclusive(self):
        # 3.25 == 0.0325 * 100 exactly, because the threshold is read as the
        # decimal 13/400, not as the nearest binary double.
        assert apply_threshold({"A": 96.75, "B": 3.25}, 0.0325) == {"A", "B"}

    def test_all_zero_vector_is_an_error(self):
        with pytest.raises(EmptyElectorateError):
            apply_threshold({"A": 0, "B": 0}, 0.0325)

    def test_negative_votes_rejected(self):
        with pytest.raises(ValueError):
            apply_threshold({"A": -1}, 0)

    def test_monotone_in_threshold(self):
        votes = {"A": 500, "B": 300, "C": 150, "D": 50}
        previous = apply_threshold(votes, 0)
        for fraction in ("0.01", "0.05", "0.1", "0.2", "0.4"):
            qualifying = apply_threshold(votes, Fraction(fraction))
            assert qualifying <= previous
            previous = qualifying


class TestAllocateSeats:
    def test_single_party_takes_the_house(self):
        allocation = allocate_seats({"A": 1000}, 120, 0.0325)
        assert allocation.seats == {"A": 120}

    def test_worked_seven_seat_example(self):
        # Hand-checked: index 840000/7 = 120000; floors A2 B2 C1 D0; the two
        # remaining seats go to A (113333.3) then B (93333.3). E misses 5%.
        votes = {"A": 340_000, "B": 280_000, "C": 160_000, "D": 60_000, "E": 15_000}
        allocation = allocate_seats(votes, 7, 0.05)
        assert allocation.seats == {"A": 3, "B": 3, "C": 1, "D": 0, "E": 0}

    def test_below_threshold_parties_stay_with_zero_seats(self):
        allocation = allocate_seats({"A": 97, "B": 3}, 10, 0.0325)
        assert allocation.seats == {"A": 10, "B": 0}
        assert sum(allocation.seats.values()) == 10

    def test_house_size_must_be_positive(self):
        with pytest.raises(ValueError):
            allocate_seats({"A": 10}, 0, 0)

    def test_no_qualifying_party_is_an_error(self):
        with pytest.raises(ValueError, match="threshold"):
            allocate_seats({"A": 50, "B": 50}, 10, 0.9)

    def test_empty_electorate_propagates(self):
        with pytest.raises(EmptyElectorateError):
            allocate_seats({"A": 0}, 10, 0)

    def test_fractional_votes_allocate_exactly(self):
        # reweighted forecasts are non-integral
        votes = {"A": 420.25, "B": 579.75}
        allocation = allocate_seats(votes, 120, 0)
        assert sum(allocation.seats.values()) == 120
        assert allocation.seats == dhondt_oracle(votes, 120).seats


class TestDhondtOracle:
    def test_single_party(self):
        assert dhondt_oracle({"A": 1000}, 5).seats == {"A": 5}

    def test_hand_enumerated_quotients(self):
        # quotients: A 100 -> seat; A50 vs B50 tie -> A by raw votes; B 50.
        assert dhondt_oracle({"A": 100, "B": 50}, 3).seats == {"A": 2, "B": 1}

    def test_equal_votes_tie_breaks_lexicographically(self):
        assert dhondt_oracle({"B": 100, "A": 100}, 1).seats == {"A": 1, "B": 0}

    def test_zero_vote_party_kept_at_zero(self):
        assert dhondt_oracle({"A": 10, "B": 0}, 4).seats == {"A": 4, "B": 0}


@st.composite
def vote_vectors(draw):
    n = draw(st.integers(min_value=1, max_value=12))
    votes = draw(
        st.lists(st.integers(min_value=0, max_value=10**6), min_size=n, max_size=n)
    )
    if not any(votes):
        votes[0] = 1
    return {f"P{i:02d}": v for i, v in enumerate(votes)}


class TestProperties:
    @settings(max_examples=200, deadline=None)
    @given(votes=vote_vectors(), house=st.integers(min_value=1, max_value=120))
    def test_oracle_equivalence(self, votes, house):
        assert allocate_seats(votes, house, 0).seats == dhondt_oracle(votes, house).seats

    @settings(max_examples=300, deadline=None)
    @given(
        votes=st.dictionaries(
            st.sampled_from([f"P{i}" for i in range(8)]),
            st.integers(min_value=0, max_value=12),  # tiny values provoke ties
            min_size=1,
            max_size=8,
        ),
        house=st.integers(min_value=1, max_value=20),
    )
    def test_oracle_equivalence_under_heavy_ties(self, votes, house):
        if not any(votes.values()):
            votes[next(iter(votes))] = 1
        assert allocate_seats(votes, house, 0).seats == dhondt_oracle(votes, house).seats

    @settings(max_examples=100, deadline=None)
    @given(votes=vote_vectors(), house=st.integers(min_value=1, max_value=120))
    def test_house_conservation(self, votes, house):
        assert sum(allocate_seats(votes, house, 0).seats.values()) == house

    @settings(max_examples=100, deadline=None)
    @given(
        votes=vote_vectors(),
        house=st.integers(min_value=1, max_value=120),
        scale=st.fractions(min_value=Fraction(1, 1000), max_value=Fraction(1000)),
    )
    def test_scale_invariance(self, votes, house, scale):
        scaled = {code: scale * v for code, v in votes.items()}
        assert allocate_seats(votes, house, 0).seats == allocate_seats(scaled, house, 0).seats

    @settings(max_examples=100, deadline=None)
    @given(votes=vote_vectors())
    def test_threshold_monotonicity(self, votes):
        fractions = [Fraction(k, 100) for k in range(0, 50, 7)]
        sets = [apply_threshold(votes, f) for f in fractions]
        for smaller, larger in zip(sets[1:], sets):
            assert smaller <= larger

    def test_determinism(self):
        votes = {"A": 333, "B": 333, "C": 334}
        first = allocate_seats(votes, 100, 0)
        for _ in range(5):
            assert allocate_seats(votes, 100, 0) == first


class TestTieBreaking:
    def test_quotient_tie_prefers_higher_raw_votes(self):
        # A/2 == B/1 == 50 at the second award; B has fewer raw votes.
        seats = dhondt_oracle({"A": 100, "B": 50}, 2).seats
        assert seats == {"A": 2, "B": 0}

    def test_full_tie_prefers_smaller_code_in_both_paths(self):
        votes = {"Z": 100, "M": 100, "A": 100}
        for fn in (lambda: allocate_seats(votes, 2, 0), lambda: dhondt_oracle(votes, 2)):
            seats = fn().seats
            assert seats == {"A": 1, "M": 1, "Z": 0}
