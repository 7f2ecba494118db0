import pytest
from hypothesis import given, strategies as st

from tttbudget.audio import (
    DB_PER_BIT,
    AudioPerceptionConstants,
    dynamic_range_db,
    lip_sync_window,
    localization_offset_tolerance,
    min_bits_for_range,
    required_sampling_rate,
)
from tttbudget.exceptions import DomainError
from tttbudget.units import deg
from tttbudget.vision import camera_offset_tolerance


def test_sampling_rate():
    assert required_sampling_rate(20_000.0) == 40_000.0
    assert required_sampling_rate(500.0) == 1_000.0
    assert required_sampling_rate(22_050.0) == 44_100.0
    with pytest.raises(DomainError):
        required_sampling_rate(0.0)


@pytest.mark.parametrize("bits, expected", [(16, 96.33), (24, 144.49), (1, 6.02)])
def test_dynamic_range(bits, expected):
    assert dynamic_range_db(bits) == pytest.approx(expected, abs=0.005)


@pytest.mark.parametrize("bits", [0, 33])
def test_dynamic_range_domain(bits):
    with pytest.raises(DomainError):
        dynamic_range_db(bits)


def _bits_by_search(range_db):
    return next(b for b in range(1, 33) if DB_PER_BIT * b >= range_db)


@pytest.mark.parametrize("range_db, expected", [(96.0, 16), (40.0, 7), (6.0, 1)])
def test_min_bits(range_db, expected):
    assert _bits_by_search(range_db) == expected
    assert min_bits_for_range(range_db) == expected


@given(st.floats(0.1, 190.0))
def test_min_bits_matches_exhaustive_search(range_db):
    assert min_bits_for_range(range_db) == _bits_by_search(range_db)


@pytest.mark.parametrize("bits", range(1, 33))
def test_round_trip(bits):
    assert min_bits_for_range(dynamic_range_db(bits)) == bits


@given(st.integers(1, 32), st.integers(1, 32))
def test_dynamic_range_linear(a, b):
    if a + b <= 32:
        assert dynamic_range_db(a + b) == pytest.approx(dynamic_range_db(a) + dynamic_range_db(b), rel=1e-14)


def test_localization():
    assert localization_offset_tolerance(deg(1.0), 2.0) == pytest.approx(0.0349, abs=1e-4)
    assert localization_offset_tolerance(0.0, 2.0) == 0.0
    assert localization_offset_tolerance(deg(1.0), 4.0) == pytest.approx(0.0698, abs=1e-4)


@given(st.floats(0.0, 0.5), st.floats(0.01, 50.0))
def test_localization_matches_camera_tolerance(angle, z):
    assert localization_offset_tolerance(angle, z) == camera_offset_tolerance(angle, z)


class TestLipSync:
    def test_nominal(self):
        w = lip_sync_window(2.0)
        assert w.natural_trail == pytest.approx(5.83e-3, abs=1e-5)
        assert (w.lead_bound, w.lag_bound) == (-0.040, 0.060)
        assert w.recommended_offset == w.natural_trail
        assert not w.violates_imperceptibility

    def test_colocated(self):
        w = lip_sync_window(0.0)
        assert w.natural_trail == 0.0 and w.recommended_offset == 0.0

    def test_trail_reaches_lag_bound(self):
        w = lip_sync_window(0.060 * 343.0)
        assert w.natural_trail == pytest.approx(0.060, rel=1e-12)
        assert not w.violates_imperceptibility
        assert w.contains(w.recommended_offset)

    def test_too_far_is_flagged_and_clamped(self):
        w = lip_sync_window(40.0)
        assert w.violates_imperceptibility
        assert w.recommended_offset == w.lag_bound

    @given(st.floats(0.0, 100.0))
    def test_offset_always_in_window(self, z):
        w = lip_sync_window(z)
        assert w.lead_bound < 0 < w.lag_bound
        assert w.contains(w.recommended_offset)
        assert w.violates_imperceptibility == (z > w.lag_bound * 343.0)

    def test_custom_speed(self):
        w = lip_sync_window(2.0, AudioPerceptionConstants(speed_of_sound=333.0))
        assert w.natural_trail == pytest.approx(2.0 / 333.0)
