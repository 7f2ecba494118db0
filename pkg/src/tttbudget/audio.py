"""Audio and lip-sync requirements."""

from __future__ import annotations

import math
from dataclasses import dataclass

from ._validation import ceil_count, check_int_range, check_non_negative, check_positive
from .units import deg

DB_PER_BIT = 20.0 * math.log10(2.0)


@dataclass(frozen=True)
class AudioPerceptionConstants:
    audible_max_frequency: float = 20_000.0
    auditory_dynamic_range: float = 140.0
    speech_dynamic_range: float = 40.0
    localization_acuity_horizontal: float = deg(1.0)
    # both limits are magnitudes in seconds; audio leading is the negative side
    lip_sync_lead_limit: float = 0.040
    lip_sync_lag_limit: float = 0.060
    speed_of_sound: float = 343.0

    def __post_init__(self):
        for name in self.__dataclass_fields__:
            check_positive(name, getattr(self, name))


@dataclass(frozen=True)
class LipSyncWindow:
    """Audio-behind-video offsets (seconds) that go unnoticed.

    Negative offsets mean audio leads. `recommended_offset` is the natural
    acoustic trail over the viewing distance, clamped into the window;
    `violates_imperceptibility` is set when clamping was needed.
    """

    lead_bound: float
    lag_bound: float
    natural_trail: float
    recommended_offset: float
    violates_imperceptibility: bool = False

    def contains(self, offset: float) -> bool:
        return self.lead_bound <= offset <= self.lag_bound


def required_sampling_rate(max_frequency: float) -> float:
    check_positive("max_frequency", max_frequency)
    return 2.0 * max_frequency


def dynamic_range_db(bits_per_sample: int) -> float:
    """Theoretical dynamic range of linear PCM, without a dither term."""
    check_int_range("bits_per_sample", bits_per_sample, 1, 32)
    return DB_PER_BIT * bits_per_sample


def min_bits_for_range(range_db: float) -> int:
    check_positive("range_db", range_db)
    return max(1, ceil_count(range_db / DB_PER_BIT))


def localization_offset_tolerance(acuity: float, z: float) -> float:
    """Largest loudspeaker displacement from the rendered mouth position."""
    check_positive("z", z)
    check_non_negative("acuity", acuity)
    return z * math.tan(acuity)


def lip_sync_window(z: float, constants: AudioPerceptionConstants | None = None) -> LipSyncWindow:
    constants = constants or AudioPerceptionConstants()
    check_non_negative("z", z)
    lead = -constants.lip_sync_lead_limit
    lag = constants.lip_sync_lag_limit
    trail = z / constants.speed_of_sound
    offset = min(max(trail, lead), lag)
    return LipSyncWindow(
        lead_bound=lead,
        lag_bound=lag,
        natural_trail=trail,
        recommended_offset=offset,
        # compared in distance so that z == lag * c counts as inside
        violates_imperceptibility=z > lag * constants.speed_of_sound,
    )
