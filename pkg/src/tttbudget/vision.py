"""Visual requirements derived from viewing geometry and perceptual limits.

All functions are pure; angles are radians, lengths meters, speeds m/s and
rates Hz. Use :mod:`tttbudget.units` to convert arcminutes and degrees.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from ._validation import (
    ceil_count,
    check_int_range,
    check_non_negative,
    check_positive,
)
from .exceptions import DomainError
from .units import arcmin, deg

STEREO_PAIR = 2


@dataclass(frozen=True)
class ViewingGeometry:
    viewing_distance: float = 2.0
    display_width: float = 2.0
    display_height: float = 0.5
    head_motion_range: float = 0.2
    head_speed: float = 1.0
    object_speed: float = 1.0
    interocular_separation: float = 0.065
    eyeball_diameter: float = 0.02

    def __post_init__(self):
        for name in self.__dataclass_fields__:
            check_positive(name, getattr(self, name))
        if self.head_motion_range >= 2 * self.viewing_distance:
            raise DomainError(
                "head_motion_range must be smaller than twice the viewing_distance"
            )


@dataclass(frozen=True)
class VisualPerceptionConstants:
    acuity: float = arcmin(0.5)
    stereoacuity: float = arcmin(0.5)
    pursuit_max: float = deg(100.0)
    limiting_frame_rate: float = 250.0
    flicker_fusion: float = 60.0
    gaze_threshold_horizontal: float = deg(1.0)
    gaze_threshold_vertical: float = deg(5.0)
    # normalized-by-luminance hue count; the trichromatic count is far higher
    discernible_chrominance_levels: int = 100_000

    def __post_init__(self):
        for name in self.__dataclass_fields__:
            check_positive(name, getattr(self, name))
        if self.flicker_fusion > self.limiting_frame_rate:
            raise DomainError("flicker_fusion must not exceed limiting_frame_rate")


@dataclass(frozen=True)
class PixelPrecisionAssessment:
    bits_per_component: int
    tristimulus_levels: int
    chrominance_levels: int
    luminance_levels: int
    required_contrast_ratio: float


def min_resolvable_size(z: float, acuity: float) -> float:
    """Smallest feature an observer at distance `z` can resolve."""
    check_positive("z", z)
    check_non_negative("acuity", acuity)
    return z * math.tan(acuity)


def pixels_across(extent: float, pixel_size: float) -> int:
    """Number of pixels of size `pixel_size` needed to tile `extent`."""
    check_non_negative("extent", extent)
    check_positive("pixel_size", pixel_size)
    return ceil_count(extent / pixel_size)


def display_resolution_requirement(geom: ViewingGeometry, acuity: float) -> tuple[int, int]:
    """Pixel counts (width, height) at which single pixels become invisible.

    The pixel pitch is used unrounded, so a 2 x 0.5 m display at 2 m and half
    an arcminute needs 6876 x 1719 pixels.
    """
    size = min_resolvable_size(geom.viewing_distance, acuity)
    if size <= 0:
        raise DomainError("acuity must be positive to bound the resolution")
    return pixels_across(geom.display_width, size), pixels_across(geom.display_height, size)


def binocular_disparity(x: float, d: float, z: float) -> float:
    """Small-angle disparity between two points `d` apart in depth."""
    check_positive("z", z)
    check_positive("x", x)
    check_non_negative("d", d)
    return x * d / z**2


def min_perceivable_depth(x: float, z: float, stereoacuity: float) -> float:
    """Depth difference whose disparity equals the stereoacuity threshold."""
    check_positive("x", x)
    check_positive("z", z)
    check_non_negative("stereoacuity", stereoacuity)
    return stereoacuity * z**2 / x


def head_box_fov(head_motion_range: float, z: float) -> float:
    """Angle subtended at the display by the lateral head excursion."""
    check_positive("z", z)
    check_non_negative("head_motion_range", head_motion_range)
    return 2.0 * math.atan(head_motion_range / 2.0 / z)


def multiview_channel_count(fov: float, angular_resolution: float) -> int:
    check_non_negative("fov", fov)
    check_positive("angular_resolution", angular_resolution)
    return ceil_count(fov / angular_resolution)


def tracked_channel_count(head_speed: float, round_trip: float,
                          head_motion_range: float, total_channels: int) -> int:
    """Channels to transmit around a tracked head so one round trip of head
    motion stays covered.

    Never below a stereo pair and never above `total_channels`.
    """
    check_non_negative("head_speed", head_speed)
    check_non_negative("round_trip", round_trip)
    check_positive("head_motion_range", head_motion_range)
    if total_channels < 0:
        raise DomainError("total_channels must be non-negative")
    displacement = head_speed * round_trip
    if displacement >= head_motion_range:
        return total_channels
    n = ceil_count(total_channels * displacement / head_motion_range)
    return min(total_channels, max(STEREO_PAIR, n))


def required_frame_rate(object_speed: float, z: float,
                        constants: VisualPerceptionConstants | None = None) -> float:
    """Frame rate keeping per-frame motion of a pursued object below the
    perceptual step, floored at the flicker fusion rate.

    Angular speed is the angle swept by one second of travel seen from `z`,
    i.e. ``atan(v * 1 s / z)`` per second.
    """
    constants = constants or VisualPerceptionConstants()
    check_positive("z", z)
    check_non_negative("object_speed", object_speed)
    angular_speed = math.atan(object_speed * 1.0 / z)
    per_frame_tolerance = constants.pursuit_max / constants.limiting_frame_rate
    return max(constants.flicker_fusion, angular_speed / per_frame_tolerance)


def eye_rotation_detectability(geom: ViewingGeometry, acuity: float) -> float:
    """Smallest noticeable eyeball rotation of a remote participant.

    The resolvable iris displacement is divided by the eyeball diameter, not
    its radius.
    """
    shift = min_resolvable_size(geom.viewing_distance, acuity)
    return math.atan(shift / geom.eyeball_diameter)


def camera_offset_tolerance(gaze_threshold: float, z: float) -> float:
    """Largest camera displacement from the optical path preserving eye contact."""
    check_positive("z", z)
    check_non_negative("gaze_threshold", gaze_threshold)
    return z * math.tan(gaze_threshold)


def assess_pixel_precision(bits_per_component: int) -> PixelPrecisionAssessment:
    check_int_range("bits_per_component", bits_per_component, 1, 16)
    b = bits_per_component
    luminance = 2**b
    return PixelPrecisionAssessment(
        bits_per_component=b,
        tristimulus_levels=2 ** (3 * b),
        chrominance_levels=2 ** (2 * b),
        luminance_levels=luminance,
        required_contrast_ratio=float(luminance),
    )


def min_bits_for_chrominance(levels: int) -> int:
    """Smallest bits per component whose two chroma channels reach `levels`."""
    if levels < 1:
        raise DomainError("levels must be at least 1")
    for b in range(1, 17):
        if 2 ** (2 * b) >= levels:
            return b
    raise DomainError(f"{levels} chrominance levels exceed 16 bits per component")


def aggregate_pixel_count(px_w: int, px_h: int, channels: int) -> int:
    """Total pixels over every view channel of a multiview display."""
    return px_w * px_h * channels
