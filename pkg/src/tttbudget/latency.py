"""Delay algebra for mediated versus face-to-face conversation.

Symbols follow the usual set-up: ``t`` is the one-way acoustic delay between
interlocutors, ``d`` the air path between a person and a microphone or
loudspeaker, ``p`` the one-way processing plus transmission delay, ``r`` the
reaction time. All values are seconds.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from ._validation import check_non_negative, check_positive
from .exceptions import DomainError


class SpanConvention(str, Enum):
    # budget times link speed, the usual back-of-envelope reach figure
    FULL_BUDGET = "full_budget"
    # the budget covers a round trip, so the span is half of that
    PHYSICAL = "physical"


@dataclass(frozen=True)
class DelayScenario:
    interlocutor_distance: float = 2.0
    mic_mouth_distance: float = 0.1
    speaker_ear_distance: float = 0.1
    one_way_system_delay: float = 0.0
    reaction_time: float = 0.0
    speed_of_sound: float = 343.0

    def __post_init__(self):
        for name in self.__dataclass_fields__:
            check_non_negative(name, getattr(self, name))
        check_positive("interlocutor_distance", self.interlocutor_distance)
        check_positive("speed_of_sound", self.speed_of_sound)


@dataclass(frozen=True)
class DelayBudget:
    t: float
    d: float
    p_max: float
    rtt_max: float
    delta: float


def face_to_face_delay(t: float, r: float) -> float:
    check_non_negative("t", t)
    check_non_negative("r", r)
    return 2 * t + r


def mediated_delay(d: float, p: float, r: float) -> float:
    check_non_negative("d", d)
    check_non_negative("p", p)
    check_non_negative("r", r)
    return 4 * d + 2 * p + r


def added_delay(d: float, p: float, t: float) -> float:
    """Extra response time a mediated link adds; negative if it beats air."""
    check_non_negative("d", d)
    check_non_negative("p", p)
    check_non_negative("t", t)
    return 4 * d + 2 * p - 2 * t


def max_processing_delay(t: float, d: float) -> float:
    """Largest one-way system delay that adds nothing over face-to-face."""
    check_non_negative("t", t)
    check_non_negative("d", d)
    return max(0.0, t - 2 * d)


def budget_from_geometry(scenario: DelayScenario) -> DelayBudget:
    """Delay budget for a physical set-up.

    Unequal microphone and loudspeaker distances are collapsed to the larger
    one, which never overstates headroom.
    """
    c = scenario.speed_of_sound
    t = scenario.interlocutor_distance / c
    d = max(scenario.mic_mouth_distance, scenario.speaker_ear_distance) / c
    p_max = max_processing_delay(t, d)
    return DelayBudget(
        t=t,
        d=d,
        p_max=p_max,
        rtt_max=2 * p_max,
        delta=added_delay(d, scenario.one_way_system_delay, t),
    )


def max_span(delay_budget: float, link_speed: float,
             convention: SpanConvention | str = SpanConvention.FULL_BUDGET) -> float:
    """Longest link (meters) whose propagation fits in `delay_budget`."""
    check_non_negative("delay_budget", delay_budget)
    check_positive("link_speed", link_speed)
    try:
        convention = SpanConvention(convention)
    except ValueError:
        raise DomainError(f"unknown span convention {convention!r}") from None
    span = link_speed * delay_budget
    if convention is SpanConvention.PHYSICAL:
        span /= 2
    return span
