"""Budget evaluation of a configured system and its rendering.

:func:`compute_budget` derives every quantitative requirement from the
configuration, pairs it with the declared capability and decides pass/fail.
Text and machine (JSON) renderings are both produced from the same
:class:`BudgetReport` value.
"""

from __future__ import annotations

import json
from contextlib import contextmanager
from dataclasses import asdict, dataclass
from typing import Any

from . import audio, latency, units, vision
from .config import SystemConfig
from .exceptions import DomainError

SCHEMA_VERSION = 1

# ordered (tag, title); a tag names the topic group a requirement belongs to
SECTIONS = (
    ("vision.resolution", "Vision: spatial resolution"),
    ("vision.multiview", "Vision: multiview channels"),
    ("vision.head_tracking", "Vision: tracked channels"),
    ("vision.frame_rate", "Vision: frame rate"),
    ("vision.pixel_precision", "Vision: pixel precision"),
    ("vision.eye_contact", "Vision: eye contact"),
    ("audio.sampling_rate", "Audio: sampling rate"),
    ("audio.sample_precision", "Audio: sample precision"),
    ("audio.localization", "Audio: spatial localization"),
    ("cross_modal.lip_sync", "Cross-modal: lip sync"),
    ("interaction.delay", "Interaction: conversational delay"),
    ("interaction.span", "Interaction: distance span"),
)

CHECKLIST = (
    ("consistent_lighting", "vision.consistency"),
    ("true_size_rendering", "vision.consistency"),
    ("no_rendering_artifacts", "vision.consistency"),
    ("imperceptible_echo_cancellation", "audio.acoustics"),
    ("consistent_ambience", "audio.acoustics"),
    ("transparent_immersion", "other.immersion"),
)

CHECKLIST_FOOTER = ("Checklist items are operator assertions; this tool cannot verify "
                    "them and only reports what the configuration declares.")

AT_LEAST, AT_MOST, WITHIN = "at_least", "at_most", "within"


@dataclass(frozen=True)
class RequirementEntry:
    name: str
    section: str
    unit: str
    comparison: str
    required: Any
    capability: Any
    passed: bool
    note: str = ""

    @classmethod
    def judge(cls, name, section, unit, comparison, required, capability, note=""):
        if capability is None:
            passed = False
        elif comparison == AT_LEAST:
            if isinstance(required, tuple):
                passed = all(c >= r for c, r in zip(capability, required))
            else:
                passed = capability >= required
        elif comparison == AT_MOST:
            passed = capability <= required
        elif comparison == WITHIN:
            passed = required[0] <= capability <= required[1]
        else:
            raise ValueError(f"unknown comparison {comparison!r}")
        return cls(name, section, unit, comparison, required, capability, bool(passed), note)


@dataclass(frozen=True)
class BudgetReport:
    entries: tuple[RequirementEntry, ...]
    derived: dict[str, float]
    checklist: dict[str, bool]
    overall_pass: bool

    @property
    def quantitative_pass(self) -> bool:
        return all(e.passed for e in self.entries)

    def entry(self, name) -> RequirementEntry:
        for e in self.entries:
            if e.name == name:
                return e
        raise KeyError(name)

    def to_dict(self) -> dict:
        entries = []
        for e in self.entries:
            d = asdict(e)
            for key in ("required", "capability"):
                if isinstance(d[key], tuple):
                    d[key] = list(d[key])
            entries.append(d)
        return {
            "schema_version": SCHEMA_VERSION,
            "entries": entries,
            "derived": dict(self.derived),
            "checklist": dict(self.checklist),
            "checklist_note": CHECKLIST_FOOTER,
            "overall_pass": self.overall_pass,
        }

    @classmethod
    def from_dict(cls, d) -> "BudgetReport":
        entries = []
        for e in d["entries"]:
            e = dict(e)
            for key in ("required", "capability"):
                if isinstance(e[key], list):
                    e[key] = tuple(e[key])
            entries.append(RequirementEntry(**e))
        return cls(entries=tuple(entries), derived=dict(d["derived"]),
                   checklist=dict(d["checklist"]), overall_pass=d["overall_pass"])


@contextmanager
def _requirement(name):
    try:
        yield
    except DomainError as exc:
        raise DomainError(f"{name}: {exc}") from None


def compute_budget(config: SystemConfig) -> BudgetReport:
    geom = config.geometry
    vis = config.vision
    aud = config.audio
    caps = config.capabilities
    z = geom.viewing_distance
    rtt = units.ms(caps["rtt_ms"]) if caps["rtt_ms"] is not None else None
    entries = []
    derived = {}

    with _requirement("display_resolution"):
        px = vision.display_resolution_requirement(geom, vis.acuity)
        declared = None
        if caps["display_px_w"] is not None and caps["display_px_h"] is not None:
            declared = (caps["display_px_w"], caps["display_px_h"])
        entries.append(RequirementEntry.judge(
            "display_resolution", "vision.resolution", "px", AT_LEAST, px, declared))
        derived["pixel_size_m"] = vision.min_resolvable_size(z, vis.acuity)

    with _requirement("multiview_channels"):
        fov = vision.head_box_fov(geom.head_motion_range, z)
        total = vision.multiview_channel_count(fov, vis.acuity)
        entries.append(RequirementEntry.judge(
            "multiview_channels", "vision.multiview", "channels", AT_LEAST, total,
            caps["view_channels"]))
        derived["head_box_fov_deg"] = units.to_deg(fov)
        derived["aggregate_multiview_pixels"] = float(vision.aggregate_pixel_count(*px, total))
        derived["min_perceivable_depth_m"] = vision.min_perceivable_depth(
            geom.interocular_separation, z, vis.stereoacuity)

    budget = latency.budget_from_geometry(config.delay_scenario())

    with _requirement("tracked_channels"):
        round_trip = rtt if rtt is not None else budget.rtt_max
        tracked = vision.tracked_channel_count(geom.head_speed, round_trip,
                                               geom.head_motion_range, total)
        note = "at declared RTT" if rtt is not None else "at maximum zero-delay RTT"
        entries.append(RequirementEntry.judge(
            "tracked_channels", "vision.head_tracking", "channels", AT_LEAST, tracked,
            caps["view_channels"], note))

    with _requirement("frame_rate"):
        fps = vision.required_frame_rate(geom.object_speed, z, vis)
        entries.append(RequirementEntry.judge(
            "frame_rate", "vision.frame_rate", "Hz", AT_LEAST, fps, caps["frame_rate_hz"]))

    with _requirement("bits_per_component"):
        bits = vision.min_bits_for_chrominance(vis.discernible_chrominance_levels)
        precision = vision.assess_pixel_precision(bits)
        entries.append(RequirementEntry.judge(
            "bits_per_component", "vision.pixel_precision", "bits", AT_LEAST, bits,
            caps["bits_per_component"]))
        entries.append(RequirementEntry.judge(
            "contrast_ratio", "vision.pixel_precision", ":1", AT_LEAST,
            precision.required_contrast_ratio, caps["contrast_ratio"],
            f"to display {precision.luminance_levels} luminance levels"))

    with _requirement("camera_offset"):
        placement = caps["camera_placement"]
        threshold = (vis.gaze_threshold_vertical if placement == "vertical"
                     else vis.gaze_threshold_horizontal)
        entries.append(RequirementEntry.judge(
            "camera_offset", "vision.eye_contact", "m", AT_MOST,
            vision.camera_offset_tolerance(threshold, z), caps["camera_offset_m"],
            f"{placement} placement"))
        derived["eye_rotation_detectability_deg"] = units.to_deg(
            vision.eye_rotation_detectability(geom, vis.acuity))

    with _requirement("sampling_rate"):
        entries.append(RequirementEntry.judge(
            "sampling_rate", "audio.sampling_rate", "Hz", AT_LEAST,
            audio.required_sampling_rate(aud.audible_max_frequency), caps["sampling_rate_hz"]))

    with _requirement("bits_per_sample"):
        entries.append(RequirementEntry.judge(
            "bits_per_sample", "audio.sample_precision", "bits", AT_LEAST,
            audio.min_bits_for_range(aud.speech_dynamic_range), caps["bits_per_sample"],
            "speech dynamic range"))
        derived["full_hearing_bits_per_sample"] = float(
            audio.min_bits_for_range(aud.auditory_dynamic_range))

    with _requirement("speaker_offset"):
        entries.append(RequirementEntry.judge(
            "speaker_offset", "audio.localization", "m", AT_MOST,
            audio.localization_offset_tolerance(aud.localization_acuity_horizontal, z),
            caps["speaker_offset_m"]))

    with _requirement("lip_sync"):
        window = audio.lip_sync_window(z, aud)
        entries.append(RequirementEntry.judge(
            "lip_sync", "cross_modal.lip_sync", "ms", WITHIN,
            (units.to_ms(window.lead_bound), units.to_ms(window.lag_bound)),
            caps["av_sync_offset_ms"], "audio delay relative to video"))
        derived["natural_audio_trail_ms"] = units.to_ms(window.natural_trail)

    with _requirement("round_trip_delay"):
        entries.append(RequirementEntry.judge(
            "round_trip_delay", "interaction.delay", "ms", AT_MOST,
            units.to_ms(budget.rtt_max), caps["rtt_ms"], "adds no delay over face-to-face"))
        derived["one_way_air_delay_ms"] = units.to_ms(budget.t)
        derived["device_air_delay_ms"] = units.to_ms(budget.d)
        derived["max_one_way_system_delay_ms"] = units.to_ms(budget.p_max)

    with _requirement("added_delay"):
        delta = None
        if rtt is not None:
            scenario = config.delay_scenario(one_way_system_delay=rtt / 2)
            delta = units.to_ms(latency.budget_from_geometry(scenario).delta)
            r = scenario.reaction_time
            derived["face_to_face_delay_ms"] = units.to_ms(latency.face_to_face_delay(budget.t, r))
            derived["mediated_delay_ms"] = units.to_ms(
                latency.mediated_delay(budget.d, rtt / 2, r))
        entries.append(RequirementEntry.judge(
            "added_delay", "interaction.delay", "ms", AT_MOST,
            units.to_ms(config.delta_budget), delta, "derived from declared RTT"))

    with _requirement("link_span"):
        # tolerating an added delay B frees B on top of the zero-delay round trip
        span = latency.max_span(budget.rtt_max + config.delta_budget, config.link_speed,
                                config.span_convention)
        entries.append(RequirementEntry.judge(
            "link_span", "interaction.span", "km", AT_MOST, units.to_km(span),
            caps["link_length_km"], f"{config.span_convention.value} convention"))

    checklist = {name: bool(config.checklist[name]) for name, _ in CHECKLIST}
    overall = all(e.passed for e in entries) and all(checklist.values())
    return BudgetReport(entries=tuple(entries), derived=derived, checklist=checklist,
                        overall_pass=overall)


def _fmt(value):
    if value is None:
        return "not declared"
    if isinstance(value, tuple):
        return " x ".join(_fmt(v) for v in value)
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, int):
        return str(value)
    if abs(value) >= 1e4:
        return f"{value:.0f}"
    return f"{value:.4g}"


_CMP = {AT_LEAST: ">=", AT_MOST: "<=", WITHIN: "in"}


def render_text(report: BudgetReport) -> str:
    header = ("requirement", "required", "declared", "unit", "result", "note")
    rows = []
    titles = dict(SECTIONS)
    for tag, _ in SECTIONS:
        for e in (e for e in report.entries if e.section == tag):
            required = (f"[{_fmt(e.required[0])}, {_fmt(e.required[1])}]"
                        if e.comparison == WITHIN else _fmt(e.required))
            rows.append((tag, (e.name, f"{_CMP[e.comparison]} {required}", _fmt(e.capability),
                               e.unit, "PASS" if e.passed else "FAIL", e.note)))
    widths = [max(len(header[i]), *(len(r[1][i]) for r in rows)) for i in range(len(header))]

    def line(cells):
        return "  ".join(c.ljust(w) for c, w in zip(cells, widths)).rstrip()

    out = [line(header), line(["-" * w for w in widths])]
    current = None
    for tag, cells in rows:
        if tag != current:
            out.append(f"[{titles[tag]}]")
            current = tag
        out.append(line(cells))

    out.append("")
    out.append("Derived quantities")
    for key in sorted(report.derived):
        out.append(f"  {key:<34} {_fmt(report.derived[key])}")
    out.append("")
    out.append("Qualitative checklist")
    for name, tag in CHECKLIST:
        value = report.checklist.get(name, False)
        out.append(f"  {name:<34} {'yes' if value else 'no':<4} {tag}")
    out.append("")
    passed = sum(e.passed for e in report.entries)
    out.append(f"Quantitative: {passed}/{len(report.entries)} pass")
    out.append(f"Overall: {'PASS' if report.overall_pass else 'FAIL'}")
    out.append(CHECKLIST_FOOTER)
    return "\n".join(out) + "\n"


def render_machine(report: BudgetReport) -> str:
    return json.dumps(report.to_dict(), indent=2, sort_keys=True) + "\n"


def render_report(report: BudgetReport, format: str = "text") -> str:
    if format == "text":
        return render_text(report)
    if format == "machine":
        return render_machine(report)
    raise ValueError(f"unknown format {format!r}")


def parse_machine(text: str) -> BudgetReport:
    return BudgetReport.from_dict(json.loads(text))
