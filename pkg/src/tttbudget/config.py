"""Loading, validating and saving system configurations.

A configuration is a JSON document whose keys carry their units as suffixes
(``viewing_distance_m``, ``rtt_ms``). The schema in ``data/config.schema.json``
lists every key with its default. :class:`SystemConfig` keeps the values in
those interface units, so a save/load cycle is lossless; the domain objects
(in SI units) are built on access.
"""

from __future__ import annotations

import copy
import json
import logging
import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Any

import jsonschema

from . import units
from .audio import AudioPerceptionConstants
from .conversation import ConversationParams, TurnGapModel, calibrate_gap_model
from .exceptions import DomainError, InputError
from .latency import DelayScenario, SpanConvention
from .vision import ViewingGeometry, VisualPerceptionConstants

logger = logging.getLogger(__name__)

SECTIONS = ("geometry", "vision", "audio", "delay", "conversation", "capabilities", "checklist")


def _data_path(name):
    return resources.files("tttbudget") / "data" / name


def load_schema() -> dict:
    return json.loads(_data_path("config.schema.json").read_text(encoding="utf-8"))


def default_config_path() -> Path:
    """Path of the shipped configuration for the nominal 2 m set-up."""
    return Path(str(_data_path("nominal_2m.json")))


@dataclass(frozen=True)
class SystemConfig:
    values: dict[str, dict[str, Any]]
    defaulted: tuple[str, ...] = field(default=(), compare=False)

    def __getitem__(self, section):
        return self.values[section]

    @property
    def geometry(self) -> ViewingGeometry:
        g = self.values["geometry"]
        return ViewingGeometry(
            viewing_distance=g["viewing_distance_m"],
            display_width=g["display_width_m"],
            display_height=g["display_height_m"],
            head_motion_range=g["head_motion_range_m"],
            head_speed=g["head_speed_m_per_s"],
            object_speed=g["object_speed_m_per_s"],
            interocular_separation=g["interocular_separation_m"],
            eyeball_diameter=g["eyeball_diameter_m"],
        )

    @property
    def vision(self) -> VisualPerceptionConstants:
        v = self.values["vision"]
        return VisualPerceptionConstants(
            acuity=units.arcmin(v["acuity_arcmin"]),
            stereoacuity=units.arcmin(v["stereoacuity_arcmin"]),
            pursuit_max=units.deg(v["pursuit_max_deg_per_s"]),
            limiting_frame_rate=v["limiting_frame_rate_hz"],
            flicker_fusion=v["flicker_fusion_hz"],
            gaze_threshold_horizontal=units.deg(v["gaze_threshold_horizontal_deg"]),
            gaze_threshold_vertical=units.deg(v["gaze_threshold_vertical_deg"]),
            discernible_chrominance_levels=v["discernible_chrominance_levels"],
        )

    @property
    def audio(self) -> AudioPerceptionConstants:
        a = self.values["audio"]
        return AudioPerceptionConstants(
            audible_max_frequency=a["audible_max_frequency_hz"],
            auditory_dynamic_range=a["auditory_dynamic_range_db"],
            speech_dynamic_range=a["speech_dynamic_range_db"],
            localization_acuity_horizontal=units.deg(a["localization_acuity_horizontal_deg"]),
            lip_sync_lead_limit=units.ms(a["lip_sync_lead_limit_ms"]),
            lip_sync_lag_limit=units.ms(a["lip_sync_lag_limit_ms"]),
            speed_of_sound=a["speed_of_sound_m_per_s"],
        )

    def delay_scenario(self, one_way_system_delay: float = 0.0) -> DelayScenario:
        d = self.values["delay"]
        return DelayScenario(
            interlocutor_distance=d["interlocutor_distance_m"],
            mic_mouth_distance=d["mic_mouth_distance_m"],
            speaker_ear_distance=d["speaker_ear_distance_m"],
            one_way_system_delay=one_way_system_delay,
            reaction_time=units.ms(d["reaction_time_ms"]),
            speed_of_sound=self.values["audio"]["speed_of_sound_m_per_s"],
        )

    @property
    def delta_budget(self) -> float:
        return units.ms(self.values["delay"]["delta_budget_ms"])

    @property
    def link_speed(self) -> float:
        return units.km(self.values["delay"]["link_speed_km_per_s"])

    @property
    def span_convention(self) -> SpanConvention:
        return SpanConvention(self.values["delay"]["span_convention"])

    @property
    def capabilities(self) -> dict[str, Any]:
        return self.values["capabilities"]

    @property
    def checklist(self) -> dict[str, bool]:
        return self.values["checklist"]

    def gap_model(self) -> TurnGapModel:
        c = self.values["conversation"]
        return calibrate_gap_model(c["median_gap_s"], c["positive_fraction"],
                                   (c["lower_bound_s"], c["upper_bound_s"]))

    def conversation_params(self, *, n_turns: int, delta: float, seed: int) -> ConversationParams:
        c = self.values["conversation"]
        return ConversationParams(
            n_turns=n_turns, delta=delta, seed=seed,
            detect_threshold=c["detect_threshold_s"],
            patience=c["patience_s"],
            repeat_duration=c["repeat_duration_s"],
        )

    def to_dict(self) -> dict:
        return copy.deepcopy(self.values)


def _line_of(text, key):
    if text is None:
        return None
    m = re.search(r'"%s"\s*:' % re.escape(key), text)
    return text.count("\n", 0, m.start()) + 1 if m else None


def _inject_defaults(data, schema):
    defaulted = []
    for section in SECTIONS:
        props = schema["properties"][section]["properties"]
        values = data.setdefault(section, {})
        for key, prop in props.items():
            if key not in values and "default" in prop:
                values[key] = copy.deepcopy(prop["default"])
                defaulted.append(f"{section}.{key}")
    delay = data["delay"]
    if "interlocutor_distance_m" not in delay:
        delay["interlocutor_distance_m"] = data["geometry"]["viewing_distance_m"]
        defaulted.append("delay.interlocutor_distance_m")
    return defaulted


def config_from_dict(data: dict, *, source_text: str | None = None,
                     source: str = "<config>") -> SystemConfig:
    """Validate a parsed document, inject defaults and check cross-field rules."""
    schema = load_schema()
    validator = jsonschema.Draft202012Validator(schema)
    errors = sorted(validator.iter_errors(data), key=lambda e: list(e.absolute_path))
    if errors:
        err = errors[0]
        path = ".".join(str(p) for p in err.absolute_path) or "<root>"
        key = err.absolute_path[-1] if err.absolute_path else None
        if err.validator == "additionalProperties":
            unknown = sorted(set(err.instance) - set(err.schema.get("properties", {})))
            key = unknown[0] if unknown else key
            path = ".".join([*map(str, err.absolute_path), str(key)])
            msg = "unknown key"
        else:
            msg = err.message
        line = _line_of(source_text, str(key)) if key is not None else None
        where = f"{source}:{line}" if line else source
        raise InputError(f"{where}: field {path}: {msg}")

    data = copy.deepcopy(data)
    defaulted = _inject_defaults(data, schema)
    for name in defaulted:
        logger.info("default injected for %s", name)
    config = SystemConfig(values=data, defaulted=tuple(defaulted))

    for section in ("geometry", "vision", "audio"):
        try:
            getattr(config, section)
        except DomainError as exc:
            raise InputError(f"{source}: section {section}: {exc}") from None
    try:
        config.delay_scenario()
    except DomainError as exc:
        raise InputError(f"{source}: section delay: {exc}") from None
    conv = data["conversation"]
    if not conv["lower_bound_s"] < conv["median_gap_s"] < conv["upper_bound_s"]:
        raise InputError(f"{source}: section conversation: median_gap_s must lie strictly "
                         "between lower_bound_s and upper_bound_s")
    return config


def load_config(path) -> SystemConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read config {path}: {exc.strerror or exc}") from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}:{exc.lineno}:{exc.colno}: malformed JSON: {exc.msg}") from None
    if not isinstance(data, dict):
        raise InputError(f"{path}: top level must be an object")
    return config_from_dict(data, source_text=text, source=str(path))


def save_config(config: SystemConfig, path) -> None:
    Path(path).write_text(json.dumps(config.to_dict(), indent=2) + "\n", encoding="utf-8")
