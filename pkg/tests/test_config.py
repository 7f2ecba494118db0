import json
import logging

import pytest

from tttbudget.config import (
    SECTIONS,
    config_from_dict,
    default_config_path,
    load_config,
    load_schema,
    save_config,
)
from tttbudget.exceptions import InputError
from tttbudget.latency import SpanConvention


def write(tmp_path, text, name="c.json"):
    p = tmp_path / name
    p.write_text(text)
    return p


def schema_keys():
    schema = load_schema()
    return {f"{s}.{k}" for s in SECTIONS for k in schema["properties"][s]["properties"]}


def test_minimal_file_gets_every_default(tmp_path, caplog):
    path = write(tmp_path, '{"geometry": {"viewing_distance_m": 3.0}}')
    with caplog.at_level(logging.INFO, logger="tttbudget"):
        cfg = load_config(path)
    assert cfg.geometry.viewing_distance == 3.0
    assert set(cfg.defaulted) == schema_keys() - {"geometry.viewing_distance_m"}
    logged = {r.getMessage().rsplit(" ", 1)[-1] for r in caplog.records}
    assert logged == set(cfg.defaulted)
    # interlocutor follows the viewing distance when not given
    assert cfg["delay"]["interlocutor_distance_m"] == 3.0
    assert cfg.span_convention is SpanConvention.FULL_BUDGET
    caps = dict(cfg.capabilities)
    assert caps.pop("camera_placement") == "horizontal"
    assert all(v is None for v in caps.values())
    assert not any(cfg.checklist.values())


def test_empty_document_is_complete():
    cfg = config_from_dict({})
    assert cfg.geometry.viewing_distance == 2.0
    assert cfg.audio.speed_of_sound == 343.0


def test_negative_distance_names_field(tmp_path):
    path = write(tmp_path, '{\n  "geometry": {\n    "viewing_distance_m": -2\n  }\n}\n')
    with pytest.raises(InputError, match=r"c\.json:3: field geometry\.viewing_distance_m"):
        load_config(path)


def test_unknown_key_rejected(tmp_path):
    path = write(tmp_path, '{"geometry": {"viewing_distanse_m": 2}}')
    with pytest.raises(InputError, match=r"geometry\.viewing_distanse_m: unknown key"):
        load_config(path)


def test_unknown_section_rejected():
    with pytest.raises(InputError, match="unknown key"):
        config_from_dict({"haptics": {}})


def test_wrong_type(tmp_path):
    path = write(tmp_path, '{"capabilities": {"view_channels": "many"}}')
    with pytest.raises(InputError, match="capabilities.view_channels"):
        load_config(path)


def test_malformed_json_reports_position(tmp_path):
    path = write(tmp_path, '{\n  "geometry": {\n    "viewing_distance_m": 2,\n  }\n}\n')
    with pytest.raises(InputError, match=r"c\.json:4:\d+: malformed JSON"):
        load_config(path)


def test_missing_file(tmp_path):
    with pytest.raises(InputError, match="cannot read"):
        load_config(tmp_path / "absent.json")


def test_non_object(tmp_path):
    with pytest.raises(InputError, match="object"):
        load_config(write(tmp_path, "[1, 2]"))


def test_cross_field_rules():
    with pytest.raises(InputError, match="head_motion_range"):
        config_from_dict({"geometry": {"head_motion_range_m": 5.0}})
    with pytest.raises(InputError, match="median_gap_s"):
        config_from_dict({"conversation": {"median_gap_s": 1.5}})


def test_shipped_config_round_trips(tmp_path, default_config):
    assert default_config.defaulted == ()
    out = tmp_path / "saved.json"
    save_config(default_config, out)
    again = load_config(out)
    original = json.loads(default_config_path().read_text())
    for section in SECTIONS:
        for key, value in original[section].items():
            assert again[section][key] == value, f"{section}.{key}"
    assert again == default_config


def test_to_dict_is_a_copy(default_config):
    d = default_config.to_dict()
    d["geometry"]["viewing_distance_m"] = 99
    assert default_config["geometry"]["viewing_distance_m"] == 2.0


def test_schema_documents_every_key():
    schema = load_schema()
    for section in SECTIONS:
        sec = schema["properties"][section]
        assert sec["additionalProperties"] is False
        for key, prop in sec["properties"].items():
            assert "description" in prop, f"{section}.{key}"
