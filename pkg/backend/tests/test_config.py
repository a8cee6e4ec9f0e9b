import pytest

from app.core.config import Settings, build_settings, get_settings, load_config_file
from app.core.exceptions import ParameterError


def test_defaults():
    settings = get_settings()
    assert settings.level == 1
    assert settings.size_limit == 8
    assert settings.truncation == 4
    assert settings.output == "json"


def test_bracketed_lists_are_split():
    settings = Settings(level=2, u="[0, 1/2]", uprime="3,4")
    assert settings.u == ["0", "1/2"]
    assert settings.uprime == ["3", "4"]


def test_config_file_and_overrides(tmp_path):
    path = tmp_path / "obrauer.conf"
    path.write_text(
        "# parameters\nlevel = 2\nu = [0, 2]\nu' = [0, 1]\nsize-limit = 6\nformat = CSV\n",
        encoding="utf-8",
    )
    values = load_config_file(str(path))
    assert values["uprime"] == "[0, 1]"
    assert values["size_limit"] == "6"

    settings = build_settings(str(path), {"size_limit": 5, "truncation": None})
    assert settings.level == 2
    assert settings.u == ["0", "2"]
    assert settings.size_limit == 5
    assert settings.truncation == 4
    assert settings.output == "csv"


def test_environment_is_read(monkeypatch):
    monkeypatch.setenv("OBRAUER_TRUNCATION", "3")
    assert build_settings().truncation == 3


def test_invalid_values_raise_parameter_error(tmp_path):
    with pytest.raises(ParameterError):
        build_settings(None, {"level": 0})
    bad = tmp_path / "bad.conf"
    bad.write_text("level 2\n", encoding="utf-8")
    with pytest.raises(ParameterError):
        load_config_file(str(bad))
    with pytest.raises(ParameterError):
        load_config_file(str(tmp_path / "missing.conf"))


def test_to_params():
    params = build_settings(None, {"level": 2, "u": "0,2", "uprime": "0,1"}).to_params()
    assert params.level == 2
    assert [params.fmt(x) for x in params.u] == ["0", "2"]
    assert params.max_order == 16


def test_to_params_rejects_mismatched_charges():
    with pytest.raises(ParameterError):
        build_settings(None, {"level": 2, "u": "0", "uprime": "0,1"}).to_params()
