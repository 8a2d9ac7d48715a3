import pytest

import heckelab_config
from heckelab.errors import ConfigError
from heckelab_config import apply_config, default_config, load_config_file


@pytest.fixture(autouse=True)
def no_seed_override(monkeypatch):
    monkeypatch.delenv("HECKELAB_SEED", raising=False)


def test_defaults_without_a_file():
    config = load_config_file(None)
    assert config == default_config()
    assert config["algebra"] == {"a": 2, "b": 3, "level": 1}
    assert config["window"]["delta_supp"] == 1.0


def test_file_overrides_keep_types(tmp_path):
    path = tmp_path / "run.conf"
    path.write_text(
        "# desk run\n"
        "window.delta_supp = 0.5\n"
        "scans.levels = 5, 13, 17\n"
        "runtime.threads = 4   # pool size\n"
        "runtime.seed = 11\n"
        "\n"
        "tol.max_box_points = 1000\n"
    )
    config = load_config_file(str(path))
    assert config["window"]["delta_supp"] == 0.5
    assert config["scans"]["levels"] == [5, 13, 17]
    assert config["runtime"]["threads"] == 4
    assert config["runtime"]["seed"] == 11
    assert config["tol"]["max_box_points"] == 1000
    assert config["tol"]["symmetry"] == 1e-8


def test_threads_can_be_reset_to_none(tmp_path):
    path = tmp_path / "run.conf"
    path.write_text("runtime.threads = none\n")
    assert load_config_file(str(path))["runtime"]["threads"] is None


@pytest.mark.parametrize(
    "text",
    [
        "window.delta_supp 0.5\n",
        "window.width = 0.5\n",
        "colour.delta_supp = 0.5\n",
        "window.delta_supp = wide\n",
        "runtime.threads = many\n",
    ],
)
def test_malformed_files(tmp_path, text):
    path = tmp_path / "bad.conf"
    path.write_text(text)
    with pytest.raises(ConfigError):
        load_config_file(str(path))


def test_missing_file(tmp_path):
    with pytest.raises(ConfigError):
        load_config_file(str(tmp_path / "absent.conf"))


def test_seed_from_environment(monkeypatch):
    monkeypatch.setenv("HECKELAB_SEED", "99")
    assert load_config_file(None)["runtime"]["seed"] == 99
    monkeypatch.setenv("HECKELAB_SEED", "ninety-nine")
    with pytest.raises(ConfigError):
        load_config_file(None)


def test_apply_config_updates_live_settings():
    config = default_config()
    config["window"]["delta_supp"] = 0.25
    apply_config(config)
    assert heckelab_config.WINDOW["delta_supp"] == 0.25
    assert default_config()["window"]["delta_supp"] == 1.0


def test_default_config_is_a_copy():
    config = default_config()
    config["scans"]["levels"].append(17)
    assert default_config()["scans"]["levels"] == [5, 13]
