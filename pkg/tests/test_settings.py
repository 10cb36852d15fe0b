import json

import logger as logger_module
from settings import Settings, get_settings


def test_defaults():
    settings = Settings()
    assert settings.tolerance == 1e-9
    assert settings.tolerances.integrality == 1e-9
    assert settings.removal.x0_selection == "lowest"
    assert settings.lattice.epsilon == 0.125
    assert settings.verify.removal_instances == 500
    assert settings.workers == 4


def test_config_sections(tmp_path):
    config = tmp_path / "config.json"
    config.write_text(json.dumps({"lattice": {"epsilon": 0.25, "relax_sweeps": 3}, "verify": {"seed": 11}}))
    settings = get_settings(str(config))
    assert settings.lattice.epsilon == 0.25
    assert settings.lattice.relax_sweeps == 3
    assert settings.lattice.star_rays == 1000
    assert settings.verify.seed == 11
    assert settings.flow.arc_order_seed is None


def test_tolerance_override_reaches_integrality(tmp_path):
    config = tmp_path / "config.json"
    config.write_text(json.dumps({"tolerances": {"integrality": 1e-8, "round_trip": 1e-10}}))
    assert get_settings(str(config)).tolerances.integrality == 1e-8
    settings = get_settings(str(config), tolerance=1e-6)
    assert settings.tolerances.integrality == 1e-6
    assert settings.tolerances.round_trip == 1e-10


def test_environment_overrides(monkeypatch):
    monkeypatch.setenv("DIPOLES_TOLERANCE", "1e-7")
    monkeypatch.setenv("DIPOLES_LOG_LEVEL", "DEBUG")
    monkeypatch.setenv("DIPOLES_WORKERS", "2")
    settings = Settings()
    assert settings.tolerances.integrality == 1e-7
    assert settings.logging.level == "DEBUG"
    assert settings.workers == 2


def test_missing_config_file_only_warns(tmp_path, mocker):
    warning = mocker.patch.object(logger_module.logger, "warning")
    settings = get_settings(str(tmp_path / "absent.json"))
    warning.assert_called_once()
    assert settings.removal.max_depth is None
