import importlib
import sys
from pathlib import Path

import pytest

# Ensure project root is in sys.path
sys.path.insert(0, str(Path(__file__).resolve().parent.parent))
import config as config_module


# Utility to patch environment variables
def patch_env(monkeypatch, env_vars):
    for k, v in env_vars.items():
        monkeypatch.setenv(k, v)


SYNTH_VARS = ["SYNTH_SIGMA", "SYNTH_ALPHA", "SYNTH_ALPHA_ENABLED_DEFAULT", "SYNTH_M", "SYNTH_SIZE_FACTOR", "SYNTH_SEED"]


def test_synthesis_defaults_when_unset(monkeypatch):
    for name in SYNTH_VARS:
        monkeypatch.delenv(name, raising=False)
    cfg = config_module.SynthesisDefaults.from_env()
    assert cfg.sigma == 0.5
    assert cfg.alpha == 0.0
    assert cfg.alpha_enabled == 0.01
    assert cfg.m == 1
    assert cfg.seed == 20240101


def test_synthesis_defaults_from_env(monkeypatch):
    patch_env(monkeypatch, {"SYNTH_SIGMA": "2", "SYNTH_M": "50", "SYNTH_SEED": "7"})
    cfg = config_module.SynthesisDefaults.from_env()
    assert cfg.sigma == 2.0
    assert cfg.m == 50
    assert cfg.seed == 7


def test_synthesis_defaults_malformed(monkeypatch):
    patch_env(monkeypatch, {"SYNTH_M": "many"})
    with pytest.raises(ValueError, match="SYNTH_M"):
        config_module.SynthesisDefaults.from_env()


def test_synthesis_defaults_out_of_range(monkeypatch):
    patch_env(monkeypatch, {"SYNTH_SIGMA": "-1"})
    with pytest.raises(ValueError):
        config_module.SynthesisDefaults.from_env()


def test_runtime_config_from_env(monkeypatch, tmp_path):
    patch_env(monkeypatch, {"SYNTH_WORKERS": "4", "LOG_DIR": str(tmp_path / "logs"), "LOG_LEVEL": "debug"})
    cfg = config_module.RuntimeConfig.from_env()
    assert cfg.workers == 4
    assert cfg.log_dir == tmp_path / "logs"
    assert cfg.log_level == "DEBUG"


def test_config_reload_picks_up_env(monkeypatch):
    patch_env(monkeypatch, {"FIXTURE_MAX_COUNT": "80", "ENV": "test"})
    reloaded = importlib.reload(config_module)
    assert reloaded.config.fixture.max_count == 80
    assert reloaded.config.ENV == "test"
    monkeypatch.delenv("FIXTURE_MAX_COUNT")
    monkeypatch.delenv("ENV")
    importlib.reload(config_module)
