"""Configuration loading, overrides, validation."""

import json

import pytest

from hyperboloid.config import ConfigError, RunConfig


def test_defaults():
    cfg = RunConfig()
    assert cfg.a == 1.0 and cfg.m == 1.0 and cfg.hbar == 1.0
    assert cfg.dt == 1e-3 and cfg.T == 10.0 and cfg.projection
    assert cfg.tol_constraint == 1e-8 and cfg.tol_eigen == 1e-4
    assert cfg.out is None


def test_n_theta_from_spacing():
    cfg = RunConfig(theta_min=0.1, theta_max=3.0, h=0.01)
    assert cfg.n_theta == 291


def test_from_file(tmp_path):
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps({"a": 2.0, "dt": 1e-4, "n_phi": 32}))
    cfg = RunConfig.from_file(str(path))
    assert cfg.a == 2.0 and cfg.dt == 1e-4 and cfg.n_phi == 32
    assert cfg.m == 1.0   # untouched defaults survive


def test_unknown_keys_rejected(tmp_path):
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps({"a": 2.0, "mass": 3.0}))
    with pytest.raises(ConfigError, match="mass"):
        RunConfig.from_file(str(path))


def test_override_flag_wins():
    cfg = RunConfig(a=2.0, dt=1e-4)
    out = cfg.override(a=3.0, dt=None, seed=None)
    assert out.a == 3.0
    assert out.dt == 1e-4        # None = flag absent, config value stands
    assert cfg.a == 2.0          # frozen original untouched


def test_validation():
    with pytest.raises(ConfigError):
        RunConfig(a=-1.0)
    with pytest.raises(ConfigError):
        RunConfig(dt=0.0)
    with pytest.raises(ConfigError):
        RunConfig(theta_min=2.0, theta_max=1.0)
    with pytest.raises(ConfigError):
        RunConfig(n_phi=12)      # not a power of two


def test_to_dict_roundtrip():
    cfg = RunConfig(a=1.5, seed=7)
    assert RunConfig(**cfg.to_dict()) == cfg
