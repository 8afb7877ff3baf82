import pytest

from fibochain.config import (
    RunConfig,
    environment_overrides,
    find_config_file,
    load_profile,
    load_run_config,
    validate_run_config,
)
from fibochain.errors import UsageError

TOML = """
default_profile = "figures"

[profiles.figures]
kmax = 6.0
imin = 1e-3
out_dir = "out"

[profiles.deep]
depth = 18
"""


@pytest.fixture
def config_dir(tmp_path, monkeypatch):
    monkeypatch.delenv("FIBOCHAIN_CONFIG", raising=False)
    monkeypatch.delenv("FIBOCHAIN_THREADS", raising=False)
    (tmp_path / "fibochain.toml").write_text(TOML)
    return tmp_path


def test_defaults() -> None:
    cfg = RunConfig()
    assert cfg.rule == "fibonacci"
    assert cfg.window == "(-1, t-1]"
    assert validate_run_config(cfg) == (True, [])


def test_layers(config_dir, monkeypatch) -> None:
    monkeypatch.setenv("FIBOCHAIN_THREADS", "3")
    cfg = load_run_config({"kmax": 2.0, "imin": None, "cross_check": True}, cwd=config_dir)
    assert cfg.kmax == 2.0
    assert cfg.imin == 1e-3
    assert cfg.out_dir == "out"
    assert cfg.threads == 3
    assert cfg.extras == {"cross_check": True}


def test_named_profile(config_dir) -> None:
    cfg = load_run_config({}, profile="deep", cwd=config_dir)
    assert cfg.depth == 18
    assert cfg.kmax == 10.0


def test_missing_profile(config_dir) -> None:
    with pytest.raises(UsageError):
        load_profile(config_dir / "fibochain.toml", "nope")


def test_broken_toml(tmp_path) -> None:
    path = tmp_path / "broken.toml"
    path.write_text("kmax = [")
    with pytest.raises(UsageError):
        load_profile(path)


def test_explicit_config_path(tmp_path, monkeypatch) -> None:
    monkeypatch.setenv("FIBOCHAIN_CONFIG", str(tmp_path / "absent.toml"))
    with pytest.raises(UsageError):
        find_config_file(tmp_path)
    path = tmp_path / "other.toml"
    path.write_text(TOML)
    monkeypatch.setenv("FIBOCHAIN_CONFIG", str(path))
    assert find_config_file(tmp_path) == path


def test_no_config_file(tmp_path, monkeypatch) -> None:
    monkeypatch.delenv("FIBOCHAIN_CONFIG", raising=False)
    assert find_config_file(tmp_path) is None


def test_environment_threads(monkeypatch) -> None:
    monkeypatch.setenv("FIBOCHAIN_THREADS", "many")
    assert environment_overrides() == {}
    monkeypatch.setenv("FIBOCHAIN_THREADS", "2")
    assert environment_overrides() == {"threads": 2}


@pytest.mark.parametrize(
    "overrides, message",
    [
        ({"kmax": 0.0}, "kmax must be positive"),
        ({"imin": -1.0}, "imin must be positive"),
        ({"depth": -1}, "depth must be nonnegative"),
        ({"method": "fft"}, "method must be one of"),
        ({"threads": 0}, "threads must be at least 1"),
        ({"deform": "equal", "method": "cocycle"}, "--deform needs the closed-form method"),
    ],
)
def test_validation_errors(overrides, message) -> None:
    is_valid, errors = validate_run_config(RunConfig().with_overrides(overrides))
    assert not is_valid
    assert any(e.startswith(message) for e in errors)


def test_command_specific_validation() -> None:
    cfg = RunConfig().with_overrides({"modelset": True})
    assert validate_run_config(cfg, "generate")[0] is False
    assert validate_run_config(cfg, "freq")[0] is True
    checked = RunConfig().with_overrides({"cross_check": True, "half_width": 0.0})
    assert validate_run_config(checked, "diffract")[0] is False
    checked = checked.with_overrides({"half_width": 500.0})
    assert validate_run_config(checked, "diffract")[0] is True
