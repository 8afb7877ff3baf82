import functools
import io
import json

import pandas as pd
import pytest

from fibochain import cli
from fibochain.cli import EXIT_NUMERIC, EXIT_OK, EXIT_USAGE, main
from fibochain.window_ifs import iterate_windows, sweep_windows


@pytest.fixture(autouse=True)
def isolated(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    monkeypatch.delenv("FIBOCHAIN_CONFIG", raising=False)
    monkeypatch.delenv("FIBOCHAIN_THREADS", raising=False)


def test_generate_word(capsys) -> None:
    assert main(["generate", "--steps", "3", "--seed-word", "a|a"]) == EXIT_OK
    assert capsys.readouterr().out.strip() == "abaab|abaab"


def test_generate_model_set(capsys) -> None:
    assert main(["generate", "--modelset", "--window", "(-1,t-1]", "--region", "[0,5]"]) == EXIT_OK
    out = capsys.readouterr().out
    lines = out.strip().splitlines()
    assert len(lines) == 5
    assert "type" in lines[0]


def test_generate_model_set_needs_a_region(capsys) -> None:
    assert main(["generate", "--modelset"]) == EXIT_USAGE
    assert "--modelset needs --region" in capsys.readouterr().err


def test_generate_random_realization(capsys) -> None:
    assert main(["generate", "--random-p", "1", "--steps", "5"]) == EXIT_OK
    assert capsys.readouterr().out.strip() == "abaababaabaab"


def test_freq(capsys) -> None:
    assert main(["freq", "a@0"]) == EXIT_OK
    assert capsys.readouterr().out.strip() == "t-1 ≈ 0.61803"
    assert main(["freq", "a@0 a@1*t"]) == EXIT_OK
    assert capsys.readouterr().out.strip() == "2*t-3 ≈ 0.23607"
    assert main(["freq"]) == EXIT_OK
    assert capsys.readouterr().out.strip() == "1"
    assert main(["freq", "a@0 a@1"]) == EXIT_OK
    assert capsys.readouterr().out.strip() == "0"


def test_freq_parse_error_is_a_usage_error(capsys) -> None:
    assert main(["freq", "a@0 b@0"]) == EXIT_USAGE
    assert "❌" in capsys.readouterr().err


def test_correlate_closed_form(capsys) -> None:
    assert main(["correlate", "--pair", "ab", "--z", "0+1*t", "--z", "1"]) == EXIT_OK
    out = capsys.readouterr().out.splitlines()
    assert out[0] == "z_float,m,n,pair,nu"
    assert out[1].endswith(",ab,0.381966011250105")
    assert out[2].endswith(",ab,0")


def test_correlate_renorm_writes_csv(tmp_path, capsys) -> None:
    assert main(["correlate", "--route", "renorm", "--bound", "3", "--out-dir", str(tmp_path)]) == EXIT_OK
    frame = pd.read_csv(tmp_path / "correlations.csv")
    origin = frame[(frame["m"] == 0) & (frame["n"] == 0)]
    assert origin.loc[origin["pair"] == "aa", "nu"].iloc[0] == pytest.approx(0.618033988749895)
    assert capsys.readouterr().out == ""


def test_correlate_closed_form_needs_fibonacci(capsys) -> None:
    assert main(["correlate", "--rule", "reshuffled"]) == EXIT_USAGE


def test_diffract_default(capsys) -> None:
    assert main(["diffract", "--kmax", "3", "--imin", "1e-2"]) == EXIT_OK
    out = capsys.readouterr().out
    assert out.splitlines()[0] == "m,n,k,re,im,I"
    assert "I(0) = 0.523606797749979" in out


def test_diffract_equal_length(capsys) -> None:
    code = main(["diffract", "--weights", "1,0", "--deform", "equal", "--kmax", "4", "--imin", "1e-3"])
    assert code == EXIT_OK
    out = capsys.readouterr().out
    assert "I(0) = 0.2" in out
    assert "period τ/√5: PASS" in out


def test_diffract_writes_files(tmp_path, capsys) -> None:
    args = ["diffract", "--kmax", "2", "--imin", "1e-2", "--out-dir", str(tmp_path), "--product"]
    assert main(args) == EXIT_OK
    records = json.loads((tmp_path / "spectrum.json").read_text())
    frame = pd.read_csv(tmp_path / "spectrum.csv")
    assert len(records) == len(frame) > 0
    assert (tmp_path / "spectrum.svg").exists()
    assert (tmp_path / "product.svg").exists()


def test_diffract_cross_check(capsys) -> None:
    args = ["diffract", "--kmax", "1.5", "--imin", "2e-2", "--cross-check", "--half-width", "2000"]
    assert main(args) == EXIT_OK
    out = capsys.readouterr().out
    frame = pd.read_csv(io.StringIO(out.split("I(0)")[0]))
    assert "patch_I" in frame.columns
    assert (frame["patch_I"] - frame["I"]).abs().max() < 1e-2


def test_diffract_cocycle_for_reshuffled(capsys) -> None:
    assert main(["diffract", "--rule", "reshuffled", "--method", "cocycle", "--kmax", "2", "--imin", "1e-2"]) == EXIT_OK
    assert "I(0) = 0.5236" in capsys.readouterr().out


def test_diffract_closed_form_needs_fibonacci(capsys) -> None:
    assert main(["diffract", "--rule", "reshuffled"]) == EXIT_USAGE


def test_diffract_rejects_bad_thresholds(capsys) -> None:
    assert main(["diffract", "--imin", "0"]) == EXIT_USAGE
    assert main(["diffract", "--kmax", "-1"]) == EXIT_USAGE
    assert main(["diffract", "--deform", "equal", "--method", "cocycle"]) == EXIT_USAGE


def test_windows(tmp_path, capsys) -> None:
    assert main(["windows", "--depth", "6", "--out-dir", str(tmp_path)]) == EXIT_OK
    out = capsys.readouterr().out
    assert out.startswith("box-count slope")
    assert abs(float(out.split()[2])) < 0.1
    frame = pd.read_csv(tmp_path / "windows.csv")
    assert list(frame["letter"]) == ["a", "b"]
    assert (tmp_path / "windows.svg").exists()


def test_windows_depth_zero(capsys) -> None:
    assert main(["windows", "--rule", "reshuffled", "--depth", "0"]) == EXIT_OK
    assert "box-count" not in capsys.readouterr().out


def test_windows_too_shallow_for_a_fit(capsys) -> None:
    assert main(["windows", "--rule", "reshuffled", "--depth", "3"]) == EXIT_NUMERIC


def test_windows_beyond_the_interval_limit_are_streamed(tmp_path, monkeypatch, capsys) -> None:
    monkeypatch.setattr(cli, "iterate_windows", functools.partial(iterate_windows, max_intervals=200))
    monkeypatch.setattr(cli, "sweep_windows", functools.partial(sweep_windows, max_intervals=200))
    args = ["windows", "--rule", "reshuffled", "--depth", "10", "--out-dir", str(tmp_path)]
    assert main(args) == EXIT_OK
    lines = capsys.readouterr().out.splitlines()
    assert lines[0].startswith("box-count slope")
    assert [line.split(":")[0] for line in lines[1:]] == ["a", "b"]
    assert "overlap" in lines[1]
    assert not (tmp_path / "windows.csv").exists()


def test_usage_errors(capsys) -> None:
    assert main([]) == EXIT_USAGE
    assert main(["transform"]) == EXIT_USAGE
    assert main(["generate", "--steps", "x"]) == EXIT_USAGE


def test_profile_from_toml(tmp_path, capsys) -> None:
    (tmp_path / "fibochain.toml").write_text(
        'default_profile = "short"\n\n[profiles.short]\nsteps = 2\nseed_word = "a|a"\n'
    )
    assert main(["generate"]) == EXIT_OK
    assert capsys.readouterr().out.strip() == "aba|aba"
    assert main(["generate", "--steps", "1"]) == EXIT_OK
    assert capsys.readouterr().out.strip() == "ab|ab"
    assert main(["--profile", "missing", "generate"]) == EXIT_USAGE
