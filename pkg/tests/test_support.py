import io
import json
import logging

import numpy as np
import pytest

from fibochain.chart_data import (
    prepare_disk_chart,
    prepare_spectrum_chart,
    prepare_window_chart,
    render_chart,
)
from fibochain.diffraction import enumerate_peaks, product_2d_frame
from fibochain.exporters import frame_to_csv, spectrum_to_json
from fibochain.golden import TAU, GoldenNum
from fibochain.linalg import nullspace, solve, to_matrix
from fibochain.log_utils import SUCCESS, configure_logging, log_success
from fibochain.window_ifs import build_graph_ifs, iterate_windows
from fibochain.workers import chunked, parallel_map, split_range, thread_cap


def test_nullspace() -> None:
    # second row is tau times the first
    matrix = to_matrix([[1, TAU, 2], [TAU, TAU + 1, 2 * TAU]])
    basis = nullspace(matrix)
    assert len(basis) == 2
    for vec in basis:
        for row in matrix:
            assert sum((a * b for a, b in zip(row, vec)), GoldenNum(0)) == 0


def test_solve() -> None:
    matrix = to_matrix([[TAU, 1], [1, 0]])
    x = solve(matrix, [GoldenNum(1), GoldenNum(0)])
    assert x == [0, 1]
    with pytest.raises(ValueError):
        solve(to_matrix([[1, TAU], [TAU, TAU + 1]]), [GoldenNum(1), GoldenNum(1)])


def test_spectrum_json_records(fib_spec, tmp_path) -> None:
    spectrum = enumerate_peaks(fib_spec, kmax=2, imin=1e-2)
    path = tmp_path / "spectrum.json"
    text = spectrum_to_json(spectrum, path)
    assert path.read_text(encoding="utf-8") == text
    records = json.loads(text)
    assert len(records) == len(spectrum)
    assert set(records[0]) == {"m", "n", "k", "re", "im", "I"}
    assert np.allclose([r["I"] for r in records], spectrum.intensities)


def test_csv_floats_are_stable(fib_spec) -> None:
    frame = enumerate_peaks(fib_spec, kmax=1, imin=1e-2).to_frame()
    assert frame_to_csv(frame) == frame_to_csv(frame.copy())
    assert frame_to_csv(frame).splitlines()[0] == "m,n,k,re,im,I"


def test_chart_configs(fib_spec, fib_inflation) -> None:
    spectrum = enumerate_peaks(fib_spec, kmax=2, imin=1e-2)
    bar = prepare_spectrum_chart(spectrum)
    assert bar["type"] == "bar"
    assert min(bar["data"]["x"]) >= 0
    disk = prepare_disk_chart(product_2d_frame(spectrum, 1e-2))
    assert disk["type"] == "disk"
    approx = iterate_windows(build_graph_ifs(fib_inflation), "hull", 2)
    strips = prepare_window_chart(approx)
    assert set(strips["data"]["rows"]) == {"a", "b"}
    assert "depth 2" in strips["layout"]["title"]


def test_empty_spectrum_chart(fib_spec) -> None:
    chart = prepare_spectrum_chart(enumerate_peaks(fib_spec, kmax=0.1, imin=0.9))
    assert "error" in chart
    with pytest.raises(ValueError):
        render_chart(chart, "unused.svg")


def test_svg_output_is_deterministic(fib_spec, tmp_path) -> None:
    chart = prepare_spectrum_chart(enumerate_peaks(fib_spec, kmax=2, imin=1e-2))
    first, second = tmp_path / "one.svg", tmp_path / "two.svg"
    render_chart(chart, first)
    render_chart(chart, second)
    assert first.read_bytes() == second.read_bytes()
    assert first.read_text().lstrip().startswith("<?xml")


def test_parallel_map_preserves_order(monkeypatch) -> None:
    monkeypatch.setenv("FIBOCHAIN_THREADS", "4")
    assert thread_cap() == 4
    assert parallel_map(lambda x: x * x, list(range(20))) == [x * x for x in range(20)]
    monkeypatch.setenv("FIBOCHAIN_THREADS", "1")
    assert parallel_map(str, [1, 2]) == ["1", "2"]


def test_invalid_thread_cap_falls_back(monkeypatch) -> None:
    monkeypatch.setenv("FIBOCHAIN_THREADS", "0")
    assert thread_cap() >= 1


def test_split_range_and_chunked() -> None:
    parts = split_range(-5, 14, 4)
    assert [x for r in parts for x in r] == list(range(-5, 15))
    assert split_range(3, 2, 4) == []
    assert split_range(0, 1, 8) == [range(0, 1), range(1, 2)]
    assert chunked([1, 2, 3, 4, 5], 2) == [[1, 2], [3, 4], [5]]


def test_glyph_log_format() -> None:
    stream = io.StringIO()
    logger = configure_logging(stream=stream)
    log_success(logging.getLogger("fibochain.test"), "%d peaks", 7)
    logging.getLogger("fibochain.test").debug("hidden")
    lines = stream.getvalue().splitlines()
    assert len(lines) == 1
    assert lines[0].endswith("✅ 7 peaks")
    assert lines[0].startswith("[")
    configure_logging(quiet=True, stream=stream)
    assert logger.level == SUCCESS
