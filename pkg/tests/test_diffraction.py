import math

import numpy as np
import pytest

from fibochain.diffraction import (
    FourierMatrix,
    Spectrum,
    WaveNumber,
    WeightedComb,
    bragg_intensity,
    cocycle_spectrum,
    deform_coeffs,
    deformed_spectrum,
    enumerate_peaks,
    equal_length_coeffs,
    fb_amplitude_closed,
    fb_amplitude_cocycle,
    finite_patch_amplitude,
    inflation_closed,
    interval_transform,
    phase_translation_check,
    product_2d_frame,
    product_2d_intensity,
    spectrum_periodicity,
    window_transforms,
)
from fibochain.errors import SpectrumError
from fibochain.golden import SQRT5, TAU, GoldenInt, GoldenNum
from fibochain.model_set import cut_and_project
from fibochain.window_ifs import build_graph_ifs, volume_vector

CENTRAL = float((TAU + 1) / 5)


@pytest.fixture(scope="module")
def fib_ifs(fib_inflation):
    return build_graph_ifs(fib_inflation)


@pytest.fixture(scope="module")
def patch(fib_spec):
    return cut_and_project(fib_spec, (-3000, 3000))


def test_central_peak(fib_spec) -> None:
    assert bragg_intensity(0) == pytest.approx(CENTRAL, abs=1e-14)
    assert bragg_intensity(0, comb=WeightedComb(1, 0)) == pytest.approx(0.2, abs=1e-14)
    spectrum = enumerate_peaks(fib_spec, kmax=4, imin=1e-3)
    assert spectrum.central_intensity() == pytest.approx(CENTRAL, abs=1e-14)


def test_peaks_are_sorted_and_above_threshold(fib_spec) -> None:
    spectrum = enumerate_peaks(fib_spec, kmax=6, imin=1e-3)
    assert len(spectrum) > 5
    assert np.all(np.diff(spectrum.positions) >= 0)
    assert np.all(spectrum.intensities >= 1e-3)
    assert np.all(np.abs(spectrum.positions) <= 6)
    assert inflation_closed(spectrum, 6, 1e-3)
    assert inflation_closed(spectrum, 6, 1e-3, factor=TAU - 1)


def test_inflation_closure_detects_a_missing_peak(fib_spec) -> None:
    spectrum = enumerate_peaks(fib_spec, kmax=6, imin=1e-3)
    listed = spectrum.lookup()
    images = [
        listed[(w.m, w.n)]
        for w in (p.wave.scaled(TAU) for p in spectrum if p.k != 0)
        if (w.m, w.n) in listed
    ]
    assert images
    thinned = Spectrum([p for p in spectrum if p is not images[0]])
    assert not inflation_closed(thinned, 6, 1e-3)


def test_off_module_wave_numbers_have_no_peak() -> None:
    assert fb_amplitude_closed(GoldenNum(1) / 3) == 0j
    assert WaveNumber.from_exact(GoldenNum(1) / 3) is None
    assert WaveNumber.from_exact(TAU / SQRT5) == WaveNumber.of(0, 1)


def test_float_wave_numbers_are_rejected() -> None:
    with pytest.raises(SpectrumError):
        fb_amplitude_closed(0.5)


def test_threshold_validation(fib_spec) -> None:
    with pytest.raises(SpectrumError):
        enumerate_peaks(fib_spec, imin=0)
    with pytest.raises(SpectrumError):
        enumerate_peaks(fib_spec, kmax=-1)


def test_interval_transform() -> None:
    assert interval_transform(0.0, 2.0, 0.0) == pytest.approx(2.0)
    assert abs(interval_transform(0.0, 1.0, 1.0)) == pytest.approx(0.0, abs=1e-15)
    # ∫_0^1 exp(-πit) dt = 2/(πi)
    assert interval_transform(0.0, 1.0, 0.5) == pytest.approx(2 / (math.pi * 1j))


def test_cocycle_matches_closed_form(fib_spec, fib_ifs) -> None:
    spectrum = enumerate_peaks(fib_spec, kmax=5, imin=1e-3)
    for peak in spectrum:
        cocycle = fb_amplitude_cocycle(peak.wave, fib_ifs, eps=1e-13)
        assert abs(abs(cocycle) ** 2 - peak.intensity) < 1e-8
        assert abs(cocycle - peak.amplitude) < 1e-7


def test_cocycle_spectrum(fib_spec, fib_ifs) -> None:
    closed = enumerate_peaks(fib_spec, kmax=3, imin=1e-2)
    cocycle = cocycle_spectrum(fib_ifs, kmax=3, imin=1e-2)
    assert cocycle.central_intensity() == pytest.approx(CENTRAL, abs=1e-9)
    for peak in closed:
        if peak.intensity > 1.1e-2:
            assert cocycle.intensity_at(peak.wave) == pytest.approx(peak.intensity, abs=1e-8)


def test_window_transforms_at_zero(reshuffled_inflation) -> None:
    ifs = build_graph_ifs(reshuffled_inflation)
    h = window_transforms(ifs, [0.0])
    volumes = volume_vector(ifs)
    assert h[0] == pytest.approx([float(volumes["a"]), float(volumes["b"])])
    spectrum = cocycle_spectrum(ifs, kmax=2, imin=1e-2)
    assert spectrum.central_intensity() == pytest.approx(CENTRAL, abs=1e-9)


def test_fourier_matrix_at_zero_is_the_substitution_matrix(fib_ifs) -> None:
    assert np.allclose(FourierMatrix(fib_ifs)(0.0), np.array(fib_ifs.matrix))


def test_finite_patch_oracle(fib_spec, patch) -> None:
    spectrum = enumerate_peaks(fib_spec, kmax=2, imin=1e-2)
    for peak in list(spectrum)[:8]:
        estimate = finite_patch_amplitude(patch, WeightedComb(), peak.wave, 3000.0)
        assert abs(abs(estimate) ** 2 - peak.intensity) < 1e-2


def test_translation_phase(fib_spec) -> None:
    for wave in (WaveNumber.of(1, 1), WaveNumber.of(-2, 3), WaveNumber.of(0, 1)):
        report = phase_translation_check(wave, GoldenInt(2, 1), spec=fib_spec)
        assert report["closed"] < 1e-12
        assert report["finite_patch"] is None


def test_equal_length_deformation() -> None:
    coeffs = equal_length_coeffs()
    assert coeffs.alpha == 1
    assert coeffs.beta == 2 - TAU
    assert coeffs.position(TAU) == coeffs.position(1) == 3 - TAU
    spectrum = deformed_spectrum(coeffs, kmax=4, imin=1e-3)
    assert spectrum.central_intensity() == pytest.approx(CENTRAL, abs=1e-12)
    assert spectrum.intensity_at(WaveNumber.of(0, 1)) == pytest.approx(CENTRAL, abs=1e-12)


def test_equal_length_spectrum_is_periodic() -> None:
    spectrum = deformed_spectrum(equal_length_coeffs(), comb=WeightedComb(1, 0), kmax=5, imin=1e-4)
    assert spectrum.central_intensity() == pytest.approx(0.2, abs=1e-12)
    report = spectrum_periodicity(spectrum)
    assert report["period"] == pytest.approx(float(TAU) / math.sqrt(5), abs=1e-12)
    assert report["compared"] > 0
    assert report["max_deviation"] < 1e-9


def test_deformed_amplitudes_match_a_deformed_patch(fib_spec, patch) -> None:
    coeffs = deform_coeffs(GoldenNum(2), GoldenNum(1))
    spectrum = deformed_spectrum(coeffs, fib_spec, kmax=2, imin=1e-2)
    for peak in list(spectrum)[:6]:
        estimate = finite_patch_amplitude(patch, WeightedComb(), peak.k, 3000.0, coeffs=coeffs)
        assert abs(abs(estimate) ** 2 - peak.intensity) < 1e-2


def test_undeformed_coefficients_are_the_identity(fib_spec) -> None:
    coeffs = deform_coeffs(TAU, GoldenNum(1))
    assert coeffs.alpha == 1 and coeffs.beta == 0
    plain = enumerate_peaks(fib_spec, kmax=3, imin=1e-3)
    deformed = deformed_spectrum(coeffs, fib_spec, kmax=3, imin=1e-3)
    assert np.array_equal(plain.positions, deformed.positions)
    assert np.array_equal(plain.intensities, deformed.intensities)


def test_invalid_deformations() -> None:
    with pytest.raises(SpectrumError):
        deform_coeffs(0, 1)
    with pytest.raises(SpectrumError):
        deform_coeffs(1.0, -2.0)


def test_weight_parsing() -> None:
    comb = WeightedComb.parse("1, 0.5j")
    assert comb.h_a == 1 and comb.h_b == 0.5j
    with pytest.raises(SpectrumError):
        WeightedComb.parse("1")
    with pytest.raises(SpectrumError):
        WeightedComb.parse("1, x")


def test_closed_form_needs_interval_windows(fib_ifs) -> None:
    with pytest.raises(SpectrumError):
        fb_amplitude_closed(0, spec=fib_ifs)


def test_direct_product(fib_spec) -> None:
    assert product_2d_intensity(0, 0) == pytest.approx(CENTRAL ** 2, abs=1e-14)
    spectrum = enumerate_peaks(fib_spec, kmax=2, imin=1e-2)
    frame = product_2d_frame(spectrum, 1e-2)
    assert list(frame.columns) == ["k1", "k2", "I"]
    assert len(frame) <= len(spectrum) ** 2
    assert (frame["I"] >= 1e-2).all()
    assert frame["I"].max() == pytest.approx(CENTRAL ** 2)


def test_spectrum_frame_columns(fib_spec) -> None:
    frame = enumerate_peaks(fib_spec, kmax=2, imin=1e-2).to_frame()
    assert list(frame.columns) == ["m", "n", "k", "re", "im", "I"]


def test_direct_product_is_separable(fib_spec) -> None:
    waves = [WaveNumber.of(m, n) for m in range(-2, 3) for n in range(-2, 2)]
    single = [bragg_intensity(w) for w in waves]
    for w1, i1 in zip(waves, single):
        for w2, i2 in zip(waves, single):
            assert product_2d_intensity(w1, w2) == i1 * i2


@pytest.mark.slow
def test_off_spectrum_patch_sums_are_small(large_patch) -> None:
    for k in (0.5, 1.3, 2.9):
        assert abs(finite_patch_amplitude(large_patch, WeightedComb(), k, 100_000.0)) < 1e-2


def test_translation_phase_on_a_grid(fib_spec) -> None:
    waves = [WaveNumber.of(m, n) for m in range(-2, 3) for n in range(-1, 1)]
    shifts = [GoldenInt(m, n) for m in range(-2, 3) for n in range(0, 2)]
    assert len(waves) == len(shifts) == 10
    worst = max(phase_translation_check(w, t, spec=fib_spec)["closed"] for w in waves for t in shifts)
    assert worst < 1e-12


@pytest.mark.slow
def test_translation_phase_on_a_large_patch(fib_spec, large_patch) -> None:
    report = phase_translation_check(
        WaveNumber.of(1, 1), GoldenInt(2, 1), points=large_patch, spec=fib_spec, half_width=100_000.0
    )
    assert report["finite_patch"] < 1e-2


@pytest.mark.slow
def test_oracle_triangle_at_one_hundred_wave_numbers(fib_spec, fib_ifs, large_patch) -> None:
    peaks = list(enumerate_peaks(fib_spec, kmax=10, imin=1e-4))
    sample = peaks[:: max(1, len(peaks) // 100)][:100]
    assert len(sample) == 100
    for peak in sample:
        assert abs(peak.wave.value) <= 10
        cocycle = abs(fb_amplitude_cocycle(peak.wave, fib_ifs, eps=1e-13)) ** 2
        assert abs(cocycle - peak.intensity) < 1e-8
        patch = abs(finite_patch_amplitude(large_patch, WeightedComb(), peak.wave, 100_000.0)) ** 2
        assert abs(patch - peak.intensity) < 1e-2
