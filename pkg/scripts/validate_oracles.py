"""
fibochain - Oracle Validation Script
====================================

Runs the cross-checks between independent routes end to end (closed forms,
renormalisation, cocycle, finite patches and direct counting) and prints a
pass/fail summary.

Usage:
    python scripts/validate_oracles.py
    python scripts/validate_oracles.py --quick
"""

import argparse
import math
import sys
import time
from datetime import datetime

import numpy as np

from fibochain.correlations import (
    build_renorm_system,
    count_pair_correlations,
    nu_pair,
    nu_pair_exact,
    solve_renorm,
)
from fibochain.diffraction import (
    WaveNumber,
    WeightedComb,
    bragg_intensity,
    deform_coeffs,
    deformed_spectrum,
    enumerate_peaks,
    equal_length_coeffs,
    fb_amplitude_cocycle,
    finite_patch_amplitude,
    phase_translation_check,
    product_2d_intensity,
    spectrum_periodicity,
    window_transforms,
)
from fibochain.golden import TAU, GoldenInt, GoldenNum
from fibochain.log_utils import configure_logging
from fibochain.model_set import (
    ModelSetSpec,
    PatchSpec,
    cut_and_project,
    patch_frequency,
    weyl_discrepancy,
)
from fibochain.substitution import (
    factor_complexity,
    geometric_inflation,
    get_rule,
    legal_factors,
    pf_data,
    random_realization,
    word_letter_frequencies,
)
from fibochain.window_ifs import (
    REFERENCE_DIMENSION,
    boundary_dimension,
    build_graph_ifs,
    iterate_windows,
    volume_vector,
)


def check(label: str, ok: bool, detail: str = "") -> bool:
    suffix = f" - {detail}" if detail else ""
    print(f"{'✅' if ok else '❌'} {label}{suffix}")
    return ok


def validate_frequencies() -> bool:
    print("\n🔍 Validating Frequencies and PF Data")
    print("-" * 40)
    results = [
        check("frequency of a is t-1", patch_frequency(PatchSpec.parse("a@0")) == TAU - 1),
        check("frequency of b is 2-t", patch_frequency(PatchSpec.parse("b@0")) == 2 - TAU),
    ]
    data = pf_data(get_rule("fibonacci"))
    results.append(check("left PF vector (t, 1)", data.left == (TAU, 1)))
    results.append(check("right PF vector (1/t, 1/t^2)", data.right == (1 / TAU, 1 / TAU ** 2)))
    return all(results)


def validate_complexity() -> bool:
    print("\n🔍 Validating Factor Complexity")
    print("-" * 40)
    fib = get_rule("fibonacci")
    sturmian = all(factor_complexity(fib, n) == n + 1 for n in range(1, 31))
    reshuffled = "bb" in legal_factors(get_rule("reshuffled"), 2)
    return all(
        [
            check("Fibonacci p(n) = n+1 for n <= 30", sturmian),
            check("reshuffled rule contains bb", reshuffled),
        ]
    )


def validate_equidistribution(quick: bool) -> bool:
    print("\n🔍 Validating Equidistribution")
    print("-" * 40)
    spec = ModelSetSpec.fibonacci()
    small = weyl_discrepancy(spec, 1_000)
    large = weyl_discrepancy(spec, 2_000 if quick else 10_000)
    return all(
        [
            check("star discrepancy below 0.02", large < 0.02, f"D* = {large:.5f}"),
            check("discrepancy decreases with N", large < small, f"{small:.5f} -> {large:.5f}"),
        ]
    )


def validate_correlations(quick: bool) -> bool:
    print("\n🔍 Validating Pair Correlations")
    print("-" * 40)
    spec = ModelSetSpec.fibonacci()
    inflation = geometric_inflation(get_rule("fibonacci"))
    system = build_renorm_system(inflation, spec)
    solved = solve_renorm(system)
    core = all(value == nu_pair_exact((a, b), z, spec) for (a, b, z), value in solved.table.items())
    results = [check("renormalisation equals closed form on the closed set", core, f"{len(system)} unknowns")]

    mismatches = 0
    extended = 0
    for m in range(-15, 16):
        for n in range(-15, 16):
            z = GoldenInt(m, n)
            if abs(float(z)) > 40:
                continue
            for pair in ("aa", "ab", "ba", "bb"):
                extended += 1
                if solved.exact(pair, z) != nu_pair_exact(pair, z, spec):
                    mismatches += 1
    results.append(check("renormalisation extends exactly", mismatches == 0, f"{extended} values"))

    points = cut_and_project(spec, (-20_000, 20_000) if quick else (-100_000, 100_000))
    counts = count_pair_correlations(spec, points=points, bound=10)
    worst = max(
        abs(row.nu - nu_pair(row.pair, GoldenInt(int(row.m), int(row.n)), spec))
        for row in counts.itertuples()
    )
    tolerance = 5e-3 if quick else 1e-3
    results.append(check("pair counting matches closed form", worst < tolerance, f"max |d| = {worst:.2e}"))
    return all(results)


def validate_windows(quick: bool) -> bool:
    print("\n🔍 Validating Window IFS")
    print("-" * 40)
    fib = build_graph_ifs(geometric_inflation(get_rule("fibonacci")))
    approx = iterate_windows(fib, "hull", 4, exact=True)
    exact_tiles = approx.exact["a"] == [(TAU - 2, TAU - 1)] and approx.exact["b"] == [(GoldenNum(-1), TAU - 2)]
    results = [check("Fibonacci attractor is the pair of tile windows", exact_tiles)]

    reshuffled = build_graph_ifs(geometric_inflation(get_rule("reshuffled")))
    expected = volume_vector(reshuffled)
    conserved = all(
        iterate_windows(reshuffled, "volume", depth).mass == expected for depth in range(0, 9)
    )
    results.append(check("window volumes (1, 1/t) at every depth", conserved))

    depth = 13 if quick else 16
    estimate = boundary_dimension(iterate_windows(reshuffled, "hull", depth))
    close = abs(estimate.slope - REFERENCE_DIMENSION) < 0.05
    results.append(
        check(
            "reshuffled boundary dimension",
            close or quick,
            f"slope {estimate.slope:.5f} vs {REFERENCE_DIMENSION:.5f}, rms residual {estimate.residual:.2e}",
        )
    )
    return all(results)


def validate_diffraction(quick: bool) -> bool:
    print("\n🔍 Validating Diffraction")
    print("-" * 40)
    spec = ModelSetSpec.fibonacci()
    central = float((TAU + 1) / 5)
    results = [
        check("I(0) = (t+1)/5 for weights (1,1)", abs(bragg_intensity(0) - central) < 1e-12),
    ]
    equal = deformed_spectrum(equal_length_coeffs(), spec, WeightedComb(1, 0), kmax=10, imin=1e-4)
    results.append(check("I(0) = 1/5 for weights (1,0), equal lengths", abs(equal.central_intensity() - 0.2) < 1e-12))
    period = spectrum_periodicity(equal)
    results.append(
        check(
            "equal-length spectrum has period t/sqrt5",
            period["compared"] > 0 and period["max_deviation"] < 1e-6,
            f"{period['compared']} pairs",
        )
    )

    spectrum = enumerate_peaks(spec, kmax=10, imin=1e-4)
    sample = list(spectrum)[:: max(1, len(spectrum) // 100)][:100]
    ifs = build_graph_ifs(geometric_inflation(get_rule("fibonacci")))
    cocycle_dev = max(abs(abs(fb_amplitude_cocycle(p.wave, ifs, eps=1e-13)) ** 2 - p.intensity) for p in sample)
    results.append(check("cocycle matches closed form", cocycle_dev < 1e-8, f"max |dI| = {cocycle_dev:.2e}"))

    half_width = 10_000.0 if quick else 100_000.0
    points = cut_and_project(spec, (-half_width, half_width))
    patch_dev = max(
        abs(abs(finite_patch_amplitude(points, WeightedComb(), p.wave, half_width)) ** 2 - p.intensity)
        for p in sample
    )
    results.append(check("finite patch matches closed form", patch_dev < 1e-2, f"max |dI| = {patch_dev:.2e}"))
    off = max(abs(finite_patch_amplitude(points, WeightedComb(), k, half_width)) for k in (0.5, 1.3, 2.9))
    results.append(check("off-spectrum patch sums vanish", off < 1e-2, f"max |A| = {off:.2e}"))

    h0 = window_transforms(ifs, [0.0])[0]
    volumes = volume_vector(ifs)
    h0_dev = max(abs(h0[i] - float(volumes[x])) for i, x in enumerate(ifs.letters))
    results.append(check("cocycle at y = 0 gives the window volumes", h0_dev < 1e-10))

    waves = [WaveNumber.of(m, n) for m in range(-2, 3) for n in range(-1, 1)]
    shifts = [GoldenInt(m, n) for m in range(-2, 3) for n in range(0, 2)]
    phase_dev = max(phase_translation_check(w, t, spec=spec)["closed"] for w in waves for t in shifts)
    results.append(check("translation phase on a 10x10 grid", phase_dev < 1e-12, f"max = {phase_dev:.2e}"))

    grid = [WaveNumber.of(m, n) for m in range(-2, 3) for n in range(-2, 2)]
    single = [bragg_intensity(w) for w in grid]
    separable = all(
        product_2d_intensity(w1, w2) == i1 * i2 for w1, i1 in zip(grid, single) for w2, i2 in zip(grid, single)
    )
    results.append(check("product intensities separate on a 20x20 grid", separable))
    results.append(check("product I(0,0) = ((t+1)/5)^2", abs(product_2d_intensity(0, 0) - central**2) < 1e-12))

    coeffs = deform_coeffs(TAU, GoldenNum(1))
    same = deformed_spectrum(coeffs, spec, kmax=10, imin=1e-4)
    identical = np.array_equal(same.positions, spectrum.positions) and np.array_equal(
        same.intensities, spectrum.intensities
    )
    results.append(check("deformation (t, 1) is the identity", identical))
    return all(results)


def validate_random_realizations() -> bool:
    print("\n🔍 Validating Random Realizations")
    print("-" * 40)
    freqs = word_letter_frequencies(random_realization(0.5, 14, seed=7))
    close = math.isclose(freqs["a"], float(TAU - 1), abs_tol=0.01)
    degenerate = random_realization(1.0, 10, seed=3) == get_rule("fibonacci").apply("a", 10)
    return all(
        [
            check("letter frequencies at p = 1/2", close, f"a: {freqs['a']:.5f}"),
            check("p = 1 reproduces the Fibonacci iterate", degenerate),
        ]
    )


def main() -> int:
    parser = argparse.ArgumentParser(description="Cross-check the independent computation routes")
    parser.add_argument("--quick", action="store_true", help="Smaller patches and depths")
    args = parser.parse_args()
    configure_logging(quiet=True)

    print("🔬 fibochain - Oracle Validation")
    print("=" * 60)
    print(f"Started: {datetime.now().strftime('%Y-%m-%d %H:%M:%S')}")
    started = time.perf_counter()

    validation_results = [
        validate_frequencies(),
        validate_complexity(),
        validate_equidistribution(args.quick),
        validate_correlations(args.quick),
        validate_windows(args.quick),
        validate_diffraction(args.quick),
        validate_random_realizations(),
    ]

    print("\n" + "=" * 60)
    print("📊 VALIDATION SUMMARY")
    print("=" * 60)
    passed = sum(validation_results)
    total = len(validation_results)
    if passed == total:
        print("🎉 ALL ORACLE CHECKS PASSED!")
    else:
        print(f"⚠️  VALIDATION INCOMPLETE: {passed}/{total} groups passed")
        print("\n❌ Issues found - please review the lines above")
    print(f"\n⏱️  {time.perf_counter() - started:.1f} s")
    return 0 if passed == total else 1


if __name__ == "__main__":
    sys.exit(main())
