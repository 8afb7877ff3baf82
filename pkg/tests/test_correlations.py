import logging

import numpy as np
import pytest

from fibochain import correlations
from fibochain.correlations import (
    as_pair,
    autocorrelation,
    build_renorm_system,
    closed_form_correlation,
    closure_bound,
    count_pair_correlations,
    covariogram,
    g_eval,
    g_functions,
    nu_pair,
    nu_pair_exact,
    relation_residual,
    relation_terms,
    series_identity_residuals,
    solve_renorm,
    support_points,
    weighted_autocorrelation,
    window_support,
)
from fibochain.errors import ParseError, UnknownLetterError
from fibochain.golden import TAU, GoldenInt, GoldenNum
from fibochain.model_set import Window


@pytest.fixture(scope="module")
def fib_renorm(fib_inflation, fib_spec):
    return solve_renorm(build_renorm_system(fib_inflation, fib_spec))


def test_closed_form_examples(fib_spec) -> None:
    assert nu_pair_exact("aa", 0) == TAU - 1
    assert nu_pair_exact("bb", 0) == 2 - TAU
    assert nu_pair_exact("ab", TAU) == 1 / TAU ** 2
    assert nu_pair_exact("aa", TAU) == 1 / TAU ** 3
    assert nu_pair_exact("ba", 1) == 1 / TAU ** 2
    assert nu_pair_exact("ab", 1) == 0
    assert nu_pair_exact("bb", 1) == 0


def test_pair_symmetry(golden_ints) -> None:
    for z in golden_ints[:20]:
        small = GoldenInt(z.m % 5, z.n % 4)
        assert nu_pair_exact("ab", small) == nu_pair_exact("ba", -small)
        assert autocorrelation(small) == autocorrelation(-small)


def test_autocorrelation_values() -> None:
    assert autocorrelation(0) == pytest.approx(1.0, abs=1e-15)
    # a gap of length 1 is a b tile
    assert autocorrelation(1) == pytest.approx(float(2 - TAU), abs=1e-15)
    assert autocorrelation(GoldenNum(1) / 2) == 0.0


def test_weighted_autocorrelation() -> None:
    ones = {"a": 1.0, "b": 1.0}
    for z in (0, 1, TAU, 1 + TAU):
        assert weighted_autocorrelation(z, ones) == pytest.approx(autocorrelation(z))
    only_a = {"a": 1.0, "b": 0.0}
    assert weighted_autocorrelation(TAU, only_a) == pytest.approx(nu_pair("aa", TAU))


def test_g_functions_are_trapezoids(fib_spec) -> None:
    functions = g_functions(fib_spec)
    lo, hi = functions.support("ab")
    ys = np.linspace(float(lo) - 0.5, float(hi) + 0.5, 41)
    values = functions("ab", ys)
    assert np.all(values >= 0.0)
    assert values[0] == 0.0 and values[-1] == 0.0
    assert np.max(values) == pytest.approx(float(functions.heights[("a", "b")]))
    assert functions("aa", 0.0) == pytest.approx(float(TAU - 1))
    y = -TAU.star()
    assert g_eval("ab", y) == pytest.approx(g_eval("ab", float(y)))
    assert functions.heights[("a", "b")] == 1 / TAU ** 2


def test_nu_is_g_at_the_star_image(fib_spec) -> None:
    functions = g_functions(fib_spec)
    for z in (GoldenInt(0, 1), GoldenInt(1, 0), GoldenInt(1, 1), GoldenInt(-1, 2)):
        if nu_pair_exact("ab", z) > 0:
            assert nu_pair("ab", z) == pytest.approx(functions("ab", float(z.star())))


def test_covariogram() -> None:
    window = Window.closed(0, 1)
    assert covariogram(window, 0.5, normaliser=1) == pytest.approx(0.5)
    assert covariogram(window, GoldenNum(0), normaliser=1) == 1
    assert covariogram(window, 2.0) == 0.0


def test_support_points(fib_spec) -> None:
    support = support_points(fib_spec, ("a", "b"), 3)
    assert TAU in support
    assert GoldenInt(1, 0) not in support
    assert all(abs(float(z)) <= 3 for z in support)


def test_pair_parsing() -> None:
    assert as_pair("ab") == ("a", "b")
    assert as_pair("a,b") == ("a", "b")
    with pytest.raises(ParseError):
        as_pair("abc")
    with pytest.raises(UnknownLetterError):
        nu_pair("ac", 0)


def test_renormalisation_matches_closed_form(fib_renorm) -> None:
    assert len(fib_renorm.system) > 0
    for (alpha, beta, z), value in fib_renorm.table.items():
        assert value == nu_pair_exact((alpha, beta), z)
    assert fib_renorm.exact("aa", 0) + fib_renorm.exact("bb", 0) == 1


def test_renormalisation_extends_beyond_the_bound(fib_renorm) -> None:
    bound = fib_renorm.system.bound
    checked = 0
    for m in range(-12, 13):
        for n in range(-12, 13):
            z = GoldenInt(m, n)
            if abs(z) <= bound or abs(float(z)) > 30:
                continue
            for pair in ("aa", "ab", "ba", "bb"):
                assert fib_renorm.exact(pair, z) == nu_pair_exact(pair, z)
                checked += 1
    assert checked > 100


@pytest.mark.slow
def test_renormalisation_extends_to_a_thousand_values(fib_renorm) -> None:
    bound = fib_renorm.system.bound
    checked = 0
    for m in range(-20, 21):
        for n in range(-20, 21):
            z = GoldenInt(m, n)
            if abs(z) <= bound or abs(float(z)) > 40:
                continue
            for pair in ("aa", "ab", "ba", "bb"):
                assert fib_renorm.exact(pair, z) == nu_pair_exact(pair, z)
                checked += 1
    assert checked >= 1_000


def test_renormalisation_float_cross_check(fib_renorm) -> None:
    assert fib_renorm.float_deviation is not None
    assert fib_renorm.float_deviation < 1e-9


def test_closed_form_satisfies_the_relations(fib_inflation, fib_spec) -> None:
    correlation = closed_form_correlation(fib_spec)
    for z in (GoldenInt(0, 0), GoldenInt(0, 1), GoldenInt(1, 1), GoldenInt(2, 3), GoldenInt(-1, -1)):
        for pair in ("aa", "ab", "ba", "bb"):
            assert relation_residual(fib_inflation, correlation, pair, z) < 1e-12


def test_reshuffled_renormalisation(reshuffled_inflation) -> None:
    correlation = solve_renorm(build_renorm_system(reshuffled_inflation))
    assert correlation.exact("aa", 0) == TAU - 1
    assert correlation.exact("bb", 0) == 2 - TAU
    assert all(value >= 0 for value in correlation.table.values())
    # bb is a legal factor of this rule
    assert correlation.exact("bb", 1) > 0


def test_sampled_support_records_unobserved_pairs(fib_inflation) -> None:
    system = build_renorm_system(fib_inflation)
    assert system.support == "sample"
    # a long realization sees every pair in the support
    assert all(nu_pair_exact(f"{g}{d}", w) == 0 for g, d, w in system.unsampled)


def test_short_sample_logs_the_pairs_it_missed(
    fib_inflation, fib_spec, monkeypatch, caplog
) -> None:
    full = window_support(fib_spec, closure_bound(fib_inflation))
    missing = next(
        key
        for key in full
        if any(
            (g, d, w) == key
            for other in full
            if other != key
            for _, g, d, w in relation_terms(fib_inflation, *other)
        )
    )
    reduced = [key for key in full if key != missing]
    monkeypatch.setattr(correlations, "sampled_support", lambda inflation, bound, seed: reduced)

    with caplog.at_level(logging.DEBUG, logger=correlations.logger.name):
        system = build_renorm_system(fib_inflation)

    assert missing in system.unsampled
    assert missing not in system.index
    assert "not observed in the sample" in caplog.text


def test_table_frame(fib_renorm) -> None:
    frame = fib_renorm.table_frame([0, TAU, 1], pairs=["ab"])
    assert list(frame.columns) == ["z_float", "m", "n", "pair", "nu"]
    assert frame["nu"].tolist() == pytest.approx([0.0, float(1 / TAU ** 2), 0.0])


def test_series_identity_report() -> None:
    report = series_identity_residuals(TAU, terms=20)
    assert report["nu"] == pytest.approx(autocorrelation(TAU))
    # general z: neither reading reproduces nu(tau) = 1/tau
    assert report["as_printed"] > 0.1 and report["rescaled"] > 0.1
    assert report["satisfied"] is None
    # both sides vanish on the edge of the support
    assert series_identity_residuals(TAU - 1, terms=20)["satisfied"] == "both"


@pytest.mark.slow
def test_counting_matches_closed_form(fib_spec, large_patch) -> None:
    counts = count_pair_correlations(fib_spec, points=large_patch, bound=10)
    for row in counts.itertuples():
        z = GoldenInt(int(row.m), int(row.n))
        assert row.nu == pytest.approx(nu_pair(row.pair, z), abs=1e-3)
