import numpy as np
import pytest

from fibochain.errors import ParseError, UnknownLetterError, WindowError
from fibochain.golden import TAU, GoldenInt, GoldenNum
from fibochain.model_set import (
    ModelSetSpec,
    PatchSpec,
    Window,
    asymptotic_pair_difference,
    brute_force_points,
    coding_window,
    cut_and_project,
    difference_set_member,
    difference_window,
    first_points_by_modulus,
    inflate_points,
    is_legal,
    parse_window,
    patch_frequency,
    realize_tiling,
    star_discrepancy,
    weyl_discrepancy,
    word_frequencies,
)

W_PRIME = ModelSetSpec.from_window(parse_window("[-1, t-1)"))


def test_default_windows(fib_spec) -> None:
    assert fib_spec.window("a") == Window(TAU - 2, TAU - 1, False, True)
    assert fib_spec.window("b") == Window(GoldenNum(-1), TAU - 2, False, True)
    assert fib_spec.volume == TAU
    assert fib_spec.volume_ratios() == {"a": TAU - 1, "b": 2 - TAU}


def test_window_validation() -> None:
    with pytest.raises(WindowError):
        Window(GoldenNum(1), GoldenNum(1))
    with pytest.raises(WindowError):
        ModelSetSpec.from_window(parse_window("(-1, 1]"))
    with pytest.raises(ParseError):
        parse_window("-1, 1")


def test_cut_and_project_example(fib_spec) -> None:
    points = cut_and_project(fib_spec, "[0, 5]")
    assert [x for x, _ in points.points()] == [
        GoldenInt(0, 0),
        GoldenInt(0, 1),
        GoldenInt(1, 1),
        GoldenInt(1, 2),
    ]
    assert points.word() == "abaa"
    assert points.gaps() == [TAU, 1, TAU]


def test_primed_window_boundary_points() -> None:
    points = cut_and_project(W_PRIME, "[-2, 0)")
    xs = [x for x, _ in points.points()]
    assert GoldenInt(-1, 0) in xs
    assert GoldenInt(0, -1) not in xs


def test_asymptotic_pair(fib_spec) -> None:
    only_first, only_second = asymptotic_pair_difference(fib_spec, W_PRIME, "[-10, 10]")
    assert only_first == [GoldenInt(0, -1)]
    assert only_second == [GoldenInt(-1, 0)]


def test_region_between_points_is_empty(fib_spec) -> None:
    assert len(cut_and_project(fib_spec, "(0, t)")) == 0


def test_unbounded_region_is_rejected(fib_spec) -> None:
    with pytest.raises(WindowError):
        cut_and_project(fib_spec, None)


@pytest.mark.parametrize("region, bound", [("[-5, 5]", 10), ("(-20, 20]", 36), ("[3, 4+t)", 12)])
def test_enumeration_matches_brute_force(fib_spec, region, bound) -> None:
    fast = cut_and_project(fib_spec, region).points()
    slow = brute_force_points(fib_spec, parse_window(region), bound)
    assert fast == slow


def test_gaps_and_word(fib_spec, fibonacci) -> None:
    points = cut_and_project(fib_spec, (0, 2000))
    assert set(points.gaps()) == {TAU, GoldenInt(1, 0)}
    assert fibonacci.apply("a", 20).startswith(points.word())
    assert np.min(np.diff(points.positions)) >= 1 - 1e-12


def test_realized_tiling_is_the_model_set(fib_spec, fibonacci) -> None:
    tiling = realize_tiling(fibonacci, "a|a", 30.0)
    model = cut_and_project(fib_spec, (-30, 30))
    assert tiling.points() == model.points()


def test_inflation_maps_to_the_partner_window(fib_spec, fib_inflation) -> None:
    parents = cut_and_project(fib_spec, (-50, 50))
    children = inflate_points(parents, fib_inflation)
    keep = np.abs(children.positions) <= 40
    expected = cut_and_project(W_PRIME, (-40, 40))
    assert children.mask(keep).points() == expected.points()


def test_coding_windows(fib_spec) -> None:
    assert coding_window("a", 0) == Window(1 - TAU, 2 - TAU, True, False)
    assert coding_window("b", 0) == Window(2 - TAU, GoldenNum(1), True, False)
    x = GoldenInt(3, -2)
    assert coding_window("a", x) == coding_window("a", 0).translate(x.star())
    with pytest.raises(UnknownLetterError):
        coding_window("c", 0)


def test_patch_frequency_examples(fib_spec) -> None:
    assert patch_frequency(PatchSpec.parse("a@0")) == TAU - 1
    assert patch_frequency(PatchSpec.parse("b@0")) == 2 - TAU
    assert patch_frequency(PatchSpec.parse("a@0 a@1*t")) == 1 / TAU ** 3
    assert patch_frequency(PatchSpec.parse("a@0 a@1")) == 0
    assert patch_frequency(PatchSpec.parse("")) == 1


def test_legality() -> None:
    assert is_legal(PatchSpec.parse("a@0 b@t"))
    assert patch_frequency(PatchSpec.parse("a@0 b@t")) == 1 / TAU ** 2
    assert not is_legal(PatchSpec.parse("a@0 a@1"))
    assert is_legal(PatchSpec())


def test_single_tile_frequencies_sum_to_one(fib_spec) -> None:
    assert patch_frequency(PatchSpec.parse("a@0")) + patch_frequency(PatchSpec.parse("b@0")) == 1


def test_patch_frequency_is_translation_invariant(golden_ints) -> None:
    patch = PatchSpec.parse("a@0 b@t a@1+t")
    value = patch_frequency(patch)
    assert value > 0
    for t in golden_ints[:20]:
        assert patch_frequency(patch.translate(t)) == value


def test_aa_frequency_matches_counting(fibonacci) -> None:
    word = fibonacci.apply("a", 25)
    count = sum(1 for i in range(len(word) - 1) if word[i : i + 2] == "aa")
    assert count / len(word) == pytest.approx(float(1 / TAU ** 3), abs=1e-3)


def test_word_frequencies(fib_spec) -> None:
    freqs = word_frequencies(fib_spec, 2)
    assert freqs == {"aa": 1 / TAU ** 3, "ab": 1 / TAU ** 2, "ba": 1 / TAU ** 2}
    assert sum(word_frequencies(fib_spec, 5).values(), GoldenNum(0)) == 1
    assert len(word_frequencies(fib_spec, 7)) == 8


def test_patch_parse_errors() -> None:
    with pytest.raises(ParseError):
        PatchSpec.parse("a0")
    with pytest.raises(ParseError):
        PatchSpec.parse("a@0 b@0")


def test_difference_set_membership(fib_spec) -> None:
    assert difference_set_member(GoldenInt(0, 0), "a", "a")
    # an a at 0 is followed by a b at tau
    assert difference_set_member(TAU, "a", "b")
    assert not difference_set_member(TAU, "b", "a")
    assert difference_window("a", "b", fib_spec) == Window(-TAU, 0, False, False)
    assert difference_window("a", "b", fib_spec).contains(1 - TAU)
    assert not difference_set_member(GoldenInt(10**6, 0), "a", "b")
    assert not difference_set_member(GoldenNum(0, 1), "a", "a")


def test_difference_set_matches_points(fib_spec) -> None:
    points = cut_and_project(fib_spec, (-30, 30))
    pairs = set()
    for x, s in points.points():
        for y, t in points.points():
            if abs(float(y - x)) <= 4:
                pairs.add((s, t, y - x))
    for alpha, beta, z in pairs:
        assert difference_set_member(z, alpha, beta)


def test_single_point_discrepancy() -> None:
    assert 0 < star_discrepancy(np.array([0.3])) <= 1
    assert star_discrepancy(np.array([])) == 0.0


def test_first_points_by_modulus(fib_spec) -> None:
    m, n = first_points_by_modulus(fib_spec, 3)
    xs = [GoldenInt(int(a), int(b)) for a, b in zip(m, n)]
    # ties in |x| go to the positive point
    assert xs == [0, TAU, GoldenInt(0, -1)]


@pytest.mark.slow
def test_equidistribution(fib_spec) -> None:
    small = weyl_discrepancy(fib_spec, 1_000)
    large = weyl_discrepancy(fib_spec, 10_000)
    assert large < 0.02
    assert large < small
    assert weyl_discrepancy(fib_spec, 10_000, method="L2-star") < 0.02
