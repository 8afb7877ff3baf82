"""
Substitution Rules
==================

Symbolic substitution rules on small alphabets, their matrices and
Perron-Frobenius data, word generation around a marker, factor complexity, the
induced geometric inflation with exact tile lengths and child displacements,
and random (local mixture) realizations.

Rule text format is ``"a->ab; b->a"`` (whitespace-insensitive); the tuple form
``"(ab,a)"`` is accepted for two-letter rules on ``a, b``. Built-in names are
listed in ``BUILTIN_RULES``.
"""

import logging
import math
import re
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Dict, FrozenSet, Iterable, List, Optional, Tuple, Union

import numpy as np

from .errors import (
    CycleError,
    IllegalSeedError,
    ParseError,
    UnknownLetterError,
    UnsupportedRuleError,
)
from .golden import GoldenNum, as_golden

logger = logging.getLogger(__name__)

BUILTIN_RULES: Dict[str, str] = {
    "fibonacci": "a->ab; b->a",
    "fibonacci2": "a->ba; b->a",
    "reshuffled": "a->aab; b->ba",
    "reshuffled-mirror": "a->baa; b->ab",
    # further rules sharing the matrix of the squared Fibonacci rule
    "fibonacci-squared": "a->aba; b->ab",
    "fibonacci2-squared": "a->aba; b->ba",
    "fibonacci-fibonacci2": "a->aab; b->ab",
    "fibonacci2-fibonacci": "a->baa; b->ba",
}

DEFAULT_MAX_RADIUS = 100_000


@dataclass(frozen=True)
class Alphabet:
    letters: Tuple[str, ...]

    def __post_init__(self):
        if not self.letters:
            raise ParseError("alphabet must not be empty")
        if len(set(self.letters)) != len(self.letters):
            raise ParseError(f"duplicate letters in alphabet {self.letters}")
        for letter in self.letters:
            if len(letter) != 1:
                raise ParseError(f"letters must be single characters, got {letter!r}")

    def index(self, letter: str) -> int:
        try:
            return self.letters.index(letter)
        except ValueError:
            raise UnknownLetterError(f"unknown letter {letter!r}") from None

    def __len__(self) -> int:
        return len(self.letters)

    def __iter__(self):
        return iter(self.letters)


@dataclass(frozen=True)
class SubstRule:
    """Letter-to-word map; ``images[i]`` is the image of ``alphabet.letters[i]``."""

    alphabet: Alphabet
    images: Tuple[str, ...]
    name: Optional[str] = field(default=None, compare=False)

    def __post_init__(self):
        if len(self.images) != len(self.alphabet):
            raise ParseError("one image per letter is required")
        for letter, image in zip(self.alphabet, self.images):
            if not image:
                raise ParseError(f"image of {letter!r} is empty")
            for c in image:
                if c not in self.alphabet.letters:
                    raise UnknownLetterError(f"image of {letter!r} uses unknown {c!r}")

    @property
    def letters(self) -> Tuple[str, ...]:
        return self.alphabet.letters

    def image(self, letter: str) -> str:
        return self.images[self.alphabet.index(letter)]

    @property
    def _table(self) -> Dict[int, str]:
        return {ord(x): img for x, img in zip(self.alphabet, self.images)}

    def apply(self, word: str, times: int = 1) -> str:
        table = self._table
        for _ in range(times):
            word = word.translate(table)
        return word

    def text(self) -> str:
        return "; ".join(f"{x}->{img}" for x, img in zip(self.alphabet, self.images))

    def __str__(self) -> str:
        return self.name or self.text()


_ARROW_RE = re.compile(r"^\s*(\S)\s*->\s*(\S+)\s*$")
_TUPLE_RE = re.compile(r"^\s*\(\s*([^,\s]+)\s*,\s*([^,\s]+)\s*\)\s*$")


def parse_rule(text: str, name: Optional[str] = None) -> SubstRule:
    """Parse ``"a->ab; b->a"`` or ``"(ab,a)"``."""
    match = _TUPLE_RE.match(text)
    if match:
        return SubstRule(Alphabet(("a", "b")), (match.group(1), match.group(2)), name)

    letters: List[str] = []
    images: List[str] = []
    for part in filter(None, (p.strip() for p in text.split(";"))):
        m = _ARROW_RE.match(part)
        if not m:
            raise ParseError(f"cannot parse rule clause {part!r}")
        letters.append(m.group(1))
        images.append(m.group(2))
    if not letters:
        raise ParseError(f"empty rule {text!r}")
    return SubstRule(Alphabet(tuple(letters)), tuple(images), name)


@lru_cache(maxsize=64)
def get_rule(name_or_text: str) -> SubstRule:
    """Built-in rule by name, otherwise parse inline rule text."""
    key = name_or_text.strip()
    if key in BUILTIN_RULES:
        return parse_rule(BUILTIN_RULES[key], name=key)
    return parse_rule(key)


def as_rule(rule: Union[str, SubstRule]) -> SubstRule:
    return get_rule(rule) if isinstance(rule, str) else rule


def compose(outer: SubstRule, inner: SubstRule) -> SubstRule:
    """The rule x -> outer(inner(x))."""
    if outer.alphabet != inner.alphabet:
        raise UnsupportedRuleError("rules act on different alphabets")
    images = tuple(outer.apply(img) for img in inner.images)
    return SubstRule(outer.alphabet, images)


# -- matrices and PF data ----------------------------------------------------


@dataclass(frozen=True)
class SubstMatrix:
    """``entries[i][j]`` counts letter i in the image of letter j."""

    entries: Tuple[Tuple[int, ...], ...]

    def to_numpy(self) -> np.ndarray:
        return np.array(self.entries, dtype=np.int64)

    def is_primitive(self) -> bool:
        size = len(self.entries)
        power = np.linalg.matrix_power(self.to_numpy(), (size - 1) ** 2 + 1)
        return bool(np.all(power > 0))


def substitution_matrix(rule: SubstRule) -> SubstMatrix:
    letters = rule.letters
    entries = tuple(
        tuple(image.count(row) for image in rule.images) for row in letters
    )
    return SubstMatrix(entries)


def letter_counts(word: str, alphabet: Alphabet) -> np.ndarray:
    return np.array([word.count(x) for x in alphabet], dtype=np.int64)


@dataclass(frozen=True)
class PFData:
    lam: GoldenNum
    lam_minus: GoldenNum
    left: Tuple[GoldenNum, ...]
    right: Tuple[GoldenNum, ...]

    @property
    def mean_length(self) -> GoldenNum:
        """Average tile length <u|v>."""
        return sum((u * v for u, v in zip(self.left, self.right)), GoldenNum(0))

    @property
    def density(self) -> GoldenNum:
        return self.mean_length.inverse()


def _exact_sqrt(d: int) -> GoldenNum:
    if d < 0:
        raise UnsupportedRuleError("complex eigenvalues")
    root = math.isqrt(d)
    if root * root == d:
        return GoldenNum(root)
    if d % 5 == 0:
        k = math.isqrt(d // 5)
        if 5 * k * k == d:
            return GoldenNum(0, k)
    raise UnsupportedRuleError(f"eigenvalues not in Q(sqrt5) (discriminant {d})")


@lru_cache(maxsize=64)
def pf_data(rule: SubstRule) -> PFData:
    """
    Exact Perron-Frobenius data of a primitive two-letter rule.

    Right eigenvector: letter frequencies (sum 1). Left eigenvector: natural
    tile lengths, scaled so the shortest tile has length 1.
    """
    matrix = substitution_matrix(rule)
    if len(rule.letters) != 2:
        raise UnsupportedRuleError("exact PF data needs a two-letter alphabet")
    if not matrix.is_primitive():
        raise UnsupportedRuleError(f"rule {rule} is not primitive")

    (p, q), (r, s) = matrix.entries
    trace, det = p + s, p * s - q * r
    root = _exact_sqrt(trace * trace - 4 * det)
    lam = (trace + root) / 2
    lam_minus = (trace - root) / 2

    right = (GoldenNum(q), lam - p)
    total = right[0] + right[1]
    right = tuple(v / total for v in right)

    left = (GoldenNum(r), lam - p)
    shortest = min(left)
    left = tuple(v / shortest for v in left)

    # exact eigen-equations
    for i in range(2):
        row = matrix.entries[i]
        assert row[0] * right[0] + row[1] * right[1] == lam * right[i]
        col = (matrix.entries[0][i], matrix.entries[1][i])
        assert left[0] * col[0] + left[1] * col[1] == lam * left[i]

    logger.debug("PF data for %s: lambda=%s lengths=%s", rule, lam, left)
    return PFData(lam, lam_minus, left, right)


def letter_frequencies(rule: SubstRule) -> Dict[str, GoldenNum]:
    data = pf_data(rule)
    return dict(zip(rule.letters, data.right))


# -- words around a marker ---------------------------------------------------


@dataclass(frozen=True)
class TwoSidedWord:
    """Finite window ``left|right`` of a bi-infinite word; marker between them."""

    left: str
    right: str

    @classmethod
    def parse(cls, text: str) -> "TwoSidedWord":
        text = text.strip()
        if text.count("|") > 1:
            raise ParseError(f"more than one marker in {text!r}")
        if "|" in text:
            left, right = text.split("|")
        else:
            left, right = "", text
        word = cls(left.strip(), right.strip())
        if not word.left and not word.right:
            raise IllegalSeedError("empty seed word")
        return word

    def apply(self, rule: SubstRule, times: int = 1) -> "TwoSidedWord":
        return TwoSidedWord(rule.apply(self.left, times), rule.apply(self.right, times))

    def window(self, radius: int) -> "TwoSidedWord":
        return TwoSidedWord(self.left[-radius:] if radius else "", self.right[:radius])

    def __len__(self) -> int:
        return len(self.left) + len(self.right)

    def __str__(self) -> str:
        return f"{self.left}|{self.right}"


def as_two_sided(seed: Union[str, TwoSidedWord]) -> TwoSidedWord:
    return TwoSidedWord.parse(seed) if isinstance(seed, str) else seed


def _check_seed(rule: SubstRule, seed: TwoSidedWord) -> None:
    if not seed.left and not seed.right:
        raise IllegalSeedError("empty seed word")
    for c in seed.left + seed.right:
        if c not in rule.letters:
            raise UnknownLetterError(f"seed uses unknown letter {c!r}")
    if seed.left and seed.right:
        pair = seed.left[-1] + seed.right[0]
        if pair not in legal_factors(rule, 2):
            raise IllegalSeedError(f"marker pair {pair!r} is not legal for {rule}")


def iterate_word(
    rule: SubstRule, seed: Union[str, TwoSidedWord], steps: int
) -> TwoSidedWord:
    """Apply the rule ``steps`` times, images of the left part stay left."""
    seed = as_two_sided(seed)
    if steps < 0:
        raise ValueError("steps must be nonnegative")
    if steps == 0:
        return seed
    _check_seed(rule, seed)
    return seed.apply(rule, steps)


@dataclass(frozen=True)
class CycleWord:
    """Lazy generator of one element of a periodic orbit of bi-infinite words."""

    rule: SubstRule
    base: TwoSidedWord
    period: int
    max_radius: int = DEFAULT_MAX_RADIUS

    def window(self, radius: int) -> TwoSidedWord:
        if radius > self.max_radius:
            raise CycleError(f"radius {radius} exceeds bound {self.max_radius}")
        word = self.base
        while len(word.left) < radius or len(word.right) < radius:
            word = word.apply(self.rule, self.period)
        current = word.window(radius)
        if word.apply(self.rule, self.period).window(radius) != current:
            raise CycleError(f"window of radius {radius} did not stabilise")
        return current


def two_cycle(
    rule: SubstRule,
    seed: Union[str, TwoSidedWord],
    max_radius: int = DEFAULT_MAX_RADIUS,
) -> Tuple[CycleWord, CycleWord]:
    """
    Generators (w, rule(w)) of the periodic orbit reached from ``seed``.

    Only the marker pair of the seed matters for the limit. Orbits of period 1
    return the same word twice; longer periods are rejected.
    """
    seed = as_two_sided(seed)
    if not seed.left or not seed.right:
        raise IllegalSeedError("two-sided seed with letters on both sides required")
    _check_seed(rule, seed)

    state = (seed.left[-1], seed.right[0])
    seen = {state: 0}
    steps = 0
    while True:
        state = (rule.image(state[0])[-1], rule.image(state[1])[0])
        steps += 1
        if state in seen:
            preperiod, period = seen[state], steps - seen[state]
            break
        seen[state] = steps

    base_pair = next(s for s, k in seen.items() if k == preperiod)
    base = TwoSidedWord(base_pair[0], base_pair[1])
    for letter in base_pair:
        if len(rule.apply(letter, period)) < 2:
            raise CycleError(f"image of {letter!r} does not grow under {rule}")
    if period > 2:
        raise CycleError(f"seed reaches an orbit of period {period}, not a 2-cycle")

    logger.debug("orbit of %s: preperiod %d, period %d", seed, preperiod, period)
    first = CycleWord(rule, base, period, max_radius)
    second = CycleWord(rule, base.apply(rule), period, max_radius)
    return first, second


def _long_word(rule: SubstRule, length: int) -> str:
    word = rule.letters[0]
    while len(word) < length:
        longer = rule.apply(word)
        if len(longer) == len(word):
            raise UnsupportedRuleError(f"iterates of {rule} do not grow")
        word = longer
    return word


def _factors(word: str, n: int) -> FrozenSet[str]:
    return frozenset(word[i : i + n] for i in range(len(word) - n + 1))


@lru_cache(maxsize=256)
def legal_factors(rule: SubstRule, n: int, cap: int = 1 << 22) -> FrozenSet[str]:
    """Length-n factors, from a window that is stable under doubling."""
    if n < 1:
        raise ValueError("n must be positive")
    length = max(10 * n, 1000)
    word = _long_word(rule, 2 * length)
    factors = _factors(word[:length], n)
    while length < cap:
        doubled = _factors(word[: 2 * length], n)
        if doubled == factors:
            return factors
        length *= 2
        word = _long_word(rule, 2 * length)
        factors = doubled
    logger.warning("factor set of length %d not stable below %d letters", n, cap)
    return factors


def factor_complexity(rule: SubstRule, n: int) -> int:
    return len(legal_factors(rule, n))


# -- geometric inflation -----------------------------------------------------


@dataclass(frozen=True)
class GeometricInflation:
    """
    Tile lengths and displacement sets: ``displacements[(alpha, beta)]`` holds
    the offsets of alpha-children inside the inflated beta-tile.
    """

    rule: SubstRule
    lam: GoldenNum
    lengths: Dict[str, GoldenNum]
    displacements: Dict[Tuple[str, str], Tuple[GoldenNum, ...]]

    def __hash__(self):
        return hash((self.rule, self.lam))

    @property
    def letters(self) -> Tuple[str, ...]:
        return self.rule.letters

    def offsets(self, child: str, parent: str) -> Tuple[GoldenNum, ...]:
        return self.displacements.get((child, parent), ())

    def max_offset_spread(self) -> GoldenNum:
        """Largest |t - s| over all pairs of displacement offsets."""
        offsets = [t for ts in self.displacements.values() for t in ts]
        return max(offsets) - min(offsets)


@lru_cache(maxsize=64)
def geometric_inflation(rule: SubstRule) -> GeometricInflation:
    data = pf_data(rule)
    lengths = dict(zip(rule.letters, data.left))
    displacements: Dict[Tuple[str, str], List[GoldenNum]] = {}
    for parent, image in zip(rule.letters, rule.images):
        pos = GoldenNum(0)
        for child in image:
            displacements.setdefault((child, parent), []).append(pos)
            pos = pos + lengths[child]
        if pos != data.lam * lengths[parent]:
            raise UnsupportedRuleError(f"children of {parent!r} do not tile its image")
    frozen = {
        key: tuple(as_golden(v) for v in sorted(values))
        for key, values in displacements.items()
    }
    return GeometricInflation(rule, data.lam, lengths, frozen)


# -- random realizations -----------------------------------------------------


def _random_codes(p: float, n: int, rng: np.random.Generator) -> np.ndarray:
    word = np.zeros(1, dtype=np.uint8)  # a = 0, b = 1
    for _ in range(n):
        is_a = word == 0
        choice = rng.random(int(is_a.sum())) < p
        sizes = np.where(is_a, 2, 1)
        starts = np.cumsum(sizes) - sizes
        out = np.empty(int(sizes.sum()), dtype=np.uint8)
        a_starts = starts[is_a]
        out[a_starts] = np.where(choice, 0, 1)
        out[a_starts + 1] = np.where(choice, 1, 0)
        out[starts[~is_a]] = 0
        word = out
    return word


def random_realization(p: float, n: int, seed: Union[int, np.random.SeedSequence]) -> str:
    """
    n steps of the random rule a -> ab (probability p) or ba, b -> a, from a.

    The choice is made independently at every step and position, and the
    result is a pure function of (p, n, seed); ``seed`` may be a spawned
    SeedSequence.
    """
    if not 0.0 <= p <= 1.0:
        raise ValueError("p must lie in [0, 1]")
    if n < 0:
        raise ValueError("n must be nonnegative")
    codes = _random_codes(p, n, np.random.default_rng(seed))
    return "".join(np.where(codes == 0, "a", "b"))


def random_realizations(p: float, n: int, seed: int, count: int) -> List[str]:
    """Independent realizations from spawned child seeds."""
    children = np.random.SeedSequence(seed).spawn(count)
    return [random_realization(p, n, child) for child in children]


def word_letter_frequencies(word: str, letters: Iterable[str] = ("a", "b")) -> Dict[str, float]:
    total = len(word)
    return {x: word.count(x) / total for x in letters} if total else {}
