"""
Model Sets
==========

Cut-and-project sets over the lattice {(x, x*) : x in Z[tau]}: exact windows
with end-inclusion flags, exhaustive enumeration of points in a physical
region, coding windows of tiles, exact patch frequencies, equidistribution
diagnostics and difference-set membership.

Tiles are represented by their left endpoints. For the default window
W = (-1, tau-1] the point x is of type a (long tile next) when x* lies in
W_a = (tau-2, tau-1] and of type b when x* lies in W_b = (-1, tau-2].
"""

import itertools
import logging
import math
import re
from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, Tuple, Union

import numpy as np
import pandas as pd
from scipy.stats import qmc

from .errors import ParseError, UnknownLetterError, WindowError
from .golden import (
    SQRT5,
    TAU,
    GoldenInt,
    GoldenNum,
    as_golden,
    compare,
    format_tau,
    internal_float,
    parse_golden,
    parse_golden_int,
    physical_float,
)
from .substitution import GeometricInflation, SubstRule, TwoSidedWord, two_cycle
from .workers import parallel_map, split_range, thread_cap

logger = logging.getLogger(__name__)


# -- windows -----------------------------------------------------------------


@dataclass(frozen=True)
class Window:
    """Bounded interval with exact endpoints and end-inclusion flags."""

    lo: GoldenNum
    hi: GoldenNum
    lo_closed: bool = False
    hi_closed: bool = True

    def __post_init__(self):
        object.__setattr__(self, "lo", as_golden(self.lo))
        object.__setattr__(self, "hi", as_golden(self.hi))
        if not self.lo < self.hi:
            raise WindowError(f"empty window: {self.lo} >= {self.hi}")

    @classmethod
    def closed(cls, lo, hi) -> "Window":
        return cls(lo, hi, True, True)

    @property
    def volume(self) -> GoldenNum:
        return self.hi - self.lo

    def contains(self, x) -> bool:
        x = as_golden(x)
        above = x > self.lo or (self.lo_closed and x == self.lo)
        below = x < self.hi or (self.hi_closed and x == self.hi)
        return above and below

    def translate(self, t) -> "Window":
        return Window(self.lo + t, self.hi + t, self.lo_closed, self.hi_closed)

    def reflect(self) -> "Window":
        """-W; flags swap sides."""
        return Window(-self.hi, -self.lo, self.hi_closed, self.lo_closed)

    def scale(self, c) -> "Window":
        c = as_golden(c)
        if c.sign() > 0:
            return Window(c * self.lo, c * self.hi, self.lo_closed, self.hi_closed)
        if c.sign() < 0:
            return Window(c * self.hi, c * self.lo, self.hi_closed, self.lo_closed)
        raise WindowError("cannot scale a window by zero")

    def closure(self) -> "Window":
        return Window(self.lo, self.hi, True, True)

    def minkowski_difference(self, other: "Window") -> "Window":
        """{a - b : a in self, b in other}."""
        return Window(
            self.lo - other.hi,
            self.hi - other.lo,
            self.lo_closed and other.hi_closed,
            self.hi_closed and other.lo_closed,
        )

    def intersection_volume(self, other: "Window") -> GoldenNum:
        lo = max(self.lo, other.lo)
        hi = min(self.hi, other.hi)
        return hi - lo if lo < hi else GoldenNum(0)

    def as_float(self) -> Tuple[float, float]:
        return float(self.lo), float(self.hi)

    def __str__(self) -> str:
        left = "[" if self.lo_closed else "("
        right = "]" if self.hi_closed else ")"
        return f"{left}{format_tau(self.lo)}, {format_tau(self.hi)}{right}"


_WINDOW_RE = re.compile(r"^\s*([\[\(])\s*([^,]+?)\s*,\s*([^,]+?)\s*([\]\)])\s*$")


def parse_window(text: str) -> Window:
    """Parse ``"(-1, t-1]"`` style interval text."""
    match = _WINDOW_RE.match(text)
    if not match:
        raise ParseError(f"cannot parse interval {text!r}")
    left, lo, hi, right = match.groups()
    return Window(parse_golden(lo), parse_golden(hi), left == "[", right == "]")


TAU_F = float(TAU)

FIBONACCI_WINDOW = Window(GoldenInt(-1, 0), GoldenInt(-1, 1), False, True)
FIBONACCI_LENGTHS = (("a", TAU), ("b", GoldenInt(1, 0)))


@dataclass(frozen=True)
class ModelSetSpec:
    """
    Per-letter windows partitioning a contiguous total window, plus the tile
    lengths attached to the letters.
    """

    windows: Tuple[Tuple[str, Window], ...]
    lengths: Tuple[Tuple[str, GoldenNum], ...] = FIBONACCI_LENGTHS

    def __post_init__(self):
        if not self.windows:
            raise WindowError("at least one window is required")
        ordered = sorted((w for _, w in self.windows), key=lambda w: float(w.lo))
        for left, right in zip(ordered, ordered[1:]):
            if left.hi != right.lo:
                raise WindowError(f"windows {left} and {right} are not contiguous")
            if left.hi_closed == right.lo_closed:
                raise WindowError(f"windows {left} and {right} overlap or leave a gap")

    @classmethod
    def fibonacci(cls) -> "ModelSetSpec":
        return cls.from_window(FIBONACCI_WINDOW)

    @classmethod
    def from_window(cls, total: Window) -> "ModelSetSpec":
        """
        Fibonacci typing for a total window of length tau: x is of type b when
        x + 1 is also a point, i.e. when x* + 1 lies in the window.
        """
        if total.volume != TAU:
            raise WindowError(f"window {total} has length {total.volume}, need tau")
        cut = total.hi - 1
        window_b = Window(total.lo, cut, total.lo_closed, total.hi_closed)
        window_a = Window(cut, total.hi, not total.hi_closed, total.hi_closed)
        return cls((("a", window_a), ("b", window_b)))

    @property
    def letters(self) -> Tuple[str, ...]:
        return tuple(x for x, _ in self.windows)

    def window(self, letter: str) -> Window:
        for x, w in self.windows:
            if x == letter:
                return w
        raise UnknownLetterError(f"unknown letter {letter!r}")

    def length(self, letter: str) -> GoldenNum:
        for x, v in self.lengths:
            if x == letter:
                return v
        raise UnknownLetterError(f"no tile length for {letter!r}")

    @property
    def total(self) -> Window:
        ordered = sorted((w for _, w in self.windows), key=lambda w: float(w.lo))
        return Window(ordered[0].lo, ordered[-1].hi, ordered[0].lo_closed, ordered[-1].hi_closed)

    @property
    def volume(self) -> GoldenNum:
        return self.total.volume

    @property
    def density(self) -> GoldenNum:
        """Points per unit length: vol(W) / covolume of the lattice."""
        return self.volume / SQRT5

    def translate_internal(self, s) -> "ModelSetSpec":
        return ModelSetSpec(
            tuple((x, w.translate(s)) for x, w in self.windows), self.lengths
        )

    def volume_ratios(self) -> Dict[str, GoldenNum]:
        return {x: w.volume / self.volume for x, w in self.windows}

    def matches_frequencies(self, frequencies: Dict[str, GoldenNum]) -> bool:
        return self.volume_ratios() == dict(frequencies)


# -- typed point sets --------------------------------------------------------


@dataclass
class TypedPointSet:
    """Points m + n*tau with letter types, sorted by position."""

    m: np.ndarray
    n: np.ndarray
    types: np.ndarray

    def __post_init__(self):
        self.m = np.asarray(self.m, dtype=np.int64)
        self.n = np.asarray(self.n, dtype=np.int64)
        self.types = np.asarray(self.types, dtype="<U1")
        order = np.argsort(physical_float(self.m, self.n), kind="stable")
        self.m, self.n, self.types = self.m[order], self.n[order], self.types[order]

    @classmethod
    def from_points(cls, points: Iterable[Tuple[GoldenInt, str]]) -> "TypedPointSet":
        points = list(points)
        return cls(
            np.array([x.m for x, _ in points], dtype=np.int64),
            np.array([x.n for x, _ in points], dtype=np.int64),
            np.array([t for _, t in points], dtype="<U1"),
        )

    @classmethod
    def empty(cls) -> "TypedPointSet":
        return cls(np.zeros(0, np.int64), np.zeros(0, np.int64), np.zeros(0, "<U1"))

    def __len__(self) -> int:
        return len(self.m)

    @property
    def positions(self) -> np.ndarray:
        return physical_float(self.m, self.n)

    @property
    def internal(self) -> np.ndarray:
        return internal_float(self.m, self.n)

    def points(self) -> List[Tuple[GoldenInt, str]]:
        return [
            (GoldenInt(int(m), int(n)), str(t))
            for m, n, t in zip(self.m, self.n, self.types)
        ]

    def word(self) -> str:
        return "".join(self.types.tolist())

    def gaps(self) -> List[GoldenInt]:
        return [
            GoldenInt(int(dm), int(dn))
            for dm, dn in zip(np.diff(self.m), np.diff(self.n))
        ]

    def mask(self, keep: np.ndarray) -> "TypedPointSet":
        return TypedPointSet(self.m[keep], self.n[keep], self.types[keep])

    def of_type(self, letter: str) -> "TypedPointSet":
        return self.mask(self.types == letter)

    def keys(self) -> np.ndarray:
        """Structured view usable for exact set operations."""
        return np.rec.fromarrays([self.m, self.n], names="m,n")

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(
            {
                "position_float": self.positions,
                "m": self.m,
                "n": self.n,
                "type": self.types,
                "exact": [f"{m}{n:+d}*t" for m, n in zip(self.m, self.n)],
            }
        )


# -- exact masks over (m, n) arrays ------------------------------------------


def _compare_to_bound(
    m: np.ndarray, n: np.ndarray, bound: GoldenNum, use_star: bool
) -> np.ndarray:
    """Sign of (x or x*) - bound per point; floats with an exact fallback."""
    values = internal_float(m, n) if use_star else physical_float(m, n)
    diff = values - float(bound)
    tol = 1e-9 * (1.0 + np.abs(m) + np.abs(n) + abs(float(bound)))
    signs = np.sign(diff).astype(np.int64)
    for i in np.flatnonzero(np.abs(diff) <= tol):
        x = GoldenInt(int(m[i]), int(n[i]))
        signs[i] = compare(x.star() if use_star else x, bound)
    return signs


def window_mask(
    m: np.ndarray, n: np.ndarray, window: Window, use_star: bool = True
) -> np.ndarray:
    """Exact membership of x* (or x) in the window."""
    lo = _compare_to_bound(m, n, window.lo, use_star)
    hi = _compare_to_bound(m, n, window.hi, use_star)
    above = (lo > 0) | ((lo == 0) & window.lo_closed)
    below = (hi < 0) | ((hi == 0) & window.hi_closed)
    return above & below


def _n_bounds(
    phys_lo: GoldenNum, phys_hi: GoldenNum, int_lo: GoldenNum, int_hi: GoldenNum
) -> Tuple[int, int]:
    # x - x* = n*sqrt5
    return math.ceil((phys_lo - int_hi) / SQRT5), math.floor((phys_hi - int_lo) / SQRT5)


def _box_candidates(
    ns: np.ndarray,
    phys_lo: float,
    phys_hi: float,
    int_lo: float,
    int_hi: float,
) -> Tuple[np.ndarray, np.ndarray]:
    nf = ns.astype(float)
    lower = np.maximum(phys_lo - nf * TAU_F, int_lo - nf * (1.0 - TAU_F))
    upper = np.minimum(phys_hi - nf * TAU_F, int_hi - nf * (1.0 - TAU_F))
    start = np.floor(lower).astype(np.int64) - 1
    count = np.maximum(np.ceil(upper).astype(np.int64) + 1 - start + 1, 0)
    width = int(count.max()) if len(count) else 0
    offsets = np.arange(width, dtype=np.int64)
    mm = start[:, None] + offsets[None, :]
    nn = np.broadcast_to(ns[:, None], mm.shape)
    keep = offsets[None, :] < count[:, None]
    return mm[keep], nn[keep]


def lattice_points_in_box(
    phys: Window, internal: Window
) -> Tuple[np.ndarray, np.ndarray]:
    """
    All m + n*tau with x in ``phys`` and x* in ``internal``, honouring flags.

    The n range is exact (x - x* = n*sqrt5); per n the m candidates come from a
    padded float range and every candidate is checked exactly near boundaries.
    """
    n_lo, n_hi = _n_bounds(phys.lo, phys.hi, internal.lo, internal.hi)
    if n_hi < n_lo:
        return np.zeros(0, np.int64), np.zeros(0, np.int64)
    p_lo, p_hi = phys.as_float()
    i_lo, i_hi = internal.as_float()

    def scan(ns: range) -> Tuple[np.ndarray, np.ndarray]:
        m, n = _box_candidates(np.arange(ns.start, ns.stop, dtype=np.int64), p_lo, p_hi, i_lo, i_hi)
        keep = window_mask(m, n, phys, use_star=False) & window_mask(m, n, internal)
        return m[keep], n[keep]

    chunks = split_range(n_lo, n_hi, max(1, min(thread_cap(), (n_hi - n_lo) // 20_000 + 1)))
    parts = parallel_map(scan, chunks)
    logger.debug("scanned n in [%d, %d] over %d chunks", n_lo, n_hi, len(chunks))
    return (
        np.concatenate([p[0] for p in parts]),
        np.concatenate([p[1] for p in parts]),
    )


def as_region(region: Union[Window, Tuple, str, None]) -> Window:
    if region is None:
        raise WindowError("a bounded region is required")
    if isinstance(region, Window):
        return region
    if isinstance(region, str):
        return parse_window(region)
    lo, hi = region
    return Window.closed(lo, hi)


def cut_and_project(
    spec: ModelSetSpec, region: Union[Window, Tuple, str]
) -> TypedPointSet:
    """All typed points of the model set in the physical region."""
    region = as_region(region)
    m, n = lattice_points_in_box(region, spec.total.closure())
    types = np.full(len(m), "", dtype="<U1")
    for letter, window in spec.windows:
        types[window_mask(m, n, window)] = letter
    keep = types != ""
    logger.debug("cut_and_project: %d points in %s", int(keep.sum()), region)
    return TypedPointSet(m[keep], n[keep], types[keep])


def brute_force_points(
    spec: ModelSetSpec, region: Window, bound: int
) -> List[Tuple[GoldenInt, str]]:
    """Exact scan of |m|, |n| <= bound; slow reference enumeration."""
    found = []
    for m in range(-bound, bound + 1):
        for n in range(-bound, bound + 1):
            x = GoldenInt(m, n)
            if not region.contains(x):
                continue
            for letter, window in spec.windows:
                if window.contains(x.star()):
                    found.append((x, letter))
    return sorted(found, key=lambda item: float(item[0]))


# -- frequencies -------------------------------------------------------------


def coding_window(letter: str, position, spec: Optional[ModelSetSpec] = None) -> Window:
    """Internal-space set of parameters for which the tile occurs at ``position``."""
    spec = spec or ModelSetSpec.fibonacci()
    return spec.window(letter).reflect().translate(as_golden(position).star())


@dataclass(frozen=True)
class PatchSpec:
    tiles: Tuple[Tuple[str, GoldenInt], ...] = ()

    def __post_init__(self):
        positions = [p for _, p in self.tiles]
        if len(set(positions)) != len(positions):
            raise ParseError("patch positions must be distinct")

    @classmethod
    def parse(cls, text: str) -> "PatchSpec":
        """``"a@0 b@1*t"``: letter@position pairs separated by whitespace."""
        tiles = []
        for token in text.split():
            if "@" not in token:
                raise ParseError(f"patch entry {token!r} is not letter@position")
            letter, position = token.split("@", 1)
            if not letter:
                raise ParseError(f"patch entry {token!r} has no letter")
            tiles.append((letter, parse_golden_int(position)))
        return cls(tuple(tiles))

    def translate(self, t: GoldenInt) -> "PatchSpec":
        return PatchSpec(tuple((x, p + t) for x, p in self.tiles))


def patch_frequency(patch: PatchSpec, spec: Optional[ModelSetSpec] = None) -> GoldenNum:
    """Exact frequency per point: vol(intersection of coding windows) / vol(W)."""
    spec = spec or ModelSetSpec.fibonacci()
    if not patch.tiles:
        return GoldenNum(1)
    windows = [coding_window(x, p, spec) for x, p in patch.tiles]
    lo = max(w.lo for w in windows)
    hi = min(w.hi for w in windows)
    if not lo < hi:
        return GoldenNum(0)
    return (hi - lo) / spec.volume


def is_legal(patch: PatchSpec, spec: Optional[ModelSetSpec] = None) -> bool:
    return patch_frequency(patch, spec) > 0


def word_patch(word: str, spec: ModelSetSpec) -> PatchSpec:
    """Patch of consecutive tiles spelling ``word`` from the origin."""
    tiles = []
    pos = GoldenInt(0, 0)
    for letter in word:
        tiles.append((letter, pos))
        pos = pos + spec.length(letter).to_golden_int()
    return PatchSpec(tuple(tiles))


def word_frequencies(spec: ModelSetSpec, n: int) -> Dict[str, GoldenNum]:
    """Exact frequencies of all legal words of length n."""
    result = {}
    for letters in itertools.product(spec.letters, repeat=n):
        word = "".join(letters)
        freq = patch_frequency(word_patch(word, spec), spec)
        if freq > 0:
            result[word] = freq
    return result


# -- equidistribution --------------------------------------------------------


def star_discrepancy(sample: np.ndarray) -> float:
    """Star discrepancy of a sample in [0, 1] (exact one-dimensional formula)."""
    u = np.sort(np.asarray(sample, dtype=float))
    count = len(u)
    if count == 0:
        return 0.0
    i = np.arange(1, count + 1)
    return float(max(np.max(i / count - u), np.max(u - (i - 1) / count)))


def weyl_discrepancy(spec: ModelSetSpec, count: int, method: str = "star") -> float:
    """
    Discrepancy of the normalised star images of the first ``count`` points
    (ordered by |x|) in the total window. ``method="L2-star"`` uses the
    quasi-Monte Carlo L2 star discrepancy instead.
    """
    if count < 1:
        raise ValueError("count must be positive")
    m, n = first_points_by_modulus(spec, count)
    lo, hi = spec.total.as_float()
    u = (internal_float(m, n) - lo) / (hi - lo)
    u = np.clip(u, 0.0, 1.0)
    if method == "star":
        return star_discrepancy(u)
    return float(qmc.discrepancy(u.reshape(-1, 1), method=method))


def first_points_by_modulus(spec: ModelSetSpec, count: int) -> Tuple[np.ndarray, np.ndarray]:
    mean_length = float(SQRT5 / spec.volume)
    radius = count * mean_length / 2 + 10
    while True:
        r = GoldenNum(math.ceil(radius))
        points = cut_and_project(spec, Window.closed(-r, r))
        if len(points) >= count:
            break
        radius *= 2
    x = points.positions
    order = np.lexsort((x < 0, np.abs(x)))[:count]
    return points.m[order], points.n[order]


# -- differences and asymptotic pairs ----------------------------------------


def difference_window(
    alpha: str, beta: str, spec: Optional[ModelSetSpec] = None
) -> Window:
    """
    Coding-window difference (-W_alpha) - (-W_beta): z* lies in it exactly
    when some alpha at x has a beta at x + z.
    """
    spec = spec or ModelSetSpec.fibonacci()
    return coding_window(alpha, 0, spec).minkowski_difference(coding_window(beta, 0, spec))


def difference_set_member(
    z, alpha: str, beta: str, spec: Optional[ModelSetSpec] = None
) -> bool:
    """Whether an alpha at some point x of the model set has a beta at x + z."""
    z = as_golden(z)
    if not z.is_golden_int():
        return False
    return difference_window(alpha, beta, spec).contains(z.star())


def asymptotic_pair_difference(
    first: ModelSetSpec, second: ModelSetSpec, region
) -> Tuple[List[GoldenInt], List[GoldenInt]]:
    """Points only in the first set, and only in the second, inside ``region``."""
    a = {x for x, _ in cut_and_project(first, region).points()}
    b = {x for x, _ in cut_and_project(second, region).points()}
    key = float
    return sorted(a - b, key=key), sorted(b - a, key=key)


# -- inflation and geometric realizations ------------------------------------


def _mul_arrays(m: np.ndarray, n: np.ndarray, c: GoldenInt) -> Tuple[np.ndarray, np.ndarray]:
    p, q = c.m, c.n
    return m * p + n * q, m * q + n * p + n * q


def inflate_points(points: TypedPointSet, inflation: GeometricInflation) -> TypedPointSet:
    """Replace every beta-point x by the children lambda*x + t of type alpha."""
    lam = inflation.lam.to_golden_int()
    ms, ns, ts = [], [], []
    for (child, parent), offsets in inflation.displacements.items():
        sel = points.types == parent
        base_m, base_n = _mul_arrays(points.m[sel], points.n[sel], lam)
        for t in offsets:
            t = t.to_golden_int()
            ms.append(base_m + t.m)
            ns.append(base_n + t.n)
            ts.append(np.full(len(base_m), child, dtype="<U1"))
    if not ms:
        return TypedPointSet.empty()
    return TypedPointSet(np.concatenate(ms), np.concatenate(ns), np.concatenate(ts))


def realize_tiling(
    rule: SubstRule,
    seed: Union[str, TwoSidedWord],
    half_width: float,
    lengths: Optional[Dict[str, GoldenNum]] = None,
) -> TypedPointSet:
    """
    Left endpoints of the bi-infinite fixed point (or 2-cycle element) reached
    from ``seed``, restricted to [-half_width, half_width].
    """
    from .substitution import geometric_inflation

    lengths = lengths or geometric_inflation(rule).lengths
    exact = {x: as_golden(v).to_golden_int() for x, v in lengths.items()}
    shortest = min(float(v) for v in exact.values())
    radius = int(math.ceil(half_width / shortest)) + 2
    word = two_cycle(rule, seed, max_radius=max(radius, 10))[0].window(radius)

    len_m = {x: v.m for x, v in exact.items()}
    len_n = {x: v.n for x, v in exact.items()}
    right = np.array(list(word.right), dtype="<U1")
    left = np.array(list(word.left), dtype="<U1")

    def steps(letters: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        dm = np.array([len_m[x] for x in letters.tolist()], dtype=np.int64)
        dn = np.array([len_n[x] for x in letters.tolist()], dtype=np.int64)
        return dm, dn

    dm, dn = steps(right)
    right_m = np.concatenate(([0], np.cumsum(dm)[:-1])) if len(dm) else dm
    right_n = np.concatenate(([0], np.cumsum(dn)[:-1])) if len(dn) else dn
    dm, dn = steps(left)
    left_m = -np.cumsum(dm[::-1])[::-1]
    left_n = -np.cumsum(dn[::-1])[::-1]

    points = TypedPointSet(
        np.concatenate((left_m, right_m)),
        np.concatenate((left_n, right_n)),
        np.concatenate((left, right)),
    )
    x = points.positions
    return points.mask((x >= -half_width) & (x <= half_width))
