"""
Window Iterated Function Systems
================================

The per-letter windows of an inflation model set satisfy the starred set
equations W_alpha = U_beta (c * W_beta + star(T_alpha_beta)) with c = star(lambda).
This module builds that graph-directed IFS, iterates it on interval unions,
computes exact attractor hulls and volumes, and estimates the box-counting
dimension of fractal window boundaries.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple, Union

import numpy as np
import pandas as pd

from .errors import InsufficientDepthError, IntervalLimitError, NotPisotError, WindowError
from .golden import SQRT5, GoldenNum, as_golden, format_golden
from .linalg import solve
from .model_set import Window
from .substitution import GeometricInflation, pf_data, substitution_matrix

logger = logging.getLogger(__name__)

Interval = Tuple[GoldenNum, GoldenNum]

DEFAULT_MERGE_TOL = 1e-12
DEFAULT_MAX_EXACT_INTERVALS = 50_000
DEFAULT_MAX_INTERVALS = 4_000_000
DEFAULT_CHUNK_PIECES = 2_000_000


@dataclass(frozen=True)
class GraphIFS:
    letters: Tuple[str, ...]
    contraction: GoldenNum
    maps: Dict[Tuple[str, str], Tuple[GoldenNum, ...]]
    matrix: Tuple[Tuple[int, ...], ...]
    frequencies: Tuple[GoldenNum, ...]
    mean_length: GoldenNum

    def __hash__(self):
        return hash((self.letters, self.contraction, self.matrix))

    def translations(self, alpha: str, beta: str) -> Tuple[GoldenNum, ...]:
        return self.maps.get((alpha, beta), ())

    @property
    def contraction_float(self) -> float:
        return float(self.contraction)


def build_graph_ifs(inflation: GeometricInflation) -> GraphIFS:
    """Starred displacement maps with contraction star(lambda)."""
    c = inflation.lam.star()
    if abs(c) >= 1:
        raise NotPisotError(f"|star(lambda)| = {float(abs(c)):.6g} does not contract")
    maps = {
        key: tuple(t.star() for t in offsets)
        for key, offsets in inflation.displacements.items()
    }
    data = pf_data(inflation.rule)
    return GraphIFS(
        letters=inflation.letters,
        contraction=c,
        maps=maps,
        matrix=substitution_matrix(inflation.rule).entries,
        frequencies=data.right,
        mean_length=data.mean_length,
    )


def volume_vector(ifs: GraphIFS) -> Dict[str, GoldenNum]:
    """
    Exact window volumes: letter frequencies scaled to the total volume
    sqrt5 / <u|v> (lattice covolume times point density).
    """
    total = SQRT5 / ifs.mean_length
    return {x: f * total for x, f in zip(ifs.letters, ifs.frequencies)}


def _image_bounds(c: GoldenNum, lo, hi, t):
    if c.sign() > 0:
        return c * lo + t, c * hi + t
    return c * hi + t, c * lo + t


def attractor_hull(ifs: GraphIFS) -> Dict[str, Interval]:
    """
    Exact convex hull of every attractor window.

    The minimising/maximising maps are picked from a converged float
    iteration, the resulting linear system is solved exactly and the choice is
    verified exactly.
    """
    letters = ifs.letters
    k = len(letters)
    c = ifs.contraction
    cf = float(c)
    idx = {x: i for i, x in enumerate(letters)}
    options = {
        a: [(b, t) for b in letters for t in ifs.translations(a, b)] for a in letters
    }

    lo_f = np.zeros(k)
    hi_f = np.zeros(k)
    for _ in range(2000):
        new_lo, new_hi = np.empty(k), np.empty(k)
        for a in letters:
            cand = [_image_bounds_float(cf, lo_f[idx[b]], hi_f[idx[b]], float(t)) for b, t in options[a]]
            new_lo[idx[a]] = min(lo for lo, _ in cand)
            new_hi[idx[a]] = max(hi for _, hi in cand)
        done = np.allclose(new_lo, lo_f, atol=1e-15) and np.allclose(new_hi, hi_f, atol=1e-15)
        lo_f, hi_f = new_lo, new_hi
        if done:
            break

    # unknowns: lo_0..lo_{k-1}, hi_0..hi_{k-1}
    matrix = [[GoldenNum(0)] * (2 * k) for _ in range(2 * k)]
    rhs = [GoldenNum(0)] * (2 * k)
    for a in letters:
        i = idx[a]
        cand = [_image_bounds_float(cf, lo_f[idx[b]], hi_f[idx[b]], float(t)) for b, t in options[a]]
        b_lo, t_lo = options[a][int(np.argmin([lo for lo, _ in cand]))]
        b_hi, t_hi = options[a][int(np.argmax([hi for _, hi in cand]))]
        # lo_a = c * (lo_b or hi_b) + t
        matrix[i][i] += 1
        matrix[i][idx[b_lo] + (0 if c.sign() > 0 else k)] -= c
        rhs[i] = t_lo
        matrix[k + i][k + i] += 1
        matrix[k + i][idx[b_hi] + (k if c.sign() > 0 else 0)] -= c
        rhs[k + i] = t_hi
    values = solve(matrix, rhs)
    hull = {a: (values[idx[a]], values[k + idx[a]]) for a in letters}

    for a in letters:
        bounds = [_image_bounds(c, *hull[b], t) for b, t in options[a]]
        if min(lo for lo, _ in bounds) != hull[a][0] or max(hi for _, hi in bounds) != hull[a][1]:
            raise WindowError(f"attractor hull of {a!r} could not be resolved exactly")
    return hull


def _image_bounds_float(c: float, lo: float, hi: float, t: float) -> Tuple[float, float]:
    if c > 0:
        return c * lo + t, c * hi + t
    return c * hi + t, c * lo + t


def seed_windows(ifs: GraphIFS, kind: str = "hull") -> Dict[str, Window]:
    """
    Closed seed intervals: ``"hull"`` is the exact attractor hull (the
    approximants then decrease to the attractor), ``"volume"`` starts at the
    hull's left end with the exact window volume.
    """
    hull = attractor_hull(ifs)
    if kind == "hull":
        return {x: Window.closed(*hull[x]) for x in ifs.letters}
    if kind == "volume":
        volumes = volume_vector(ifs)
        return {x: Window.closed(hull[x][0], hull[x][0] + volumes[x]) for x in ifs.letters}
    raise ValueError(f"unknown seed kind {kind!r}")


@dataclass
class WindowApprox:
    """Depth-d approximant: per-letter sorted disjoint closed intervals."""

    depth: int
    contraction: float
    intervals: Dict[str, np.ndarray]
    mass: Dict[str, GoldenNum]
    resolution: float
    converged: bool = False
    exact: Optional[Dict[str, List[Interval]]] = None
    letters: Tuple[str, ...] = field(default=())

    def __post_init__(self):
        if not self.letters:
            self.letters = tuple(self.intervals)

    def merged_volume(self, letter: str) -> float:
        arr = self.intervals[letter]
        return float(np.sum(arr[:, 1] - arr[:, 0]))

    def overlap(self, letter: str) -> float:
        """Measure counted more than once: piece volumes minus merged volume."""
        return float(self.mass[letter]) - self.merged_volume(letter)

    def interval_count(self) -> int:
        return sum(len(v) for v in self.intervals.values())

    def exact_volume(self, letter: str) -> GoldenNum:
        if self.exact is None:
            raise ValueError("approximant was computed in float mode")
        return sum((hi - lo for lo, hi in self.exact[letter]), GoldenNum(0))

    def to_frame(self) -> pd.DataFrame:
        frames = []
        for letter in self.letters:
            arr = self.intervals[letter]
            frame = pd.DataFrame({"lo": arr[:, 0], "hi": arr[:, 1]})
            frame["letter"] = letter
            frame["depth"] = self.depth
            if self.exact is not None:
                frame["lo_exact"] = [format_golden(lo) for lo, _ in self.exact[letter]]
                frame["hi_exact"] = [format_golden(hi) for _, hi in self.exact[letter]]
            frames.append(frame)
        return pd.concat(frames, ignore_index=True)


def merge_intervals(arr: np.ndarray, tol: float = DEFAULT_MERGE_TOL) -> np.ndarray:
    """Union of closed intervals as sorted disjoint rows (touching ones merged)."""
    if len(arr) == 0:
        return arr.reshape(0, 2)
    a = arr[np.argsort(arr[:, 0], kind="stable")]
    running_hi = np.maximum.accumulate(a[:, 1])
    starts = np.ones(len(a), dtype=bool)
    starts[1:] = a[1:, 0] > running_hi[:-1] + tol
    idx = np.flatnonzero(starts)
    return np.column_stack((a[idx, 0], np.maximum.reduceat(a[:, 1], idx)))


def _merge_exact(pieces: List[Interval]) -> List[Interval]:
    pieces = sorted(pieces, key=lambda p: (float(p[0]), float(p[1])))
    merged: List[Interval] = []
    for lo, hi in pieces:
        if merged and lo <= merged[-1][1]:
            if hi > merged[-1][1]:
                merged[-1] = (merged[-1][0], hi)
        else:
            merged.append((lo, hi))
    return merged


def _pieces_needed(ifs: GraphIFS, counts: Dict[str, int]) -> int:
    return sum(
        len(ifs.translations(a, b)) * counts[b] for a in ifs.letters for b in ifs.letters
    )


def _step_float(ifs: GraphIFS, current: Dict[str, np.ndarray], merge_tol: float) -> Dict[str, np.ndarray]:
    cf = ifs.contraction_float
    nxt = {}
    for a in ifs.letters:
        pieces = []
        for b in ifs.letters:
            for t in ifs.translations(a, b):
                arr = current[b] * cf + float(t)
                pieces.append(arr[:, ::-1] if cf < 0 else arr)
        nxt[a] = merge_intervals(np.concatenate(pieces), merge_tol)
    return nxt


def _mass_at(ifs: GraphIFS, seeds: Dict[str, Window], depth: int) -> Dict[str, GoldenNum]:
    abs_c = abs(ifs.contraction)
    mass = {x: seeds[x].volume for x in ifs.letters}
    for _ in range(depth):
        mass = {
            a: abs_c * sum(
                (len(ifs.translations(a, b)) * mass[b] for b in ifs.letters), GoldenNum(0)
            )
            for a in ifs.letters
        }
    return mass


def iterate_windows(
    ifs: GraphIFS,
    seed: Union[str, Dict[str, Window]] = "hull",
    depth: int = 10,
    exact: bool = False,
    merge_tol: float = DEFAULT_MERGE_TOL,
    max_exact_intervals: int = DEFAULT_MAX_EXACT_INTERVALS,
    max_intervals: int = DEFAULT_MAX_INTERVALS,
) -> WindowApprox:
    """
    Apply W_alpha <- U_beta (c * W_beta + T*_alpha_beta) ``depth`` times.

    Float mode works on numpy interval arrays and refuses a step whose image
    pieces would exceed ``max_intervals`` (``sweep_windows`` goes deeper).
    Exact mode keeps GoldenNum endpoints and is limited to
    ``max_exact_intervals`` intervals.
    """
    if depth < 0:
        raise ValueError("depth must be nonnegative")
    seeds = seed_windows(ifs, seed) if isinstance(seed, str) else seed
    letters = ifs.letters
    c = ifs.contraction
    cf = float(c)

    current = {x: np.array([seeds[x].as_float()]) for x in letters}
    current_exact = {x: [(seeds[x].lo, seeds[x].hi)] for x in letters} if exact else None
    seed_diameter = max(float(seeds[x].volume) for x in letters)
    converged = False

    for step in range(depth):
        needed = _pieces_needed(ifs, {x: len(current[x]) for x in letters})
        if needed > max_intervals:
            raise IntervalLimitError(
                f"depth {step + 1} needs {needed} intervals, above the limit of {max_intervals}",
                depth=step + 1,
                intervals=needed,
            )
        nxt = _step_float(ifs, current, merge_tol)
        if exact:
            nxt_exact = {}
            for a in letters:
                exact_pieces: List[Interval] = []
                for b in letters:
                    for t in ifs.translations(a, b):
                        exact_pieces.extend(_image_bounds(c, lo, hi, t) for lo, hi in current_exact[b])
                nxt_exact[a] = _merge_exact(exact_pieces)
                if len(nxt_exact[a]) > max_exact_intervals:
                    raise WindowError(
                        f"exact approximant exceeds {max_exact_intervals} intervals at depth {step + 1}"
                    )
            current_exact = nxt_exact
        converged = all(
            nxt[x].shape == current[x].shape and np.allclose(nxt[x], current[x], atol=1e-12)
            for x in letters
        )
        current = nxt
        logger.debug(
            "window depth %d: %d intervals", step + 1, sum(len(v) for v in current.values())
        )

    resolution = 0.0 if converged else abs(cf) ** depth * seed_diameter
    return WindowApprox(
        depth=depth,
        contraction=cf,
        intervals=current,
        mass=_mass_at(ifs, seeds, depth),
        resolution=resolution,
        converged=converged,
        exact=current_exact,
        letters=letters,
    )


def reflect_approx(approx: WindowApprox, offsets: Dict[str, GoldenNum]) -> WindowApprox:
    """The approximant of offset_alpha - W_alpha for every letter."""
    intervals = {}
    exact = {} if approx.exact is not None else None
    for x in approx.letters:
        off = float(offsets[x])
        arr = approx.intervals[x]
        intervals[x] = np.column_stack((off - arr[::-1, 1], off - arr[::-1, 0]))
        if exact is not None:
            o = as_golden(offsets[x])
            exact[x] = [(o - hi, o - lo) for lo, hi in reversed(approx.exact[x])]
    return WindowApprox(
        approx.depth, approx.contraction, intervals, dict(approx.mass),
        approx.resolution, approx.converged, exact, approx.letters,
    )


def _distance_to_union(points: np.ndarray, union: np.ndarray) -> np.ndarray:
    idx = np.searchsorted(union[:, 0], points, side="right") - 1
    dist = np.full(len(points), np.inf)
    inside = idx >= 0
    dist[inside] = np.maximum(points[inside] - union[idx[inside], 1], 0.0)
    nxt = idx + 1
    has_next = nxt < len(union)
    dist[has_next] = np.minimum(dist[has_next], union[nxt[has_next], 0] - points[has_next])
    return dist


def _directed_hausdorff(a: np.ndarray, b: np.ndarray) -> float:
    candidates = [a.ravel()]
    if len(b) > 1:
        mids = (b[:-1, 1] + b[1:, 0]) / 2
        candidates.append(mids[_distance_to_union(mids, a) == 0])
    points = np.concatenate(candidates)
    return float(np.max(_distance_to_union(points, b)))


def hausdorff_distance(a: np.ndarray, b: np.ndarray) -> float:
    """Hausdorff distance between two unions of sorted disjoint closed intervals."""
    return max(_directed_hausdorff(a, b), _directed_hausdorff(b, a))


@dataclass(frozen=True)
class BoxCountEstimate:
    sizes: np.ndarray
    counts: np.ndarray
    slope: float
    intercept: float
    residual: float

    @property
    def scales(self) -> int:
        return len(self.sizes)


class _BoxCounter:
    """Distinct dyadic boxes hit by boundary points fed in increasing order."""

    def __init__(self, sizes: np.ndarray):
        self.sizes = sizes
        self.counts = np.zeros(len(sizes), dtype=np.int64)
        self._last: List[Optional[float]] = [None] * len(sizes)

    def add(self, points: np.ndarray) -> None:
        if len(points) == 0:
            return
        for i, size in enumerate(self.sizes):
            boxes = np.floor(points / size)
            fresh = np.count_nonzero(np.diff(boxes))
            if self._last[i] is None or boxes[0] != self._last[i]:
                fresh += 1
            self.counts[i] += fresh
            self._last[i] = boxes[-1]


def _dyadic_sizes(
    diameter: float, resolution: float, depth: int, min_scales: int, finest_exponent: int
) -> np.ndarray:
    k_min = math.ceil(math.log2(16.0 / diameter))
    finest = 8.0 * resolution if resolution > 0 else diameter * 2.0 ** -finest_exponent
    k_max = math.floor(math.log2(1.0 / finest))
    exponents = np.arange(k_min, k_max + 1)
    if len(exponents) < min_scales:
        raise InsufficientDepthError(
            f"depth {depth} resolves only {max(len(exponents), 0)} dyadic scales, "
            f"need {min_scales}",
            scales=max(len(exponents), 0),
        )
    return 2.0 ** (-exponents.astype(float))


def _fit_box_counts(sizes: np.ndarray, counts: np.ndarray) -> BoxCountEstimate:
    x = np.log(1.0 / sizes)
    y = np.log(counts.astype(float))
    (slope, intercept), residuals, *_ = np.polyfit(x, y, 1, full=True)
    residual = float(np.sqrt(residuals[0] / len(x))) if len(residuals) else 0.0
    logger.debug("box counting: %d scales, slope %.5f", len(sizes), slope)
    return BoxCountEstimate(sizes, counts, float(slope), float(intercept), residual)


def boundary_points(approx: WindowApprox, letters: Optional[Tuple[str, ...]] = None) -> np.ndarray:
    letters = letters or approx.letters
    return np.sort(np.concatenate([approx.intervals[x].ravel() for x in letters]))


def boundary_dimension(
    approx: WindowApprox,
    letters: Optional[Tuple[str, ...]] = None,
    min_scales: int = 5,
    finest_exponent: int = 20,
) -> BoxCountEstimate:
    """
    Box-counting slope of the window boundary on dyadic boxes aligned to 0.

    Scales run from diameter/16 down to 8x the approximant resolution (or
    2^-finest_exponent times the diameter for converged approximants).
    """
    points = boundary_points(approx, letters)
    diameter = float(points[-1] - points[0]) or 1.0
    sizes = _dyadic_sizes(diameter, approx.resolution, approx.depth, min_scales, finest_exponent)
    counter = _BoxCounter(sizes)
    counter.add(points)
    return _fit_box_counts(sizes, counter.counts)


# -- streamed deep approximants ----------------------------------------------


def composed_maps(ifs: GraphIFS, steps: int) -> Dict[str, List[Tuple[str, GoldenNum]]]:
    """
    The ``steps``-fold compositions of the window maps: W_alpha contains
    contraction**steps * W_beta + offset for every (beta, offset) listed.
    """
    maps = {a: [(a, GoldenNum(0))] for a in ifs.letters}
    power = GoldenNum(1)
    for _ in range(steps):
        maps = {
            a: [
                (nxt, offset + power * t)
                for b, offset in paths
                for nxt in ifs.letters
                for t in ifs.translations(b, nxt)
            ]
            for a, paths in maps.items()
        }
        power = power * ifs.contraction
    return maps


class _LetterSweep:
    """Running union of pieces fed chunk by chunk in order of their left ends."""

    def __init__(self, tol: float):
        self.tol = tol
        self.carry: Optional[np.ndarray] = None
        self.volume = 0.0
        self.count = 0

    def advance(self, pieces: np.ndarray, chunk_end: float) -> np.ndarray:
        """Merge a chunk; returns the boundary points settled by it."""
        had_carry = self.carry is not None
        if had_carry:
            pieces = np.concatenate((self.carry[None, :], pieces))
        merged = merge_intervals(pieces, self.tol)
        if len(merged) == 0:
            return np.empty(0)
        lows = merged[1:, 0] if had_carry else merged[:, 0]
        if merged[-1, 1] + self.tol < chunk_end:
            closed, self.carry = merged, None
        else:
            closed, self.carry = merged[:-1], merged[-1].copy()
        self.volume += float(np.sum(closed[:, 1] - closed[:, 0]))
        self.count += len(closed)
        return np.concatenate((lows, closed[:, 1]))

    def finish(self) -> np.ndarray:
        if self.carry is None:
            return np.empty(0)
        last, self.carry = self.carry, None
        self.volume += float(last[1] - last[0])
        self.count += 1
        return last[1:]


def _pieces_in_chunk(
    stored: Dict[str, np.ndarray],
    offsets: Dict[str, np.ndarray],
    scale: float,
    x0: float,
    x1: float,
) -> np.ndarray:
    """Images of the stored intervals whose left end lies in [x0, x1)."""
    found = []
    for b, offs in offsets.items():
        arr = stored[b]
        key = arr[:, 0] if scale > 0 else arr[:, 1]
        for off in offs:
            u0, u1 = (x0 - off) / scale, (x1 - off) / scale
            if scale > 0:
                i0, i1 = np.searchsorted(key, u0), np.searchsorted(key, u1)
            else:
                i0, i1 = np.searchsorted(key, u1, side="right"), np.searchsorted(key, u0, side="right")
            i0, i1 = max(int(i0) - 1, 0), min(int(i1) + 1, len(arr))
            if i1 <= i0:
                continue
            image = arr[i0:i1] * scale + off
            if scale < 0:
                image = image[:, ::-1]
            keep = (image[:, 0] >= x0) & (image[:, 0] < x1)
            if keep.any():
                found.append(image[keep])
    return np.concatenate(found) if found else np.empty((0, 2))


@dataclass
class WindowSweep:
    """Statistics of a depth-d approximant streamed without holding its intervals."""

    depth: int
    stored_depth: int
    letters: Tuple[str, ...]
    mass: Dict[str, GoldenNum]
    volumes: Dict[str, float]
    counts: Dict[str, int]
    resolution: float
    estimate: BoxCountEstimate

    def merged_volume(self, letter: str) -> float:
        return self.volumes[letter]

    def overlap(self, letter: str) -> float:
        """Measure counted more than once: piece volumes minus merged volume."""
        return float(self.mass[letter]) - self.volumes[letter]

    def interval_count(self) -> int:
        return sum(self.counts.values())


def sweep_windows(
    ifs: GraphIFS,
    seed: Union[str, Dict[str, Window]] = "hull",
    depth: int = 20,
    max_intervals: int = DEFAULT_MAX_INTERVALS,
    chunk_pieces: int = DEFAULT_CHUNK_PIECES,
    merge_tol: float = DEFAULT_MERGE_TOL,
    min_scales: int = 5,
    finest_exponent: int = 20,
) -> WindowSweep:
    """
    Merged volumes, interval counts and the box-counting fit of the depth-d
    approximant in bounded memory.

    The deepest level within ``max_intervals`` is stored; the remaining
    steps are applied as composed maps while sweeping the line in chunks of
    about ``chunk_pieces`` image pieces.
    """
    if depth < 0:
        raise ValueError("depth must be nonnegative")
    seeds = seed_windows(ifs, seed) if isinstance(seed, str) else seed
    letters = ifs.letters
    stored = {x: np.array([seeds[x].as_float()]) for x in letters}
    stored_depth = 0
    converged = False
    while stored_depth < depth and not converged:
        if _pieces_needed(ifs, {x: len(stored[x]) for x in letters}) > max_intervals:
            break
        nxt = _step_float(ifs, stored, merge_tol)
        converged = all(
            nxt[x].shape == stored[x].shape and np.allclose(nxt[x], stored[x], atol=1e-12)
            for x in letters
        )
        stored = nxt
        stored_depth += 1

    steps = 0 if converged else depth - stored_depth
    scale = float(ifs.contraction ** steps)
    offsets: Dict[str, Dict[str, np.ndarray]] = {}
    lo, hi, total = math.inf, -math.inf, 0
    for a, maps in composed_maps(ifs, steps).items():
        grouped: Dict[str, List[float]] = {}
        for b, off in maps:
            grouped.setdefault(b, []).append(float(off))
            ends = (stored[b][0, 0] * scale + float(off), stored[b][-1, 1] * scale + float(off))
            lo, hi = min(lo, *ends), max(hi, *ends)
            total += len(stored[b])
        offsets[a] = {b: np.array(v) for b, v in grouped.items()}

    seed_diameter = max(float(seeds[x].volume) for x in letters)
    resolution = 0.0 if converged else abs(ifs.contraction_float) ** depth * seed_diameter
    sizes = _dyadic_sizes(hi - lo or 1.0, resolution, depth, min_scales, finest_exponent)
    counter = _BoxCounter(sizes)
    chunks = max(1, math.ceil(total / chunk_pieces))
    edges = np.linspace(lo, hi, chunks + 1)
    edges[0], edges[-1] = -np.inf, np.inf
    logger.debug(
        "window sweep: stored depth %d, %d composed steps, %d pieces in %d chunks",
        stored_depth, steps, total, chunks,
    )

    sweeps = {a: _LetterSweep(merge_tol) for a in letters}
    for x0, x1 in zip(edges[:-1], edges[1:]):
        settled = [
            sweeps[a].advance(_pieces_in_chunk(stored, offsets[a], scale, x0, x1), x1)
            for a in letters
        ]
        counter.add(np.sort(np.concatenate(settled)))
    counter.add(np.sort(np.concatenate([sweeps[a].finish() for a in letters])))

    return WindowSweep(
        depth=depth,
        stored_depth=stored_depth,
        letters=letters,
        mass=_mass_at(ifs, seeds, depth),
        volumes={a: sweeps[a].volume for a in letters},
        counts={a: sweeps[a].count for a in letters},
        resolution=resolution,
        estimate=_fit_box_counts(sizes, counter.counts),
    )


REFERENCE_DIMENSION = math.log(1 + math.sqrt(2)) / (2 * math.log((1 + math.sqrt(5)) / 2))
