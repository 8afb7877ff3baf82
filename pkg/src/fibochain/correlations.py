"""
Pair Correlations
=================

nu_ab(z) is the frequency, per point of the model set, of a point of type a at
x together with a point of type b at x + z. Two independent routes compute it:

* the closed form nu_ab(z) = g_ab(z*), where g_ab(y) = vol(W_a ∩ (W_b - y)) / vol(W)
  is the (mixed) covariogram of the per-letter windows;
* the renormalisation route, which builds the exact linear relations
  nu_ab(z) = (1/lambda) Σ_{cd} Σ_{t ∈ T_ac, s ∈ T_bd} nu_cd((z + t - s) / lambda)
  on a finite closed set of z, solves for the one-dimensional null space in
  Q(sqrt5) and extends the solution recursively.

Both routes return ``PairCorrelation`` objects with the same interface.
"""

import logging
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import product
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd
from scipy.linalg import null_space

from .errors import ClosureError, DegenerateSystemError, ParseError, UnknownLetterError
from .golden import TAU, GoldenInt, GoldenNum, as_golden, format_golden, format_golden_int
from .linalg import nullspace, to_float_array
from .model_set import (
    ModelSetSpec,
    TypedPointSet,
    Window,
    cut_and_project,
    difference_set_member,
    difference_window,
    lattice_points_in_box,
    realize_tiling,
)
from .substitution import GeometricInflation
from .workers import chunked, parallel_map

logger = logging.getLogger(__name__)

Pair = Tuple[str, str]
Key = Tuple[str, str, GoldenInt]

FLOAT_CHECK_TOL = 1e-9


def as_pair(pair: Union[str, Sequence[str]]) -> Pair:
    if isinstance(pair, str):
        pair = pair.replace(",", "").strip()
        if len(pair) != 2:
            raise ParseError(f"pair {pair!r} must name exactly two letters")
    alpha, beta = pair
    return alpha, beta


def _check_pair(pair: Pair, letters: Sequence[str]) -> None:
    for x in pair:
        if x not in letters:
            raise UnknownLetterError(f"unknown letter {x!r}")


def all_pairs(letters: Sequence[str]) -> List[Pair]:
    return [(a, b) for a, b in product(letters, repeat=2)]


# -- closed form -------------------------------------------------------------


def _overlap(spec: ModelSetSpec, alpha: str, beta: str, y: GoldenNum) -> GoldenNum:
    return spec.window(alpha).intersection_volume(spec.window(beta).translate(-y))


@dataclass
class GFunctions:
    """
    Trapezoids g_ab(y) = vol(W_a ∩ (W_b - y)) / vol(W) with exact breakpoints.

    ``breakpoints[pair]`` holds the four corners y0 <= y1 <= y2 <= y3; g rises
    linearly on [y0, y1], stays at ``heights[pair]`` and falls on [y2, y3].
    """

    spec: ModelSetSpec
    breakpoints: Dict[Pair, Tuple[GoldenNum, GoldenNum, GoldenNum, GoldenNum]]
    heights: Dict[Pair, GoldenNum]

    def __call__(self, pair, y):
        pair = as_pair(pair)
        _check_pair(pair, self.spec.letters)
        xs = [float(v) for v in self.breakpoints[pair]]
        h = float(self.heights[pair])
        out = np.interp(np.asarray(y, dtype=float), xs, [0.0, h, h, 0.0], left=0.0, right=0.0)
        return float(out) if np.ndim(out) == 0 else out

    def exact(self, pair, y) -> GoldenNum:
        alpha, beta = as_pair(pair)
        return _overlap(self.spec, alpha, beta, as_golden(y)) / self.spec.volume

    def support(self, pair) -> Tuple[GoldenNum, GoldenNum]:
        corners = self.breakpoints[as_pair(pair)]
        return corners[0], corners[3]


@lru_cache(maxsize=32)
def g_functions(spec: Optional[ModelSetSpec] = None) -> GFunctions:
    spec = spec or ModelSetSpec.fibonacci()
    breakpoints, heights = {}, {}
    for alpha, beta in all_pairs(spec.letters):
        wa, wb = spec.window(alpha), spec.window(beta)
        inner = sorted((wb.lo - wa.lo, wb.hi - wa.hi))
        breakpoints[(alpha, beta)] = (wb.lo - wa.hi, inner[0], inner[1], wb.hi - wa.lo)
        heights[(alpha, beta)] = min(wa.volume, wb.volume) / spec.volume
    return GFunctions(spec, breakpoints, heights)


def g_eval(pair, y, spec: Optional[ModelSetSpec] = None):
    """g_ab at internal position y; GoldenNum input is evaluated exactly."""
    functions = g_functions(spec)
    if isinstance(y, GoldenNum):
        return float(functions.exact(pair, y))
    return functions(pair, y)


def nu_pair_exact(pair, z, spec: Optional[ModelSetSpec] = None) -> GoldenNum:
    spec = spec or ModelSetSpec.fibonacci()
    alpha, beta = as_pair(pair)
    _check_pair((alpha, beta), spec.letters)
    z = as_golden(z)
    if not difference_set_member(z, alpha, beta, spec):
        return GoldenNum(0)
    return _overlap(spec, alpha, beta, z.star()) / spec.volume


def nu_pair(pair, z, spec: Optional[ModelSetSpec] = None) -> float:
    """nu_ab(z) = g_ab(z*) on the difference set, 0 elsewhere."""
    return float(nu_pair_exact(pair, z, spec))


def covariogram(window: Window, y, other: Optional[Window] = None, normaliser=TAU):
    """
    (1/normaliser) * vol(window ∩ (other - y)), i.e. the convolution of the
    indicator of -window with that of ``other`` (default: window itself).
    """
    other = other or window
    if isinstance(y, GoldenNum):
        return window.intersection_volume(other.translate(-y)) / as_golden(normaliser)
    a1, a2 = window.as_float()
    b1, b2 = other.as_float()
    y = np.asarray(y, dtype=float)
    out = np.clip(np.minimum(a2, b2 - y) - np.maximum(a1, b1 - y), 0.0, None)
    out = out / float(normaliser)
    return float(out) if np.ndim(out) == 0 else out


def autocorrelation_exact(z, spec: Optional[ModelSetSpec] = None) -> GoldenNum:
    spec = spec or ModelSetSpec.fibonacci()
    return sum((nu_pair_exact(p, z, spec) for p in all_pairs(spec.letters)), GoldenNum(0))


def autocorrelation(z, spec: Optional[ModelSetSpec] = None) -> float:
    """nu(z) = Σ_ab nu_ab(z)."""
    return float(autocorrelation_exact(z, spec))


def weighted_autocorrelation(
    z, weights: Dict[str, complex], spec: Optional[ModelSetSpec] = None
) -> complex:
    """Σ_ab conj(h_a) h_b nu_ab(z) for the weighted comb with weights h."""
    spec = spec or ModelSetSpec.fibonacci()
    return complex(
        sum(
            np.conj(weights[a]) * weights[b] * nu_pair((a, b), z, spec)
            for a, b in all_pairs(spec.letters)
        )
    )


def support_points(
    spec: ModelSetSpec, pair: Pair, bound
) -> List[GoldenInt]:
    """All z with |z| <= bound at which nu_pair may be positive."""
    alpha, beta = as_pair(pair)
    bound = as_golden(bound)
    internal = difference_window(alpha, beta, spec)
    m, n = lattice_points_in_box(Window.closed(-bound, bound), internal)
    points = [GoldenInt(int(a), int(b)) for a, b in zip(m, n)]
    return sorted(points, key=float)


# -- renormalisation ---------------------------------------------------------


def relation_terms(
    inflation: GeometricInflation, alpha: str, beta: str, z
) -> List[Tuple[GoldenNum, str, str, GoldenInt]]:
    """
    Right-hand side of the relation for nu_{alpha beta}(z), unpruned:
    (coefficient, gamma, delta, w) with w = (z + t - s) / lambda. Repeated
    terms are merged.
    """
    z = as_golden(z)
    lam_inv = inflation.lam.inverse()
    merged: Dict[Tuple[str, str, GoldenInt], GoldenNum] = {}
    for gamma, delta in all_pairs(inflation.letters):
        for t in inflation.offsets(alpha, gamma):
            for s in inflation.offsets(beta, delta):
                w = ((z + t - s) * lam_inv).to_golden_int()
                key = (gamma, delta, w)
                merged[key] = merged.get(key, GoldenNum(0)) + lam_inv
    return [(coef, g, d, w) for (g, d, w), coef in merged.items()]


def closure_bound(inflation: GeometricInflation) -> GoldenNum:
    """B0 = Δ / (lambda - 1): |z| <= B0 implies every referenced |w| <= B0."""
    return inflation.max_offset_spread() / (inflation.lam - 1)


def sampled_support(
    inflation: GeometricInflation,
    bound,
    seed: str = "a|a",
    half_width: float = 2000.0,
) -> List[Key]:
    """Pairs (a, b, z) with |z| <= bound observed in a geometric realization."""
    bound_f = float(as_golden(bound)) + 1e-9
    points = realize_tiling(inflation.rule, seed, half_width)
    x = points.positions
    keys = {(t, t, GoldenInt(0, 0)) for t in inflation.letters}
    shortest = min(float(v) for v in inflation.lengths.values())
    for j in range(1, int(bound_f / shortest) + 2):
        close = (x[j:] - x[:-j]) <= bound_f
        if not close.any():
            break
        dm = points.m[j:][close] - points.m[:-j][close]
        dn = points.n[j:][close] - points.n[:-j][close]
        left = points.types[:-j][close]
        right = points.types[j:][close]
        for a, b, p, q in set(zip(left.tolist(), right.tolist(), dm.tolist(), dn.tolist())):
            keys.add((a, b, GoldenInt(p, q)))
            keys.add((b, a, GoldenInt(-p, -q)))
    return sorted(keys, key=lambda k: (k[0], k[1], float(k[2])))


def window_support(spec: ModelSetSpec, bound) -> List[Key]:
    keys = []
    for pair in all_pairs(spec.letters):
        keys.extend((pair[0], pair[1], z) for z in support_points(spec, pair, bound))
    return keys


@dataclass
class RenormSystem:
    """Finite closed set of renormalisation relations over ``index``."""

    inflation: GeometricInflation
    bound: GoldenNum
    index: Tuple[Key, ...]
    relations: Dict[Key, Tuple[Tuple[GoldenNum, Key], ...]]
    support: str
    unsampled: Tuple[Key, ...] = ()
    position: Dict[Key, int] = field(default_factory=dict)

    def __post_init__(self):
        self.position = {key: i for i, key in enumerate(self.index)}

    def __len__(self) -> int:
        return len(self.index)

    @property
    def lam(self) -> GoldenNum:
        return self.inflation.lam

    @property
    def letters(self) -> Tuple[str, ...]:
        return self.inflation.letters

    @property
    def families(self) -> List[Pair]:
        return sorted({(a, b) for a, b, _ in self.index})

    def relation(self, pair, z) -> Tuple[Tuple[GoldenNum, Key], ...]:
        alpha, beta = as_pair(pair)
        return self.relations[(alpha, beta, as_golden(z).to_golden_int())]

    def matrix(self) -> List[List[GoldenNum]]:
        """Exact coefficients of (A - I) nu = 0."""
        size = len(self.index)
        rows = []
        for i, key in enumerate(self.index):
            row = [GoldenNum(0)] * size
            row[i] = row[i] - 1
            for coef, ref in self.relations[key]:
                j = self.position[ref]
                row[j] = row[j] + coef
            rows.append(row)
        return rows


def build_renorm_system(
    inflation: GeometricInflation,
    spec: Optional[ModelSetSpec] = None,
    bound=None,
    seed: str = "a|a",
) -> RenormSystem:
    """
    Assemble the relations for every (alpha, beta, z) in the support with
    |z| <= bound (default: the closure bound B0).

    With ``spec`` the support comes from the window differences; without it,
    from pairs observed in a geometric realization grown from ``seed``.
    """
    bound = closure_bound(inflation) if bound is None else as_golden(bound)
    if spec is not None:
        index = window_support(spec, bound)
        support = "window"
    else:
        index = sampled_support(inflation, bound, seed)
        support = "sample"
    members = set(index)
    unsampled = set()

    relations = {}
    for alpha, beta, z in index:
        kept = []
        for coef, gamma, delta, w in relation_terms(inflation, alpha, beta, z):
            key = (gamma, delta, w)
            if key in members:
                kept.append((coef, key))
            elif abs(w) > bound:
                raise ClosureError(
                    f"relation for nu_{alpha}{beta}({format_golden_int(z)}) references "
                    f"|w| > bound at w = {format_golden_int(w)}",
                    z=w,
                )
            elif support == "sample":
                unsampled.add(key)
        relations[(alpha, beta, z)] = tuple(kept)

    logger.debug(
        "renormalisation system: %d unknowns, bound %s, %s support",
        len(index), bound, support,
    )
    shown = tuple(sorted(unsampled, key=lambda k: (k[0], k[1], float(k[2]))))
    if shown:
        logger.debug(
            "%d referenced pairs were not observed in the sample and count as zero: %s",
            len(shown),
            ", ".join(f"nu_{g}{d}({format_golden_int(w)})" for g, d, w in shown[:8]),
        )
    return RenormSystem(
        inflation, bound, tuple(index), relations, support, unsampled=shown
    )


@dataclass
class PairCorrelation:
    """
    Per-pair access to nu_ab(z), backed by the closed form (``backend="g"``)
    or by a solved renormalisation table (``backend="renorm"``).
    """

    backend: str
    letters: Tuple[str, ...]
    spec: Optional[ModelSetSpec] = None
    system: Optional[RenormSystem] = None
    table: Dict[Key, GoldenNum] = field(default_factory=dict)
    float_deviation: Optional[float] = None

    def __post_init__(self):
        self._memo: Dict[Key, GoldenNum] = dict(self.table)

    def exact(self, pair, z) -> GoldenNum:
        alpha, beta = as_pair(pair)
        _check_pair((alpha, beta), self.letters)
        z = as_golden(z)
        if not z.is_golden_int():
            return GoldenNum(0)
        if self.backend == "g":
            return nu_pair_exact((alpha, beta), z, self.spec)
        return self._extended((alpha, beta, z.to_golden_int()))

    def _extended(self, key: Key) -> GoldenNum:
        if key in self._memo:
            return self._memo[key]
        if abs(key[2]) <= self.system.bound:
            # inside the closed set and not in the table: outside the support
            return GoldenNum(0)
        value = sum(
            (
                coef * self._extended((g, d, w))
                for coef, g, d, w in relation_terms(self.system.inflation, *key)
            ),
            GoldenNum(0),
        )
        self._memo[key] = value
        return value

    def value(self, pair, z) -> float:
        return float(self.exact(pair, z))

    __call__ = value

    def autocorrelation(self, z) -> float:
        return float(sum((self.exact(p, z) for p in all_pairs(self.letters)), GoldenNum(0)))

    def table_frame(self, zs: Iterable, pairs: Optional[Sequence] = None) -> pd.DataFrame:
        """Rows z_float, m, n, pair, nu for every requested (pair, z)."""
        pairs = [as_pair(p) for p in (pairs or all_pairs(self.letters))]
        zs = [as_golden(z).to_golden_int() for z in zs]
        jobs = [(p, z) for p in pairs for z in zs]

        def evaluate(chunk):
            return [self.value(p, z) for p, z in chunk]

        if self.backend == "g":
            values = [v for part in parallel_map(evaluate, chunked(jobs, 256)) for v in part]
        else:
            # the recursion memo is shared state
            values = evaluate(jobs)
        return pd.DataFrame(
            {
                "z_float": [float(z) for _, z in jobs],
                "m": [z.m for _, z in jobs],
                "n": [z.n for _, z in jobs],
                "pair": ["".join(p) for p, _ in jobs],
                "nu": values,
            }
        )


def closed_form_correlation(spec: Optional[ModelSetSpec] = None) -> PairCorrelation:
    spec = spec or ModelSetSpec.fibonacci()
    return PairCorrelation("g", spec.letters, spec=spec)


def solve_renorm(system: RenormSystem) -> PairCorrelation:
    """
    Exact one-dimensional null space of (A - I), normalised so that
    Σ_a nu_aa(0) = 1, with a float null-space cross-check.
    """
    matrix = system.matrix()
    basis = nullspace(matrix)
    if len(basis) != 1:
        raise DegenerateSystemError(
            f"renormalisation system has a {len(basis)}-dimensional solution space",
            dimension=len(basis),
        )
    vector = basis[0]
    origin = GoldenInt(0, 0)
    diagonal = [system.position[(x, x, origin)] for x in system.letters]
    total = sum((vector[i] for i in diagonal), GoldenNum(0))
    vector = [v / total for v in vector]
    table = dict(zip(system.index, vector))

    deviation = None
    approx = null_space(to_float_array(matrix))
    if approx.shape[1] == 1:
        column = approx[:, 0] / approx[diagonal, 0].sum()
        deviation = float(np.max(np.abs(column - np.array([float(v) for v in vector]))))
        if deviation > FLOAT_CHECK_TOL:
            logger.warning("float null space deviates from the exact one by %.3g", deviation)
    else:
        logger.warning("float null space has dimension %d", approx.shape[1])

    logger.debug("solved renormalisation system with %d unknowns", len(vector))
    return PairCorrelation(
        "renorm", system.letters, system=system, table=table, float_deviation=deviation
    )


def relation_residual(
    inflation: GeometricInflation, correlation: PairCorrelation, pair, z
) -> float:
    """|lhs - rhs| of one renormalisation relation evaluated with ``correlation``."""
    alpha, beta = as_pair(pair)
    lhs = correlation.exact((alpha, beta), z)
    rhs = sum(
        (coef * correlation.exact((g, d), w) for coef, g, d, w in relation_terms(inflation, alpha, beta, z)),
        GoldenNum(0),
    )
    return abs(float(lhs - rhs))


# -- counting oracle ---------------------------------------------------------


def _encode(m: np.ndarray, n: np.ndarray) -> np.ndarray:
    return m.astype(np.int64) * (1 << 32) + n.astype(np.int64)


def count_pair_correlations(
    spec: Optional[ModelSetSpec] = None,
    n_points: int = 100_000,
    bound=10,
    points: Optional[TypedPointSet] = None,
) -> pd.DataFrame:
    """
    Direct pair counting on a finite patch: for every z in the support with
    |z| <= bound, the number of (alpha at x, beta at x + z) divided by the
    number of points x in the inner region.
    """
    spec = spec or ModelSetSpec.fibonacci()
    bound = as_golden(bound)
    if points is None:
        half_width = n_points / (2.0 * float(spec.density))
        points = cut_and_project(spec, Window.closed(-int(half_width), int(half_width)))
    x = points.positions
    lo, hi = x.min() + float(bound), x.max() - float(bound)
    inner = (x >= lo) & (x <= hi)
    n_inner = int(inner.sum())

    keys = _encode(points.m, points.n)
    order = np.argsort(keys)
    sorted_keys = keys[order]
    sorted_types = points.types[order]

    zs = sorted({z for p in all_pairs(spec.letters) for z in support_points(spec, p, bound)}, key=float)

    def count(z: GoldenInt) -> List[dict]:
        shifted = _encode(points.m[inner] + z.m, points.n[inner] + z.n)
        pos = np.clip(np.searchsorted(sorted_keys, shifted), 0, len(sorted_keys) - 1)
        found = sorted_keys[pos] == shifted
        left = points.types[inner][found]
        right = sorted_types[pos[found]]
        rows = []
        for alpha, beta in all_pairs(spec.letters):
            hits = int(np.count_nonzero((left == alpha) & (right == beta)))
            rows.append(
                {
                    "z_float": float(z),
                    "m": z.m,
                    "n": z.n,
                    "pair": alpha + beta,
                    "count": hits,
                    "nu": hits / n_inner,
                }
            )
        return rows

    rows = [row for part in parallel_map(count, zs) for row in part]
    logger.debug("pair counting over %d points, %d shifts", n_inner, len(zs))
    return pd.DataFrame(rows)


# -- the displayed series for nu(z) ------------------------------------------


def series_identity_residuals(
    z, spec: Optional[ModelSetSpec] = None, terms: int = 40, tol: float = 1e-9
) -> Dict[str, Any]:
    """
    Evaluate both readings of the series

        nu(z) = (1/tau^2) nu(X) + Σ_n tau^-(|n|+1) nu((z + sgn(n)((-tau)^|n| - 1)) / tau^(|n|+1))

    with X = 1/tau^2 as printed and with X = z/tau^2, and return the residuals
    |rhs - nu(z)| of each against the closed form. ``satisfied`` names the
    reading within ``tol`` ("as_printed", "rescaled" or "both"), or is None.
    """
    spec = spec or ModelSetSpec.fibonacci()
    z = as_golden(z)
    tau = TAU
    series = GoldenNum(0)
    for n in range(-terms, terms + 1):
        k = abs(n)
        scale = (tau ** (k + 1)).inverse()
        shift = (int(np.sign(n))) * ((-tau) ** k - 1)
        series = series + scale * autocorrelation_exact((z + shift) * scale, spec)
    lhs = autocorrelation_exact(z, spec)
    inv_sq = (tau ** 2).inverse()
    printed = abs(float(inv_sq * autocorrelation_exact(inv_sq, spec) + series - lhs))
    rescaled = abs(float(inv_sq * autocorrelation_exact(z * inv_sq, spec) + series - lhs))
    holds = [name for name, r in (("as_printed", printed), ("rescaled", rescaled)) if r < tol]
    satisfied = "both" if len(holds) == 2 else (holds[0] if holds else None)
    if satisfied is None:
        logger.debug("neither series reading holds at z = %s", format_golden(z))
    return {
        "nu": float(lhs),
        "as_printed": printed,
        "rescaled": rescaled,
        "satisfied": satisfied,
    }
