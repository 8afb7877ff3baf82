"""
Diffraction
===========

Fourier-Bohr amplitudes of weighted Dirac combs on model sets.

The Fourier module is Z[tau]/sqrt5: a wave number k = y/sqrt5 with y in
Z[tau] has k* = -y*/sqrt5, and for interval windows

    A(k) = (1/sqrt5) * Σ_a h_a * FT[1_{W_a}](-k*),

where FT[1_{[c,d]}](u) = ∫_c^d exp(-2πiut) dt. Three routes are provided:
the closed form above, the Fourier matrix cocycle of the window IFS (fractal
windows), and finite-patch exponential sums as a numerical oracle. Sheared
realizations p'(x) = alpha*x + beta*x* are handled by the same peak table.
"""

import json
import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd

from .errors import NotPisotError, SpectrumError
from .golden import SQRT5, TAU, GoldenInt, GoldenNum, as_golden, format_golden_int
from .model_set import ModelSetSpec, TypedPointSet, Window, lattice_points_in_box
from .window_ifs import GraphIFS, volume_vector
from .workers import chunked, parallel_map

logger = logging.getLogger(__name__)

SQRT5_F = math.sqrt(5.0)
DEFAULT_EPS = 1e-10
PATCH_CHUNK = 8


@dataclass(frozen=True)
class WaveNumber:
    """k = y / sqrt5 with y = m + n*tau."""

    y: GoldenInt

    @classmethod
    def of(cls, m: int, n: int) -> "WaveNumber":
        return cls(GoldenInt(m, n))

    @classmethod
    def from_exact(cls, k) -> Optional["WaveNumber"]:
        """The wave number equal to k, or None when k is outside Z[tau]/sqrt5."""
        y = as_golden(k) * SQRT5
        return cls(y.to_golden_int()) if y.is_golden_int() else None

    @property
    def m(self) -> int:
        return self.y.m

    @property
    def n(self) -> int:
        return self.y.n

    @property
    def exact(self) -> GoldenNum:
        return self.y / SQRT5

    @property
    def value(self) -> float:
        return float(self.y) / SQRT5_F

    @property
    def star_value(self) -> float:
        return -float(self.y.star()) / SQRT5_F

    def scaled(self, factor: GoldenInt) -> "WaveNumber":
        return WaveNumber(self.y * factor)

    def __neg__(self) -> "WaveNumber":
        return WaveNumber(-self.y)

    def __str__(self) -> str:
        return f"({format_golden_int(self.y)})/s5"


def as_wave(k) -> Optional[WaveNumber]:
    if isinstance(k, WaveNumber):
        return k
    if isinstance(k, (GoldenNum, int, Fraction)):
        return WaveNumber.from_exact(k)
    raise SpectrumError(f"wave number {k!r} must be exact")


@dataclass(frozen=True)
class WeightedComb:
    h_a: complex = 1.0
    h_b: complex = 1.0

    @classmethod
    def parse(cls, text: str) -> "WeightedComb":
        parts = [p.strip() for p in text.split(",")]
        if len(parts) != 2:
            raise SpectrumError(f"weights {text!r} must be two comma-separated numbers")
        try:
            return cls(complex(parts[0]), complex(parts[1]))
        except ValueError as exc:
            raise SpectrumError(f"cannot parse weights {text!r}") from exc

    def weight(self, letter: str) -> complex:
        return {"a": self.h_a, "b": self.h_b}[letter]

    def as_dict(self) -> Dict[str, complex]:
        return {"a": self.h_a, "b": self.h_b}

    @property
    def total_magnitude(self) -> float:
        return abs(self.h_a) + abs(self.h_b)

    def point_weights(self, types: np.ndarray) -> np.ndarray:
        return np.where(types == "a", complex(self.h_a), complex(self.h_b))


@dataclass(frozen=True)
class BraggPeak:
    wave: WaveNumber
    k: float
    amplitude: complex

    @property
    def intensity(self) -> float:
        return abs(self.amplitude) ** 2


@dataclass
class Spectrum:
    """Bragg peaks sorted by position."""

    peaks: List[BraggPeak]
    alpha: float = 1.0
    beta: float = 0.0

    def __len__(self) -> int:
        return len(self.peaks)

    def __iter__(self):
        return iter(self.peaks)

    @property
    def positions(self) -> np.ndarray:
        return np.array([p.k for p in self.peaks])

    @property
    def intensities(self) -> np.ndarray:
        return np.array([p.intensity for p in self.peaks])

    def lookup(self) -> Dict[Tuple[int, int], BraggPeak]:
        return {(p.wave.m, p.wave.n): p for p in self.peaks}

    def intensity_at(self, wave: WaveNumber) -> Optional[float]:
        peak = self.lookup().get((wave.m, wave.n))
        return None if peak is None else peak.intensity

    def central_intensity(self) -> float:
        value = self.intensity_at(WaveNumber.of(0, 0))
        if value is None:
            raise SpectrumError("spectrum has no peak at k = 0")
        return value

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(
            {
                "m": [p.wave.m for p in self.peaks],
                "n": [p.wave.n for p in self.peaks],
                "k": [p.k for p in self.peaks],
                "re": [p.amplitude.real for p in self.peaks],
                "im": [p.amplitude.imag for p in self.peaks],
                "I": [p.intensity for p in self.peaks],
            }
        )

    def to_records(self) -> List[dict]:
        return [
            {
                "m": p.wave.m,
                "n": p.wave.n,
                "k": p.k,
                "re": p.amplitude.real,
                "im": p.amplitude.imag,
                "I": p.intensity,
            }
            for p in self.peaks
        ]

    def to_json(self) -> str:
        return json.dumps(self.to_records(), indent=1)


# -- closed form -------------------------------------------------------------


def interval_transform(c: float, d: float, u):
    """∫_c^d exp(-2πiut) dt, vectorised over u."""
    u = np.asarray(u, dtype=float)
    return np.exp(-1j * np.pi * u * (c + d)) * (d - c) * np.sinc(u * (d - c))


def _require_intervals(spec) -> ModelSetSpec:
    if spec is None:
        return ModelSetSpec.fibonacci()
    if not isinstance(spec, ModelSetSpec):
        raise SpectrumError("closed-form amplitudes need interval windows; use the cocycle")
    return spec


def _closed_amplitudes(
    spec: ModelSetSpec,
    comb: WeightedComb,
    kappa: np.ndarray,
    kappa_star: np.ndarray,
    alpha: float = 1.0,
    beta: float = 0.0,
) -> Tuple[np.ndarray, np.ndarray]:
    """Positions q = kappa/alpha and amplitudes at internal argument q*beta - kappa*."""
    q = kappa / alpha
    u = q * beta - kappa_star
    total = np.zeros(len(q), dtype=complex)
    for letter, window in spec.windows:
        c, d = window.as_float()
        total = total + comb.weight(letter) * interval_transform(c, d, u)
    return q, total / (alpha * SQRT5_F)


def fb_amplitude_closed(
    k, spec: Optional[ModelSetSpec] = None, comb: Optional[WeightedComb] = None
) -> complex:
    """Fourier-Bohr amplitude; 0 for exact k outside Z[tau]/sqrt5."""
    spec = _require_intervals(spec)
    comb = comb or WeightedComb()
    wave = as_wave(k)
    if wave is None:
        return 0j
    _, amp = _closed_amplitudes(
        spec, comb, np.array([wave.value]), np.array([wave.star_value])
    )
    return complex(amp[0])


def bragg_intensity(k, spec: Optional[ModelSetSpec] = None, comb: Optional[WeightedComb] = None) -> float:
    return abs(fb_amplitude_closed(k, spec, comb)) ** 2


def _rational_bound(value: float) -> GoldenNum:
    return GoldenNum(Fraction(value * (1 + 1e-9) + 1e-9))


def _candidate_waves(
    phys_bound: float, internal_bound: float
) -> Tuple[np.ndarray, np.ndarray]:
    """All y in Z[tau] with |y| <= phys_bound and |y*| <= internal_bound."""
    p = _rational_bound(phys_bound)
    i = _rational_bound(internal_bound)
    return lattice_points_in_box(Window.closed(-p, p), Window.closed(-i, i))


def _peak_table(
    spec: ModelSetSpec,
    comb: WeightedComb,
    kmax: float,
    imin: float,
    alpha: float = 1.0,
    beta: float = 0.0,
) -> Spectrum:
    if kmax <= 0:
        raise SpectrumError("kmax must be positive")
    if imin <= 0:
        raise SpectrumError("imin must be positive: the Bragg peaks are dense")
    if alpha <= 0:
        raise SpectrumError("alpha must be positive")

    # |FT[1_W](u)| <= 1/(pi |u|) bounds the internal argument of every peak
    u_max = comb.total_magnitude / (alpha * SQRT5_F * math.pi * math.sqrt(imin))
    m, n = _candidate_waves(
        SQRT5_F * alpha * kmax, SQRT5_F * (kmax * abs(beta) + u_max)
    )
    kappa = (m + n * float(TAU)) / SQRT5_F
    kappa_star = -(m + n * (1.0 - float(TAU))) / SQRT5_F
    q, amp = _closed_amplitudes(spec, comb, kappa, kappa_star, alpha, beta)
    intensity = np.abs(amp) ** 2
    keep = (np.abs(q) <= kmax) & (intensity >= imin)
    order = np.argsort(q[keep], kind="stable")
    mk, nk, qk, ak = m[keep][order], n[keep][order], q[keep][order], amp[keep][order]
    peaks = [
        BraggPeak(WaveNumber.of(int(a), int(b)), float(x), complex(v))
        for a, b, x, v in zip(mk, nk, qk, ak)
    ]
    logger.debug(
        "peak table: %d candidates, %d peaks with I >= %g", len(m), len(peaks), imin
    )
    return Spectrum(peaks, alpha, beta)


def enumerate_peaks(
    spec: Optional[ModelSetSpec] = None,
    comb: Optional[WeightedComb] = None,
    kmax: float = 10.0,
    imin: float = 1e-4,
) -> Spectrum:
    """Every peak with |k| <= kmax and I(k) >= imin, ascending in k."""
    return _peak_table(_require_intervals(spec), comb or WeightedComb(), kmax, imin)


# -- Fourier matrix cocycle --------------------------------------------------


@dataclass(frozen=True)
class FourierMatrix:
    """B(y)_ab = Σ_{t ∈ T*_ab} exp(-2πi y t) over the starred displacements."""

    ifs: GraphIFS

    def batch(self, y) -> np.ndarray:
        y = np.atleast_1d(np.asarray(y, dtype=float))
        letters = self.ifs.letters
        out = np.zeros((len(y), len(letters), len(letters)), dtype=complex)
        for i, a in enumerate(letters):
            for j, b in enumerate(letters):
                for t in self.ifs.translations(a, b):
                    out[:, i, j] += np.exp(-2j * np.pi * y * float(t))
        return out

    def __call__(self, y: float) -> np.ndarray:
        return self.batch([y])[0]


def window_transforms(ifs: GraphIFS, y, eps: float = DEFAULT_EPS) -> np.ndarray:
    """
    Vector h(y) = (FT[1_{W_a}](y), FT[1_{W_b}](y)) for every y, from the
    recursion h(y) = |c| B(y) h(c y) closed with h(y_N) = volumes at |y_N| < eps.
    """
    c = ifs.contraction_float
    if abs(c) >= 1:
        raise NotPisotError("window IFS does not contract")
    if eps <= 0:
        raise SpectrumError("eps must be positive")
    y = np.atleast_1d(np.asarray(y, dtype=float))
    y_max = float(np.max(np.abs(y))) if len(y) else 0.0
    steps = 0 if y_max < eps else int(math.ceil(math.log(eps / y_max) / math.log(abs(c))))
    volumes = volume_vector(ifs)
    h = np.tile(np.array([float(volumes[x]) for x in ifs.letters], dtype=complex), (len(y), 1))
    matrix = FourierMatrix(ifs)
    for j in range(steps - 1, -1, -1):
        b = matrix.batch(y * c ** j)
        h = abs(c) * np.einsum("kij,kj->ki", b, h)
    logger.debug("cocycle: %d steps for %d wave numbers", steps, len(y))
    return h


def _cocycle_amplitudes(
    ifs: GraphIFS, comb: WeightedComb, kappa_star: np.ndarray, eps: float
) -> np.ndarray:
    h = window_transforms(ifs, -kappa_star, eps)
    weights = np.array([comb.weight(x) for x in ifs.letters], dtype=complex)
    return (h @ weights) / SQRT5_F


def fb_amplitude_cocycle(
    k, ifs: GraphIFS, comb: Optional[WeightedComb] = None, eps: float = DEFAULT_EPS
) -> complex:
    wave = as_wave(k)
    if wave is None:
        return 0j
    amp = _cocycle_amplitudes(ifs, comb or WeightedComb(), np.array([wave.star_value]), eps)
    return complex(amp[0])


def cocycle_spectrum(
    ifs: GraphIFS,
    comb: Optional[WeightedComb] = None,
    kmax: float = 10.0,
    imin: float = 1e-4,
    eps: float = DEFAULT_EPS,
) -> Spectrum:
    """
    Peaks from the cocycle over the internal box of the interval bound.

    The box is exhaustive for interval windows; for fractal windows it is the
    same heuristic cutoff.
    """
    comb = comb or WeightedComb()
    if imin <= 0:
        raise SpectrumError("imin must be positive: the Bragg peaks are dense")
    u_max = comb.total_magnitude / (SQRT5_F * math.pi * math.sqrt(imin))
    m, n = _candidate_waves(SQRT5_F * kmax, SQRT5_F * u_max)
    kappa = (m + n * float(TAU)) / SQRT5_F
    kappa_star = -(m + n * (1.0 - float(TAU))) / SQRT5_F
    parts = parallel_map(
        lambda idx: _cocycle_amplitudes(ifs, comb, kappa_star[idx], eps),
        chunked(np.arange(len(m)), 512),
    )
    amp = np.concatenate(parts) if parts else np.zeros(0, dtype=complex)
    keep = (np.abs(kappa) <= kmax) & (np.abs(amp) ** 2 >= imin)
    order = np.argsort(kappa[keep], kind="stable")
    peaks = [
        BraggPeak(WaveNumber.of(int(a), int(b)), float(x), complex(v))
        for a, b, x, v in zip(m[keep][order], n[keep][order], kappa[keep][order], amp[keep][order])
    ]
    return Spectrum(peaks)


# -- finite patches ----------------------------------------------------------


def finite_patch_amplitudes(
    positions: np.ndarray, weights: np.ndarray, ks, half_width: float
) -> np.ndarray:
    """(1/(2n)) Σ_x w_x exp(-2πikx) for every k, chunked over k."""
    ks = np.atleast_1d(np.asarray(ks, dtype=float))
    positions = np.asarray(positions, dtype=float)
    weights = np.asarray(weights, dtype=complex)

    def block(sub: np.ndarray) -> np.ndarray:
        return np.exp(-2j * np.pi * np.outer(sub, positions)) @ weights

    parts = parallel_map(block, chunked(ks, PATCH_CHUNK))
    return np.concatenate(parts) / (2.0 * half_width)


def finite_patch_amplitude(
    points: TypedPointSet,
    comb: Optional[WeightedComb] = None,
    k: float = 0.0,
    half_width: Optional[float] = None,
    coeffs: Optional["DeformCoeffs"] = None,
) -> complex:
    """
    Finite-patch estimate of the amplitude of the points sampled from
    [-n, n], optionally after the deformation ``coeffs`` (the region then
    becomes [-alpha*n, alpha*n]).
    """
    if len(points) == 0:
        raise SpectrumError("finite patch needs at least one point")
    comb = comb or WeightedComb()
    x = points.positions
    n = half_width if half_width is not None else float(np.max(np.abs(x)))
    if coeffs is not None:
        x = coeffs.positions(points)
        n = n * coeffs.alpha_f
    k_value = k.value if isinstance(k, WaveNumber) else float(k)
    amp = finite_patch_amplitudes(x, comb.point_weights(points.types), [k_value], n)
    return complex(amp[0])


def phase_translation_check(
    k,
    t: GoldenInt,
    points: Optional[TypedPointSet] = None,
    spec: Optional[ModelSetSpec] = None,
    comb: Optional[WeightedComb] = None,
    half_width: Optional[float] = None,
) -> Dict[str, Optional[float]]:
    """
    |A_{t+Lambda}(k) - exp(-2πikt) A_Lambda(k)| by the closed form (the
    translated set is the model set with windows shifted by t*), and, when
    ``points`` is given, by finite patches over the same region [-n, n].
    """
    from .model_set import cut_and_project

    spec = _require_intervals(spec)
    comb = comb or WeightedComb()
    wave = as_wave(k)
    t = as_golden(t).to_golden_int()
    if wave is None:
        return {"closed": 0.0, "finite_patch": None}
    phase = np.exp(-2j * np.pi * wave.value * float(t))
    shifted = fb_amplitude_closed(wave, spec.translate_internal(t.star()), comb)
    closed = abs(shifted - phase * fb_amplitude_closed(wave, spec, comb))

    patch = None
    if points is not None:
        n = half_width if half_width is not None else float(np.max(np.abs(points.positions)))
        base = finite_patch_amplitude(points, comb, wave.value, n)
        region = Window.closed(-_rational_bound(n) - t, _rational_bound(n) - t)
        moved = cut_and_project(spec, region)
        moved = TypedPointSet(moved.m + t.m, moved.n + t.n, moved.types)
        patch = abs(finite_patch_amplitude(moved, comb, wave.value, n) - phase * base)
    return {"closed": float(closed), "finite_patch": None if patch is None else float(patch)}


# -- deformations ------------------------------------------------------------


@dataclass(frozen=True)
class DeformCoeffs:
    """p'(x) = alpha*x + beta*x*; tile a gets length la, tile b length lb."""

    la: Union[GoldenNum, float]
    lb: Union[GoldenNum, float]
    alpha: Union[GoldenNum, float]
    beta: Union[GoldenNum, float]

    @property
    def alpha_f(self) -> float:
        return float(self.alpha)

    @property
    def beta_f(self) -> float:
        return float(self.beta)

    @property
    def exact(self) -> bool:
        return isinstance(self.alpha, GoldenNum)

    def position(self, x):
        x = as_golden(x)
        if self.exact:
            return self.alpha * x + self.beta * x.star()
        return self.alpha_f * float(x) + self.beta_f * float(x.star())

    def positions(self, points: TypedPointSet) -> np.ndarray:
        return self.alpha_f * points.positions + self.beta_f * points.internal


def deform_coeffs(la, lb) -> DeformCoeffs:
    """Shear coefficients for tile lengths (la, lb); exact for exact input."""
    if isinstance(la, (GoldenNum, int, Fraction)) and isinstance(lb, (GoldenNum, int, Fraction)):
        la, lb = as_golden(la), as_golden(lb)
        if la.sign() <= 0 or lb.sign() <= 0:
            raise SpectrumError("tile lengths must be positive")
        alpha = (la + lb / TAU) / SQRT5
        beta = (lb * TAU - la) / SQRT5
        return DeformCoeffs(la, lb, alpha, beta)
    la, lb = float(la), float(lb)
    if la <= 0 or lb <= 0:
        raise SpectrumError("tile lengths must be positive")
    tau = float(TAU)
    return DeformCoeffs(la, lb, (la + lb / tau) / SQRT5_F, (lb * tau - la) / SQRT5_F)


def equal_length_coeffs() -> DeformCoeffs:
    """Both tiles of length sqrt5/tau, the average Fibonacci tile length."""
    length = SQRT5 / TAU
    return deform_coeffs(length, length)


def deformed_spectrum(
    coeffs: DeformCoeffs,
    spec: Optional[ModelSetSpec] = None,
    comb: Optional[WeightedComb] = None,
    kmax: float = 10.0,
    imin: float = 1e-4,
) -> Spectrum:
    """Peaks at q = kappa/alpha with the window transform taken at q*beta - kappa*."""
    if coeffs.alpha_f <= 0:
        raise SpectrumError("alpha must be positive")
    return _peak_table(
        _require_intervals(spec),
        comb or WeightedComb(),
        kmax,
        imin,
        coeffs.alpha_f,
        coeffs.beta_f,
    )


def spectrum_periodicity(spectrum: Spectrum, shift: GoldenInt = TAU) -> Dict[str, float]:
    """
    Compare I at y and y + shift for every listed peak whose partner is also
    listed; the period in k is shift / (sqrt5 * alpha).
    """
    table = spectrum.lookup()
    deviations = []
    for (m, n), peak in table.items():
        partner = table.get(((GoldenInt(m, n) + shift).m, (GoldenInt(m, n) + shift).n))
        if partner is not None:
            deviations.append(abs(partner.intensity - peak.intensity))
    return {
        "period": float(shift) / (SQRT5_F * spectrum.alpha),
        "compared": len(deviations),
        "max_deviation": max(deviations) if deviations else float("nan"),
    }


def inflation_closed(
    spectrum: Spectrum,
    kmax: float,
    imin: float,
    factor: GoldenInt = TAU,
    spec: Optional[ModelSetSpec] = None,
    comb: Optional[WeightedComb] = None,
) -> bool:
    """
    Whether the peak list is closed under k -> factor * k within its own cuts:
    every inflated wave the closed form puts at or above ``imin`` with
    |k| <= ``kmax`` must be listed too.
    """
    listed = spectrum.lookup()
    for peak in spectrum:
        image = peak.wave.scaled(factor)
        if abs(image.value) > kmax * (1 - 1e-12):
            continue
        if bragg_intensity(image, spec, comb) < imin * (1 + 1e-9):
            continue
        if (image.m, image.n) not in listed:
            logger.debug("%s is listed but its inflation %s is not", peak.wave, image)
            return False
    return True


# -- direct products ---------------------------------------------------------


def product_2d_intensity(
    k1, k2, spec: Optional[ModelSetSpec] = None, comb: Optional[WeightedComb] = None
) -> float:
    """Intensity of the direct product of two copies: I(k1) * I(k2)."""
    return bragg_intensity(k1, spec, comb) * bragg_intensity(k2, spec, comb)


def product_2d_frame(spectrum: Spectrum, imin: float) -> pd.DataFrame:
    """All products of listed 1D peaks with intensity >= imin."""
    k = spectrum.positions
    intensity = spectrum.intensities
    grid = np.outer(intensity, intensity)
    i, j = np.nonzero(grid >= imin)
    return pd.DataFrame({"k1": k[i], "k2": k[j], "I": grid[i, j]})
