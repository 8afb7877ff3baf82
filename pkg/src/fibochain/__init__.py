"""
fibochain
=========

Exact computations for the Fibonacci chain and its two-letter relatives:
substitution dynamics, cut-and-project model sets, patch frequencies, pair
correlations and pure-point diffraction, each closed form paired with an
independent numerical check.
"""

__version__ = "0.3.0"

from .errors import FibochainError  # noqa: E402
from .golden import (  # noqa: E402
    SQRT5,
    TAU,
    GoldenInt,
    GoldenNum,
    LatticePoint,
    compare,
    field_norm,
    parse_golden,
    star,
    to_float,
)
from .substitution import (  # noqa: E402
    factor_complexity,
    geometric_inflation,
    get_rule,
    iterate_word,
    letter_frequencies,
    pf_data,
    random_realization,
    substitution_matrix,
    two_cycle,
)
from .model_set import (  # noqa: E402
    ModelSetSpec,
    PatchSpec,
    Window,
    cut_and_project,
    patch_frequency,
)
from .window_ifs import boundary_dimension, build_graph_ifs, iterate_windows, sweep_windows  # noqa: E402
from .correlations import (  # noqa: E402
    build_renorm_system,
    closed_form_correlation,
    nu_pair,
    solve_renorm,
)
from .diffraction import (  # noqa: E402
    WeightedComb,
    bragg_intensity,
    cocycle_spectrum,
    deformed_spectrum,
    enumerate_peaks,
    fb_amplitude_closed,
)

__all__ = [
    "__version__",
    "FibochainError",
    "SQRT5",
    "TAU",
    "GoldenInt",
    "GoldenNum",
    "LatticePoint",
    "compare",
    "field_norm",
    "parse_golden",
    "star",
    "to_float",
    "factor_complexity",
    "geometric_inflation",
    "get_rule",
    "iterate_word",
    "letter_frequencies",
    "pf_data",
    "random_realization",
    "substitution_matrix",
    "two_cycle",
    "ModelSetSpec",
    "PatchSpec",
    "Window",
    "cut_and_project",
    "patch_frequency",
    "boundary_dimension",
    "build_graph_ifs",
    "iterate_windows",
    "sweep_windows",
    "build_renorm_system",
    "closed_form_correlation",
    "nu_pair",
    "solve_renorm",
    "WeightedComb",
    "bragg_intensity",
    "cocycle_spectrum",
    "deformed_spectrum",
    "enumerate_peaks",
    "fb_amplitude_closed",
]
