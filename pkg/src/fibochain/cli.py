"""
fibochain command line
======================

Usage:
    fibochain generate --rule fibonacci --steps 3 --seed-word "a|a"
    fibochain generate --modelset --window "(-1,t-1]" --region "[0,5]"
    fibochain freq "a@0 b@1*t"
    fibochain correlate --route renorm --bound 5
    fibochain diffract --kmax 10 --imin 1e-4 --out-dir out
    fibochain diffract --weights 1,0 --deform equal
    fibochain windows --rule reshuffled --depth 16 --out-dir out

Results go to stdout (or files under --out-dir); log lines go to stderr.
Exit status: 0 success, 2 usage error, 3 numeric or validation failure.
"""

import argparse
import logging
import os
import sys
from pathlib import Path
from typing import Dict, List, Optional

import numpy as np

from . import __version__
from .chart_data import (
    prepare_disk_chart,
    prepare_spectrum_chart,
    prepare_window_chart,
    render_chart,
)
from .config import RunConfig, load_run_config, validate_run_config
from .correlations import (
    all_pairs,
    as_pair,
    build_renorm_system,
    closed_form_correlation,
    solve_renorm,
    support_points,
)
from .diffraction import (
    Spectrum,
    WaveNumber,
    WeightedComb,
    cocycle_spectrum,
    deform_coeffs,
    deformed_spectrum,
    enumerate_peaks,
    equal_length_coeffs,
    finite_patch_amplitudes,
    product_2d_frame,
    spectrum_periodicity,
)
from .errors import FibochainError, IntervalLimitError, ParseError, UsageError
from .exporters import frame_to_csv, spectrum_to_json, write_text
from .golden import format_tau, parse_golden, parse_golden_int
from .log_utils import configure_logging, log_success
from .model_set import (
    ModelSetSpec,
    PatchSpec,
    cut_and_project,
    parse_window,
    patch_frequency,
    realize_tiling,
)
from .substitution import (
    geometric_inflation,
    get_rule,
    iterate_word,
    random_realization,
)
from .window_ifs import (
    boundary_dimension,
    build_graph_ifs,
    iterate_windows,
    seed_windows,
    sweep_windows,
)
from .workers import THREADS_ENV

logger = logging.getLogger("fibochain.cli")

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_NUMERIC = 3

PERIOD_TOL = 1e-6


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _spec_from(cfg: RunConfig) -> ModelSetSpec:
    return ModelSetSpec.from_window(parse_window(cfg.window))


def _out_path(cfg: RunConfig, name: str) -> Optional[Path]:
    if cfg.out_dir is None:
        return None
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out / name


# -- commands ----------------------------------------------------------------


def cmd_generate(cfg: RunConfig) -> int:
    if cfg.extras.get("modelset"):
        if cfg.rule != "fibonacci":
            logger.warning("model sets use the Fibonacci window; ignoring rule %s", cfg.rule)
        points = cut_and_project(_spec_from(cfg), cfg.region)
        text = frame_to_csv(points.to_frame(), _out_path(cfg, "points.csv"))
        if cfg.out_dir is None:
            sys.stdout.write(text)
        log_success(logger, "%d model-set points in %s", len(points), cfg.region)
        return EXIT_OK

    p = cfg.extras.get("random_p")
    if p is not None:
        word = random_realization(float(p), cfg.steps, cfg.seed)
    else:
        word = str(iterate_word(get_rule(cfg.rule), cfg.seed_word, cfg.steps))
    write_text(word, _out_path(cfg, "word.txt"))
    print(word)
    return EXIT_OK


def cmd_freq(cfg: RunConfig) -> int:
    try:
        patch = PatchSpec.parse(cfg.extras.get("patch", ""))
    except ParseError as exc:
        raise UsageError(str(exc)) from exc
    value = patch_frequency(patch, _spec_from(cfg))
    if value.is_rational():
        print(format_tau(value))
    else:
        print(f"{format_tau(value)} ≈ {float(value):.5f}")
    return EXIT_OK


def cmd_correlate(cfg: RunConfig) -> int:
    bound = parse_golden(cfg.bound)
    rule = get_rule(cfg.rule)
    spec = _spec_from(cfg) if cfg.rule == "fibonacci" else None
    pairs = [as_pair(p) for p in cfg.extras.get("pairs") or []] or all_pairs(rule.letters)

    if cfg.route == "g":
        if spec is None:
            raise UsageError("the closed-form route needs the Fibonacci window")
        correlation = closed_form_correlation(spec)
    else:
        system = build_renorm_system(geometric_inflation(rule), spec)
        correlation = solve_renorm(system)
        logger.info(
            "renormalisation: %d unknowns, float deviation %s",
            len(system), correlation.float_deviation,
        )

    if cfg.extras.get("z"):
        zs = [parse_golden_int(z) for z in cfg.extras["z"]]
    elif spec is not None:
        zs = sorted({z for p in pairs for z in support_points(spec, p, bound)}, key=float)
    else:
        zs = sorted({k[2] for k in correlation.table if abs(k[2]) <= bound}, key=float)

    frame = correlation.table_frame(zs, pairs)
    text = frame_to_csv(frame, _out_path(cfg, "correlations.csv"))
    if cfg.out_dir is None:
        sys.stdout.write(text)
    log_success(logger, "%d correlation values by the %s route", len(frame), cfg.route)
    return EXIT_OK


def _deformation(text: str):
    if text == "equal":
        return equal_length_coeffs()
    parts = [p.strip() for p in text.split(",")]
    if len(parts) != 2:
        raise UsageError(f"--deform expects 'equal' or 'la,lb', got {text!r}")
    return deform_coeffs(parse_golden(parts[0]), parse_golden(parts[1]))


def _write_spectrum(cfg: RunConfig, spectrum: Spectrum, frame) -> None:
    if cfg.out_format in ("json", "both"):
        spectrum_to_json(spectrum, _out_path(cfg, "spectrum.json"))
    if cfg.out_format in ("csv", "both"):
        frame_to_csv(frame, _out_path(cfg, "spectrum.csv"))
    svg = _out_path(cfg, "spectrum.svg")
    if svg is not None and len(spectrum):
        render_chart(prepare_spectrum_chart(spectrum), svg)
    disks = _out_path(cfg, "product.svg")
    if disks is not None and cfg.extras.get("product") and len(spectrum):
        render_chart(prepare_disk_chart(product_2d_frame(spectrum, cfg.imin)), disks)


def cmd_diffract(cfg: RunConfig) -> int:
    comb = WeightedComb.parse(cfg.weights)
    rule = get_rule(cfg.rule)
    coeffs = _deformation(cfg.deform) if cfg.deform is not None else None

    if cfg.method == "cocycle":
        ifs = build_graph_ifs(geometric_inflation(rule))
        spectrum = cocycle_spectrum(ifs, comb, cfg.kmax, cfg.imin, cfg.eps)
    elif coeffs is not None:
        spectrum = deformed_spectrum(coeffs, _spec_from(cfg), comb, cfg.kmax, cfg.imin)
    else:
        if cfg.rule != "fibonacci":
            raise UsageError("closed-form spectra need the Fibonacci window; use --method cocycle")
        spectrum = enumerate_peaks(_spec_from(cfg), comb, cfg.kmax, cfg.imin)

    frame = spectrum.to_frame()
    half_width = cfg.extras.get("half_width")
    if cfg.extras.get("cross_check") and len(spectrum):
        points = realize_tiling(rule, cfg.seed_word, float(half_width))
        positions = points.positions if coeffs is None else coeffs.positions(points)
        patch = finite_patch_amplitudes(
            positions, comb.point_weights(points.types), frame["k"].to_numpy(), float(half_width)
        )
        frame["patch_I"] = np.abs(patch) ** 2
        logger.info(
            "finite-patch cross-check: max |dI| = %.3g",
            float(np.max(np.abs(frame["patch_I"] - frame["I"]))),
        )

    _write_spectrum(cfg, spectrum, frame)
    if cfg.out_dir is None and cfg.out_format != "json":
        sys.stdout.write(frame_to_csv(frame))
    elif cfg.out_dir is None:
        sys.stdout.write(spectrum_to_json(spectrum))

    origin = spectrum.intensity_at(WaveNumber.of(0, 0))
    if origin is not None:
        print(f"I(0) = {origin:.15g}")
    if cfg.deform == "equal":
        check = spectrum_periodicity(spectrum)
        ok = check["compared"] > 0 and check["max_deviation"] <= PERIOD_TOL
        print(f"period τ/√5: {'PASS' if ok else 'FAIL'}")
        if not ok:
            return EXIT_NUMERIC
    log_success(logger, "%d peaks with I >= %g", len(spectrum), cfg.imin)
    return EXIT_OK


def cmd_windows(cfg: RunConfig) -> int:
    ifs = build_graph_ifs(geometric_inflation(get_rule(cfg.rule)))
    seed = seed_windows(ifs, cfg.extras.get("seed_kind") or "hull")
    try:
        approx = iterate_windows(ifs, seed, cfg.depth, exact=bool(cfg.extras.get("exact")))
    except IntervalLimitError as exc:
        logger.warning("%s; streaming statistics only, no interval table", exc)
        return _windows_sweep(cfg, ifs, seed)

    text = frame_to_csv(approx.to_frame(), _out_path(cfg, "windows.csv"))
    if cfg.out_dir is None:
        sys.stdout.write(text)
    svg = _out_path(cfg, "windows.svg")
    if svg is not None:
        render_chart(prepare_window_chart(approx), svg)

    if cfg.depth == 0:
        return EXIT_OK
    estimate = boundary_dimension(approx)
    print(
        f"box-count slope {estimate.slope:.6f} over {estimate.scales} scales "
        f"(rms residual {estimate.residual:.2e})"
    )
    log_success(logger, "%d intervals at depth %d", approx.interval_count(), cfg.depth)
    return EXIT_OK


def _windows_sweep(cfg: RunConfig, ifs, seed) -> int:
    sweep = sweep_windows(ifs, seed, cfg.depth)
    estimate = sweep.estimate
    print(
        f"box-count slope {estimate.slope:.6f} over {estimate.scales} scales "
        f"(rms residual {estimate.residual:.2e})"
    )
    for letter in sweep.letters:
        print(
            f"{letter}: {sweep.counts[letter]} intervals, volume {sweep.merged_volume(letter):.12f}, "
            f"overlap {sweep.overlap(letter):.2e}"
        )
    log_success(logger, "%d intervals at depth %d (streamed)", sweep.interval_count(), cfg.depth)
    return EXIT_OK


COMMANDS = {
    "generate": cmd_generate,
    "freq": cmd_freq,
    "correlate": cmd_correlate,
    "diffract": cmd_diffract,
    "windows": cmd_windows,
}


# -- argument parsing --------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="fibochain", description="Exact computations for the Fibonacci chain")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--verbose", action="store_true", help="Enable debug logging")
    parser.add_argument("--quiet", action="store_true", help="Only log successes and problems")
    parser.add_argument("--profile", help="Profile in fibochain.toml")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p):
        p.add_argument("--rule", help="Built-in rule name or '(ab,a)' text")
        p.add_argument("--window", help="Total window, e.g. '(-1,t-1]'")
        p.add_argument("--out-dir", dest="out_dir")
        p.add_argument("--format", dest="out_format", choices=["csv", "json", "both"])
        p.add_argument("--seed", type=int)
        p.add_argument("--threads", type=int)

    p = sub.add_parser("generate", help="Words and model-set point sets")
    common(p)
    p.add_argument("--steps", type=int)
    p.add_argument("--seed-word", dest="seed_word")
    p.add_argument("--modelset", action="store_true")
    p.add_argument("--region")
    p.add_argument("--random-p", dest="random_p", type=float)

    p = sub.add_parser("freq", help="Exact patch frequency")
    common(p)
    p.add_argument("patch", nargs="?", default="")

    p = sub.add_parser("correlate", help="Pair correlations")
    common(p)
    p.add_argument("--route", choices=["g", "renorm"])
    p.add_argument("--bound", help="Largest |z|, exact text")
    p.add_argument("--pair", dest="pairs", action="append")
    p.add_argument("--z", action="append", help="Exact 'm+n*t' values (repeatable)")

    p = sub.add_parser("diffract", help="Bragg spectra")
    common(p)
    p.add_argument("--weights")
    p.add_argument("--kmax", type=float)
    p.add_argument("--imin", type=float)
    p.add_argument("--method", choices=["closed", "cocycle"])
    p.add_argument("--eps", type=float)
    p.add_argument("--deform", help="'equal' or exact tile lengths 'la,lb'")
    p.add_argument("--seed-word", dest="seed_word")
    p.add_argument("--cross-check", dest="cross_check", action="store_true")
    p.add_argument("--half-width", dest="half_width", type=float, default=1e4)
    p.add_argument("--product", action="store_true", help="Also draw the 2D product disks")

    p = sub.add_parser("windows", help="Window IFS approximants")
    common(p)
    p.add_argument("--depth", type=int)
    p.add_argument("--seed-kind", dest="seed_kind", choices=["hull", "volume"])
    p.add_argument("--exact", action="store_true")
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        configure_logging()
        logger.error("%s", exc)
        return EXIT_USAGE

    configure_logging(verbose=args.verbose, quiet=args.quiet)
    values: Dict = {k: v for k, v in vars(args).items() if k not in ("verbose", "quiet", "profile", "command")}
    try:
        cfg = load_run_config(values, profile=args.profile)
        is_valid, errors = validate_run_config(cfg, args.command)
        if not is_valid:
            for error in errors:
                logger.error("%s", error)
            return EXIT_USAGE
        if cfg.threads:
            os.environ[THREADS_ENV] = str(cfg.threads)
        return COMMANDS[args.command](cfg)
    except UsageError as exc:
        logger.error("%s", exc)
        return EXIT_USAGE
    except FibochainError as exc:
        logger.error("%s", exc)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
