"""
Run Configuration
=================

Settings for a command-line run come from four layers, later ones winning:

1. built-in defaults (``RunConfig`` field defaults)
2. a TOML file: ``fibochain.toml`` in the working directory, or the path in
   ``FIBOCHAIN_CONFIG``; ``default_profile`` names a ``[profiles.<name>]`` table
3. environment (``FIBOCHAIN_THREADS``)
4. command-line flags

Example ``fibochain.toml``::

    default_profile = "figures"

    [profiles.figures]
    kmax = 10.0
    imin = 1e-4
    out_dir = "out"
"""

import logging
import os
from dataclasses import dataclass, field, fields, replace
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

try:
    import tomllib as tomli  # Python 3.11+
except Exception:  # pragma: no cover
    import tomli

from .errors import UsageError
from .workers import THREADS_ENV

logger = logging.getLogger(__name__)

CONFIG_ENV = "FIBOCHAIN_CONFIG"
CONFIG_FILENAME = "fibochain.toml"

METHODS = ("closed", "cocycle")
FORMATS = ("csv", "json", "both")
ROUTES = ("g", "renorm")


@dataclass
class RunConfig:
    rule: str = "fibonacci"
    window: str = "(-1, t-1]"
    region: Optional[str] = None
    seed_word: str = "a|a"
    steps: int = 0
    weights: str = "1,1"
    kmax: float = 10.0
    imin: float = 1e-4
    depth: int = 10
    deform: Optional[str] = None
    method: str = "closed"
    eps: float = 1e-10
    route: str = "g"
    bound: str = "5"
    out_format: str = "both"
    out_dir: Optional[str] = None
    seed: int = 0
    threads: Optional[int] = None
    extras: Dict[str, Any] = field(default_factory=dict)

    def with_overrides(self, values: Dict[str, Any]) -> "RunConfig":
        known = {f.name for f in fields(self)} - {"extras"}
        updates = {k: v for k, v in values.items() if k in known and v is not None}
        unknown = {k: v for k, v in values.items() if k not in known}
        merged = replace(self, **updates)
        merged.extras = {**self.extras, **unknown}
        return merged


def find_config_file(cwd: Optional[Path] = None) -> Optional[Path]:
    explicit = os.getenv(CONFIG_ENV)
    if explicit:
        path = Path(explicit).expanduser()
        if not path.is_file():
            raise UsageError(f"{CONFIG_ENV} points to missing file {path}")
        return path
    candidate = (cwd or Path.cwd()) / CONFIG_FILENAME
    return candidate if candidate.is_file() else None


def load_profile(path: Path, profile: Optional[str] = None) -> Dict[str, Any]:
    """The selected ``[profiles.<name>]`` table of a TOML file."""
    try:
        with open(path, "rb") as f:
            config = tomli.load(f)
    except tomli.TOMLDecodeError as exc:
        raise UsageError(f"cannot parse {path}: {exc}") from exc

    name = profile or config.get("default_profile")
    if not name:
        return {}
    profiles = config.get("profiles", {})
    if name not in profiles:
        raise UsageError(f"profile {name!r} not found in {path}")
    logger.debug("using profile %r from %s", name, path)
    return dict(profiles[name])


def environment_overrides() -> Dict[str, Any]:
    raw = os.getenv(THREADS_ENV)
    if not raw:
        return {}
    try:
        return {"threads": int(raw)}
    except ValueError:
        logger.warning("Ignoring invalid %s=%r", THREADS_ENV, raw)
        return {}


def load_run_config(
    cli_values: Optional[Dict[str, Any]] = None,
    profile: Optional[str] = None,
    cwd: Optional[Path] = None,
) -> RunConfig:
    cfg = RunConfig()
    path = find_config_file(cwd)
    if path is not None:
        cfg = cfg.with_overrides(load_profile(path, profile))
    cfg = cfg.with_overrides(environment_overrides())
    return cfg.with_overrides(cli_values or {})


def validate_run_config(cfg: RunConfig, command: Optional[str] = None) -> Tuple[bool, List[str]]:
    """
    Check option values and combinations before any computation.

    Returns:
        (is_valid, errors)
    """
    errors = []
    if cfg.kmax <= 0:
        errors.append("kmax must be positive")
    if cfg.imin <= 0:
        errors.append("imin must be positive (the Bragg peaks are dense)")
    if cfg.depth < 0:
        errors.append("depth must be nonnegative")
    if cfg.steps < 0:
        errors.append("steps must be nonnegative")
    if cfg.eps <= 0:
        errors.append("eps must be positive")
    if cfg.method not in METHODS:
        errors.append(f"method must be one of {', '.join(METHODS)}")
    if cfg.route not in ROUTES:
        errors.append(f"route must be one of {', '.join(ROUTES)}")
    if cfg.out_format not in FORMATS:
        errors.append(f"format must be one of {', '.join(FORMATS)}")
    if cfg.threads is not None and cfg.threads < 1:
        errors.append("threads must be at least 1")
    if cfg.deform is not None and cfg.method == "cocycle":
        errors.append("--deform needs the closed-form method")
    if command == "generate" and cfg.extras.get("modelset") and not cfg.region:
        errors.append("--modelset needs --region")
    half_width = cfg.extras.get("half_width")
    if command == "diffract" and cfg.extras.get("cross_check") and (half_width is None or half_width <= 0):
        errors.append("--cross-check needs a positive --half-width for the finite patch")
    return len(errors) == 0, errors
