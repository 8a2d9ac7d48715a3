"""
Default configuration for heckelab.

Settings live in plain dicts, one per concern. A run can override them with
an optional key-value text file (``section.key = value``, ``#`` comments)
and the HECKELAB_SEED environment variable; command-line flags win over both.
"""

import copy
import os
from typing import Any, Dict, Optional

# Indefinite quaternion algebra (a, b) with the natural order 1, w, W, wW.
# "level" is plumbing for Eichler orders and is not used by any computation.
ALGEBRA = {
    "a": 2,
    "b": 3,
    "level": 1,
}

# Spectral window rho: supp rho_hat inside (-delta_supp/2, delta_supp/2).
WINDOW = {
    "delta_supp": 1.0,
    "truncation_rel_tol": 1e-14,
    # samples per oscillation period of the cached window grid
    "samples_per_period": 64,
    # hard cap on the grid span, in oscillation periods
    "max_periods": 400,
}

TOLERANCES = {
    "symmetry": 1e-8,
    "rotation": 1e-10,
    "jacobi_offdiag": 1e-12,
    "jacobi_max_sweeps": 60,
    "cluster_gap": 1e-6,
    "joint_residual": 1e-7,
    "enumeration_margin": 0.10,
    "max_box_points": 50_000_000,
}

SCANS = {
    "levels": [5, 13],
    "grid_res_per_degree": 4,
    "polish_steps": 40,
    "polish_candidates": 3,
    # degree cap for spectral sums that need eigendata (amplify, pre-trace)
    "spectral_kmax": 40,
    "amplifier_length": 200,
}

RUNTIME = {
    "seed": 20170527,
    "threads": None,
}

_SECTIONS = {
    "algebra": ALGEBRA,
    "window": WINDOW,
    "tol": TOLERANCES,
    "scans": SCANS,
    "runtime": RUNTIME,
}

# pristine copy; apply_config rewrites the live dicts above
_DEFAULTS = copy.deepcopy(_SECTIONS)


def default_config() -> Dict[str, Dict[str, Any]]:
    """Return a deep copy of the built-in settings, keyed by section name."""
    return copy.deepcopy(_DEFAULTS)


def _parse_value(raw: str, current: Any) -> Any:
    """Convert a config-file string to the type of the default it replaces."""
    # Import here to avoid circular imports
    from heckelab.errors import ConfigError

    raw = raw.strip()
    if isinstance(current, bool):
        if raw.lower() in ("1", "true", "yes", "on"):
            return True
        if raw.lower() in ("0", "false", "no", "off"):
            return False
        raise ConfigError(f"Expected a boolean, got {raw!r}")
    if isinstance(current, list):
        return [int(item) for item in raw.split(",") if item.strip()]
    if isinstance(current, int) or current is None:
        if raw.lower() == "none":
            return None
        try:
            return int(raw)
        except ValueError:
            if current is None:
                raise ConfigError(f"Expected an integer, got {raw!r}") from None
    try:
        return float(raw)
    except ValueError as exc:
        raise ConfigError(f"Expected a number, got {raw!r}") from exc


def load_config_file(
    path: Optional[str], base: Optional[Dict[str, Dict[str, Any]]] = None
) -> Dict[str, Dict[str, Any]]:
    """Apply a key-value config file on top of the defaults.

    Args:
        path: Path to the config file, or None to use the defaults only.
        base: Settings to override (defaults to a copy of the built-ins).

    Returns:
        The merged settings, keyed by section name.

    Raises:
        ConfigError: On malformed lines or unknown keys.
    """
    # Import here to avoid circular imports
    from heckelab.errors import ConfigError

    config = copy.deepcopy(base) if base is not None else default_config()

    if path is not None:
        try:
            with open(path, encoding="utf-8") as handle:
                lines = handle.readlines()
        except OSError as exc:
            raise ConfigError(f"Cannot read config file {path}: {exc}") from exc

        for number, line in enumerate(lines, start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{number}: expected 'section.key = value'")
            key, raw = (part.strip() for part in line.split("=", 1))
            section, _, name = key.partition(".")
            if section not in config or name not in config[section]:
                raise ConfigError(f"{path}:{number}: unknown setting {key!r}")
            config[section][name] = _parse_value(raw, config[section][name])

    seed = os.environ.get("HECKELAB_SEED")
    if seed:
        try:
            config["runtime"]["seed"] = int(seed)
        except ValueError as exc:
            raise ConfigError(f"HECKELAB_SEED must be an integer, got {seed!r}") from exc

    return config


def apply_config(config: Dict[str, Dict[str, Any]]) -> None:
    """Copy merged settings into the module-level dicts the library reads.

    Library modules hold references to ALGEBRA, WINDOW, TOLERANCES, SCANS and
    RUNTIME, so the dicts are updated in place rather than rebound.
    """
    for name, section in _SECTIONS.items():
        if name in config:
            section.update(config[name])
