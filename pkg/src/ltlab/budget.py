"""Resource caps for lattice enumeration and dense-matrix work.

Defaults are desk-scale.  The environment variable ``LTLAB_BUDGET`` overrides
them: a bare integer replaces the lattice enumeration budget, and a
comma-separated ``key=value`` list (keys ``lattice`` and ``basis``) sets either
cap individually, e.g. ``LTLAB_BUDGET=lattice:4e9,basis:8192``.
"""

import os

from .errors import ConfigError

DEFAULT_LATTICE_BUDGET = 1_000_000_000
DEFAULT_BASIS_CAP = 4096


def _parse_env():
    raw = os.environ.get("LTLAB_BUDGET", "").strip()
    if not raw:
        return {}
    out = {}
    if ":" in raw or "=" in raw:
        for part in raw.split(","):
            part = part.strip()
            if not part:
                continue
            key, _, val = part.replace("=", ":").partition(":")
            key = key.strip().lower()
            if key not in ("lattice", "basis"):
                raise ConfigError(f"unknown LTLAB_BUDGET key {key!r}")
            try:
                out[key] = int(float(val))
            except ValueError:
                raise ConfigError(f"bad LTLAB_BUDGET value {val!r}") from None
    else:
        try:
            out["lattice"] = int(float(raw))
        except ValueError:
            raise ConfigError(f"bad LTLAB_BUDGET value {raw!r}") from None
    return out


def lattice_budget() -> int:
    """Maximum number of candidate lattice points a single enumeration may visit."""
    return _parse_env().get("lattice", DEFAULT_LATTICE_BUDGET)


def basis_cap() -> int:
    """Maximum plane-wave basis size (dense matrix dimension)."""
    return _parse_env().get("basis", DEFAULT_BASIS_CAP)
