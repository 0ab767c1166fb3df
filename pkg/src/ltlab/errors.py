"""Exception types shared across the package."""


class ConfigError(ValueError):
    """Invalid experiment configuration (CLI exit code 2)."""


class ResourceBudgetError(RuntimeError):
    """An enumeration or matrix-size cap would be exceeded (CLI exit code 3)."""


class CutoffError(RuntimeError):
    """The plane-wave cutoff is too small for the requested run (CLI exit code 3)."""


class DegeneracyError(RuntimeError):
    """An eigenvalue sits on the Fermi level within tolerance (CLI exit code 4 in strict mode)."""
