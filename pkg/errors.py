"""
Spectralab error hierarchy
Every operation raises one of these; the CLI maps them to exit codes
"""


class SpectralabError(Exception):
    """Base class for all spectralab failures"""
    kind = "error"


class DomainError(SpectralabError, ValueError):
    """Input outside the stated domain of an operation"""
    kind = "domain"


class ConfigError(SpectralabError, ValueError):
    """Run configuration failed schema validation"""
    kind = "config"


class ConvergenceError(SpectralabError):
    """Iteration, extrapolation or fit did not reach its tolerance"""
    kind = "convergence"


class GateRefusedError(SpectralabError):
    """Perturbation series refused because the gate estimate is >= 1"""
    kind = "gate"


class SingularMultiplierError(SpectralabError):
    """Multiplier is singular on a lattice value"""
    kind = "singular"


class GridCapError(SpectralabError):
    """Materialization or dense mode requested above the size cap"""
    kind = "grid_cap"


class SparseWindowError(SpectralabError):
    """Spectral window holds too few lattice points"""
    kind = "sparse_window"


class UnsupportedOperationError(SpectralabError):
    """Combination the calculus deliberately does not compute"""
    kind = "unsupported"


class OutputError(SpectralabError):
    """Output directory or file cannot be written"""
    kind = "output"
