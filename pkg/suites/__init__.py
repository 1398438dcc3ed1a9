"""
Spectralab Verification Suites
"""

from .base import BaseSuite, CheckResult
from .region_suite import RegionSuite
from .symbol_suite import SymbolSuite
from .grid_suite import GridSuite
from .weyl_suite import WeylSuite
from .resolvent_suite import ResolventSuite
from .perturbation_suite import PerturbationSuite
from .coordinator import VerificationCoordinator, TeamReport

__all__ = [
    "BaseSuite",
    "CheckResult",
    "RegionSuite",
    "SymbolSuite",
    "GridSuite",
    "WeylSuite",
    "ResolventSuite",
    "PerturbationSuite",
    "VerificationCoordinator",
    "TeamReport"
]
