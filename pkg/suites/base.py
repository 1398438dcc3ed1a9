"""
Base Suite Class for the Verification Team
All identity suites inherit from this base class
"""

import logging
import time
from abc import ABC, abstractmethod
from dataclasses import dataclass
from datetime import datetime, timezone
from typing import Any, Callable, Dict, List, Optional, Tuple

from errors import SpectralabError
from norm_metrics import Verdict

logger = logging.getLogger(__name__)

# A check returns (measured value, passed, detail)
CheckFn = Callable[[], Tuple[Optional[float], bool, str]]


@dataclass
class CheckResult:
    """Outcome of one deterministic check"""
    suite: str
    name: str
    verdict: Verdict
    value: Optional[float] = None
    tolerance: Optional[float] = None
    detail: str = ""
    elapsed_s: float = 0.0
    timestamp: str = None

    def __post_init__(self):
        if self.timestamp is None:
            self.timestamp = datetime.now(timezone.utc).isoformat()

    @property
    def passed(self) -> bool:
        return self.verdict is not Verdict.FAIL

    def to_json(self) -> Dict[str, Any]:
        return {
            "suite": self.suite,
            "check": self.name,
            "verdict": self.verdict.value,
            "value": self.value,
            "tolerance": self.tolerance,
            "detail": self.detail[:1000],
        }


class BaseSuite(ABC):
    """Base class for all verification suites"""

    def __init__(self, name: str, description: str):
        self.name = name
        self.description = description

    @abstractmethod
    def checks(self, context: Dict[str, Any]) -> List[Tuple[str, Optional[float], CheckFn]]:
        """Return (check name, tolerance, check function) triples"""
        pass

    def check(self, name: str, func: CheckFn, tolerance: Optional[float] = None) -> CheckResult:
        """Run one check; library errors become a FAIL with the message as detail"""
        started = time.perf_counter()
        try:
            value, passed, detail = func()
            verdict = Verdict.PASS if passed else Verdict.FAIL
        except SpectralabError as exc:
            logger.warning("%s/%s raised %s: %s", self.name, name, exc.kind, exc)
            value, verdict, detail = None, Verdict.FAIL, f"{exc.kind}: {exc}"
        return CheckResult(
            suite=self.name,
            name=name,
            verdict=verdict,
            value=None if value is None else float(value),
            tolerance=tolerance,
            detail=detail,
            elapsed_s=time.perf_counter() - started,
        )

    def run(self, context: Dict[str, Any]) -> List[CheckResult]:
        results = [self.check(name, func, tol) for name, tol, func in self.checks(context)]
        failed = sum(1 for r in results if not r.passed)
        logger.info("suite %s: %d checks, %d failed", self.name, len(results), failed)
        return results
