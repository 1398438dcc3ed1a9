"""
Verification Coordinator
Runs the suite team and reaches the overall verdict
"""

import logging
import time
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence

from errors import ConfigError
from norm_metrics import Verdict

from .base import BaseSuite, CheckResult
from .grid_suite import GridSuite
from .perturbation_suite import PerturbationSuite
from .region_suite import RegionSuite
from .resolvent_suite import ResolventSuite
from .symbol_suite import SymbolSuite
from .weyl_suite import WeylSuite

logger = logging.getLogger(__name__)


@dataclass
class TeamReport:
    """Final verdict from the suite team"""
    verdict: Verdict
    results: List[CheckResult]
    counts: Dict[str, int]
    suites: List[str]
    elapsed_s: float = 0.0
    failures: List[str] = field(default_factory=list)

    def to_json(self) -> Dict[str, Any]:
        return {
            "verdict": self.verdict.value,
            "counts": self.counts,
            "suites": self.suites,
            "failures": self.failures,
            "checks": [r.to_json() for r in self.results],
        }

    def to_rows(self) -> List[Dict[str, Any]]:
        return [r.to_json() for r in self.results]


class VerificationCoordinator(BaseSuite):
    """Orchestrates the verification team"""

    ICONS = {"region": "📐", "symbol": "🔣", "grid": "🧮", "weyl": "∫", "resolvent": "🌀", "perturbation": "⚡"}

    def __init__(self, verbose: bool = False):
        super().__init__(name="coordinator", description="Runs every suite and applies the FAIL veto")
        self.verbose = verbose

        # Initialize team
        self.team: Dict[str, BaseSuite] = {
            suite.name: suite
            for suite in (RegionSuite(), SymbolSuite(), GridSuite(), WeylSuite(), ResolventSuite(), PerturbationSuite())
        }

    def select(self, names: Optional[Sequence[str]] = None) -> List[BaseSuite]:
        if not names:
            return list(self.team.values())
        unknown = [n for n in names if n not in self.team]
        if unknown:
            raise ConfigError(f"unknown suite(s) {unknown}; known: {sorted(self.team)}")
        return [self.team[n] for n in self.team if n in names]

    @staticmethod
    def calculate_consensus(results: Sequence[CheckResult]) -> Dict[str, Any]:
        """Any FAIL vetoes the run; SKIPs are counted but never vote"""
        counts = {v.value: 0 for v in Verdict}
        for result in results:
            counts[result.verdict.value] += 1
        failures = [f"{r.suite}/{r.name}" for r in results if r.verdict is Verdict.FAIL]
        verdict = Verdict.FAIL if failures else Verdict.PASS
        return {"verdict": verdict, "counts": counts, "failures": failures}

    def checks(self, context: Dict[str, Any]) -> List:
        return [check for suite in self.select(context.get("filter")) for check in suite.checks(context)]

    def run_team(self, context: Dict[str, Any], names: Optional[Sequence[str]] = None) -> TeamReport:
        """Run the selected suites in a fixed order and return the team verdict"""
        started = time.perf_counter()
        selected = self.select(names)
        results: List[CheckResult] = []
        for i, suite in enumerate(selected, 1):
            if self.verbose:
                print(f"{self.ICONS.get(suite.name, '•')} [{i}/{len(selected)}] {suite.description}...")
            suite_results = suite.run(context)
            results.extend(suite_results)
            if self.verbose:
                for r in suite_results:
                    mark = "✅" if r.verdict is Verdict.PASS else "❌" if r.verdict is Verdict.FAIL else "⏭️"
                    print(f"   {mark} {r.name}: {r.detail}")

        consensus = self.calculate_consensus(results)
        report = TeamReport(
            verdict=consensus["verdict"],
            results=results,
            counts=consensus["counts"],
            suites=[s.name for s in selected],
            elapsed_s=time.perf_counter() - started,
            failures=consensus["failures"],
        )
        logger.info("verification %s: %s", report.verdict.value, report.counts)
        return report

    def run(self, context: Dict[str, Any]) -> List[CheckResult]:
        return self.run_team(context, context.get("filter")).results
