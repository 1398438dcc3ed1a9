import pytest

from errors import ConfigError, DomainError
from norm_metrics import Verdict
from suites import BaseSuite, CheckResult, SymbolSuite, VerificationCoordinator
from symbol import SymbolPoly


class FixedSuite(BaseSuite):
    """Suite with canned outcomes"""

    def __init__(self, name, outcomes):
        super().__init__(name=name, description="canned")
        self.outcomes = outcomes

    def checks(self, context):
        return [(f"check_{i}", None, (lambda ok=ok: (None, ok, "canned"))) for i, ok in enumerate(self.outcomes)]


class RaisingSuite(BaseSuite):
    def __init__(self):
        super().__init__(name="raising", description="raises")

    def checks(self, context):
        def boom():
            raise DomainError("outside the domain")
        return [("boom", None, boom)]


@pytest.mark.parametrize("name", ["region", "grid", "weyl"])
def test_deterministic_suites_pass(name):
    report = VerificationCoordinator().run_team({"seed": 3}, [name])
    assert report.verdict is Verdict.PASS, report.failures
    assert report.suites == [name]
    assert report.counts["FAIL"] == 0


def test_degenerate_symbol_fails_the_symbol_suite():
    flat = SymbolPoly(n=2, m=4, terms=(((4, 0), 1.0), ((0, 4), 1.0)))
    results = {r.name: r for r in SymbolSuite().run({"symbol": flat})}
    assert results["sigma_nondegenerate"].verdict is Verdict.FAIL
    assert results["euler_homogeneity"].verdict is Verdict.PASS


def test_library_errors_become_failures():
    (result,) = RaisingSuite().run({})
    assert result.verdict is Verdict.FAIL
    assert result.detail.startswith("domain:")


def test_any_failure_vetoes_the_team():
    results = FixedSuite("good", [True, True]).run({}) + FixedSuite("bad", [True, False]).run({})
    results.append(CheckResult(suite="skipped", name="x", verdict=Verdict.SKIP))
    consensus = VerificationCoordinator.calculate_consensus(results)
    assert consensus["verdict"] is Verdict.FAIL
    assert consensus["counts"] == {"PASS": 3, "FAIL": 1, "SKIP": 1}
    assert consensus["failures"] == ["bad/check_1"]

    passing = VerificationCoordinator.calculate_consensus(FixedSuite("good", [True]).run({}) + results[-1:])
    assert passing["verdict"] is Verdict.PASS


def test_unknown_suite_filter():
    with pytest.raises(ConfigError):
        VerificationCoordinator().select(["region", "trading"])


def test_report_rows():
    report = VerificationCoordinator().run_team({}, ["region"])
    rows = report.to_rows()
    assert {row["suite"] for row in rows} == {"region"}
    assert report.to_json()["verdict"] == "PASS"
