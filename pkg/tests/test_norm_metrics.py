import math

import numpy as np
import pytest

from errors import DomainError
from norm_metrics import (
    LpNorm,
    Verdict,
    dual_exponent,
    exact_norm,
    fit_power_law,
    holder_check,
    lp_norm,
    matrix_lower_bound,
)

A = np.array([[1.0, 2.0], [3.0, 4.0]])


def test_dual_exponent():
    assert dual_exponent(1) == math.inf
    assert dual_exponent(2) == 2
    assert dual_exponent(math.inf) == 1
    assert dual_exponent(1.5) == pytest.approx(3.0)
    with pytest.raises(DomainError):
        dual_exponent(0.5)


def test_lp_norm_with_cell_volume():
    assert lp_norm([3.0, 4.0], 2) == pytest.approx(5.0)
    assert lp_norm([3.0, -4.0], math.inf) == 4.0
    assert lp_norm([3.0, 4.0], 2, cell_volume=0.25) == pytest.approx(2.5)
    assert lp_norm(np.zeros(3), 3) == 0.0
    assert LpNorm(3.0).dual().p == pytest.approx(1.5)
    with pytest.raises(DomainError):
        LpNorm(0.5)


def test_holder_inequality_holds():
    rng = np.random.default_rng(0)
    f, g = rng.standard_normal(50), rng.standard_normal(50)
    lhs, rhs, ok = holder_check(f, g, 3.0, cell_volume=0.1)
    assert ok and lhs <= rhs


def test_exact_norms():
    assert exact_norm(A, 1, 1) == pytest.approx(6.0)
    assert exact_norm(A, math.inf, math.inf) == pytest.approx(7.0)
    assert exact_norm(A, 2, 2) == pytest.approx(np.linalg.svd(A, compute_uv=False)[0])
    with pytest.raises(DomainError):
        exact_norm(A, 3, 3)


def test_power_iteration_is_an_honest_lower_bound():
    bound = matrix_lower_bound(A, 3, 3)
    ones = np.ones(2)
    assert bound >= lp_norm(A @ ones, 3) / lp_norm(ones, 3) - 1e-12
    # Riesz-Thorin between the 1->1 and inf->inf norms
    assert bound <= 6.0 ** (1 / 3) * 7.0 ** (2 / 3) + 1e-12


def test_power_iteration_converges_on_a_diagonal_matrix():
    assert matrix_lower_bound(np.diag([1.0, 2.0]), 3, 3) == pytest.approx(2.0, rel=1e-6)


def test_fit_recovers_exact_power_law():
    x = np.geomspace(1.0, 10.0, 6)
    report = fit_power_law(list(zip(x, 3.0 * x ** -0.5)), predicted_slope=-0.5)
    assert report.slope == pytest.approx(-0.5)
    assert report.r2 == pytest.approx(1.0)
    assert report.verdict is Verdict.PASS
    assert list(report.to_frame().columns) == ["param", "norm_lb", "fit_residual"]
    assert report.to_summary()["verdict"] == "PASS"

    assert fit_power_law(list(zip(x, 3.0 * x ** -0.5)), predicted_slope=0.0).verdict is Verdict.FAIL


def test_fit_refuses_short_or_degenerate_sweeps():
    x = np.geomspace(1.0, 10.0, 5)
    with pytest.raises(DomainError):
        fit_power_law(list(zip(x, x)))
    narrow = np.geomspace(1.0, 5.0, 6)
    with pytest.raises(DomainError):
        fit_power_law(list(zip(narrow, narrow)))
    wide = np.geomspace(1.0, 10.0, 6)
    with pytest.raises(DomainError):
        fit_power_law(list(zip(wide, -wide)))


def test_flat_sweeps_are_judged_on_the_ratio():
    x = np.geomspace(1.0, 10.0, 6)
    wobble = 1.0 + 0.1 * np.array([1, -1, 1, -1, 1, -1])
    flat = fit_power_law(list(zip(x, wobble)), predicted_slope=0.0)
    assert flat.r2 < 0.9
    assert flat.verdict is Verdict.PASS
    assert flat.to_summary()["r2_floor"] == 0.9

    assert flat.judge(ratio_bound=1.1) is Verdict.FAIL
    assert flat.judge(ratio_bound=3.0) is Verdict.PASS


def test_judge_applies_new_tolerances():
    x = np.geomspace(1.0, 10.0, 6)
    report = fit_power_law(list(zip(x, x ** -0.6)), predicted_slope=-0.5)
    assert report.verdict is Verdict.PASS
    assert report.judge(tolerance=0.05) is Verdict.FAIL
    assert report.tolerance == 0.05

    report.ratio_only = True
    assert report.judge(ratio_bound=10.0) is Verdict.PASS
