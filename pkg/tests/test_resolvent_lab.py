import math
from fractions import Fraction

import numpy as np
import pytest

from errors import DomainError
from grid_calculus import TorusGrid
from norm_metrics import Verdict
from region_calc import ExponentPoint
from resolvent_lab import (
    HalfPlane,
    ResolventSpec,
    bochner_riesz_from_resolvents,
    br_negative_sweep,
    closed_form_helmholtz_3d,
    exponent_point,
    fractional_resolvent,
    helmholtz_discrepancy,
    helmholtz_zeta,
    k1_decay_fit,
    k1_k2_split,
    k1_near_origin_stability,
    k2_decay_fit,
    negative_order_symbol,
    periodized_helmholtz,
    resolvent_br_discrepancy,
    scaling_covariance_error,
    uniform_sobolev_sweep,
)
from symbol import laplacian_pow_k


def test_spec_validation():
    with pytest.raises(DomainError):
        ResolventSpec(-1.0, alpha=-0.5)
    with pytest.raises(DomainError):
        ResolventSpec(0.0)
    with pytest.raises(DomainError):
        ResolventSpec(1.0, 1.0, None, "upper")
    with pytest.raises(DomainError):
        ResolventSpec(1 - 1j, 1.0, 0.1, "upper")


def test_boundary_spec_and_conjugate():
    spec = ResolventSpec.boundary(2.0, 0.1)
    assert spec.is_boundary and spec.value == 2 + 0.1j
    lower = spec.conjugate()
    assert lower.half_plane is HalfPlane.LOWER
    assert lower.value == 2 - 0.1j
    assert spec.to_json()["half_plane"] == "upper"


def test_exponent_point_from_floats():
    assert exponent_point(1.2, 6.0) == ExponentPoint(Fraction(5, 6), Fraction(1, 6))
    assert exponent_point(1.0, math.inf) == ExponentPoint(1, 0)


def test_resolvent_symbol_and_identity(line_grid):
    P = laplacian_pow_k(1, 1)
    small = TorusGrid(1, 4, 2 * np.pi)
    np.testing.assert_allclose(fractional_resolvent(P, ResolventSpec(-1.0), small).symbol, [1.0, 0.5, 0.2, 0.5])

    z1, z2 = -1.0 + 0.5j, 2.0 + 1.0j
    R1 = fractional_resolvent(P, ResolventSpec(z1), line_grid)
    R2 = fractional_resolvent(P, ResolventSpec(z2), line_grid)
    np.testing.assert_allclose((R1 - R2).symbol, (z1 - z2) * (R1 @ R2).symbol, atol=1e-12)


def test_conjugate_spec_gives_adjoint_resolvent(line_grid):
    P = laplacian_pow_k(1, 1)
    spec = ResolventSpec(1.3 + 0.2j, alpha=0.5)
    upper = fractional_resolvent(P, spec, line_grid)
    lower = fractional_resolvent(P, spec.conjugate(), line_grid)
    np.testing.assert_allclose(lower.symbol, np.conj(upper.symbol), atol=1e-12)


def test_k1_k2_split_is_a_partition(plane_grid, laplacian_2d):
    spec = ResolventSpec(1.0 + 0.1j)
    K1, K2 = k1_k2_split(laplacian_2d, spec, plane_grid)
    full = fractional_resolvent(laplacian_2d, spec, plane_grid)
    np.testing.assert_allclose((K1 + K2).symbol, full.symbol, atol=1e-12)
    with pytest.raises(DomainError):
        k1_k2_split(laplacian_2d, ResolventSpec(9.0 + 0.1j), plane_grid)


def test_scaling_covariance(plane_grid, laplacian_2d):
    assert scaling_covariance_error(laplacian_2d, plane_grid, -1 + 0.5j, 0.5, 2.0) < 1e-12


def test_helmholtz_branch_and_domain():
    assert helmholtz_zeta(-1.0) == pytest.approx(1j)
    assert helmholtz_zeta(4.0 + 1e-9j).real == pytest.approx(2.0)
    kernel = closed_form_helmholtz_3d(-1.0)
    assert kernel(np.array([1.0]))[0] == pytest.approx(math.exp(-1.0) / (4 * math.pi))
    with pytest.raises(DomainError):
        closed_form_helmholtz_3d(-1.0, n=2)
    with pytest.raises(DomainError):
        closed_form_helmholtz_3d(4.0)
    with pytest.raises(DomainError):
        periodized_helmholtz(-1.0, TorusGrid(2, 8, 1.0))


def test_damping_budget_is_enforced():
    grid = TorusGrid(3, 32, 40.0)
    with pytest.raises(DomainError):
        k1_decay_fit(laplacian_pow_k(3, 1), ResolventSpec(1.0 + 0.5j), grid)


def test_negative_order_symbol():
    lam_values = np.array([0.0, 0.5, 0.995, 2.0])
    window = negative_order_symbol(lam_values, 1.0, 1.0, eps=0.0, width=0.01)
    np.testing.assert_allclose(window, [0.0, 0.0, 100.0, 0.0])
    with pytest.raises(DomainError):
        negative_order_symbol(lam_values, 1.0, 2.0, eps=0.0)


def test_bochner_riesz_from_resolvent_boundary_values():
    grid = TorusGrid(1, 256, 2 * np.pi * 1.1)
    assert resolvent_br_discrepancy(laplacian_pow_k(1, 1), grid, 0.5) < 1e-3
    with pytest.raises(DomainError):
        bochner_riesz_from_resolvents(laplacian_pow_k(1, 1), grid, 1.0)


def test_sobolev_sweep_refuses_inadmissible_exponents():
    grid = TorusGrid(3, 16, 2 * np.pi)
    with pytest.raises(DomainError):
        uniform_sobolev_sweep(laplacian_pow_k(3, 1), grid, 2.0, 2.0, [-1.0])


@pytest.mark.slow
def test_sobolev_line_sweep_reports_uniformity():
    grid = TorusGrid(3, 16, 2 * np.pi)
    z_list = [r * np.exp(1j * theta) for r in np.geomspace(1.0, 10.0, 3) for theta in (np.pi / 2, np.pi)]
    report = uniform_sobolev_sweep(laplacian_pow_k(3, 1), grid, 1.2, 6.0, z_list, seed=1)
    assert report.predicted_slope == 0
    assert report.meta["on_sobolev_line"]
    assert report.verdict in (Verdict.PASS, Verdict.FAIL)
    assert len(report.pairs) == 6


@pytest.mark.slow
def test_helmholtz_kernel_matches_the_closed_form():
    result = helmholtz_discrepancy(-1.0, TorusGrid(3, 64, 16.0))
    assert result["radius"] == pytest.approx(2.0)
    assert result["relative_error"] < 1e-2
    assert result["taper_width"] > 0


def test_smoothed_helmholtz_kernel():
    plain = closed_form_helmholtz_3d(-1.0)
    smooth = closed_form_helmholtz_3d(-1.0, smoothing=0.1)
    r = np.array([2.0, 3.0])
    np.testing.assert_allclose(smooth(r), plain(r), rtol=1e-2)
    with pytest.raises(DomainError):
        closed_form_helmholtz_3d(-1.0, smoothing=-0.1)


@pytest.mark.slow
@pytest.mark.parametrize("n, alpha, z, grid, window", [
    (3, 1.0, (1 + 0.2j) ** 2, TorusGrid(3, 64, 32.0), (3.0, 7.5)),
    (2, 0.5, (1 + 0.1j) ** 2, TorusGrid(2, 128, 64.0), (3.0, 15.0)),
])
def test_k1_decay_matches_the_stationary_phase_rate(n, alpha, z, grid, window):
    profile = k1_decay_fit(laplacian_pow_k(n, 1), ResolventSpec(z, alpha=alpha), grid, window=window)
    assert profile.predicted == pytest.approx(-1.0)
    assert abs(profile.exponent + 1.0) < 0.25


@pytest.mark.slow
def test_k2_kernel_decays_fast():
    grid = TorusGrid(2, 512, 200.0)
    profile = k2_decay_fit(laplacian_pow_k(2, 1), ResolventSpec(1 + 0.05j), grid, window=(10.0, 45.0))
    assert profile.meta["fast_decay_bound"] == -4.0
    assert profile.exponent <= -4.0
    assert profile.meta["fast_decay"]


@pytest.mark.slow
def test_k1_near_origin_is_stable_as_eps_halves(laplacian_2d):
    result = k1_near_origin_stability(laplacian_2d, TorusGrid(2, 512, 320.0), 0.05)
    assert result["relative_change"] < 0.05
    assert result["stable"]


def test_k1_near_origin_needs_damped_images(laplacian_2d):
    with pytest.raises(DomainError):
        k1_near_origin_stability(laplacian_2d, TorusGrid(2, 64, 40.0), 0.05)
    with pytest.raises(DomainError):
        k1_near_origin_stability(laplacian_2d, TorusGrid(2, 64, 40.0), 0.0)


@pytest.mark.slow
def test_negative_order_bochner_riesz_scaling(laplacian_2d):
    grid = TorusGrid(2, 64, 4 * np.pi)
    report = br_negative_sweep(laplacian_2d, grid, 0.5, 1.0, math.inf, np.geomspace(14.4, 144.0, 6), seed=3)
    assert report.predicted_slope == pytest.approx(0.5)
    assert abs(report.slope - 0.5) <= 0.15
    assert report.meta["excluded"] == []


@pytest.mark.slow
def test_sobolev_sweep_off_the_line_follows_the_predicted_slope():
    grid = TorusGrid(3, 32, 2 * np.pi)
    z_list = [r * np.exp(1j * theta) for r in np.geomspace(1.0, 10.0, 4) for theta in (5 * np.pi / 6, np.pi)]
    report = uniform_sobolev_sweep(laplacian_pow_k(3, 1), grid, 1.2, 2.0, z_list, seed=5,
                                   check_admissible=False, threads=2)
    assert report.predicted_slope == pytest.approx(-0.5)
    assert not report.meta["on_sobolev_line"]
    assert abs(report.slope + 0.5) <= 0.15
