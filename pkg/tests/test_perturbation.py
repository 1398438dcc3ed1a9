import math

import numpy as np
import pytest

from errors import ConfigError, DomainError, GateRefusedError, GridCapError, SparseWindowError
from grid_calculus import TorusGrid
from perturbation import (
    PerturbedOperator,
    PotentialSpec,
    ball_indicator,
    davies_gaffney_defaults,
    davies_gaffney_fit,
    form_monotonicity_check,
    form_positivity,
    hardy_constant,
    hardy_critical_exponent,
    inverse_square,
    inverse_square_scenario,
    neumann_dense_discrepancy,
    neumann_inverse,
    perturbed_resolvent_sweep,
    poisson_density,
    potential_from_config,
    resolvent_identity_check,
    resolvent_power_sweep,
    restriction_lambda_list,
    restriction_sweep,
    stone_density,
    stone_total_mass,
    zero_potential,
)
from symbol import laplacian_pow_k, lattice_values


@pytest.fixture
def line_laplacian():
    return laplacian_pow_k(1, 1)


@pytest.fixture
def cube():
    return TorusGrid(3, 8, 2 * math.pi)


def test_potential_validation(line_grid):
    with pytest.raises(DomainError):
        PotentialSpec(line_grid, -np.ones(line_grid.shape))
    with pytest.raises(DomainError):
        PotentialSpec(line_grid, 1j * np.ones(line_grid.shape))
    with pytest.raises(DomainError):
        PotentialSpec(line_grid, np.ones(3))
    assert zero_potential(line_grid).is_zero


def test_potential_parsing(line_grid):
    ball = potential_from_config("ball:0.1,1.0", line_grid)
    assert ball.name == "ball(0.1,1)"
    assert ball.values.max() == pytest.approx(0.1)
    assert potential_from_config("zero", line_grid).is_zero
    assert potential_from_config(None, line_grid).is_zero
    gauss = potential_from_config({"builtin": "gaussian", "params": [2.0, 0.5]}, line_grid)
    assert gauss.values.max() == pytest.approx(2.0)
    with pytest.raises(ConfigError):
        potential_from_config("wedge:1", line_grid)
    with pytest.raises(ConfigError):
        potential_from_config("ball:one", line_grid)
    with pytest.raises(ConfigError):
        potential_from_config("ball:1,2,3,4", line_grid)
    with pytest.raises(ConfigError):
        potential_from_config({"file": "missing.npy"}, line_grid)


def test_potential_from_npy(tmp_path, line_grid):
    path = tmp_path / "bump.npy"
    np.save(path, np.linspace(0.0, 1.0, line_grid.size))
    V = potential_from_config(str(path), line_grid)
    assert V.name == "bump"
    assert V.values.max() == pytest.approx(1.0)


def test_smallness_terms(line_grid, cube):
    assert zero_potential(line_grid).smallness.total == 0
    assert zero_potential(line_grid).smallness.passes

    strong = ball_indicator(line_grid, 50.0, 1.0)
    assert strong.smallness.kato_like is None
    assert not strong.smallness.passes

    singular = inverse_square(cube, 0.05)
    assert singular.smallness.kato_like is not None
    assert singular.smallness.to_json()["kato_applicable"]
    with pytest.raises(DomainError):
        inverse_square(line_grid, 0.05)


def test_operator_modes(line_grid, line_laplacian):
    V = zero_potential(line_grid)
    with pytest.raises(DomainError):
        PerturbedOperator(line_laplacian, V, "sparse")
    with pytest.raises(DomainError):
        PerturbedOperator(laplacian_pow_k(2, 1), V)
    with pytest.raises(GridCapError):
        PerturbedOperator(laplacian_pow_k(2, 1), zero_potential(TorusGrid(2, 128, 1.0)), "dense")
    with pytest.raises(DomainError):
        PerturbedOperator(line_laplacian, V).eigen()


def test_free_dense_spectrum_is_the_lattice(line_grid, line_laplacian):
    Pop = PerturbedOperator(line_laplacian, zero_potential(line_grid), "dense")
    evals, _ = Pop.eigen()
    np.testing.assert_allclose(evals, np.sort(Pop.lam.ravel()), atol=1e-9)


def test_dense_invariants_with_a_ball(line_grid, line_laplacian):
    Pop = PerturbedOperator(line_laplacian, ball_indicator(line_grid, 1.0, 1.0), "dense")
    lowest, ok = form_positivity(Pop)
    assert ok and lowest >= -1e-10
    assert resolvent_identity_check(Pop, -1 + 0.5j, 2 + 1j) < 1e-10


def test_stone_density_matches_poisson_smoothing(line_grid, line_laplacian):
    Pop = PerturbedOperator(line_laplacian, ball_indicator(line_grid, 0.5, 1.0), "dense")
    f = np.random.default_rng(4).standard_normal(line_grid.size)
    direct = stone_density(Pop, 2.0, 0.1, f)
    assert direct == pytest.approx(poisson_density(Pop, 2.0, 0.1, f)[0], rel=1e-8)
    with pytest.raises(DomainError):
        stone_density(Pop, 2.0, 0.0, f)


def test_stone_total_mass_is_the_squared_norm(line_laplacian):
    grid = TorusGrid(1, 16, 2 * math.pi)
    Pop = PerturbedOperator(line_laplacian, ball_indicator(grid, 0.5, 1.0), "dense")
    f = np.random.default_rng(5).standard_normal(grid.size)
    assert stone_total_mass(Pop, 0.2, f) == pytest.approx(float(f @ f), rel=1e-5)


def test_gate_refuses_a_large_potential(line_grid, line_laplacian):
    Pop = PerturbedOperator(line_laplacian, ball_indicator(line_grid, 50.0, 1.0))
    with pytest.raises(GateRefusedError):
        neumann_inverse(Pop, -1.0)


def test_neumann_series_agrees_with_dense_solve(line_grid, line_laplacian):
    Pop = PerturbedOperator(line_laplacian, ball_indicator(line_grid, 0.01, 1.0))
    f = np.random.default_rng(6).standard_normal(line_grid.size)
    result = neumann_dense_discrepancy(Pop, -1.0, f)
    assert result["gate"] < 1
    assert result["error"] < 1e-8
    assert result["terms_used"] > 0


def test_form_monotonicity(line_grid, line_laplacian):
    small = ball_indicator(line_grid, 0.1, 1.0)
    large = ball_indicator(line_grid, 1.0, 1.0)
    shift, ok = form_monotonicity_check(line_laplacian, small, large)
    assert ok and shift >= 0
    with pytest.raises(DomainError):
        form_monotonicity_check(line_laplacian, large, small)


def test_hardy_constants():
    assert hardy_constant(1.2) == pytest.approx(4.0)
    with pytest.raises(DomainError):
        hardy_constant(1.5)
    assert hardy_critical_exponent(3, 0.0) == (0.0, math.inf)
    sigma, p_star = hardy_critical_exponent(3, -0.2)
    assert sigma == pytest.approx(0.5 - math.sqrt(0.05))
    assert p_star == pytest.approx(3 / sigma)
    with pytest.raises(DomainError):
        hardy_critical_exponent(3, -0.25)


def test_sweep_domains(cube):
    P = laplacian_pow_k(3, 1)
    with pytest.raises(DomainError):
        restriction_sweep(PerturbedOperator(P, ball_indicator(cube, 0.1, 1.0)), 1.5, [1.0])
    with pytest.raises(DomainError):
        resolvent_power_sweep(PerturbedOperator(P, zero_potential(cube)), 1.0, math.inf, [1.0])


def test_davies_gaffney_decay(line_grid, line_laplacian):
    Pop = PerturbedOperator(line_laplacian, ball_indicator(line_grid, 0.5, 1.0), "dense")
    with pytest.raises(DomainError):
        davies_gaffney_fit(Pop, [4.0], [((0,), (8,))])
    fit = davies_gaffney_fit(Pop, np.geomspace(0.05, 0.5, 4), [((0,), (k,)) for k in (8, 12, 16)])
    assert fit.c > 0
    assert len(fit.points) + fit.excluded + fit.near == 12
    assert fit.near > 0


def test_davies_gaffney_refuses_unresolved_times(line_grid, line_laplacian):
    Pop = PerturbedOperator(line_laplacian, zero_potential(line_grid), "dense")
    with pytest.raises(DomainError):
        davies_gaffney_fit(Pop, [0.001], [((0,), (8,))])


def test_davies_gaffney_defaults_resolve_the_heat_blocks(line_laplacian):
    grid = TorusGrid(1, 256, 16 * math.pi)
    Pop = PerturbedOperator(line_laplacian, zero_potential(grid), "dense")
    t_list, ball_pairs = davies_gaffney_defaults(Pop)
    top = float(np.max(Pop.lam))
    assert len(t_list) == 4
    assert all(math.exp(-t * top) <= 1e-23 for t in t_list)
    r_min = math.sqrt(t_list[0])
    assert min(k * grid.spacing for (_, (k,)) in ball_pairs) >= 3 * r_min - grid.spacing
    assert max(k for (_, (k,)) in ball_pairs) <= grid.N // 4


def test_restriction_lambda_list_keeps_windows_occupied():
    P = laplacian_pow_k(2, 1)
    grid = TorusGrid(2, 64, 4 * math.pi)
    lams, width = restriction_lambda_list(P, grid)
    assert len(lams) == 6 and width >= 0.1
    assert lams[-1] / lams[0] >= 10.0
    lam_values = lattice_values(P, grid).ravel()
    for lam in lams:
        assert np.count_nonzero((lam_values >= lam) & (lam_values <= lam * (1 + width))) >= 38
    assert lams[-1] * (1 + width) < (math.pi / grid.spacing) ** 2


def test_restriction_lambda_list_refuses_tiny_grids():
    with pytest.raises(SparseWindowError):
        restriction_lambda_list(laplacian_pow_k(2, 1), TorusGrid(2, 8, 2 * math.pi))


@pytest.mark.slow
def test_free_restriction_scaling_in_the_plane():
    P = laplacian_pow_k(2, 1)
    grid = TorusGrid(2, 64, 4 * math.pi)
    lams, width = restriction_lambda_list(P, grid)
    report = restriction_sweep(PerturbedOperator(P, zero_potential(grid)), 1.0, lams, width, seed=2, threads=2)
    assert report.predicted_slope == pytest.approx(0.0)
    assert abs(report.slope) <= 0.15
    assert report.meta["width"] == width


@pytest.mark.slow
def test_perturbed_resolvent_decay_on_the_line(line_laplacian):
    grid = TorusGrid(1, 256, 16 * math.pi)
    Pop = PerturbedOperator(line_laplacian, ball_indicator(grid, 0.05, 1.0), "dense")
    z_list = [1j * r for r in np.geomspace(1.0, 10.0, 6)]
    report = perturbed_resolvent_sweep(Pop, 1.0, z_list, seed=4)
    assert report.predicted_slope == pytest.approx(-0.5)
    assert not report.meta["on_sobolev_line"]
    assert abs(report.slope + 0.5) <= 0.15


@pytest.mark.slow
@pytest.mark.parametrize("c", [0.01, 0.05])
@pytest.mark.parametrize("p", [1.2, 1.3])
def test_inverse_square_gates_stay_below_the_hardy_majorant(c, p):
    report = inverse_square_scenario(c, p, TorusGrid(3, 16, 2 * math.pi), seed=1)
    assert report["K"] == pytest.approx(hardy_constant(p))
    assert report["below_majorant"]
    assert report["restriction"] is None
