import math

import numpy as np
import pytest

from errors import DomainError, GridCapError, SingularMultiplierError, SparseWindowError
from grid_calculus import (
    GridField,
    GridOperator,
    TorusGrid,
    bochner_riesz,
    bochner_riesz_op,
    convolution_kernel,
    equivalence_L_vs_root,
    generalized_gaussian_check,
    heat,
    load_field,
    materialize,
    multiplier_op,
    positive_power,
    require_occupancy,
    resolvent,
    save_field,
    smooth_plateau,
    smooth_step,
)
from norm_metrics import Verdict
from symbol import laplacian_pow_k


@pytest.fixture
def small_line():
    return TorusGrid(1, 4, 2 * np.pi)


def test_grid_needs_power_of_two():
    with pytest.raises(DomainError):
        TorusGrid(1, 12, 1.0)
    with pytest.raises(DomainError):
        TorusGrid(2, 16, 0.0)


def test_frequencies_and_positions(small_line):
    np.testing.assert_allclose(small_line.frequencies_1d(), [0.0, 1.0, -2.0, -1.0])
    np.testing.assert_allclose(small_line.positions_1d(), [0.0, np.pi / 2, -np.pi, -np.pi / 2])
    assert small_line.refined().L == pytest.approx(4 * np.pi)
    assert small_line.refined().frequency_spacing == pytest.approx(small_line.frequency_spacing / 2)


def test_resolvent_symbol_on_lattice(small_line):
    op = multiplier_op(resolvent(-1.0), laplacian_pow_k(1, 1), small_line)
    np.testing.assert_allclose(op.symbol, [1.0, 0.5, 0.2, 0.5])
    with pytest.raises(SingularMultiplierError):
        multiplier_op(resolvent(1.0), laplacian_pow_k(1, 1), small_line)


def test_heat_multiplier_scales_a_plane_wave(plane_grid, laplacian_2d):
    wave = GridField.plane_wave(plane_grid, (1, 2))
    out = multiplier_op(heat(0.5, 2), laplacian_2d, plane_grid).apply(wave)
    np.testing.assert_allclose(out.values, math.exp(-0.25 * 5) * wave.values, atol=1e-12)
    assert wave.l2() == pytest.approx(1.0)


def test_adjoint_and_materialize_agree(plane_grid, laplacian_2d):
    op = multiplier_op(resolvent(1 + 1j), laplacian_2d, plane_grid)
    f = GridField.random(plane_grid, seed=1)
    g = GridField.random(plane_grid, seed=2)
    assert op.apply(f).inner(g) == pytest.approx(f.inner(op.adjoint().apply(g)))

    dense = materialize(op)
    np.testing.assert_allclose(dense.apply_flat(f.flat), op.apply_flat(f.flat), atol=1e-12)
    assert dense.l2_norm() == pytest.approx(op.l2_norm())
    with pytest.raises(GridCapError):
        materialize(op, cap=10)


def test_identity_kernel_is_a_scaled_delta(plane_grid):
    identity = GridOperator.multiplier(plane_grid, np.ones(plane_grid.shape))
    radii, kernel = convolution_kernel(identity)
    assert radii[0, 0] == 0
    assert kernel[0, 0] == pytest.approx(1.0 / plane_grid.cell_volume)
    assert np.abs(kernel).sum() == pytest.approx(1.0 / plane_grid.cell_volume)


def test_positive_power_modes():
    x = np.array([-1.0, 0.0, 4.0])
    np.testing.assert_allclose(positive_power(x, 0.5), [0.0, 0.0, 2.0])
    np.testing.assert_allclose(positive_power(x, 0.0), [0.0, 1.0, 1.0])
    with pytest.raises(SingularMultiplierError):
        positive_power(x, -0.5)
    np.testing.assert_allclose(positive_power(np.array([4.0, -4.0]), -0.5, eps=1e-9), [0.5, 0.0], atol=1e-6)
    with pytest.raises(DomainError):
        positive_power(x, -1.0, eps=1e-3)


def test_bochner_riesz_values():
    lam = np.array([0.0, 0.5, 2.0])
    np.testing.assert_allclose(bochner_riesz(1.0, 1.0)(lam), [1.0, 0.5, 0.0])
    window = bochner_riesz(1.0, -1.0, width=0.02)
    np.testing.assert_allclose(window(np.array([0.99, 0.5])), [50.0, 0.0])
    with pytest.raises(DomainError):
        bochner_riesz(1.0, -1.5)
    with pytest.raises(DomainError):
        bochner_riesz(0.0, 0.5)


def test_direct_mode_refuses_lattice_points_on_the_sphere(small_line):
    with pytest.raises(SingularMultiplierError):
        bochner_riesz_op(1.0, -0.5, laplacian_pow_k(1, 1), small_line, mode="direct")
    with pytest.raises(DomainError):
        bochner_riesz_op(1.0, -0.5, laplacian_pow_k(1, 1), small_line, mode="exact")


def test_smooth_step_and_plateau():
    np.testing.assert_allclose(smooth_step(np.array([-1.0, 0.5, 2.0])), [0.0, 0.5, 1.0])
    plateau = smooth_plateau(np.array([-3.0, 0.0, 1.5, 3.0]), (-2.0, 2.0), (-1.0, 1.0))
    assert plateau[0] == 0 and plateau[1] == 1 and 0 < plateau[2] < 1 and plateau[3] == 0
    with pytest.raises(DomainError):
        smooth_plateau(np.zeros(2), (-1.0, 1.0), (-2.0, 2.0))


def test_field_dump_keeps_grid_and_values(tmp_path, plane_grid):
    field = GridField.random(plane_grid, seed=3)
    path = save_field(field, tmp_path / "field.bin")
    loaded = load_field(path)
    assert loaded.grid == plane_grid
    np.testing.assert_allclose(loaded.values, field.values, rtol=1e-6, atol=1e-6)

    (tmp_path / "bad.bin").write_bytes(b"XXXX" + bytes(40))
    with pytest.raises(DomainError):
        load_field(tmp_path / "bad.bin")


def test_sparse_window(line_grid):
    with pytest.raises(SparseWindowError):
        require_occupancy(laplacian_pow_k(1, 1), line_grid, 0.9, 1.1)


def test_symbol_variants_agree_near_the_sphere():
    report = equivalence_L_vs_root(1.0, 0.5, laplacian_pow_k(2, 1))
    assert report.passed


def test_gaussian_check_rejects_unresolved_scales(line_grid):
    with pytest.raises(DomainError):
        generalized_gaussian_check(laplacian_pow_k(1, 1), line_grid, 1.0, [0.01, 1.0])


@pytest.mark.slow
def test_gaussian_decay_rate_on_the_line():
    grid = TorusGrid(1, 512, 128.0)
    report = generalized_gaussian_check(laplacian_pow_k(1, 1), grid, 1.0, np.geomspace(1.0, 10.0, 6))
    assert report.predicted_slope == pytest.approx(-0.5)
    assert report.slope == pytest.approx(-0.5, abs=0.05)
    assert report.verdict is Verdict.PASS


@pytest.mark.slow
@pytest.mark.parametrize("k", [1, 2])
def test_normalized_windows_agree_at_order_minus_one(k):
    P = laplacian_pow_k(2, k)
    report = equivalence_L_vs_root(1.0, -1, P)
    assert report.alpha == -1.0 and report.m == 2 * k
    assert report.samples == 16
    assert report.max_abs_error > 0
    assert report.passed


def test_window_equivalence_refuses_empty_windows():
    with pytest.raises(SparseWindowError):
        equivalence_L_vs_root(1.0, -1, laplacian_pow_k(2, 1), TorusGrid(2, 4, 1.0))
