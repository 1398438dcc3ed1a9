import numpy as np
import pytest

from errors import ConfigError, DomainError
from grid_calculus import TorusGrid
from symbol import (
    SymbolPoly,
    eval_grad_hess,
    from_config,
    gaussian_curvature,
    lattice_values,
    laplacian_pow_k,
    nondegeneracy_check,
    norm_power_m,
    project_to_sigma,
    sphere_points,
    support_function,
)


def quartic_axes():
    return SymbolPoly(n=2, m=4, terms=(((4, 0), 1.0), ((0, 4), 1.0)), name="xi1^4 + xi2^4")


def test_laplacian_power_uses_multinomial_coefficients():
    P = laplacian_pow_k(2, 2)
    assert dict(P.terms) == {(4, 0): 1.0, (2, 2): 2.0, (0, 4): 1.0}
    xi = np.array([[1.0, 2.0], [0.3, -0.4]])
    np.testing.assert_allclose(P(xi), np.sum(xi ** 2, axis=1) ** 2)
    assert norm_power_m(3, 4).terms == laplacian_pow_k(3, 2).terms


def test_symbol_validation():
    with pytest.raises(DomainError):
        SymbolPoly(n=2, m=3, terms=(((3, 0), 1.0),))
    with pytest.raises(DomainError):
        SymbolPoly(n=2, m=2, terms=(((1, 0), 1.0),))
    with pytest.raises(DomainError):
        SymbolPoly(n=2, m=2, terms=())
    with pytest.raises(DomainError):
        laplacian_pow_k(2, 1).evaluate([1.0, 2.0, 3.0])


def test_euler_homogeneity():
    P = SymbolPoly(n=3, m=4, terms=(((4, 0, 0), 1.0), ((2, 2, 0), 0.5), ((0, 1, 3), 0.25), ((0, 0, 4), 2.0)))
    xi = np.array([0.7, -0.2, 1.1])
    value, grad, _ = eval_grad_hess(P, xi)
    assert grad @ xi == pytest.approx(P.m * value)
    assert P(2.0 * xi) == pytest.approx(2.0 ** P.m * value)


def test_unit_sphere_has_curvature_one():
    assert gaussian_curvature(laplacian_pow_k(2, 1), [1.0, 0.0]) == pytest.approx(1.0)
    assert gaussian_curvature(laplacian_pow_k(3, 1), [0.0, 0.6, 0.8]) == pytest.approx(1.0)
    with pytest.raises(DomainError):
        gaussian_curvature(laplacian_pow_k(2, 1), [0.0, 0.0])


def test_projection_lands_on_sigma():
    P = quartic_axes()
    points = project_to_sigma(P, sphere_points(2, 40))
    np.testing.assert_allclose(P(points), 1.0, atol=1e-12)


def test_nondegeneracy_verdicts():
    sample = nondegeneracy_check(laplacian_pow_k(3, 1), num_samples=200)
    assert sample.passed and sample.verdict == "PASS"
    np.testing.assert_allclose(sample.hessdets, 8.0)

    flat = nondegeneracy_check(quartic_axes(), num_samples=200)
    assert flat.verdict == "FAIL"
    assert flat.min_abs_hessdet < 1e-8
    assert abs(flat.worst_point).max() == pytest.approx(1.0)


def test_support_function_of_the_sphere():
    support = support_function(laplacian_pow_k(2, 1), [3.0, 4.0])
    assert support.phi == pytest.approx(5.0, rel=1e-8)
    np.testing.assert_allclose(support.omega, [0.6, 0.8], atol=1e-6)
    with pytest.raises(DomainError):
        support_function(laplacian_pow_k(2, 1), [0.0, 0.0])


def test_from_config_forms():
    P = from_config({"builtin": "norm_power_m", "n": 2, "m": 4})
    assert P.m == 4 and P.n == 2
    assert from_config(quartic_axes().to_config()).terms == quartic_axes().terms
    with pytest.raises(ConfigError):
        from_config({"builtin": "cubic", "n": 2})
    with pytest.raises(ConfigError):
        from_config({"n": 2, "m": 3, "terms": [[[3, 0], 1.0]]})
    with pytest.raises(ConfigError):
        from_config([1, 2])


def test_lattice_values_on_a_small_line():
    grid = TorusGrid(1, 4, 2 * np.pi)
    np.testing.assert_allclose(lattice_values(laplacian_pow_k(1, 1), grid), [0.0, 1.0, 4.0, 1.0])
    with pytest.raises(DomainError):
        lattice_values(laplacian_pow_k(2, 1), grid)
