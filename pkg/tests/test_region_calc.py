from fractions import Fraction

import pytest

from errors import DomainError
from region_calc import (
    CaseId,
    ExponentPoint,
    InterpolationNode,
    RegionParams,
    as_rational,
    case_for_alpha,
    free_restriction_range,
    krs_admissible,
    krs_region,
    negative_index_region,
    pentagon_vertices,
    perturbed_restriction_range,
    perturbed_restriction_region,
    predicted_exponent,
    q_alpha,
    restriction_bootstrap,
    sobolev_line_region,
    stein_interpolate,
    summability_threshold,
)

F = Fraction


@pytest.fixture
def case3():
    return RegionParams(n=3, m=2, alpha=0, p=F(6, 5))


def test_as_rational_refuses_floats_and_zero_denominators():
    assert as_rational("6/5") == F(6, 5)
    assert as_rational(2) == F(2)
    with pytest.raises(DomainError):
        as_rational(0.5)
    with pytest.raises(DomainError):
        as_rational("6/0")


def test_exponent_point_bounds_and_duality():
    with pytest.raises(DomainError):
        ExponentPoint(F(3, 2), 0)
    point = ExponentPoint(F(1, 2), F(1, 3))
    assert point.dual() == ExponentPoint(F(2, 3), F(1, 2))
    assert point.dual().dual() == point
    assert ExponentPoint.from_exponents(F(6, 5), 6) == ExponentPoint(F(5, 6), F(1, 6))
    assert ExponentPoint.from_exponents(1, None) == ExponentPoint(1, 0)


def test_pentagon_vertices_for_n3_p65(case3):
    vertices = pentagon_vertices(case3)
    assert vertices["A"] == ExponentPoint(1, F(2, 3))
    assert vertices["C(p)"] == ExponentPoint(F(5, 6), F(2, 3))
    assert vertices["D(p)"] == ExponentPoint(F(1, 2), F(1, 2))
    assert vertices["A'"] == ExponentPoint(F(1, 3), 0)
    for label, vertex in vertices.items():
        if "'" not in label:
            primed = label[0] + "'" + label[1:]
            assert vertices[primed] == vertex.dual()


def test_scalar_thresholds():
    assert q_alpha(3, 0) == F(3, 2)
    assert q_alpha(3, 1) == 1
    assert summability_threshold(3, F(6, 5)) == F(1, 2)


@pytest.mark.parametrize("alpha,expected", [
    (1, CaseId.CASE1),
    (F(1, 4), CaseId.CASE2),
    (0, CaseId.CASE3),
    (F(-1, 4), CaseId.CASE3),
    (F(-3, 4), CaseId.CASE4),
])
def test_case_for_alpha(alpha, expected):
    assert case_for_alpha(RegionParams(n=3, alpha=alpha, p=F(6, 5))) is expected


def test_case_mismatch_is_a_domain_error(case3):
    with pytest.raises(DomainError):
        negative_index_region(case3, 1)
    with pytest.raises(DomainError):
        negative_index_region(case3, 5)


def test_region_params_validation():
    with pytest.raises(DomainError):
        RegionParams(n=1)
    with pytest.raises(DomainError):
        RegionParams(n=3, p=2)
    with pytest.raises(DomainError):
        RegionParams(n=3, p=F(6, 5), p0=F(5, 4))


def test_case3_region_membership(case3):
    region = negative_index_region(case3, 3)
    assert region.case_id is CaseId.CASE3
    assert region.landmarks["D(p)"] == ExponentPoint(F(1, 2), F(1, 2))
    assert region.contains(ExponentPoint(F(3, 4), F(1, 4)))
    # the corner D(p) itself sits on the strict diagonal boundary
    assert not region.contains(ExponentPoint(F(1, 2), F(1, 2)))
    outside = ExponentPoint(F(9, 10), F(2, 3))
    assert not region.contains(outside)
    assert region.violated(outside) == ["1/2 - 1/s > -(2a+1)/(2n)"]
    assert ExponentPoint(F(1, 2), F(1, 2)) in region.polygon()


def test_case3_region_is_duality_symmetric(case3):
    region = negative_index_region(case3, 3)
    dual = region.dual()
    grid = [F(k, 12) for k in range(1, 12)]
    for x in grid:
        for y in grid:
            point = ExponentPoint(x, y)
            assert region.contains(point) == dual.contains(point.dual())
            assert region.contains(point) == region.contains(point.dual())


def test_constraint_dual_is_an_involution(case3):
    region = negative_index_region(case3, 3)
    for constraint in region.constraints:
        twice = constraint.dual().dual()
        assert (twice.a, twice.b, twice.c, twice.op) == (constraint.a, constraint.b, constraint.c, constraint.op)


def test_regions_stay_inside_open_square_below_diagonal():
    params = RegionParams(n=3, alpha=F(-3, 4), p=F(6, 5))
    region = negative_index_region(params, 4)
    assert not region.contains(ExponentPoint(1, 0))
    assert not region.contains(ExponentPoint(F(1, 3), F(2, 3)))


def test_region_files(case3):
    region = negative_index_region(case3, 3)
    body = region.to_json()
    assert body["case"] == "case3"
    assert body["landmarks"]["D(p)"] == [[1, 2], [1, 2]]
    rows = region.to_csv_rows()
    assert {"polygon", "boundary"} == {row["kind"] for row in rows}


def test_stein_interpolation_is_convex():
    node1 = InterpolationNode(0, ExponentPoint(1, 0))
    node2 = InterpolationNode(1, ExponentPoint(F(1, 2), F(1, 2)))
    mid = stein_interpolate(node1, node2, F(1, 3))
    assert mid.delta == F(2, 3)
    assert mid.point == ExponentPoint(F(2, 3), F(1, 3))
    with pytest.raises(DomainError):
        stein_interpolate(node1, node2, 1)


def test_krs_admissibility_on_the_sobolev_line():
    point = ExponentPoint(F(5, 6), F(1, 6))
    verdict = krs_admissible(3, 2, point, 1)
    assert verdict.admissible and verdict.full_resolvent
    assert predicted_exponent(3, 2, point) == 0

    endpoint = krs_admissible(3, 2, ExponentPoint(1, 0), 1)
    assert endpoint.admissible
    assert not endpoint.full_resolvent

    with pytest.raises(DomainError):
        krs_admissible(3, 2, point, F(1, 4))


@pytest.mark.parametrize("n", [3, 4, 5])
def test_sobolev_line_points_predict_exponent_zero(n):
    region = sobolev_line_region(n, 2)
    for vertex in region.polygon():
        assert predicted_exponent(n, 2, vertex) == 0


def test_krs_region_contains_admissible_points():
    region = krs_region(3, 2, 1)
    assert region.case_id is CaseId.KRS
    assert region.contains(ExponentPoint(F(5, 6), F(1, 6)))
    assert not region.contains(ExponentPoint(F(1, 2), F(1, 2)))


def test_restriction_ranges():
    interval = perturbed_restriction_range(3, 2)
    assert (interval.lower, interval.upper) == (1, F(4, 3))
    assert interval.contains(1) and interval.contains(F(6, 5))
    assert not interval.contains(F(4, 3))
    assert str(interval) == "[1, 4/3)"
    with pytest.raises(DomainError):
        perturbed_restriction_range(2, 2)

    free = free_restriction_range(3, 2)
    assert (free.lower, free.upper) == (F(6, 5), F(4, 3))
    assert not free.contains(F(6, 5))

    assert restriction_bootstrap(F(6, 5), 1, True).contains(F(11, 10))
    with pytest.raises(DomainError):
        restriction_bootstrap(F(6, 5), 1, False)


def test_perturbed_restriction_region_is_the_dual_line():
    region = perturbed_restriction_region(3, 2)
    assert region.contains(ExponentPoint(F(5, 6), F(1, 6)))
    assert not region.contains(ExponentPoint(F(5, 6), F(1, 3)))
    assert not region.contains(ExponentPoint(F(3, 4), F(1, 4)))
