"""
Region Suite
Exact-rational checks of the exponent region calculus
"""

from fractions import Fraction
from typing import Any, Dict, List

from region_calc import (
    ExponentPoint,
    InterpolationNode,
    RegionParams,
    pentagon_vertices,
    predicted_exponent,
    restriction_admissible,
    stein_interpolate,
    negative_index_region,
    perturbed_restriction_range,
)

from .base import BaseSuite

HALF = Fraction(1, 2)


class RegionSuite(BaseSuite):
    """Pentagon vertices, duality, convexity and Sobolev-line consistency"""

    def __init__(self):
        super().__init__(name="region", description="Exact exponent region calculus")
        self.params = RegionParams(n=3, m=2, alpha=Fraction(0), p=Fraction(6, 5))

    def _vertices(self):
        vertices = pentagon_vertices(self.params)
        expected = {"A": (Fraction(1), Fraction(2, 3)), "D(p)": (HALF, HALF)}
        wrong = {k: str(vertices[k]) for k, v in expected.items() if (vertices[k].inv_p, vertices[k].inv_q) != v}
        return None, not wrong, f"n=3 p=6/5 alpha=0: {wrong or 'A=(1,2/3), D(p)=(1/2,1/2)'}"

    def _duality(self):
        region = negative_index_region(self.params, 3)
        twice = region.dual().dual()
        same = all(
            (a.a, a.b, a.c, a.op) == (b.a, b.b, b.c, b.op)
            for a, b in zip(region.constraints, twice.constraints)
        )
        lattice = [ExponentPoint(Fraction(i, 12), Fraction(j, 12)) for i in range(13) for j in range(13)]
        mismatched = [str(x) for x in lattice if region.contains(x) != region.dual().contains(x.dual())]
        return len(mismatched), same and not mismatched, f"dual(dual(R)) = R; mismatches {mismatched[:3]}"

    def _convexity(self):
        region = negative_index_region(self.params, 3)
        polygon = region.polygon()
        if len(polygon) < 3:
            return None, False, "region polygon is degenerate"
        cx = sum(v.inv_p for v in polygon) / len(polygon)
        cy = sum(v.inv_q for v in polygon) / len(polygon)
        # midpoints between the centroid and each vertex are interior points
        interior = [InterpolationNode(Fraction(0), ExponentPoint((cx + v.inv_p) / 2, (cy + v.inv_q) / 2))
                    for v in polygon]
        outside = []
        for i, left in enumerate(interior):
            right = interior[(i + 1) % len(interior)]
            mixed = stein_interpolate(left, right, Fraction(1, 3))
            if not region.contains(mixed.point):
                outside.append(str(mixed.point))
        return len(outside), not outside, f"{len(interior)} interpolations, outside: {outside[:3]}"

    def _sobolev_line(self):
        bad = []
        for n, m in ((3, 2), (4, 2), (5, 2)):
            for k in range(1, 24):
                inv_p = Fraction(k, 24)
                inv_q = inv_p - Fraction(m, n)
                if not (0 <= inv_q <= 1):
                    continue
                point = ExponentPoint(inv_p, inv_q)
                if restriction_admissible(n, m, point).admissible and predicted_exponent(n, m, point) != 0:
                    bad.append((n, m, str(point)))
        return len(bad), not bad, f"admissible Sobolev-line points with nonzero exponent: {bad[:3]}"

    def _ranges(self):
        interval = perturbed_restriction_range(3, 2)
        ok = interval.lower == 1 and interval.upper == Fraction(4, 3) and not interval.upper_closed
        return None, ok, f"n=3 m=2 range {interval}"

    def checks(self, context: Dict[str, Any]) -> List:
        return [
            ("pentagon_vertices_exact", None, self._vertices),
            ("duality_closure", 0.0, self._duality),
            ("interpolation_convexity", 0.0, self._convexity),
            ("sobolev_line_exponent_zero", 0.0, self._sobolev_line),
            ("perturbed_range", None, self._ranges),
        ]
