"""
Weyl Suite
Distribution calculus identities in one variable
"""

from typing import Any, Dict, List

from weyl_calculus import DistPower, Family, Representation, chi_convolve, jump_identity_resolve, reproduction_error, smooth_bump

from .base import BaseSuite

CONVOLUTION_PAIRS = ((0.0, 0.0), (0.5, -0.5), (1.0, 0.5), (-0.5, -0.5))
REPRODUCTION_ORDERS = (0.5, 1.0, 1.5)
JUMP_ORDERS = (0.25, 0.5, 0.75)


class WeylSuite(BaseSuite):
    """chi_- convolution algebra, Weyl reproduction and the boundary jump identity"""

    def __init__(self, h: float = 1e-3):
        super().__init__(name="weyl", description="One-dimensional distribution calculus")
        self.h = h

    def checks(self, context: Dict[str, Any]) -> List:
        h = self.h

        def convolution(w: float, z: float):
            def run():
                result = chi_convolve(DistPower.chi(Family.MINUS, w), DistPower.chi(Family.MINUS, z), h=h)
                ok = result.alpha == w + z + 1 and result.quadrature_error < 1e-3
                return result.quadrature_error, ok, f"chi^{w} * chi^{z} -> {result.describe()}"
            return run

        def delta_algebra():
            minus_one = DistPower.chi(Family.MINUS, -1)
            identity = chi_convolve(minus_one, minus_one)
            shifted = chi_convolve(DistPower.chi(Family.MINUS, -2), minus_one)
            ok = (identity.kind is Representation.DELTA and identity.order == 0
                  and identity.delta_coefficient == 1
                  and shifted.order == 1 and shifted.delta_coefficient == -1)
            return None, ok, f"delta * delta = {identity.describe()}; chi^-2 * delta = {shifted.describe()}"

        def reproduction(nu: float):
            def run():
                F = smooth_bump(1.0, 2.0, h, window=(0.0, 3.0))
                error = reproduction_error(F, nu) / F.sup()
                return error, error < 1e-2, f"nu={nu}: sup error {error:.2e}"
            return run

        def jump(alpha: float):
            def run():
                resolution = jump_identity_resolve(alpha)
                return resolution.max_error, resolution.max_error < 1e-3, resolution.sign_convention
            return run

        checks = [(f"chi_convolution_{w:g}_{z:g}", 1e-3, convolution(w, z)) for w, z in CONVOLUTION_PAIRS]
        checks.append(("delta_algebra", None, delta_algebra))
        checks.extend((f"weyl_reproduction_nu_{nu:g}", 1e-2, reproduction(nu)) for nu in REPRODUCTION_ORDERS)
        checks.extend((f"jump_identity_alpha_{a:g}", 1e-3, jump(a)) for a in JUMP_ORDERS)
        return checks
