"""
Symbol Suite
Geometry checks of the configured symbol and its level set Sigma
"""

from typing import Any, Dict, List

import numpy as np

from symbol import SymbolPoly, eval_grad_hess, laplacian_pow_k, nondegeneracy_check, sphere_points, support_function

from .base import BaseSuite


class SymbolSuite(BaseSuite):
    """Non-degeneracy, Euler homogeneity and support-function homogeneity"""

    def __init__(self):
        super().__init__(name="symbol", description="Symbol and level-set geometry")

    @staticmethod
    def _symbol(context: Dict[str, Any]) -> SymbolPoly:
        return context.get("symbol") or laplacian_pow_k(2, 1)

    def checks(self, context: Dict[str, Any]) -> List:
        P = self._symbol(context)

        def nondegenerate():
            sample = nondegeneracy_check(P)
            detail = f"min |det Hess P| = {sample.min_abs_hessdet:.3e} at {np.round(sample.worst_point, 6).tolist()}"
            return sample.min_abs_hessdet, sample.passed, detail

        def euler():
            points = 1.7 * sphere_points(P.n, 64)
            worst = 0.0
            for xi in points:
                value, grad, _ = eval_grad_hess(P, xi)
                worst = max(worst, abs(grad @ xi - P.m * value) / max(abs(value), 1e-300))
            return worst, worst < 1e-12, f"max relative |xi . grad P - m P| = {worst:.2e}"

        def support_scaling():
            y = np.linspace(1.0, 0.3, P.n)
            once = support_function(P, y).phi
            twice = support_function(P, 2 * y).phi
            error = abs(twice - 2 * once) / abs(once)
            return error, error < 1e-6, f"phi(2y) = {twice:.10g}, 2 phi(y) = {2 * once:.10g}"

        return [
            ("sigma_nondegenerate", 1e-8, nondegenerate),
            ("euler_homogeneity", 1e-12, euler),
            ("support_homogeneity", 1e-6, support_scaling),
        ]
