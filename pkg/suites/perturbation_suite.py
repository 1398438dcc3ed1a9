"""
Perturbation Suite
Dense cross-checks of H = P(D) + V on a small grid
"""

import math
from typing import Any, Dict, List

from errors import GateRefusedError
from grid_calculus import GridField, TorusGrid
from perturbation import (
    PerturbedOperator,
    ball_indicator,
    form_monotonicity_check,
    form_positivity,
    neumann_dense_discrepancy,
    neumann_inverse,
    poisson_density,
    resolvent_identity_check,
    stone_density,
)
from symbol import laplacian_pow_k

from .base import BaseSuite


class PerturbationSuite(BaseSuite):
    """Stone density, resolvent identity, form order, Neumann series and the gate veto"""

    def __init__(self):
        super().__init__(name="perturbation", description="Perturbed operators P(D) + V")
        self.grid = TorusGrid(2, 8, 2 * math.pi)
        self.P = laplacian_pow_k(2, 1)

    def checks(self, context: Dict[str, Any]) -> List:
        grid, P = self.grid, self.P
        seed = context.get("seed")
        V = ball_indicator(grid, 0.2, 1.0)
        Pop = PerturbedOperator(P, V, "dense")
        f = GridField.random(grid, seed).flat

        def stone():
            worst = 0.0
            for lam in (0.5, 2.0, 5.0):
                direct = stone_density(Pop, lam, 0.1, f)
                spectral = float(poisson_density(Pop, lam, 0.1, f)[0])
                worst = max(worst, abs(direct - spectral) / abs(spectral))
            return worst, worst < 1e-10, f"max relative gap {worst:.2e} over 3 lambdas"

        def identity():
            residual = resolvent_identity_check(Pop, -1 + 1j, 2j)
            return residual, residual < 1e-10, f"relative residual {residual:.2e}"

        def monotone():
            shift, ok = form_monotonicity_check(P, ball_indicator(grid, 0.1, 1.0), ball_indicator(grid, 0.3, 1.5))
            return shift, ok, f"min eigenvalue shift {shift:.3e}"

        def positive():
            lowest, ok = form_positivity(Pop)
            return lowest, ok, f"lowest eigenvalue {lowest:.3e}"

        def neumann():
            report = neumann_dense_discrepancy(Pop, -4.0, f, seed=seed)
            return report["error"], report["error"] < 1e-8, f"gate {report['gate']:.3g}, {report['terms_used']} terms"

        def gate_veto():
            strong = PerturbedOperator(P, ball_indicator(grid, 50.0, 1.0))
            try:
                inverse = neumann_inverse(strong, -1.0, seed=seed)
            except GateRefusedError as exc:
                return None, True, f"refused: {exc}"
            return inverse.gate, False, f"series accepted with gate {inverse.gate:.3g}"

        return [
            ("stone_matches_eigendecomposition", 1e-10, stone),
            ("resolvent_identity_dense", 1e-10, identity),
            ("form_monotonicity", 1e-10, monotone),
            ("form_positivity", 1e-10, positive),
            ("neumann_matches_dense", 1e-8, neumann),
            ("gate_refusal", None, gate_veto),
        ]
