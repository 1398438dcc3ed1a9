"""
Grid Suite
Functional calculus algebra on small periodic grids
"""

import math
from typing import Any, Dict, List

import numpy as np

from grid_calculus import (
    GridField,
    TorusGrid,
    equivalence_L_vs_root,
    heat,
    materialize,
    multiplier_op,
    resolvent,
)
from symbol import laplacian_pow_k

from .base import BaseSuite


class GridSuite(BaseSuite):
    """Lattice values, product rule F(L)G(L) = (FG)(L), adjoints and dense agreement"""

    def __init__(self):
        super().__init__(name="grid", description="Periodic functional calculus")

    def checks(self, context: Dict[str, Any]) -> List:
        seed = context.get("seed")
        P1 = laplacian_pow_k(1, 1)
        P2 = laplacian_pow_k(2, 1)
        grid2 = TorusGrid(2, 16, 2 * math.pi)

        def lattice_example():
            op = multiplier_op(resolvent(-1.0), P1, TorusGrid(1, 4, 2 * math.pi))
            expected = np.array([1.0, 0.5, 0.2, 0.5])
            error = float(np.max(np.abs(op.symbol - expected)))
            return error, error < 1e-15, f"symbol {np.round(op.symbol.real, 6).tolist()}"

        def product_rule():
            F, G = heat(0.3), resolvent(-1 + 1j)
            f = GridField.random(grid2, seed).values
            lhs = (multiplier_op(F, P2, grid2) @ multiplier_op(G, P2, grid2)).apply_flat(f)
            rhs = multiplier_op(F * G, P2, grid2).apply_flat(f)
            error = float(np.max(np.abs(lhs - rhs)))
            return error, error < 1e-12, f"max |F(L)G(L)f - (FG)(L)f| = {error:.2e}"

        def adjoint():
            op = multiplier_op(resolvent(2 + 1j), P2, grid2)
            f = GridField.random(grid2, seed).values
            g = GridField.random(grid2, None if seed is None else seed + 1).values
            lhs = np.vdot(g, op.apply_flat(f))
            rhs = np.vdot(op.adjoint().apply_flat(g), f)
            error = abs(lhs - rhs) / max(abs(lhs), 1e-300)
            return error, error < 1e-12, f"<Af, g> = {lhs:.6g}, <f, A*g> = {rhs:.6g}"

        def dense_agreement():
            op = multiplier_op(heat(0.5), P2, grid2)
            f = GridField.random(grid2, seed).values
            error = float(np.max(np.abs(materialize(op).apply_flat(f) - op.apply_flat(f))))
            return error, error < 1e-12, f"dense vs matrix-free: {error:.2e}"

        def root_equivalence():
            report = equivalence_L_vs_root(1.0, 1.0, P2, grid2, samples=2000)
            return report.max_abs_error, report.passed, f"max abs error {report.max_abs_error:.2e}"

        return [
            ("lattice_resolvent_values", 1e-15, lattice_example),
            ("functional_calculus_product", 1e-12, product_rule),
            ("adjoint_identity", 1e-12, adjoint),
            ("dense_matches_multiplier", 1e-12, dense_agreement),
            ("L_vs_root_equivalence", 1e-12, root_equivalence),
        ]
