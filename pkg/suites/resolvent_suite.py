"""
Resolvent Suite
Exact identities of the free resolvent multipliers
"""

import math
from typing import Any, Dict, List

import numpy as np

from grid_calculus import TorusGrid
from resolvent_lab import ResolventSpec, fractional_resolvent, k1_k2_split, scaling_covariance_error
from symbol import laplacian_pow_k, lattice_values

from .base import BaseSuite


class ResolventSuite(BaseSuite):
    """Resolvent identity, conjugation symmetry, K1/K2 partition and scaling covariance"""

    def __init__(self):
        super().__init__(name="resolvent", description="Free resolvent multipliers")
        self.grid = TorusGrid(2, 32, 4 * math.pi)
        self.P = laplacian_pow_k(2, 1)

    def checks(self, context: Dict[str, Any]) -> List:
        grid, P = self.grid, self.P

        def resolvent_identity():
            z1, z2 = -1 + 1j, 2j
            R1 = fractional_resolvent(P, ResolventSpec(z1), grid).symbol
            R2 = fractional_resolvent(P, ResolventSpec(z2), grid).symbol
            residual = np.abs(R1 - R2 - (z1 - z2) * R1 * R2).max() / np.abs(R1 - R2).max()
            return residual, residual < 1e-12, f"relative residual {residual:.2e}"

        def conjugation():
            spec = ResolventSpec(0.5 + 0.25j, alpha=0.75)
            upper = fractional_resolvent(P, spec, grid).symbol
            lower = fractional_resolvent(P, spec.conjugate(), grid).symbol
            error = float(np.abs(np.conj(upper) - lower).max())
            return error, error < 1e-12, "R0(conj z)^a = conj R0(z)^a for real P"

        def partition():
            spec = ResolventSpec(1 + 0.1j)
            K1, K2 = k1_k2_split(P, spec, grid)
            full = fractional_resolvent(P, spec, grid).symbol
            error = float(np.abs(K1.symbol + K2.symbol - full).max())
            lam = lattice_values(P, grid)
            low_band = np.abs(K2.symbol[lam <= 4.0]).max()
            return error, error < 1e-14 and low_band < 1e-14, f"K1 + K2 - R0 = {error:.1e}; K2 on P <= 4: {low_band:.1e}"

        def covariance():
            error = scaling_covariance_error(P, grid, -1 + 1j, 0.5, 2.0)
            return error, error < 1e-12, f"relative error {error:.2e}"

        return [
            ("resolvent_identity", 1e-12, resolvent_identity),
            ("conjugation_symmetry", 1e-12, conjugation),
            ("k1_k2_partition", 1e-14, partition),
            ("scaling_covariance", 1e-12, covariance),
        ]
