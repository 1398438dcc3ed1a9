"""
Symbol
Real homogeneous elliptic polynomials P(xi): evaluation, derivatives, the level set
Sigma = {P = 1}, non-degeneracy and the support function of Sigma
"""

import logging
import math
from dataclasses import dataclass, field
from itertools import combinations_with_replacement
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import minimize

import config
from errors import ConfigError, ConvergenceError, DomainError

logger = logging.getLogger(__name__)

Term = Tuple[Tuple[int, ...], float]


@dataclass(frozen=True)
class SymbolPoly:
    """Homogeneous polynomial sum_a c_a xi^a of even degree m in n variables"""
    n: int
    m: int
    terms: Tuple[Term, ...]
    name: str = ""

    def __post_init__(self):
        if self.n < 1:
            raise DomainError(f"dimension must be >= 1, got {self.n}")
        if self.m < 2 or self.m % 2:
            raise DomainError(f"degree m must be even and >= 2, got {self.m}")
        terms = []
        for index, coeff in self.terms:
            index = tuple(int(a) for a in index)
            if len(index) != self.n or any(a < 0 for a in index):
                raise DomainError(f"multi-index {index} does not fit dimension {self.n}")
            if sum(index) != self.m:
                raise DomainError(f"multi-index {index} has degree {sum(index)}, expected {self.m}")
            terms.append((index, float(coeff)))
        if not terms:
            raise DomainError("symbol has no terms")
        object.__setattr__(self, "terms", tuple(terms))
        object.__setattr__(self, "_exps", np.array([t[0] for t in terms], dtype=float))
        object.__setattr__(self, "_coeffs", np.array([t[1] for t in terms], dtype=float))

    def __call__(self, xi) -> np.ndarray:
        return self.evaluate(xi)

    def evaluate(self, xi) -> np.ndarray:
        """P at points of shape (..., n)"""
        xi = np.asarray(xi, dtype=float)
        if xi.shape[-1] != self.n:
            raise DomainError(f"points must have trailing dimension {self.n}")
        powers = xi[..., None, :] ** self._exps
        return np.prod(powers, axis=-1) @ self._coeffs

    def _derivative(self, xi: np.ndarray, order: Tuple[int, ...]) -> np.ndarray:
        exps = self._exps - np.array(order, dtype=float)
        falling = np.ones(len(self._coeffs))
        for axis, k in enumerate(order):
            for j in range(k):
                falling *= self._exps[:, axis] - j
        valid = np.all(exps >= 0, axis=1)
        exps = np.where(valid[:, None], exps, 0.0)
        mono = np.prod(xi[..., None, :] ** exps, axis=-1)
        return mono @ (self._coeffs * falling * valid)

    def to_config(self) -> Dict:
        return {"n": self.n, "m": self.m, "terms": [[list(a), c] for a, c in self.terms]}


# ==================== CONSTRUCTION ====================

def _compositions(total: int, parts: int):
    for cut in combinations_with_replacement(range(parts), total):
        counts = [0] * parts
        for c in cut:
            counts[c] += 1
        yield tuple(counts)


def laplacian_pow_k(n: int, k: int) -> SymbolPoly:
    """|xi|^{2k} by the multinomial theorem"""
    if k < 1:
        raise DomainError(f"power k must be >= 1, got {k}")
    terms = []
    for counts in _compositions(k, n):
        coeff = math.factorial(k)
        for c in counts:
            coeff //= math.factorial(c)
        terms.append((tuple(2 * c for c in counts), float(coeff)))
    return SymbolPoly(n=n, m=2 * k, terms=tuple(terms), name=f"|xi|^{2 * k}")


def norm_power_m(n: int, m: int) -> SymbolPoly:
    """|xi|^m for even m"""
    if m % 2:
        raise DomainError(f"norm_power_m needs even m, got {m}")
    return laplacian_pow_k(n, m // 2)


BUILTIN_SYMBOLS = {
    "laplacian_pow_k": lambda n, k=1, m=None: laplacian_pow_k(n, k),
    "norm_power_m": lambda n, m=2, k=None: norm_power_m(n, m),
}


def builtin(name: str, n: int, **kwargs) -> SymbolPoly:
    try:
        factory = BUILTIN_SYMBOLS[name]
    except KeyError as exc:
        raise ConfigError(f"unknown built-in symbol {name!r}; known: {sorted(BUILTIN_SYMBOLS)}") from exc
    return factory(n, **kwargs)


def from_config(spec: Dict) -> SymbolPoly:
    """
    Build a symbol from its config form.

    Accepts {"n":2,"m":4,"terms":[[[4,0],1.0],...]} or
    {"builtin":"norm_power_m","n":2,"m":4}.
    """
    if not isinstance(spec, dict):
        raise ConfigError(f"symbol spec must be an object, got {type(spec).__name__}")
    try:
        if "builtin" in spec:
            extra = {k: v for k, v in spec.items() if k in ("k", "m")}
            return builtin(spec["builtin"], int(spec["n"]), **extra)
        terms = tuple((tuple(idx), float(c)) for idx, c in spec["terms"])
        return SymbolPoly(n=int(spec["n"]), m=int(spec["m"]), terms=terms)
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"malformed symbol spec {spec!r}: {exc}") from exc


# ==================== DERIVATIVES ====================

def eval_grad_hess(P: SymbolPoly, xi: Sequence[float]) -> Tuple[float, np.ndarray, np.ndarray]:
    """Value, gradient and Hessian from exact differentiation of the term list"""
    xi = np.asarray(xi, dtype=float)
    n = P.n
    value = float(P.evaluate(xi))
    grad = np.empty(n)
    hess = np.empty((n, n))
    for i in range(n):
        order = [0] * n
        order[i] = 1
        grad[i] = P._derivative(xi, tuple(order))
        for j in range(i, n):
            order2 = [0] * n
            order2[i] += 1
            order2[j] += 1
            hess[i, j] = hess[j, i] = P._derivative(xi, tuple(order2))
    return value, grad, hess


def gaussian_curvature(P: SymbolPoly, xi: Sequence[float]) -> float:
    """Gauss curvature of the level set of P through xi (bordered Hessian)"""
    _, grad, hess = eval_grad_hess(P, xi)
    n = P.n
    bordered = np.zeros((n + 1, n + 1))
    bordered[:n, :n] = hess
    bordered[:n, n] = grad
    bordered[n, :n] = grad
    norm = np.linalg.norm(grad)
    if norm == 0:
        raise DomainError("gradient vanishes; curvature undefined at the origin")
    return float(-np.linalg.det(bordered) / norm ** (n + 1))


# ==================== SIGMA ====================

def sphere_points(n: int, count: int, seed: Optional[int] = None) -> np.ndarray:
    """Deterministic quasi-uniform points on S^{n-1}"""
    if n == 1:
        return np.array([[1.0], [-1.0]])
    if n == 2:
        theta = 2 * np.pi * (np.arange(count) + 0.5) / count
        return np.stack([np.cos(theta), np.sin(theta)], axis=1)
    if n == 3:
        # Fibonacci lattice
        k = np.arange(count) + 0.5
        z = 1 - 2 * k / count
        r = np.sqrt(1 - z ** 2)
        phi = np.pi * (3 - math.sqrt(5)) * k
        return np.stack([r * np.cos(phi), r * np.sin(phi), z], axis=1)
    rng = np.random.default_rng(config.SEED if seed is None else seed)
    g = rng.standard_normal((count, n))
    return g / np.linalg.norm(g, axis=1, keepdims=True)


def project_to_sigma(P: SymbolPoly, omega: np.ndarray,
                     max_iter: Optional[int] = None, tol: Optional[float] = None) -> np.ndarray:
    """Scalar Newton on t -> P(t*omega) - 1 along every ray"""
    max_iter = config.NEWTON_MAX_ITER if max_iter is None else max_iter
    tol = config.NEWTON_TOL if tol is None else tol
    omega = np.atleast_2d(np.asarray(omega, dtype=float))
    base = P.evaluate(omega)
    if np.any(base <= 0):
        bad = omega[np.argmin(base)]
        raise ConvergenceError(f"P is not positive along ray {bad.tolist()}; symbol not elliptic there")
    m = P.m
    t = np.ones(len(omega))
    for _ in range(max_iter):
        g = t ** m * base - 1
        if np.all(np.abs(g) < tol):
            break
        t = t - g / (m * t ** (m - 1) * base)
    else:
        residual = np.abs(t ** m * base - 1)
        worst = int(np.argmax(residual))
        raise ConvergenceError(
            f"Newton projection did not converge in {max_iter} iterations near ray {omega[worst].tolist()}"
        )
    return omega * t[:, None]


@dataclass
class SigmaSample:
    """Points of Sigma with their Hessian determinants"""
    points: np.ndarray
    hessdets: np.ndarray
    min_abs_hessdet: float
    threshold: float
    passed: bool
    worst_point: np.ndarray = field(default=None)

    @property
    def verdict(self) -> str:
        return "PASS" if self.passed else "FAIL"


def nondegeneracy_check(P: SymbolPoly, num_samples: Optional[int] = None,
                        threshold: Optional[float] = None) -> SigmaSample:
    """Sample Sigma along deterministic rays and report min |det Hess P|"""
    num_samples = config.SIGMA_SAMPLES_PER_DIM * P.n if num_samples is None else num_samples
    threshold = config.NONDEGENERACY_THRESHOLD if threshold is None else threshold

    rays = sphere_points(P.n, num_samples)
    if P.n == 2:
        # make sure the coordinate axes are sampled
        rays = np.vstack([rays, np.eye(2), -np.eye(2)])
    points = project_to_sigma(P, rays)
    residual = np.abs(P.evaluate(points) - 1)
    if residual.max() >= 1e-10:
        raise ConvergenceError(f"Sigma projection residual {residual.max():.2e} exceeds 1e-10")

    dets = np.array([np.linalg.det(eval_grad_hess(P, pt)[2]) for pt in points])
    worst = int(np.argmin(np.abs(dets)))
    min_abs = float(abs(dets[worst]))
    passed = min_abs > threshold
    if not passed:
        logger.warning("non-degeneracy fails: |det Hess| = %.3e at %s", min_abs, points[worst])
    return SigmaSample(points=points, hessdets=dets, min_abs_hessdet=min_abs,
                       threshold=threshold, passed=passed, worst_point=points[worst])


# ==================== SUPPORT FUNCTION ====================

@dataclass
class SupportPoint:
    phi: float
    omega: np.ndarray
    multiplicity: int = 1
    local_maxima: List[Tuple[float, List[float]]] = field(default_factory=list)


def support_function(P: SymbolPoly, y: Sequence[float], starts: Optional[int] = None,
                     tol: Optional[float] = None) -> SupportPoint:
    """phi(y) = max over omega in Sigma of <y, omega>, by multi-start ascent"""
    starts = config.SUPPORT_STARTS if starts is None else starts
    tol = config.SUPPORT_TOL if tol is None else tol
    y = np.asarray(y, dtype=float)
    norm_y = np.linalg.norm(y)
    if norm_y == 0:
        raise DomainError("support function needs a nonzero direction")
    m = P.m

    # u -> <y,u> P(u)^{-1/m} is 0-homogeneous, so its maxima are rays through Sigma
    def objective(u):
        value, grad, _ = eval_grad_hess(P, u)
        scale = value ** (-1.0 / m)
        dot = y @ u
        f = dot * scale
        df = y * scale - dot * scale / (m * value) * grad
        return -f, -df

    seeds = np.vstack([y / norm_y, sphere_points(P.n, starts)])
    found: List[Tuple[float, np.ndarray]] = []
    for u0 in seeds:
        if y @ u0 <= 0:
            u0 = u0 + 2 * y / norm_y
        result = minimize(objective, u0, jac=True, method="BFGS", options={"gtol": 1e-13})
        u = result.x / np.linalg.norm(result.x)
        omega = project_to_sigma(P, u[None, :])[0]
        found.append((float(y @ omega), omega))

    best_value = max(v for v, _ in found)
    scale = max(abs(best_value), 1.0)
    maxima: List[Tuple[float, np.ndarray]] = []
    for value, omega in found:
        if not any(np.linalg.norm(omega - w) < 1e-4 for _, w in maxima):
            maxima.append((value, omega))

    disagreeing = [v for v, _ in maxima if best_value - v > tol * scale]
    report = [(v, w.tolist()) for v, w in maxima]
    if disagreeing:
        raise ConvergenceError(
            f"multi-start maxima disagree beyond {tol}: {report}"
        )
    best_omega = max(found, key=lambda item: item[0])[1]
    return SupportPoint(phi=best_value, omega=best_omega, multiplicity=len(maxima), local_maxima=report)


def lattice_values(P: SymbolPoly, grid) -> np.ndarray:
    """P(xi_k) on the frequency lattice of a torus grid, shape (N,)*n"""
    if grid.n != P.n:
        raise DomainError(f"symbol dimension {P.n} does not match grid dimension {grid.n}")
    return P.evaluate(grid.frequency_mesh())
