"""
Perturbation
Schrodinger-type operators H = P(D) + V on the torus: smallness gate, Neumann series
for the perturbed resolvent, Stone densities, restriction and Davies-Gaffney sweeps
"""

import logging
import math
import threading
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import scipy.linalg
from scipy.integrate import quad

import config
from errors import ConfigError, ConvergenceError, DomainError, GateRefusedError, GridCapError, SparseWindowError
from grid_calculus import GridOperator, TorusGrid, materialize
from norm_metrics import ScalingReport, dual_exponent, fit_power_law, lower_bound, lp_norm
from region_calc import predicted_exponent, perturbed_restriction_range
from resolvent_lab import ResolventSpec, exponent_point, fractional_resolvent, parallel_sweep
from symbol import SymbolPoly, laplacian_pow_k, lattice_values

logger = logging.getLogger(__name__)


# ==================== POTENTIALS ====================

def _origin_cell_average(grid: TorusGrid, power: float, sub: int = 16) -> float:
    """Mean of |x|^power over the grid cell centred at the origin (midpoint sub-sampling)"""
    h = grid.spacing
    offsets = (np.arange(sub) + 0.5) / sub - 0.5
    mesh = np.stack(np.meshgrid(*([offsets * h] * grid.n), indexing="ij"), axis=-1)
    r = np.linalg.norm(mesh, axis=-1)
    return float(np.mean(r ** power))


@dataclass
class Smallness:
    Lnm_norm: float
    kato_like: Optional[float]
    c0: float

    @property
    def total(self) -> float:
        return self.Lnm_norm + (self.kato_like or 0.0)

    @property
    def passes(self) -> bool:
        return self.total < self.c0

    def to_json(self) -> Dict:
        return {"Lnm_norm": self.Lnm_norm, "kato_like": self.kato_like,
                "kato_applicable": self.kato_like is not None,
                "c0": self.c0, "passes": self.passes}


@dataclass(frozen=True, eq=False)
class PotentialSpec:
    """Nonnegative potential sampled on a grid; smallness is derived on construction"""
    grid: TorusGrid
    values: np.ndarray
    name: str = "custom"
    m: int = 2
    smallness: Smallness = field(init=False, repr=False)

    def __post_init__(self):
        values = np.asarray(self.values)
        if np.iscomplexobj(values):
            if np.any(np.abs(values.imag) > 0):
                raise DomainError("potential must be real")
            values = values.real
        values = values.astype(float)
        if values.size != self.grid.size:
            raise DomainError(f"potential has {values.size} samples, grid needs {self.grid.size}")
        if not np.all(np.isfinite(values)):
            raise DomainError("potential has non-finite samples")
        if np.any(values < 0):
            raise DomainError(f"potential must be nonnegative, min is {values.min():.3g}")
        object.__setattr__(self, "values", values.reshape(self.grid.shape))
        object.__setattr__(self, "smallness", smallness_functional(self, self.grid.n, self.m))

    @property
    def flat(self) -> np.ndarray:
        return self.values.ravel()

    @property
    def is_zero(self) -> bool:
        return not np.any(self.values)

    def scaled(self, c: float) -> "PotentialSpec":
        return PotentialSpec(self.grid, c * self.values, f"{c:g}*{self.name}", self.m)

    def with_values(self, values: np.ndarray) -> "PotentialSpec":
        return PotentialSpec(self.grid, values, self.name, self.m)


def zero_potential(grid: TorusGrid, m: int = 2) -> PotentialSpec:
    return PotentialSpec(grid, np.zeros(grid.shape), "zero", m)


def ball_indicator(grid: TorusGrid, c: float, r: float, m: int = 2) -> PotentialSpec:
    """c on the minimum-image ball B(0, r)"""
    return PotentialSpec(grid, c * (grid.radius() <= r), f"ball({c:g},{r:g})", m)


def gaussian(grid: TorusGrid, c: float, sigma: float, m: int = 2) -> PotentialSpec:
    r = grid.radius()
    return PotentialSpec(grid, c * np.exp(-r ** 2 / (2 * sigma ** 2)), f"gaussian({c:g},{sigma:g})", m)


def inverse_square(grid: TorusGrid, c: float, m: int = 2) -> PotentialSpec:
    """c / |x|^2 with the origin cell replaced by its cell average"""
    if grid.n < 3:
        raise DomainError(f"|x|^-2 is not locally integrable for n = {grid.n}")
    r = grid.radius()
    values = np.zeros(grid.shape)
    away = r > 0
    values[away] = c / r[away] ** 2
    values[(0,) * grid.n] = c * _origin_cell_average(grid, -2.0)
    return PotentialSpec(grid, values, f"inverse_square({c:g})", m)


def from_npy(grid: TorusGrid, path: Union[str, Path], m: int = 2) -> PotentialSpec:
    try:
        values = np.load(Path(path))
    except (OSError, ValueError) as exc:
        raise ConfigError(f"cannot load potential from {path}: {exc}") from exc
    return PotentialSpec(grid, values, Path(path).stem, m)


POTENTIALS = {
    "ball": ball_indicator,
    "ball_indicator": ball_indicator,
    "gaussian": gaussian,
    "inverse_square": inverse_square,
}


def potential_from_config(spec: Union[str, Dict, None], grid: TorusGrid, m: int = 2) -> PotentialSpec:
    """
    Parse a potential: None or "zero", "ball:0.1,1.0", "inverse_square:0.05",
    {"builtin": "gaussian", "params": [c, sigma]} or {"file": "V.npy"}.
    """
    if spec is None or spec == "zero":
        return zero_potential(grid, m)
    if isinstance(spec, str):
        name, _, args = spec.partition(":")
        if name.endswith(".npy"):
            return from_npy(grid, spec, m)
        try:
            params = [float(a) for a in args.split(",")] if args else []
        except ValueError as exc:
            raise ConfigError(f"malformed potential {spec!r}") from exc
        spec = {"builtin": name, "params": params}
    if not isinstance(spec, dict):
        raise ConfigError(f"potential must be a string or object, got {type(spec).__name__}")
    if "file" in spec:
        return from_npy(grid, spec["file"], m)
    name = spec.get("builtin")
    if name not in POTENTIALS:
        raise ConfigError(f"unknown potential {name!r}; known: {sorted(set(POTENTIALS))}")
    try:
        return POTENTIALS[name](grid, *spec.get("params", []), m=m)
    except TypeError as exc:
        raise ConfigError(f"bad parameters for potential {name!r}: {exc}") from exc


# ==================== SMALLNESS ====================

def kato_kernel(grid: TorusGrid, m: int) -> np.ndarray:
    """|x|^(m-n) in the minimum-image metric, origin cell averaged"""
    r = grid.radius()
    power = m - grid.n
    kernel = np.zeros(grid.shape)
    away = r > 0
    kernel[away] = r[away] ** power
    kernel[(0,) * grid.n] = _origin_cell_average(grid, power)
    return kernel


def smallness_functional(V: PotentialSpec, n: int, m: int, c0: Optional[float] = None) -> Smallness:
    """||V||_{n/m} plus sup_y sum_x V(x) |x - y|^(m-n) h^n (the latter only for n > m)"""
    c0 = config.SMALLNESS_C0 if c0 is None else c0
    values = np.asarray(V.values, dtype=float)
    if np.any(values < 0):
        raise DomainError("potential must be nonnegative")
    grid = V.grid
    r = n / m
    if r >= 1:
        Lnm = lp_norm(values, r, grid.cell_volume)
    else:
        # quasi-norm below 1
        Lnm = float(np.sum(values ** r) * grid.cell_volume) ** (1.0 / r)
    kato = None
    if n > m:
        kernel = kato_kernel(grid, m)
        conv = np.fft.ifftn(np.fft.fftn(values) * np.fft.fftn(kernel)).real * grid.cell_volume
        kato = float(max(conv.max(), 0.0))
    else:
        logger.debug("smallness: kato_like term not applicable for n=%d <= m=%d", n, m)
    return Smallness(float(Lnm), kato, c0)


# ==================== OPERATORS ====================

class PerturbedOperator:
    """H = P(D) + V, matrix-free or dense with a cached eigendecomposition"""

    def __init__(self, P: SymbolPoly, V: PotentialSpec, mode: str = "matrix_free"):
        if mode not in ("matrix_free", "dense"):
            raise DomainError(f"mode must be 'matrix_free' or 'dense', got {mode!r}")
        if P.n != V.grid.n:
            raise DomainError(f"symbol dimension {P.n} does not match grid dimension {V.grid.n}")
        self.P = P
        self.V = V
        self.grid = V.grid
        self.mode = mode
        self.lam = lattice_values(P, self.grid)
        self._lock = threading.Lock()
        self._matrix: Optional[np.ndarray] = None
        self._eigen: Optional[Tuple[np.ndarray, np.ndarray]] = None
        if mode == "dense" and self.grid.size > config.DENSE_CAP:
            raise GridCapError(f"dense mode needs N^n <= {config.DENSE_CAP}, got {self.grid.size}")

    @property
    def free(self) -> GridOperator:
        return GridOperator.multiplier(self.grid, self.lam, "H0")

    def apply(self, f: np.ndarray) -> np.ndarray:
        f = np.asarray(f, dtype=complex).ravel()
        return self.free.apply_flat(f) + self.V.flat * f

    # ==================== DENSE MODE ====================

    def _require_dense(self):
        if self.mode != "dense":
            raise DomainError("operation needs dense mode")

    @property
    def matrix(self) -> np.ndarray:
        self._require_dense()
        with self._lock:
            if self._matrix is None:
                H = materialize(self.free).matrix + np.diag(self.V.flat)
                asym = float(np.max(np.abs(H - H.conj().T)))
                if asym > 1e-12 * max(1.0, float(np.max(np.abs(H)))):
                    raise ConvergenceError(f"dense H is not Hermitian (asymmetry {asym:.2e})")
                self._matrix = 0.5 * (H + H.conj().T)
        return self._matrix

    def eigen(self) -> Tuple[np.ndarray, np.ndarray]:
        """(eigenvalues ascending, orthonormal eigenvectors); built once, then read-only"""
        H = self.matrix
        with self._lock:
            if self._eigen is None:
                evals, evecs = scipy.linalg.eigh(H)
                evals.setflags(write=False)
                evecs.setflags(write=False)
                self._eigen = (evals, evecs)
                logger.debug("eigendecomposition of size %d: spectrum [%.4g, %.4g]",
                             len(evals), evals[0], evals[-1])
        return self._eigen

    def min_eigenvalue(self) -> float:
        return float(self.eigen()[0][0])

    def function(self, values: np.ndarray) -> np.ndarray:
        """U diag(values) U* for values sampled on the eigenvalues"""
        _, U = self.eigen()
        return (U * np.asarray(values)) @ U.conj().T

    def resolvent_matrix(self, z: complex) -> np.ndarray:
        evals, _ = self.eigen()
        return self.function(1.0 / (evals - z))

    def solve(self, z: complex, f: np.ndarray) -> np.ndarray:
        """(H - z)^-1 f by a dense linear solve"""
        H = self.matrix
        return scipy.linalg.solve(H - z * np.eye(H.shape[0]), np.asarray(f, dtype=complex).ravel())

    def to_operator(self, matrix: np.ndarray, label: str = "") -> GridOperator:
        return GridOperator.dense(self.grid, matrix, label)


def form_positivity(Pop: PerturbedOperator, tol: float = 1e-10) -> Tuple[float, bool]:
    lowest = Pop.min_eigenvalue()
    return lowest, lowest >= -tol


# ==================== NEUMANN SERIES ====================

@dataclass
class NeumannInverse:
    """Applies R_H(z) f = R0(z) sum_k (-V R0(z))^k f"""
    Pop: PerturbedOperator
    z: complex
    gate: float
    gate_measured: float
    gate_majorant: float
    k_max: int
    tol: float
    terms_used: int = 0
    residuals: List[float] = field(default_factory=list)

    def _r0(self) -> GridOperator:
        return fractional_resolvent(self.Pop.P, ResolventSpec(self.z), self.Pop.grid)

    def series(self, f: np.ndarray) -> np.ndarray:
        """(I + V R0)^-1 f; residual k is ||(I + V R0) S_k f - f||_2 / ||f||_2"""
        f = np.asarray(f, dtype=complex).ravel()
        scale = float(np.linalg.norm(f)) or 1.0
        r0 = self._r0()
        V = self.Pop.V.flat
        total = f.copy()
        term = f
        self.residuals = []
        for k in range(self.k_max + 1):
            term = -V * r0.apply_flat(term)
            residual = float(np.linalg.norm(term)) / scale
            self.residuals.append(residual)
            if residual <= self.tol:
                self.terms_used = k
                return total
            total = total + term
        raise ConvergenceError(
            f"Neumann series residual {self.residuals[-1]:.3e} > {self.tol} after {self.k_max} terms"
        )

    def __call__(self, f: np.ndarray) -> np.ndarray:
        return self._r0().apply_flat(self.series(f))

    def to_json(self) -> Dict:
        return {"z": [self.z.real, self.z.imag], "gate": self.gate, "gate_measured": self.gate_measured,
                "gate_majorant": self.gate_majorant, "terms_used": self.terms_used,
                "final_residual": self.residuals[-1] if self.residuals else None}


def gate_estimate(Pop: PerturbedOperator, z: complex, p: float = 2.0,
                  seed: Optional[int] = None) -> Tuple[float, float]:
    """
    (measured lower bound of ||V R0(z)||_{p->p}, Holder majorant ||V||_r ||R0(z)||_{p->q}).

    The majorant uses 1/q = 1/p - m/n with r = n/m when that q exists, otherwise r = inf, q = p.
    """
    grid, V = Pop.grid, Pop.V
    if V.is_zero:
        return 0.0, 0.0
    r0 = fractional_resolvent(Pop.P, ResolventSpec(z), grid)
    r0_adj = r0.adjoint()
    Vf = V.flat

    measured = lower_bound(lambda x: Vf * r0.apply_flat(x), lambda y: r0_adj.apply_flat(Vf * y),
                           p, p, grid.size, seed=seed, cell_volume=grid.cell_volume)
    inv_q = 1.0 / p - Pop.P.m / grid.n
    if inv_q > 0 and grid.n > Pop.P.m:
        q, r = 1.0 / inv_q, grid.n / Pop.P.m
    else:
        q, r = p, math.inf
    majorant = lp_norm(V.values, r, grid.cell_volume) * r0.norm_lower_bound(p, q, seed=seed)
    return float(measured), float(majorant)


def neumann_inverse(Pop: PerturbedOperator, z: complex, p_for_gate: float = 2.0,
                    k_max: Optional[int] = None, tol: Optional[float] = None,
                    seed: Optional[int] = None) -> NeumannInverse:
    """Perturbed resolvent by the Born series, refused unless the gate is below 1"""
    k_max = config.NEUMANN_MAX_TERMS if k_max is None else k_max
    tol = config.NEUMANN_TOL if tol is None else tol
    z = complex(z)
    measured, majorant = gate_estimate(Pop, z, p_for_gate, seed)
    gate = max(measured, majorant)
    if gate >= 1:
        raise GateRefusedError(
            f"gate ||V R0(z)||_{{p->p}} = {gate:.4g} >= 1 at z={z} (measured {measured:.4g}, "
            f"majorant {majorant:.4g}); series not justified"
        )
    logger.info("neumann z=%s: gate %.4g (measured %.4g, majorant %.4g)", z, gate, measured, majorant)
    return NeumannInverse(Pop, z, gate, measured, majorant, k_max, tol)


# ==================== STONE DENSITY ====================

def _check_eps(eps: float):
    if not eps > 0:
        raise DomainError(f"eps must be positive on a discrete spectrum (atoms), got {eps}")


def stone_density(Pop: PerturbedOperator, lam: float, eps: float, f: np.ndarray) -> float:
    """(1/pi) Im <R_H(lambda + i eps) f, f>"""
    _check_eps(eps)
    f = np.asarray(f, dtype=complex).ravel()
    u = Pop.solve(complex(lam, eps), f)
    return float(np.vdot(f, u).imag / np.pi)


def poisson_density(Pop: PerturbedOperator, lam, eps: float, f: np.ndarray) -> np.ndarray:
    """sum_j (eps/pi) / ((lambda - lambda_j)^2 + eps^2) |<f, e_j>|^2 from the eigendecomposition"""
    _check_eps(eps)
    evals, U = Pop.eigen()
    weights = np.abs(U.conj().T @ np.asarray(f, dtype=complex).ravel()) ** 2
    lam = np.atleast_1d(np.asarray(lam, dtype=float))
    kernel = (eps / np.pi) / ((lam[:, None] - evals[None, :]) ** 2 + eps ** 2)
    return kernel @ weights


def stone_total_mass(Pop: PerturbedOperator, eps: float, f: np.ndarray) -> float:
    """Quadrature of the Poisson-smoothed density over the real line"""
    evals, _ = Pop.eigen()
    a, b = float(evals[0]) - 1.0, float(evals[-1]) + 1.0

    def density(x):
        return float(poisson_density(Pop, x, eps, f)[0])

    points = np.unique(evals)
    if len(points) > 45:
        points = np.linspace(a, b, 45)
    inner, _ = quad(density, a, b, points=points, limit=2000, epsabs=1e-12, epsrel=1e-10)
    left, _ = quad(density, -np.inf, a, epsabs=1e-13)
    right, _ = quad(density, b, np.inf, epsabs=1e-13)
    return float(inner + left + right)


# ==================== RESTRICTION SWEEPS ====================

def _windowed_projector(Pop: PerturbedOperator, lam: float, width: float) -> Tuple[GridOperator, int]:
    """E_H([lambda, lambda(1 + width)]) / (lambda width) and its occupancy"""
    a, b = lam, lam * (1 + width)
    if Pop.V.is_zero:
        inside = (Pop.lam >= a) & (Pop.lam <= b)
        op = GridOperator.multiplier(Pop.grid, inside / (lam * width), f"dE({lam:g})")
        return op, int(np.count_nonzero(inside))
    Pop._require_dense()
    evals, _ = Pop.eigen()
    inside = (evals >= a) & (evals <= b)
    op = Pop.to_operator(Pop.function(inside / (lam * width)), f"dE_H({lam:g})")
    return op, int(np.count_nonzero(inside))


def _window_occupancy(Pop: PerturbedOperator, lam: float, width: float) -> int:
    values = Pop.lam.ravel() if Pop.V.is_zero else Pop.eigen()[0]
    return int(np.count_nonzero((values >= lam) & (values <= lam * (1 + width))))


def _gap_centred(values: np.ndarray, lam: float, width: float, shift: float = 0.05,
                 candidates: int = 41) -> float:
    """lambda within +-shift (relative) whose window edges lambda, lambda(1 + width) sit furthest from lattice values"""
    trial = lam * (1 + np.linspace(-shift, shift, candidates))

    def clearance(edge):
        slot = np.clip(np.searchsorted(values, edge), 1, len(values) - 1)
        return np.minimum(np.abs(edge - values[slot - 1]), np.abs(values[slot] - edge))

    worst = np.minimum(clearance(trial), clearance(trial * (1 + width)))
    best = np.flatnonzero(worst >= worst.max() * (1 - 1e-12))
    return float(trial[best[np.argmin(np.abs(best - candidates // 2))]])


def restriction_lambda_list(P: SymbolPoly, grid: TorusGrid, width: float = 0.1, points: int = 6,
                            decades: float = 1.0, max_width: float = 1.0) -> Tuple[List[float], float]:
    """
    Default lambda list and window width for a restriction sweep.

    The top window stays below 3/4 of the Nyquist frequency. When the bottom of the
    decade leaves fewer than WINDOW_OCCUPANCY_MARGIN * MIN_WINDOW_POINTS lattice values
    in a window, the width grows by 1.5x up to max_width. Each lambda is then nudged
    (by at most 5%) so that both window edges sit mid-gap between lattice values, which
    keeps window counts stable under small perturbations of the spectrum.
    """
    lattice = lattice_values(P, grid).ravel()
    values = np.unique(lattice)
    nyquist = np.pi / grid.spacing
    needed = int(math.ceil(config.WINDOW_OCCUPANCY_MARGIN * config.MIN_WINDOW_POINTS))
    w = width
    while True:
        top = min((0.75 * nyquist) ** P.m, 0.95 * nyquist ** P.m / (1 + w))
        # nudges of up to 5% either way must not shrink the span below the decades asked for
        bottom = top / 10 ** decades * 0.95 / 1.05
        lams = [_gap_centred(values, lam, w) for lam in np.geomspace(bottom, top, points)]
        counts = [int(np.count_nonzero((lattice >= lam) & (lattice <= lam * (1 + w)))) for lam in lams]
        if min(counts) >= needed:
            break
        if w >= max_width:
            raise SparseWindowError(
                f"width {w:.3g}: windows hold {min(counts)} lattice points (< {needed}); enlarge L or N"
            )
        w = min(w * 1.5, max_width)
    if w != width:
        logger.info("restriction_lambda_list: widened windows from %.3g to %.3g", width, w)
    return lams, w


def restriction_sweep(Pop: PerturbedOperator, p: float, lambda_list: Sequence[float],
                      window_rel_width: float = 0.1, seed: Optional[int] = None,
                      threads: Optional[int] = None) -> ScalingReport:
    """p->p' norms of windowed spectral projectors against (n/m)(1/p - 1/p') - 1"""
    n, m = Pop.grid.n, Pop.P.m
    p_dual = dual_exponent(p)
    if not Pop.V.is_zero and n > m:
        allowed = perturbed_restriction_range(n, m)
        if not allowed.contains(Fraction(p).limit_denominator(1000)):
            raise DomainError(f"p = {p} outside the perturbed restriction range {allowed}")
    occupancy = {lam: _window_occupancy(Pop, lam, window_rel_width) for lam in lambda_list}
    sparse = {lam: c for lam, c in occupancy.items() if c < config.MIN_WINDOW_POINTS}
    if sparse:
        raise SparseWindowError(f"windows below {config.MIN_WINDOW_POINTS} points: {sparse}")

    def measure(lam: float) -> Tuple[float, float]:
        op, _ = _windowed_projector(Pop, lam, window_rel_width)
        return lam, op.norm_lower_bound(p, p_dual, seed=seed)

    points = parallel_sweep(measure, list(lambda_list), threads=threads)
    predicted = float(predicted_exponent(n, m, exponent_point(p, p_dual), 1))
    report = fit_power_law(points, predicted, seed=seed, label=f"restriction p={p:g} V={Pop.V.name}")
    report.meta.update({"n": n, "m": m, "p": p, "potential": Pop.V.name, "width": window_rel_width,
                        "occupancy": [occupancy[lam] for lam in sorted(occupancy)],
                        "grid": Pop.grid.to_json()})
    return report


def restriction_stability(P: SymbolPoly, V: PotentialSpec, p: float, lambda_list: Sequence[float],
                          window_rel_width: float = 0.1, seed: Optional[int] = None,
                          threads: Optional[int] = None) -> Dict:
    """Paired V = 0 / V sweeps; the slopes should differ by less than 0.1"""
    free = restriction_sweep(PerturbedOperator(P, zero_potential(V.grid, V.m)), p, lambda_list,
                             window_rel_width, seed, threads)
    perturbed = restriction_sweep(PerturbedOperator(P, V, "dense"), p, lambda_list, window_rel_width,
                                  seed, threads)
    shift = abs(perturbed.slope - free.slope)
    return {"free": free, "perturbed": perturbed, "slope_shift": shift, "stable": shift < 0.1,
            "smallness": V.smallness.to_json()}


def perturbed_resolvent_sweep(Pop: PerturbedOperator, p: float, z_list: Sequence[complex],
                              seed: Optional[int] = None, threads: Optional[int] = None) -> ScalingReport:
    """||R_H(z)||_{p->p'} lower bounds against |z|^{(n/m)(1/p - 1/p') - 1}; uniform on the Sobolev line"""
    Pop._require_dense()
    n, m = Pop.grid.n, Pop.P.m
    p_dual = dual_exponent(p)
    point = exponent_point(p, p_dual)

    def measure(z: complex) -> Tuple[float, float]:
        op = Pop.to_operator(Pop.resolvent_matrix(complex(z)))
        return abs(z), op.norm_lower_bound(p, p_dual, seed=seed)

    points = parallel_sweep(measure, [complex(z) for z in z_list], key=lambda z: (abs(z), np.angle(z)),
                            threads=threads)
    predicted = float(predicted_exponent(n, m, point, 1))
    report = fit_power_law(points, predicted, seed=seed, label=f"perturbed resolvent p={p:g}")
    on_line = point.gap == Fraction(m, n)
    report.meta.update({"n": n, "m": m, "p": p, "potential": Pop.V.name, "on_sobolev_line": on_line,
                        "grid": Pop.grid.to_json()})
    if on_line:
        report.ratio_only = True
        report.judge()
    return report


def resolvent_power_sweep(Pop: PerturbedOperator, p: float, q: float, t_list: Sequence[float],
                          seed: Optional[int] = None, threads: Optional[int] = None) -> ScalingReport:
    """||(I + tH)^-1||_{p->q} against t^{-(n/m)(1/p - 1/q)}"""
    n, m = Pop.grid.n, Pop.P.m
    point = exponent_point(p, q)
    if not (0 <= point.gap < Fraction(m, n)):
        raise DomainError(f"need 0 <= 1/p - 1/q < m/n, got {point.gap}")

    def measure(t: float) -> Tuple[float, float]:
        if Pop.V.is_zero:
            op = GridOperator.multiplier(Pop.grid, 1.0 / (1.0 + t * Pop.lam), f"(I+{t:g}H)^-1")
        else:
            evals, _ = Pop.eigen()
            op = Pop.to_operator(Pop.function(1.0 / (1.0 + t * evals)))
        return t, op.norm_lower_bound(p, q, seed=seed)

    points = parallel_sweep(measure, list(t_list), threads=threads)
    predicted = -float(Fraction(n, m) * point.gap)
    report = fit_power_law(points, predicted, seed=seed, label=f"resolvent power p={p:g} q={q:g}")
    report.meta.update({"n": n, "m": m, "p": p, "q": q, "potential": Pop.V.name})
    return report


# ==================== DAVIES-GAFFNEY ====================

@dataclass
class DaviesGaffneyFit:
    """log ||P_B1 e^{-tH} P_B2|| = log C - c (d / t^(1/m))^(m/(m-1))"""
    c: float
    C: float
    r2: float
    points: List[Tuple[float, float]]
    excluded: int = 0
    near: int = 0

    def to_json(self) -> Dict:
        return {"c": self.c, "C": self.C, "r2": self.r2, "points": len(self.points),
                "excluded": self.excluded, "near": self.near}


def heat_matrix(Pop: PerturbedOperator, t: float) -> np.ndarray:
    evals, _ = Pop.eigen()
    return Pop.function(np.exp(-t * evals))


def ball_block_norm(Pop: PerturbedOperator, heat: np.ndarray, x: Sequence[int], y: Sequence[int],
                    radius: float) -> float:
    """Largest singular value of the B(x, r) x B(y, r) block of e^{-tH}"""
    rows = (Pop.grid.distance_from(x) <= radius).ravel()
    cols = (Pop.grid.distance_from(y) <= radius).ravel()
    block = heat[np.ix_(rows, cols)]
    return float(scipy.linalg.svdvals(block)[0])


def davies_gaffney_defaults(Pop: PerturbedOperator, points: int = 4, offsets: int = 10,
                            floor: Optional[float] = None) -> Tuple[List[float], List[Tuple[Tuple, Tuple]]]:
    """
    t list and ball pairs that the heat blocks resolve.

    The smallest ball radius r = t^(1/m) has exp(-t lambda_max) <= floor^2 and covers
    at least two grid cells; radii run over one octave. Centres sit on the first axis
    from 3 r_min out to L/4.
    """
    floor = config.HEAT_FLOOR if floor is None else floor
    grid, m = Pop.grid, Pop.P.m
    top = float(np.max(Pop.lam))
    r_min = max((2 * math.log(1 / floor) / top) ** (1.0 / m), 2 * grid.spacing)
    t_list = [float(r ** m) for r in np.geomspace(r_min, 2 * r_min, points)]
    steps = np.unique(np.round(np.geomspace(3 * r_min, grid.L / 4, offsets) / grid.spacing).astype(int))
    origin = (0,) * grid.n
    ball_pairs = [(origin, (int(k),) + (0,) * (grid.n - 1)) for k in steps if 0 < k < grid.N]
    return t_list, ball_pairs


def davies_gaffney_fit(Pop: PerturbedOperator, t_list: Sequence[float],
                       ball_pairs: Sequence[Tuple[Sequence[int], Sequence[int]]],
                       radius_rule: Optional[Callable[[float], float]] = None,
                       floor: Optional[float] = None) -> DaviesGaffneyFit:
    """
    Linear fit of log-norms of ball-localized heat blocks against the off-diagonal abscissa.

    Refuses t whose top eigenvalue still contributes exp(-t lambda_max) above the floor,
    since such blocks plateau on the unresolved lattice tail. Pairs with d <= 3r are
    dropped (the balls nearly touch) as are norms at or below the floor.
    """
    Pop._require_dense()
    floor = config.HEAT_FLOOR if floor is None else floor
    m, grid = Pop.P.m, Pop.grid
    radius_rule = (lambda t: t ** (1.0 / m)) if radius_rule is None else radius_rule
    top = float(Pop.eigen()[0].max())
    unresolved = [t for t in t_list if math.exp(-t * top) > floor]
    if unresolved:
        raise DomainError(
            f"t = {unresolved} leave exp(-t lambda_max) above the floor {floor:g} "
            f"(lambda_max = {top:.4g}); need t >= {math.log(1 / floor) / top:.4g}"
        )
    samples, near = [], 0
    for t in t_list:
        r = radius_rule(t)
        if r > grid.L / 4:
            raise DomainError(f"ball radius {r:.4g} exceeds L/4 = {grid.L / 4:.4g}; periodization bias")
        heat = heat_matrix(Pop, t)
        for x, y in ball_pairs:
            d = float(grid.distance_from(x)[tuple(y)])
            if d <= 3 * r:
                near += 1
                continue
            abscissa = (d / t ** (1.0 / m)) ** (m / (m - 1))
            samples.append((abscissa, ball_block_norm(Pop, heat, x, y, r)))

    kept = [(a, v) for a, v in samples if v > floor]
    if not kept:
        raise ConvergenceError("all Davies-Gaffney norms at floor precision; increase t or move balls closer")
    if len(kept) < 3:
        raise ConvergenceError(f"only {len(kept)} Davies-Gaffney norms above the floor")
    a = np.array([s[0] for s in kept])
    y = np.log([s[1] for s in kept])
    design = np.vstack([a, np.ones_like(a)]).T
    (slope, intercept), *_ = np.linalg.lstsq(design, y, rcond=None)
    fitted = slope * a + intercept
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - float(np.sum((y - fitted) ** 2)) / ss_tot if ss_tot > 0 else 1.0
    if slope >= 0:
        raise ConvergenceError(f"Davies-Gaffney fit has no off-diagonal decay: c = {-slope:.4g}, r2 = {r2:.4f}")
    fit = DaviesGaffneyFit(c=float(-slope), C=float(math.exp(intercept)), r2=r2, points=kept,
                           excluded=len(samples) - len(kept), near=near)
    logger.info("davies-gaffney m=%d: c=%.4f C=%.4g r2=%.4f", m, fit.c, fit.C, fit.r2)
    return fit


# ==================== INVERSE-SQUARE POTENTIAL ====================

def hardy_constant(p: float) -> float:
    """K(p) = p^2 / (3 (3 - 2p)(p - 1)) for 1 < p < 3/2"""
    if not (1 < p < 1.5):
        raise DomainError(f"need 1 < p < 3/2 (pole of K(p)), got {p}")
    return p * p / (3 * (3 - 2 * p) * (p - 1))


def hardy_critical_exponent(n: int, c: float) -> Tuple[float, float]:
    """(sigma, n / sigma) with sigma = max((n-2)/2 - sqrt((n-2)^2/4 + c), 0)"""
    threshold = -((n - 2) ** 2) / 4
    if c <= threshold:
        raise DomainError(f"coupling c must exceed -(n-2)^2/4 = {threshold}, got {c}")
    sigma = max((n - 2) / 2 - math.sqrt((n - 2) ** 2 / 4 + c), 0.0)
    return sigma, (n / sigma if sigma > 0 else math.inf)


def inverse_square_scenario(c_coupling: float, p: float, grid: TorusGrid,
                            z_list: Sequence[complex] = (-1.0, 1j, -1 + 1j),
                            lambda_list: Optional[Sequence[float]] = None,
                            tolerance: float = 0.1, seed: Optional[int] = None) -> Dict:
    """Gate lower bounds of |x|^-2-type potentials against c K(p), then a restriction sweep if small"""
    if grid.n != 3:
        raise DomainError(f"inverse-square scenario needs n = 3, got {grid.n}")
    K = hardy_constant(p)
    P = laplacian_pow_k(3, 1)
    V = inverse_square(grid, c_coupling)
    Pop = PerturbedOperator(P, V)
    gates = {}
    for z in z_list:
        measured, _ = gate_estimate(Pop, complex(z), p, seed)
        gates[complex(z)] = measured
    bound = c_coupling * K * (1 + tolerance)
    report = {
        "c": c_coupling,
        "p": p,
        "K": K,
        "majorant": c_coupling * K,
        "gates": [{"z": [z.real, z.imag], "lower_bound": g} for z, g in gates.items()],
        "below_majorant": all(g <= bound for g in gates.values()),
        "sigma_p_star": hardy_critical_exponent(3, c_coupling),
        "restriction": None,
    }
    worst = max(gates.values()) if gates else 0.0
    if lambda_list and worst < 0.5 and 1.2 <= p <= 4 / 3 + 1e-12:
        if not V.is_zero and grid.size > config.DENSE_CAP:
            report["restriction"] = f"skipped: grid size {grid.size} above the dense cap"
            return report
        mode = "matrix_free" if V.is_zero else "dense"
        sweep = restriction_sweep(PerturbedOperator(P, V, mode), p, lambda_list, seed=seed)
        report["restriction"] = sweep.to_summary()
    return report


# ==================== INVARIANTS ====================

def resolvent_identity_check(Pop: PerturbedOperator, z1: complex, z2: complex) -> float:
    """max |R(z1) - R(z2) - (z1 - z2) R(z1) R(z2)| relative to max |R(z1) - R(z2)|"""
    R1 = Pop.resolvent_matrix(z1)
    R2 = Pop.resolvent_matrix(z2)
    diff = R1 - R2
    residual = diff - (z1 - z2) * (R1 @ R2)
    return float(np.max(np.abs(residual)) / max(float(np.max(np.abs(diff))), 1e-300))


def form_monotonicity_check(P: SymbolPoly, V_small: PotentialSpec, V_large: PotentialSpec,
                            tol: float = 1e-10) -> Tuple[float, bool]:
    """Pointwise larger V never lowers any eigenvalue; returns (min shift, ok)"""
    if np.any(V_small.values > V_large.values):
        raise DomainError("potentials are not nested pointwise")
    low = PerturbedOperator(P, V_small, "dense").eigen()[0]
    high = PerturbedOperator(P, V_large, "dense").eigen()[0]
    shift = float(np.min(high - low))
    return shift, shift >= -tol


def neumann_dense_discrepancy(Pop: PerturbedOperator, z: complex, f: np.ndarray, **kwargs) -> Dict:
    """Series application against a dense solve of (H - z) u = f"""
    inverse = neumann_inverse(Pop, z, **kwargs)
    series = inverse(f)
    dense = PerturbedOperator(Pop.P, Pop.V, "dense").solve(complex(z), f)
    error = float(np.max(np.abs(series - dense)) / max(float(np.max(np.abs(dense))), 1e-300))
    return {"error": error, **inverse.to_json()}
