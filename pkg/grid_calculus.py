"""
Grid Calculus
Periodic discretization of P(D): Fourier diagonalization, functional calculus F(L),
Bochner-Riesz means of any order > -1, spectral windows and dense materialization
"""

import logging
import math
import struct
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Callable, Dict, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.special import gamma

import config
from errors import DomainError, GridCapError, OutputError, SingularMultiplierError, SparseWindowError
from norm_metrics import ScalingReport, fit_power_law, lower_bound, lp_norm
from symbol import SymbolPoly, lattice_values

logger = logging.getLogger(__name__)

FIELD_MAGIC = b"SPLB"
FIELD_HEADER = struct.Struct("<4sii4xd8x")  # 32 bytes


# ==================== GRID ====================

@dataclass(frozen=True)
class TorusGrid:
    """n-dimensional periodic box of side L with N points per axis"""
    n: int
    N: int
    L: float

    def __post_init__(self):
        if self.n < 1:
            raise DomainError(f"dimension must be >= 1, got {self.n}")
        if self.N < 2 or self.N & (self.N - 1):
            raise DomainError(f"points per axis must be a power of two, got {self.N}")
        if not self.L > 0:
            raise DomainError(f"box side must be positive, got {self.L}")

    @property
    def shape(self) -> Tuple[int, ...]:
        return (self.N,) * self.n

    @property
    def size(self) -> int:
        return self.N ** self.n

    @property
    def spacing(self) -> float:
        return self.L / self.N

    @property
    def cell_volume(self) -> float:
        return self.spacing ** self.n

    @property
    def frequency_spacing(self) -> float:
        return 2 * np.pi / self.L

    def frequencies_1d(self) -> np.ndarray:
        """(2 pi / L) k, k in {-N/2, ..., N/2 - 1}, in FFT order"""
        return 2 * np.pi * np.fft.fftfreq(self.N, d=self.spacing)

    def frequency_mesh(self) -> np.ndarray:
        axes = [self.frequencies_1d()] * self.n
        return np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1)

    def positions_1d(self) -> np.ndarray:
        """Minimum-image coordinates of the grid points, in storage order"""
        j = np.arange(self.N)
        return ((j + self.N // 2) % self.N - self.N // 2) * self.spacing

    def position_mesh(self) -> np.ndarray:
        axes = [self.positions_1d()] * self.n
        return np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1)

    def distance_from(self, index: Sequence[int]) -> np.ndarray:
        """Minimum-image distance of every grid point to the point at index"""
        index = np.asarray(index)
        j = np.indices(self.shape)
        diff = (j - index.reshape((self.n,) + (1,) * self.n)) % self.N
        diff = np.minimum(diff, self.N - diff) * self.spacing
        return np.sqrt(np.sum(diff ** 2, axis=0))

    def radius(self) -> np.ndarray:
        return self.distance_from([0] * self.n)

    def refined(self, factor: int = 2) -> "TorusGrid":
        """Scale N and L together; the low-frequency lattice is unchanged"""
        return TorusGrid(self.n, self.N * factor, self.L * factor)

    def to_json(self) -> Dict:
        return {"n": self.n, "N": self.N, "L": self.L}


# ==================== FIELDS ====================

@dataclass(frozen=True)
class GridField:
    """Complex physical-space samples on a torus grid"""
    grid: TorusGrid
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=complex)
        if values.size != self.grid.size:
            raise DomainError(f"field has {values.size} samples, grid needs {self.grid.size}")
        object.__setattr__(self, "values", values.reshape(self.grid.shape))

    @classmethod
    def delta(cls, grid: TorusGrid, index: Optional[Sequence[int]] = None) -> "GridField":
        values = np.zeros(grid.shape, dtype=complex)
        values[tuple(index) if index is not None else (0,) * grid.n] = 1.0
        return cls(grid, values)

    @classmethod
    def random(cls, grid: TorusGrid, seed: Optional[int] = None) -> "GridField":
        rng = np.random.default_rng(config.SEED if seed is None else seed)
        return cls(grid, rng.standard_normal(grid.shape) + 1j * rng.standard_normal(grid.shape))

    @classmethod
    def plane_wave(cls, grid: TorusGrid, k: Sequence[int]) -> "GridField":
        """Single Fourier mode exp(i xi_k . x), unit l2 norm"""
        x = np.indices(grid.shape) * grid.spacing
        xi = 2 * np.pi / grid.L * np.asarray(k, dtype=float)
        phase = np.tensordot(xi, x, axes=1)
        return cls(grid, np.exp(1j * phase) / math.sqrt(grid.size))

    def fourier(self) -> np.ndarray:
        """Unitary DFT"""
        return np.fft.fftn(self.values, norm="ortho")

    @classmethod
    def from_fourier(cls, grid: TorusGrid, coefficients: np.ndarray) -> "GridField":
        return cls(grid, np.fft.ifftn(coefficients, norm="ortho"))

    @property
    def flat(self) -> np.ndarray:
        return self.values.ravel()

    def l2(self) -> float:
        return float(np.linalg.norm(self.values))

    def norm(self, p: float) -> float:
        return lp_norm(self.values, p, self.grid.cell_volume)

    def inner(self, other: "GridField") -> complex:
        return complex(np.vdot(other.values, self.values))


def save_field(f: GridField, path: Union[str, Path]) -> Path:
    """Little-endian complex64 dump behind a 32-byte {magic, n, N, L} header"""
    path = Path(path)
    try:
        with open(path, "wb") as fh:
            fh.write(FIELD_HEADER.pack(FIELD_MAGIC, f.grid.n, f.grid.N, float(f.grid.L)))
            fh.write(f.values.astype("<c8").tobytes())
    except OSError as exc:
        raise OutputError(f"cannot write field dump {path}: {exc}") from exc
    return path


def load_field(path: Union[str, Path]) -> GridField:
    path = Path(path)
    raw = path.read_bytes()
    if len(raw) < FIELD_HEADER.size:
        raise DomainError(f"{path} is too short for a field dump")
    magic, n, N, L = FIELD_HEADER.unpack_from(raw)
    if magic != FIELD_MAGIC:
        raise DomainError(f"{path} has bad magic {magic!r}")
    grid = TorusGrid(n, N, L)
    values = np.frombuffer(raw, dtype="<c8", offset=FIELD_HEADER.size)
    return GridField(grid, values.astype(complex))


# ==================== MULTIPLIERS ====================

def smooth_step(x: np.ndarray) -> np.ndarray:
    """C-infinity step: 0 for x <= 0, 1 for x >= 1"""
    x = np.asarray(x, dtype=float)
    def bump(t):
        out = np.zeros_like(t)
        pos = t > 0
        out[pos] = np.exp(-1.0 / t[pos])
        return out
    a = bump(x)
    b = bump(1 - x)
    return a / (a + b)


def smooth_plateau(x: np.ndarray, outer: Tuple[float, float], inner: Tuple[float, float]) -> np.ndarray:
    """1 on [inner], 0 outside (outer), smooth in between"""
    x = np.asarray(x, dtype=float)
    (a_out, b_out), (a_in, b_in) = outer, inner
    if not (a_out < a_in <= b_in < b_out):
        raise DomainError(f"need outer {outer} to strictly contain inner {inner}")
    return smooth_step((x - a_out) / (a_in - a_out)) * smooth_step((b_out - x) / (b_out - b_in))


@dataclass(frozen=True)
class MultiplierFn:
    """Closed-form scalar map lambda -> F(lambda)"""
    name: str
    func: Callable[[np.ndarray], np.ndarray]
    params: Dict = field(default_factory=dict)

    def __call__(self, lam) -> np.ndarray:
        return self.func(np.asarray(lam, dtype=float))

    def __mul__(self, other: "MultiplierFn") -> "MultiplierFn":
        return MultiplierFn(f"{self.name}*{other.name}", lambda lam: self(lam) * other(lam),
                            {"left": self.params, "right": other.params})

    def conj(self) -> "MultiplierFn":
        return MultiplierFn(f"conj({self.name})", lambda lam: np.conj(self(lam)), self.params)


def positive_power(x: np.ndarray, alpha: float, eps: Optional[float] = None) -> np.ndarray:
    """x_+^alpha, or its eps-regularized boundary-value form for negative alpha"""
    x = np.asarray(x, dtype=float)
    if alpha >= 0 or eps is None:
        out = np.zeros_like(x)
        pos = x > 0
        out[pos] = x[pos] ** alpha
        if alpha == 0:
            out[x == 0] = 1.0
        elif alpha < 0 and np.any(x == 0):
            raise SingularMultiplierError(
                f"(x)_+^{alpha} is singular at x = 0; use the eps-regularized mode"
            )
        return out
    if float(alpha).is_integer():
        raise DomainError(f"eps regularization needs non-integer alpha, got {alpha}")
    # x_+^a = Im(e^{i pi a} (x - i eps)^a) / sin(pi a)
    boundary = np.exp(1j * np.pi * alpha) * np.power(x - 1j * eps + 0j, alpha)
    return boundary.imag / np.sin(np.pi * alpha)


def bochner_riesz(R: float, alpha: float, m: Optional[int] = None, eps: Optional[float] = None,
                  width: Optional[float] = None) -> MultiplierFn:
    """
    (1 - s)_+^alpha / Gamma(alpha + 1) with s = lambda / R, or s = lambda^(1/m) / R
    for the m-th root variant. alpha = -1 is the normalized window 1_{[1-d, 1]}(s) / d.
    """
    if not R > 0:
        raise DomainError(f"radius must be positive, got {R}")
    if alpha < -1:
        raise DomainError(f"Bochner-Riesz order must be >= -1, got {alpha}")

    def scaled(lam):
        lam = np.maximum(lam, 0.0)
        return (lam ** (1.0 / m) if m else lam) / R

    if alpha == -1:
        width = config.ALPHA_MINUS_ONE_WIDTH if width is None else width

        def window(lam):
            s = scaled(lam)
            return ((s >= 1 - width) & (s <= 1)).astype(float) / width

        return MultiplierFn("bochner_riesz", window, {"R": R, "alpha": alpha, "m": m, "width": width})

    norm = gamma(alpha + 1)

    def func(lam):
        return positive_power(1 - scaled(lam), alpha, eps) / norm

    return MultiplierFn("bochner_riesz", func, {"R": R, "alpha": alpha, "m": m, "eps": eps})


def spectral_window(a: float, b: float) -> MultiplierFn:
    if b < a:
        raise DomainError(f"empty window [{a}, {b}]")
    return MultiplierFn("spectral_window", lambda lam: ((lam >= a) & (lam <= b)).astype(float),
                        {"a": a, "b": b})


def resolvent(z: complex, alpha: float = 1.0) -> MultiplierFn:
    """(lambda - z)^(-alpha), principal branch"""
    return MultiplierFn("resolvent", lambda lam: np.power(lam - z + 0j, -alpha),
                        {"z": complex(z), "alpha": alpha})


def heat(t: float, m: int = 1) -> MultiplierFn:
    """exp(-t^m lambda)"""
    return MultiplierFn("heat", lambda lam: np.exp(-(t ** m) * lam), {"t": t, "m": m})


def cutoff(outer: Tuple[float, float], inner: Tuple[float, float], root: Optional[int] = None) -> MultiplierFn:
    """Smooth bump in lambda (or in lambda^(1/root))"""
    def func(lam):
        s = np.maximum(lam, 0.0) ** (1.0 / root) if root else lam
        return smooth_plateau(s, outer, inner)
    return MultiplierFn("cutoff", func, {"outer": outer, "inner": inner, "root": root})


def psi_cutoff(root: Optional[int] = None) -> MultiplierFn:
    """psi = 1 on [-2, 2], supported in [-4, 4]"""
    return cutoff((-4.0, 4.0), (-2.0, 2.0), root)


def phi_cutoff() -> MultiplierFn:
    """phi = 1 on [-1/2, 3/2]"""
    return cutoff((-1.0, 2.0), (-0.5, 1.5))


# ==================== OPERATORS ====================

class OperatorKind(Enum):
    FOURIER = "FourierMultiplier"
    DENSE = "DenseMatrix"


@dataclass(frozen=True)
class GridOperator:
    """Operator on a torus grid, diagonal in frequency or a dense matrix"""
    kind: OperatorKind
    grid: TorusGrid
    symbol: Optional[np.ndarray] = None
    matrix: Optional[np.ndarray] = None
    label: str = ""

    @classmethod
    def multiplier(cls, grid: TorusGrid, symbol: np.ndarray, label: str = "") -> "GridOperator":
        symbol = np.asarray(symbol, dtype=complex).reshape(grid.shape)
        return cls(OperatorKind.FOURIER, grid, symbol=symbol, label=label)

    @classmethod
    def dense(cls, grid: TorusGrid, matrix: np.ndarray, label: str = "") -> "GridOperator":
        matrix = np.asarray(matrix, dtype=complex)
        if matrix.shape != (grid.size, grid.size):
            raise DomainError(f"matrix shape {matrix.shape} does not match grid size {grid.size}")
        return cls(OperatorKind.DENSE, grid, matrix=matrix, label=label)

    def apply_flat(self, v: np.ndarray) -> np.ndarray:
        v = np.asarray(v, dtype=complex)
        if self.kind is OperatorKind.DENSE:
            return self.matrix @ v.ravel()
        spectrum = np.fft.fftn(v.reshape(self.grid.shape))
        return np.fft.ifftn(self.symbol * spectrum).ravel()

    def apply(self, f: GridField) -> GridField:
        return GridField(self.grid, self.apply_flat(f.values))

    def adjoint(self) -> "GridOperator":
        if self.kind is OperatorKind.DENSE:
            return GridOperator.dense(self.grid, self.matrix.conj().T, f"{self.label}*")
        return GridOperator.multiplier(self.grid, np.conj(self.symbol), f"{self.label}*")

    def __add__(self, other: "GridOperator") -> "GridOperator":
        if self.kind is OperatorKind.FOURIER and other.kind is OperatorKind.FOURIER:
            return GridOperator.multiplier(self.grid, self.symbol + other.symbol, f"{self.label}+{other.label}")
        return GridOperator.dense(self.grid, materialize(self).matrix + materialize(other).matrix)

    def __sub__(self, other: "GridOperator") -> "GridOperator":
        if self.kind is OperatorKind.FOURIER and other.kind is OperatorKind.FOURIER:
            return GridOperator.multiplier(self.grid, self.symbol - other.symbol, f"{self.label}-{other.label}")
        return GridOperator.dense(self.grid, materialize(self).matrix - materialize(other).matrix)

    def __matmul__(self, other: "GridOperator") -> "GridOperator":
        if self.kind is OperatorKind.FOURIER and other.kind is OperatorKind.FOURIER:
            return GridOperator.multiplier(self.grid, self.symbol * other.symbol, f"{self.label}@{other.label}")
        return GridOperator.dense(self.grid, materialize(self).matrix @ materialize(other).matrix)

    def scaled(self, c: complex) -> "GridOperator":
        if self.kind is OperatorKind.FOURIER:
            return GridOperator.multiplier(self.grid, c * self.symbol, self.label)
        return GridOperator.dense(self.grid, c * self.matrix, self.label)

    def closures(self) -> Tuple[Callable, Callable]:
        """(apply, adjoint_apply) on flat vectors, for norm measurement"""
        adj = self.adjoint()
        return self.apply_flat, adj.apply_flat

    def l2_norm(self) -> float:
        if self.kind is OperatorKind.FOURIER:
            return float(np.abs(self.symbol).max())
        return float(np.linalg.norm(self.matrix, 2))

    def norm_lower_bound(self, p: float, q: float, seed: Optional[int] = None, **kwargs) -> float:
        """p->q lower bound; exact for p = 1, q = inf and (2, 2)"""
        if p == 2 and q == 2:
            return self.l2_norm()
        apply, adjoint_apply = self.closures()
        matrix = self.matrix if self.kind is OperatorKind.DENSE else None
        if p == 1 and self.kind is OperatorKind.FOURIER:
            # translation invariant: every column has the same l^q norm
            column = self.apply_flat(GridField.delta(self.grid).values / self.grid.cell_volume)
            return lp_norm(column, q, self.grid.cell_volume)
        return lower_bound(apply, adjoint_apply, p, q, self.grid.size, seed=seed,
                           cell_volume=self.grid.cell_volume, matrix=matrix, **kwargs)


def apply_multiplier(F: MultiplierFn, P: SymbolPoly, f: GridField) -> GridField:
    """Inverse transform of F(P(xi_k)) f^(xi_k)"""
    return multiplier_op(F, P, f.grid).apply(f)


def multiplier_op(F: MultiplierFn, P: SymbolPoly, grid: TorusGrid) -> GridOperator:
    lam = lattice_values(P, grid)
    symbol = np.asarray(F(lam), dtype=complex)
    if not np.all(np.isfinite(symbol)):
        bad = lam[~np.isfinite(symbol)]
        raise SingularMultiplierError(
            f"{F.name} is singular at lattice value {bad.ravel()[0]:.6g}; "
            "use the eps-regularized mode"
        )
    return GridOperator.multiplier(grid, symbol, F.name)


def lattice_occupancy(P: SymbolPoly, grid: TorusGrid, a: float, b: float) -> int:
    """Number of lattice P-values in [a, b]"""
    lam = lattice_values(P, grid)
    return int(np.count_nonzero((lam >= a) & (lam <= b)))


def require_occupancy(P: SymbolPoly, grid: TorusGrid, a: float, b: float,
                      minimum: Optional[int] = None) -> int:
    minimum = config.MIN_WINDOW_POINTS if minimum is None else minimum
    count = lattice_occupancy(P, grid, a, b)
    if count < minimum:
        raise SparseWindowError(f"window [{a:.4g}, {b:.4g}] holds {count} lattice points (< {minimum})")
    return count


def local_spacing(values: np.ndarray, center: float, band: float) -> float:
    """Median gap of the distinct sorted values within center*(1 +- band)"""
    values = np.unique(np.asarray(values, dtype=float).ravel())
    near = values[(values >= center * (1 - band)) & (values <= center * (1 + band))]
    if near.size < 2:
        # fall back to the two nearest values
        order = np.argsort(np.abs(values - center))
        near = np.sort(values[order[:3]])
    gaps = np.diff(near)
    gaps = gaps[gaps > 0]
    if gaps.size == 0:
        raise SparseWindowError(f"no distinct lattice values near {center:.4g}")
    return float(np.median(gaps))


def bochner_riesz_op(R: float, alpha: float, P: SymbolPoly, grid: TorusGrid,
                     mode: str = "eps", eps: Optional[float] = None,
                     variant: str = "root", width: Optional[float] = None) -> GridOperator:
    """
    S_R^alpha as a Fourier multiplier.

    variant "root" uses (1 - P^(1/m)/R)_+^alpha, variant "L" uses (1 - P/R^m)_+^alpha.
    In "eps" mode negative non-integer orders use the boundary-value regularization with
    eps defaulting to half the local lattice spacing near the sphere; "direct" refuses
    lattice points that land exactly on it.
    """
    if mode not in ("eps", "direct"):
        raise DomainError(f"mode must be 'eps' or 'direct', got {mode!r}")
    if variant not in ("root", "L"):
        raise DomainError(f"variant must be 'root' or 'L', got {variant!r}")
    if alpha < -1:
        raise DomainError(f"Bochner-Riesz order must be >= -1, got {alpha}")

    root = P.m if variant == "root" else None
    radius = R if variant == "root" else R ** P.m

    use_eps = mode == "eps" and -1 < alpha < 0
    if use_eps and eps is None:
        lam = lattice_values(P, grid)
        s = (lam ** (1.0 / P.m) if root else lam) / radius
        eps = 0.5 * local_spacing(s, 1.0, config.BOUNDARY_EPS_BAND)
        logger.debug("bochner_riesz_op: eps = %.3e from local spacing", eps)
    F = bochner_riesz(radius, alpha, m=root, eps=eps if use_eps else None, width=width)
    op = multiplier_op(F, P, grid)
    return GridOperator.multiplier(grid, op.symbol, f"S_{R}^{alpha}")


@dataclass
class EquivalenceReport:
    alpha: float
    m: int
    samples: int
    max_abs_error: float
    max_rel_error: float
    passed: bool


def equivalence_factor(s: np.ndarray, m: int, alpha: float) -> np.ndarray:
    """(1 + sum_{k=1}^{m-1} s^{k/m})^alpha phi(s)"""
    s = np.asarray(s, dtype=float)
    root = np.maximum(s, 0.0) ** (1.0 / m)
    total = 1 + sum(root ** k for k in range(1, m))
    return total ** alpha * phi_cutoff()(s)


WINDOW_EQUIVALENCE_N = {1: 65536, 2: 512, 3: 64}


def window_equivalence(R: float, P: SymbolPoly, grid: Optional[TorusGrid] = None,
                       width: Optional[float] = None, radii: int = 16) -> EquivalenceReport:
    """
    Normalized S^-1 windows from P and from P^(1/m) on the grid.

    delta(1 - s) = delta(1 - s^(1/m)) / m, so the lattice mass of the window in
    P / R^m should be 1/m times the mass of the window in P^(1/m) / R, up to
    O(m width) from the finite widths. Masses are summed over radii in
    [R, 1.5 R) to average out lattice counting noise. The default grid puts the
    sphere of radius 1.5 R at 3/4 of the Nyquist frequency.
    """
    m = P.m
    width = config.ALPHA_MINUS_ONE_WIDTH if width is None else width
    if grid is None:
        N = WINDOW_EQUIVALENCE_N.get(P.n, 32)
        grid = TorusGrid(P.n, N, np.pi * N / (2 * R))
    L_mass = root_mass = 0.0
    for Rj in R * (1 + 0.5 * np.arange(radii) / radii):
        L_window = bochner_riesz_op(Rj, -1, P, grid, variant="L", width=width)
        root_window = bochner_riesz_op(Rj, -1, P, grid, variant="root", width=width)
        L_mass += float(L_window.symbol.real.sum())
        root_mass += float(root_window.symbol.real.sum()) / m
    if L_mass == 0 or root_mass == 0:
        raise SparseWindowError(f"S^-1 windows of width {width} near R = {R} hold no lattice points")
    gap = abs(L_mass - root_mass)
    rel = gap / root_mass
    logger.debug("window_equivalence m=%d: masses %.6g vs %.6g (rel %.3e)", m, L_mass, root_mass, rel)
    return EquivalenceReport(alpha=-1.0, m=m, samples=radii, max_abs_error=gap / radii,
                             max_rel_error=rel, passed=rel <= 2 * m * width)


def equivalence_L_vs_root(R: float, alpha: float, P: SymbolPoly, grid: Optional[TorusGrid] = None,
                          samples: int = 10_000, tol: float = 1e-12) -> EquivalenceReport:
    """
    Check (1 - s)_+^a = (1 - s^(1/m))_+^a (1 + sum s^(k/m))^a phi(s) pointwise.

    alpha = -1 has no pointwise identity; the two normalized windows are compared
    on the grid instead (window_equivalence).
    """
    if alpha < -1:
        raise DomainError(f"order must be >= -1, got {alpha}")
    if alpha == -1:
        return window_equivalence(R, P, grid)
    m = P.m
    s_values = [np.linspace(0.0, 1.5, samples, endpoint=False)]
    if grid is not None:
        s_values.append(lattice_values(P, grid).ravel() / R ** m)
    s = np.concatenate(s_values)
    s = s[s != 1.0]

    lhs = positive_power(1 - s, alpha)
    rhs = positive_power(1 - np.maximum(s, 0.0) ** (1.0 / m), alpha) * equivalence_factor(s, m, alpha)

    err = np.abs(lhs - rhs)
    scale = np.maximum(np.abs(lhs), 1e-300)
    # rounding in 1 - s^(1/m) is amplified by 1/(1 - s) near the sphere
    condition = np.maximum(1.0, 1.0 / np.maximum(np.abs(1 - s), 1e-300))
    rel = np.where(lhs != 0, err / scale, err)
    passed = bool(np.all(err <= tol * np.maximum(np.abs(lhs), 1.0) * condition))
    return EquivalenceReport(alpha=alpha, m=m, samples=len(s), max_abs_error=float(err.max()),
                             max_rel_error=float(rel.max()), passed=passed)


def materialize(op: GridOperator, cap: Optional[int] = None) -> GridOperator:
    """Dense matrix whose columns are op applied to unit vectors (kernel times cell volume)"""
    cap = config.DENSE_CAP if cap is None else cap
    if op.kind is OperatorKind.DENSE:
        return op
    size = op.grid.size
    if size > cap:
        raise GridCapError(f"grid size {size} exceeds the dense cap {cap}")
    axes = tuple(range(1, op.grid.n + 1))
    basis = np.eye(size, dtype=complex).reshape((size,) + op.grid.shape)
    columns = np.fft.ifftn(op.symbol * np.fft.fftn(basis, axes=axes), axes=axes)
    return GridOperator.dense(op.grid, columns.reshape(size, size).T, op.label)


def convolution_kernel(op: GridOperator) -> Tuple[np.ndarray, np.ndarray]:
    """Physical kernel K(x) = column at the origin / cell volume, with minimum-image radii"""
    grid = op.grid
    column = op.apply_flat(GridField.delta(grid).values).reshape(grid.shape)
    return grid.radius(), column / grid.cell_volume


# ==================== SCALING CHECKS ====================

def generalized_gaussian_check(P: SymbolPoly, grid: TorusGrid, p: float, t_list: Sequence[float],
                               seed: Optional[int] = None) -> ScalingReport:
    """||exp(-t^m L)||_{p->2} over t against t^(-n(1/p - 1/2))"""
    # exp(-t^m L) has kernel width t, which must be resolved and not periodized
    low, high = 4 * grid.L / grid.N, grid.L / 4
    for t in t_list:
        if not (low <= t <= high):
            raise DomainError(f"t = {t} outside the resolved scale band [{low:.4g}, {high:.4g}]")
    points = []
    for t in t_list:
        op = multiplier_op(heat(t, P.m), P, grid)
        points.append((t, op.norm_lower_bound(p, 2.0, seed=seed)))
    predicted = -grid.n * (1.0 / p - 0.5)
    report = fit_power_law(points, predicted, seed=seed, label=f"gaussian p={p}")
    report.meta.update({"p": p, "grid": grid.to_json()})
    return report


def multiplier_scaling_sweep(F, P: SymbolPoly, grid: TorusGrid, R_list: Sequence[float],
                             nu: float = 1.0, seed: Optional[int] = None) -> ScalingReport:
    """
    ||F(L^(1/m)/R)||_{1->inf} over R, normalized by R^n ||F||_{WS^{nu,1}}.

    F is a SampledFn supported in (0, inf); the ratio should stay bounded.
    """
    from weyl_calculus import ws_norm

    ws = ws_norm(F, nu).total
    lam = lattice_values(P, grid)
    root = np.maximum(lam, 0.0) ** (1.0 / P.m)
    points, ratios = [], []
    for R in sorted(R_list):
        support = (root >= F.a * R) & (root <= F.b * R)
        count = int(np.count_nonzero(support))
        if count < config.MIN_WINDOW_POINTS:
            raise SparseWindowError(f"R = {R}: {count} lattice points under the multiplier support")
        symbol = F.interpolate(root / R)
        op = GridOperator.multiplier(grid, symbol, f"F(L/{R})")
        value = op.norm_lower_bound(1.0, math.inf, seed=seed)
        points.append((R, value))
        ratios.append(value / (R ** grid.n * ws))
    report = fit_power_law(points, float(grid.n), seed=seed, label="multiplier scaling")
    ratios = np.array(ratios)
    report.meta.update({
        "ws_norm": ws,
        "nu": nu,
        "ratio_max_over_min": float(ratios.max() / ratios.min()),
        "ratio_bounded": bool(ratios.max() / ratios.min() < 3.0),
    })
    return report
