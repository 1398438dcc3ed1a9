"""
Resolvent Lab
Free resolvents (P(D) - z)^-alpha on the torus: kernel splits and decay fits,
uniform Sobolev sweeps and negative-order Bochner-Riesz sweeps
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd
from scipy.special import erfc, erfcx, gamma

import config
from errors import ConvergenceError, DomainError, SingularMultiplierError
from grid_calculus import (
    GridOperator,
    TorusGrid,
    bochner_riesz_op,
    convolution_kernel,
    local_spacing,
    multiplier_op,
    positive_power,
    psi_cutoff,
    resolvent,
    smooth_plateau,
)
from norm_metrics import ScalingReport, Verdict, fit_power_law
from region_calc import ExponentPoint, as_rational, krs_admissible, predicted_exponent
from symbol import SymbolPoly, laplacian_pow_k, lattice_values
from weyl_calculus import jump_combination, jump_identity_resolve, richardson

logger = logging.getLogger(__name__)

SpectralParam = Union[complex, float, "ResolventSpec"]


def parallel_sweep(func: Callable, params: Sequence, key: Callable = None,
                   threads: Optional[int] = None) -> List:
    """Run func over params on the worker pool; results come back sorted by key(param)"""
    params = list(params)
    threads = config.THREADS if threads is None else threads
    workers = max(1, min(threads, len(params)))
    with ThreadPoolExecutor(max_workers=workers) as pool:
        results = list(pool.map(func, params))
    order = sorted(range(len(params)), key=lambda i: key(params[i]) if key else params[i])
    return [results[i] for i in order]


def exponent_point(p: float, q: float) -> ExponentPoint:
    """Reciprocal pair from float exponents, limited to small denominators"""
    def inverse(x):
        if math.isinf(x):
            return Fraction(0)
        return Fraction(1.0 / x).limit_denominator(1000)
    return ExponentPoint(inverse(p), inverse(q))


# ==================== SPECTRAL PARAMETER ====================

class HalfPlane(Enum):
    UPPER = "upper"
    LOWER = "lower"


@dataclass(frozen=True)
class ResolventSpec:
    """
    Spectral parameter z with power alpha.

    With a half-plane tag the spec stands for the boundary value lambda +- i0,
    realized as lambda +- i eps.
    """
    z: complex
    alpha: float = 1.0
    eps: Optional[float] = None
    half_plane: Optional[HalfPlane] = None

    def __post_init__(self):
        object.__setattr__(self, "z", complex(self.z))
        if self.alpha < 0:
            raise DomainError(f"resolvent power must be >= 0, got {self.alpha}; use bochner_riesz_op")
        if abs(self.z) == 0:
            raise DomainError("spectral parameter must be nonzero")
        if self.half_plane is not None:
            plane = HalfPlane(self.half_plane)
            object.__setattr__(self, "half_plane", plane)
            if self.eps is None or not self.eps > 0:
                raise DomainError(f"boundary mode needs eps > 0, got {self.eps}")
            sign = 1 if plane is HalfPlane.UPPER else -1
            if self.z.imag * sign < 0:
                raise DomainError(f"Im z = {self.z.imag} conflicts with the {plane.value} half-plane tag")

    @classmethod
    def boundary(cls, lam: float, eps: float, alpha: float = 1.0, upper: bool = True) -> "ResolventSpec":
        return cls(complex(lam), alpha, eps, HalfPlane.UPPER if upper else HalfPlane.LOWER)

    @property
    def is_boundary(self) -> bool:
        return self.half_plane is not None

    @property
    def value(self) -> complex:
        if self.half_plane is None:
            return self.z
        sign = 1 if self.half_plane is HalfPlane.UPPER else -1
        return complex(self.z.real, sign * self.eps)

    def conjugate(self) -> "ResolventSpec":
        if self.half_plane is None:
            return ResolventSpec(self.z.conjugate(), self.alpha)
        other = HalfPlane.LOWER if self.half_plane is HalfPlane.UPPER else HalfPlane.UPPER
        return ResolventSpec(self.z.conjugate(), self.alpha, self.eps, other)

    def to_json(self) -> Dict:
        return {
            "z": [self.z.real, self.z.imag],
            "alpha": self.alpha,
            "eps": self.eps,
            "half_plane": self.half_plane.value if self.half_plane else None,
        }


def _as_spec(z: SpectralParam, alpha: float = 1.0) -> ResolventSpec:
    return z if isinstance(z, ResolventSpec) else ResolventSpec(complex(z), alpha)


# ==================== RESOLVENT OPERATORS ====================

def fractional_resolvent(P: SymbolPoly, spec: ResolventSpec, grid: TorusGrid) -> GridOperator:
    """Fourier multiplier (P(xi) - z)^-alpha, principal branch"""
    with np.errstate(divide="ignore", invalid="ignore"):
        op = multiplier_op(resolvent(spec.value, spec.alpha), P, grid)
    return GridOperator.multiplier(grid, op.symbol, f"R0({spec.value:.4g})^{spec.alpha:g}")


def boundary_eps(P: SymbolPoly, grid: TorusGrid, lam: float) -> float:
    """eps = factor * median gap of lattice P-values within the relative band around lambda"""
    if not lam > 0:
        raise DomainError(f"lambda must be positive, got {lam}")
    gap = local_spacing(lattice_values(P, grid), lam, config.BOUNDARY_EPS_BAND)
    return config.BOUNDARY_EPS_FACTOR * gap


def k1_k2_split(P: SymbolPoly, spec: ResolventSpec, grid: TorusGrid,
                psi=None) -> Tuple[GridOperator, GridOperator]:
    """K1 = psi(P^(1/m)) (P - z)^-alpha and its complement K2, for |z| near 1"""
    if abs(abs(spec.value) ** (1.0 / P.m) - 1.0) > 0.25:
        raise DomainError(f"k1_k2_split expects |z| near 1, got {abs(spec.value):.6g}; rescale first")
    psi = psi_cutoff(root=P.m) if psi is None else psi
    full = fractional_resolvent(P, spec, grid)
    weight = psi(lattice_values(P, grid))
    K1 = GridOperator.multiplier(grid, weight * full.symbol, "K1")
    K2 = GridOperator.multiplier(grid, full.symbol - K1.symbol, "K2")
    return K1, K2


# ==================== KERNEL PROFILES ====================

@dataclass
class KernelProfile:
    """Radial envelope of |K(x)| and its fitted power-law decay"""
    radii: np.ndarray
    envelope: np.ndarray
    r_min: float
    r_max: float
    exponent: float
    stderr: float
    r2: float
    predicted: Optional[float] = None
    meta: Dict = field(default_factory=dict)

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({"radius": self.radii, "envelope": self.envelope})

    def to_summary(self) -> Dict:
        return {
            "exponent": self.exponent,
            "stderr": self.stderr,
            "r2": self.r2,
            "predicted": self.predicted,
            "window": [self.r_min, self.r_max],
            **self.meta,
        }

    def dump(self) -> str:
        rows = ", ".join(f"{r:.3g}:{e:.3e}" for r, e in zip(self.radii, self.envelope))
        return f"profile [{rows}]"


def default_window(grid: TorusGrid) -> Tuple[float, float]:
    """(4L/N, L/4) shrunk by 5% at both ends"""
    low, high = 4 * grid.L / grid.N, grid.L / 4
    if low >= high:
        raise DomainError(f"grid N={grid.N} too coarse for a kernel fit window")
    return low * 1.05, high * 0.95


def radial_profile(radii: np.ndarray, values: np.ndarray, r_min: float, r_max: float,
                   bins: int = 12) -> Tuple[np.ndarray, np.ndarray]:
    """Max |K| in log-spaced shells; the maximum tracks the envelope of oscillating kernels"""
    edges = np.geomspace(r_min, r_max, bins + 1)
    radii = np.asarray(radii).ravel()
    mags = np.abs(np.asarray(values)).ravel()
    centres, envelope = [], []
    for lo, hi in zip(edges[:-1], edges[1:]):
        shell = (radii >= lo) & (radii < hi)
        if np.any(shell):
            centres.append(math.sqrt(lo * hi))
            envelope.append(float(mags[shell].max()))
    return np.array(centres), np.array(envelope)


def fit_kernel_profile(radii: np.ndarray, values: np.ndarray, grid: TorusGrid,
                       window: Optional[Tuple[float, float]] = None, bins: int = 12,
                       predicted: Optional[float] = None, r2_floor: float = 0.8) -> KernelProfile:
    low, high = 4 * grid.L / grid.N, grid.L / 4
    r_min, r_max = window if window is not None else default_window(grid)
    if not (low < r_min < r_max < high):
        raise DomainError(f"fit window [{r_min:.4g}, {r_max:.4g}] not inside ({low:.4g}, {high:.4g})")
    centres, envelope = radial_profile(radii, values, r_min, r_max, bins)
    if len(centres) < 3 or np.any(envelope <= 0):
        raise ConvergenceError(f"kernel profile too sparse in [{r_min:.4g}, {r_max:.4g}]")
    report = fit_power_law(list(zip(centres, envelope)), predicted, tolerance=0.25,
                           r2_floor=r2_floor, min_points=3, min_decades=0.0, label="kernel decay")
    profile = KernelProfile(centres, envelope, r_min, r_max, report.slope, report.stderr,
                            report.r2, predicted)
    if report.r2 < r2_floor:
        raise ConvergenceError(f"kernel decay fit r2={report.r2:.3f} < {r2_floor}; {profile.dump()}")
    return profile


def damping_rate(spec: ResolventSpec, m: int) -> float:
    """Im zeta for the root zeta = z^(1/m) nearest the positive axis"""
    return abs((spec.value ** (1.0 / m)).imag)


def k1_decay_fit(P: SymbolPoly, spec: ResolventSpec, grid: TorusGrid,
                 window: Optional[Tuple[float, float]] = None, bins: int = 12,
                 damping_budget: float = 2.0) -> KernelProfile:
    """
    Envelope decay of |K1(x)| against -(n+1)/2 + alpha.

    The eps damping exp(-Im zeta |x|) is divided out before binning; the budget
    caps Im zeta * r_max so that the compensation stays well conditioned.
    """
    r_min, r_max = window if window is not None else default_window(grid)
    rate = damping_rate(spec, P.m)
    if rate * r_max > damping_budget:
        raise DomainError(
            f"eps too large: damping Im zeta = {rate:.3g} gives Im zeta * r_max = {rate * r_max:.3g} "
            f"> {damping_budget}"
        )
    K1, _ = k1_k2_split(P, spec, grid)
    radii, kernel = convolution_kernel(K1)
    undamped = kernel * np.exp(rate * radii)
    predicted = -(grid.n + 1) / 2 + spec.alpha
    profile = fit_kernel_profile(radii, undamped, grid, (r_min, r_max), bins, predicted)
    profile.meta.update({"n": grid.n, "m": P.m, "alpha": spec.alpha, "damping": rate,
                         "within_tolerance": abs(profile.exponent - predicted) <= 0.25})
    logger.info("K1 decay n=%d alpha=%s: exponent %.3f (predicted %.3f)",
                grid.n, spec.alpha, profile.exponent, predicted)
    return profile


def nyquist_rolloff(grid: TorusGrid) -> np.ndarray:
    """1 for |xi| <= K/2, 0 for |xi| >= K with K the Nyquist frequency; smooth in between"""
    nyquist = np.pi / grid.spacing
    xi = np.linalg.norm(grid.frequency_mesh(), axis=-1)
    return smooth_plateau(xi / nyquist, (-1.0, 1.0), (-0.5, 0.5))


def k2_decay_fit(P: SymbolPoly, spec: ResolventSpec, grid: TorusGrid,
                 window: Optional[Tuple[float, float]] = None, bins: int = 6) -> KernelProfile:
    """
    K2 is smooth in frequency, so its kernel decays faster than any power.

    The lattice cuts K2 off at the Nyquist cube, which would leave an algebraic
    tail; the symbol is rolled off smoothly before the kernel is taken.
    """
    _, K2 = k1_k2_split(P, spec, grid)
    rolled = GridOperator.multiplier(grid, K2.symbol * nyquist_rolloff(grid), "K2 rolled off")
    radii, kernel = convolution_kernel(rolled)
    profile = fit_kernel_profile(radii, kernel, grid, window, bins, r2_floor=0.0)
    bound = -(grid.n + 2.0)
    profile.meta.update({"n": grid.n, "m": P.m, "alpha": spec.alpha, "fast_decay_bound": bound,
                         "fast_decay": profile.exponent <= bound})
    logger.info("K2 decay n=%d: exponent %.3f (bound %.3f)", grid.n, profile.exponent, bound)
    return profile


def k1_near_origin_sup(P: SymbolPoly, spec: ResolventSpec, grid: TorusGrid, radius: float = 1.0) -> float:
    K1, _ = k1_k2_split(P, spec, grid)
    radii, kernel = convolution_kernel(K1)
    return float(np.abs(kernel[radii <= radius]).max())


def k1_near_origin_stability(P: SymbolPoly, grid: TorusGrid, eps: float, radius: float = 1.0,
                             alpha: float = 1.0) -> Dict:
    """
    sup_{|x| <= radius} |K1| at z = (1 + i eps)^m and at eps / 2.

    The torus only stands in for R^n when the periodic images are damped, i.e.
    Im zeta * L >= IMAGE_DAMPING_MIN at the smaller eps.
    """
    if not eps > 0:
        raise DomainError(f"eps must be positive, got {eps}")
    half = eps / 2
    if half * grid.L < config.IMAGE_DAMPING_MIN:
        raise DomainError(
            f"Im zeta * L = {half * grid.L:.3g} < {config.IMAGE_DAMPING_MIN} at eps/2; "
            "periodic images are not damped, enlarge L"
        )
    sups = [k1_near_origin_sup(P, ResolventSpec(complex(1.0, e) ** P.m, alpha), grid, radius)
            for e in (eps, half)]
    change = abs(sups[1] - sups[0]) / sups[0]
    return {"eps": eps, "sup": sups[0], "sup_half": sups[1], "relative_change": change,
            "stable": change < 0.05}


# ==================== HELMHOLTZ ORACLE ====================

def _is_laplacian(P: SymbolPoly, n: int) -> bool:
    reference = laplacian_pow_k(n, 1)
    return P.n == n and P.m == 2 and sorted(P.terms) == sorted(reference.terms)


def helmholtz_zeta(z: complex) -> complex:
    """sqrt(z) with Im >= 0"""
    zeta = complex(np.sqrt(complex(z)))
    return -zeta if zeta.imag < 0 else zeta


def closed_form_helmholtz_3d(z: complex, P: Optional[SymbolPoly] = None, n: int = 3,
                             smoothing: float = 0.0) -> Callable:
    """
    x -> exp(i zeta |x|) / (4 pi |x|), the kernel of (-Delta - z)^-1 on R^3.

    With smoothing = sigma > 0 the kernel is convolved with the Gaussian whose
    Fourier transform is exp(-sigma^2 |xi|^2 / 2), which is the kernel of the
    symbol exp(-sigma^2 |xi|^2 / 2) / (|xi|^2 - z).
    """
    if n != 3:
        raise DomainError(f"closed-form Helmholtz kernel needs n = 3, got {n}")
    if P is not None and not _is_laplacian(P, 3):
        raise DomainError(f"closed-form Helmholtz kernel needs P = |xi|^2, got {P.name or P.terms}")
    if smoothing < 0:
        raise DomainError(f"smoothing width must be >= 0, got {smoothing}")
    zeta = helmholtz_zeta(z)
    if zeta.imag == 0 and z != 0:
        raise DomainError("closed form needs Im zeta != 0; use a boundary spec with eps > 0")

    def kernel(r):
        r = np.asarray(r, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.exp(1j * zeta * r) / (4 * np.pi * r)

    if smoothing == 0:
        return kernel

    kappa = -1j * zeta
    sigma = smoothing
    root2 = math.sqrt(2.0) * sigma

    def smoothed(r):
        r = np.asarray(r, dtype=float)
        near = np.exp(kappa ** 2 * sigma ** 2 / 2 - kappa * r) * erfc((kappa * sigma ** 2 - r) / root2)
        far = np.exp(-r ** 2 / (2 * sigma ** 2)) * erfcx((kappa * sigma ** 2 + r) / root2)
        with np.errstate(divide="ignore", invalid="ignore"):
            return (near - far) / (8 * np.pi * r)

    return smoothed


def periodized_helmholtz(z: complex, grid: TorusGrid, images: Optional[int] = None,
                         smoothing: float = 0.0) -> Tuple[np.ndarray, float]:
    """
    Image sum of the closed-form kernel over (2 images + 1)^3 periods.

    Returns the kernel on the grid (nan at the origin) and the magnitude of the
    outermost image shell as a truncation residual.
    """
    images = config.IMAGE_SUM_RANGE if images is None else images
    if grid.n != 3:
        raise DomainError(f"periodized Helmholtz kernel needs n = 3, got {grid.n}")
    kernel = closed_form_helmholtz_3d(z, smoothing=smoothing)
    x = grid.position_mesh()
    total = np.zeros(grid.shape, dtype=complex)
    outer = np.zeros(grid.shape, dtype=complex)
    shifts = range(-images, images + 1)
    for k in np.array(np.meshgrid(shifts, shifts, shifts, indexing="ij")).reshape(3, -1).T:
        r = np.linalg.norm(x + grid.L * k, axis=-1)
        contribution = kernel(r)
        total += contribution
        if np.max(np.abs(k)) == images and images > 0:
            outer += contribution
    origin = (0,) * grid.n
    total[origin] = np.nan
    outer[origin] = 0.0
    return total, float(np.nanmax(np.abs(outer)))


def helmholtz_discrepancy(z: complex, grid: TorusGrid, radius: Optional[float] = None,
                          taper: Optional[float] = None) -> Dict:
    """
    Relative gap between the grid resolvent kernel and the image-summed closed form at one radius.

    The lattice symbol stops at the Nyquist cube, an O(1/N) truncation no image sum
    can reproduce. Both sides therefore carry the Gaussian taper of width
    sigma = taper / K (K = pi / h): the grid symbol is multiplied by
    exp(-sigma^2 |xi|^2 / 2), whose mass beyond the cube is exp(-taper^2 / 2), and
    the closed form is smoothed by the same Gaussian. taper = 0 compares the raw
    kernels.
    """
    P = laplacian_pow_k(3, 1)
    taper = config.HELMHOLTZ_TAPER if taper is None else taper
    radius = grid.L / 8 if radius is None else radius
    index = int(round(radius / grid.spacing))
    sigma = taper * grid.spacing / np.pi
    op = fractional_resolvent(P, ResolventSpec(z), grid)
    weight = np.exp(-sigma ** 2 * lattice_values(P, grid) / 2)
    _, kernel = convolution_kernel(GridOperator.multiplier(grid, op.symbol * weight, "R0 tapered"))
    oracle, residual = periodized_helmholtz(z, grid, smoothing=sigma)
    point = (index,) + (0,) * (grid.n - 1)
    measured, expected = complex(kernel[point]), complex(oracle[point])
    return {
        "radius": index * grid.spacing,
        "grid_kernel": measured,
        "closed_form": expected,
        "relative_error": abs(measured - expected) / abs(expected),
        "image_residual": residual,
        "taper_width": sigma,
    }


# ==================== SWEEPS ====================

def _require_admissible(n: int, m: int, point: ExponentPoint, alpha) -> None:
    verdict = krs_admissible(n, m, point, alpha)
    if not verdict.admissible:
        raise DomainError(f"(1/p, 1/q) = {point} is not admissible for alpha={alpha}: {verdict.reason}")


def uniform_sobolev_sweep(P: SymbolPoly, grid: TorusGrid, p: float, q: float,
                          z_list: Sequence[SpectralParam], seed: Optional[int] = None,
                          check_admissible: bool = True, threads: Optional[int] = None) -> ScalingReport:
    """
    ||R0(z)||_{p->q} lower bounds over z, fitted in |z| against (n/m)(1/p - 1/q) - 1.

    On the Sobolev line the bound is uniform in z, so the verdict there is the
    max/min ratio alone.
    """
    n, m = grid.n, P.m
    point = exponent_point(p, q)
    if check_admissible:
        _require_admissible(n, m, point, 1)
    specs = [_as_spec(z) for z in z_list]

    def measure(spec: ResolventSpec) -> Tuple[float, float]:
        op = fractional_resolvent(P, spec, grid)
        return abs(spec.value), op.norm_lower_bound(p, q, seed=seed)

    points = parallel_sweep(measure, specs, key=lambda s: (abs(s.value), np.angle(s.value)), threads=threads)
    predicted = float(predicted_exponent(n, m, point, 1))
    on_line = point.gap == Fraction(m, n)
    report = fit_power_law(points, predicted, seed=seed, label=f"sobolev p={p:g} q={q:g}")
    report.meta.update({
        "n": n, "m": m, "p": p, "q": q,
        "on_sobolev_line": on_line,
        "ratio_max_over_min": report.max_over_min,
        "arguments": sorted({round(float(np.angle(s.value)), 6) for s in specs}),
        "grid": grid.to_json(),
    })
    if on_line:
        report.ratio_only = True
        report.meta["uniform"] = report.judge() is Verdict.PASS
    return report


def negative_order_symbol(lam_values: np.ndarray, lam: float, alpha: float, eps: float,
                          width: Optional[float] = None) -> np.ndarray:
    """chi_+^-alpha(lambda - P) = (lambda - P)_+^-alpha / Gamma(1 - alpha), eps-regularized"""
    x = lam - np.asarray(lam_values, dtype=float)
    if float(alpha).is_integer():
        if alpha != 1:
            raise DomainError(f"integer order -{alpha:g} is a derivative of delta, not a window")
        width = config.ALPHA_MINUS_ONE_WIDTH if width is None else width
        return ((x >= 0) & (x <= width * lam)).astype(float) / (width * lam)
    return positive_power(x, -alpha, eps) / gamma(1 - alpha)


def br_negative_sweep(P: SymbolPoly, grid: TorusGrid, alpha, p: float, q: float,
                      lambda_list: Sequence[float], eps: Optional[float] = None,
                      seed: Optional[int] = None, threads: Optional[int] = None) -> ScalingReport:
    """
    Lower bounds of ||chi_+^-alpha(lambda - H0)||_{p->q} against lambda^{(n/m)(1/p-1/q) - alpha}.

    The homogeneous form chi_+^-alpha(lambda - H0) equals lambda^-alpha times the
    normalized mean (1 - H0/lambda)_+^-alpha / Gamma(1 - alpha).
    """
    n, m = grid.n, P.m
    alpha_exact = as_rational(alpha) if not isinstance(alpha, float) else Fraction(alpha).limit_denominator(1000)
    point = exponent_point(p, q)
    if alpha_exact > 0:
        _require_admissible(n, m, point, alpha_exact)
    a = float(alpha_exact)
    lam_values = lattice_values(P, grid)
    positive = lam_values[lam_values > 0]
    floor = float(positive.min()) if positive.size else math.inf
    kept = [lam for lam in sorted(lambda_list) if lam > floor]
    excluded = [lam for lam in sorted(lambda_list) if lam <= floor]
    if excluded:
        logger.warning("br_negative_sweep: lambda %s below the first nonzero lattice value %.4g; "
                       "rank-deficient, excluded", excluded, floor)

    def measure(lam: float) -> Tuple[float, float]:
        if a == 0:
            symbol = (lam_values <= lam).astype(float)
        else:
            e = boundary_eps(P, grid, lam) if eps is None else eps * lam
            symbol = negative_order_symbol(lam_values, lam, a, e)
        op = GridOperator.multiplier(grid, symbol, f"S_{lam}^-{a:g}")
        return lam, op.norm_lower_bound(p, q, seed=seed)

    points = parallel_sweep(measure, kept, threads=threads)
    predicted = float(predicted_exponent(n, m, point, alpha_exact))
    report = fit_power_law(points, predicted, seed=seed, label=f"bochner-riesz -{a:g} p={p:g} q={q:g}")
    report.meta.update({"n": n, "m": m, "alpha": a, "p": p, "q": q, "excluded": excluded,
                        "grid": grid.to_json()})
    return report


# ==================== BOCHNER-RIESZ FROM RESOLVENT BOUNDARY VALUES ====================

def bochner_riesz_from_resolvents(P: SymbolPoly, grid: TorusGrid, alpha: float,
                                  eps_list: Sequence[float] = (4e-3, 2e-3, 1e-3)) -> GridOperator:
    """
    S_1^-alpha(H0) = Gamma(alpha) / (2 pi i) times the boundary-value combination of
    (1 - H0 +- i0)^-alpha, extrapolated to eps -> 0 from the last two eps values.
    """
    if not (0 < alpha < 1):
        raise DomainError(f"alpha must lie in (0, 1), got {alpha}")
    eps = sorted(eps_list, reverse=True)
    if len(eps) < 2:
        raise DomainError("need at least two eps values for the extrapolation")
    resolution = jump_identity_resolve(alpha)
    x = 1.0 - lattice_values(P, grid)
    samples = [jump_combination(alpha, x, e, resolution.phase_sign, resolution.placement_sign) for e in eps]
    limit = richardson(samples[-2], samples[-1], 1.0, eps[-2] / eps[-1])
    symbol = limit * gamma(alpha) / (2j * np.pi)
    if not np.all(np.isfinite(symbol)):
        raise SingularMultiplierError("boundary combination is singular on the lattice")
    return GridOperator.multiplier(grid, symbol, f"S_1^-{alpha:g} (resolvents)")


def resolvent_br_discrepancy(P: SymbolPoly, grid: TorusGrid, alpha: float,
                             eps_list: Sequence[float] = (4e-3, 2e-3, 1e-3)) -> float:
    """l2-operator distance to the direct S_1^-alpha multiplier"""
    built = bochner_riesz_from_resolvents(P, grid, alpha, eps_list)
    direct = bochner_riesz_op(1.0, -alpha, P, grid, mode="direct", variant="L")
    return (built - direct).l2_norm()


def scaling_covariance_error(P: SymbolPoly, grid: TorusGrid, z: complex, alpha: float, t: float) -> float:
    """max |(P(t xi) - t^m z)^-alpha - t^-(m alpha) (P(xi) - z)^-alpha| on the lattice"""
    xi = grid.frequency_mesh()
    lhs = np.power(P(t * xi) - t ** P.m * z + 0j, -alpha)
    rhs = t ** (-P.m * alpha) * np.power(P(xi) - z + 0j, -alpha)
    return float(np.max(np.abs(lhs - rhs)) / max(np.max(np.abs(rhs)), 1e-300))


def write_sweep(report: ScalingReport, client, name: str) -> Dict[str, str]:
    """CSV (param, norm_lb, fit_residual) plus JSON summary"""
    meta = {"label": report.label, "grid": report.meta.get("grid")}
    csv_path = client.write_csv(name, report.to_frame(), meta)
    json_path = client.write_json(name, report.to_summary())
    return {"csv": str(csv_path), "json": str(json_path)}
