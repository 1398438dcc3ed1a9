"""
Weyl Calculus
One-dimensional calculus of the homogeneous distributions chi_+-^alpha, Weyl fractional
derivatives, Weyl-Sobolev norms, dyadic decompositions, subordination and the jump identity
"""

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd
from scipy.integrate import trapezoid
from scipy.signal import fftconvolve
from scipy.special import rgamma

from errors import ConvergenceError, DomainError, OutputError, UnsupportedOperationError

logger = logging.getLogger(__name__)


# ==================== SAMPLED FUNCTIONS ====================

@dataclass(frozen=True)
class SampledFn:
    """Uniform samples of a complex function on [a, b] with step h (trapezoid weights)"""
    a: float
    b: float
    h: float
    values: np.ndarray
    exact: Optional[Callable[[np.ndarray], np.ndarray]] = field(default=None, compare=False)

    def __post_init__(self):
        if not self.h > 0 or not self.b > self.a:
            raise DomainError(f"bad sampling window [{self.a}, {self.b}] with step {self.h}")
        values = np.asarray(self.values, dtype=complex)
        expected = int(round((self.b - self.a) / self.h)) + 1
        if values.shape != (expected,):
            raise DomainError(f"expected {expected} samples on [{self.a}, {self.b}], got {values.shape}")
        object.__setattr__(self, "values", values)

    @classmethod
    def from_function(cls, func: Callable[[np.ndarray], np.ndarray], a: float, b: float, h: float) -> "SampledFn":
        count = int(round((b - a) / h)) + 1
        x = a + h * np.arange(count)
        return cls(a, a + h * (count - 1), h, func(x), exact=func)

    @property
    def x(self) -> np.ndarray:
        return self.a + self.h * np.arange(len(self.values))

    def with_values(self, values: np.ndarray) -> "SampledFn":
        return SampledFn(self.a, self.b, self.h, values)

    def l1(self) -> float:
        return float(trapezoid(np.abs(self.values), dx=self.h))

    def sup(self) -> float:
        return float(np.abs(self.values).max())

    def integral(self) -> complex:
        return complex(trapezoid(self.values, dx=self.h))

    def interpolate(self, xq) -> np.ndarray:
        """Linear interpolation, zero outside the window"""
        xq = np.asarray(xq, dtype=float)
        re = np.interp(xq, self.x, self.values.real, left=0.0, right=0.0)
        im = np.interp(xq, self.x, self.values.imag, left=0.0, right=0.0)
        return re + 1j * im

    def __call__(self, xq) -> np.ndarray:
        if self.exact is not None:
            return np.asarray(self.exact(np.asarray(xq, dtype=float)), dtype=complex)
        return self.interpolate(xq)

    def dilate(self, R: float) -> "SampledFn":
        """delta_R F(x) = F(Rx)"""
        if not R > 0:
            raise DomainError(f"dilation factor must be positive, got {R}")
        exact = None if self.exact is None else (lambda x, f=self.exact: f(R * x))
        return SampledFn(self.a / R, self.b / R, self.h / R, self.values, exact=exact)

    def support(self, rel_tol: float = 1e-14) -> Tuple[float, float]:
        mask = np.abs(self.values) > rel_tol * max(self.sup(), 1e-300)
        if not np.any(mask):
            return (self.a, self.a)
        idx = np.nonzero(mask)[0]
        x = self.x
        return float(x[idx[0]]), float(x[idx[-1]])

    def to_csv(self, path: Union[str, Path], meta: Optional[Dict] = None) -> Path:
        path = Path(path)
        header = {"a": self.a, "b": self.b, "h": self.h, **(meta or {})}
        frame = pd.DataFrame({"x": self.x, "re": self.values.real, "im": self.values.imag})
        try:
            with open(path, "w") as fh:
                fh.write("# " + " ".join(f"{k}={v}" for k, v in header.items()) + "\n")
                frame.to_csv(fh, index=False, float_format="%.17g")
        except OSError as exc:
            raise OutputError(f"cannot write {path}: {exc}") from exc
        return path

    @classmethod
    def from_csv(cls, path: Union[str, Path]) -> "SampledFn":
        path = Path(path)
        with open(path) as fh:
            first = fh.readline()
        if not first.startswith("#"):
            raise DomainError(f"{path} lacks the metadata line")
        meta = dict(item.split("=", 1) for item in first[1:].split())
        frame = pd.read_csv(path, comment="#")
        return cls(float(meta["a"]), float(meta["b"]), float(meta["h"]),
                   frame["re"].to_numpy() + 1j * frame["im"].to_numpy())


def smooth_bump(a: float, b: float, h: float, window: Optional[Tuple[float, float]] = None,
                normalize: bool = False) -> SampledFn:
    """exp(-1 / ((x-a)(b-x))) on (a, b), sampled on a padded window"""
    if not b > a:
        raise DomainError(f"empty bump support ({a}, {b})")
    lo, hi = window if window is not None else (a - 0.25 * (b - a), b + 0.25 * (b - a))
    width = b - a

    def raw(x):
        x = np.asarray(x, dtype=float)
        out = np.zeros_like(x)
        inside = (x > a) & (x < b)
        u = (x[inside] - a) / width
        out[inside] = np.exp(-1.0 / (u * (1 - u)) + 4.0)
        return out

    scale = 1.0
    if normalize:
        fine = SampledFn.from_function(raw, lo, hi, h)
        scale = 1.0 / fine.l1()

    def func(x):
        return scale * raw(x)

    return SampledFn.from_function(func, lo, hi, h)


# ==================== HOMOGENEOUS DISTRIBUTIONS ====================

class Family(Enum):
    PLUS = "plus"
    MINUS = "minus"


class Representation(Enum):
    REGULAR = "Regular"
    DELTA = "DeltaDerivative"
    EPS = "EpsLimit"


def chi_plus_sample(alpha: float, x) -> np.ndarray:
    """x_+^alpha / Gamma(alpha + 1) for alpha > -1"""
    return _chi_regular(alpha, np.asarray(x, dtype=float))


def chi_minus_sample(alpha: float, x) -> np.ndarray:
    """x_-^alpha / Gamma(alpha + 1) for alpha > -1"""
    return _chi_regular(alpha, -np.asarray(x, dtype=float))


def _chi_regular(alpha: float, t: np.ndarray) -> np.ndarray:
    if alpha <= -1:
        raise DomainError(f"chi^{alpha} is not a locally integrable function")
    out = np.zeros_like(t, dtype=float)
    pos = t > 0
    out[pos] = t[pos] ** alpha
    if alpha == 0:
        out[t == 0] = 1.0
    return out * rgamma(alpha + 1)


_logged_sign_table = False


@dataclass(frozen=True)
class DistPower:
    """coefficient * chi_{sign}^alpha in one of three representations"""
    sign: Family
    alpha: float
    kind: Representation
    coefficient: float = 1.0
    order: Optional[int] = None
    quadrature_error: Optional[float] = None

    @classmethod
    def chi(cls, sign: Union[Family, str], alpha: float, coefficient: float = 1.0) -> "DistPower":
        sign = Family(sign) if not isinstance(sign, Family) else sign
        alpha = float(alpha)
        if alpha > -1:
            return cls(sign, alpha, Representation.REGULAR, coefficient)
        if alpha.is_integer():
            k = int(-alpha)
            if sign is Family.MINUS and k >= 2:
                _note_sign_table()
            return cls(sign, alpha, Representation.DELTA, coefficient, order=k - 1)
        return cls(sign, alpha, Representation.EPS, coefficient)

    @property
    def delta_coefficient(self) -> float:
        """Factor c in coefficient * chi^alpha = c delta^(order)"""
        if self.kind is not Representation.DELTA:
            raise UnsupportedOperationError(f"chi^{self.alpha} is not delta-type")
        # chi_-^{-k} = (-1)^{k-1} delta^{(k-1)} keeps chi^w * chi^z = chi^{w+z+1} consistent
        sign = (-1) ** self.order if self.sign is Family.MINUS else 1
        return self.coefficient * sign

    def evaluate(self, x) -> np.ndarray:
        if self.kind is not Representation.REGULAR:
            raise UnsupportedOperationError(f"chi^{self.alpha} ({self.kind.value}) has no pointwise values")
        sample = chi_plus_sample if self.sign is Family.PLUS else chi_minus_sample
        return self.coefficient * sample(self.alpha, x)

    def describe(self) -> str:
        if self.kind is Representation.DELTA:
            return f"{self.delta_coefficient:+g} delta^({self.order})"
        return f"{self.coefficient:+g} chi_{self.sign.value}^{self.alpha:g}"


def _note_sign_table():
    global _logged_sign_table
    if not _logged_sign_table:
        logger.info(
            "chi_-^{-k} uses (-1)^{k-1} delta^{(k-1)}, which the convolution identity forces; "
            "the (-1)^k table reading conflicts with chi_-^{-1} * chi_-^{-1} = chi_-^{-1}"
        )
        _logged_sign_table = True


def _power_weights(p: float, count: int, h: float) -> Tuple[np.ndarray, np.ndarray]:
    """
    Product-trapezoid weights for int_0^{count h} t^p s(t) dt with s piecewise linear:
    returns (left, right) so the integral is sum_k left_k s_k + right_k s_{k+1}.
    """
    t0 = h * np.arange(count, dtype=float)
    t1 = t0 + h
    i0 = (t1 ** (p + 1) - t0 ** (p + 1)) / (p + 1)
    i1 = (t1 ** (p + 2) - t0 ** (p + 2)) / (p + 2)
    left = (t1 * i0 - i1) / h
    right = (i1 - t0 * i0) / h
    return left, right


def _weighted_integral(p: float, smooth: np.ndarray, h: float) -> complex:
    left, right = _power_weights(p, len(smooth) - 1, h)
    return complex(np.dot(left, smooth[:-1]) + np.dot(right, smooth[1:]))


def _convolve_regular_at(w: float, z: float, d: float, h: float) -> float:
    """(chi_-^w * chi_-^z)(-d) by product integration, splitting at d/2"""
    half = max(int(round(d / (2 * h))), 1)
    step = d / (2 * half)
    u = step * np.arange(half + 1)
    # near the point the singular factor is u^w, near the origin it is v^z
    first = _weighted_integral(w, (d - u) ** z, step)
    second = _weighted_integral(z, (d - u) ** w, step)
    return float((first + second).real * rgamma(w + 1) * rgamma(z + 1))


def chi_convolve(w: DistPower, z: DistPower, h: float = 1e-3,
                 test_points: Sequence[float] = (0.25, 0.5, 1.0, 2.0)) -> DistPower:
    """chi^w * chi^z = chi^{w+z+1}; regular pairs are checked against quadrature"""
    if w.sign is not z.sign:
        raise DomainError("chi_convolve needs both factors from the same family")
    if w.kind is Representation.EPS and z.kind is Representation.EPS:
        raise UnsupportedOperationError(
            f"chi^{w.alpha} * chi^{z.alpha}: neither factor is regular or delta-type"
        )
    result = DistPower.chi(w.sign, w.alpha + z.alpha + 1)
    coefficient = w.coefficient * z.coefficient
    error = None
    if w.kind is Representation.REGULAR and z.kind is Representation.REGULAR:
        closed = np.array([d ** (w.alpha + z.alpha + 1) * rgamma(w.alpha + z.alpha + 2) for d in test_points])
        quad = np.array([_convolve_regular_at(w.alpha, z.alpha, d, h) for d in test_points])
        error = float(np.max(np.abs(quad - closed)) * abs(w.coefficient * z.coefficient))
        logger.debug("chi_convolve %s * %s: quadrature error %.2e", w.alpha, z.alpha, error)
    return DistPower(result.sign, result.alpha, result.kind, coefficient, result.order, error)


# ==================== WEYL DERIVATIVES ====================

def weyl_integral(values: np.ndarray, h: float, mu: float) -> np.ndarray:
    """
    (f * chi_-^{mu-1})(x_j) = Gamma(mu)^{-1} int_{x_j}^{end} (y - x_j)^{mu-1} f(y) dy
    for uniform samples, by product-trapezoid weights.
    """
    if mu <= 0:
        raise DomainError(f"Weyl integral order must be positive, got {mu}")
    f = np.asarray(values, dtype=complex)
    K = len(f) - 1
    if K < 1:
        return np.zeros_like(f)
    left, right = _power_weights(mu - 1, K, h)

    def corr(u, w):
        conv = fftconvolve(u[::-1], w)
        return conv[:len(u)][::-1]

    out = np.zeros(K + 1, dtype=complex)
    out[:K] = corr(f[:-1], left) + corr(f[1:], right)
    return out * rgamma(mu)


def _edge_check(F: SampledFn, strict: bool):
    scale = max(F.sup(), 1e-300)
    values = np.abs(F.values)
    if values[-1] > 1e-12 * scale or values[-2] > 1e-12 * scale:
        raise DomainError("support touches the right edge of the sampling window")
    if strict:
        if values[0] > 1e-12 * scale or values[1] > 1e-12 * scale:
            raise DomainError("support touches the left edge of the sampling window")
        nonpositive = F.x <= 0
        if np.any(values[nonpositive] > 1e-12 * scale):
            raise DomainError("support must lie in (0, inf)")


def weyl_derivative(F: SampledFn, nu: float, strict: bool = True) -> SampledFn:
    """F^(nu) = F * chi_-^{-nu-1}: integer part by differences, fractional part by a Weyl integral"""
    if nu < 0:
        raise DomainError(f"Weyl derivative order must be >= 0, got {nu}")
    _edge_check(F, strict)
    k = int(math.ceil(nu))
    mu = k - nu
    d = F.values.copy()
    for _ in range(k):
        d = -np.gradient(d, F.h, edge_order=2)
    if mu > 1e-15:
        d = weyl_integral(d, F.h, mu)
    return F.with_values(d)


def reproduction_error(F: SampledFn, nu: float) -> float:
    """sup |F^(nu) * chi_-^{nu-1} - F|"""
    if nu <= 0:
        raise DomainError(f"reproduction needs nu > 0, got {nu}")
    G = weyl_derivative(F, nu)
    back = weyl_integral(G.values, F.h, nu)
    return float(np.max(np.abs(back - F.values)))


def weyl_derivative_spectral(G: SampledFn, nu: float) -> SampledFn:
    """(-i tau)^nu multiplier on the window, for decayed band-limited samples"""
    if nu < 0:
        raise DomainError(f"order must be >= 0, got {nu}")
    tau = 2 * np.pi * np.fft.fftfreq(len(G.values), d=G.h)
    symbol = np.power(-1j * tau + 0j, nu)
    symbol[tau == 0] = 1.0 if nu == 0 else 0.0
    return G.with_values(np.fft.ifft(symbol * np.fft.fft(G.values)))


@dataclass(frozen=True)
class WSNorm:
    nu: float
    value_L1: float
    value_deriv_L1: float

    @property
    def total(self) -> float:
        return self.value_L1 + self.value_deriv_L1


def ws_norm(F: SampledFn, nu: float) -> WSNorm:
    """||F||_1 + ||F^(nu)||_1"""
    deriv = weyl_derivative(F, nu)
    return WSNorm(nu=nu, value_L1=F.l1(), value_deriv_L1=deriv.l1())


# ==================== DYADIC PIECES ====================

def _dyadic_symbols(tau: np.ndarray, ell_max: int) -> List[np.ndarray]:
    from grid_calculus import smooth_plateau

    def beta(t):
        return smooth_plateau(t, (-1.0, 1.0), (-0.5, 0.5))

    symbols = [beta(tau)]
    for ell in range(1, ell_max + 1):
        symbols.append(beta(tau / 2 ** ell) - beta(tau / 2 ** (ell - 1)))
    return symbols


def dyadic_decompose(G: SampledFn, ell_max: int, tail_tol: float = 1e-6) -> List[SampledFn]:
    """G^(0) = beta(D) G and G^(l) = phi(2^-l D) G with phi supported in 1/4 <= |tau| <= 1"""
    if ell_max < 0:
        raise DomainError(f"ell_max must be >= 0, got {ell_max}")
    tau = 2 * np.pi * np.fft.fftfreq(len(G.values), d=G.h)
    spectrum = np.fft.fft(G.values)
    pieces = [G.with_values(np.fft.ifft(s * spectrum)) for s in _dyadic_symbols(tau, ell_max)]
    tail = G.with_values(G.values - sum(p.values for p in pieces)).l1()
    if tail > tail_tol:
        logger.warning("dyadic_decompose: l_max = %d leaves L1 tail %.3e > %.1e", ell_max, tail, tail_tol)
    return pieces


def dyadic_tail(G: SampledFn, pieces: Sequence[SampledFn]) -> float:
    return G.with_values(G.values - sum(p.values for p in pieces)).l1()


def bernstein_ratio(piece: SampledFn, ell: int, alpha: float) -> float:
    """||(G^(l))^(alpha+1)||_1 / (2^{(alpha+1) l} ||G^(l)||_1)"""
    norm = piece.l1()
    if norm == 0:
        return 0.0
    deriv = weyl_derivative_spectral(piece, alpha + 1)
    return deriv.l1() / (2 ** ((alpha + 1) * ell) * norm)


# ==================== SUBORDINATION ====================

def _subordinate(deriv: SampledFn, nu: float, lam: float, step: float) -> complex:
    """Gamma(nu)^{-1} int_lam^inf F^(nu)(s) (s - lam)^{nu-1} ds"""
    end = deriv.b
    if lam >= end:
        return 0.0
    count = max(int(math.ceil((end - lam) / step)), 1)
    t = (end - lam) / count * np.arange(count + 1)
    samples = deriv.interpolate(lam + t)
    return _weighted_integral(nu - 1, samples, t[1]) * rgamma(nu)


def subordination_check(F: SampledFn, nu: float, L_diag: Sequence[float]) -> float:
    """Max relative error of F(lambda) = Gamma(nu)^-1 int F^(nu)(s)(s - lambda)_+^{nu-1} ds"""
    if nu < 0.5:
        raise DomainError(f"subordination needs nu >= 1/2, got {nu}")
    eigenvalues = np.asarray(L_diag, dtype=float)
    if np.any(eigenvalues < 0):
        raise DomainError("eigenvalues must be nonnegative")
    deriv = weyl_derivative(F, nu)
    floor = 1e-3 * F.sup()
    worst = 0.0
    for lam in eigenvalues:
        coarse = _subordinate(deriv, nu, lam, 2 * F.h)
        fine = _subordinate(deriv, nu, lam, F.h)
        target = complex(F(np.array([lam]))[0])
        scale = max(abs(target), floor)
        if abs(coarse - fine) > 1e-2 * scale:
            raise ConvergenceError(
                f"subordination quadrature not converging at lambda={lam}: h -> {coarse}, h/2 -> {fine}"
            )
        worst = max(worst, abs(fine - target) / scale)
    return worst


# ==================== RICHARDSON ====================

def richardson(value_h, value_h2, order: float, ratio: float = 2.0):
    """Extrapolate v(h) and v(h/ratio) assuming error ~ h^order"""
    factor = ratio ** order - 1
    return value_h2 + (value_h2 - value_h) / factor


def observed_order(value_h, value_h2, value_h4, ratio: float = 2.0) -> float:
    num = np.max(np.abs(np.asarray(value_h) - np.asarray(value_h2)))
    den = np.max(np.abs(np.asarray(value_h2) - np.asarray(value_h4)))
    if den == 0:
        return math.inf
    return float(math.log(num / den) / math.log(ratio))


# ==================== JUMP IDENTITY ====================

@dataclass
class JumpResolution:
    """Which boundary-value combination reproduces 2 pi i chi_+^{-alpha} / Gamma(alpha)"""
    alpha: float
    phase_sign: int
    placement_sign: int
    sign_convention: str
    max_error: float
    candidate_errors: Dict[str, float]


def _combination_label(phase: int, placement: int) -> str:
    s = "+" if phase > 0 else "-"
    t = "+" if placement > 0 else "-"
    ns = "-" if phase > 0 else "+"
    nt = "-" if placement > 0 else "+"
    return f"e^{{{s}i pi a}}(x{t}i0)^-a - e^{{{ns}i pi a}}(x{nt}i0)^-a"


def jump_combination(alpha: float, x, eps: float, phase: int = 1, placement: int = 1) -> np.ndarray:
    """e^{s i pi a}(x + t i eps)^{-a} - e^{-s i pi a}(x - t i eps)^{-a}, principal branch"""
    x = np.asarray(x, dtype=float)
    rot = np.exp(1j * np.pi * alpha * phase)
    upper = np.power(x + 1j * placement * eps, -alpha)
    lower = np.power(x - 1j * placement * eps, -alpha)
    return rot * upper - np.conj(rot) * lower


def jump_target(alpha: float, x) -> np.ndarray:
    """2 pi i chi_+^{-alpha}(x) / Gamma(alpha)"""
    x = np.asarray(x, dtype=float)
    return 2j * np.pi * chi_plus_sample(-alpha, x) * rgamma(alpha)


def jump_identity_resolve(alpha: float, eps_list: Sequence[float] = (1e-2, 1e-3, 1e-4),
                          x_points: Optional[Sequence[float]] = None, tol: float = 1e-3) -> JumpResolution:
    """Identify the boundary-value combination that converges to the jump as eps -> 0"""
    if not (0 < alpha < 1):
        raise DomainError(f"alpha must lie in (0, 1), got {alpha}")
    if len(eps_list) < 3:
        raise DomainError("three eps values are required for the extrapolation")
    eps = sorted(eps_list, reverse=True)
    if x_points is None:
        x_points = np.concatenate([np.linspace(0.25, 2.0, 10), -np.linspace(0.25, 2.0, 10)])
    x = np.asarray(x_points, dtype=float)
    target = jump_target(alpha, x)

    errors: Dict[str, float] = {}
    best = None
    for phase in (1, -1):
        for placement in (1, -1):
            values = [jump_combination(alpha, x, e, phase, placement) for e in eps]
            ratio = eps[-2] / eps[-1]
            extrapolated = richardson(values[-2], values[-1], 1.0, ratio)
            previous = richardson(values[-3], values[-2], 1.0, eps[-3] / eps[-2])
            label = _combination_label(phase, placement)
            err = float(np.max(np.abs(extrapolated - target)))
            drift = float(np.max(np.abs(extrapolated - previous)))
            errors[label] = err
            if err < tol and drift < 10 * tol and (best is None or err < best[0]):
                best = (err, phase, placement, label)

    if best is None:
        raise ConvergenceError(f"no boundary-value combination converges for alpha={alpha}: {errors}")
    err, phase, placement, label = best
    logger.info("jump identity alpha=%s resolved to %s (error %.2e)", alpha, label, err)
    return JumpResolution(alpha, phase, placement, label, err, errors)


def stone_limit_error(eps: float, test_fn: Callable[[np.ndarray], np.ndarray],
                      phase: int = 1, placement: int = 1, half_width: float = 50.0, h: float = None) -> float:
    """
    At alpha = 1 the resolved combination pairs with g to 2 pi i g(0) as eps -> 0;
    returns |<combination, g> - 2 pi i g(0)|.
    """
    h = eps / 20 if h is None else h
    count = int(round(2 * half_width / h))
    x = -half_width + h * np.arange(count + 1)
    pairing = trapezoid(jump_combination(1.0, x, eps, phase, placement) * test_fn(x), dx=h)
    return float(abs(pairing - 2j * np.pi * test_fn(np.array([0.0]))[0]))
