"""
Region Calculus
Exact-rational Lebesgue exponent regions for negative-index Bochner-Riesz bounds
"""

from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Dict, List, Optional, Tuple, Union

from errors import DomainError

Rational = Union[int, str, Fraction]

ONE = Fraction(1)
HALF = Fraction(1, 2)
ZERO = Fraction(0)


def as_rational(value: Rational) -> Fraction:
    """Coerce to an exact Fraction; floats are refused"""
    if isinstance(value, bool) or isinstance(value, float):
        raise DomainError(f"exact rational required, got {value!r}")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise DomainError(f"malformed rational {value!r}") from exc
    raise DomainError(f"cannot read {value!r} as a rational")


def rational_pair(value: Fraction) -> List[int]:
    return [value.numerator, value.denominator]


class Relation(Enum):
    """Comparison operator of an affine constraint"""
    LT = "<"
    LE = "<="
    GT = ">"
    GE = ">="

    def test(self, lhs: Fraction, rhs: Fraction) -> bool:
        if self is Relation.LT:
            return lhs < rhs
        if self is Relation.LE:
            return lhs <= rhs
        if self is Relation.GT:
            return lhs > rhs
        return lhs >= rhs

    @property
    def strict(self) -> bool:
        return self in (Relation.LT, Relation.GT)

    def flipped(self) -> "Relation":
        return {
            Relation.LT: Relation.GT,
            Relation.LE: Relation.GE,
            Relation.GT: Relation.LT,
            Relation.GE: Relation.LE,
        }[self]


class CaseId(Enum):
    """Region families"""
    CASE1 = "case1"
    CASE2 = "case2"
    CASE3 = "case3"
    CASE4 = "case4"
    KRS = "krs"
    SOBOLEV = "sobolev_line"
    RESTRICTION = "perturbed_restriction"

    @classmethod
    def from_number(cls, number: int) -> "CaseId":
        try:
            return [cls.CASE1, cls.CASE2, cls.CASE3, cls.CASE4][int(number) - 1]
        except IndexError as exc:
            raise DomainError(f"case must be 1-4, got {number}") from exc


@dataclass(frozen=True)
class ExponentPoint:
    """Reciprocal exponent pair (1/p, 1/q) in the closed unit square"""
    inv_p: Fraction
    inv_q: Fraction

    def __post_init__(self):
        inv_p = as_rational(self.inv_p)
        inv_q = as_rational(self.inv_q)
        if not (ZERO <= inv_p <= ONE and ZERO <= inv_q <= ONE):
            raise DomainError(f"exponent point ({inv_p}, {inv_q}) outside [0,1]^2")
        object.__setattr__(self, "inv_p", inv_p)
        object.__setattr__(self, "inv_q", inv_q)

    @classmethod
    def from_exponents(cls, p: Optional[Rational], q: Optional[Rational]) -> "ExponentPoint":
        """Build from exponents; None stands for infinity"""
        inv_p = ZERO if p is None else 1 / as_rational(p)
        inv_q = ZERO if q is None else 1 / as_rational(q)
        return cls(inv_p, inv_q)

    def dual(self) -> "ExponentPoint":
        return ExponentPoint(ONE - self.inv_q, ONE - self.inv_p)

    @property
    def gap(self) -> Fraction:
        return self.inv_p - self.inv_q

    def to_json(self) -> List[List[int]]:
        return [rational_pair(self.inv_p), rational_pair(self.inv_q)]

    def __str__(self) -> str:
        return f"({self.inv_p}, {self.inv_q})"


@dataclass(frozen=True)
class Constraint:
    """a*(1/r) + b*(1/s) <op> c with exact coefficients"""
    a: Fraction
    b: Fraction
    c: Fraction
    op: Relation
    label: str = ""

    def value(self, point: ExponentPoint) -> Fraction:
        return self.a * point.inv_p + self.b * point.inv_q

    def holds(self, point: ExponentPoint) -> bool:
        return self.op.test(self.value(point), self.c)

    def dual(self) -> "Constraint":
        # x = 1 - y', y = 1 - x'
        return Constraint(-self.b, -self.a, self.c - self.a - self.b, self.op,
                          f"dual({self.label})" if self.label else "")

    def closure(self) -> "Constraint":
        op = {Relation.LT: Relation.LE, Relation.GT: Relation.GE}.get(self.op, self.op)
        return Constraint(self.a, self.b, self.c, op, self.label)

    def to_json(self) -> Dict:
        return {
            "a": rational_pair(self.a),
            "b": rational_pair(self.b),
            "c": rational_pair(self.c),
            "op": self.op.value,
            "label": self.label,
        }


def _constraint(a, b, c, op: Relation, label: str) -> Constraint:
    return Constraint(as_rational(a), as_rational(b), as_rational(c), op, label)


@dataclass(frozen=True)
class RegionParams:
    """Parameters of the four-case negative-index family"""
    n: int
    m: int = 2
    alpha: Fraction = ZERO
    p: Optional[Fraction] = None
    p0: Optional[Fraction] = ONE

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 2:
            raise DomainError(f"dimension n must be an integer >= 2, got {self.n}")
        if int(self.m) != self.m or self.m < 2:
            raise DomainError(f"order m must be an integer >= 2, got {self.m}")
        alpha = as_rational(self.alpha)
        if alpha < -1:
            raise DomainError(f"alpha must be >= -1, got {alpha}")
        object.__setattr__(self, "alpha", alpha)
        p = None if self.p is None else as_rational(self.p)
        p0 = None if self.p0 is None else as_rational(self.p0)
        if p is not None and not (1 < p < 2):
            raise DomainError(f"anchor exponent p must lie in (1,2), got {p}")
        if p0 is not None and not (1 <= p0 < 2):
            raise DomainError(f"p0 must lie in [1,2), got {p0}")
        if p is not None and p0 is not None and not p0 < p:
            raise DomainError(f"need p0 < p, got p0={p0}, p={p}")
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "p0", p0)

    def require_p(self) -> Fraction:
        if self.p is None:
            raise DomainError("anchor exponent p is required for this region")
        return self.p

    def to_json(self) -> Dict:
        return {
            "n": self.n,
            "m": self.m,
            "alpha": rational_pair(self.alpha),
            "p": None if self.p is None else rational_pair(self.p),
            "p0": None if self.p0 is None else rational_pair(self.p0),
        }


@dataclass(frozen=True)
class Region:
    """Intersection of affine half-planes in the (1/r, 1/s) square"""
    case_id: CaseId
    params: RegionParams
    constraints: Tuple[Constraint, ...]
    landmarks: Dict[str, ExponentPoint] = field(default_factory=dict)

    def contains(self, point: ExponentPoint) -> bool:
        return all(c.holds(point) for c in self.constraints)

    def violated(self, point: ExponentPoint) -> List[str]:
        """Labels of the constraints the point fails"""
        return [c.label for c in self.constraints if not c.holds(point)]

    def dual(self) -> "Region":
        return Region(
            case_id=self.case_id,
            params=self.params,
            constraints=tuple(c.dual() for c in self.constraints),
            landmarks={f"{k}*": v.dual() for k, v in self.landmarks.items()},
        )

    def polygon(self) -> List[ExponentPoint]:
        """Vertices of the closed region clipped to the unit square, counter-clockwise"""
        poly: List[Tuple[Fraction, Fraction]] = [(ZERO, ZERO), (ONE, ZERO), (ONE, ONE), (ZERO, ONE)]
        for constraint in self.constraints:
            poly = _clip(poly, constraint.closure())
            if not poly:
                return []
        vertices: List[ExponentPoint] = []
        for x, y in poly:
            point = ExponentPoint(x, y)
            if not vertices or vertices[-1] != point:
                vertices.append(point)
        if len(vertices) > 1 and vertices[0] == vertices[-1]:
            vertices.pop()
        return vertices

    def to_json(self) -> Dict:
        return {
            "case": self.case_id.value,
            "params": self.params.to_json(),
            "vertices": [v.to_json() for v in self.polygon()],
            "landmarks": {k: v.to_json() for k, v in self.landmarks.items()},
            "constraints": [c.to_json() for c in self.constraints],
        }

    def to_csv_rows(self) -> List[Dict]:
        rows = []
        for i, vertex in enumerate(self.polygon()):
            rows.append({
                "kind": "polygon",
                "label": f"v{i}",
                "inv_p": str(vertex.inv_p),
                "inv_q": str(vertex.inv_q),
                "inv_p_float": float(vertex.inv_p),
                "inv_q_float": float(vertex.inv_q),
            })
        for label, point in self.landmarks.items():
            rows.append({
                "kind": "boundary",
                "label": label,
                "inv_p": str(point.inv_p),
                "inv_q": str(point.inv_q),
                "inv_p_float": float(point.inv_p),
                "inv_q_float": float(point.inv_q),
            })
        return rows


def _clip(poly: List[Tuple[Fraction, Fraction]], constraint: Constraint) -> List[Tuple[Fraction, Fraction]]:
    """Sutherland-Hodgman step against one closed half-plane"""
    if not poly:
        return []

    def inside(pt):
        return constraint.op.test(constraint.a * pt[0] + constraint.b * pt[1], constraint.c)

    def crossing(p1, p2):
        v1 = constraint.a * p1[0] + constraint.b * p1[1] - constraint.c
        v2 = constraint.a * p2[0] + constraint.b * p2[1] - constraint.c
        t = v1 / (v1 - v2)
        return (p1[0] + t * (p2[0] - p1[0]), p1[1] + t * (p2[1] - p1[1]))

    result = []
    for i, current in enumerate(poly):
        previous = poly[i - 1]
        if inside(current):
            if not inside(previous):
                result.append(crossing(previous, current))
            result.append(current)
        elif inside(previous):
            result.append(crossing(previous, current))
    return result


# ==================== VERTICES ====================

def _vertex_coords(params: RegionParams) -> Dict[str, Tuple[Fraction, Fraction]]:
    n, alpha = params.n, params.alpha
    inv_p = 1 / params.require_p()
    top = Fraction(n + 1, 2 * n) + alpha / n
    shift = alpha - 2 * alpha * inv_p
    raw = {
        "A": (ONE, top),
        "B(p)": (top + shift, top),
        "C(p)": (inv_p, top),
        "D(p)": (HALF + shift, HALF),
    }
    coords = dict(raw)
    for label, (x, y) in raw.items():
        primed = label[0] + "'" + label[1:]
        coords[primed] = (ONE - y, ONE - x)
    return coords


def pentagon_vertices(params: RegionParams) -> Dict[str, ExponentPoint]:
    """Eight labelled vertices A, A', B(p), B'(p), C(p), C'(p), D(p), D'(p)"""
    params.require_p()
    vertices = {}
    for label, (x, y) in _vertex_coords(params).items():
        if not (ZERO <= x <= ONE and ZERO <= y <= ONE):
            raise DomainError(
                f"vertex {label}=({x}, {y}) leaves the unit square for alpha={params.alpha}, n={params.n}"
            )
        vertices[label] = ExponentPoint(x, y)
    return vertices


def q_alpha(n: int, alpha: Rational) -> Fraction:
    """max{1, 2n/(n+1+2 alpha)}"""
    alpha = as_rational(alpha)
    denominator = n + 1 + 2 * alpha
    if denominator <= 0:
        raise DomainError(f"alpha={alpha} <= -(n+1)/2 makes q_alpha undefined")
    return max(ONE, Fraction(2 * n) / denominator)


def inv_q_alpha_case4(p: Rational, alpha: Rational) -> Fraction:
    """Case-4 threshold 1/q_alpha = 1 + alpha - (2 alpha + 1)/p, as displayed"""
    p = as_rational(p)
    alpha = as_rational(alpha)
    return 1 + alpha - (2 * alpha + 1) / p


def summability_threshold(n: int, p: Rational) -> Fraction:
    """n(1/p - 1/2) - 1/2"""
    return n * (1 / as_rational(p) - HALF) - HALF


def case_for_alpha(params: RegionParams) -> CaseId:
    """The unique case whose alpha range holds"""
    alpha = params.alpha
    threshold = summability_threshold(params.n, params.require_p())
    if alpha > threshold:
        return CaseId.CASE1
    if alpha > 0:
        return CaseId.CASE2
    if alpha > -HALF:
        return CaseId.CASE3
    if alpha > -1:
        return CaseId.CASE4
    raise DomainError(f"alpha={alpha} is not covered by any case (need alpha > -1)")


# ==================== REGIONS ====================

def _square(open_: bool) -> List[Constraint]:
    lo, hi = (Relation.GT, Relation.LT) if open_ else (Relation.GE, Relation.LE)
    return [
        _constraint(1, 0, 0, lo, "1/r > 0" if open_ else "1/r >= 0"),
        _constraint(1, 0, 1, hi, "1/r < 1" if open_ else "1/r <= 1"),
        _constraint(0, 1, 0, lo, "1/s > 0" if open_ else "1/s >= 0"),
        _constraint(0, 1, 1, hi, "1/s < 1" if open_ else "1/s <= 1"),
    ]


def _band(p0: Fraction) -> List[Constraint]:
    return [
        _constraint(1, 0, 1 / p0, Relation.LT, "p0 < r"),
        _constraint(0, 1, 1 - 1 / p0, Relation.GT, "s < p0'"),
    ]


def _pentagon(params: RegionParams) -> List[Constraint]:
    n, alpha = params.n, params.alpha
    margin = (2 * alpha + 1) / (2 * n)
    inv_p = 1 / params.require_p()
    return [
        _constraint(1, 0, HALF - margin, Relation.GT, "1/r - 1/2 > -(2a+1)/(2n)"),
        _constraint(0, 1, HALF + margin, Relation.LT, "1/2 - 1/s > -(2a+1)/(2n)"),
        _constraint(1, -1, alpha - 2 * alpha * inv_p, Relation.GT, "a - 2a/p < 1/r - 1/s"),
    ]


def _below_line(p1: Tuple[Fraction, Fraction], p2: Tuple[Fraction, Fraction], label: str) -> Optional[Constraint]:
    """Strict half-plane below the line through p1 and p2 (None if degenerate)"""
    (x1, y1), (x2, y2) = p1, p2
    if (x1, y1) == (x2, y2):
        return None
    a = y2 - y1
    b = -(x2 - x1)
    c = a * x1 + b * y1
    if b != 0:
        op = Relation.LT if b > 0 else Relation.GT
    else:
        # vertical line: keep the side of the corner (1, 0)
        op = Relation.LT if a * 1 < c else Relation.GT
    return Constraint(a, b, c, op, label)


def _krs_constraints(n: int, alpha: Fraction) -> List[Constraint]:
    margin = (2 * alpha - 1) / (2 * n)
    return [
        _constraint(1, 0, HALF + margin, Relation.GT, "1/p - 1/2 > (2a-1)/(2n)"),
        _constraint(0, 1, HALF - margin, Relation.LT, "1/2 - 1/q > (2a-1)/(2n)"),
        _constraint(1, -1, 2 * alpha / (n + 1), Relation.GT, "2a/(n+1) < 1/p - 1/q"),
    ]


def negative_index_region(
    params: RegionParams,
    case_id: Union[CaseId, int],
    gaussian_bounds: bool = False,
    extended_case4: bool = False,
) -> Region:
    """Admissible (1/r, 1/s) region for one of the four negative-index cases"""
    if not isinstance(case_id, CaseId):
        case_id = CaseId.from_number(case_id)
    if case_id not in (CaseId.CASE1, CaseId.CASE2, CaseId.CASE3, CaseId.CASE4):
        raise DomainError(f"{case_id.value} is not one of the four negative-index cases")

    valid = case_for_alpha(params)
    if valid is not case_id:
        raise DomainError(
            f"alpha={params.alpha} is outside the range of {case_id.value}; valid case is {valid.value}"
        )

    n, alpha, p = params.n, params.alpha, params.require_p()
    constraints: List[Constraint] = _square(open_=not gaussian_bounds)
    constraints.append(_constraint(-1, 1, 0, Relation.LE, "r <= s"))
    if not gaussian_bounds:
        constraints.extend(_band(params.p0 if params.p0 is not None else ONE))

    coords = _vertex_coords(params)
    landmarks: Dict[str, ExponentPoint] = {}

    def mark(*labels):
        for label in labels:
            x, y = coords[label]
            if ZERO <= x <= ONE and ZERO <= y <= ONE:
                landmarks[label] = ExponentPoint(x, y)

    if case_id is CaseId.CASE1:
        q = q_alpha(n, alpha)
        if q > 1:
            constraints.append(_constraint(1, 0, 1 / q, Relation.GT, "r < q_alpha"))
            constraints.append(_constraint(0, 1, 1 - 1 / q, Relation.LT, "q_alpha' < s"))
    elif case_id is CaseId.CASE2:
        constraints.extend(_pentagon(params))
        for line in (
            _below_line((HALF, HALF), coords["C(p)"], "below (1/2,1/2)-C(p)"),
            _below_line((HALF, HALF), coords["C'(p)"], "below (1/2,1/2)-C'(p)"),
        ):
            if line is not None:
                constraints.append(line)
        mark("C(p)", "C'(p)")
    elif case_id is CaseId.CASE3:
        constraints.extend(_pentagon(params))
        for line in (
            _below_line(coords["D(p)"], coords["C(p)"], "below D(p)-C(p)"),
            _below_line(coords["D(p)"], coords["D'(p)"], "below D(p)-D'(p)"),
            _below_line(coords["D'(p)"], coords["C'(p)"], "below D'(p)-C'(p)"),
        ):
            if line is not None:
                constraints.append(line)
        mark("C(p)", "C'(p)", "D(p)", "D'(p)")
    else:
        constraints.append(_constraint(1, -1, alpha - 2 * alpha / p, Relation.GT, "a - 2a/p < 1/r - 1/s"))
        if extended_case4:
            constraints.extend(_krs_constraints(n, -alpha))
        else:
            inv_q = inv_q_alpha_case4(p, alpha)
            constraints.append(_constraint(1, 0, 1 - inv_q, Relation.GT, "r < q_alpha'"))
            constraints.append(_constraint(0, 1, inv_q, Relation.LT, "q_alpha < s"))

    return Region(case_id=case_id, params=params, constraints=tuple(constraints), landmarks=landmarks)


# ==================== INTERPOLATION ====================

@dataclass(frozen=True)
class InterpolationNode:
    """An order delta together with the exponent point where the bound holds"""
    delta: Fraction
    point: ExponentPoint

    def __post_init__(self):
        object.__setattr__(self, "delta", as_rational(self.delta))


def stein_interpolate(node1: InterpolationNode, node2: InterpolationNode, theta: Rational) -> InterpolationNode:
    """Complex interpolation of two Bochner-Riesz bounds"""
    theta = as_rational(theta)
    if not (0 < theta < 1):
        raise DomainError(f"theta must lie in the open interval (0,1), got {theta}")
    rest = 1 - theta
    return InterpolationNode(
        delta=theta * node1.delta + rest * node2.delta,
        point=ExponentPoint(
            theta * node1.point.inv_p + rest * node2.point.inv_p,
            theta * node1.point.inv_q + rest * node2.point.inv_q,
        ),
    )


# ==================== RESTRICTION RANGES ====================

@dataclass(frozen=True)
class Admissibility:
    admissible: bool
    full_resolvent: bool
    reason: str


def _check_alpha_window(n: int, alpha: Fraction):
    if n >= 3:
        if not (HALF <= alpha < Fraction(n + 1, 2)):
            raise DomainError(f"alpha={alpha} outside [1/2, (n+1)/2) for n={n}")
    elif n == 2:
        if not (0 < alpha < Fraction(3, 2)):
            raise DomainError(f"alpha={alpha} outside (0, 3/2) for n=2")
    else:
        raise DomainError(f"dimension must be >= 2, got {n}")


def krs_admissible(n: int, m: int, point: ExponentPoint, alpha: Rational) -> Admissibility:
    """Fractional-resolvent admissibility; second flag covers the full resolvent"""
    alpha = as_rational(alpha)
    if m < 2:
        raise DomainError(f"order m must be >= 2, got {m}")
    _check_alpha_window(n, alpha)

    failures = [c.label for c in _krs_constraints(n, alpha) if not c.holds(point)]
    admissible = not failures

    if m * alpha > n:
        full = admissible
        full_reason = "m*alpha > n"
    else:
        extra = []
        if point.gap > m * alpha / n:
            extra.append("1/p - 1/q <= m*alpha/n")
        if point.inv_p == ONE:
            extra.append("p != 1")
        if point.inv_q == ZERO:
            extra.append("q != inf")
        full = admissible and not extra
        failures.extend(f"full resolvent: {e}" for e in extra)
        full_reason = "m*alpha <= n"

    if admissible and full:
        reason = f"admissible ({full_reason})"
    else:
        reason = "failed: " + "; ".join(failures)
    return Admissibility(admissible=admissible, full_resolvent=full, reason=reason)


def restriction_admissible(n: int, m: int, point: ExponentPoint) -> Admissibility:
    return krs_admissible(n, m, point, 1)


def krs_region(n: int, m: int, alpha: Rational) -> Region:
    alpha = as_rational(alpha)
    _check_alpha_window(n, alpha)
    constraints = _square(open_=False) + _krs_constraints(n, alpha)
    return Region(CaseId.KRS, RegionParams(n=n, m=m, alpha=alpha, p=None, p0=None), tuple(constraints))


def sobolev_line_region(n: int, m: int) -> Region:
    """Restriction-admissible pairs on the line 1/p - 1/q = m/n"""
    gap = Fraction(m, n)
    constraints = _square(open_=False) + _krs_constraints(n, ONE) + [
        _constraint(1, -1, gap, Relation.LE, "1/p - 1/q <= m/n"),
        _constraint(1, -1, gap, Relation.GE, "1/p - 1/q >= m/n"),
    ]
    return Region(CaseId.SOBOLEV, RegionParams(n=n, m=m, alpha=ONE, p=None, p0=None), tuple(constraints))


def predicted_exponent(n: int, m: int, point: ExponentPoint, power: Rational = 1) -> Fraction:
    """(n/m)(1/p - 1/q) - power"""
    return Fraction(n, m) * point.gap - as_rational(power)


@dataclass(frozen=True)
class ExponentInterval:
    """Interval of exponents p with explicit endpoint closure"""
    lower: Fraction
    upper: Fraction
    lower_closed: bool = True
    upper_closed: bool = True

    def contains(self, value: Rational) -> bool:
        value = as_rational(value)
        above = value >= self.lower if self.lower_closed else value > self.lower
        below = value <= self.upper if self.upper_closed else value < self.upper
        return above and below

    @property
    def is_singleton(self) -> bool:
        return self.lower == self.upper and self.lower_closed and self.upper_closed

    def __str__(self) -> str:
        left = "[" if self.lower_closed else "("
        right = "]" if self.upper_closed else ")"
        return f"{left}{self.lower}, {self.upper}{right}"


def restriction_bootstrap(p0: Rational, p: Rational, resolvent_power_ok: bool) -> ExponentInterval:
    """Range of q for which the restriction estimate follows from the (p0, p0') one"""
    p0 = as_rational(p0)
    p = as_rational(p)
    if p > p0:
        raise DomainError(f"need p <= p0, got p={p}, p0={p0}")
    if not (1 <= p and p0 < 2):
        raise DomainError(f"need 1 <= p <= p0 < 2, got p={p}, p0={p0}")
    if not resolvent_power_ok:
        raise DomainError("resolvent-power hypothesis unavailable; restriction range cannot be extended")
    return ExponentInterval(p, p0, True, True)


def perturbed_restriction_range(n: int, m: int) -> ExponentInterval:
    """[1, min(2(n+1)/(n+3), n/m))"""
    if n <= m:
        raise DomainError(f"need n > m, got n={n}, m={m}")
    if m < 2:
        raise DomainError(f"order m must be >= 2, got {m}")
    upper = min(Fraction(2 * (n + 1), n + 3), Fraction(n, m))
    return ExponentInterval(ONE, upper, True, False)



def free_restriction_range(n: int, m: int) -> ExponentInterval:
    """(max(2n/(n+m), 1), 2(n+1)/(n+3))"""
    lower = max(Fraction(2 * n, n + m), ONE)
    upper = Fraction(2 * (n + 1), n + 3)
    if lower >= upper:
        raise DomainError(f"empty range for n={n}, m={m}")
    return ExponentInterval(lower, upper, False, False)


def perturbed_restriction_region(n: int, m: int) -> Region:
    """Points (1/p, 1/p') with p in the perturbed restriction range"""
    interval = perturbed_restriction_range(n, m)
    constraints = _square(open_=False) + [
        _constraint(1, 0, 1 / interval.upper, Relation.GT, "p < p_max"),
        _constraint(1, 1, 1, Relation.LE, "q = p' (<=)"),
        _constraint(1, 1, 1, Relation.GE, "q = p' (>=)"),
    ]
    return Region(CaseId.RESTRICTION, RegionParams(n=n, m=m, alpha=ONE, p=None, p0=None), tuple(constraints))
