"""Knots, quantiles, interpolating spline constructors, and regression bases.

Piecewise polynomials are stored with coefficients of the global variable x
(a + b*x + c*x**2 + d*x**3), so coefficients can be read off directly for a
given interval. All evaluators treat the final breakpoint as included
(closed right edge).
"""

import bisect
import math
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    BadIndexError,
    DegenerateKnotsError,
    EmptySampleError,
    InsufficientDataError,
    InvalidAbscissaeError,
    OutOfDomainError,
)


@dataclass(frozen=True)
class KnotVector:
    """Nondecreasing sequence of real breakpoints."""

    values: tuple[float, ...]

    def __post_init__(self):
        vals = tuple(float(v) for v in self.values)
        object.__setattr__(self, "values", vals)
        if len(vals) < 1:
            raise ValueError("knot vector must hold at least one value")
        if not all(math.isfinite(v) for v in vals):
            raise ValueError("knots must be finite")
        if any(b < a for a, b in zip(vals, vals[1:])):
            raise ValueError("knots must be nondecreasing")

    def __len__(self):
        return len(self.values)

    def __iter__(self):
        return iter(self.values)

    def __getitem__(self, i):
        return self.values[i]

    @property
    def strictly_increasing(self) -> bool:
        return all(b > a for a, b in zip(self.values, self.values[1:]))


@dataclass(frozen=True)
class InterpolationData:
    """Interpolation nodes (x, y) with strictly increasing x."""

    points: tuple[tuple[float, float], ...]

    def __post_init__(self):
        pts = tuple((float(x), float(y)) for x, y in self.points)
        object.__setattr__(self, "points", pts)
        if len(pts) < 2:
            raise InsufficientDataError("interpolation needs at least two points")
        if not all(math.isfinite(x) and math.isfinite(y) for x, y in pts):
            raise InvalidAbscissaeError("interpolation points must be finite")
        if any(pts[i + 1][0] <= pts[i][0] for i in range(len(pts) - 1)):
            raise InvalidAbscissaeError("x values must be strictly increasing")

    @property
    def xs(self) -> tuple[float, ...]:
        return tuple(p[0] for p in self.points)

    @property
    def ys(self) -> tuple[float, ...]:
        return tuple(p[1] for p in self.points)


@dataclass(frozen=True)
class PiecewisePolynomial:
    """Interval-wise polynomial with rows (a, b, c, d), one per interval.

    Unused high-order slots hold zeros, e.g. a degree-2 fit stores d = 0.
    """

    breakpoints: KnotVector
    coefficients: tuple[tuple[float, float, float, float], ...]
    degree: int

    def __post_init__(self):
        rows = tuple(tuple(float(c) for c in row) for row in self.coefficients)
        object.__setattr__(self, "coefficients", rows)
        if self.degree not in (1, 2, 3):
            raise ValueError("degree must be 1, 2 or 3")
        if not self.breakpoints.strictly_increasing:
            raise ValueError("breakpoints must be strictly increasing")
        if len(rows) != len(self.breakpoints) - 1:
            raise ValueError("need exactly one coefficient row per interval")
        if any(len(row) != 4 for row in rows):
            raise ValueError("coefficient rows must be (a, b, c, d)")

    def piece_value(self, i: int, x: float) -> float:
        a, b, c, d = self.coefficients[i]
        return ((d * x + c) * x + b) * x + a

    def piece_derivative(self, i: int, x: float) -> float:
        _, b, c, d = self.coefficients[i]
        return (3.0 * d * x + 2.0 * c) * x + b

    def piece_second_derivative(self, i: int, x: float) -> float:
        _, _, c, d = self.coefficients[i]
        return 6.0 * d * x + 2.0 * c

    def continuity_defect(self, order: int = 0) -> float:
        """Largest left/right mismatch of the given derivative order at interior breakpoints."""
        eval_by_order = {
            0: self.piece_value,
            1: self.piece_derivative,
            2: self.piece_second_derivative,
        }
        f = eval_by_order[order]
        worst = 0.0
        for i in range(1, len(self.breakpoints) - 1):
            x = self.breakpoints[i]
            worst = max(worst, abs(f(i - 1, x) - f(i, x)))
        return worst


def quantile(sample: Sequence[float], p: float) -> float:
    """Linearly interpolated quantile of ``sample`` at probability ``p``.

    Sorts ascending and interpolates between adjacent order statistics:
    with h = (n-1)*p the result is s[floor(h)] + (h-floor(h)) *
    (s[floor(h)+1] - s[floor(h)]). Returns the minimum at p=0 and the
    maximum at p=1.
    """
    n = len(sample)
    if n == 0:
        raise EmptySampleError("quantile of an empty sample")
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must lie in [0, 1], got {p}")
    s = sorted(float(v) for v in sample)
    h = (n - 1) * p
    lo = math.floor(h)
    frac = h - lo
    if frac == 0.0:
        return s[lo]
    # min() guards the one-ulp lerp overshoot near the segment's right end
    return min(s[lo] + frac * (s[lo + 1] - s[lo]), s[lo + 1])


def quantile_knots(sample: Sequence[float], probs: Sequence[float]) -> KnotVector:
    """Knot vector at the given sample quantiles (must come out strictly increasing)."""
    probs = tuple(float(p) for p in probs)
    if not probs:
        raise ValueError("probs must be nonempty")
    if any(not 0.0 < p < 1.0 for p in probs):
        raise ValueError("probs must lie strictly inside (0, 1)")
    if any(q <= p for p, q in zip(probs, probs[1:])):
        raise ValueError("probs must be strictly increasing")
    knots = [quantile(sample, p) for p in probs]
    if any(b <= a for a, b in zip(knots, knots[1:])):
        raise DegenerateKnotsError(
            f"quantiles {probs} of the sample coincide: {knots}"
        )
    return KnotVector(tuple(knots))


def eval_linear_interpolant(data: InterpolationData, x: float) -> float:
    """Piecewise-linear interpolant through ``data``, exact at every node."""
    xs, ys = data.xs, data.ys
    if x < xs[0] or x > xs[-1]:
        raise OutOfDomainError(f"x={x} outside [{xs[0]}, {xs[-1]}]")
    if x == xs[-1]:
        return ys[-1]
    i = bisect.bisect_right(xs, x) - 1
    x0, x1 = xs[i], xs[i + 1]
    y0, y1 = ys[i], ys[i + 1]
    return y0 + (x - x0) * (y1 - y0) / (x1 - x0)


def fit_quadratic_spline(data: InterpolationData) -> PiecewisePolynomial:
    """Interpolating quadratic spline, C1 at interior nodes, linear final piece.

    The construction propagates slopes from the right: the last interval has
    zero curvature (c = 0), and each earlier piece matches its right
    neighbour's derivative at the shared node.
    """
    xs, ys = data.xs, data.ys
    if len(xs) < 3:
        raise InsufficientDataError("quadratic spline needs at least 3 points")
    n = len(xs) - 1
    rows: list[tuple[float, float, float, float]] = [(0.0, 0.0, 0.0, 0.0)] * n

    b = (ys[n] - ys[n - 1]) / (xs[n] - xs[n - 1])
    rows[n - 1] = (ys[n] - b * xs[n], b, 0.0, 0.0)

    for i in range(n - 2, -1, -1):
        _, b_r, c_r, _ = rows[i + 1]
        xr = xs[i + 1]
        slope = b_r + 2.0 * c_r * xr  # right piece's derivative at the shared node
        secant = (ys[i + 1] - ys[i]) / (xs[i + 1] - xs[i])
        c = (slope - secant) / (xs[i + 1] - xs[i])
        b = slope - 2.0 * c * xr
        a = ys[i + 1] - (b + c * xr) * xr
        rows[i] = (a, b, c, 0.0)

    return PiecewisePolynomial(KnotVector(xs), tuple(rows), degree=2)


def _solve_tridiagonal(lower, diag, upper, rhs):
    """Thomas algorithm for a tridiagonal system; inputs are copied."""
    n = len(diag)
    b = np.array(diag, dtype=float)
    c = np.array(upper, dtype=float)
    d = np.array(rhs, dtype=float)
    for i in range(1, n):
        w = lower[i - 1] / b[i - 1]
        b[i] -= w * c[i - 1]
        d[i] -= w * d[i - 1]
    x = np.empty(n)
    x[-1] = d[-1] / b[-1]
    for i in range(n - 2, -1, -1):
        x[i] = (d[i] - c[i] * x[i + 1]) / b[i]
    return x


def fit_natural_cubic_spline(data: InterpolationData) -> PiecewisePolynomial:
    """Natural interpolating cubic spline via the second-derivative system.

    Interior second derivatives M_i solve the tridiagonal system

        h[i-1]*M[i-1] + 2*(h[i-1]+h[i])*M[i] + h[i]*M[i+1]
            = 6*((y[i+1]-y[i])/h[i] - (y[i]-y[i-1])/h[i-1])

    with M[0] = M[n] = 0, and each interval's cubic is expanded into global
    (a, b, c, d) coefficients.
    """
    xs = np.asarray(data.xs, dtype=float)
    ys = np.asarray(data.ys, dtype=float)
    if len(xs) < 3:
        raise InsufficientDataError("cubic spline needs at least 3 points")
    n = len(xs) - 1
    h = np.diff(xs)

    rhs = 6.0 * ((ys[2:] - ys[1:-1]) / h[1:] - (ys[1:-1] - ys[:-2]) / h[:-1])
    diag = 2.0 * (h[:-1] + h[1:])
    off = h[1:-1]
    m = np.zeros(n + 1)
    m[1:-1] = _solve_tridiagonal(off, diag, off, rhs)

    rows = []
    for i in range(n):
        hi = h[i]
        x0, x1 = xs[i], xs[i + 1]
        aa = m[i] / (6.0 * hi)
        bb = m[i + 1] / (6.0 * hi)
        cc = ys[i] / hi - m[i] * hi / 6.0
        dd = ys[i + 1] / hi - m[i + 1] * hi / 6.0
        rows.append(
            (
                aa * x1**3 - bb * x0**3 + cc * x1 - dd * x0,
                -3.0 * aa * x1**2 + 3.0 * bb * x0**2 - cc + dd,
                3.0 * aa * x1 - 3.0 * bb * x0,
                -aa + bb,
            )
        )
    return PiecewisePolynomial(KnotVector(tuple(xs)), tuple(rows), degree=3)


def eval_piecewise(poly: PiecewisePolynomial, x: float) -> float:
    """Evaluate ``poly`` at ``x``; the final breakpoint belongs to the last piece."""
    bp = poly.breakpoints.values
    if x < bp[0] or x > bp[-1]:
        raise OutOfDomainError(f"x={x} outside [{bp[0]}, {bp[-1]}]")
    i = bisect.bisect_right(bp, x) - 1
    if i == len(bp) - 1:
        i -= 1
    return poly.piece_value(i, x)


@dataclass(frozen=True)
class BSplineBasis:
    """Clamped B-spline basis: order k, boundary knots repeated k times."""

    order: int
    extended_knots: KnotVector

    def __post_init__(self):
        k = self.order
        t = self.extended_knots.values
        if k < 1:
            raise ValueError("order must be >= 1")
        if len(t) < 2 * k:
            raise ValueError("extended knot vector too short for this order")
        if len(set(t[:k])) != 1 or len(set(t[-k:])) != 1:
            raise ValueError("boundary knots must each repeat `order` times")
        if t[k - 1] >= t[len(t) - k]:
            raise ValueError("clamped domain must have positive width")

    @classmethod
    def clamped(cls, order: int, interior: Iterable[float], domain: tuple[float, float]) -> "BSplineBasis":
        lo, hi = float(domain[0]), float(domain[1])
        interior = tuple(float(v) for v in interior)
        if not lo < hi:
            raise ValueError("domain must satisfy min < max")
        if any(not lo < v < hi for v in interior):
            raise ValueError("interior knots must lie strictly inside the domain")
        if any(b <= a for a, b in zip(interior, interior[1:])):
            raise ValueError("interior knots must be strictly increasing")
        return cls(order, KnotVector((lo,) * order + interior + (hi,) * order))

    @property
    def n_functions(self) -> int:
        return len(self.extended_knots) - self.order

    @property
    def domain(self) -> tuple[float, float]:
        t = self.extended_knots.values
        return t[self.order - 1], t[len(t) - self.order]


def _blend(t: tuple[float, ...], i: int, k: int, x: float) -> float:
    # two-term recursion, any 0/0 term defined as 0 (repeated clamped knots)
    if k == 1:
        return 1.0 if t[i] <= x < t[i + 1] else 0.0
    value = 0.0
    den = t[i + k - 1] - t[i]
    if den != 0.0:
        value += (x - t[i]) / den * _blend(t, i, k - 1, x)
    den = t[i + k] - t[i + 1]
    if den != 0.0:
        value += (t[i + k] - x) / den * _blend(t, i + 1, k - 1, x)
    return value


def bspline_blend(basis: BSplineBasis, i: int, k: int, t: float) -> float:
    """Normalized blending value N_{i,k}(t) on the basis's extended knots.

    ``k`` is the order: k=1 gives the half-open interval indicator, higher
    orders follow the two-term recursion with the 0/0 := 0 convention.
    """
    if k < 1:
        raise BadIndexError(f"order k must be >= 1, got {k}")
    n_funcs = len(basis.extended_knots) - k
    if not 0 <= i < n_funcs:
        raise BadIndexError(f"index {i} out of range for order {k} ({n_funcs} functions)")
    return _blend(basis.extended_knots.values, i, k, float(t))


class BasisKind(Enum):
    TRUNCATED_POWER = "truncated_power"
    BSPLINE = "bspline"


@dataclass(frozen=True)
class SplineBasisSpec:
    """Declarative description of a regression basis over one predictor.

    ``domain`` is used for B-spline clamping; truncated-power bases have an
    unrestricted domain. Dimension excludes the intercept: degree + #knots
    for truncated-power, #knots + degree + 1 for B-splines.
    """

    kind: BasisKind
    degree: int
    interior_knots: KnotVector
    domain: tuple[float, float]

    def __post_init__(self):
        lo, hi = (float(self.domain[0]), float(self.domain[1]))
        object.__setattr__(self, "domain", (lo, hi))
        if self.degree not in (1, 2, 3):
            raise ValueError("degree must be 1, 2 or 3")
        if not (math.isfinite(lo) and math.isfinite(hi) and lo < hi):
            raise ValueError("domain must be finite with min < max")
        if not self.interior_knots.strictly_increasing:
            raise ValueError("interior knots must be strictly increasing")
        if any(not lo < v < hi for v in self.interior_knots):
            raise ValueError("interior knots must lie strictly inside the domain")

    @property
    def dimension(self) -> int:
        n_knots = len(self.interior_knots)
        if self.kind is BasisKind.TRUNCATED_POWER:
            return self.degree + n_knots
        return n_knots + self.degree + 1

    def bspline_basis(self) -> BSplineBasis:
        if self.kind is not BasisKind.BSPLINE:
            raise ValueError("only B-spline specs expand to a blending basis")
        return BSplineBasis.clamped(self.degree + 1, self.interior_knots.values, self.domain)


def basis_row(spec: SplineBasisSpec, x: float) -> np.ndarray:
    """Regression-basis values at ``x`` (intercept not included).

    Truncated-power entries: (x, ..., x**d, (x-k_1)_+**d, ..., (x-k_K)_+**d).
    B-spline entries: (N_0k(x), ..., N_nk(x)); the exact right domain edge
    evaluates as the left-limit so the row still sums to 1.
    """
    x = float(x)
    if spec.kind is BasisKind.TRUNCATED_POWER:
        d = spec.degree
        row = [x**j for j in range(1, d + 1)]
        row.extend(max(x - knot, 0.0) ** d for knot in spec.interior_knots)
        return np.array(row)

    lo, hi = spec.domain
    if x < lo or x > hi:
        raise OutOfDomainError(f"x={x} outside B-spline domain [{lo}, {hi}]")
    basis = spec.bspline_basis()
    n = basis.n_functions
    if x == hi:
        row = np.zeros(n)
        row[-1] = 1.0
        return row
    t = basis.extended_knots.values
    return np.array([_blend(t, i, basis.order, x) for i in range(n)])
