"""Symmetry and Selberg integrals in short intervals, computed exactly.

For integer ``h`` the symmetry integrand

    | sum_{|n - x| <= h} f(n) sgn(n - x) |^2

is constant on each open interval ``(m, m + 1)``: there the window is
``m - h + 1 <= n <= m + h`` and the sign flips between ``m`` and ``m + 1``.
The integral over ``[N, 2N]`` is therefore the finite sum of those squares
for ``N <= m < 2N``, and no quadrature error enters anywhere.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy import signal

from .arith import (
    CAPACITY_BITS,
    INT64_LIMIT,
    CapacityError,
    Segment,
    dirichlet_convolve,
    prime_sieve,
)

ROUNDING_TOL = 0.25
# float64 integers are exact below this
FLOAT_EXACT_LIMIT = 2**52


class RoundingError(ArithmeticError):
    """A floating-point convolution could not be rounded to exact integers safely."""


@dataclass(frozen=True)
class WindowParams:
    N: int
    h: int

    def __post_init__(self):
        if self.h < 1 or 2 * self.h > self.N:
            raise ValueError(f"need 1 <= h and 2h <= N, got N={self.N}, h={self.h}")

    @property
    def theta(self):
        return math.log(self.h) / math.log(self.N)

    def level(self, g):
        return math.log(g.Q) / math.log(self.N)

    @property
    def segment_bounds(self):
        """Range (N - 2h, 2N + 2h] that every integral and correlation here needs."""
        return self.N - 2 * self.h + 1, 2 * self.N + 2 * self.h


def window_segment(g, N, h):
    """f = g * 1 on the range needed for both I_f and C_f(a), |a| <= 2h."""
    lo, hi = WindowParams(N, h).segment_bounds
    return dirichlet_convolve(g, lo, hi)


@dataclass(frozen=True)
class CorrelationTable:
    """C_f(a) for 0 < |a| <= 2h, stored in increasing order of a."""

    h: int
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.int64)
        if values.shape != (4 * self.h,):
            raise ValueError(f"expected {4 * self.h} lags, got {values.shape}")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @property
    def lags(self):
        a = np.arange(-2 * self.h, 2 * self.h + 1, dtype=np.int64)
        return a[a != 0]

    def __getitem__(self, a):
        if not 0 < abs(a) <= 2 * self.h:
            raise KeyError(a)
        return int(self.values[a + 2 * self.h - (a > 0)])

    def as_dict(self):
        return {int(a): int(v) for a, v in zip(self.lags, self.values)}

    def __eq__(self, other):
        if not isinstance(other, CorrelationTable):
            return NotImplemented
        return self.h == other.h and np.array_equal(self.values, other.values)

    __hash__ = None


@dataclass(frozen=True)
class IntegralResult:
    value: int | Fraction
    method: str
    params: dict = field(default_factory=dict)


@dataclass(frozen=True)
class DispersionResult:
    I_f: int
    weighted_sum: int
    residual: int
    normalized: float


def weight_W(a, h):
    """max(2h - 3|a|, |a| - 2h) on [-2h, 2h], zero outside."""
    if h < 1:
        raise ValueError(f"arm h must be >= 1, got {h}")
    a = abs(a)
    if a > 2 * h:
        return 0
    return max(2 * h - 3 * a, a - 2 * h)


def weights(h):
    """W(a) for a = -2h..2h as an int64 array."""
    a = np.abs(np.arange(-2 * h, 2 * h + 1, dtype=np.int64))
    return np.maximum(2 * h - 3 * a, a - 2 * h)


def weight_sum_stat(h, ell):
    """sum_{a != 0} W(a * ell)."""
    if ell < 1:
        raise ValueError(f"ell must be >= 1, got {ell}")
    return 2 * sum(weight_W(a * ell, h) for a in range(1, 2 * h // ell + 1))


def _check_product_capacity(seg, N):
    m = seg.max_abs
    if N * m * m >= INT64_LIMIT:
        raise CapacityError(f"N * max|f|^2 = {N * m * m} overflows int64 correlations")


def _check_correlation_coverage(seg, N, h):
    if not seg.covers(N - 2 * h + 1, 2 * N + 2 * h):
        raise ValueError(
            f"segment [{seg.lo}, {seg.hi}] must cover ({N - 2 * h}, {2 * N + 2 * h}]"
        )


def correlation_naive(seg, N, h):
    """C_f(a) = sum_{N < n <= 2N} f(n) f(n - a), one dot product per lag."""
    _check_correlation_coverage(seg, N, h)
    _check_product_capacity(seg, N)
    x = seg.window(N + 1, 2 * N)
    out = []
    for a in range(-2 * h, 2 * h + 1):
        if a:
            out.append(int(np.dot(x, seg.window(N + 1 - a, 2 * N - a))))
    return CorrelationTable(h, np.array(out, dtype=np.int64))


def correlation_fast(seg, N, h):
    """Same table as :func:`correlation_naive` through one FFT cross-correlation."""
    _check_correlation_coverage(seg, N, h)
    _check_product_capacity(seg, N)
    m = seg.max_abs
    if N * m * m >= FLOAT_EXACT_LIMIT:
        raise CapacityError("correlation magnitudes exceed the float64 exact range")
    x = seg.window(N + 1, 2 * N).astype(np.float64)
    y = seg.window(N - 2 * h + 1, 2 * N + 2 * h).astype(np.float64)
    # raw[L] = sum_k x[k] y[k + L] = C_f(2h - L)
    raw = signal.correlate(y, x, mode="valid", method="fft")[::-1]
    rounded = np.rint(raw)
    err = float(np.max(np.abs(raw - rounded), initial=0.0))
    if err > ROUNDING_TOL:
        raise RoundingError(f"FFT correlation off integers by {err:.3g}")
    rounded = np.delete(rounded, 2 * h)
    return CorrelationTable(h, rounded.astype(np.int64))


def exact_square_sum(values):
    """sum of v**2 over an int64 array, exact, as a Python int."""
    values = np.asarray(values, dtype=np.int64)
    if values.size == 0:
        return 0
    peak = int(np.abs(values).max())
    if peak * peak >= INT64_LIMIT:
        return sum(int(v) ** 2 for v in values.tolist())
    chunk = max(1, INT64_LIMIT // max(1, peak * peak))
    total = 0
    for start in range(0, values.size, chunk):
        part = values[start : start + chunk]
        total += int(np.dot(part, part))
    return total


def _check_integral_capacity(seg, N, h):
    bound = N * (2 * h * max(1, seg.max_abs)) ** 2
    if bound.bit_length() > CAPACITY_BITS:
        raise CapacityError(f"N (2h max|f|)^2 = {bound} exceeds 2^{CAPACITY_BITS}")


def _prefix(seg, start, stop):
    """Prefix sums P with P[i] = sum of f(n) for start <= n < start + i."""
    vals = seg.window(start, stop)
    return np.concatenate(([0], np.cumsum(vals, dtype=np.int64)))


def signed_window_sums(seg, N, h):
    """D_m = sum_{m < n <= m+h} f(n) - sum_{m-h < n <= m} f(n) for N <= m < 2N."""
    if not seg.covers(N - h + 1, 2 * N + h - 1):
        raise ValueError(f"segment [{seg.lo}, {seg.hi}] must cover ({N - h}, {2 * N + h}]")
    _check_integral_capacity(seg, N, h)
    base = N - h + 1
    P = _prefix(seg, base, 2 * N + h - 1)
    m = np.arange(N, 2 * N, dtype=np.int64) - base + 1
    return P[m + h] - 2 * P[m] + P[m - h]


def symmetry_integral_exact(seg, N, h):
    """I_f(N, h) via prefix sums, O(N)."""
    value = exact_square_sum(signed_window_sums(seg, N, h))
    return IntegralResult(value, "direct", {"N": N, "h": h})


def integrand_at(seg, x, h):
    """The symmetry integrand at a (rational) point x, summed term by term."""
    x = Fraction(x)
    lo, hi = math.ceil(x - h), math.floor(x + h)
    total = 0
    for n in range(lo, hi + 1):
        if n != x:
            total += seg[n] if n > x else -seg[n]
    return total * total


def symmetry_integral_midpoint(seg, N, h):
    """I_f(N, h) by midpoint evaluation on each unit interval, O(N h).

    At x = m + 1/2 the window is m - h < n <= m + h; each offset is added
    with its sign, independently of any prefix-sum bookkeeping.
    """
    if not seg.covers(N - h + 1, 2 * N + h - 1):
        raise ValueError(f"segment [{seg.lo}, {seg.hi}] must cover ({N - h}, {2 * N + h}]")
    _check_integral_capacity(seg, N, h)
    acc = np.zeros(N, dtype=np.int64)
    for k in range(-h + 1, h + 1):
        # n = m + k lies right of m + 1/2 exactly when k >= 1
        part = seg.window(N + k, 2 * N - 1 + k)
        if k >= 1:
            acc += part
        else:
            acc -= part
    return IntegralResult(exact_square_sum(acc), "midpoint", {"N": N, "h": h})


def lcm_upto(Q):
    """lcm(1, ..., Q) as a product of maximal prime powers."""
    out = 1
    for p in np.flatnonzero(prime_sieve(Q)):
        p = int(p)
        pk = p
        while pk * p <= Q:
            pk *= p
        out *= pk
    return out


def mean_value(g):
    """sum_{q <= Q} g(q) / q as an exact fraction."""
    D = lcm_upto(g.Q)
    num = 0
    for q in np.flatnonzero(g.coeffs) + 1:
        q = int(q)
        num += int(g.coeffs[q - 1]) * (D // q)
    return Fraction(num, D)


def selberg_integral(seg, N, h, mean):
    """J_f = sum_{N <= m < 2N} (sum_{m < n <= m+h} f(n) - h * mean)^2, exact."""
    if not seg.covers(N + 1, 2 * N + h - 1):
        raise ValueError(f"segment [{seg.lo}, {seg.hi}] must cover ({N}, {2 * N + h}]")
    _check_integral_capacity(seg, N, h)
    mean = Fraction(mean)
    P = _prefix(seg, N + 1, 2 * N + h - 1)
    S = P[h : h + N] - P[:N]
    s1 = int(S.sum(dtype=np.int64)) if N * h * seg.max_abs < INT64_LIMIT else sum(
        int(v) for v in S.tolist()
    )
    value = exact_square_sum(S) - 2 * h * mean * s1 + N * h * h * mean * mean
    if isinstance(value, Fraction) and value.denominator == 1:
        value = value.numerator
    return IntegralResult(value, "direct", {"N": N, "h": h, "mean": mean})


def weighted_correlation_sum(table):
    """sum_{a != 0} W(a) C_f(a)."""
    w = np.delete(weights(table.h), 2 * table.h)
    return sum(int(x) * int(y) for x, y in zip(w.tolist(), table.values.tolist()))


def dispersion_residual(seg, N, h, table=None, I_f=None):
    """Compare I_f with sum_{a != 0} W(a) C_f(a); residual is the exact difference."""
    if table is None:
        table = correlation_fast(seg, N, h)
    if I_f is None:
        I_f = symmetry_integral_exact(seg, N, h).value
    weighted = weighted_correlation_sum(table)
    residual = I_f - weighted
    return DispersionResult(I_f, weighted, residual, abs(residual) / (N * h + h**3))

