"""Complete exponential sums over residue systems.

Arguments of ``e(x) = exp(2 pi i x)`` are always reduced modulo the
denominator in exact integer arithmetic before any trig call, so the
kernels stay accurate for moduli up to about 10**6.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import NamedTuple

import numpy as np

from .arith import euler_phi, mobius, mod_inverse, num_divisors

TWO_PI = 2.0 * math.pi
IMAG_TOL = 1e-9
# sums with at least this many terms are accumulated with math.fsum
COMPENSATED_MIN_TERMS = 10_000


def accumulate(values):
    values = np.asarray(values, dtype=np.float64)
    if values.size >= COMPENSATED_MIN_TERMS:
        return math.fsum(values)
    return float(values.sum())


def _phase_sum(residues, den):
    """Sum of e(r / den) over an integer array of residues in ``[0, den)``."""
    angles = residues.astype(np.float64) * (TWO_PI / den)
    return complex(accumulate(np.cos(angles)), accumulate(np.sin(angles)))


def _real_part(z, what):
    if abs(z.imag) > IMAG_TOL * max(1.0, abs(z.real)):
        raise ArithmeticError(f"{what}: imaginary residue {z.imag:.3e} is not negligible")
    return z.real


def e_frac(num, den):
    """e(num / den) as a Python complex."""
    if den < 1:
        raise ValueError(f"denominator must be >= 1, got {den}")
    angle = TWO_PI * (num % den) / den
    return complex(math.cos(angle), math.sin(angle))


def norm_dist(num, den):
    """Exact distance from num/den to the nearest integer."""
    if den < 1:
        raise ValueError(f"denominator must be >= 1, got {den}")
    r = num % den
    return Fraction(min(r, den - r), den)


def sawtooth_A1(num, den):
    """The 1-periodic odd sawtooth at num/den, valued in (-1/2, 1/2].

    At half-integers the positive representative is returned, so
    ``den * sawtooth_A1(k, den)`` is the unique ``r`` with ``r = k (mod den)``
    and ``-den/2 < r <= den/2``.
    """
    if den < 1:
        raise ValueError(f"denominator must be >= 1, got {den}")
    r = num % den
    if 2 * r > den:
        r -= den
    return Fraction(r, den)


def geometric_sum(alpha_num, alpha_den, n_lo, n_hi):
    """Sum of e(n * alpha) for n_lo <= n <= n_hi, alpha = alpha_num / alpha_den."""
    if n_lo > n_hi:
        raise ValueError(f"empty range [{n_lo}, {n_hi}]")
    if alpha_den < 1:
        raise ValueError(f"denominator must be >= 1, got {alpha_den}")
    p = alpha_num % alpha_den
    n = np.arange(n_lo, n_hi + 1, dtype=object if alpha_den > 2**31 else np.int64)
    residues = np.asarray((n * p) % alpha_den, dtype=np.float64)
    return _phase_sum(residues, alpha_den)


def geometric_bound(alpha_num, alpha_den, n_lo, n_hi):
    """min(length, 1 / (2 ||alpha||)); infinite distance means the length alone."""
    length = n_hi - n_lo + 1
    dist = norm_dist(alpha_num, alpha_den)
    if dist == 0:
        return float(length)
    return min(float(length), float(1 / (2 * dist)))


def geometric_bound_holds(alpha_num, alpha_den, n_lo, n_hi, tol=1e-9):
    value = abs(geometric_sum(alpha_num, alpha_den, n_lo, n_hi))
    return value <= geometric_bound(alpha_num, alpha_den, n_lo, n_hi) + tol


def _units(t):
    j = np.arange(1, t + 1, dtype=np.int64)
    return j[np.gcd(j, t) == 1]


def ramanujan_direct(t, n):
    """c_t(n) by summing e(jn/t) over the reduced residues j."""
    if t < 1:
        raise ValueError(f"modulus must be >= 1, got {t}")
    j = _units(t)
    z = _phase_sum((j * (n % t)) % t, t)
    return _real_part(z, f"c_{t}({n})")


def ramanujan_row(t, ns):
    """Vector of c_t(n) for every n in ``ns`` by direct summation."""
    j = _units(t)
    ns = np.asarray(ns, dtype=np.int64) % t
    angles = ((ns[:, None] * j[None, :]) % t) * (TWO_PI / t)
    imag = np.sin(angles).sum(axis=1)
    if np.max(np.abs(imag), initial=0.0) > IMAG_TOL * t:
        raise ArithmeticError(f"Ramanujan row t={t}: imaginary residue too large")
    return np.cos(angles).sum(axis=1)


def ramanujan_closed(t, n):
    """phi(t) mu(t/(t,n)) / phi(t/(t,n)), exact."""
    if t < 1:
        raise ValueError(f"modulus must be >= 1, got {t}")
    u = t // math.gcd(t, n)
    return euler_phi(t) * mobius(u) // euler_phi(u)


class KloostermanParams(NamedTuple):
    a: int
    b: int
    c: int


class WeilCheck(NamedTuple):
    holds: bool
    slack: float
    value: float
    bound: float


def _unit_inverses(c):
    if c == 1:
        return np.array([1], dtype=np.int64), np.array([0], dtype=np.int64)
    j = _units(c)
    jbar = np.array([pow(int(x), -1, c) for x in j], dtype=np.int64)
    return j, jbar


def kloosterman(a, b, c):
    """S(a, b; c) = sum over units j mod c of e((a j + b jbar) / c)."""
    if c < 1:
        raise ValueError(f"modulus must be >= 1, got {c}")
    j, jbar = _unit_inverses(c)
    z = _phase_sum((j * (a % c) + jbar * (b % c)) % c, c)
    return _real_part(z, f"S({a},{b};{c})")


def kloosterman_table(c, a_values, b_values):
    """Matrix of S(a, b; c) for a in ``a_values`` (rows), b in ``b_values``."""
    j, jbar = _unit_inverses(c)
    av = np.asarray(a_values, dtype=np.int64) % c
    bv = np.asarray(b_values, dtype=np.int64) % c
    ra = (av[:, None] * j[None, :]) % c
    rb = (bv[:, None] * jbar[None, :]) % c
    res = (ra[:, None, :] + rb[None, :, :]) % c
    angles = res * (TWO_PI / c)
    imag = np.sin(angles).sum(axis=2)
    if np.max(np.abs(imag)) > IMAG_TOL * max(1, c):
        raise ArithmeticError(f"Kloosterman table c={c}: imaginary residue too large")
    return np.cos(angles).sum(axis=2)


def weil_bound(a, b, c):
    """d(c) * sqrt(gcd(a, b, c)) * sqrt(c)."""
    return num_divisors(c) * math.sqrt(math.gcd(a, b, c)) * math.sqrt(c)


def weil_check(a, b, c, value=None, tol=1e-6):
    if value is None:
        value = kloosterman(a, b, c)
    bound = weil_bound(a, b, c)
    return WeilCheck(abs(value) <= bound + tol, bound - abs(value), value, bound)


def _inverse_or_zero(x, m):
    # the only residue modulo 1 is 0
    return 0 if m == 1 else mod_inverse(x, m)


def reciprocity_check(a, q):
    """a * (a^-1 mod q) + q * (q^-1 mod a) == 1 (mod aq) for coprime a, q >= 1."""
    if a < 1 or q < 1:
        raise ValueError(f"reciprocity needs positive integers, got ({a}, {q})")
    if math.gcd(a, q) != 1:
        raise ValueError(f"reciprocity needs coprime inputs, got ({a}, {q})")
    abar = _inverse_or_zero(a, q)
    qbar = _inverse_or_zero(q, a)
    m = a * q
    if m < 2:
        return True
    return (a * abar + q * qbar) % m == 1


def orthogonality_indicator(q, n, a):
    """(1/q) sum_{j mod q} e_q(j (n - a)): 1 when n = a (mod q), else 0."""
    if q < 1:
        raise ValueError(f"modulus must be >= 1, got {q}")
    j = np.arange(q, dtype=np.int64)
    z = _phase_sum((j * ((n - a) % q)) % q, q) / q
    return _real_part(z, f"orthogonality q={q}")
