"""Elementary arithmetic kernels.

Sieves for mu, phi and d, modular inverses, and the construction of sieve
functions ``f = g * 1`` on integer segments.  Every table returned by the
``sieve_*`` helpers is indexed directly by ``n``: entry 0 is a placeholder
and entries ``1..limit`` hold the values.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

INT64_LIMIT = 2**63 - 1
# Exact accumulations are done with Python ints, but inputs are capped here.
CAPACITY_BITS = 127

CATALOG_NAMES = ("ones", "moebius", "delta1", "squarefree-indicator-transform")


class CapacityError(ArithmeticError):
    """Raised when an exact integer computation would exceed its declared capacity."""


def _check_limit(limit):
    if limit < 1:
        raise ValueError(f"limit must be >= 1, got {limit}")


def prime_sieve(limit):
    """Boolean array ``is_prime[n]`` for ``0 <= n <= limit``."""
    is_prime = np.ones(limit + 1, dtype=bool)
    is_prime[:2] = False
    for p in range(2, math.isqrt(limit) + 1):
        if is_prime[p]:
            is_prime[p * p :: p] = False
    return is_prime


def sieve_mobius(limit):
    _check_limit(limit)
    mu = np.ones(limit + 1, dtype=np.int64)
    mu[0] = 0
    for p in np.flatnonzero(prime_sieve(limit)):
        p = int(p)
        mu[p::p] *= -1
        if p * p <= limit:
            mu[p * p :: p * p] = 0
    return mu


def sieve_phi(limit):
    _check_limit(limit)
    phi = np.arange(limit + 1, dtype=np.int64)
    for p in np.flatnonzero(prime_sieve(limit)):
        p = int(p)
        phi[p::p] -= phi[p::p] // p
    return phi


def divisor_count(limit):
    _check_limit(limit)
    d = np.zeros(limit + 1, dtype=np.int64)
    for q in range(1, limit + 1):
        d[q::q] += 1
    return d


@lru_cache(maxsize=8)
def _tables(limit):
    return sieve_mobius(limit), sieve_phi(limit), divisor_count(limit)


def arithmetic_tables(n):
    """(mu, phi, d) tables covering at least ``n``; cached by power-of-two size."""
    size = 1 << max(6, int(n).bit_length())
    return _tables(size)


def mobius(n):
    return int(arithmetic_tables(n)[0][n])


def euler_phi(n):
    return int(arithmetic_tables(n)[1][n])


def num_divisors(n):
    return int(arithmetic_tables(n)[2][n])


def mod_inverse(a, m):
    """Inverse of ``a`` modulo ``m`` in ``[1, m-1]``; ``m`` must be at least 2."""
    if m < 2:
        raise ValueError(f"modulus must be >= 2, got {m}")
    if math.gcd(a, m) != 1:
        raise ValueError(f"{a} is not invertible modulo {m} (gcd {math.gcd(a, m)})")
    return pow(a, -1, m)


@dataclass(frozen=True)
class SieveFunction:
    """The transform ``g`` supported on ``[1, Q]``; ``coeffs[q - 1] == g(q)``."""

    Q: int
    coeffs: np.ndarray = field(repr=False)
    label: str = "custom"

    def __post_init__(self):
        coeffs = np.asarray(self.coeffs, dtype=np.int64)
        if self.Q < 1:
            raise ValueError(f"support bound Q must be >= 1, got {self.Q}")
        if coeffs.shape != (self.Q,):
            raise ValueError(f"expected {self.Q} coefficients, got shape {coeffs.shape}")
        coeffs.setflags(write=False)
        object.__setattr__(self, "coeffs", coeffs)

    def __call__(self, q):
        return int(self.coeffs[q - 1]) if 1 <= q <= self.Q else 0

    @property
    def growth_witness(self):
        # finite proxy for essential boundedness: max |g(q)| / q^(1/4)
        q = np.arange(1, self.Q + 1, dtype=np.float64)
        return float(np.max(np.abs(self.coeffs) / q**0.25))

    @property
    def abs_mass(self):
        return int(np.abs(self.coeffs).sum())

    def level(self, N):
        """Distribution level log Q / log N."""
        return math.log(self.Q) / math.log(N)


@dataclass(frozen=True)
class Segment:
    """Values of an arithmetic function on ``lo..hi`` inclusive."""

    lo: int
    hi: int
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.int64)
        if not 1 <= self.lo <= self.hi:
            raise ValueError(f"invalid segment bounds [{self.lo}, {self.hi}]")
        if values.shape != (self.hi - self.lo + 1,):
            raise ValueError("values length must equal hi - lo + 1")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    def __len__(self):
        return self.hi - self.lo + 1

    def __getitem__(self, n):
        if not self.lo <= n <= self.hi:
            raise IndexError(f"{n} outside [{self.lo}, {self.hi}]")
        return int(self.values[n - self.lo])

    def window(self, start, stop):
        """Values for ``start <= n <= stop`` as a view."""
        if start < self.lo or stop > self.hi:
            raise ValueError(
                f"segment [{self.lo}, {self.hi}] does not cover [{start}, {stop}]"
            )
        return self.values[start - self.lo : stop - self.lo + 1]

    def covers(self, start, stop):
        return self.lo <= start and stop <= self.hi

    @property
    def max_abs(self):
        return int(np.abs(self.values).max()) if len(self) else 0

    def shifted(self, c):
        """Same segment with the constant ``c`` added to every value."""
        return Segment(self.lo, self.hi, self.values + c)


def dirichlet_convolve(g, lo, hi):
    """Segmented divisor sieve for ``f(n) = sum_{q | n, q <= Q} g(q)`` on ``lo..hi``."""
    if not 1 <= lo <= hi:
        raise ValueError(f"invalid segment bounds [{lo}, {hi}]")
    if hi >= INT64_LIMIT or g.abs_mass >= INT64_LIMIT:
        raise CapacityError(f"segment [{lo}, {hi}] with mass {g.abs_mass} exceeds int64")
    values = np.zeros(hi - lo + 1, dtype=np.int64)
    for q in np.flatnonzero(g.coeffs) + 1:
        q = int(q)
        start = (-lo) % q
        if start < values.size:
            values[start::q] += g.coeffs[q - 1]
    return Segment(lo, hi, values)


def eratosthenes_transform(f, label="transform"):
    """Moebius inversion ``g = f * mu`` of a segment that starts at 1."""
    if f.lo != 1:
        raise ValueError(f"Eratosthenes transform needs a segment starting at 1, got {f.lo}")
    L = f.hi
    mu = sieve_mobius(L)
    g = np.zeros(L + 1, dtype=np.int64)
    fv = np.concatenate(([0], f.values))
    for d in range(1, L + 1):
        if fv[d]:
            g[d::d] += fv[d] * mu[1 : L // d + 1]
    return SieveFunction(L, g[1:], label)


def catalog(name, Q):
    """Named integer-valued transforms truncated to ``[1, Q]``."""
    if Q < 1:
        raise ValueError(f"Q must be >= 1, got {Q}")
    if name == "ones":
        coeffs = np.ones(Q, dtype=np.int64)
    elif name == "moebius":
        coeffs = sieve_mobius(Q)[1:]
    elif name == "delta1":
        coeffs = np.zeros(Q, dtype=np.int64)
        coeffs[0] = 1
    elif name == "squarefree-indicator-transform":
        # mu^2 = sum_{d^2 | n} mu(d), so (mu^2) * mu is mu(m) at n = m^2 and 0 elsewhere
        coeffs = np.zeros(Q, dtype=np.int64)
        r = math.isqrt(Q)
        squares = np.arange(1, r + 1, dtype=np.int64) ** 2
        coeffs[squares - 1] = sieve_mobius(r)[1:]
    else:
        raise ValueError(f"unknown sieve function {name!r}; expected one of {CATALOG_NAMES}")
    return SieveFunction(Q, coeffs, name)
