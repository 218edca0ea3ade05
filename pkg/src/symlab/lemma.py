"""Numerical laboratory for the trigonometric residue-class lemma.

For coprime ``a < t`` the sum over ``0 < |k| <= t/2`` of

    [cos(2 pi k tbar/a)(cos(2 pi k/(a t)) - 1) + sin(2 pi k tbar/a) sin(2 pi k/(a t))]
        * cos(2 pi j k / t)

splits by the class of ``k`` modulo ``a`` into the Sigma_1 / Sigma_2
progression sums.  The split is exact, so :func:`identity_residual` only
measures floating-point error.  The averaged statistics behind the two
bounds are computed exactly as written, with signed residue
representatives ``0 <= |r| <= a/2``.

All trig arguments of the form ``2 pi x / m`` take ``x`` reduced modulo
``m`` in integers first.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .arith import mod_inverse

TWO_PI = 2.0 * math.pi
ROW_CHUNK = 512


@dataclass(frozen=True)
class LemmaSample:
    a: int
    t: int
    tbar_mod_a: int
    abar_mod_t: int

    @classmethod
    def from_pair(cls, a, t):
        if not 1 <= a < t:
            raise ValueError(f"need 1 <= a < t, got a={a}, t={t}")
        if math.gcd(a, t) != 1:
            raise ValueError(f"a={a} and t={t} are not coprime")
        tbar = 0 if a == 1 else mod_inverse(t, a)
        return cls(a, t, tbar, mod_inverse(a, t))


@dataclass(frozen=True)
class LemmaStats:
    a: int
    t: int
    identity_residual: float
    bound1_stat: float
    bound2_stat: float
    j0_cos: float
    j0_sin: float
    j_count: int


def _cos_frac(x, m):
    return np.cos(TWO_PI * (np.asarray(x, dtype=np.int64) % m) / m)


def _sin_frac(x, m):
    return np.sin(TWO_PI * (np.asarray(x, dtype=np.int64) % m) / m)


def _k_range(t):
    return np.arange(1, t // 2 + 1, dtype=np.int64)


def _signed_residues(a):
    # 0 <= |r| <= a/2; for even a both r = a/2 and r = -a/2 occur
    return np.arange(-(a // 2), a // 2 + 1, dtype=np.int64)


def j_range(t):
    """All j with 0 <= |j| <= t/2."""
    return np.arange(-(t // 2), t // 2 + 1, dtype=np.int64)


def _bracket(s, k):
    at = s.a * s.t
    return _cos_frac(k * s.tbar_mod_a, s.a) * (_cos_frac(k, at) - 1.0) + _sin_frac(
        k * s.tbar_mod_a, s.a
    ) * _sin_frac(k, at)


def lemma_lhs(s, j):
    """Left side of the decomposition; the k and -k terms coincide."""
    k = _k_range(s.t)
    return 2.0 * float(np.sum(_bracket(s, k) * _cos_frac(j * k, s.t)))


def _progression(s, r):
    a, t = s.a, s.t
    first = r % a or a
    return np.arange(first, t // 2 + 1, a, dtype=np.int64)


def sigma1(s, r, j):
    k = _progression(s, r)
    return 2.0 * float(np.sum((_cos_frac(k, s.a * s.t) - 1.0) * _cos_frac(j * k, s.t)))


def sigma2(s, r, j):
    k = _progression(s, r)
    return 2.0 * float(np.sum(_sin_frac(k, s.a * s.t) * _cos_frac(j * k, s.t)))


def _sine_product(s, j):
    """sum_{1 <= J <= t/(2a)} sin(2 pi J/t) sin(2 pi j a J/t)."""
    J = np.arange(1, s.t // (2 * s.a) + 1, dtype=np.int64)
    return float(np.sum(_sin_frac(J, s.t) * _sin_frac(j * s.a * J, s.t)))


def m_correction(s, r, j):
    """M(j) = -2 sin(2 pi j r/t) sum_J sin(2 pi J/t) sin(2 pi j a J/t); depends on r."""
    return -2.0 * float(_sin_frac(j * r, s.t)) * _sine_product(s, j)


def identity_rhs(s, j):
    total = 0.0
    for r in range(s.a):
        total += float(_cos_frac(r * s.tbar_mod_a, s.a)) * sigma1(s, r, j)
        total += float(_sin_frac(r * s.tbar_mod_a, s.a)) * sigma2(s, r, j)
    return total


def identity_residual(s, js=None):
    """max over j of |lemma_lhs - (sum_r cos Sigma_1 + sum_r sin Sigma_2)|."""
    if js is None:
        js = j_range(s.t)
    return max(abs(lemma_lhs(s, int(j)) - identity_rhs(s, int(j))) for j in js)


def _class_weights(s, residues, trig):
    """Fold per-residue coefficients trig(2 pi r tbar/a) onto classes r mod a."""
    w = np.zeros(s.a, dtype=np.float64)
    np.add.at(w, residues % s.a, trig(residues * s.tbar_mod_a, s.a))
    return w


def _row_sums(s, coeff, js):
    """2 sum_k coeff[k] cos(2 pi j k/t) for every j in js, chunked over j."""
    t = s.t
    k = _k_range(t)
    table = np.cos(TWO_PI * np.arange(t) / t)
    out = np.empty(js.size, dtype=np.float64)
    for start in range(0, js.size, ROW_CHUNK):
        jj = js[start : start + ROW_CHUNK]
        idx = (jj[:, None] % t * k[None, :]) % t
        out[start : start + ROW_CHUNK] = 2.0 * (table[idx] @ coeff)
    return out


def bound1_terms(s):
    """sum_{|r| <= a/2} cos(2 pi r tbar/a) Sigma_1(j) for j >= 0."""
    k = _k_range(s.t)
    w = _class_weights(s, _signed_residues(s.a), _cos_frac)
    coeff = w[k % s.a] * (_cos_frac(k, s.a * s.t) - 1.0)
    js = np.arange(0, s.t // 2 + 1, dtype=np.int64)
    return js, _row_sums(s, coeff, js)


def bound2_terms(s):
    """sum_{|r| <= a/2} sin(2 pi r tbar/a) (Sigma_2(j) - M(j, r)) for j >= 0."""
    k = _k_range(s.t)
    r = _signed_residues(s.a)
    w = _class_weights(s, r, _sin_frac)
    coeff = w[k % s.a] * _sin_frac(k, s.a * s.t)
    js = np.arange(0, s.t // 2 + 1, dtype=np.int64)
    main = _row_sums(s, coeff, js)
    sin_r = _sin_frac(r * s.tbar_mod_a, s.a)
    J = np.arange(1, s.t // (2 * s.a) + 1, dtype=np.int64)
    sin_J = _sin_frac(J, s.t)
    corr = np.empty(js.size, dtype=np.float64)
    for i, j in enumerate(js.tolist()):
        P = float(np.dot(sin_J, _sin_frac(j * s.a * J, s.t)))
        corr[i] = 2.0 * P * float(np.dot(sin_r, _sin_frac(j * r, s.t)))
    return js, main + corr


def _fold_over_sign(js, values, t, keep=None):
    """(1/t) sum over 0 <= |j| <= t/2 of |value(j)|, values given for j >= 0 (even in j)."""
    mult = np.where(js == 0, 1.0, 2.0)
    if keep is not None:
        mult = mult * keep
    return float(np.sum(mult * np.abs(values))) / t


def bound1_stat(s):
    js, vals = bound1_terms(s)
    return _fold_over_sign(js, vals, s.t)


def exceptional_mask(s, js):
    """Per j >= 0: how many of j, -j survive excluding j = +-abar (mod t), halved for j > 0."""
    t, ab = s.t, s.abar_mod_t
    excluded = {ab % t, (-ab) % t}
    pos = np.array([(int(j) % t) not in excluded for j in js], dtype=np.float64)
    neg = np.array([(-int(j)) % t not in excluded for j in js], dtype=np.float64)
    return np.where(js == 0, pos, (pos + neg) / 2.0)


def bound2_stat(s, exclude_exceptional=True):
    js, vals = bound2_terms(s)
    keep = exceptional_mask(s, js) if exclude_exceptional else None
    return _fold_over_sign(js, vals, s.t, keep)


def j0_checks(s):
    """(sum_r cos(2 pi r tbar/a) Sigma_1(0), sum_r sin(2 pi r tbar/a) Sigma_2(0)) over r mod a."""
    first = second = 0.0
    for r in range(s.a):
        first += float(_cos_frac(r * s.tbar_mod_a, s.a)) * sigma1(s, r, 0)
        second += float(_sin_frac(r * s.tbar_mod_a, s.a)) * sigma2(s, r, 0)
    return first, second


def lemma_stats(s, js=None):
    first, second = j0_checks(s)
    js_id = j_range(s.t) if js is None else js
    return LemmaStats(
        a=s.a,
        t=s.t,
        identity_residual=identity_residual(s, js_id),
        bound1_stat=bound1_stat(s),
        bound2_stat=bound2_stat(s, True),
        j0_cos=first,
        j0_sin=second,
        j_count=len(js_id),
    )


def coprime_grid(a_min, a_max, t_max, square_floor=True):
    """Coprime pairs (a, t) with a_min <= a <= a_max and a^2 <= t <= t_max."""
    pairs = []
    for a in range(a_min, a_max + 1):
        t_lo = a * a if square_floor else a + 1
        for t in range(max(t_lo, a + 1), t_max + 1):
            if math.gcd(a, t) == 1:
                pairs.append((a, t))
    return pairs


def envelope1(s):
    """bound1_stat * a / log^2(t + 2)."""
    return bound1_stat(s) * s.a / math.log(s.t + 2) ** 2


def envelope2(s):
    """bound2_stat (exceptional j excluded) / (a/t + 1/a)."""
    return bound2_stat(s, True) / (s.a / s.t + 1.0 / s.a)


@dataclass(frozen=True)
class Calibration:
    C1: float
    C2: float
    samples: int


def calibrate(a_max=10, t_max=500, a_min=2, mapper=map):
    """Pre-registered constants: maxima of both envelopes over the small grid."""
    pairs = coprime_grid(a_min, a_max, t_max)
    vals = list(mapper(_envelopes, pairs))
    return Calibration(
        C1=max(v[0] for v in vals), C2=max(v[1] for v in vals), samples=len(pairs)
    )


def _envelopes(pair):
    s = LemmaSample.from_pair(*pair)
    return envelope1(s), envelope2(s)


def envelopes(pair):
    """(envelope1, envelope2) for an (a, t) pair; picklable for worker pools."""
    return _envelopes(pair)
