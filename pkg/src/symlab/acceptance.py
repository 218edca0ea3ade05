"""Acceptance suite shared by ``symlab selftest`` and the pytest gate.

Each criterion returns a :class:`CriterionResult`.  The report text holds
only deterministic quantities; wall-clock times go to the caller.
"""

from __future__ import annotations

import math
import random
import time
from concurrent.futures import ThreadPoolExecutor
from contextlib import contextmanager
from dataclasses import dataclass, field

import numpy as np

from . import expsums, lemma
from .arith import catalog
from .integrals import (
    correlation_fast,
    correlation_naive,
    dispersion_residual,
    integrand_at,
    symmetry_integral_exact,
    symmetry_integral_midpoint,
    window_segment,
)
from .sweep import fit_exponent, floor_power, format_value, ratio_trend_ok, run_point

SEED = 20_081_017


@dataclass
class CriterionResult:
    number: int
    name: str
    passed: bool
    budget: float
    details: dict = field(default_factory=dict)
    elapsed: float = 0.0

    @property
    def within_budget(self):
        return self.elapsed <= self.budget

    @property
    def ok(self):
        return self.passed and self.within_budget

    def line(self):
        status = "PASS" if self.passed else "FAIL"
        detail = " ".join(
            f"{k}={v if isinstance(v, str) else format_value(v)}" for k, v in self.details.items()
        )
        return f"criterion {self.number} {self.name}: {status} {detail}".rstrip()


@contextmanager
def _pool(threads):
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            yield pool.map
    else:
        yield map


def ramanujan_equality(threads=1):
    ns = np.arange(0, 301)

    def row(t):
        direct = expsums.ramanujan_row(t, ns)
        closed = np.array([expsums.ramanujan_closed(t, int(n)) for n in ns], dtype=np.float64)
        return float(np.max(np.abs(direct - closed)))

    with _pool(threads) as pmap:
        worst = max(pmap(row, range(1, 301)))
    return CriterionResult(1, "ramanujan-closed-form", worst <= 1e-6, 10.0,
                           {"pairs": 300 * 301, "max_abs_diff": worst})


def weil_estermann(threads=1, c_max=400, ab_max=10):
    ab = np.arange(0, ab_max + 1)

    def per_modulus(c):
        S = expsums.kloosterman_table(c, ab, ab)
        bound = np.array(
            [[expsums.weil_bound(int(a), int(b), c) for b in ab] for a in ab]
        )
        slack = bound - np.abs(S)
        return int(np.sum(slack < -1e-6)), float(slack.min())

    with _pool(threads) as pmap:
        results = list(pmap(per_modulus, range(1, c_max + 1)))
    failures = sum(r[0] for r in results)
    return CriterionResult(2, "weil-estermann", failures == 0, 60.0, {
        "sums": c_max * (ab_max + 1) ** 2,
        "violations": failures,
        "min_slack": min(r[1] for r in results),
    })


def identity_samples(count=20):
    named = [(3, 101), (7, 1000), (13, 2003)]
    rng = random.Random(SEED)
    pairs = list(named)
    while len(pairs) < count:
        a = rng.randint(1, 30)
        t = rng.randint(a + 1, 2000)
        if math.gcd(a, t) == 1 and (a, t) not in pairs:
            pairs.append((a, t))
    return pairs


def _identity_margin(pair):
    s = lemma.LemmaSample.from_pair(*pair)
    resid = lemma.identity_residual(s)
    return resid, resid / (1e-8 * (1 + s.t / 1e4))


def lemma_identity(threads=1):
    pairs = identity_samples()
    with _pool(threads) as pmap:
        out = list(pmap(_identity_margin, pairs))
    worst = max(m for _, m in out)
    return CriterionResult(3, "lemma-identity", worst <= 1.0, 120.0, {
        "samples": len(pairs),
        "max_residual": max(r for r, _ in out),
        "max_residual_over_tol": worst,
    })


def bound_sample(count=200):
    pairs = lemma.coprime_grid(2, 30, 5000)
    return random.Random(SEED).sample(pairs, count)


def lemma_bounds(threads=1):
    with _pool(threads) as pmap:
        cal = lemma.calibrate(a_max=10, t_max=500, mapper=pmap)
        env = list(pmap(lemma.envelopes, bound_sample()))
    e1 = max(v[0] for v in env)
    e2 = max(v[1] for v in env)
    passed = e1 <= 2 * cal.C1 and e2 <= 2 * cal.C2
    return CriterionResult(4, "lemma-bounds", passed, 300.0, {
        "calibration_pairs": cal.samples,
        "C1": cal.C1,
        "C2": cal.C2,
        "grid_pairs": len(env),
        "max_env1": e1,
        "max_env2": e2,
    })


def _dispersion_point(k):
    N = 2**k
    h, Q = floor_power(N, 0.4), floor_power(N, 0.3)
    seg = window_segment(catalog("moebius", Q), N, h)
    direct = symmetry_integral_exact(seg, N, h).value
    midpoint = symmetry_integral_midpoint(seg, N, h).value
    agree = direct == midpoint
    if N <= 2**11:
        # term-by-term evaluation at the midpoints, pure Python
        brute = sum(integrand_at(seg, m + 0.5, h) for m in range(N, 2 * N))
        agree = agree and brute == direct
    return dispersion_residual(seg, N, h, I_f=direct).normalized, agree


def dispersion_identity(threads=1):
    with _pool(threads) as pmap:
        out = list(pmap(_dispersion_point, range(10, 17)))
    norms = [n for n, _ in out]
    spread = max(norms) / min(norms)
    exact = all(a for _, a in out)
    return CriterionResult(5, "dispersion-identity", spread <= 10 and exact, 120.0, {
        "family": "N=2^10..2^16",
        "min_normalized": min(norms),
        "max_normalized": max(norms),
        "max_over_min": spread,
        "methods_agree": exact,
    })


def exact_degeneracies(threads=1):
    checks = {}
    N, h = 2000, 25
    const = window_segment(catalog("delta1", 7), N, h)
    checks["constant_zero"] = symmetry_integral_exact(const, N, h).value == 0
    seg = window_segment(catalog("moebius", 40), N, h)
    base = symmetry_integral_exact(seg, N, h).value
    checks["shift_invariant"] = all(
        symmetry_integral_exact(seg.shifted(c), N, h).value == base for c in range(-3, 4)
    )
    N, h = 10_000, 100

    def compare(label):
        s = window_segment(catalog(label, 50), N, h)
        return correlation_fast(s, N, h) == correlation_naive(s, N, h)

    labels = ("ones", "moebius", "squarefree-indicator-transform")
    with _pool(threads) as pmap:
        checks["fast_equals_naive"] = all(pmap(compare, labels))
    return CriterionResult(6, "exact-degeneracies", all(checks.values()), 30.0, checks)


def reciprocity(threads=1):
    count = bad = 0
    for q in range(3, 201):
        for a in range(2, q):
            if math.gcd(a, q) == 1:
                count += 1
                bad += not expsums.reciprocity_check(a, q)
    return CriterionResult(7, "reciprocity", bad == 0, 5.0, {"pairs": count, "failures": bad})


def geometric_cases(count=1000):
    rng = random.Random(SEED)
    cases = []
    for _ in range(count):
        den = rng.randint(2, 10_000)
        num = rng.randint(-10**6, 10**6)
        lo = rng.randint(-10_000, 10_000)
        cases.append((num, den, lo, lo + rng.randint(0, 9_999)))
    return cases


def geometric_bound(threads=1):
    worst = 0.0
    bad = 0
    for num, den, lo, hi in geometric_cases():
        value = abs(expsums.geometric_sum(num, den, lo, hi))
        bound = expsums.geometric_bound(num, den, lo, hi)
        worst = max(worst, value / bound)
        bad += value > bound + 1e-9
    return CriterionResult(8, "geometric-sum-bound", bad == 0, 5.0,
                           {"cases": 1000, "violations": bad, "max_ratio": worst})


def theorem_trend(threads=1, theta=0.45, lam=0.75, k_lo=14, k_hi=20):
    Ns = [2**k for k in range(k_lo, k_hi + 1)]
    with _pool(threads) as pmap:
        records = list(pmap(lambda N: run_point("moebius", N, theta, lam, selberg=False), Ns))
    ratios = [r.ratio for r in records]
    fit = fit_exponent(records)
    limit = 1 + 2 * theta - 0.01
    trend = ratio_trend_ok(ratios)
    region = all(r.region_flag for r in records)
    return CriterionResult(9, "theorem-trend", trend and fit.slope < limit and region, 600.0, {
        "family": f"N=2^{k_lo}..2^{k_hi}",
        "ratio_first": ratios[0],
        "ratio_last": ratios[-1],
        "trend_ok": trend,
        "in_region": region,
        "slope": fit.slope,
        "slope_limit": limit,
    })


CRITERIA = (
    ramanujan_equality,
    weil_estermann,
    lemma_identity,
    lemma_bounds,
    dispersion_identity,
    exact_degeneracies,
    reciprocity,
    geometric_bound,
    theorem_trend,
)


def run_criterion(fn, threads=1):
    start = time.perf_counter()
    result = fn(threads=threads)
    result.elapsed = time.perf_counter() - start
    return result


def run_all(threads=1, only=None, log=None):
    results = []
    for fn in CRITERIA:
        if only and fn.__name__ not in only:
            continue
        res = run_criterion(fn, threads)
        if log is not None:
            log(f"{res.line()} ({res.elapsed:.1f}s of {res.budget:.0f}s)")
        results.append(res)
    return results


def report(results):
    lines = [r.line() for r in results]
    lines.append(f"summary: {sum(r.passed for r in results)}/{len(results)} criteria passed")
    return "\n".join(lines) + "\n"
