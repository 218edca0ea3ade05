"""Parameter sweeps over (N, theta, lambda) and empirical exponent fits."""

from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple

import numpy as np

from .arith import catalog
from .integrals import (
    correlation_fast,
    correlation_naive,
    dispersion_residual,
    mean_value,
    selberg_integral,
    symmetry_integral_exact,
    window_segment,
)

THETA0 = 0.05

CSV_HEADER = (
    "g_label",
    "N",
    "h",
    "Q",
    "theta",
    "lambda",
    "I_f",
    "J_f",
    "term1",
    "term2",
    "term3",
    "term4",
    "trivial",
    "ratio",
    "region_flag",
    "residual_normalized",
)


class BoundTerms(NamedTuple):
    term1: float  # N h
    term2: float  # h^3
    term3: float  # N h^2 (h / Q)
    term4: float  # N h^2 (Q^2 h / N^2)^(1/5)
    total: float
    hypothesis_ok: bool  # Q <= N / sqrt(h)
    h_below_Q: bool


def theorem_bound(N, h, Q):
    if min(N, h, Q) < 1:
        raise ValueError(f"N, h, Q must be positive, got {(N, h, Q)}")
    nh2 = N * h * h
    terms = (
        float(N * h),
        float(h**3),
        nh2 * h / Q,
        nh2 * (Q * Q * h / (N * N)) ** 0.2,
    )
    return BoundTerms(*terms, math.fsum(terms), Q * Q * h <= N * N, h < Q)


def optimal_T(N, h, Q):
    return (N * h * h / Q) ** 0.4


def in_new_region(theta, lam):
    """(1 + theta)/2 < lambda < 1 - theta/2."""
    return (1 + theta) / 2 < lam < 1 - theta / 2


def floor_power(N, x):
    """floor(N**x), robust to N**x landing a hair below an integer."""
    v = N**x
    r = round(v)
    return r if abs(v - r) <= 1e-9 * max(1.0, v) else math.floor(v)


@dataclass(frozen=True)
class ExperimentRecord:
    g_label: str
    N: int
    h: int
    Q: int
    theta: float
    lam: float
    I_f: int
    J_f: Fraction | int | None
    bound_terms: BoundTerms
    trivial_bound: int
    ratio: float
    T_opt: float
    region_flag: bool
    residual_normalized: float
    residual: int
    theta_nominal: float
    lam_nominal: float

    def row(self):
        b = self.bound_terms
        return {
            "g_label": self.g_label,
            "N": self.N,
            "h": self.h,
            "Q": self.Q,
            "theta": self.theta,
            "lambda": self.lam,
            "I_f": self.I_f,
            "J_f": self.J_f,
            "term1": b.term1,
            "term2": b.term2,
            "term3": b.term3,
            "term4": b.term4,
            "trivial": self.trivial_bound,
            "ratio": self.ratio,
            "region_flag": self.region_flag,
            "residual_normalized": self.residual_normalized,
        }

    @property
    def sort_key(self):
        return (self.g_label, self.theta_nominal, self.lam_nominal, self.N)


def realize(N, theta, lam, theta0=THETA0):
    """Grid point -> (h, Q, realized theta, realized lambda)."""
    if not theta0 < theta < 1 - theta0:
        raise ValueError(f"theta={theta} outside ({theta0}, {1 - theta0})")
    if not 0 < lam:
        raise ValueError(f"lambda must be positive, got {lam}")
    h = floor_power(N, theta)
    Q = max(1, floor_power(N, lam))
    if h < 1 or 2 * h > N:
        raise ValueError(f"grid point N={N}, theta={theta} gives unusable h={h}")
    logN = math.log(N)
    return h, Q, math.log(h) / logN, math.log(Q) / logN


def run_point(g_label, N, theta, lam, theta0=THETA0, selberg=True, correlation="fast"):
    h, Q, theta_r, lam_r = realize(N, theta, lam, theta0)
    g = catalog(g_label, Q)
    seg = window_segment(g, N, h)
    I_f = symmetry_integral_exact(seg, N, h).value
    correlate = correlation_fast if correlation == "fast" else correlation_naive
    disp = dispersion_residual(seg, N, h, table=correlate(seg, N, h), I_f=I_f)
    J_f = selberg_integral(seg, N, h, mean_value(g)).value if selberg else None
    trivial = N * h * h
    return ExperimentRecord(
        g_label=g_label,
        N=N,
        h=h,
        Q=Q,
        theta=theta_r,
        lam=lam_r,
        I_f=I_f,
        J_f=J_f,
        bound_terms=theorem_bound(N, h, Q),
        trivial_bound=trivial,
        ratio=I_f / trivial,
        T_opt=optimal_T(N, h, Q),
        region_flag=in_new_region(theta_r, lam_r),
        residual_normalized=disp.normalized,
        residual=disp.residual,
        theta_nominal=theta,
        lam_nominal=lam,
    )


@dataclass(frozen=True)
class FitResult:
    slope: float
    intercept: float
    residual_max: float
    points: int


def fit_loglog(xs, ys):
    """Least-squares line through (log x, log y)."""
    xs = np.asarray(xs, dtype=np.float64)
    ys = np.asarray(ys, dtype=np.float64)
    if xs.size < 3:
        raise ValueError(f"need at least 3 points, got {xs.size}")
    if np.unique(xs).size < 2:
        raise ValueError("degenerate family: all abscissae identical")
    if np.any(xs <= 0) or np.any(ys <= 0):
        raise ValueError("log-log fit needs positive data")
    lx, ly = np.log(xs), np.log(ys)
    slope, intercept = np.polyfit(lx, ly, 1)
    resid = ly - (slope * lx + intercept)
    return FitResult(float(slope), float(intercept), float(np.max(np.abs(resid))), xs.size)


def fit_exponent(records):
    """Slope of log I_f against log N along one (g, theta, lambda) family."""
    records = list(records)
    # realized exponents drift slightly with N; nominal families stay within this
    spread = 0.05
    if records and (
        len({r.g_label for r in records}) > 1
        or np.ptp([r.theta for r in records]) > spread
        or np.ptp([r.lam for r in records]) > spread
    ):
        raise ValueError("records mix several families")
    return fit_loglog([r.N for r in records], [r.I_f for r in records])


def ratio_trend_ok(ratios, max_violations=1, slack=0.05):
    """Non-increasing, except at most ``max_violations`` rises of at most ``slack``."""
    violations = 0
    for prev, cur in zip(ratios, ratios[1:]):
        if cur > prev:
            if cur > prev * (1 + slack):
                return False
            violations += 1
    return violations <= max_violations


def doubling_family(k_lo, k_hi):
    return [2**k for k in range(k_lo, k_hi + 1)]


def sweep_grid(thetas, lambdas, Ns, g_labels=("moebius",), threads=1, **kwargs):
    """One record per (g, theta, lambda, N), sorted by (g_label, theta, lambda, N)."""
    jobs = [(g, th, la, N) for g in g_labels for th in thetas for la in lambdas for N in Ns]
    if not jobs:
        return []

    def job(spec):
        g, th, la, N = spec
        return run_point(g, N, th, la, **kwargs)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            records = list(pool.map(job, jobs))
    else:
        records = [job(spec) for spec in jobs]
    return sorted(records, key=lambda r: r.sort_key)


def format_value(v):
    """Integers exact, floats to 12 significant digits, rationals as floats."""
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, Fraction):
        return str(v.numerator) if v.denominator == 1 else f"{float(v):.12g}"
    return f"{float(v):.12g}"


def json_value(v):
    if v is None or isinstance(v, (bool, str)):
        return v
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, Fraction) and v.denominator == 1:
        return v.numerator
    return float(f"{float(v):.12g}")


def records_to_csv(records):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for r in records:
        row = r.row()
        writer.writerow([row[k] if isinstance(row[k], str) else format_value(row[k]) for k in CSV_HEADER])
    return buf.getvalue()


def records_to_json(records):
    out = []
    for r in records:
        item = {k: json_value(v) for k, v in r.row().items()}
        item["T_opt"] = json_value(r.T_opt)
        out.append(item)
    return json.dumps(out, indent=2) + "\n"
