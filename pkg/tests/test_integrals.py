import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from symlab.arith import CapacityError, Segment, SieveFunction, catalog, dirichlet_convolve
from symlab.integrals import (
    CorrelationTable,
    WindowParams,
    correlation_fast,
    correlation_naive,
    dispersion_residual,
    integrand_at,
    lcm_upto,
    mean_value,
    selberg_integral,
    signed_window_sums,
    symmetry_integral_exact,
    symmetry_integral_midpoint,
    weight_sum_stat,
    weight_W,
    weights,
    window_segment,
)


def brute_correlation(f, N, a):
    return sum(f(n) * f(n - a) for n in range(N + 1, 2 * N + 1))


def brute_f(g):
    return lambda n: sum(g(q) for q in range(1, g.Q + 1) if n % q == 0)


class TestWeights:
    @pytest.mark.parametrize("h", [1, 2, 5, 17])
    def test_examples(self, h):
        assert weight_W(0, h) == 2 * h
        assert weight_W(h, h) == -h
        assert weight_W(2 * h, h) == 0
        assert weight_W(2 * h + 1, h) == 0

    def test_weight_sum_examples(self):
        assert weight_sum_stat(1, 1) == -2
        assert weight_sum_stat(2, 1) == -4
        assert weight_sum_stat(3, 7) == 0

    @pytest.mark.parametrize("h", range(1, 40))
    def test_autocorrelation_of_sign_window(self, h):
        # W(a) = sum_k s(k) s(k + a), s = -1 on (-h, 0], +1 on (0, h]
        s = {k: (1 if k > 0 else -1) for k in range(-h + 1, h + 1)}
        for a in range(-2 * h - 1, 2 * h + 2):
            assert weight_W(a, h) == sum(v * s.get(k + a, 0) for k, v in s.items())
        assert int(weights(h).sum()) == 0
        assert weight_sum_stat(h, 1) == -2 * h

    @given(st.integers(1, 200), st.integers(-500, 500))
    def test_even_and_bounded(self, h, a):
        assert weight_W(a, h) == weight_W(-a, h)
        assert abs(weight_W(a, h)) <= 2 * h

    def test_array_matches_scalar(self):
        h = 9
        assert list(weights(h)) == [weight_W(a, h) for a in range(-2 * h, 2 * h + 1)]

    def test_bad_arguments(self):
        with pytest.raises(ValueError):
            weight_W(1, 0)
        with pytest.raises(ValueError):
            weight_sum_stat(3, 0)


class TestWindow:
    def test_bounds(self):
        p = WindowParams(100, 10)
        assert p.segment_bounds == (81, 220)
        assert p.theta == pytest.approx(0.5)

    @pytest.mark.parametrize("N,h", [(10, 0), (10, 6), (1, 1)])
    def test_rejected(self, N, h):
        with pytest.raises(ValueError):
            WindowParams(N, h)


class TestCorrelation:
    def test_small_against_double_loop(self):
        N, h, g = 10, 2, catalog("ones", 3)
        seg = window_segment(g, N, h)
        f = brute_f(g)
        table = correlation_naive(seg, N, h)
        for a in table.lags:
            assert table[int(a)] == brute_correlation(f, N, int(a))
        assert table == correlation_fast(seg, N, h)

    def test_constant_and_delta(self):
        N, h = 50, 5
        ones = correlation_naive(window_segment(catalog("delta1", 4), N, h), N, h)
        assert all(v == N for v in ones.as_dict().values())
        # f = indicator of n = 1 vanishes on the window
        unit = correlation_naive(window_segment(catalog("moebius", 200), N, h), N, h)
        assert not np.any(unit.values)

    def test_fast_equals_naive(self):
        N, h = 10_000, 100
        seg = window_segment(catalog("moebius", 50), N, h)
        assert correlation_fast(seg, N, h) == correlation_naive(seg, N, h)

    def test_zero_function(self):
        N, h = 40, 3
        seg = Segment(1, 2 * N + 2 * h, np.zeros(2 * N + 2 * h, dtype=np.int64))
        assert not np.any(correlation_fast(seg, N, h).values)

    def test_coverage(self):
        seg = dirichlet_convolve(catalog("ones", 5), 90, 200)
        with pytest.raises(ValueError):
            correlation_naive(seg, 100, 10)

    def test_capacity(self):
        N, h = 20, 2
        big = np.full(2 * N + 2 * h, 2**31, dtype=np.int64)
        with pytest.raises(CapacityError):
            correlation_naive(Segment(1, 2 * N + 2 * h, big), N, h)

    def test_table_indexing(self):
        t = CorrelationTable(1, [1, 2, 3, 4])
        assert t.as_dict() == {-2: 1, -1: 2, 1: 3, 2: 4}
        with pytest.raises(KeyError):
            t[0]
        with pytest.raises(ValueError):
            CorrelationTable(2, [1, 2])


def midpoint_oracle(seg, N, h):
    return sum(integrand_at(seg, Fraction(2 * m + 1, 2), h) for m in range(N, 2 * N))


class TestSymmetryIntegral:
    def test_frozen_small_value(self):
        N, h, g = 2, 1, catalog("ones", 4)
        seg = window_segment(g, N, h)
        assert symmetry_integral_exact(seg, N, h).value == 1
        assert midpoint_oracle(seg, N, h) == 1

    @pytest.mark.parametrize("label", ["ones", "moebius", "squarefree-indicator-transform"])
    def test_three_methods_agree(self, label):
        N, h = 300, 7
        seg = window_segment(catalog(label, 20), N, h)
        exact = symmetry_integral_exact(seg, N, h).value
        assert exact == symmetry_integral_midpoint(seg, N, h).value
        assert exact == midpoint_oracle(seg, N, h)

    def test_piecewise_constant(self):
        N, h = 200, 6
        seg = window_segment(catalog("moebius", 15), N, h)
        D = signed_window_sums(seg, N, h)
        rng = random.Random(7)
        for _ in range(200):
            m = rng.randrange(N, 2 * N)
            x = m + Fraction(rng.randint(1, 999), 1000)
            assert integrand_at(seg, x, h) == int(D[m - N]) ** 2

    @pytest.mark.parametrize("c", range(-3, 4))
    def test_shift_invariance(self, c):
        N, h = 500, 9
        seg = window_segment(catalog("moebius", 25), N, h)
        base = symmetry_integral_exact(seg, N, h).value
        assert symmetry_integral_exact(seg.shifted(c), N, h).value == base

    def test_constant_function(self):
        N, h = 400, 11
        seg = window_segment(catalog("delta1", 9), N, h)
        assert symmetry_integral_exact(seg, N, h).value == 0

    @settings(max_examples=30, deadline=None)
    @given(st.integers(4, 300), st.integers(1, 30), st.integers(1, 2**20))
    def test_random_segments(self, N, Q, seed):
        h = max(1, N // 10)
        rng = random.Random(seed)
        g = SieveFunction(Q, [rng.randint(-2, 2) for _ in range(Q)])
        seg = window_segment(g, N, h)
        exact = symmetry_integral_exact(seg, N, h).value
        assert exact == symmetry_integral_midpoint(seg, N, h).value
        assert 0 <= exact <= N * (2 * h * max(1, seg.max_abs)) ** 2

    def test_capacity(self):
        N, h = 100, 10
        seg = Segment(1, 2 * N + 2 * h, np.full(2 * N + 2 * h, 2**60, dtype=np.int64))
        with pytest.raises(CapacityError):
            symmetry_integral_exact(seg, N, h)

    def test_coverage(self):
        seg = dirichlet_convolve(catalog("ones", 4), 100, 200)
        with pytest.raises(ValueError):
            symmetry_integral_exact(seg, 100, 5)


class TestSelberg:
    def test_lcm(self):
        assert [lcm_upto(q) for q in range(1, 11)] == [1, 2, 6, 12, 60, 60, 420, 840, 2520, 2520]

    def test_mean_values(self):
        assert mean_value(catalog("delta1", 10)) == 1
        assert mean_value(catalog("ones", 4)) == Fraction(25, 12)
        assert mean_value(catalog("moebius", 3)) == Fraction(1, 6)

    def test_constant_one(self):
        N, h = 300, 8
        seg = window_segment(catalog("delta1", 5), N, h)
        assert selberg_integral(seg, N, h, 1).value == 0

    def test_zero_mean_gives_square_sum(self):
        N, h = 300, 8
        seg = window_segment(catalog("delta1", 5), N, h)
        assert selberg_integral(seg, N, h, 0).value == N * h * h

    def test_against_double_loop(self):
        N, h, g = 100, 5, catalog("moebius", 10)
        seg = window_segment(g, N, h)
        m_g = mean_value(g)
        f = brute_f(g)
        expected = sum(
            (sum(f(n) for n in range(m + 1, m + h + 1)) - h * m_g) ** 2 for m in range(N, 2 * N)
        )
        assert selberg_integral(seg, N, h, m_g).value == expected


class TestDispersion:
    def test_exact_decomposition(self):
        N, h = 1000, 10
        seg = window_segment(catalog("moebius", 30), N, h)
        d = dispersion_residual(seg, N, h)
        assert d.I_f == symmetry_integral_exact(seg, N, h).value
        assert d.residual == d.I_f - d.weighted_sum
        assert d.normalized == abs(d.residual) / (N * h + h**3)

    def test_weighted_sum_by_hand(self):
        N, h = 60, 3
        seg = window_segment(catalog("ones", 6), N, h)
        table = correlation_naive(seg, N, h)
        by_hand = sum(weight_W(a, h) * table[a] for a in range(-2 * h, 2 * h + 1) if a)
        assert dispersion_residual(seg, N, h, table=table).weighted_sum == by_hand

    def test_normalized_stable_across_doubling(self):
        h = 10
        norms = []
        for N in (1000, 2000):
            seg = window_segment(catalog("moebius", 30), N, h)
            norms.append(dispersion_residual(seg, N, h).normalized)
        assert max(norms) / min(norms) <= 4
