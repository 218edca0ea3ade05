import math
import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import divisors, inverse_oracle, mu_oracle, phi_oracle
from symlab.arith import (
    CATALOG_NAMES,
    CapacityError,
    Segment,
    SieveFunction,
    catalog,
    dirichlet_convolve,
    divisor_count,
    eratosthenes_transform,
    mod_inverse,
    sieve_mobius,
    sieve_phi,
)


class TestSieves:
    def test_mobius_examples(self):
        mu = sieve_mobius(30)
        assert mu[1] == 1
        assert mu[4] == 0
        assert mu[30] == mu_oracle(30) == -1

    def test_phi_examples(self):
        phi = sieve_phi(36)
        assert phi[1] == 1
        assert phi[7] == 6
        assert phi[36] == phi_oracle(36) == 12

    def test_divisor_examples(self):
        d = divisor_count(13)
        assert d[1] == 1
        assert d[12] == len(divisors(12)) == 6
        assert d[13] == 2

    @pytest.mark.parametrize("fn", [sieve_mobius, sieve_phi, divisor_count])
    def test_zero_limit_rejected(self, fn):
        with pytest.raises(ValueError):
            fn(0)

    def test_tables_match_oracles(self):
        mu, phi, d = sieve_mobius(400), sieve_phi(400), divisor_count(400)
        for n in range(1, 401):
            assert mu[n] == mu_oracle(n)
            assert phi[n] == phi_oracle(n)
            assert d[n] == len(divisors(n))

    def test_multiplicativity(self):
        rng = random.Random(1)
        phi, d = sieve_phi(10**4), divisor_count(10**4)
        checked = 0
        while checked < 100:
            m, n = rng.randint(1, 100), rng.randint(1, 100)
            if math.gcd(m, n) != 1:
                continue
            assert phi[m * n] == phi[m] * phi[n]
            assert d[m * n] == d[m] * d[n]
            checked += 1


class TestModInverse:
    def test_examples(self):
        assert mod_inverse(3, 7) == 5 == inverse_oracle(3, 7)
        assert mod_inverse(1, 9) == 1

    def test_non_coprime(self):
        with pytest.raises(ValueError):
            mod_inverse(2, 4)

    def test_all_small_pairs(self):
        for m in range(2, 501):
            for a in range(1, m):
                if math.gcd(a, m) == 1:
                    assert mod_inverse(a, m) * a % m == 1

    @given(st.integers(2, 10**12), st.integers(-(10**12), 10**12))
    def test_range_and_agreement(self, m, a):
        if math.gcd(a, m) != 1:
            return
        x = mod_inverse(a, m)
        assert 1 <= x <= m - 1 or m == 2
        assert x == inverse_oracle(a, m)


class TestConvolution:
    def test_delta_gives_ones(self):
        seg = dirichlet_convolve(catalog("delta1", 5), 10, 40)
        assert np.all(seg.values == 1)

    def test_ones_counts_small_divisors(self):
        Q = 12
        seg = dirichlet_convolve(catalog("ones", Q), 1, 300)
        for n in range(1, 301):
            assert seg[n] == sum(1 for q in divisors(n) if q <= Q)

    def test_moebius_full_support_is_unit_at_one(self):
        seg = dirichlet_convolve(catalog("moebius", 200), 1, 200)
        assert seg[1] == 1
        assert np.all(seg.values[1:] == 0)

    def test_random_segment_against_enumeration(self):
        rng = random.Random(3)
        g = SieveFunction(60, [rng.randint(-3, 3) for _ in range(60)], "random")
        lo = rng.randint(10**5, 10**6)
        seg = dirichlet_convolve(g, lo, lo + 999)
        for n in range(lo, lo + 1000):
            expected = sum(g(q) for q in range(1, 61) if n % q == 0)
            assert seg[n] == expected

    def test_capacity(self):
        with pytest.raises(CapacityError):
            dirichlet_convolve(catalog("ones", 3), 2**63 - 5, 2**63 + 5)

    def test_bad_bounds(self):
        with pytest.raises(ValueError):
            dirichlet_convolve(catalog("ones", 3), 0, 10)


class TestTransform:
    def test_constant_one(self):
        g = eratosthenes_transform(Segment(1, 50, np.ones(50)))
        assert g(1) == 1 and all(g(q) == 0 for q in range(2, 51))

    def test_divisor_function(self):
        g = eratosthenes_transform(Segment(1, 100, divisor_count(100)[1:]))
        assert np.all(g.coeffs == 1)

    def test_identity_gives_phi(self):
        L = 120
        g = eratosthenes_transform(Segment(1, L, np.arange(1, L + 1)))
        # brute-force inversion: g(n) = sum_{d | n} mu(d) n/d
        for n in range(1, L + 1):
            assert g(n) == sum(mu_oracle(d) * (n // d) for d in divisors(n)) == phi_oracle(n)

    def test_must_start_at_one(self):
        with pytest.raises(ValueError):
            eratosthenes_transform(Segment(2, 10, np.ones(9)))

    @pytest.mark.parametrize("name", CATALOG_NAMES)
    def test_round_trip(self, name):
        Q = 1000
        g = catalog(name, Q)
        back = eratosthenes_transform(dirichlet_convolve(g, 1, Q))
        assert np.array_equal(back.coeffs, g.coeffs)


class TestCatalog:
    def test_examples(self):
        assert list(catalog("delta1", 5).coeffs) == [1, 0, 0, 0, 0]
        assert list(catalog("moebius", 4).coeffs) == [mu_oracle(n) for n in range(1, 5)]
        assert list(catalog("moebius", 4).coeffs) == [1, -1, -1, 0]
        assert list(catalog("ones", 3).coeffs) == [1, 1, 1]

    def test_unknown(self):
        with pytest.raises(ValueError):
            catalog("zeta", 4)

    def test_squarefree_transform_inverts_mu_squared(self):
        Q = 500
        mu2 = np.array([mu_oracle(n) ** 2 for n in range(1, Q + 1)])
        g = eratosthenes_transform(Segment(1, Q, mu2))
        assert np.array_equal(g.coeffs, catalog("squarefree-indicator-transform", Q).coeffs)

    @pytest.mark.parametrize("name", CATALOG_NAMES)
    def test_growth_witness_finite(self, name):
        w = catalog(name, 1000).growth_witness
        assert math.isfinite(w) and w <= 1.0

    def test_wrong_length(self):
        with pytest.raises(ValueError):
            SieveFunction(3, [1, 2])

    @settings(max_examples=50)
    @given(st.integers(2, 300))
    def test_support_convention(self, Q):
        g = catalog("ones", Q)
        assert g(Q) == 1 and g(Q + 1) == 0 and g(0) == 0
        assert g.level(Q * Q) == pytest.approx(0.5)
