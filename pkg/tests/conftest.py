import math


def factorize(n):
    """Trial division; returns {prime: exponent}."""
    out = {}
    p = 2
    while p * p <= n:
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
        p += 1
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def mu_oracle(n):
    f = factorize(n)
    if any(e > 1 for e in f.values()):
        return 0
    return (-1) ** len(f)


def divisors(n):
    return [d for d in range(1, n + 1) if n % d == 0]


def phi_oracle(n):
    return sum(1 for j in range(1, n + 1) if math.gcd(j, n) == 1)


def egcd(a, b):
    if b == 0:
        return a, 1, 0
    g, x, y = egcd(b, a % b)
    return g, y, x - (a // b) * y


def inverse_oracle(a, m):
    g, x, _ = egcd(a % m, m)
    assert g == 1
    return x % m


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
