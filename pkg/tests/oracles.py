"""Slow reference implementations used only by the tests."""

import math
from fractions import Fraction


def factorize(n):
    n = abs(n)
    out = {}
    q = 2
    while q * q <= n:
        while n % q == 0:
            out[q] = out.get(q, 0) + 1
            n //= q
        q += 1
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def von_mangoldt(n):
    f = factorize(n)
    return math.log(next(iter(f))) if len(f) == 1 else 0.0


def mobius(n):
    f = factorize(n)
    return 0 if any(e > 1 for e in f.values()) else (-1) ** len(f)


def liouville(n):
    return (-1) ** sum(factorize(n).values())


def divisor_count(n):
    return math.prod(e + 1 for e in factorize(n).values())


def is_prime(n):
    return n >= 2 and all(n % q for q in range(2, math.isqrt(n) + 1))


def euler_legendre(a, p):
    r = pow(a % p, (p - 1) // 2, p)
    return -1 if r == p - 1 else r


def kronecker_by_factoring(a, n):
    """Kronecker symbol from its definition: sign factor, (a|2) rule, Euler's criterion."""
    if n == 0:
        return 1 if abs(a) == 1 else 0
    out = 1
    if n < 0:
        out = -1 if a < 0 else 1
        n = -n
    for p, e in factorize(n).items():
        if p == 2:
            v = 0 if a % 2 == 0 else (1 if a % 8 in (1, 7) else -1)
        else:
            v = euler_legendre(a, p)
        out *= v**e
    return out


def beta_brute(polys, p):
    """E_{m,n mod p} ∏_j Λ_p(n + P_j(m)) straight from the definition."""
    total = Fraction(0)
    for m in range(p):
        for n in range(p):
            prod = Fraction(1)
            for poly in polys:
                v = sum(c * m**i for i, c in enumerate(poly))
                prod *= 0 if (n + v) % p == 0 else Fraction(p, p - 1)
            total += prod
    return total / (p * p)
