import io
import math
import random

import pytest
from hypothesis import given, strategies as st

from oracles import euler_legendre, kronecker_by_factoring
from primepatterns.arith_tables import small_primes
from primepatterns.char_sum import (
    RealCharacter,
    audit_case,
    complete_sum,
    gcd_product_scan,
    is_fundamental_discriminant,
    kronecker,
    legendre_table,
    weil_audit,
)
from primepatterns.errors import DomainError
from primepatterns.poly_family import parse_family


def test_examples():
    assert kronecker(2, 5) == -1
    assert kronecker(4, 15) == 1
    assert all(kronecker(a, 1) == 1 for a in range(-20, 20))
    with pytest.raises(DomainError):
        kronecker(0, 0)


@given(st.integers(-10**6, 10**6), st.integers(-10**4, 10**4))
def test_kronecker_against_definition(a, n):
    if a == 0 and n == 0:
        return
    assert kronecker(a, n) == kronecker_by_factoring(a, n)


def test_legendre_tables():
    for p in small_primes(100).tolist()[1:]:
        chi = legendre_table(p)
        assert [int(x) for x in chi] == [euler_legendre(a, p) for a in range(p)]
        assert [kronecker(a, p) for a in range(p)] == [euler_legendre(a, p) for a in range(p)]


def test_multiplicativity():
    rng = random.Random(7)
    for _ in range(10**4):
        a, b, n = rng.randrange(-10**5, 10**5), rng.randrange(-10**5, 10**5), rng.randrange(1, 10**5)
        assert kronecker(a * b, n) == kronecker(a, n) * kronecker(b, n)


@pytest.mark.parametrize("D", [-3, -4, 5, 8, -8, 12, -7, 13, 21, -20])
def test_real_characters(D):
    chi = RealCharacter(D)
    q = chi.modulus
    for n in range(1, 200):
        assert (chi(n) == 0) == (math.gcd(n, q) > 1)
        assert chi(-n) == chi(-1) * chi(n)
        assert chi(n) == chi(n + q)
    assert chi(-1) == chi.parity


def test_fundamental_discriminants():
    assert [D for D in range(-30, 31) if is_fundamental_discriminant(D)] == [
        -24, -23, -20, -19, -15, -11, -8, -7, -4, -3, 5, 8, 12, 13, 17, 21, 24, 28, 29,
    ]
    with pytest.raises(DomainError):
        RealCharacter(9)


def test_complete_sum_examples():
    twin = parse_family("0; y")
    assert complete_sum(twin, 5, 1) == -1
    assert complete_sum(twin, 7, 0) == 6  # p - 1 for a square
    r = complete_sum(parse_family("0; y; 2*y"), 7, 1)
    assert abs(r) <= 2 * math.sqrt(7) + 3
    with pytest.raises(DomainError):
        complete_sum(twin, 2, 1)
    with pytest.raises(DomainError):
        complete_sum(twin, 9, 1)


@given(st.sampled_from([3, 5, 7, 11, 13, 101]), st.integers(-50, 50), st.integers(-50, 50))
def test_complete_sum_shift_invariance(p, m, t):
    fam = parse_family("y; y^2 + 3; 5")
    shifted = fam.shift(t)
    assert complete_sum(fam, p, m) == complete_sum(shifted, p, m)


def test_weil_exhaustive_small():
    twin = parse_family("0; y")
    audit = weil_audit(twin, 3, 200, trials=None)
    assert audit.violations == 0 and audit.square_mismatches == 0
    assert audit.degenerate_cases == len(small_primes(200)) - 1  # m ≡ 0 only
    p3 = weil_audit(twin, 3, 3, trials=None)
    assert [r.m for r in p3.rows] == [0, 1, 2]


def test_weil_subsets_and_csv():
    audit = weil_audit(parse_family("0; y; 2*y"), 3, 60, trials=10, seed=3, subsets=True)
    assert {r.J for r in audit.rows} == {(1,), (2,), (3,), (1, 2), (1, 3), (2, 3), (1, 2, 3)}
    assert audit.violations == 0
    buf = io.StringIO()
    audit.write_csv(buf)
    assert buf.getvalue().startswith("p,m,J,sum")


def test_degenerate_square_case():
    row = audit_case(parse_family("0; y"), 11, 0)
    assert row.degenerate and row.square and row.total == 11 - 1


def test_gcd_scan():
    r = gcd_product_scan((0, 1), 6, 100, 1 / 12)
    assert r.exceptional_count == 67
    assert r.markov_bound >= r.exceptional_count
    assert gcd_product_scan((0, 1), 1, 100, 0.5).exceptional_count == 0
    assert gcd_product_scan((7,), 30, 100, 0.1).exceptional_count == 0
    with pytest.raises(DomainError):
        gcd_product_scan((0,), 6, 10, 0.5)
