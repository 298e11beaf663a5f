
import numpy as np
import pytest
from hypothesis import given, strategies as st

from primepatterns.errors import CapacityError, DomainError
from primepatterns.gowers import gcs_check, gowers_power, interval_norm, mu_H, multilinear_form


def rand_complex(rng, L):
    return rng.normal(size=L) + 1j * rng.normal(size=L)


def literal_u2(f):
    """Σ_{x,h1,h2} f(x) conj f(x+h1) conj f(x+h2) f(x+h1+h2), plain Python."""
    L = len(f)
    get = lambda i: f[i] if 0 <= i < L else 0
    tot = 0
    for x in range(L):
        for h1 in range(-L, L + 1):
            for h2 in range(-L, L + 1):
                tot += get(x) * get(x + h1).conjugate() * get(x + h2).conjugate() * get(x + h1 + h2)
    return tot


def test_u2_against_literal_python():
    rng = np.random.default_rng(1)
    f = [complex(z) for z in rand_complex(rng, 7)]
    ref = literal_u2(f).real
    for method in ("naive", "recursive", "fft_u2", "recursive_fft"):
        assert gowers_power(f, 2, method) == pytest.approx(ref, rel=1e-12)


def test_u1_is_squared_sum():
    f = np.array([1, 2j, -3])
    assert gowers_power(f, 1, "naive") == pytest.approx(abs(1 + 2j - 3) ** 2)


@pytest.mark.parametrize("s", [2, 3, 4])
def test_recursive_fft_matches_recursive(s):
    rng = np.random.default_rng(s)
    f = rand_complex(rng, 12)
    assert gowers_power(f, s, "recursive_fft") == pytest.approx(gowers_power(f, s, "recursive"), rel=1e-10)


def test_indicator_closed_form():
    # ||1_[L]||_{U^2}^4 counts additive quadruples: (2L^3 + L)/3
    for L in (1, 5, 33):
        assert gowers_power(np.ones(L), 2) == pytest.approx((2 * L**3 + L) / 3)


@given(st.integers(1, 20), st.integers(-30, 30), st.integers(0, 2**32 - 1))
def test_translation_and_conjugation_invariance(L, shift, seed):
    rng = np.random.default_rng(seed)
    f = rand_complex(rng, L)
    a = interval_norm(f, (0, L - 1 + 40), 2, start=0).unnormalised
    b = interval_norm(f, (shift, shift + L - 1 + 40), 2, start=shift).unnormalised
    assert a == pytest.approx(b, rel=1e-10)
    assert gowers_power(np.conj(f), 3) == pytest.approx(gowers_power(f, 3), rel=1e-10)


@given(st.integers(2, 24), st.floats(0, 1), st.integers(0, 2**32 - 1))
def test_linear_phase_invariance(L, alpha, seed):
    f = rand_complex(np.random.default_rng(seed), L)
    g = f * np.exp(2j * np.pi * alpha * np.arange(L))
    for s in (2, 3):
        assert gowers_power(g, s) == pytest.approx(gowers_power(f, s), rel=1e-9)


def test_normalised_indicator_is_one():
    r = interval_norm(np.ones(100), (0, 99), 3)
    assert r.normalised == pytest.approx(1.0)
    assert r.method == "recursive_fft"


def test_gcs_random():
    rng = np.random.default_rng(5)
    for _ in range(20):
        fs = [np.exp(2j * np.pi * rng.random(9)) * rng.random(9) for _ in range(4)]
        assert gcs_check(fs, 2)[2]


def test_multilinear_identical_inputs():
    f = rand_complex(np.random.default_rng(3), 6)
    fs = [np.conj(f) if bin(w).count("1") % 2 else f for w in range(4)]
    assert multilinear_form(fs, 2).real == pytest.approx(gowers_power(f, 2, "fft_u2"))


def test_errors():
    with pytest.raises(DomainError):
        gowers_power([1, 2], 3, "fft_u2")
    with pytest.raises(DomainError):
        gowers_power([1, 2], 0)
    with pytest.raises(CapacityError):
        gowers_power(np.ones(500), 4, "naive")
    with pytest.raises(DomainError):
        interval_norm([1], (0, 0.5), 2)


def test_mu_H():
    from fractions import Fraction

    assert mu_H(4, 0) == Fraction(4, 16)
    assert mu_H(4.9, 3) == Fraction(1, 16)
    assert mu_H(4, 4) == 0
    assert sum(mu_H(7, h) for h in range(-7, 8)) == 1
    with pytest.raises(DomainError):
        mu_H(0.5, 0)
