import numpy as np
import pytest

from primepatterns.errors import ContractError, DomainError
from primepatterns.gvn_explorer import evaluate
from primepatterns.poly_family import parse_family


def brute_lhs(fam, N, fs, theta, B):
    tot = 0
    get = lambda f, x: f[x + B] if -B <= x <= B else 0
    for m in range(1, N + 1):
        for n in range(-B, B + 1):
            t = theta[m - 1] * get(fs[0], n)
            for f, v in zip(fs[1:], fam.values(m)):
                t *= get(f, n + v)
            tot += t
    return abs(tot) / N ** (fam.d + 1)


def test_against_brute_force():
    rng = np.random.default_rng(0)
    fam = parse_family("y; y^2")
    N, B = 6, 2 * 36
    fs = [np.exp(2j * np.pi * rng.random(2 * B + 1)) for _ in range(3)]
    theta = np.exp(2j * np.pi * rng.random(N))
    r = evaluate(fam, N, fs, 2, theta)
    assert r.lhs == pytest.approx(brute_lhs(fam, N, fs, theta, B), rel=1e-12)
    assert r.label == "exploratory"


def test_zero_last_function():
    fam = parse_family("0; y")
    r = evaluate(fam, 20, [np.ones(81), np.ones(81), np.zeros(81)], 2)
    assert r.lhs == 0 and r.gowers_value == 0


def test_all_ones():
    r = evaluate(parse_family("0; y"), 20, [np.ones(81)] * 3, 2)
    assert r.gowers_value == pytest.approx(1.0)
    assert 0 < r.lhs < 5


def test_triangle_and_modulation():
    rng = np.random.default_rng(1)
    fam = parse_family("0; y^2")
    N, B = 10, 200
    fs = [rng.choice([-1.0, 1.0], 2 * B + 1) for _ in range(3)]
    theta = np.exp(2j * np.pi * rng.random(N))
    r = evaluate(fam, N, fs, 2, theta)
    assert r.lhs <= np.sum(np.abs(theta)) * (2 * B + 1) / N**3
    mod = fs[:2] + [fs[2] * np.exp(2j * np.pi * 0.37 * np.arange(-B, B + 1))]
    r2 = evaluate(fam, N, mod, 2, theta)
    assert r2.gowers_value == pytest.approx(r.gowers_value, rel=1e-9)


def test_abs_theta_bounds_for_nonnegative_functions():
    rng = np.random.default_rng(2)
    fam = parse_family("y; 2*y")
    N, B = 30, 60
    for _ in range(10):
        fs = [rng.random(2 * B + 1) for _ in range(3)]
        theta = np.exp(2j * np.pi * rng.random(N)) * rng.random(N)
        r = evaluate(fam, N, fs, 2, theta)
        assert r.lhs <= r.lhs_abs_theta * (1 + 1e-12)


def test_contracts():
    fam = parse_family("0; y")
    with pytest.raises(ContractError):
        evaluate(fam, 5, [np.ones(21)] * 2 + [2 * np.ones(21)], 2)
    with pytest.raises(ContractError):
        evaluate(fam, 5, [np.ones(30)] * 3, 2, starts=[-10, -10, -10])
    with pytest.raises(DomainError):
        evaluate(fam, 5, [np.ones(21)] * 3, 4)
