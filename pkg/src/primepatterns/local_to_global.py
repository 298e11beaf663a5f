"""Mean values of products of local functions versus the product of their local means.

A local function f(p, n) is p-periodic in n and equal to 1 once p exceeds a
declared support bound.  For such f,

    E_{n<=N} ∏_p f(p, n)  ≈  ∏_p E_{n mod p} f(p, n),

and the gap between the two sides is what the routines here report.
"""

from __future__ import annotations

import math
import random
from dataclasses import asdict, dataclass
from fractions import Fraction
from typing import Callable

import numpy as np

from .arith_tables import small_primes
from .errors import ContractError, DomainError
from .local_density import lambda_p
from .poly_family import horner

Evaluator = Callable[[int, int], "Fraction | float | int"]


@dataclass
class LocalFunctionSpec:
    evaluator: Evaluator
    support_bound: int
    fixed_divisor_poly: tuple = (1,)
    C: float = 1.0
    name: str = "custom"

    def primes(self):
        return small_primes(int(self.support_bound)).tolist() if self.support_bound >= 2 else []

    def local_table(self, p: int) -> list:
        """f(p, r) for r = 0..p-1, kept exact when the evaluator returns rationals."""
        return [self.evaluator(p, r) for r in range(p)]

    def check(self, samples: int = 64, seed: int = 0) -> None:
        """Spot-test periodicity, support, and |f - 1| <= 1_{p|P(n)} + C/p."""
        rng = random.Random(seed)
        for p in self.primes():
            for _ in range(samples):
                n = rng.randrange(-10**6, 10**6)
                v = self.evaluator(p, n)
                if v != self.evaluator(p, n + p):
                    raise ContractError(f"f({p}, .) is not {p}-periodic at n = {n}")
                slack = (1 if horner(self.fixed_divisor_poly, n) % p == 0 else 0) + self.C / p
                if abs(float(v) - 1) > slack + 1e-12:
                    raise ContractError(f"|f({p}, {n}) - 1| = {abs(float(v) - 1):.4g} exceeds {slack:.4g}")
        above = [q for q in small_primes(max(2 * int(self.support_bound), 50)).tolist() if q > self.support_bound]
        for q in above[:8]:
            for _ in range(8):
                n = rng.randrange(-10**6, 10**6)
                if self.evaluator(q, n) != 1:
                    raise ContractError(f"f({q}, .) is not identically 1 beyond the support bound")


@dataclass
class MeanProductReport:
    name: str
    N: int
    empirical: float
    factored: float
    factored_exact: str
    gap: float

    def as_dict(self):
        return asdict(self)


def _residue_mean(values) -> Fraction | float:
    if all(isinstance(v, (int, Fraction)) for v in values):
        return sum((Fraction(v) for v in values), Fraction(0)) / len(values)
    return math.fsum(float(v) for v in values) / len(values)


def mean_product(spec: LocalFunctionSpec, N: int, *, check: bool = True) -> MeanProductReport:
    N = int(N)
    if N < 1:
        raise DomainError("N must be positive")
    if check:
        spec.check()
    n = np.arange(1, N + 1, dtype=np.int64)
    prod = np.ones(N)
    factored = Fraction(1)
    for p in spec.primes():
        table = spec.local_table(p)
        prod *= np.array([float(v) for v in table])[n % p]
        factored *= _residue_mean(table)
    empirical = math.fsum(prod.tolist()) / N
    f = float(factored)
    return MeanProductReport(spec.name, N, empirical, f, str(factored), abs(empirical - f))


# -- catalog --------------------------------------------------------------------


def lambda_p_spec(support_bound: int) -> LocalFunctionSpec:
    """f(p, n) = Λ_p(n) for p <= bound; the fixed-divisor polynomial is y."""

    def ev(p, n):
        return lambda_p(p, n) if p <= support_bound else Fraction(1)

    return LocalFunctionSpec(ev, support_bound, (0, 1), C=2.0, name=f"lambda_p<= {support_bound}")


def indicator_coprime_spec(modulus: int) -> LocalFunctionSpec:
    """f(p, n) = p/(p-1)·1_{p∤n} for p | modulus, 1 otherwise (Λ_W at W = modulus if squarefree)."""
    modulus = int(modulus)
    divs = {p for p in small_primes(max(modulus, 2)).tolist() if modulus % p == 0}

    def ev(p, n):
        return lambda_p(p, n) if p in divs else Fraction(1)

    return LocalFunctionSpec(ev, max(divs, default=1), (0, 1), C=2.0, name=f"indicator-coprime {modulus}")


def custom_table_spec(tables: dict, C: float = 1.0, fixed_divisor_poly=(1,)) -> LocalFunctionSpec:
    """f(p, n) = tables[p][n mod p] for the listed primes, 1 elsewhere."""
    tables = {int(p): list(v) for p, v in tables.items()}
    for p, v in tables.items():
        if len(v) != p:
            raise ContractError(f"table for p = {p} must have {p} entries")

    def ev(p, n):
        t = tables.get(p)
        return 1 if t is None else t[n % p]

    return LocalFunctionSpec(ev, max(tables, default=1), tuple(fixed_divisor_poly), C, name="custom-table")


CATALOG = {
    "lambda_p": lambda_p_spec,
    "indicator-coprime": indicator_coprime_spec,
    "custom-table": custom_table_spec,
}


# -- correlation factorisation ----------------------------------------------------


def correlation_factorization(Q: int, a, w_list, N: int) -> MeanProductReport:
    """E_{n<=N} ∏_j Λ_{W_j}(Qn + a_j) against ∏_{p<=max w} E_{n mod p} ∏_j Λ_{(p,W_j)}(Qn + a_j)."""
    Q, N = int(Q), int(N)
    a = [int(x) for x in a]
    w_list = [float(w) for w in w_list]
    if Q < 1:
        raise DomainError("Q must be at least 1")
    if len(a) != len(w_list) or not a:
        raise DomainError("a and w_list must be nonempty and of equal length")
    if max(w_list) > 43:
        raise DomainError("levels above 43 are outside the enumerable range")

    def ev(p, n):
        out = Fraction(1)
        for aj, wj in zip(a, w_list):
            if p <= wj:  # otherwise (p, W_j) = 1 and Λ_1 = 1
                out *= lambda_p(p, Q * n + aj)
        return out

    bound = int(math.floor(max(w_list)))
    spec = LocalFunctionSpec(ev, bound, name=f"correlation Q={Q} a={a} w={w_list}")
    return mean_product(spec, N, check=False)


def rankin_tail(w: float, s: float, C: float, Pn: int) -> Fraction:
    """Σ_{d|W, d>w^s} C^{ω(d)} (d, P(n)) / d, exact (C must be rational-representable)."""
    primes = small_primes(int(math.floor(w))).tolist()
    C = Fraction(C).limit_denominator(10**6)
    Pn = int(Pn)
    cut = w**s
    total = Fraction(0)
    divs = [(1, 0)]
    for p in primes:
        divs += [(d * p, k + 1) for d, k in divs]
    for d, k in divs:
        if d > cut:
            total += C**k * Fraction(math.gcd(d, Pn), d)
    return total
