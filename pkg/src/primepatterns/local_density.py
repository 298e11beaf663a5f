"""Local factors β_p, β_p(m), β_p'(n) as exact rationals, and truncated singular series.

Every factor is an average over residues mod p of products of the local
von Mangoldt function Λ_p(n) = p/(p-1)·1_{p∤n}.  Because each product is
either 0 or (p/(p-1))^k, a factor equals (p/(p-1))^k times a count of
residues avoiding all the roots, divided by the number of residues.
"""

from __future__ import annotations

import csv
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .arith_tables import small_primes
from .errors import DomainError, HypothesisError
from .poly_family import PolyFamily

DEFAULT_CUTOFF = 10**4
_MAX_VECTOR_PRIME = 2**31


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin, exact for n < 3.3e24."""
    n = int(n)
    if n < 2:
        return False
    for q in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41):
        if n % q == 0:
            return n == q
    d, r = n - 1, 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41):
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _require_prime(p) -> int:
    p = int(p)
    if not is_prime(p):
        raise DomainError(f"{p} is not prime")
    return p


def lambda_p(p: int, n: int) -> Fraction:
    """Local von Mangoldt function: p/(p-1) off multiples of p, 0 on them."""
    p = _require_prime(p)
    return Fraction(0) if int(n) % p == 0 else Fraction(p, p - 1)


@dataclass(frozen=True)
class LocalFactor:
    p: int
    kind: str  # "joint", "fixed_m" or "fixed_n"
    parameter: int | None
    value: Fraction

    def __float__(self):
        return float(self.value)

    def as_row(self):
        return {
            "p": self.p,
            "kind": self.kind,
            "parameter": self.parameter,
            "numerator": self.value.numerator,
            "denominator": self.value.denominator,
            "value": float(self.value),
        }


def residue_table(fam: PolyFamily, p: int) -> np.ndarray:
    """Array R with R[j, m] = P_{j+1}(m) mod p for m = 0..p-1."""
    if p >= _MAX_VECTOR_PRIME:
        raise DomainError(f"prime {p} too large for the vectorised residue path")
    m = np.arange(p, dtype=np.int64)
    out = np.empty((fam.k, p), dtype=np.int64)
    for j, poly in enumerate(fam.polys):
        acc = np.zeros(p, dtype=np.int64)
        for c in reversed(poly):
            acc = (acc * m + (c % p)) % p
        out[j] = acc
    return out


def _distinct_per_column(a: np.ndarray) -> np.ndarray:
    s = np.sort(a, axis=0)
    return 1 + np.count_nonzero(np.diff(s, axis=0), axis=0)


def free_counts_fixed_m(fam: PolyFamily, p: int) -> np.ndarray:
    """c[m] = #{n mod p : n + P_j(m) ≢ 0 for all j}, m = 0..p-1."""
    return p - _distinct_per_column(residue_table(fam, p))


def free_counts_fixed_n(fam: PolyFamily, p: int) -> np.ndarray:
    """c[r] = #{m mod p : r + P_j(m) ≢ 0 for all j}, r = 0..p-1."""
    bad = (-residue_table(fam, p)) % p
    s = np.sort(bad, axis=0)
    keep = np.ones_like(s, dtype=bool)
    keep[1:] = np.diff(s, axis=0) != 0
    hits = np.bincount(s[keep], minlength=p)
    return p - hits


def _scale(p: int, k: int) -> Fraction:
    return Fraction(p, p - 1) ** k


def _beta_p_brute(fam: PolyFamily, p: int) -> Fraction:
    total = Fraction(0)
    for m in range(p):
        vals = fam.residues(m, p)
        for n in range(p):
            term = Fraction(1)
            for v in vals:
                term *= lambda_p(p, n + v)
            total += term
    return total / (p * p)


def beta_p(fam: PolyFamily, p: int, method: str = "count") -> LocalFactor:
    """β_p = E_{m,n mod p} ∏_j Λ_p(n + P_j(m)).

    ``method="brute"`` runs the literal double loop of Λ_p products; the
    default counts, for each m, the residues n that avoid every -P_j(m).
    """
    p = _require_prime(p)
    if method == "brute":
        value = _beta_p_brute(fam, p)
    elif method == "count":
        count = int(free_counts_fixed_m(fam, p).sum())
        value = _scale(p, fam.k) * Fraction(count, p * p)
    elif method == "fibre":
        value = sum((beta_p_fixed(fam, p, "m", m).value for m in range(p)), Fraction(0)) / p
    else:
        raise ValueError(f"unknown method {method!r}")
    return LocalFactor(p, "joint", None, value)


def beta_p_fixed(fam: PolyFamily, p: int, variable: str, value: int, method: str = "count") -> LocalFactor:
    """β_p(m) (variable="m", average over n) or β_p'(n) (variable="n", average over m)."""
    p = _require_prime(p)
    value = int(value)
    if variable not in ("m", "n"):
        raise ValueError("variable must be 'm' or 'n'")
    if method == "brute":
        total = Fraction(0)
        for r in range(p):
            m, n = (value, r) if variable == "m" else (r, value)
            term = Fraction(1)
            for v in fam.residues(m, p):
                term *= lambda_p(p, n + v)
            total += term
        return LocalFactor(p, "fixed_" + variable, value, total / p)
    if method != "count":
        raise ValueError(f"unknown method {method!r}")
    if variable == "m":
        # n is excluded exactly at the distinct residues -P_j(m)
        count = p - len(set(fam.residues(value, p)))
    else:
        hit = ((value + residue_table(fam, p)) % p == 0).any(axis=0)
        count = p - int(np.count_nonzero(hit))
    return LocalFactor(p, "fixed_" + variable, value, _scale(p, fam.k) * Fraction(count, p))


def fixed_factor_floats(fam: PolyFamily, p: int, variable: str) -> np.ndarray:
    """β_p(r) or β_p'(r) for every residue r as float64, via residue counting."""
    counts = free_counts_fixed_m(fam, p) if variable == "m" else free_counts_fixed_n(fam, p)
    return counts.astype(np.float64) * (float(_scale(p, fam.k)) / p)


@dataclass(frozen=True)
class SingularSeries:
    value: float
    per_prime: tuple[LocalFactor, ...]
    tail_constant: float
    cutoff: int
    obstruction_prime: int | None = None

    def as_dict(self):
        return {
            "value": self.value,
            "cutoff": self.cutoff,
            "tail_constant": self.tail_constant,
            "obstruction_prime": self.obstruction_prime,
            "factors": [f.as_row() for f in self.per_prime],
        }


def _map_primes(fn, primes, workers):
    if workers and workers > 1 and len(primes) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(fn, primes))
    return [fn(p) for p in primes]


def singular_series(
    fam: PolyFamily,
    P_cutoff: int = DEFAULT_CUTOFF,
    *,
    require_pairwise: bool = True,
    workers: int = 1,
) -> SingularSeries:
    """∏_{p<=cutoff} β_p with exact per-prime factors.

    ``tail_constant`` is max p²|β_p - 1| over the computed p >= 11, an empirical
    handle on the β_p = 1 + O(1/p²) decay.  An obstruction (some β_p = 0) gives
    value 0 with the first such prime reported.
    """
    from .poly_family import check_hypotheses

    P_cutoff = int(P_cutoff)
    if P_cutoff < 2:
        raise DomainError("singular series cutoff must be at least 2")
    if require_pairwise and not check_hypotheses(fam, 2).pairwise_ok:
        raise HypothesisError("singular series needs deg(P_i - P_j) = d for all i < j")
    primes = small_primes(P_cutoff).tolist()
    factors = _map_primes(lambda p: beta_p(fam, p), primes, workers)
    value = 1.0
    obstruction = None
    tail = 0.0
    for f in factors:
        if f.value == 0 and obstruction is None:
            obstruction = f.p
        value *= float(f.value)
        if f.p >= 11:
            tail = max(tail, f.p * f.p * abs(float(f.value - 1)))
    if obstruction is not None:
        value = 0.0
    return SingularSeries(value, tuple(factors), tail, P_cutoff, obstruction)


def truncated_fixed_product(fam: PolyFamily, variable: str, value: int, lower: float, upper: int) -> float:
    """∏_{lower < p <= upper} β_p(value) (or β_p'(value)), in prime order."""
    out = 1.0
    for p in small_primes(int(upper)).tolist():
        if p > lower:
            out *= float(beta_p_fixed(fam, p, variable, value).value)
    return out


def fixed_product(fam: PolyFamily, variable: str, value: int, cutoff: int) -> float:
    return truncated_fixed_product(fam, variable, value, 1, cutoff)


def write_csv(factors, fh) -> None:
    """Emit p, numerator, denominator, value rows."""
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(["p", "numerator", "denominator", "value"])
    for f in factors:
        writer.writerow([f.p, f.value.numerator, f.value.denominator, repr(float(f.value))])
