"""Real characters, complete character sums along polynomial patterns, Weil audits.

Only real characters are modelled: Kronecker symbols (D|·) of fundamental
discriminants D, which are exactly the real primitive characters.  The
audit works over odd primes with Legendre symbols; p = 2 is out of scope
for the complete sums.
"""

from __future__ import annotations

import csv
import math
import random
from dataclasses import asdict, dataclass

import numpy as np

from .arith_tables import small_primes
from .errors import DomainError
from .local_density import is_prime
from .poly_family import PolyFamily, horner


def kronecker(a: int, n: int) -> int:
    """Kronecker symbol (a|n) by quadratic reciprocity, O(log) steps."""
    a, n = int(a), int(n)
    if n == 0:
        if a in (1, -1):
            return 1
        if a == 0:
            raise DomainError("(0|0) is undefined")
        return 0
    if a % 2 == 0 and n % 2 == 0:
        return 0
    result = 1
    if n < 0:
        n = -n
        if a < 0:
            result = -result
    v = (n & -n).bit_length() - 1
    n >>= v
    if v % 2 and a % 8 in (3, 5):
        result = -result
    a %= n
    while a:
        v = (a & -a).bit_length() - 1
        a >>= v
        if v % 2 and n % 8 in (3, 5):
            result = -result
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a, n = n % a, a
    return result if n == 1 else 0


def legendre(a: int, p: int) -> int:
    return kronecker(a, p)


def is_fundamental_discriminant(D: int) -> bool:
    D = int(D)
    if D in (0, 1):
        return False
    if D % 4 == 1:
        return _squarefree(abs(D))
    if D % 4 == 0:
        m = D // 4
        return m % 4 in (2, 3) and _squarefree(abs(m))
    return False


def _squarefree(n: int) -> bool:
    for q in range(2, math.isqrt(n) + 1):
        if n % (q * q) == 0:
            return False
    return True


@dataclass(frozen=True)
class RealCharacter:
    """The primitive real character n -> (D|n) of conductor |D|."""

    discriminant: int

    def __post_init__(self):
        if not is_fundamental_discriminant(self.discriminant):
            raise DomainError(f"{self.discriminant} is not a fundamental discriminant")

    @property
    def modulus(self) -> int:
        return abs(self.discriminant)

    @property
    def parity(self) -> int:
        return 1 if self.discriminant > 0 else -1

    def __call__(self, n: int) -> int:
        return kronecker(self.discriminant, n)

    def table(self) -> np.ndarray:
        """χ(r) for r = 0..q-1."""
        return np.array([self(r) for r in range(self.modulus)], dtype=np.int8)

    def values(self, ns) -> np.ndarray:
        ns = np.asarray(ns, dtype=np.int64)
        return self.table()[ns % self.modulus]


def legendre_table(p: int) -> np.ndarray:
    """(r|p) for r = 0..p-1 via the set of squares (odd prime p)."""
    chi = -np.ones(p, dtype=np.int64)
    r = np.arange(1, p, dtype=np.int64)
    chi[(r * r) % p] = 1
    chi[0] = 0
    return chi


def _odd_prime(p) -> int:
    p = int(p)
    if p == 2:
        raise DomainError("complete sums are only modelled for odd primes")
    if not is_prime(p):
        raise DomainError(f"{p} is not prime")
    return p


def complete_sum(fam: PolyFamily, p: int, m: int, J=None, chi: np.ndarray | None = None) -> int:
    """Σ_{a mod p} ∏_{j in J} (a + P_j(m) | p), J a set of 1-based indices (default: all)."""
    p = _odd_prime(p)
    J = range(1, fam.k + 1) if J is None else sorted(set(J))
    if not J:
        raise DomainError("J must be nonempty")
    if chi is None:
        chi = legendre_table(p)
    a = np.arange(p, dtype=np.int64)
    res = fam.residues(m, p)
    prod = np.ones(p, dtype=np.int64)
    for j in J:
        prod *= chi[(a + res[j - 1]) % p]
    return int(prod.sum())


@dataclass
class AuditRow:
    p: int
    m: int
    J: tuple
    total: int
    normalised: float
    roots: int
    degenerate: bool
    square: bool
    bound: float
    violation: bool


@dataclass
class WeilAudit:
    family: str
    rows: list
    violations: int
    degenerate_cases: int
    square_mismatches: int
    note: str = "bound (r-1)*sqrt(p) + r is the classical Weil bound plus root slack"

    def as_dict(self, include_rows: bool = False):
        out = {
            "family": self.family,
            "cases": len(self.rows),
            "violations": self.violations,
            "degenerate_cases": self.degenerate_cases,
            "square_mismatches": self.square_mismatches,
            "note": self.note,
        }
        if include_rows:
            out["rows"] = [asdict(r) for r in self.rows]
        return out

    def write_csv(self, fh):
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["p", "m", "J", "sum", "normalised", "roots", "degenerate", "square", "bound", "violation"])
        for r in self.rows:
            writer.writerow([r.p, r.m, " ".join(map(str, r.J)), r.total, repr(r.normalised), r.roots,
                             int(r.degenerate), int(r.square), repr(r.bound), int(r.violation)])


def audit_case(fam: PolyFamily, p: int, m: int, J=None, chi=None) -> AuditRow:
    """Classify one (p, m, J) and test |sum| <= (r-1)√p + r where it applies."""
    J = tuple(range(1, fam.k + 1)) if J is None else tuple(sorted(set(J)))
    total = complete_sum(fam, p, m, J, chi)
    res = fam.residues(m, p)
    roots = [(-res[j - 1]) % p for j in J]
    mult: dict[int, int] = {}
    for r in roots:
        mult[r] = mult.get(r, 0) + 1
    r = len(mult)
    degenerate = r < len(roots)
    square = all(e % 2 == 0 for e in mult.values())
    bound = (r - 1) * math.sqrt(p) + r
    # a square times a constant is exempt from Weil; collisions are reported separately
    violation = (not degenerate) and (not square) and abs(total) > bound
    return AuditRow(p, int(m), J, total, abs(total) / math.sqrt(p), r, degenerate, square, bound, violation)


def weil_audit(
    fam: PolyFamily,
    p_min: int,
    p_max: int,
    trials: int | None = 50,
    *,
    seed: int = 0,
    subsets: bool = False,
) -> WeilAudit:
    """Audit complete sums for odd primes in [p_min, p_max].

    ``trials=None`` (or trials >= p) takes every m mod p; otherwise ``trials``
    residues m are drawn per prime from a generator seeded by ``seed``.
    With ``subsets=True`` every nonempty J is audited, else J = {1..k}.
    """
    rng = random.Random(seed)
    if subsets:
        Js = [tuple(j + 1 for j in range(fam.k) if mask >> j & 1) for mask in range(1, 2**fam.k)]
    else:
        Js = [tuple(range(1, fam.k + 1))]
    rows = []
    for p in small_primes(int(p_max)).tolist():
        if p < max(3, p_min):
            continue
        chi = legendre_table(p)
        if trials is None or trials >= p:
            ms = list(range(p))
        else:
            ms = [rng.randrange(p) for _ in range(trials)]
        for m in ms:
            for J in Js:
                rows.append(audit_case(fam, p, m, J, chi))
    mismatches = sum(1 for r in rows if r.square and r.total != r.p - r.roots)
    return WeilAudit(
        family=str(fam),
        rows=rows,
        violations=sum(r.violation for r in rows),
        degenerate_cases=sum(r.degenerate for r in rows),
        square_mismatches=mismatches,
    )


@dataclass
class GcdProductScan:
    exceptional_count: int
    threshold: float
    gcd_sum: int
    markov_bound: float

    def as_dict(self):
        return asdict(self)


def gcd_product_scan(R, Q: int, N: int, exponent_budget: float) -> GcdProductScan:
    """Count m <= N with ∏_{p | R(m), p | Q} p > Q^budget, plus the Markov certificate.

    The certificate is Q^{-budget}·Σ_{m<=N} gcd(R(m), Q), an upper bound for
    the count.
    """
    coeffs = tuple(R.polys[0]) if isinstance(R, PolyFamily) else tuple(int(c) for c in R)
    if all(c == 0 for c in coeffs):
        raise DomainError("R must be a nonzero polynomial")
    Q = int(Q)
    threshold = Q**exponent_budget if Q >= 1 else 1.0
    primes_q = [p for p in small_primes(Q).tolist() if Q % p == 0] if Q >= 2 else []
    count = 0
    gcd_sum = 0
    for m in range(1, int(N) + 1):
        v = horner(coeffs, m)
        rad = 1
        for p in primes_q:
            if v % p == 0:
                rad *= p
        if rad > threshold:
            count += 1
        gcd_sum += math.gcd(v, Q)
    return GcdProductScan(count, threshold, gcd_sum, gcd_sum / threshold)
