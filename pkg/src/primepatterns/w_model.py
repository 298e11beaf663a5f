"""The W-tricked model Λ_W, its divisor truncation, and the Siegel-corrected model.

Λ_W(n) = ∏_{p<=w} Λ_p(n) = W/φ(W)·1_{(n,W)=1} with W = ∏_{p<=w} p.  The
Siegel model multiplies by 1 - χ̃(|n|)|n|^{β̃-1}; no Siegel zero exists at
any computable height, so an injected character is always labelled
synthetic and the default (χ̃ = 0, β̃ = 1) is the production path.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .arith_tables import ArithmeticTable, small_primes
from .char_sum import RealCharacter
from .errors import CapacityError, DomainError, TableRangeError
from .gowers import DEFAULT_BUDGET, GowersResult, interval_norm

FULL_ENUMERATION_MAX_W = 43
DIVISOR_BUDGET = 1 << 20


@dataclass(frozen=True)
class SiegelConfig:
    w: float
    character: RealCharacter | None = None
    beta_tilde: float = 1.0
    primes: tuple[int, ...] = field(init=False)
    W: int = field(init=False)
    density: Fraction = field(init=False)  # W / φ(W)

    def __post_init__(self):
        if self.w < 2:
            raise DomainError("w must be at least 2")
        primes = tuple(small_primes(int(math.floor(self.w))).tolist())
        if self.character is None:
            if self.beta_tilde != 1.0:
                raise DomainError("beta_tilde must be 1 when no character is injected")
        else:
            if self.character.modulus > self.w:
                raise DomainError(f"character conductor {self.character.modulus} exceeds w = {self.w}")
            if not 0 < self.beta_tilde <= 1:
                raise DomainError("beta_tilde must lie in (0, 1]")
        W = math.prod(primes)
        object.__setattr__(self, "primes", primes)
        object.__setattr__(self, "W", W)
        object.__setattr__(self, "density", math.prod((Fraction(p, p - 1) for p in primes), start=Fraction(1)))

    @property
    def synthetic(self) -> bool:
        return self.character is not None

    def describe(self) -> dict:
        return {
            "w": self.w,
            "W": str(self.W),
            "density": str(self.density),
            "character": None if self.character is None else self.character.discriminant,
            "beta_tilde": self.beta_tilde,
            "synthetic": self.synthetic,
        }


def _nonzero(n) -> int:
    n = int(n)
    if n == 0:
        raise DomainError("n must be nonzero")
    return n


def lambda_W(cfg: SiegelConfig, n: int) -> Fraction:
    n = _nonzero(n)
    return cfg.density if math.gcd(n, cfg.W) == 1 else Fraction(0)


def _squarefree_divisors(primes, limit=None):
    """(d, μ(d)) for squarefree products of ``primes``, pruned at d <= limit."""
    out = [(1, 1)]
    for p in primes:
        out += [(d * p, -mu) for d, mu in out if limit is None or d * p <= limit]
        if len(out) > DIVISOR_BUDGET:
            raise CapacityError(f"more than {DIVISOR_BUDGET} squarefree divisors to enumerate", len(out))
    return out


def lambda_W_truncated(cfg: SiegelConfig, n: int, V: float) -> Fraction:
    """(W/φ(W))·Σ_{d|W, d<=V} μ(d)1_{d|n}, over divisors of gcd(n, W) only."""
    n = _nonzero(n)
    if V < 1:
        raise DomainError("V must be at least 1")
    g = math.gcd(n, cfg.W)
    ps = [p for p in cfg.primes if g % p == 0]
    total = sum(mu for d, mu in _squarefree_divisors(ps, math.floor(V)))
    return cfg.density * total


def siegel_lambda(cfg: SiegelConfig, n: int) -> float:
    n = _nonzero(n)
    base = lambda_W(cfg, n)
    if cfg.character is None or base == 0:
        return float(base)
    a = abs(n)
    return float(base) * (1.0 - cfg.character(a) * a ** (cfg.beta_tilde - 1.0))


def coprime_mask(cfg: SiegelConfig, N: int) -> np.ndarray:
    """Boolean array over 0..N, true where gcd(n, W) = 1 (index 0 false)."""
    mask = np.ones(N + 1, dtype=bool)
    mask[0] = False
    for p in cfg.primes:
        mask[::p] = False
    return mask


def lambda_W_array(cfg: SiegelConfig, N: int) -> np.ndarray:
    return coprime_mask(cfg, N) * float(cfg.density)


def siegel_array(cfg: SiegelConfig, N: int) -> np.ndarray:
    """Λ̃_W(n) for n = 0..N (entry 0 is 0)."""
    out = lambda_W_array(cfg, N)
    if cfg.character is not None:
        n = np.arange(N + 1, dtype=np.float64)
        n[0] = 1.0  # Λ_W(0) is already 0
        chi = cfg.character.values(np.arange(N + 1)).astype(np.float64)
        out = out * (1.0 - chi * n ** (cfg.beta_tilde - 1.0))
    return out


def _lambda_dense(table: ArithmeticTable, N: int) -> np.ndarray:
    if N > table.upper_bound:
        raise TableRangeError(f"table covers [1, {table.upper_bound}] but N = {N}", required_bound=N)
    return table.dense("lambda")[: N + 1]


@dataclass
class APDiscrepancy:
    N: int
    config: dict
    max_value: float
    argmax: tuple[int, int]
    reference: float
    ratio: float
    regime_ok: bool
    entries: list

    def as_dict(self, include_entries: bool = True):
        out = {
            "N": self.N,
            "config": self.config,
            "max_value": self.max_value,
            "argmax": list(self.argmax),
            "reference": self.reference,
            "ratio": self.ratio,
            "regime_ok": self.regime_ok,
        }
        if include_entries:
            out["entries"] = self.entries
        return out


def ap_discrepancy(cfg: SiegelConfig, N: int, table: ArithmeticTable) -> APDiscrepancy:
    """max_{q<=w, a mod q} |Σ_{m<=N, m≡a (q)} (Λ - Λ̃_W)(m)|.

    ``reference`` is N·exp(-(log N)^{1/2}), i.e. the decay rate with the
    unspecified constant set to 1; the ratio is for trend reading only.
    """
    N = int(N)
    regime_ok = cfg.w <= math.exp(math.sqrt(math.log(N)))
    if not regime_ok:
        warnings.warn(f"w = {cfg.w} exceeds exp(sqrt(log N)) for N = {N}", RuntimeWarning, stacklevel=2)
    diff = _lambda_dense(table, N) - siegel_array(cfg, N)
    entries = []
    best, arg = -1.0, (1, 0)
    for q in range(1, int(math.floor(cfg.w)) + 1):
        for a in range(q):
            start = a if a >= 1 else q
            value = math.fsum(diff[start::q].tolist())
            entries.append({"q": q, "a": a, "sum": value})
            if abs(value) > best:
                best, arg = abs(value), (q, a)
    reference = N * math.exp(-math.sqrt(math.log(N)))
    return APDiscrepancy(N, cfg.describe(), best, arg, reference, best / reference, regime_ok, entries)


def truncation_moment(cfg: SiegelConfig, N: int, s_exponent: float, C: float) -> tuple[float, float]:
    """(Σ_{n<=N} |Σ_{d|W, d>w^s} μ(d)1_{d|n}|^C,  N e^{-s} (log w)^{2^{C+4}})."""
    if s_exponent < 1:
        raise DomainError("s must be at least 1")
    N = int(N)
    if len(cfg.primes) > 14 and cfg.w > FULL_ENUMERATION_MAX_W:
        # only divisors up to N can divide some n <= N; enumerate those
        divisors = _squarefree_divisors(cfg.primes, N)
    else:
        divisors = _squarefree_divisors(cfg.primes)
    cut = cfg.w**s_exponent
    acc = np.zeros(N + 1, dtype=np.int64)
    for d, mu in divisors:
        if d > cut and d <= N:
            acc[d::d] += mu
    lhs = math.fsum((np.abs(acc[1:]).astype(np.float64) ** C).tolist())
    reference = N * math.exp(-s_exponent) * math.log(cfg.w) ** (2 ** (C + 4))
    return lhs, reference


def gowers_of_error(
    cfg: SiegelConfig,
    N: int,
    s: int,
    table: ArithmeticTable,
    model: np.ndarray | None = None,
    method: str = "auto",
    budget: int = DEFAULT_BUDGET,
) -> GowersResult:
    """||Λ - Λ̃_W||_{U^s[N]}; ``model`` (values for n = 0..N) replaces Λ̃_W if given."""
    N = int(N)
    if s not in (2, 3):
        raise DomainError("s must be 2 or 3")
    lam = _lambda_dense(table, N)
    other = siegel_array(cfg, N) if model is None else np.asarray(model, dtype=np.float64)
    err = (lam - other)[1:]
    return interval_norm(err, (1, N), s, method=method, start=1, budget=budget)
