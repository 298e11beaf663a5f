"""Sieved tables of Λ, μ, λ, Ω, ω and τ on [1, X].

The sieve divides each integer in a segment by every base prime p <= sqrt(X)
(and its powers), so one pass yields the full prime signature bookkeeping.
Whatever cofactor survives is a single large prime.  Segmented and one-shot
builds run the same per-segment routine, which makes them agree bit-for-bit.

Λ is stored as the base prime p of a prime power (0 elsewhere) and converted
to log p on access.  Functions are extended evenly to negative arguments at
query time; 0 is outside the domain.
"""

from __future__ import annotations

import math
import struct
from pathlib import Path

import numpy as np

from .errors import CapacityError, DomainError, TableRangeError

ALL_FUNCTIONS = frozenset({"lambda", "mu", "liouville", "Omega", "omega", "tau"})

_ALIASES = {
    "vonmangoldt": "lambda",
    "von_mangoldt": "lambda",
    "moebius": "mu",
    "mobius": "mu",
    "lambda_liouville": "liouville",
}

# storage array backing each public function
_STORAGE = {
    "lambda": "lam_base",
    "mu": "mu",
    "liouville": "big_omega",
    "Omega": "big_omega",
    "omega": "small_omega",
    "tau": "tau",
}
_STORAGE_ORDER = ("lam_base", "mu", "big_omega", "small_omega", "tau")
_STORAGE_DTYPE = {
    "lam_base": np.int64,
    "mu": np.int8,
    "big_omega": np.int8,
    "small_omega": np.int8,
    "tau": np.int32,
}
_FUNCTION_BITS = {"lambda": 1, "mu": 2, "liouville": 4, "Omega": 8, "omega": 16, "tau": 32}

DEFAULT_MAX_X = 10**9
DEFAULT_MEMORY_BUDGET = 4 * 2**30
DEFAULT_SEGMENT = 1 << 22

CACHE_MAGIC = b"PPSIEVE\x00"
CACHE_VERSION = 1
_HEADER = struct.Struct("<8sIQI")


def canonical_function(name: str) -> str:
    if name in ALL_FUNCTIONS:
        return name
    key = _ALIASES.get(name.lower())
    if key is None:
        raise DomainError(f"unknown arithmetic function {name!r}")
    return key


def small_primes(limit: int) -> np.ndarray:
    """Primes <= limit by a plain Eratosthenes sieve."""
    if limit < 2:
        return np.zeros(0, dtype=np.int64)
    flags = np.ones(limit + 1, dtype=bool)
    flags[:2] = False
    for p in range(2, math.isqrt(limit) + 1):
        if flags[p]:
            flags[p * p :: p] = False
    return np.flatnonzero(flags).astype(np.int64)


def _sieve_segment(lo: int, hi: int, base_primes: np.ndarray, storage: set[str]) -> dict[str, np.ndarray]:
    """Prime-signature data for n in [lo, hi)."""
    size = hi - lo
    rem = np.arange(lo, hi, dtype=np.int64)
    mu = np.ones(size, dtype=np.int8)
    big_omega = np.zeros(size, dtype=np.int8)
    small_omega = np.zeros(size, dtype=np.int8)
    tau = np.ones(size, dtype=np.int64)
    first = np.zeros(size, dtype=np.int64)

    for p in base_primes.tolist():
        if p * p >= hi:
            break
        pk, j = p, 1
        while pk < hi:
            sl = slice((-lo) % pk, None, pk)
            rem[sl] //= p
            big_omega[sl] += 1
            if j == 1:
                small_omega[sl] += 1
                mu[sl] = -mu[sl]
                tau[sl] *= 2
                block = first[sl]
                block[block == 0] = p
                first[sl] = block
            else:
                # tau already carries the factor j from p^(j-1) || n
                tau[sl] = tau[sl] // j * (j + 1)
                if j == 2:
                    mu[sl] = 0
            pk *= p
            j += 1

    big = rem > 1
    big_omega[big] += 1
    small_omega[big] += 1
    mu[big] = -mu[big]
    tau[big] *= 2
    first[big & (first == 0)] = rem[big & (first == 0)]

    out = {}
    if "lam_base" in storage:
        out["lam_base"] = np.where(small_omega == 1, first, 0)
    if "mu" in storage:
        out["mu"] = mu
    if "big_omega" in storage:
        out["big_omega"] = big_omega
    if "small_omega" in storage:
        out["small_omega"] = small_omega
    if "tau" in storage:
        out["tau"] = tau.astype(np.int32)
    return out


def _bytes_per_entry(storage) -> int:
    return sum(np.dtype(_STORAGE_DTYPE[s]).itemsize for s in storage)


class ArithmeticTable:
    """Immutable table of arithmetic functions on [1, X] with even extension."""

    def __init__(self, upper_bound: int, functions, arrays: dict[str, np.ndarray]):
        self.upper_bound = int(upper_bound)
        self.functions = frozenset(functions)
        for arr in arrays.values():
            arr.setflags(write=False)
        self._arrays = arrays
        self._log_lambda = None

    def __repr__(self):
        return f"ArithmeticTable(X={self.upper_bound}, functions={sorted(self.functions)})"

    def _require(self, f: str) -> str:
        f = canonical_function(f)
        if f not in self.functions:
            raise DomainError(f"function {f!r} was not sieved into this table")
        return f

    def _check_range(self, absmax: int):
        if absmax > self.upper_bound:
            raise TableRangeError(
                f"argument {absmax} exceeds table bound {self.upper_bound}",
                required_bound=int(absmax),
            )

    def query(self, f: str, n: int):
        f = self._require(f)
        n = int(n)
        if n == 0:
            raise DomainError("arithmetic functions are not defined at 0")
        a = abs(n)
        self._check_range(a)
        arr = self._arrays[_STORAGE[f]]
        raw = int(arr[a])
        if f == "lambda":
            return float(np.log(np.float64(raw))) if raw else 0.0
        if f == "liouville":
            return -1 if raw & 1 else 1
        return raw

    def lambda_values(self) -> np.ndarray:
        """Λ(n) for n = 0..X as float64 (index 0 holds 0)."""
        if self._log_lambda is None:
            base = self._arrays["lam_base"]
            out = np.zeros(base.shape, dtype=np.float64)
            nz = base > 0
            out[nz] = np.log(base[nz].astype(np.float64))
            out.setflags(write=False)
            self._log_lambda = out
        return self._log_lambda

    def dense(self, f: str) -> np.ndarray:
        """f(n) for n = 0..X as a read-only array; entry 0 is a 0 placeholder."""
        f = self._require(f)
        if f == "lambda":
            return self.lambda_values()
        arr = self._arrays[_STORAGE[f]]
        if f == "liouville":
            out = np.where(arr & 1, -1, 1).astype(np.int8)
            out[0] = 0
            return out
        return arr

    def lookup(self, f: str, ns) -> np.ndarray:
        """Vectorised query with even extension; argument 0 maps to 0.

        The zero convention is what the correlation sums need: a vanishing
        argument contributes a vanishing term.
        """
        ns = np.abs(np.asarray(ns, dtype=np.int64))
        if ns.size:
            self._check_range(int(ns.max()))
        return self.dense(f)[ns]

    def chebyshev_sum(self, x: int | None = None) -> float:
        x = self.upper_bound if x is None else int(x)
        self._check_range(x)
        if x < 1:
            return 0.0
        return math.fsum(self.lambda_values()[1 : x + 1].tolist())

    # -- binary cache -----------------------------------------------------

    def save(self, path) -> None:
        mask = 0
        for f in self.functions:
            mask |= _FUNCTION_BITS[f]
        with open(path, "wb") as fh:
            fh.write(_HEADER.pack(CACHE_MAGIC, CACHE_VERSION, self.upper_bound, mask))
            for name in _STORAGE_ORDER:
                if name in self._arrays:
                    dt = np.dtype(_STORAGE_DTYPE[name]).newbyteorder("<")
                    fh.write(self._arrays[name].astype(dt).tobytes())

    @classmethod
    def load(cls, path) -> "ArithmeticTable":
        with open(path, "rb") as fh:
            header = fh.read(_HEADER.size)
            if len(header) != _HEADER.size:
                raise ValueError(f"{path}: truncated sieve cache header")
            magic, version, x, mask = _HEADER.unpack(header)
            if magic != CACHE_MAGIC:
                raise ValueError(f"{path}: not a sieve cache file")
            if version != CACHE_VERSION:
                raise ValueError(f"{path}: unsupported cache version {version}")
            functions = {f for f, bit in _FUNCTION_BITS.items() if mask & bit}
            storage = {_STORAGE[f] for f in functions}
            arrays = {}
            for name in _STORAGE_ORDER:
                if name in storage:
                    dt = np.dtype(_STORAGE_DTYPE[name]).newbyteorder("<")
                    arr = np.fromfile(fh, dtype=dt, count=x + 1)
                    if arr.size != x + 1:
                        raise ValueError(f"{path}: truncated array {name}")
                    arrays[name] = arr.astype(_STORAGE_DTYPE[name])
        return cls(x, functions, arrays)


def build_table(
    X: int,
    functions=ALL_FUNCTIONS,
    *,
    segment_size: int | None = DEFAULT_SEGMENT,
    max_x: int = DEFAULT_MAX_X,
    memory_budget: int = DEFAULT_MEMORY_BUDGET,
) -> ArithmeticTable:
    """Sieve the requested functions on [1, X].

    ``segment_size=None`` sieves the whole range in one segment.
    """
    X = int(X)
    if X < 1:
        raise DomainError("table bound must be a positive integer")
    functions = frozenset(canonical_function(f) for f in functions)
    storage = {_STORAGE[f] for f in functions}
    need = (X + 1) * _bytes_per_entry(storage)
    if X > max_x or need > memory_budget:
        raise CapacityError(
            f"table for X={X} needs ~{need} bytes (ceiling X<={max_x}, budget {memory_budget} bytes)",
            estimated_cost=need,
        )
    base = small_primes(math.isqrt(X))
    arrays = {name: np.zeros(X + 1, dtype=_STORAGE_DTYPE[name]) for name in storage}
    step = X if segment_size is None else max(1, int(segment_size))
    lo = 1
    while lo <= X:
        hi = min(lo + step, X + 1)
        seg = _sieve_segment(lo, hi, base, storage)
        for name, arr in seg.items():
            arrays[name][lo:hi] = arr
        lo = hi
    return ArithmeticTable(X, functions, arrays)


def query(table: ArithmeticTable, f: str, n: int):
    return table.query(f, n)


def chebyshev_sum(table: ArithmeticTable, X: int) -> float:
    """Σ_{n<=X} Λ(n), correctly rounded."""
    return table.chebyshev_sum(X)


def cached_table(X: int, functions=ALL_FUNCTIONS, cache_path=None, **kwargs) -> ArithmeticTable:
    """Load a table from ``cache_path`` when it covers the request, else sieve and store it."""
    functions = frozenset(canonical_function(f) for f in functions)
    if cache_path is not None:
        path = Path(cache_path)
        if path.exists():
            table = ArithmeticTable.load(path)
            if table.upper_bound >= X and functions <= table.functions:
                return table
        table = build_table(X, functions, **kwargs)
        path.parent.mkdir(parents=True, exist_ok=True)
        table.save(path)
        return table
    return build_table(X, functions, **kwargs)
