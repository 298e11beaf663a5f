"""Unnormalised and interval-normalised Gowers U^s norms of finitely supported functions.

A function is an array of values with an integer ``start``: values[i] is
f(start + i); everything outside is zero.  Evaluators:

naive          literal sum over x, h_1..h_s of the 2^s-fold product (compiled loop)
recursive      ||f||^{2^s} = Σ_h ||Δ_h f||^{2^{s-1}},  Δ_h f(x) = conj(f(x+h)) f(x)
fft_u2         ||f||^4 = (1/M) Σ_ξ |F(ξ)|^4 on a zero-padded cyclic group, M >= 2L+1
recursive_fft  the recursion, closed off by fft_u2 once it reaches U^2
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numba
import numpy as np

from .errors import CapacityError, DomainError

METHODS = ("naive", "recursive", "recursive_fft", "fft_u2", "auto")
DEFAULT_BUDGET = 2 * 10**9
_FFT_BATCH = 256


@numba.njit(cache=True)
def _naive_kernel(F, s):
    n_omega, L = F.shape
    width = 2 * L - 1
    n_h = width**s
    h = np.zeros(s, dtype=np.int64)
    off = np.zeros(n_omega, dtype=np.int64)
    total = 0j
    for idx in range(n_h):
        t = idx
        for i in range(s):
            h[i] = t % width - (L - 1)
            t //= width
        lo_off = 0
        hi_off = 0
        for w in range(n_omega):
            o = 0
            for i in range(s):
                if (w >> i) & 1:
                    o += h[i]
            off[w] = o
            if o < lo_off:
                lo_off = o
            if o > hi_off:
                hi_off = o
        # skip x for which some corner leaves [0, L): those terms vanish
        for x in range(-lo_off, L - hi_off):
            prod = 1.0 + 0j
            for w in range(n_omega):
                prod *= F[w, x + off[w]]
            total += prod
    return total


def _trim(values: np.ndarray) -> np.ndarray:
    nz = np.flatnonzero(values)
    if nz.size == 0:
        return values[:0]
    return values[nz[0] : nz[-1] + 1]


def _popcount(w: int) -> int:
    return bin(w).count("1")


def multilinear_form(fs, s: int, budget: int = DEFAULT_BUDGET) -> complex:
    """Σ_{x,h} ∏_ω f_ω(x + ω·h) for 2^s arrays sharing the support start 0, summed literally."""
    if len(fs) != 2**s:
        raise DomainError(f"need 2^s = {2**s} functions, got {len(fs)}")
    L = max(len(f) for f in fs)
    if L == 0:
        return 0j
    F = np.zeros((2**s, L), dtype=np.complex128)
    for w, f in enumerate(fs):
        F[w, : len(f)] = np.asarray(f, dtype=np.complex128)
    cost = L * (2 * L - 1) ** s * 2**s
    if cost > budget:
        raise CapacityError(f"naive U^{s} sum over support {L} costs ~{cost:.3g} operations", cost)
    return complex(_naive_kernel(F, s))


def _fsum_complex(z: np.ndarray) -> complex:
    return complex(math.fsum(z.real.tolist()), math.fsum(z.imag.tolist()))


def _delta(f: np.ndarray, h: int) -> np.ndarray:
    if h >= 0:
        return np.conj(f[h:]) * f[: len(f) - h]
    return np.conj(f[: len(f) + h]) * f[-h:]


def _u2_power_fft(fs) -> list[float]:
    """||f||_{U^2}^4 for a batch of arrays through one padded FFT per chunk."""
    out = []
    for i in range(0, len(fs), _FFT_BATCH):
        chunk = fs[i : i + _FFT_BATCH]
        L = max(len(f) for f in chunk)
        if L == 0:
            out.extend(0.0 for _ in chunk)
            continue
        M = 1 << (2 * L).bit_length()  # smallest power of two >= 2L + 1
        block = np.zeros((len(chunk), M), dtype=np.complex128)
        for r, f in enumerate(chunk):
            block[r, : len(f)] = f
        spec = np.abs(np.fft.fft(block, axis=1)) ** 4
        out.extend(math.fsum(row.tolist()) / M for row in spec)
    return out


def _recursive_power(f: np.ndarray, s: int, fft_base: bool) -> float:
    if len(f) == 0:
        return 0.0
    if s == 1:
        return abs(_fsum_complex(f)) ** 2
    if s == 2 and fft_base:
        return _u2_power_fft([f])[0]
    L = len(f)
    shifts = [_delta(f, h) for h in range(-(L - 1), L)]
    if s == 3 and fft_base:
        return math.fsum(_u2_power_fft(shifts))
    return math.fsum(_recursive_power(g, s - 1, fft_base) for g in shifts)


def gowers_power(values, s: int, method: str = "recursive", budget: int = DEFAULT_BUDGET) -> float:
    """||f||_{Ũ^s(Z)}^{2^s} for f given by its values on a contiguous support."""
    s = int(s)
    if s < 1:
        raise DomainError("s must be a positive integer")
    f = _trim(np.asarray(values, dtype=np.complex128))
    L = len(f)
    if L == 0:
        return 0.0
    if method == "auto":
        method = "fft_u2" if s == 2 else "recursive_fft"
    if method == "naive":
        fs = [np.conj(f) if _popcount(w) % 2 else f for w in range(2**s)]
        return max(multilinear_form(fs, s, budget).real, 0.0)
    if method == "fft_u2":
        if s != 2:
            raise DomainError("the fft_u2 method only evaluates s = 2")
        return _u2_power_fft([f])[0]
    if method in ("recursive", "recursive_fft"):
        fft_base = method == "recursive_fft" and s >= 2
        if fft_base:
            cost = (2 * L) ** (s - 2) * 4 * L * max(1, int(math.log2(4 * L)))
        else:
            cost = (2 * L) ** (s - 1) * L
        if cost > budget:
            raise CapacityError(f"{method} U^{s} over support {L} costs ~{cost:.3g} operations", cost)
        return _recursive_power(f, s, fft_base)
    raise DomainError(f"unknown method {method!r}")


def unnormalised_norm(values, s: int, method: str = "recursive", budget: int = DEFAULT_BUDGET) -> float:
    return gowers_power(values, s, method, budget) ** (1.0 / 2**s)


@dataclass(frozen=True)
class GowersResult:
    s: int
    interval: tuple[int, int]
    unnormalised: float
    normalised: float
    method: str

    def as_dict(self):
        return {
            "s": self.s,
            "interval": list(self.interval),
            "unnormalised": self.unnormalised,
            "normalised": self.normalised,
            "method": self.method,
        }


def restrict(values, start: int, interval) -> tuple[np.ndarray, int, int]:
    """f·1_I as an array over the integer points of I = [a, b]."""
    a, b = interval
    if b - a < 1:
        raise DomainError("interval must have length at least 1")
    lo, hi = math.ceil(a), math.floor(b)
    values = np.asarray(values)
    out = np.zeros(hi - lo + 1, dtype=np.complex128)
    src_lo = max(lo, start)
    src_hi = min(hi, start + len(values) - 1)
    if src_lo <= src_hi:
        out[src_lo - lo : src_hi - lo + 1] = values[src_lo - start : src_hi - start + 1]
    return out, lo, hi


def interval_norm(values, interval, s: int, method: str = "auto", start: int = 0, budget: int = DEFAULT_BUDGET) -> GowersResult:
    """||f||_{U^s(I)} = ||f 1_I||_{Ũ^s} / ||1_I||_{Ũ^s}."""
    if method == "fft_u2" and s != 2:
        raise DomainError("the fft_u2 method only evaluates s = 2")
    if method not in METHODS:
        raise DomainError(f"unknown method {method!r}")
    restricted, lo, hi = restrict(values, start, interval)
    used = method if method != "auto" else ("fft_u2" if s == 2 else "recursive_fft")
    num = unnormalised_norm(restricted, s, method, budget)
    den = unnormalised_norm(np.ones(hi - lo + 1), s, method, budget)
    return GowersResult(int(s), (lo, hi), num, num / den, used)


def gcs_check(fs, s: int, budget: int = DEFAULT_BUDGET) -> tuple[float, float, bool]:
    """Gowers-Cauchy-Schwarz: |Σ ∏_ω f_ω(x + ω·h)| <= ∏_ω ||f_ω||_{Ũ^s}."""
    if s > 3:
        raise DomainError("exhaustive GCS evaluation is limited to s <= 3")
    fs = [np.asarray(f, dtype=np.complex128) for f in fs]
    lhs = abs(multilinear_form(fs, s, budget))
    rhs = math.prod(unnormalised_norm(f, s, "recursive", budget) for f in fs)
    return lhs, rhs, lhs <= rhs * (1 + 1e-9)


def mu_H(H: float, h: int) -> Fraction:
    """#{(h1, h2) in [H]^2 : h1 - h2 = h} / floor(H)^2."""
    if H < 1:
        raise DomainError("H must be at least 1")
    top = math.floor(H)
    return Fraction(max(0, top - abs(int(h))), top * top)
