"""A smoothed 1-periodic indicator of [α, β] with explicit Fourier coefficients.

g = 1_{[α+η/2, β-η/2]} * K, where K is the triangular kernel on [-η/2, η/2]
(the self-convolution of the normalised box of width η/2).  Hence g = 1 on
[α+η, β-η], g = 0 off [α, β] inside one period, mean β - α - η, and

    c_j = (e(-j a) - e(-j b)) / (2πij) · (sin(πjη/2) / (πjη/2))²,
    a = α + η/2,  b = β - η/2.
"""

from __future__ import annotations

import math
import random
from dataclasses import asdict, dataclass

import numpy as np

from .errors import DomainError

_TAU = 2 * math.pi


def _dist_to_int(x: float) -> float:
    return abs(x - round(x))


def admissible_eta_bound(alpha: float, beta: float) -> float:
    return min(0.5 - _dist_to_int(alpha), 0.5 - _dist_to_int(beta), _dist_to_int(alpha - beta) / 2)


def default_truncation(eta: float) -> int:
    return math.ceil(100 / eta**2)


@dataclass
class SmoothedIndicator:
    alpha: float
    beta: float
    eta: float
    J: int
    coefficients: np.ndarray  # c_j for j = 1..J; c_{-j} is the conjugate

    @property
    def constant(self) -> float:
        return self.beta - self.alpha - self.eta

    @property
    def a(self) -> float:
        return self.alpha + self.eta / 2

    @property
    def b(self) -> float:
        return self.beta - self.eta / 2

    def coefficient(self, j: int) -> complex:
        if j == 0:
            return complex(self.constant)
        c = complex(self.coefficients[abs(j) - 1]) if abs(j) <= self.J else _coeffs(self.a, self.b, self.eta, np.array([abs(j)]))[0]
        return c if j > 0 else c.conjugate()

    def tail_remainder_bound(self) -> float:
        """Upper bound for Σ_{|j|>J} |c_j| from |c_j| <= (1/π|j|)(2/(π|j|η))²."""
        return 4 / (math.pi**3 * self.eta**2 * self.J**2)

    def exact(self, x) -> np.ndarray:
        """Closed-form g(x), independent of the truncation."""
        x = np.asarray(x, dtype=np.float64)
        y = x - np.floor(x + 0.5)  # representative in [-1/2, 1/2)
        return _kernel_cdf(y - self.a, self.eta) - _kernel_cdf(y - self.b, self.eta)

    def fourier_grid(self, grid_size: int):
        """Truncated series at x = t/G - 1/2, t = 0..G-1, folding j modulo G before one FFT."""
        G = int(grid_size)
        j = np.arange(1, self.J + 1)
        # e(j(t/G - 1/2)) = (-1)^j e(jt/G)
        c = self.coefficients * np.where(j % 2, -1.0, 1.0)
        folded = np.zeros(G, dtype=np.complex128)
        for idx, part in ((j % G, c), ((-j) % G, np.conj(c))):
            folded.real += np.bincount(idx, weights=part.real, minlength=G)
            folded.imag += np.bincount(idx, weights=part.imag, minlength=G)
        folded[0] += self.constant
        x = np.arange(G) / G - 0.5
        return x, (np.fft.ifft(folded) * G).real

    def __call__(self, x) -> np.ndarray:
        return self.exact(x)


def _kernel_cdf(u, eta):
    """∫_{-∞}^u K, K the triangular density on [-η/2, η/2]."""
    h = eta / 2
    u = np.clip(u, -h, h)
    left = (u + h) ** 2 / (2 * h * h)
    right = 1 - (h - u) ** 2 / (2 * h * h)
    return np.where(u <= 0, left, right)


def _coeffs(a: float, b: float, eta: float, j: np.ndarray) -> np.ndarray:
    j = j.astype(np.float64)
    box = (np.exp(-1j * _TAU * j * a) - np.exp(-1j * _TAU * j * b)) / (1j * _TAU * j)
    return box * np.sinc(j * eta / 2) ** 2


def build(alpha: float, beta: float, eta: float, J: int | None = None) -> SmoothedIndicator:
    alpha, beta, eta = float(alpha), float(beta), float(eta)
    if not -0.5 < alpha < beta < 0.5:
        raise DomainError("need -1/2 < alpha < beta < 1/2")
    if not 0 < eta < admissible_eta_bound(alpha, beta):
        raise DomainError(f"eta = {eta} outside the admissible window (0, {admissible_eta_bound(alpha, beta)})")
    J = default_truncation(eta) if J is None else int(J)
    if J < 1:
        raise DomainError("J must be positive")
    coeffs = _coeffs(alpha + eta / 2, beta - eta / 2, eta, np.arange(1, J + 1))
    return SmoothedIndicator(alpha, beta, eta, J, coeffs)


@dataclass
class VerificationReport:
    alpha: float
    beta: float
    eta: float
    J: int
    grid_size: int
    truncation_error: float
    plateau_margin: float
    range_margin: float
    exact_plateau_ok: bool
    coefficient_margin: float
    worst_coefficient_index: int
    classical_coefficient_margin: float
    tail_margin: float
    worst_tail_K: int
    periodicity_error: float

    @property
    def ok(self) -> bool:
        return min(self.plateau_margin, self.range_margin, self.coefficient_margin, self.tail_margin) > 0

    def as_dict(self):
        out = asdict(self)
        out["ok"] = self.ok
        return out


def verify(ind: SmoothedIndicator, grid_size: int = 4096) -> VerificationReport:
    """Margins (bound minus observed, positive is good) for the three guarantees.

    (1) on the grid, the truncated series stays within the tail remainder of
        1 on [α+η, β-η] and of 0 off [α-η, β+η]; the same holds for [0, 1].
    (2) 10η - max_j |c_j|; the classical min(β-α-η, 1/(π|j|)) bound is
        reported alongside.
    (3) min over K = 1, 2, 4, ... of 10/(ηK) - Σ_{|j|>K} |c_j|, with the part
        beyond J replaced by its analytic bound.
    """
    if grid_size < 1000:
        raise DomainError("grid_size must be at least 1000")
    x, g = ind.fourier_grid(grid_size)
    remainder = ind.tail_remainder_bound()
    inner = (x >= ind.alpha + ind.eta) & (x <= ind.beta - ind.eta)
    outer = (x < ind.alpha - ind.eta) | (x > ind.beta + ind.eta)
    dev = 0.0
    if inner.any():
        dev = max(dev, float(np.abs(g[inner] - 1).max()))
    if outer.any():
        dev = max(dev, float(np.abs(g[outer]).max()))
    range_dev = float(max(0.0, -g.min(), g.max() - 1))
    exact = ind.exact(x)
    exact_ok = bool(np.all(exact[inner] == 1) and np.all(exact[outer] == 0) and exact.min() >= 0 and exact.max() <= 1)
    periodic = float(np.abs(ind.exact(x + 1) - exact).max())

    mags = np.abs(ind.coefficients)
    worst = int(np.argmax(mags)) + 1
    coef_margin = 10 * ind.eta - float(mags[worst - 1])
    j = np.arange(1, ind.J + 1)
    classical = np.minimum(ind.beta - ind.alpha - ind.eta, 1 / (math.pi * j))
    classical_margin = float((classical * (1 + 1e-12) - mags).min())

    # suffix[K] = Σ_{j>K, j<=J} |c_j| for K = 0..J
    suffix = np.concatenate([np.cumsum(mags[::-1])[::-1], [0.0]])
    tail_margin, tail_K = math.inf, 1
    K = 1
    while True:
        tail = 2 * (float(suffix[K]) if K <= ind.J else 0.0)
        tail += remainder if K <= ind.J else 4 / (math.pi**3 * ind.eta**2 * K**2)
        margin = 10 / (ind.eta * K) - tail
        if margin < tail_margin:
            tail_margin, tail_K = margin, K
        if K > ind.J:
            break
        K *= 2
    return VerificationReport(
        alpha=ind.alpha,
        beta=ind.beta,
        eta=ind.eta,
        J=ind.J,
        grid_size=int(grid_size),
        truncation_error=remainder,
        plateau_margin=remainder - dev,
        range_margin=remainder - range_dev,
        exact_plateau_ok=exact_ok,
        coefficient_margin=coef_margin,
        worst_coefficient_index=worst,
        classical_coefficient_margin=classical_margin,
        tail_margin=tail_margin,
        worst_tail_K=tail_K,
        periodicity_error=periodic,
    )


def sample_triples(count: int, seed: int = 0, eta_min: float = 0.005) -> list[tuple[float, float, float]]:
    """Uniform admissible (α, β, η) with η >= eta_min, by rejection."""
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        alpha, beta = sorted(rng.uniform(-0.5, 0.5) for _ in range(2))
        top = admissible_eta_bound(alpha, beta)
        if top <= eta_min:
            continue
        eta = rng.uniform(eta_min, top)
        if eta >= top:
            continue
        out.append((alpha, beta, eta))
    return out
