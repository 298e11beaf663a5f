"""Exploratory comparator for polynomial averages against a Gowers norm of the last function.

Given P_1..P_k, 1-bounded f_0..f_k supported on [-B, B] with B = floor(C N^d)
and a weight θ on [N], it evaluates

    |N^{-(d+1)} Σ_{n, m<=N} θ(m) f_0(n) ∏_j f_j(n + P_j(m))|

next to ||f_k||_{U^s[-B, B]}.  Nothing is asserted about how the two relate:
the exponents in any such inequality are existential.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ContractError, DomainError
from .gowers import DEFAULT_BUDGET, interval_norm
from .poly_family import PolyFamily


@dataclass
class GvnReport:
    family: str
    N: int
    s: int
    C: float
    support: tuple[int, int]
    lhs: float
    lhs_abs_theta: float
    gowers_value: float
    gowers_method: str
    descriptors: list = field(default_factory=list)
    label: str = "exploratory"
    notes: list = field(default_factory=list)

    def as_dict(self):
        return {
            "family": self.family,
            "N": self.N,
            "s": self.s,
            "C": self.C,
            "support": list(self.support),
            "lhs": self.lhs,
            "lhs_abs_theta": self.lhs_abs_theta,
            "gowers_value": self.gowers_value,
            "gowers_method": self.gowers_method,
            "descriptors": self.descriptors,
            "label": self.label,
            "notes": self.notes,
        }


def _place(values, start, B) -> np.ndarray:
    """Embed (values, start) into an array over [-B, B], refusing mass outside it."""
    values = np.asarray(values, dtype=np.complex128)
    if np.any(np.abs(values) > 1 + 1e-12):
        raise ContractError("functions must be 1-bounded")
    idx = np.flatnonzero(values)
    if idx.size and (start + idx[0] < -B or start + idx[-1] > B):
        raise ContractError(f"function support [{start + idx[0]}, {start + idx[-1]}] leaves [-{B}, {B}]")
    out = np.zeros(2 * B + 1, dtype=np.complex128)
    lo = max(start, -B)
    hi = min(start + len(values) - 1, B)
    if lo <= hi:
        out[lo + B : hi + B + 1] = values[lo - start : hi - start + 1]
    return out


def evaluate(
    fam: PolyFamily,
    N: int,
    functions,
    s: int,
    theta=None,
    C: float = 2,
    *,
    starts=None,
    descriptors=None,
    method: str = "auto",
    budget: int = DEFAULT_BUDGET,
) -> GvnReport:
    """``functions`` holds k+1 arrays; array i starts at ``starts[i]`` (default -B)."""
    N = int(N)
    if s not in (2, 3):
        raise DomainError("s must be 2 or 3")
    if len(functions) != fam.k + 1:
        raise DomainError(f"need k + 1 = {fam.k + 1} functions, got {len(functions)}")
    B = math.floor(C * N**fam.d)
    starts = [-B] * len(functions) if starts is None else list(starts)
    fs = [_place(f, st, B) for f, st in zip(functions, starts)]
    th = np.ones(N, dtype=np.complex128) if theta is None else np.asarray(theta, dtype=np.complex128)
    if th.shape != (N,):
        raise DomainError("theta must have one value per m in [N]")
    if np.any(np.abs(th) > 1 + 1e-12):
        raise ContractError("theta must be 1-bounded")

    n = np.arange(-B, B + 1, dtype=np.int64)
    rows = np.empty(N, dtype=np.complex128)
    for i, m in enumerate(range(1, N + 1)):
        prod = fs[0].copy()
        for f, v in zip(fs[1:], fam.values(m)):
            pos = n + v + B
            ok = (pos >= 0) & (pos <= 2 * B)
            vals = np.zeros_like(prod)
            vals[ok] = f[pos[ok]]
            prod *= vals
        rows[i] = complex(math.fsum(prod.real.tolist()), math.fsum(prod.imag.tolist()))
    scale = N ** (fam.d + 1)
    lhs = abs(np.sum(th * rows)) / scale
    lhs_abs = abs(np.sum(np.abs(th) * rows)) / scale

    g = interval_norm(fs[-1], (-B, B), s, method=method, start=-B, budget=budget)
    notes = []
    if not fam.is_nonconstant():
        notes.append("some P_j is constant; the comparison is outside its usual hypotheses")
    return GvnReport(
        family=str(fam),
        N=N,
        s=int(s),
        C=float(C),
        support=(-B, B),
        lhs=float(lhs),
        lhs_abs_theta=float(lhs_abs),
        gowers_value=g.normalised,
        gowers_method=g.method,
        descriptors=list(descriptors or []),
        notes=notes,
    )
