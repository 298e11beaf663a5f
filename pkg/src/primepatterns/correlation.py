"""Correlation averages of Λ, μ, λ along polynomial progressions n + P_j(m).

All sums are evaluated row by row (one row per m) with correctly rounded
row totals (``math.fsum``), and rows are combined in m order, so a result
never depends on how the rows were distributed over worker threads.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from .arith_tables import ArithmeticTable, canonical_function, small_primes
from .errors import DomainError, HypothesisError, TableRangeError
from .local_density import DEFAULT_CUTOFF, fixed_factor_floats, fixed_product, singular_series
from .poly_family import PolyFamily, check_hypotheses

WEIGHTS = ("lambda", "mu", "liouville")
_CHUNK = 64


def canonical_weight(weight: str) -> str:
    w = canonical_function(weight)
    if w not in WEIGHTS:
        raise DomainError(f"weight must be one of {WEIGHTS}, got {weight!r}")
    return w


@dataclass
class CorrelationReport:
    family: str
    N: int
    weight: str
    empirical: float
    predicted: float
    discrepancy: float
    normalization: str
    cutoff: int
    fixed: dict | None = None
    divergent: bool = False
    hypothesis_ok: bool = True
    exceptional_count: int | None = None
    notes: list = field(default_factory=list)

    def as_dict(self):
        return asdict(self)


def required_bound(fam: PolyFamily, N: int, n_range: tuple[int, int], m_values) -> int:
    lo, hi = n_range
    out = 0
    for m in m_values:
        for v in fam.values(m):
            out = max(out, abs(lo + v), abs(hi + v))
    return out


def _check_table(table: ArithmeticTable, need: int):
    if need > table.upper_bound:
        raise TableRangeError(
            f"table covers [1, {table.upper_bound}] but this average needs |argument| <= {need}",
            required_bound=need,
        )


def _row(dense: np.ndarray, fam: PolyFamily, m: int, n: np.ndarray) -> np.ndarray:
    """∏_j w(n + P_j(m)) over the vector n."""
    out = None
    for v in fam.values(m):
        vals = dense[np.abs(n + v)]
        out = vals.astype(np.float64) if out is None else out * vals
    return out


def _map_chunks(fn, items, workers):
    chunks = [items[i : i + _CHUNK] for i in range(0, len(items), _CHUNK)]
    if workers and workers > 1 and len(chunks) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(fn, chunks))
    else:
        parts = [fn(c) for c in chunks]
    return [x for part in parts for x in part]


def row_sums(fam: PolyFamily, N: int, weight: str, table: ArithmeticTable, m_values, workers: int = 1) -> list[float]:
    """For each m, the correctly rounded Σ_{n<=N^d} ∏_j w(n + P_j(m))."""
    weight = canonical_weight(weight)
    top = N**fam.d
    _check_table(table, required_bound(fam, N, (1, top), m_values))
    dense = table.dense(weight)
    n = np.arange(1, top + 1, dtype=np.int64)

    def work(ms):
        return [math.fsum(_row(dense, fam, m, n).tolist()) for m in ms]

    return _map_chunks(work, list(m_values), workers)


def _prediction(fam, weight, cutoff):
    if weight != "lambda":
        return 0.0, True
    hyp = check_hypotheses(fam, 2).pairwise_ok
    return singular_series(fam, cutoff, require_pairwise=False).value, hyp


def double_average(
    fam: PolyFamily,
    N: int,
    weight: str,
    table: ArithmeticTable,
    *,
    cutoff: int = DEFAULT_CUTOFF,
    workers: int = 1,
) -> CorrelationReport:
    """(1/N^{d+1}) Σ_{n<=N^d} Σ_{m<=N} ∏_j w(n + P_j(m)) against ∏_{p<=cutoff} β_p (Λ) or 0 (μ, λ)."""
    weight = canonical_weight(weight)
    N = int(N)
    if N < 3:
        raise DomainError("N must be at least 3")
    rows = row_sums(fam, N, weight, table, range(1, N + 1), workers)
    empirical = math.fsum(rows) / N ** (fam.d + 1)
    predicted, hyp = _prediction(fam, weight, cutoff)
    report = CorrelationReport(
        family=str(fam),
        N=N,
        weight=weight,
        empirical=empirical,
        predicted=predicted,
        discrepancy=abs(empirical - predicted),
        normalization=f"1/N^{fam.d + 1}",
        cutoff=cutoff,
        hypothesis_ok=hyp,
    )
    if weight == "lambda" and not hyp:
        report.notes.append("family fails deg(P_i - P_j) = d; prediction shown for reference only")
    return report


def one_dim_average(
    fam: PolyFamily,
    N: int,
    weight: str,
    table: ArithmeticTable,
    *,
    m: int | None = None,
    n: int | None = None,
    cutoff: int = DEFAULT_CUTOFF,
) -> CorrelationReport:
    """Inner average with one variable fixed.

    Fixed m: (1/N^d) Σ_{n<=N^d} ∏ w(n + P_j(m)) against ∏_p β_p(m).
    Fixed n: (1/N) Σ_{m<=N} ∏ w(n + P_j(m)) against ∏_p β_p'(n); needs every
    P_j nonconstant.
    """
    weight = canonical_weight(weight)
    N = int(N)
    if (m is None) == (n is None):
        raise ValueError("fix exactly one of m, n")
    notes = []
    if m is not None:
        m = int(m)
        top = N**fam.d
        empirical = row_sums(fam, N, weight, table, [m])[0] / top
        vals = fam.values(m)
        divergent = len(set(vals)) < len(vals)
        if divergent:
            notes.append("P_i(m) = P_j(m) for some i != j: the local product diverges; truncated value shown")
        predicted = fixed_product(fam, "m", m, cutoff) if weight == "lambda" else 0.0
        fixed = {"m": m}
        norm = f"1/N^{fam.d}"
    else:
        if not fam.is_nonconstant():
            raise HypothesisError("fixed-n averages need every P_j nonconstant")
        n = int(n)
        ms = range(1, N + 1)
        _check_table(table, required_bound(fam, N, (n, n), ms))
        dense = table.dense(weight)
        terms = [float(np.prod([dense[abs(n + v)] for v in fam.values(mm)])) for mm in ms]
        empirical = math.fsum(terms) / N
        divergent = False
        predicted = fixed_product(fam, "n", n, cutoff) if weight == "lambda" else 0.0
        fixed = {"n": n}
        norm = "1/N"
    return CorrelationReport(
        family=str(fam),
        N=N,
        weight=weight,
        empirical=empirical,
        predicted=predicted,
        discrepancy=abs(empirical - predicted),
        normalization=norm,
        cutoff=cutoff,
        fixed=fixed,
        divergent=divergent,
        notes=notes,
    )


@dataclass
class BatemanHornScan:
    family: str
    N: int
    A_threshold: float
    threshold: float
    cutoff: int
    n: np.ndarray
    observed: np.ndarray
    predicted: np.ndarray
    deviation: np.ndarray
    exceptional_count: int
    histogram_counts: np.ndarray
    histogram_edges: np.ndarray
    divergent: bool = False

    @property
    def exceptional_fraction(self) -> float:
        return self.exceptional_count / len(self.n)

    def as_dict(self):
        return {
            "family": self.family,
            "N": self.N,
            "A_threshold": self.A_threshold,
            "threshold": self.threshold,
            "cutoff": self.cutoff,
            "count": int(len(self.n)),
            "exceptional_count": self.exceptional_count,
            "exceptional_fraction": self.exceptional_fraction,
            "divergent": self.divergent,
            "histogram": {
                "counts": self.histogram_counts.tolist(),
                "edges": self.histogram_edges.tolist(),
            },
        }

    def write_csv(self, fh):
        fh.write("n,observed,predicted,deviation,exceptional\n")
        for row in zip(self.n.tolist(), self.observed.tolist(), self.predicted.tolist(), self.deviation.tolist()):
            fh.write(f"{row[0]},{row[1]!r},{row[2]!r},{row[3]!r},{int(row[3] > self.threshold)}\n")


def per_n_sums(fam: PolyFamily, N: int, weight: str, table: ArithmeticTable, workers: int = 1) -> np.ndarray:
    """S(n) = Σ_{m<=N} ∏_j w(n + P_j(m)) for n = 1..N^d, compensated across m."""
    weight = canonical_weight(weight)
    top = N**fam.d
    ms = list(range(1, N + 1))
    _check_table(table, required_bound(fam, N, (1, top), ms))
    dense = table.dense(weight)
    n = np.arange(1, top + 1, dtype=np.int64)

    def work(chunk):
        block = np.stack([_row(dense, fam, m, n) for m in chunk])
        return [block.sum(axis=0)]

    parts = _map_chunks(work, ms, workers)
    # Neumaier summation of the chunk partial sums, in chunk order
    total = np.zeros(top)
    comp = np.zeros(top)
    for part in parts:
        t = total + part
        big = np.abs(total) >= np.abs(part)
        comp += np.where(big, (total - t) + part, (part - t) + total)
        total = t
    return total + comp


def bateman_horn_scan(
    fam: PolyFamily,
    N: int,
    A_threshold: float,
    table: ArithmeticTable,
    *,
    cutoff: int = DEFAULT_CUTOFF,
    bins: int = 20,
    workers: int = 1,
) -> BatemanHornScan:
    """For each n <= N^d compare Σ_{m<=N} ∏Λ(P_j(m)+n) with N·∏_{p<=cutoff} β_p'(n)."""
    N = int(N)
    observed = per_n_sums(fam, N, "lambda", table, workers)
    top = N**fam.d
    n = np.arange(1, top + 1, dtype=np.int64)
    local = np.ones(top)
    for p in small_primes(cutoff).tolist():
        local *= fixed_factor_floats(fam, p, "n")[n % p]
    predicted = N * local
    deviation = np.abs(observed - predicted)
    threshold = N / math.log(N) ** A_threshold
    counts, edges = np.histogram(deviation / N, bins=bins)
    return BatemanHornScan(
        family=str(fam),
        N=N,
        A_threshold=float(A_threshold),
        threshold=threshold,
        cutoff=cutoff,
        n=n,
        observed=observed,
        predicted=predicted,
        deviation=deviation,
        exceptional_count=int(np.count_nonzero(deviation > threshold)),
        histogram_counts=counts,
        histogram_edges=edges,
        divergent=not fam.is_nonconstant(),
    )


@dataclass
class ConvergenceStudy:
    rows: list
    warnings: list

    def as_dict(self):
        return {"rows": self.rows, "warnings": self.warnings}


def convergence_study(
    fam: PolyFamily,
    Ns,
    weight: str,
    table: ArithmeticTable,
    *,
    cutoff: int = DEFAULT_CUTOFF,
    workers: int = 1,
) -> ConvergenceStudy:
    """Discrepancy per N; a non-decreasing step is a warning, never an error."""
    Ns = [int(x) for x in Ns]
    if any(b <= a for a, b in zip(Ns, Ns[1:])):
        raise DomainError("Ns must be strictly increasing")
    rows, warnings = [], []
    for N in Ns:
        r = double_average(fam, N, weight, table, cutoff=cutoff, workers=workers)
        rows.append({"N": N, "empirical": r.empirical, "predicted": r.predicted, "discrepancy": r.discrepancy})
    for a, b in zip(rows, rows[1:]):
        if b["discrepancy"] >= a["discrepancy"]:
            warnings.append(f"discrepancy did not decrease from N={a['N']} to N={b['N']}")
    return ConvergenceStudy(rows, warnings)
