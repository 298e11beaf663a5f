"""Integer polynomial families P_1, ..., P_k and their structural hypotheses."""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field

from .errors import DomainError, FamilyParseError


def _trim(coeffs) -> tuple[int, ...]:
    c = [int(x) for x in coeffs]
    while len(c) > 1 and c[-1] == 0:
        c.pop()
    return tuple(c) if c else (0,)


def degree(coeffs) -> int:
    """Degree of a coefficient vector (low order first); the zero polynomial has degree -1."""
    c = _trim(coeffs)
    if c == (0,):
        return -1
    return len(c) - 1


def poly_sub(a, b) -> tuple[int, ...]:
    n = max(len(a), len(b))
    a = list(a) + [0] * (n - len(a))
    b = list(b) + [0] * (n - len(b))
    return _trim(x - y for x, y in zip(a, b))


def horner(coeffs, x: int) -> int:
    acc = 0
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


def format_poly(coeffs) -> str:
    c = _trim(coeffs)
    if c == (0,):
        return "0"
    parts = []
    for i in range(len(c) - 1, -1, -1):
        a = c[i]
        if a == 0:
            continue
        mag = abs(a)
        if i == 0:
            body = str(mag)
        else:
            mono = "y" if i == 1 else f"y^{i}"
            body = mono if mag == 1 else f"{mag}*{mono}"
        sign = "-" if a < 0 else "+"
        if not parts:
            parts.append(body if a > 0 else f"-{body}")
        else:
            parts.append(f"{sign} {body}")
    return " ".join(parts)


@dataclass(frozen=True)
class PolyFamily:
    """k integer polynomials stored as canonical coefficient tuples (constant term first)."""

    polys: tuple[tuple[int, ...], ...]
    k: int = field(init=False)
    d: int = field(init=False)

    def __post_init__(self):
        polys = tuple(_trim(p) for p in self.polys)
        if not polys:
            raise DomainError("a polynomial family needs at least one polynomial")
        d = max(max(degree(p) for p in polys), 0)
        if any(p == (0,) for p in polys) and (len(polys) < 2 or d < 1):
            raise DomainError("the zero polynomial is only allowed when k >= 2 and d >= 1")
        object.__setattr__(self, "polys", polys)
        object.__setattr__(self, "k", len(polys))
        object.__setattr__(self, "d", d)

    @classmethod
    def from_coeffs(cls, polys) -> "PolyFamily":
        return cls(tuple(tuple(p) for p in polys))

    def __str__(self):
        return "; ".join(format_poly(p) for p in self.polys)

    def eval(self, j: int, m: int) -> int:
        """P_j(m) for 1-based j, exact."""
        if not 1 <= j <= self.k:
            raise IndexError(f"polynomial index {j} outside 1..{self.k}")
        return horner(self.polys[j - 1], int(m))

    def values(self, m: int) -> list[int]:
        m = int(m)
        return [horner(p, m) for p in self.polys]

    def residues(self, m: int, p: int) -> list[int]:
        """P_j(m) mod p for all j, reducing coefficients first."""
        m %= p
        out = []
        for poly in self.polys:
            acc = 0
            for c in reversed(poly):
                acc = (acc * m + c) % p
            out.append(acc)
        return out

    def degrees(self) -> list[int]:
        return [degree(p) for p in self.polys]

    def difference_degree(self, i: int, j: int) -> int:
        return degree(poly_sub(self.polys[i - 1], self.polys[j - 1]))

    def shift(self, c: int) -> "PolyFamily":
        """Add the constant c to every polynomial.  Never applied implicitly."""
        return PolyFamily(tuple((p[0] + c,) + p[1:] for p in self.polys))

    def is_nonconstant(self) -> bool:
        return all(degree(p) >= 1 for p in self.polys)

    def to_json(self) -> str:
        return json.dumps({"polys": [list(p) for p in self.polys]})

    @classmethod
    def from_json(cls, text: str) -> "PolyFamily":
        data = json.loads(text)
        return cls.from_coeffs(data["polys"])


# -- parsing ------------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(\d+)|(y)|(\*\*|\^)|([*+\-;]))")


class _Parser:
    """Recursive-descent parser for ``poly (";" poly)*`` in expanded form over y."""

    def __init__(self, text: str):
        self.text = text
        self.tokens = []
        pos = 0
        while pos < len(text):
            if text[pos:].strip() == "":
                break
            mt = _TOKEN.match(text, pos)
            if mt is None:
                bad = pos + len(text[pos:]) - len(text[pos:].lstrip())
                raise FamilyParseError(f"unexpected character {text[bad]!r}", bad)
            start = mt.start(mt.lastindex)
            if mt.group(1):
                self.tokens.append(("int", int(mt.group(1)), start))
            elif mt.group(2):
                self.tokens.append(("y", None, start))
            elif mt.group(3):
                self.tokens.append(("^", None, start))
            else:
                self.tokens.append((mt.group(4), None, start))
            pos = mt.end()
        self.i = 0

    def peek(self):
        return self.tokens[self.i] if self.i < len(self.tokens) else (None, None, len(self.text))

    def take(self):
        tok = self.peek()
        self.i += 1
        return tok

    def family(self):
        polys = [self.poly()]
        while self.peek()[0] == ";":
            self.take()
            polys.append(self.poly())
        kind, _, pos = self.peek()
        if kind is not None:
            raise FamilyParseError(f"unexpected token {self.text[pos]!r}", pos)
        return polys

    def poly(self):
        coeffs: dict[int, int] = {}
        sign = 1
        kind, _, pos = self.peek()
        if kind in ("+", "-"):
            self.take()
            sign = -1 if kind == "-" else 1
        self.term(sign, coeffs)
        while self.peek()[0] in ("+", "-"):
            sign = -1 if self.take()[0] == "-" else 1
            self.term(sign, coeffs)
        top = max(coeffs) if coeffs else 0
        return [coeffs.get(e, 0) for e in range(top + 1)]

    def term(self, sign, coeffs):
        coef, exp = self.factor()
        coef *= sign
        while self.peek()[0] == "*":
            self.take()
            c, e = self.factor()
            coef *= c
            exp += e
        coeffs[exp] = coeffs.get(exp, 0) + coef

    def factor(self):
        kind, val, pos = self.take()
        if kind == "int":
            if self.peek()[0] == "y":  # implicit product, as in "2y"
                self.take()
                return val, self._power()
            return val, 0
        if kind == "y":
            return 1, self._power()
        if kind is None:
            raise FamilyParseError("unexpected end of input", pos)
        raise FamilyParseError(f"expected a number or 'y', got {self.text[pos]!r}", pos)

    def _power(self):
        if self.peek()[0] == "^":
            self.take()
            kind, val, pos = self.take()
            if kind != "int":
                raise FamilyParseError("exponent must be a non-negative integer", pos)
            return val
        return 1


def parse_family(text: str) -> PolyFamily:
    """Parse ``"0; y^2; 2*y^2"`` style input into a canonical family."""
    if not text or not text.strip():
        raise FamilyParseError("empty family", 0)
    return PolyFamily.from_coeffs(_Parser(text).family())


# -- hypotheses -----------------------------------------------------------------


@dataclass(frozen=True)
class HypothesisReport:
    pairwise_ok: bool
    pivot_ok: int | None
    nonconstant_ok: bool
    obstruction_primes: tuple[int, ...]
    scan_bound: int

    def as_dict(self):
        return {
            "pairwise_ok": self.pairwise_ok,
            "pivot": self.pivot_ok,
            "nonconstant_ok": self.nonconstant_ok,
            "obstruction_primes": list(self.obstruction_primes),
            "scan_bound": self.scan_bound,
        }


def pivot_indices(fam: PolyFamily) -> list[int]:
    """All 1-based ℓ with deg(P_ℓ - P_i) = d for every i != ℓ."""
    out = []
    for l in range(1, fam.k + 1):
        if all(fam.difference_degree(l, i) == fam.d for i in range(1, fam.k + 1) if i != l):
            out.append(l)
    return out


def check_hypotheses(fam: PolyFamily, prime_scan_bound: int | None = None) -> HypothesisReport:
    from .arith_tables import small_primes
    from .local_density import beta_p

    bound = max(fam.k, 100) if prime_scan_bound is None else int(prime_scan_bound)
    if bound < 2:
        raise DomainError("prime scan bound must be at least 2")
    pairwise = all(
        fam.difference_degree(i, j) == fam.d
        for i in range(1, fam.k + 1)
        for j in range(i + 1, fam.k + 1)
    )
    pivots = pivot_indices(fam)
    obstructions = tuple(p for p in small_primes(bound).tolist() if beta_p(fam, p).value == 0)
    return HypothesisReport(
        pairwise_ok=pairwise,
        pivot_ok=pivots[0] if pivots else None,
        nonconstant_ok=fam.is_nonconstant(),
        obstruction_primes=obstructions,
        scan_bound=bound,
    )
