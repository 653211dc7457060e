"""Exact arithmetic in GF(p) and GF(p^n).

Elements are coefficient vectors over Z_p in the power basis 1, a, ..., a^(n-1),
where ``a`` is a root of a monic irreducible polynomial.  Integers 0..p^n-1 map to
elements by reading their base-p digits as coefficients (least significant digit
is the constant term).

The fields used here have at most a few dozen elements, so every algorithm
favours transparency over speed: irreducibility is decided by trial division,
inverses are found by search.
"""

from __future__ import annotations

import csv
import io
import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, Sequence

import numpy as np

from .errors import (
    BadDegree,
    InputError,
    NotPrime,
    OutOfRange,
    Reducible,
    SpecMismatch,
    ZeroInput,
    ZeroInverse,
)

__all__ = [
    "FieldSpec",
    "FieldElement",
    "is_prime",
    "validate_spec",
    "default_spec",
    "from_integer",
    "to_integer",
    "add",
    "neg",
    "mul",
    "inv",
    "power",
    "is_primitive",
    "tables",
    "format_element",
    "tables_text",
    "tables_csv",
]

# polynomials fixed so that the published tables reproduce exactly
PINNED_POLYNOMIALS = {
    (2, 2): (1, 1),  # a^2 + a + 1
    (2, 3): (1, 1, 0),  # a^3 + a + 1
    (3, 2): (2, 1),  # a^2 + a + 2
}


def is_prime(p: int) -> bool:
    if not isinstance(p, (int, np.integer)) or p < 2:
        return False
    return all(p % f for f in range(2, int(p**0.5) + 1))


# --- polynomials over Z_p (coefficient lists, lowest degree first) ----------

def _trim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def _poly_rem(a: Sequence[int], b: Sequence[int], p: int) -> list[int]:
    """Remainder of a / b over Z_p; ``b`` must be monic."""
    r = _trim([c % p for c in a])
    db = len(b) - 1
    while len(r) - 1 >= db:
        shift = len(r) - 1 - db
        lead = r[-1]
        for i, c in enumerate(b):
            r[shift + i] = (r[shift + i] - lead * c) % p
        _trim(r)
    return r


def _monic(p: int, degree: int) -> Iterator[tuple[int, ...]]:
    for low in itertools.product(range(p), repeat=degree):
        yield low + (1,)


def _find_factor(p: int, poly: Sequence[int]) -> tuple[int, ...] | None:
    """Smallest-degree monic proper factor of the monic polynomial with low
    coefficients ``poly``, or None when it is irreducible."""
    full = list(poly) + [1]
    n = len(poly)
    for degree in range(1, n // 2 + 1):
        for f in _monic(p, degree):
            if not _poly_rem(full, f, p):
                return f
    return None


# --- field spec and elements ----------------------------------------------

@dataclass(frozen=True)
class FieldSpec:
    """GF(p^n) presented as Z_p[a] / (a^n + c_{n-1} a^{n-1} + ... + c_0).

    Construction validates: ``p`` must be prime and ``poly`` irreducible.
    """

    p: int
    n: int
    poly: tuple[int, ...]

    def __post_init__(self):
        if not is_prime(self.p):
            raise NotPrime(self.p)
        if not isinstance(self.n, (int, np.integer)) or self.n < 1:
            raise InputError(f"extension degree must be >= 1, got {self.n}")
        poly = tuple(int(c) for c in self.poly)
        if len(poly) != self.n:
            raise BadDegree(self.n, poly)
        if any(not 0 <= c < self.p for c in poly):
            raise InputError(f"coefficients must lie in 0..{self.p - 1}, got {list(poly)}")
        object.__setattr__(self, "poly", poly)
        factor = _find_factor(self.p, poly)
        if factor is not None:
            root = (-factor[0]) % self.p if len(factor) == 2 else None
            raise Reducible(format_polynomial(poly + (1,)), factor, root)

    @property
    def order(self) -> int:
        return self.p**self.n

    @property
    def zero(self) -> FieldElement:
        return from_integer(0, self)

    @property
    def one(self) -> FieldElement:
        return from_integer(1, self)

    def __call__(self, x: int) -> FieldElement:
        return from_integer(x, self)

    def elements(self) -> list[FieldElement]:
        return [from_integer(x, self) for x in range(self.order)]

    def polynomial_str(self, symbol: str = "α") -> str:
        return format_polynomial(self.poly + (1,), symbol)

    def to_dict(self) -> dict:
        return {"p": self.p, "n": self.n, "poly": list(self.poly)}

    @classmethod
    def from_dict(cls, data: dict) -> FieldSpec:
        return cls(int(data["p"]), int(data["n"]), tuple(data["poly"]))

    def __str__(self):
        return f"GF({self.p}^{self.n}) with {self.polynomial_str()} = 0"


@dataclass(frozen=True)
class FieldElement:
    coeffs: tuple[int, ...]
    spec: FieldSpec

    def _check(self, other: FieldElement) -> None:
        if not isinstance(other, FieldElement):
            raise TypeError(f"expected FieldElement, got {type(other).__name__}")
        if other.spec != self.spec:
            raise SpecMismatch(f"elements of {self.spec} and {other.spec} cannot be combined")

    def __add__(self, other):
        return add(self, other)

    def __sub__(self, other):
        return add(self, neg(other))

    def __neg__(self):
        return neg(self)

    def __mul__(self, other):
        return mul(self, other)

    def __truediv__(self, other):
        return mul(self, inv(other))

    def __pow__(self, k):
        return power(self, k)

    def __int__(self):
        return to_integer(self)

    def __bool__(self):
        return any(self.coeffs)

    def __repr__(self):
        return f"FieldElement({format_element(self)!r}, p={self.spec.p}, n={self.spec.n})"

    def __str__(self):
        return format_element(self)


def validate_spec(p: int, n: int, poly: Sequence[int]) -> FieldSpec:
    return FieldSpec(p, n, tuple(poly))


@lru_cache(maxsize=None)
def default_spec(p: int, n: int) -> FieldSpec:
    """The field presentation used when none is given.

    The three presentations that appear in the worked examples are pinned;
    anything else gets the first irreducible polynomial when coefficients are
    compared from c_{n-1} down to c_0.
    """
    if not is_prime(p):
        raise NotPrime(p)
    if n < 1:
        raise InputError(f"extension degree must be >= 1, got {n}")
    if (p, n) in PINNED_POLYNOMIALS:
        return FieldSpec(p, n, PINNED_POLYNOMIALS[(p, n)])
    for high_first in itertools.product(range(p), repeat=n):
        low_first = tuple(reversed(high_first))
        if _find_factor(p, low_first) is None:
            return FieldSpec(p, n, low_first)
    raise AssertionError(f"no irreducible polynomial of degree {n} over GF({p})")


def from_integer(x: int, spec: FieldSpec) -> FieldElement:
    if not 0 <= x < spec.order:
        raise OutOfRange(x, spec.order)
    digits = []
    for _ in range(spec.n):
        x, c = divmod(x, spec.p)
        digits.append(c)
    return FieldElement(tuple(digits), spec)


def to_integer(e: FieldElement) -> int:
    return sum(c * e.spec.p**k for k, c in enumerate(e.coeffs))


def add(a: FieldElement, b: FieldElement) -> FieldElement:
    a._check(b)
    p = a.spec.p
    return FieldElement(tuple((x + y) % p for x, y in zip(a.coeffs, b.coeffs)), a.spec)


def neg(a: FieldElement) -> FieldElement:
    p = a.spec.p
    return FieldElement(tuple((-x) % p for x in a.coeffs), a.spec)


def mul(a: FieldElement, b: FieldElement) -> FieldElement:
    a._check(b)
    spec = a.spec
    prod = [0] * (2 * spec.n - 1)
    for i, x in enumerate(a.coeffs):
        if x:
            for j, y in enumerate(b.coeffs):
                prod[i + j] += x * y
    rem = _poly_rem(prod, spec.poly + (1,), spec.p)
    return FieldElement(tuple(rem + [0] * (spec.n - len(rem))), spec)


def inv(a: FieldElement) -> FieldElement:
    if not a:
        raise ZeroInverse()
    one = a.spec.one
    for x in range(1, a.spec.order):
        candidate = from_integer(x, a.spec)
        if mul(a, candidate) == one:
            return candidate
    raise AssertionError(f"{a} has no inverse; {a.spec} is not a field")


def power(a: FieldElement, k: int) -> FieldElement:
    if k < 0:
        return power(inv(a), -k)
    result = a.spec.one
    for _ in range(k):
        result = mul(result, a)
    return result


def is_primitive(a: FieldElement) -> bool:
    """True iff a, a^2, ..., a^(q-1) run through every nonzero element."""
    if not a:
        raise ZeroInput("zero is never primitive")
    seen = set()
    x = a
    for _ in range(a.spec.order - 1):
        seen.add(x.coeffs)
        x = mul(x, a)
    return len(seen) == a.spec.order - 1


@lru_cache(maxsize=None)
def _tables(spec: FieldSpec) -> tuple[np.ndarray, np.ndarray]:
    elems = spec.elements()
    q = spec.order
    add_t = np.zeros((q, q), dtype=int)
    mul_t = np.zeros((q, q), dtype=int)
    for i, a in enumerate(elems):
        for j, b in enumerate(elems):
            add_t[i, j] = to_integer(add(a, b))
            mul_t[i, j] = to_integer(mul(a, b))
    add_t.setflags(write=False)
    mul_t.setflags(write=False)
    return add_t, mul_t


def tables(spec: FieldSpec) -> tuple[np.ndarray, np.ndarray]:
    """Addition and multiplication tables on integer codes 0..p^n-1."""
    return _tables(spec)


# --- rendering --------------------------------------------------------------

_SUPERSCRIPTS = str.maketrans("0123456789", "⁰¹²³⁴⁵⁶⁷⁸⁹")


def format_polynomial(coeffs: Sequence[int], symbol: str = "α", unicode: bool = True) -> str:
    terms = []
    for k in range(len(coeffs) - 1, -1, -1):
        c = coeffs[k]
        if not c:
            continue
        if k == 0:
            terms.append(str(c))
            continue
        mono = symbol
        if k > 1:
            mono += str(k).translate(_SUPERSCRIPTS) if unicode else f"^{k}"
        terms.append(mono if c == 1 else f"{c}{mono}")
    return "+".join(terms) or "0"


def format_element(e: FieldElement, symbol: str = "α", unicode: bool = True) -> str:
    return format_polynomial(e.coeffs, symbol, unicode)


def tables_text(spec: FieldSpec, symbol: str = "α") -> str:
    """Both tables laid out like a printed operation table, with element names."""
    names = [format_element(e, symbol) for e in spec.elements()]
    width = max(len(s) for s in names) + 2
    out = []
    for op, table in zip("+×", tables(spec)):
        out.append(op.ljust(width) + "|" + "".join(s.ljust(width) for s in names).rstrip())
        out.append("-" * width + "+" + "-" * (width * len(names)))
        for name, row in zip(names, table):
            out.append(name.ljust(width) + "|" + "".join(names[v].ljust(width) for v in row).rstrip())
        out.append("")
    return "\n".join(out)


def tables_csv(spec: FieldSpec) -> str:
    """Both tables as CSV blocks on integer codes, separated by an empty line."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    codes = list(range(spec.order))
    for i, (op, table) in enumerate(zip("+*", tables(spec))):
        if i:
            buf.write("\n")
        writer.writerow([op] + codes)
        for code, row in zip(codes, table):
            writer.writerow([code] + [int(v) for v in row])
    return buf.getvalue()
