"""State vectors and the generalized Pauli (Weyl) operator alphabet.

States are plain 1-D complex numpy arrays.  Operators are dense matrices built
from per-qudit letters:

* p = 2: ``1``, ``X``, ``Y``, ``Z`` are the identity and the Hermitian Pauli
  matrices.
* p >= 3: ``Z = diag(1, w, w^2, ...)`` with ``w = exp(2 pi i / p)``, ``X`` the
  cyclic shift ``|j> -> |j+1 mod p>``, ``Y = X Z`` and ``W = X Z^2``.

Any letter may carry an exponent digit 2-9 (``Z2`` is Z squared), and the generic
letter ``[a,b]`` stands for ``X^a Z^b``.  A word is a sequence of letters, one
per qudit, and realizes as the Kronecker product in letter order.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

import numpy as np

from .errors import DimMismatch, InputError, NotAnEigenvector, UnknownSymbol

DEFAULT_TOL = 1e-9

_TOKEN = re.compile(r"\[(\d+),(\d+)\]|([1XYZW])([2-9]?)")
_SUPER = {"²": "2", "³": "3", "⁴": "4", "⁵": "5", "⁶": "6"}
_SUPER_OUT = {"2": "²", "3": "³", "4": "⁴", "5": "⁵", "6": "⁶"}


def root_of_unity(p: int) -> complex:
    return np.exp(2j * np.pi / p)


def shift(p: int) -> np.ndarray:
    X = np.zeros((p, p), dtype=complex)
    for j in range(p):
        X[(j + 1) % p, j] = 1
    return X


def clock(p: int) -> np.ndarray:
    return np.diag(root_of_unity(p) ** np.arange(p))


_PAULI = {
    "1": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


def _normalize_symbol(symbol: str) -> str:
    return "".join(_SUPER.get(ch, ch) for ch in symbol.strip())


@lru_cache(maxsize=None)
def _letter(symbol: str, p: int) -> np.ndarray:
    m = _TOKEN.fullmatch(symbol)
    if m is None:
        raise UnknownSymbol(symbol, p)
    if m.group(1) is not None:
        a, b = int(m.group(1)), int(m.group(2))
        mat = np.linalg.matrix_power(shift(p), a) @ np.linalg.matrix_power(clock(p), b)
    else:
        base, exp = m.group(3), int(m.group(4) or 1)
        if p == 2:
            if base == "W":
                raise UnknownSymbol(symbol, p)
            single = _PAULI[base]
        else:
            X, Z = shift(p), clock(p)
            single = {
                "1": np.eye(p, dtype=complex),
                "X": X,
                "Z": Z,
                "Y": X @ Z,
                "W": X @ Z @ Z,
            }[base]
        mat = np.linalg.matrix_power(single, exp)
    mat.setflags(write=False)
    return mat


def letter_matrix(symbol: str, p: int) -> np.ndarray:
    """Matrix of a single-qudit letter such as ``"Z"``, ``"W"`` or ``"Z²"``."""
    if p < 2:
        raise InputError(f"local dimension must be >= 2, got {p}")
    return _letter(_normalize_symbol(symbol), p)


def parse_letters(text: str) -> tuple[str, ...]:
    text = _normalize_symbol(text)
    letters, pos = [], 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise UnknownSymbol(text[pos:], 0)
        letters.append(m.group(0))
        pos = m.end()
    if not letters:
        raise InputError("empty operator word")
    return tuple(letters)


@dataclass(frozen=True)
class WeylWord:
    """A tensor product of single-qudit letters, e.g. ``WeylWord.parse("XZ2", 3)``."""

    p: int
    letters: tuple[str, ...]
    _matrix: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        letters = tuple(_normalize_symbol(s) for s in self.letters)
        if not letters:
            raise InputError("a word needs at least one letter")
        object.__setattr__(self, "letters", letters)
        mats = [letter_matrix(s, self.p) for s in letters]
        out = mats[0]
        for m in mats[1:]:
            out = np.kron(out, m)
        out = np.array(out)
        out.setflags(write=False)
        object.__setattr__(self, "_matrix", out)

    @classmethod
    def parse(cls, text: str, p: int) -> WeylWord:
        return cls(p, parse_letters(text))

    @property
    def matrix(self) -> np.ndarray:
        return self._matrix

    @property
    def dim(self) -> int:
        return self.p ** len(self.letters)

    @property
    def n_qudits(self) -> int:
        return len(self.letters)

    def __str__(self):
        return "".join(self.letters)

    def pretty(self) -> str:
        out = []
        for s in self.letters:
            if len(s) == 2 and s[1] in _SUPER_OUT:
                s = s[0] + _SUPER_OUT[s[1]]
            out.append(s)
        return "".join(out)


def word_matrix(word: WeylWord) -> np.ndarray:
    return word.matrix


def commutes(a: WeylWord, b: WeylWord, tol: float = DEFAULT_TOL) -> bool:
    if a.dim != b.dim:
        raise DimMismatch(f"cannot compare words of dimension {a.dim} and {b.dim}")
    A, B = a.matrix, b.matrix
    return float(np.max(np.abs(A @ B - B @ A))) < tol


def is_unitary(m: np.ndarray, tol: float = 1e-12) -> bool:
    return float(np.max(np.abs(m.conj().T @ m - np.eye(len(m))))) < tol


# --- states -----------------------------------------------------------------

def _as_matrix(op) -> np.ndarray:
    return op.matrix if isinstance(op, WeylWord) else np.asarray(op)


def basis_state(index: int, dim: int) -> np.ndarray:
    e = np.zeros(dim, dtype=complex)
    e[index] = 1
    return e


def apply(op, s: np.ndarray) -> np.ndarray:
    m = _as_matrix(op)
    if m.shape[1] != len(s):
        raise DimMismatch(f"operator of size {m.shape} cannot act on a {len(s)}-vector")
    return m @ s


def inner(a: np.ndarray, b: np.ndarray) -> complex:
    """<a|b>, antilinear in ``a``."""
    if len(a) != len(b):
        raise DimMismatch(f"inner product of {len(a)}- and {len(b)}-vectors")
    return complex(np.vdot(a, b))


def tensor(*states: np.ndarray) -> np.ndarray:
    out = np.ones(1, dtype=complex)
    for s in states:
        out = np.kron(out, s)
    return out


def conjugate_std(s: np.ndarray) -> np.ndarray:
    """Entry-wise complex conjugate in the standard basis."""
    return np.conj(s)


def eigenvalue_of(op, s: np.ndarray, tol: float = DEFAULT_TOL) -> complex:
    """Return <s|A|s> after checking that ``s`` really is an eigenvector of A."""
    As = apply(op, s)
    lam = complex(np.vdot(s, As))
    residual = float(np.linalg.norm(As - lam * s))
    if residual >= tol:
        raise NotAnEigenvector(residual, tol)
    return lam


def state_to_json(s: np.ndarray) -> list[list[float]]:
    return [[float(z.real), float(z.imag)] for z in s]


def state_from_json(pairs: Sequence[Sequence[float]]) -> np.ndarray:
    return np.array([complex(re, im) for re, im in pairs], dtype=complex)
