"""Commuting observable sets, their joint eigenbases, and unbiasedness checks.

Basis conventions:

* states are ordered by the eigenvalue signature of the generating words, with
  eigenvalues ranked ``+1, -1`` for qubits and ``w, w^2, ..., w^(p-1), 1`` for
  odd p (so ``w, w-bar, 1`` for qutrits);
* each state's global phase makes its overlap with ``|0...0>`` real positive
  (or, when that overlap vanishes, its first nonzero amplitude).
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

import numpy as np

from . import fixtures
from .errors import (
    DegenerateSignatures,
    InputError,
    NotPrime,
    PhaseConventionUnavailable,
    SetValidationFailed,
    UnsupportedDimension,
    ValidationError,
)
from .galois import is_prime
from .weylalg import DEFAULT_TOL, WeylWord, commutes, eigenvalue_of, is_unitary, state_to_json

EIGEN_GROUP_TOL = 1e-9

# commas separate words, except inside a generic letter like [1,2]
_WORD_SEP = re.compile(r",(?![^\[]*\])")


@dataclass(frozen=True)
class ObservableSet:
    words: tuple[WeylWord, ...]
    generators: tuple[WeylWord, ...]

    @classmethod
    def parse(cls, text: str, p: int, n_generators: int | None = None) -> ObservableSet:
        """``"XY,YZ,ZX"`` -> set whose first ``n_generators`` words generate."""
        words = tuple(WeylWord.parse(w, p) for w in _WORD_SEP.split(text))
        k = len(words) if n_generators is None else n_generators
        return cls(words, words[:k])

    @property
    def p(self) -> int:
        return self.words[0].p

    @property
    def dim(self) -> int:
        return self.words[0].dim

    def __str__(self):
        return ",".join(str(w) for w in self.words)


@dataclass(frozen=True)
class Basis:
    """Ordered joint eigenbasis; ``states[k - 1]`` is the k-th state."""

    m: int
    observables: ObservableSet
    states: np.ndarray = field(repr=False)
    signatures: tuple[tuple[complex, ...], ...] = field(repr=False)

    @property
    def d(self) -> int:
        return len(self.states)

    def state(self, k: int) -> np.ndarray:
        if not 1 <= k <= self.d:
            raise InputError(f"state index {k} outside 1..{self.d}")
        return self.states[k - 1]


@dataclass(frozen=True)
class MubFamily:
    d: int
    bases: tuple[Basis, ...]

    @property
    def p(self) -> int:
        return self.bases[0].observables.p

    def __len__(self):
        return len(self.bases)

    def __getitem__(self, m) -> Basis:
        return self.bases[m]

    def __iter__(self):
        return iter(self.bases)


# --- eigenvalue bookkeeping -------------------------------------------------

def eigenvalue_rank(lam: complex, p: int, tol: float = 1e-6) -> tuple[int, float]:
    """Sort key giving the signature order for eigenvalue ``lam``."""
    if p == 2 and abs(lam.imag) < tol and abs(abs(lam.real) - 1) < tol:
        return (0 if lam.real > 0 else 1, 0.0)
    angle = float(np.angle(lam)) % (2 * np.pi)
    e = int(round(angle * p / (2 * np.pi))) % p
    if abs(lam - np.exp(2j * np.pi * e / p)) < tol:
        return ((e - 1) % p, 0.0)
    # not a p-th root of unity: after all roots, by angle
    return (p, angle)


def snap_eigenvalue(lam: complex, p: int, tol: float = 1e-6) -> complex:
    rank, _ = eigenvalue_rank(lam, p, tol)
    if rank >= p:
        return complex(lam)
    if p == 2:
        return complex((1, -1)[rank])
    return complex(np.exp(2j * np.pi * ((rank + 1) % p) / p))


def eigenvalue_symbol(lam: complex, p: int, tol: float = 1e-6) -> str:
    rank, _ = eigenvalue_rank(lam, p, tol)
    if rank >= p:
        return f"{lam.real:.4g}{lam.imag:+.4g}i"
    if p == 2:
        return "+-"[rank]
    e = (rank + 1) % p
    if p == 3:
        return ("1", "ω", "ω̄")[e]
    return "1" if e == 0 else f"w{e}"


# --- joint eigenbasis ------------------------------------------------------

def _distinct(values: np.ndarray, tol: float) -> list[complex]:
    groups: list[complex] = []
    for v in values:
        if all(abs(v - g) >= tol for g in groups):
            groups.append(complex(v))
    return groups


def _split(A: np.ndarray, V: np.ndarray, tol: float) -> list[tuple[complex, np.ndarray]]:
    """Decompose span(V), an invariant subspace of A, into A's eigenspaces."""
    B = V.conj().T @ A @ V
    lams = _distinct(np.linalg.eigvals(B), tol)
    out = []
    eye = np.eye(len(B))
    for lam in lams:
        P = eye.astype(complex)
        for mu in lams:
            if mu != lam:
                P = P @ (B - mu * eye) / (lam - mu)
        U, s, _ = np.linalg.svd(P)
        rank = int(np.sum(s > 0.5))
        out.append((lam, V @ U[:, :rank]))
    return out


def _fix_phase(s: np.ndarray, tol: float, strict: bool) -> np.ndarray:
    if abs(s[0]) >= tol:
        ref = s[0]
    elif strict:
        raise PhaseConventionUnavailable(
            f"overlap with |0...0> is {abs(s[0]):.2e}, below tolerance {tol:.1e}"
        )
    else:
        ref = s[np.argmax(np.abs(s) >= tol)]
    return s * (abs(ref) / ref)


def joint_eigenbasis(
    obs: ObservableSet,
    tol: float = DEFAULT_TOL,
    m: int = 0,
    strict_phase: bool = False,
    shuffle: np.random.Generator | None = None,
) -> Basis:
    """Simultaneous eigenstates of ``obs`` by successive eigenspace refinement.

    ``shuffle`` randomizes the starting frame and the order in which eigenvalue
    blocks are refined; the output must not depend on it.
    """
    d = obs.dim
    if shuffle is None:
        V0 = np.eye(d, dtype=complex)
    else:
        z = shuffle.normal(size=(d, d)) + 1j * shuffle.normal(size=(d, d))
        V0, _ = np.linalg.qr(z)
    blocks: list[tuple[tuple[complex, ...], np.ndarray]] = [((), V0)]
    for g in obs.generators:
        refined = []
        for sig, V in blocks:
            parts = _split(g.matrix, V, EIGEN_GROUP_TOL)
            if shuffle is not None:
                parts = [parts[i] for i in shuffle.permutation(len(parts))]
            refined += [(sig + (snap_eigenvalue(lam, obs.p),), W) for lam, W in parts]
        blocks = refined
    for sig, V in blocks:
        if V.shape[1] != 1:
            labels = "".join(eigenvalue_symbol(x, obs.p) for x in sig)
            raise DegenerateSignatures(
                f"{obs}: signature {labels} labels a {V.shape[1]}-dimensional eigenspace"
            )
    blocks.sort(key=lambda b: [eigenvalue_rank(x, obs.p) for x in b[0]])
    states = np.array([_fix_phase(V[:, 0], tol, strict_phase) for _, V in blocks])
    states.setflags(write=False)
    return Basis(m, obs, states, tuple(sig for sig, _ in blocks))


def validate_set(obs: ObservableSet, tol: float = DEFAULT_TOL) -> ObservableSet:
    """Raise SetValidationFailed unless ``obs`` commutes and labels uniquely."""
    dims = {w.dim for w in obs.words} | {w.dim for w in obs.generators}
    if len(dims) != 1:
        raise SetValidationFailed(f"{obs}: words act on different dimensions {sorted(dims)}")
    for w in obs.words:
        if not is_unitary(w.matrix):
            raise SetValidationFailed(f"{obs}: {w} is not unitary")
    for a, b in itertools.combinations(obs.words + obs.generators, 2):
        if not commutes(a, b, tol):
            raise SetValidationFailed(f"{obs}: {a} and {b} do not commute", pair=(str(a), str(b)))
    try:
        joint_eigenbasis(obs, tol)
    except DegenerateSignatures as exc:
        raise SetValidationFailed(str(exc)) from exc
    return obs


# --- built-in sets and families -------------------------------------------

def builtin_sets(d: int) -> list[ObservableSet]:
    if d not in fixtures.BUILTIN:
        raise UnsupportedDimension(d, fixtures.BUILTIN)
    p, rows, n_gen = fixtures.BUILTIN[d]
    return [validate_set(ObservableSet.parse(row, p, n_gen)) for row in rows]


def prime_sets(p: int) -> list[ObservableSet]:
    """{Z}, {X}, {XZ}, ..., {XZ^(p-1)} as singleton sets (Y for the qubit)."""
    if not is_prime(p):
        raise NotPrime(p)
    if p == 2:
        letters = ["Z", "X", "Y"]
    else:
        letters = ["Z", "X"] + [f"[1,{b}]" for b in range(1, p)]
        if p == 3:
            letters = ["Z", "X", "Y", "W"]
    return [ObservableSet.parse(s, p) for s in letters]


def supported_dimension(d: int) -> bool:
    return d in fixtures.BUILTIN or is_prime(d)


def observable_sets(d: int) -> list[ObservableSet]:
    if d in fixtures.BUILTIN:
        return builtin_sets(d)
    if is_prime(d):
        return prime_sets(d)
    raise UnsupportedDimension(d, set(fixtures.BUILTIN) | {2, 3, 5, 7})


def family_from_sets(sets: Sequence[ObservableSet], tol: float = DEFAULT_TOL) -> MubFamily:
    bases = tuple(
        joint_eigenbasis(obs, tol, m=m, strict_phase=m >= 1) for m, obs in enumerate(sets)
    )
    fam = MubFamily(bases[0].d, bases)
    report = unbiasedness_report(fam, tol)
    if not report.passed:
        raise ValidationError(
            f"bases are not mutually unbiased: max deviation {report.max_deviation:.3e}"
        )
    return fam


@lru_cache(maxsize=None)
def family(d: int, tol: float = DEFAULT_TOL) -> MubFamily:
    """The d+1 mutually unbiased bases for a supported dimension, certified."""
    return family_from_sets(observable_sets(d), tol)


@dataclass
class UnbiasednessReport:
    d: int
    max_deviation: float
    passed: bool
    tol: float
    # (m1, m2, worst deviation, state index in m1, state index in m2), 1-based states
    pairs: list[tuple[int, int, float, int, int]]

    def to_dict(self) -> dict:
        return {
            "d": self.d,
            "max_deviation": self.max_deviation,
            "passed": self.passed,
            "tol": self.tol,
            "pairs": [
                {"m1": a, "m2": b, "deviation": dev, "k1": i, "k2": j}
                for a, b, dev, i, j in self.pairs
            ],
        }


def unbiasedness_report(fam: MubFamily, tol: float = DEFAULT_TOL) -> UnbiasednessReport:
    d = fam.d
    pairs = []
    for a, b in itertools.combinations(range(len(fam)), 2):
        overlaps = np.abs(fam[a].states.conj() @ fam[b].states.T) ** 2
        dev = np.abs(overlaps - 1 / d)
        i, j = np.unravel_index(np.argmax(dev), dev.shape)
        pairs.append((a, b, float(dev[i, j]), int(i) + 1, int(j) + 1))
    worst = max((p[2] for p in pairs), default=0.0)
    return UnbiasednessReport(d, worst, worst < tol, tol, pairs)


def signature_decode(basis: Basis, k: int, tol: float = DEFAULT_TOL) -> list[tuple[WeylWord, complex]]:
    """Certified eigenvalue of every word in the basis' set on its k-th state."""
    s = basis.state(k)
    p = basis.observables.p
    return [(w, snap_eigenvalue(eigenvalue_of(w, s, tol), p)) for w in basis.observables.words]


# --- export -----------------------------------------------------------------

def family_to_json(fam: MubFamily) -> dict:
    p = fam.p
    return {
        "version": 1,
        "d": fam.d,
        "bases": [
            {
                "m": b.m,
                "words": [str(w) for w in b.observables.words],
                "generators": [str(w) for w in b.observables.generators],
                "states": [state_to_json(s) for s in b.states],
                "signatures": ["".join(eigenvalue_symbol(x, p) for x in sig) for sig in b.signatures],
            }
            for b in fam
        ],
    }


_NEG = "̅"  # combining overline marks a negated amplitude


def amplitude_symbol(v: complex, tol: float = 1e-6) -> str:
    w = np.exp(2j * np.pi / 3)
    named = [
        (0, "0"), (1, "1"), (-1, "1" + _NEG), (1j, "i"), (-1j, "i" + _NEG),
        (w, "ω"), (w.conjugate(), "ω̄"), (-w, "ω" + _NEG), (-w.conjugate(), "(-ω̄)"),
    ]
    for value, sym in named:
        if abs(v - value) < tol:
            return sym
    return f"({v.real:.3f}{v.imag:+.3f}i)"


def state_shorthand(s: np.ndarray) -> str:
    """Amplitudes scaled so the largest has modulus one, one symbol each."""
    scale = np.max(np.abs(s))
    return "".join(amplitude_symbol(a / scale) for a in s)


def family_text(fam: MubFamily) -> str:
    p = fam.p
    lines = []
    for b in fam:
        lines.append(f"basis {b.m}: {','.join(w.pretty() for w in b.observables.words)}")
        for k, (s, sig) in enumerate(zip(b.states, b.signatures), start=1):
            sig_text = "".join(eigenvalue_symbol(x, p) for x in sig)
            lines.append(f"  |{b.m}_{k}> = {state_shorthand(s)}   [{sig_text}]")
    return "\n".join(lines) + "\n"
