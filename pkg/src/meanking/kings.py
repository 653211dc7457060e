"""The retrodiction protocol: entangled preparation, tracking basis, verification.

Object and ancilla each carry a d-level system, d = p^n.  Joint states are
Kronecker products with the object factor first.  Labels k run over 1..d; in
field arithmetic the label d stands for the zero element and every other label
L for ``from_integer(L)``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

import numpy as np

from .errors import (
    BadPairing,
    ConditionViolated,
    GramDeviation,
    InputError,
    MIndependenceViolated,
    PredictionFailed,
    SpecMismatch,
    ValidationError,
)
from .galois import FieldSpec, default_spec, tables
from .mub import Basis, MubFamily, eigenvalue_symbol, family, signature_decode
from .weylalg import DEFAULT_TOL

__all__ = [
    "AncillaFamily",
    "InitialState",
    "PsiBasis",
    "LabelTable",
    "TrackingBasis",
    "Protocol",
    "RoundTranscript",
    "VerificationReport",
    "ancilla_family",
    "initial_state",
    "bell_factorization_check",
    "psi_basis",
    "label_table",
    "coincidence_check",
    "compare_printed",
    "tracking_basis",
    "overlap_table",
    "build_protocol",
    "run_round",
    "exhaustive_verify",
    "sampled_verify",
]


def prime_power(d: int) -> tuple[int, int]:
    """(p, n) with d = p^n, or InputError."""
    if d < 2:
        raise InputError(f"{d} is not a prime power")
    p = next(f for f in range(2, d + 1) if d % f == 0)
    n, rest = 0, d
    while rest % p == 0:
        rest //= p
        n += 1
    if rest != 1:
        raise InputError(f"{d} is not a prime power")
    return p, n


def _gram_deviation(states: np.ndarray) -> float:
    gram = states.conj() @ states.T
    return float(np.max(np.abs(gram - np.eye(len(states)))))


# --- ancilla bases and the initial state -----------------------------------

@dataclass(frozen=True)
class AncillaFamily:
    """``bases[m][k - 1]`` is the ancilla state paired with object state m_k."""

    bases: tuple[np.ndarray, ...] = field(repr=False)

    def state(self, m: int, k: int) -> np.ndarray:
        return self.bases[m][k - 1]

    def permutation(
        self, obj: MubFamily, m: int, target: int | None = None, tol: float = DEFAULT_TOL
    ) -> list[int] | None:
        """pi with ancilla state m̄_k == object state t_{pi(k)} (1-based) for
        object basis t = ``target`` (default m), if such a pi exists."""
        t = m if target is None else target
        perm = []
        for s in self.bases[m]:
            dist = np.max(np.abs(obj[t].states - s), axis=1)
            j = int(np.argmin(dist))
            if dist[j] >= tol:
                return None
            perm.append(j + 1)
        return perm

    def match(self, obj: MubFamily, m: int, tol: float = DEFAULT_TOL) -> tuple[int, list[int]] | None:
        """Object basis whose states the m-th ancilla basis merely reorders.

        For qubits this is basis m itself; for qutrits conjugation can also
        swap bases (it maps Y = XZ to XZ^2 = W).
        """
        for t in [m] + [i for i in range(len(obj)) if i != m]:
            perm = self.permutation(obj, m, t, tol)
            if perm is not None:
                return t, perm
        return None


def ancilla_family(obj: MubFamily, tol: float = DEFAULT_TOL) -> AncillaFamily:
    """Conjugate every object basis in the standard basis and certify
    <0_j|m_k> = <m̄_k|0̄_j>."""
    bases = tuple(np.conj(b.states) for b in obj)
    if np.max(np.abs(bases[0] - obj[0].states)) >= tol:
        raise ValidationError("standard basis is not real: ancilla basis 0 differs")
    for m in range(len(obj)):
        lhs = obj[0].states.conj() @ obj[m].states.T  # [j, k]
        rhs = (bases[m].conj() @ bases[0].T).T  # [j, k]
        dev = np.abs(lhs - rhs)
        if np.max(dev) >= tol:
            j, k = np.unravel_index(np.argmax(dev), dev.shape)
            raise ConditionViolated(m, j + 1, k + 1, float(dev[j, k]))
    return AncillaFamily(bases)


def doubled_states(obj: MubFamily, anc: AncillaFamily) -> np.ndarray:
    """Array [m, k-1] of |m_k> ⊗ |m̄_k>."""
    return np.array(
        [[np.kron(o, a) for o, a in zip(b.states, anc.bases[b.m])] for b in obj]
    )


@dataclass(frozen=True)
class InitialState:
    psi0: np.ndarray = field(repr=False)
    d: int
    p: int
    n: int


def initial_state(obj: MubFamily, anc: AncillaFamily, tol: float = DEFAULT_TOL) -> InitialState:
    d = obj.d
    doubled = doubled_states(obj, anc)
    per_basis = doubled.sum(axis=1) / math.sqrt(d)
    psi0 = per_basis[0]
    for m in range(1, len(per_basis)):
        dev = float(np.max(np.abs(per_basis[m] - psi0)))
        if dev >= tol:
            raise MIndependenceViolated(m, dev)
    if abs(np.linalg.norm(psi0) - 1) >= tol:
        raise ValidationError(f"initial state has norm {np.linalg.norm(psi0)}")
    p = obj.p
    n = round(math.log(d, p))
    return InitialState(psi0, d, p, n)


def bell_factorization_check(
    state: InitialState, pairing: Sequence[Sequence[int]], tol: float = DEFAULT_TOL
) -> bool:
    """Does the state equal a product of p^(-1/2) sum_j |jj> over the given
    pairs of qudit positions?  Positions are 1-based: object qudits 1..n, then
    ancilla qudits n+1..2n, as in the ket ordering."""
    n2 = 2 * state.n
    flat = [int(i) for pair in pairing for i in pair]
    if any(len(pair) != 2 for pair in pairing) or sorted(flat) != list(range(1, n2 + 1)):
        raise BadPairing(f"{list(map(tuple, pairing))} is not a pairing of positions 1..{n2}")
    p = state.p
    tensor = state.psi0.reshape([p] * n2).transpose([i - 1 for i in flat])
    bell = np.eye(p).reshape(-1) / math.sqrt(p)
    target = np.ones(1)
    for _ in range(state.n):
        target = np.kron(target, bell)
    return float(np.max(np.abs(tensor.reshape(-1) - target))) < tol


# --- Psi basis, labels, tracking states ------------------------------------

@dataclass(frozen=True)
class PsiBasis:
    """Psi_0 and Psi_{(d-1)m+j} for m = 0..d, j = 1..d-1, as rows of ``states``."""

    d: int
    states: np.ndarray = field(repr=False)
    doubled: np.ndarray = field(repr=False)

    @property
    def q(self) -> complex:
        return np.exp(2j * np.pi / self.d)

    @staticmethod
    def index(d: int, m: int, j: int) -> int:
        return (d - 1) * m + j


def psi_basis(obj: MubFamily, anc: AncillaFamily, tol: float = DEFAULT_TOL) -> PsiBasis:
    d = obj.d
    q = np.exp(2j * np.pi / d)
    doubled = doubled_states(obj, anc)
    states = np.zeros((d * d, d * d), dtype=complex)
    states[0] = doubled[0].sum(axis=0) / math.sqrt(d)
    ks = np.arange(1, d + 1)
    for m in range(d + 1):
        for j in range(1, d):
            states[PsiBasis.index(d, m, j)] = (q ** (-j * ks)) @ doubled[m] / math.sqrt(d)
    dev = _gram_deviation(states)
    if dev >= tol:
        raise GramDeviation("Psi basis", dev)
    return PsiBasis(d, states, doubled)


@dataclass(frozen=True)
class LabelTable:
    """d^2 rows of d+1 labels in 1..d, sorted by the two seed labels."""

    d: int
    rows: tuple[tuple[int, ...], ...]
    spec: FieldSpec

    def __len__(self):
        return len(self.rows)

    def __iter__(self):
        return iter(self.rows)

    def row_string(self, i: int) -> str:
        sep = " " if self.d >= 10 else ""
        return sep.join(str(x) for x in self.rows[i])

    def strings(self) -> list[str]:
        return [self.row_string(i) for i in range(len(self.rows))]

    def text(self) -> str:
        """One line per value of the first seed label, like the printed tables."""
        s = self.strings()
        sep = " | " if self.d >= 10 else " "
        return "\n".join(sep.join(s[i : i + self.d]) for i in range(0, len(s), self.d)) + "\n"

    def csv(self) -> str:
        header = ",".join(f"k{m}" for m in range(self.d + 1))
        return header + "\n" + "".join(",".join(map(str, r)) + "\n" for r in self.rows)

    def to_json(self) -> dict:
        return {
            "version": 1,
            "d": self.d,
            "field": self.spec.to_dict(),
            "rows": [list(r) for r in self.rows],
        }


def label_table(d: int, spec: FieldSpec | None = None) -> LabelTable:
    """k_m = (m-1) k_0 + k_1 over GF(d) for m >= 2, seeds ranging over 1..d."""
    if spec is None:
        spec = default_spec(*prime_power(d))
    if spec.order != d:
        raise SpecMismatch(f"{spec} has {spec.order} elements, not {d}")
    add_t, mul_t = tables(spec)
    code = lambda label: label % d  # label d is the zero element
    rows = []
    for k0 in range(1, d + 1):
        for k1 in range(1, d + 1):
            row = [k0, k1]
            for m in range(2, d + 1):
                km = add_t[mul_t[m - 1, code(k0)], code(k1)]
                row.append(int(km) or d)
            rows.append(tuple(row))
    return LabelTable(d, tuple(rows), spec)


@dataclass
class CoincidenceReport:
    pairs_checked: int
    passed: bool
    # (row index, row index, number of agreeing positions), 0-based rows
    violations: list[tuple[int, int, int]]

    def to_dict(self) -> dict:
        return {
            "pairs_checked": self.pairs_checked,
            "passed": self.passed,
            "violations": [list(v) for v in self.violations],
        }


def coincidence_check(table: LabelTable | Sequence[Sequence[int]]) -> CoincidenceReport:
    """Every two rows must agree in exactly one position."""
    rows = np.array(list(table.rows if isinstance(table, LabelTable) else table))
    counts = (rows[:, None, :] == rows[None, :, :]).sum(axis=-1)
    iu = np.triu_indices(len(rows), k=1)
    bad = np.nonzero(counts[iu] != 1)[0]
    violations = [(int(iu[0][b]), int(iu[1][b]), int(counts[iu][b])) for b in bad]
    return CoincidenceReport(len(iu[0]), not violations, violations)


@dataclass
class PrintedComparison:
    matches_as_set: bool
    matches_in_order: bool
    # (row index, printed string, generated string, 0-based differing positions)
    mismatches: list[tuple[int, str, str, list[int]]]

    def to_dict(self) -> dict:
        return {
            "matches_as_set": self.matches_as_set,
            "matches_in_order": self.matches_in_order,
            "mismatches": [
                {"row": i, "printed": a, "generated": b, "positions": pos}
                for i, a, b, pos in self.mismatches
            ],
        }


def compare_printed(table: LabelTable, printed: Sequence[str]) -> PrintedComparison:
    """Compare a transcribed table against the generated one.

    The generated table is authoritative; each printed row that differs is
    reported next to the generated row in the same position.
    """
    generated = table.strings()
    mismatches = []
    for i, (a, b) in enumerate(itertools.zip_longest(printed, generated, fillvalue="")):
        if a != b:
            pos = [k for k, (x, y) in enumerate(itertools.zip_longest(a, b)) if x != y]
            mismatches.append((i, a, b, pos))
    return PrintedComparison(
        sorted(printed) == sorted(generated), list(printed) == generated, mismatches
    )


@dataclass(frozen=True)
class TrackingBasis:
    """``states[i]`` is |[k_0 ... k_d]> for ``table.rows[i]``."""

    states: np.ndarray = field(repr=False)
    table: LabelTable


def tracking_basis(psi: PsiBasis, table: LabelTable, tol: float = DEFAULT_TOL) -> TrackingBasis:
    d = psi.d
    if table.d != d:
        raise InputError(f"label table for d={table.d} does not fit Psi basis for d={d}")
    q = psi.q
    coeffs = np.zeros((d * d, d * d), dtype=complex)
    coeffs[:, 0] = 1
    js = np.arange(1, d)
    for r, row in enumerate(table.rows):
        for m, km in enumerate(row):
            coeffs[r, PsiBasis.index(d, m, 1) : PsiBasis.index(d, m, d - 1) + 1] = q ** (js * km)
    states = coeffs @ psi.states / d
    dev = _gram_deviation(states)
    if dev >= tol:
        raise GramDeviation("tracking basis", dev)
    return TrackingBasis(states, table)


def overlap_table(psi: PsiBasis, tracking: TrackingBasis) -> np.ndarray:
    """Array [row, m, k-1] of <m_k m̄_k | [row]>."""
    return np.einsum("mkx,rx->rmk", psi.doubled.conj(), tracking.states)


# --- protocol ---------------------------------------------------------------

@dataclass(frozen=True)
class Protocol:
    d: int
    family: MubFamily
    ancilla: AncillaFamily
    initial: InitialState
    psi: PsiBasis
    table: LabelTable
    tracking: TrackingBasis
    tol: float


@lru_cache(maxsize=None)
def build_protocol(d: int, spec: FieldSpec | None = None, tol: float = DEFAULT_TOL) -> Protocol:
    fam = family(d, tol)
    anc = ancilla_family(fam, tol)
    init = initial_state(fam, anc, tol)
    psi = psi_basis(fam, anc, tol)
    table = label_table(d, spec)
    coincidence = coincidence_check(table)
    if not coincidence.passed:
        raise ValidationError(f"label table coincidence failures: {coincidence.violations[:5]}")
    return Protocol(d, fam, anc, init, psi, table, tracking_basis(psi, table, tol), tol)


def _fmt_eigs(pairs, p):
    return [(str(w), eigenvalue_symbol(v, p)) for w, v in pairs]


@dataclass(frozen=True)
class RoundTranscript:
    d: int
    m: int
    king_outcome: int
    king_eigenvalues: tuple[tuple[str, str], ...]
    physicist_row: int
    physicist_labels: tuple[int, ...]
    predicted_outcome: int
    predicted_eigenvalues: tuple[tuple[str, str], ...]
    correct: bool
    # largest deviation from the ideal outcome distributions seen in this round
    slack: float

    def to_dict(self) -> dict:
        return {
            "d": self.d,
            "m": self.m,
            "king_outcome": self.king_outcome,
            "king_eigenvalues": [list(x) for x in self.king_eigenvalues],
            "physicist_row": self.physicist_row,
            "physicist_labels": list(self.physicist_labels),
            "predicted_outcome": self.predicted_outcome,
            "predicted_eigenvalues": [list(x) for x in self.predicted_eigenvalues],
            "correct": self.correct,
            "slack": self.slack,
        }


def king_distribution(proto: Protocol, m: int) -> tuple[np.ndarray, np.ndarray]:
    """Outcome probabilities of measuring basis m on the object, and the
    unnormalized ancilla states left behind."""
    d = proto.d
    joint = proto.initial.psi0.reshape(d, d)
    residual = proto.family[m].states.conj() @ joint  # [k, ancilla index]
    return np.sum(np.abs(residual) ** 2, axis=1), residual


def run_round(
    proto: Protocol,
    m: int,
    rng: np.random.Generator | None = None,
    king_outcome: int | None = None,
    physicist_row: int | None = None,
) -> RoundTranscript:
    """Play one round with basis m.

    Outcomes are drawn from their Born distributions with ``rng``, unless
    forced: ``king_outcome`` is a label 1..d, ``physicist_row`` a 0-based row
    of the label table that must have nonzero probability.
    """
    d, tol = proto.d, proto.tol
    if not 0 <= m <= d:
        raise InputError(f"basis index {m} outside 0..{d}")
    if rng is None and (king_outcome is None or physicist_row is None):
        rng = np.random.default_rng()
    basis: Basis = proto.family[m]

    probs, residual = king_distribution(proto, m)
    slack = float(np.max(np.abs(probs - 1 / d)))
    if slack >= tol:
        raise ValidationError(f"king's outcomes in basis {m} are not uniform: {probs}")
    if king_outcome is None:
        king_outcome = int(rng.choice(d, p=probs / probs.sum())) + 1
    elif not 1 <= king_outcome <= d:
        raise InputError(f"king outcome {king_outcome} outside 1..{d}")
    k = king_outcome
    ancilla = residual[k - 1] / math.sqrt(probs[k - 1])
    collapsed = np.kron(basis.state(k), ancilla)
    slack = max(slack, float(np.max(np.abs(collapsed - proto.psi.doubled[m, k - 1]))))

    row_probs = np.abs(proto.tracking.states.conj() @ collapsed) ** 2
    support = np.nonzero(row_probs > tol)[0]
    expected = [i for i, row in enumerate(proto.table.rows) if row[m] == k]
    if list(support) != expected:
        raise ValidationError(
            f"basis {m}, outcome {k}: tracking support {list(support)} != rows {expected}"
        )
    off = np.delete(row_probs, support)
    slack = max(
        slack,
        float(np.max(np.abs(row_probs[support] - 1 / d))),
        float(np.max(off, initial=0.0)),
    )
    if physicist_row is None:
        physicist_row = int(rng.choice(support, p=row_probs[support] / row_probs[support].sum()))
    elif physicist_row not in support:
        raise InputError(f"tracking row {physicist_row} cannot occur after outcome {k} in basis {m}")

    labels = proto.table.rows[physicist_row]
    predicted = labels[m]
    king_eigs = signature_decode(basis, k, tol)
    predicted_eigs = signature_decode(basis, predicted, tol)
    correct = predicted == k and all(
        abs(a - b) < tol for (_, a), (_, b) in zip(king_eigs, predicted_eigs)
    )
    p = proto.family.p
    transcript = RoundTranscript(
        d, m, k, tuple(_fmt_eigs(king_eigs, p)), physicist_row, labels, predicted,
        tuple(_fmt_eigs(predicted_eigs, p)), correct, slack,
    )
    if not correct:
        raise PredictionFailed(transcript)
    return transcript


@dataclass
class VerificationReport:
    d: int
    mode: str
    branches: int
    correct: int
    max_slack: float
    per_basis: dict[int, int] = field(default_factory=dict)

    @property
    def success_rate(self) -> float:
        return self.correct / self.branches if self.branches else 0.0

    @property
    def passed(self) -> bool:
        return self.branches > 0 and self.correct == self.branches

    def to_dict(self) -> dict:
        return {
            "version": 1,
            "d": self.d,
            "mode": self.mode,
            "branches": self.branches,
            "correct": self.correct,
            "success_rate": self.success_rate,
            "max_slack": self.max_slack,
            "passed": self.passed,
            "per_basis": {str(m): c for m, c in self.per_basis.items()},
        }


def exhaustive_verify(d: int, spec: FieldSpec | None = None, tol: float = DEFAULT_TOL) -> VerificationReport:
    """Every basis, every king outcome, every tracking row the physicist can see."""
    proto = build_protocol(d, spec, tol)
    report = VerificationReport(d, "exhaustive", 0, 0, 0.0)
    for m in range(d + 1):
        for k in range(1, d + 1):
            for r, row in enumerate(proto.table.rows):
                if row[m] != k:
                    continue
                t = run_round(proto, m, king_outcome=k, physicist_row=r)
                report.branches += 1
                report.correct += t.correct
                report.max_slack = max(report.max_slack, t.slack)
                report.per_basis[m] = report.per_basis.get(m, 0) + 1
    return report


def sampled_verify(
    d: int, rounds: int, seed: int | None = None, spec: FieldSpec | None = None, tol: float = DEFAULT_TOL
) -> VerificationReport:
    """``rounds`` random rounds; the king's basis is uniform over 0..d."""
    proto = build_protocol(d, spec, tol)
    rng = np.random.default_rng(seed)
    report = VerificationReport(d, "sampled", 0, 0, 0.0)
    for _ in range(rounds):
        m = int(rng.integers(d + 1))
        t = run_round(proto, m, rng)
        report.branches += 1
        report.correct += t.correct
        report.max_slack = max(report.max_slack, t.slack)
        report.per_basis[m] = report.per_basis.get(m, 0) + 1
    return report
