import itertools
import math

import numpy as np
import pytest

from meanking import kings, mub
from meanking.errors import (
    BadPairing,
    InputError,
    MIndependenceViolated,
    PredictionFailed,
    SpecMismatch,
    ValidationError,
)
from meanking.fixtures import PRINTED_LABELS_4
from meanking.galois import FieldSpec, default_spec
from meanking.kings import LabelTable, TrackingBasis

DIMS = [2, 3, 4, 5, 7, 8, 9]
BRANCHES = {2: 12, 3: 36, 4: 80, 5: 150, 7: 392, 8: 576, 9: 810}


def ket(bits, p=2):
    """Standard basis vector from a digit string, first digit most significant."""
    v = np.zeros(p ** len(bits))
    v[int(bits, p)] = 1
    return v


@pytest.fixture(scope="module")
def protocols():
    return {d: kings.build_protocol(d) for d in DIMS}


def test_prime_power():
    assert kings.prime_power(8) == (2, 3)
    assert kings.prime_power(9) == (3, 2)
    assert kings.prime_power(7) == (7, 1)
    with pytest.raises(InputError):
        kings.prime_power(6)


# --- ancilla ---------------------------------------------------------------

def test_two_qubit_ancilla_pattern():
    fam = mub.family(4)
    anc = kings.ancilla_family(fam)
    for m in (0, 1):
        assert np.allclose(anc.bases[m], fam[m].states)
        assert anc.permutation(fam, m) == [1, 2, 3, 4]
    for m in (2, 3, 4):
        assert np.allclose(anc.state(m, 1), fam[m].state(4))
        assert anc.permutation(fam, m) == [4, 3, 2, 1]


@pytest.mark.parametrize("d", DIMS)
def test_ancilla_conditions(d):
    fam = mub.family(d)
    anc = kings.ancilla_family(fam)
    for m in range(d + 1):
        for j, k in itertools.product(range(1, d + 1), repeat=2):
            lhs = np.vdot(fam[0].state(j), fam[m].state(k))
            rhs = np.vdot(anc.state(m, k), anc.state(0, j))
            assert abs(lhs - rhs) < 1e-12


def test_qutrit_ancilla_bases_are_renamed_object_bases():
    fam = mub.family(9)
    anc = kings.ancilla_family(fam)
    targets = []
    for m in range(10):
        t, perm = anc.match(fam, m)
        assert sorted(perm) == list(range(1, 10))
        targets.append(t)
    assert sorted(targets) == list(range(10))
    # conjugation swaps Y-type and W-type sets, so not every basis maps to itself
    assert targets != list(range(10))


# --- initial state -----------------------------------------------------------

def test_initial_state_qubit():
    proto = kings.build_protocol(2)
    assert np.allclose(proto.initial.psi0, (ket("00") + ket("11")) / math.sqrt(2))


def test_initial_state_two_qubits():
    proto = kings.build_protocol(4)
    expected = (ket("0000") + ket("0101") + ket("1010") + ket("1111")) / 2
    assert np.allclose(proto.initial.psi0, expected)


@pytest.mark.parametrize("d", DIMS)
def test_initial_state_independent_of_basis(d):
    fam = mub.family(d)
    doubled = kings.doubled_states(fam, kings.ancilla_family(fam))
    per_basis = doubled.sum(axis=1) / math.sqrt(d)
    assert np.max(np.abs(per_basis - per_basis[0])) < 1e-9


def test_m_independence_violation_is_reported():
    fam = mub.family(4)
    anc = kings.ancilla_family(fam)
    # pair basis 2 with a reordered ancilla basis
    tampered = list(anc.bases)
    tampered[2] = tampered[2][[1, 0, 2, 3]]
    with pytest.raises(MIndependenceViolated) as exc:
        kings.initial_state(fam, type(anc)(tuple(tampered)))
    assert exc.value.m == 2


@pytest.mark.parametrize(
    "d,pairing,expected",
    [
        (4, [(1, 3), (2, 4)], True),
        (4, [(1, 4), (2, 3)], False),
        (8, [(1, 4), (2, 5), (3, 6)], True),
        (8, [(1, 2), (3, 4), (5, 6)], False),
        (9, [(1, 3), (2, 4)], True),
        (2, [(1, 2)], True),
    ],
)
def test_bell_factorization(protocols, d, pairing, expected):
    assert kings.bell_factorization_check(protocols[d].initial, pairing) is expected


@pytest.mark.parametrize("pairing", [[(1, 3)], [(1, 2, 3, 4)], [(1, 1), (2, 4)], [(1, 3), (2, 5)]])
def test_bad_pairing(protocols, pairing):
    with pytest.raises(BadPairing):
        kings.bell_factorization_check(protocols[4].initial, pairing)


def test_reduced_object_state_is_maximally_mixed(protocols):
    for d, proto in protocols.items():
        for m in range(d + 1):
            probs, _ = kings.king_distribution(proto, m)
            assert np.max(np.abs(probs - 1 / d)) < 1e-12


# --- Psi basis -----------------------------------------------------------------

@pytest.mark.parametrize("d", [4, 9])
def test_psi_basis_orthonormal(protocols, d):
    states = protocols[d].psi.states
    assert states.shape == (d * d, d * d)
    assert np.max(np.abs(states.conj() @ states.T - np.eye(d * d))) < 1e-12


def test_psi_zero_is_initial_state(protocols):
    for proto in protocols.values():
        assert np.allclose(proto.psi.states[0], proto.initial.psi0)


# --- label tables --------------------------------------------------------------

def test_label_rows_from_seeds():
    t4 = kings.label_table(4)
    assert t4.rows[0] == (1, 1, 4, 3, 2)
    assert t4.row_string(12) == "41111"
    assert kings.label_table(8).row_string(0) == "118325476"
    assert kings.label_table(9).row_string(0) == "1129453786"


def test_last_rows_are_all_d():
    for d in (4, 8, 9):
        assert kings.label_table(d).rows[-1] == (d,) * (d + 1)


def test_label_table_d4_matches_printed():
    t = kings.label_table(4)
    assert t.strings() == PRINTED_LABELS_4
    cmp = kings.compare_printed(t, PRINTED_LABELS_4)
    assert cmp.matches_in_order and not cmp.mismatches


def test_label_table_spec_mismatch():
    with pytest.raises(SpecMismatch):
        kings.label_table(4, default_spec(2, 3))


def test_label_table_rows_sorted_by_seeds():
    for d in (4, 8, 9):
        rows = kings.label_table(d).rows
        assert [r[:2] for r in rows] == list(itertools.product(range(1, d + 1), repeat=2))


def test_label_table_under_other_polynomial():
    # GF(9) via a^2 + 1 still yields a valid table
    t = kings.label_table(9, FieldSpec(3, 2, (1, 0)))
    assert kings.coincidence_check(t).passed


@pytest.mark.parametrize("d,pairs", [(4, 120), (8, 2016), (9, 3240)])
def test_coincidence(d, pairs):
    rep = kings.coincidence_check(kings.label_table(d))
    assert rep.passed and rep.pairs_checked == pairs


def test_coincidence_duplicate_row():
    rows = list(kings.label_table(4).rows)
    rep = kings.coincidence_check(rows + [rows[5]])
    assert not rep.passed
    assert rep.violations == [(5, 16, 5)]


def test_coincidence_brute_force_oracle():
    rows = kings.label_table(8).rows
    for a, b in itertools.combinations(rows, 2):
        assert sum(x == y for x, y in zip(a, b)) == 1


def test_each_label_appears_d_times_per_column():
    for d in DIMS:
        rows = np.array(kings.label_table(d).rows)
        for m in range(d + 1):
            assert np.array_equal(np.bincount(rows[:, m], minlength=d + 1)[1:], [d] * d)


def test_label_table_exports():
    t = kings.label_table(4)
    assert t.text().splitlines()[0] == "11432 12341 13214 14123"
    assert t.csv().splitlines()[:2] == ["k0,k1,k2,k3,k4", "1,1,4,3,2"]
    data = t.to_json()
    assert data["version"] == 1 and data["field"]["poly"] == [1, 1]
    assert data["rows"][12] == [4, 1, 1, 1, 1]


# --- tracking basis --------------------------------------------------------

@pytest.mark.parametrize("d", [2, 3, 4, 5, 7, 8, 9])
def test_tracking_overlap_law(protocols, d):
    proto = protocols[d]
    ov = np.abs(kings.overlap_table(proto.psi, proto.tracking))
    rows = np.array(proto.table.rows)
    hit = rows[:, :, None] == np.arange(1, d + 1)[None, None, :]
    assert np.max(np.abs(ov[hit] - 1 / math.sqrt(d))) < 1e-9
    assert np.max(ov[~hit]) < 1e-9


@pytest.mark.parametrize("d", [4, 8, 9])
def test_tracking_orthonormal(protocols, d):
    s = protocols[d].tracking.states
    assert np.max(np.abs(s.conj() @ s.T - np.eye(d * d))) < 1e-9


@pytest.mark.parametrize("d", [4, 9])
def test_orthogonality_iff_single_coincidence(protocols, d):
    proto = protocols[d]
    rows = list(proto.table.rows)
    # a hybrid third row agrees with row 1 in several places and with row 0 in one
    mixed = [rows[0], rows[1], tuple(rows[2][:2]) + tuple(rows[1][2:])]
    table = LabelTable(d, tuple(mixed), proto.table.spec)
    states = _raw_tracking_states(proto.psi, table)
    for (i, a), (j, b) in itertools.combinations(enumerate(mixed), 2):
        agree = sum(x == y for x, y in zip(a, b))
        orthogonal = abs(np.vdot(states[i], states[j])) < 1e-9
        assert orthogonal == (agree == 1)
    # and on the real table, every pair is orthogonal and coincides once
    gram = np.abs(proto.tracking.states.conj() @ proto.tracking.states.T)
    rep = kings.coincidence_check(proto.table)
    assert rep.passed and np.max(np.abs(gram - np.eye(d * d))) < 1e-9


def _raw_tracking_states(psi, table):
    d, q = psi.d, psi.q
    out = []
    for row in table.rows:
        v = psi.states[0].copy()
        for m, km in enumerate(row):
            for j in range(1, d):
                v = v + q ** (j * km) * psi.states[(d - 1) * m + j]
        out.append(v / d)
    return np.array(out)


def test_raw_tracking_matches_library(protocols):
    proto = protocols[4]
    assert np.allclose(_raw_tracking_states(proto.psi, proto.table), proto.tracking.states)


def test_tracking_rejects_mismatched_table(protocols):
    with pytest.raises(InputError):
        kings.tracking_basis(protocols[4].psi, kings.label_table(8))


# --- rounds --------------------------------------------------------------------

def test_round_standard_basis(protocols):
    t = kings.run_round(protocols[4], 0, np.random.default_rng(0), king_outcome=1)
    assert t.physicist_labels[0] == 1
    assert t.predicted_outcome == 1 and t.correct
    assert [v for _, v in t.predicted_eigenvalues] == ["+", "+", "+"]


def test_round_qutrit_last_state(protocols):
    t = kings.run_round(protocols[9], 9, np.random.default_rng(0), king_outcome=9)
    assert t.predicted_outcome == 9
    assert [v for _, v in t.predicted_eigenvalues] == ["1", "1"]


def test_round_support_has_d_rows(protocols):
    proto = protocols[4]
    for m in range(5):
        for k in range(1, 5):
            rows = [r for r in range(16) if proto.table.rows[r][m] == k]
            assert len(rows) == 4
            for r in rows:
                assert kings.run_round(proto, m, king_outcome=k, physicist_row=r).correct
            other = next(r for r in range(16) if r not in rows)
            with pytest.raises(InputError):
                kings.run_round(proto, m, king_outcome=k, physicist_row=other)


def test_round_seeded_is_reproducible(protocols):
    a = kings.run_round(protocols[8], 3, np.random.default_rng(42))
    b = kings.run_round(protocols[8], 3, np.random.default_rng(42))
    assert a == b and a.correct


def test_round_bad_basis(protocols):
    with pytest.raises(InputError):
        kings.run_round(protocols[4], 5, np.random.default_rng(0))


def test_transcript_json(protocols):
    data = kings.run_round(protocols[4], 2, np.random.default_rng(1)).to_dict()
    assert set(data) >= {"m", "king_outcome", "physicist_labels", "predicted_outcome", "correct"}
    assert data["correct"] is True


def test_tampered_table_is_caught(protocols):
    proto = protocols[4]
    # keep the tracking states, lie about the label of row 0 in column 2
    rows = list(proto.table.rows)
    r0 = list(rows[0])
    r0[2] = r0[2] % 4 + 1
    rows[0] = tuple(r0)
    fake = LabelTable(4, tuple(rows), proto.table.spec)
    tampered = kings.Protocol(
        4, proto.family, proto.ancilla, proto.initial, proto.psi, fake,
        TrackingBasis(proto.tracking.states, fake), proto.tol,
    )
    with pytest.raises(ValidationError, match="tracking support"):
        kings.run_round(tampered, 2, king_outcome=proto.table.rows[0][2], physicist_row=0)


def test_wrong_prediction_raises_with_transcript(protocols, monkeypatch):
    real = kings.signature_decode
    calls = []

    def flaky(basis, k, tol=1e-9):
        calls.append(k)
        pairs = real(basis, k, tol)
        # corrupt the second decode (the prediction)
        return pairs if len(calls) % 2 else [(w, -v) for w, v in pairs]

    monkeypatch.setattr(kings, "signature_decode", flaky)
    with pytest.raises(PredictionFailed) as exc:
        kings.run_round(protocols[4], 1, king_outcome=2, physicist_row=1)
    t = exc.value.transcript
    assert not t.correct and t.m == 1 and t.king_outcome == 2


# --- verification ----------------------------------------------------------------

@pytest.mark.parametrize("d", DIMS)
def test_exhaustive(d):
    rep = kings.exhaustive_verify(d)
    assert rep.branches == BRANCHES[d] == (d + 1) * d * d
    assert rep.passed and rep.success_rate == 1.0
    assert rep.max_slack < 1e-9
    assert rep.per_basis == {m: d * d for m in range(d + 1)}


def test_sampled_reproducible():
    a = kings.sampled_verify(4, 200, seed=7)
    b = kings.sampled_verify(4, 200, seed=7)
    assert a.to_dict() == b.to_dict()
    assert a.passed and a.branches == 200
