import random

import numpy as np
import pytest

from conftest import apply_gate, paired_random_evolution, random_gate, random_tableau
from stabsim.errors import CorruptTableauError, DimensionError
from stabsim.oracle import DenseState
from stabsim.pauli import multiply, parse_pauli
from stabsim.tableau import Tableau, new_zero_state


def test_zero_state_two_qubits_is_block_identity():
    t = new_zero_state(2)
    xb, zb = t.bit_matrix()
    assert np.array_equal(xb, [[1, 0], [0, 1], [0, 0], [0, 0]])
    assert np.array_equal(zb, [[0, 0], [0, 0], [1, 0], [0, 1]])
    assert not t.r[: 2 * t.n].any()


def test_zero_state_one_qubit_generators():
    t = new_zero_state(1)
    assert [str(p) for p in t.destabilizer_generators()] == ["+X"]
    assert [str(p) for p in t.stabilizer_generators()] == ["+Z"]


def test_zero_state_three_qubit_stabilizers():
    t = new_zero_state(3)
    assert [str(p) for p in t.stabilizer_generators()] == ["+ZII", "+IZI", "+IIZ"]


def test_zero_qubits_rejected():
    with pytest.raises(DimensionError):
        new_zero_state(0)


def test_rowsum_z_plus_z_gives_identity():
    t = new_zero_state(1)
    t.set_row(0, parse_pauli("Z"))
    t.set_row(1, parse_pauli("Z"))
    t.rowsum(0, 1)
    assert str(t.get_row(0)) == "+I"


def test_rowsum_matches_pauli_multiply_on_commuting_rows(rng):
    # stabilizer rows commute pairwise, so rowsum must agree with the group product
    for _ in range(50):
        n = rng.randrange(2, 8)
        t = random_tableau(n, rng)
        h, i = rng.sample(range(n, 2 * n), 2)
        want = multiply(t.get_row(i), t.get_row(h))
        t.rowsum(h, i)
        assert t.get_row(h) == want


def test_rowsum_rejects_odd_phase_sum():
    t = new_zero_state(1)
    t.set_row(0, parse_pauli("X"))
    t.set_row(1, parse_pauli("Y"))
    with pytest.raises(CorruptTableauError):
        t.rowsum(0, 1)


def test_rowsum_same_row_rejected():
    t = new_zero_state(2)
    with pytest.raises(DimensionError):
        t.rowsum(1, 1)


def test_cnot_conjugation_identities():
    t = new_zero_state(2)
    t.apply_cnot(0, 1)
    assert [str(p) for p in t.stabilizer_generators()] == ["+ZI", "+ZZ"]
    assert [str(p) for p in t.destabilizer_generators()] == ["+XX", "+IX"]


def test_cnot_involution(rng):
    t = random_tableau(4, rng)
    u = t.copy()
    u.apply_cnot(1, 3)
    u.apply_cnot(1, 3)
    assert u == t


def test_cnot_rejects_bad_operands():
    t = new_zero_state(3)
    with pytest.raises(DimensionError):
        t.apply_cnot(1, 1)
    with pytest.raises(DimensionError):
        t.apply_cnot(0, 3)


def test_cnot_matches_dense_oracle(rng):
    t, d = paired_random_evolution(6, 60, rng)
    t.apply_cnot(1, 4)
    d.apply_cnot(1, 4)
    for g in t.stabilizer_generators():
        assert d.stabilized_by(g)


def test_hadamard_examples():
    t = new_zero_state(1)
    t.apply_hadamard(0)
    assert [str(p) for p in t.stabilizer_generators()] == ["+X"]
    t2 = new_zero_state(1)
    t2.set_row(1, parse_pauli("Y"))
    t2.apply_hadamard(0)
    assert str(t2.get_row(1)) == "-Y"
    t.apply_hadamard(0)
    assert t == new_zero_state(1)


def test_phase_examples():
    t = new_zero_state(1)
    t.apply_hadamard(0)
    t.apply_phase(0)
    assert [str(p) for p in t.stabilizer_generators()] == ["+Y"]

    t = new_zero_state(1)
    before = t.copy()
    for _ in range(4):
        t.apply_phase(0)
    assert t == before

    t = new_zero_state(1)
    t.set_row(1, parse_pauli("X"))
    t.apply_phase(0)
    t.apply_phase(0)
    assert str(t.get_row(1)) == "-X"


def test_measure_zero_state_deterministic(rng):
    t = new_zero_state(1)
    rec = t.measure(0, random.Random(7))
    assert rec.outcome == 0 and rec.deterministic


def test_measure_after_hadamard_consumes_one_bit():
    for seed in range(20):
        t = new_zero_state(1)
        t.apply_hadamard(0)
        r = random.Random(seed)
        expected_bit = random.Random(seed).getrandbits(1)
        rec = t.measure(0, r)
        assert not rec.deterministic
        assert rec.outcome == expected_bit
        want = "+Z" if rec.outcome == 0 else "-Z"
        assert [str(p) for p in t.stabilizer_generators()] == [want]


def test_ghz_outcome_statistics():
    zeros = 0
    for seed in range(1000):
        t = new_zero_state(3)
        t.apply_hadamard(0)
        t.apply_cnot(0, 1)
        t.apply_cnot(0, 2)
        r = random.Random(seed)
        bits = [t.measure(q, r).outcome for q in range(3)]
        assert bits[0] == bits[1] == bits[2]
        zeros += bits[0] == 0
    assert abs(zeros / 1000 - 0.5) < 0.05


def test_is_deterministic():
    t = new_zero_state(3)
    assert all(t.is_deterministic(q) for q in range(3))
    t.apply_hadamard(0)
    assert not t.is_deterministic(0)
    t.apply_cnot(0, 1)
    assert not t.is_deterministic(0)
    assert not t.is_deterministic(1)
    d = DenseState(2)
    d.apply_hadamard(0)
    d.apply_cnot(0, 1)
    assert abs(d.measure_probs(0)[0] - 0.5) < 1e-12
    assert abs(d.measure_probs(1)[0] - 0.5) < 1e-12


def test_is_deterministic_does_not_modify(rng):
    t = random_tableau(5, rng)
    u = t.copy()
    for q in range(5):
        t.is_deterministic(q)
    assert t == u


def test_determinate_measurement_leaves_rows_unchanged(rng):
    for _ in range(20):
        t = random_tableau(4, rng)
        r = random.Random(3)
        for q in range(4):
            if t.is_deterministic(q):
                before = t.copy()
                rec = t.measure(q, r)
                assert rec.deterministic
                assert t == before


def test_generator_export_round_trip(rng):
    t = random_tableau(5, rng)
    u = new_zero_state(5)
    for i in range(5):
        u.set_row(i, t.destabilizer_generators()[i])
        u.set_row(5 + i, t.stabilizer_generators()[i])
    assert u == t


def test_snapshot_round_trip(rng):
    t = random_tableau(6, rng)
    random.Random(0)
    t.measure(2, random.Random(0))
    u = Tableau.from_bytes(t.to_bytes())
    assert u == t
    assert u.to_bytes() == t.to_bytes()


def test_snapshot_rejects_garbage():
    with pytest.raises(ValueError):
        Tableau.from_bytes(b"NOPE" + bytes(32))


def test_snapshot_golden_bytes():
    # pins the documented layout: magic, version u32, n u64, then row-major
    # packed x bits, z bits, and phase bits as little-endian 64-bit words
    t = new_zero_state(1)
    t.apply_hadamard(0)
    golden = bytes.fromhex(
        "535442540100000001000000000000000000000000000000"
        "010000000000000000000000000000000100000000000000"
        "000000000000000000000000000000000000000000000000"
    )
    assert t.to_bytes() == golden
    assert Tableau.from_bytes(golden) == t


def test_equality_ignores_scratch(rng):
    t = random_tableau(3, rng)
    u = t.copy()
    u.x[:, u.scratch_row] ^= np.uint64(1)
    assert t == u


def test_memory_bits_close_to_4n_squared():
    n = 256
    t = new_zero_state(n)
    assert t.memory_bits() <= 1.5 * (2 * n * (2 * n + 1))


def test_invariants_preserved_by_random_ops(rng):
    r = random.Random(99)
    for n in (1, 2, 5):
        t = new_zero_state(n)
        for step in range(300):
            if r.random() < 0.2:
                t.measure(r.randrange(n), r)
            else:
                apply_gate(t, random_gate(n, r))
            if step % 50 == 0:
                assert t.satisfies_invariants()
        assert t.satisfies_invariants()


def test_oracle_agreement_random_circuits_with_measurements(rng):
    r = random.Random(17)
    for _ in range(20):
        n = r.randrange(1, 6)
        t = new_zero_state(n)
        d = DenseState(n)
        for _ in range(40):
            g = random_gate(n, r)
            apply_gate(t, g)
            apply_gate(d, g)
        for _ in range(4):
            q = r.randrange(n)
            p0, _ = d.measure_probs(q)
            if t.is_deterministic(q):
                assert p0 > 1 - 1e-10 or p0 < 1e-10
                rec = t.measure(q, r)
                assert rec.outcome == (0 if p0 > 0.5 else 1)
                d.project(q, rec.outcome)
            else:
                assert abs(p0 - 0.5) < 1e-10
                rec = t.measure(q, r)
                d.project(q, rec.outcome)
        for g in t.stabilizer_generators():
            assert d.stabilized_by(g)
