import numpy as np
import pytest

from stabsim.errors import DimensionError
from stabsim.pauli import (
    PauliOperator,
    commutes,
    conjugate_cnot,
    conjugate_hadamard,
    conjugate_phase,
    multiply,
    parse_pauli,
    phase_g,
)
from stabsim.oracle import H2, S2, pauli_matrix

ALL_1Q = [PauliOperator(1, k, x, z) for k in range(4) for x in (0, 1) for z in (0, 1)]


def random_pauli(n, rng):
    return PauliOperator(
        n, rng.randrange(4), rng.getrandbits(n), rng.getrandbits(n)
    )


def test_multiply_xy_is_iz():
    assert multiply(parse_pauli("X"), parse_pauli("Y")) == parse_pauli("iZ")


def test_multiply_identity_element(rng):
    for _ in range(50):
        n = rng.randrange(1, 20)
        p = random_pauli(n, rng)
        assert multiply(p, PauliOperator.identity(n)) == p
        assert multiply(PauliOperator.identity(n), p) == p


def test_multiply_self_square():
    p = parse_pauli("-YZZI")
    assert multiply(p, p) == parse_pauli("+IIII")


def test_square_phase_rule(rng):
    # real-phase operators square to +I, imaginary-phase ones to -I
    for _ in range(200):
        p = random_pauli(rng.randrange(1, 16), rng)
        sq = multiply(p, p)
        assert sq.x == 0 and sq.z == 0
        assert sq.phase_exp == (0 if p.phase_exp % 2 == 0 else 2)


def test_multiply_matches_dense_oracle(rng):
    for _ in range(100):
        n = rng.randrange(1, 4)
        p, q = random_pauli(n, rng), random_pauli(n, rng)
        got = pauli_matrix(multiply(p, q))
        want = pauli_matrix(p) @ pauli_matrix(q)
        assert np.allclose(got, want)


def test_multiply_associative_exhaustive_1q():
    for p in ALL_1Q:
        for q in ALL_1Q:
            for s in ALL_1Q:
                assert multiply(multiply(p, q), s) == multiply(p, multiply(q, s))


def test_multiply_associative_random_wide(rng):
    for _ in range(200):
        n = rng.randrange(1, 65)
        p, q, s = (random_pauli(n, rng) for _ in range(3))
        assert multiply(multiply(p, q), s) == multiply(p, multiply(q, s))


@pytest.mark.parametrize(
    "a,b,expect",
    [("X", "Z", 1), ("X", "X", 0), ("XX", "ZZ", 0)],
)
def test_commutes_examples(a, b, expect):
    assert commutes(parse_pauli(a), parse_pauli(b)) == expect


def test_commutes_iff_products_equal(rng):
    for _ in range(300):
        n = rng.randrange(1, 12)
        p, q = random_pauli(n, rng), random_pauli(n, rng)
        same = multiply(p, q) == multiply(q, p)
        assert commutes(p, q) == (0 if same else 1)


def test_length_mismatch_rejected():
    with pytest.raises(DimensionError):
        multiply(parse_pauli("X"), parse_pauli("XX"))
    with pytest.raises(DimensionError):
        commutes(parse_pauli("X"), parse_pauli("XX"))


@pytest.mark.parametrize(
    "bits,expect",
    [((0, 0, 1, 1), 0), ((1, 1, 0, 1), 1), ((0, 1, 1, 0), 1)],
)
def test_phase_g_examples(bits, expect):
    assert phase_g(*bits) == expect


def test_phase_g_matches_matrix_oracle():
    # g is the i-exponent relating P1*P2 to the bitwise-XOR word
    for x1 in (0, 1):
        for z1 in (0, 1):
            for x2 in (0, 1):
                for z2 in (0, 1):
                    p1 = pauli_matrix(PauliOperator(1, 0, x1, z1))
                    p2 = pauli_matrix(PauliOperator(1, 0, x2, z2))
                    prod = p1 @ p2
                    word = pauli_matrix(PauliOperator(1, 0, x1 ^ x2, z1 ^ z2))
                    g = phase_g(x1, z1, x2, z2)
                    assert np.allclose(prod, (1j ** g) * word)


def test_phase_g_matches_multiply(rng):
    # per-qubit g values summed mod 4 reproduce the full product phase
    for _ in range(100):
        n = rng.randrange(1, 10)
        p = PauliOperator(n, 0, rng.getrandbits(n), rng.getrandbits(n))
        q = PauliOperator(n, 0, rng.getrandbits(n), rng.getrandbits(n))
        g = sum(
            phase_g((p.x >> j) & 1, (p.z >> j) & 1, (q.x >> j) & 1, (q.z >> j) & 1)
            for j in range(n)
        )
        assert multiply(p, q).phase_exp == g % 4


def test_text_round_trip(rng):
    for _ in range(100):
        p = random_pauli(rng.randrange(1, 20), rng)
        assert parse_pauli(str(p)) == p


@pytest.mark.parametrize("text", ["+XIZ", "-Y", "iZZ", "-iXYZI", "X"])
def test_parse_known_forms(text):
    p = parse_pauli(text)
    canonical = text if text[0] in "+-i" else "+" + text
    assert str(p) == canonical


def test_parse_rejects_garbage():
    for bad in ["", "+", "XQ", "1Z"]:
        with pytest.raises(ValueError):
            parse_pauli(bad)


def test_gate_conjugation_matches_oracle(rng):
    for _ in range(60):
        n = rng.randrange(2, 5)
        p = random_pauli(n, rng)
        pm = pauli_matrix(p)

        a = rng.randrange(n)
        got = pauli_matrix(conjugate_hadamard(p, a))
        u = np.eye(1)
        for j in range(n):
            u = np.kron(u, H2 if j == a else np.eye(2))
        assert np.allclose(got, u @ pm @ u.conj().T)

        got = pauli_matrix(conjugate_phase(p, a))
        u = np.eye(1)
        for j in range(n):
            u = np.kron(u, S2 if j == a else np.eye(2))
        assert np.allclose(got, u @ pm @ u.conj().T)

        b = (a + 1 + rng.randrange(n - 1)) % n
        if a == b:
            continue
        from stabsim.oracle import DenseState

        dim = 1 << n
        u = np.zeros((dim, dim), dtype=complex)
        probe = DenseState(n)
        for col in range(dim):
            probe.vec = np.zeros(dim, dtype=complex)
            probe.vec[col] = 1.0
            probe.apply_cnot(a, b)
            u[:, col] = probe.vec
        got = pauli_matrix(conjugate_cnot(p, a, b))
        assert np.allclose(got, u @ pm @ u.conj().T)
