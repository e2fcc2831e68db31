"""Extended-tableau simulator for stabilizer circuits.

A state on n qubits is a (2n+1)-row tableau: rows 0..n-1 hold destabilizer
generators, rows n..2n-1 stabilizer generators, and row 2n is scratch space.
Each row stores its x and z bit vectors packed into 64-bit words (bit j of
word j//64 is qubit j) plus one phase bit, so row composition is word-wise
XOR.  Unitary gates cost O(n) word operations; measurements cost O(n^2) bit
operations in the worst case.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import CorruptTableauError, DimensionError, InvalidTableauError
from .pauli import PauliOperator

_MAGIC = b"STBT"
_VERSION = 1


def _popcount_rows(a: np.ndarray) -> np.ndarray:
    """Set-bit count along the last axis of a uint64 array."""
    return np.bitwise_count(a).sum(axis=-1, dtype=np.int64)


def _unpack_rows(packed: np.ndarray, ncols: int) -> np.ndarray:
    """Packed (rows, words) uint64 -> unpacked (rows, ncols) uint8 bit matrix."""
    as_bytes = packed.astype("<u8").view(np.uint8).reshape(packed.shape[0], -1)
    bits = np.unpackbits(as_bytes, axis=1, bitorder="little")
    return bits[:, :ncols]


def _pack_rows(bits: np.ndarray, words: int) -> np.ndarray:
    """Unpacked (rows, ncols) 0/1 matrix -> packed (rows, words) uint64."""
    rows = bits.shape[0]
    padded = np.zeros((rows, words * 64), dtype=np.uint8)
    padded[:, : bits.shape[1]] = bits
    as_bytes = np.packbits(padded, axis=1, bitorder="little")
    return as_bytes.view("<u8").reshape(rows, words).astype(np.uint64)


def _pack_int(words: np.ndarray) -> int:
    return int.from_bytes(words.astype("<u8").tobytes(), "little")


@dataclass(frozen=True)
class MeasurementRecord:
    qubit: int
    outcome: int
    deterministic: bool


_ONE = np.uint64(1)
_SHIFTS = [np.uint64(s) for s in range(64)]


class Tableau:
    """Mutable destabilizer+stabilizer tableau for an n-qubit state."""

    def __init__(self, n: int):
        if n < 1:
            raise DimensionError(f"qubit count must be positive, got {n}")
        self.n = n
        self._words = (n + 63) // 64
        rows = 2 * n + 1
        # x and z are stored word-major, shape (words, rows): the packed bits
        # of one qubit column live contiguously, which keeps gate updates on
        # cache-friendly slices.  Row-major order is restored in snapshots.
        self.x = np.zeros((self._words, rows), dtype=np.uint64)
        self.z = np.zeros((self._words, rows), dtype=np.uint64)
        self.r = np.zeros(rows, dtype=np.uint64)
        self.rowsum_count = 0
        for j in range(n):
            w, s = divmod(j, 64)
            self.x[w, j] |= _ONE << _SHIFTS[s]
            self.z[w, n + j] |= _ONE << _SHIFTS[s]

    # -- basic structure ---------------------------------------------------

    @property
    def scratch_row(self) -> int:
        return 2 * self.n

    def copy(self) -> "Tableau":
        t = object.__new__(type(self))
        t.__dict__.update(self.__dict__)
        t.x = self.x.copy()
        t.z = self.z.copy()
        t.r = self.r.copy()
        return t

    def __eq__(self, other) -> bool:
        if not isinstance(other, Tableau) or self.n != other.n:
            return NotImplemented if not isinstance(other, Tableau) else False
        k = 2 * self.n
        return (
            np.array_equal(self.x[:, :k], other.x[:, :k])
            and np.array_equal(self.z[:, :k], other.z[:, :k])
            and np.array_equal(self.r[:k], other.r[:k])
        )

    def memory_bits(self) -> int:
        return 8 * (self.x.nbytes + self.z.nbytes + self.r.nbytes)

    def _check_qubit(self, a: int):
        if not 0 <= a < self.n:
            raise DimensionError(f"qubit {a} out of range for n={self.n}")

    def _check_row(self, i: int):
        if not 0 <= i <= 2 * self.n:
            raise DimensionError(f"row {i} out of range")

    # -- row access ---------------------------------------------------------

    def get_row(self, i: int) -> PauliOperator:
        self._check_row(i)
        return PauliOperator(
            self.n,
            2 * int(self.r[i]),
            _pack_int(np.ascontiguousarray(self.x[:, i])),
            _pack_int(np.ascontiguousarray(self.z[:, i])),
        )

    def set_row(self, i: int, p: PauliOperator):
        self._check_row(i)
        if p.n != self.n:
            raise DimensionError("operator length mismatch")
        if p.phase_exp % 2:
            raise InvalidTableauError("tableau rows must carry a ±1 phase")
        nbytes = self._words * 8
        self.x[:, i] = np.frombuffer(p.x.to_bytes(nbytes, "little"), dtype="<u8")
        self.z[:, i] = np.frombuffer(p.z.to_bytes(nbytes, "little"), dtype="<u8")
        self.r[i] = p.phase_exp // 2

    def swap_rows(self, i: int, j: int):
        if i == j:
            return
        self.x[:, [i, j]] = self.x[:, [j, i]]
        self.z[:, [i, j]] = self.z[:, [j, i]]
        self.r[[i, j]] = self.r[[j, i]]

    def stabilizer_generators(self) -> list[PauliOperator]:
        return [self.get_row(self.n + i) for i in range(self.n)]

    def destabilizer_generators(self) -> list[PauliOperator]:
        return [self.get_row(i) for i in range(self.n)]

    # -- unitary gates -------------------------------------------------------

    def apply_cnot(self, a: int, b: int):
        """CNOT from control a to target b."""
        self._check_qubit(a)
        self._check_qubit(b)
        if a == b:
            raise DimensionError("control and target must differ")
        wa, sa_ = a >> 6, _SHIFTS[a & 63]
        wb, sb_ = b >> 6, _SHIFTS[b & 63]
        x, z = self.x, self.z
        xa = (x[wa] >> sa_) & _ONE
        za = (z[wa] >> sa_) & _ONE
        xb = (x[wb] >> sb_) & _ONE
        zb = (z[wb] >> sb_) & _ONE
        self.r ^= xa & zb & (xb ^ za ^ _ONE)
        x[wb] ^= xa << sb_
        z[wa] ^= zb << sa_

    def apply_hadamard(self, a: int):
        """Hadamard on qubit a: swap the x and z bits, flipping Y phases."""
        self._check_qubit(a)
        wa, sa_ = a >> 6, _SHIFTS[a & 63]
        xa = (self.x[wa] >> sa_) & _ONE
        za = (self.z[wa] >> sa_) & _ONE
        self.r ^= xa & za
        diff = (xa ^ za) << sa_
        self.x[wa] ^= diff
        self.z[wa] ^= diff

    def apply_phase(self, a: int):
        """Phase gate on qubit a: z_a ^= x_a after absorbing the Y phase."""
        self._check_qubit(a)
        wa, sa_ = a >> 6, _SHIFTS[a & 63]
        xa = (self.x[wa] >> sa_) & _ONE
        za = (self.z[wa] >> sa_) & _ONE
        self.r ^= xa & za
        self.z[wa] ^= xa << sa_

    # -- rowsum ---------------------------------------------------------------

    def _g_masks(self, src: int, xt: np.ndarray, zt: np.ndarray):
        """Bit masks of +1 and -1 contributions of g against source row `src`."""
        xs, zs = self.x[:, src], self.z[:, src]
        c11 = xs & zs
        c10 = xs & ~zs
        c01 = ~xs & zs
        pos = (c11 & zt & ~xt) | (c10 & xt & zt) | (c01 & xt & ~zt)
        neg = (c11 & xt & ~zt) | (c10 & zt & ~xt) | (c01 & xt & zt)
        return pos, neg

    def rowsum(self, h: int, i: int):
        """Set generator h to i+h, tracking the phase mod 4 per the g function."""
        self._check_row(h)
        self._check_row(i)
        if h == i:
            raise DimensionError("rowsum requires distinct rows")
        pos, neg = self._g_masks(i, self.x[:, h], self.z[:, h])
        g = int(_popcount_rows(pos)) - int(_popcount_rows(neg))
        total = (2 * int(self.r[h]) + 2 * int(self.r[i]) + g) % 4
        if total & 1:
            raise CorruptTableauError("rowsum phase sum is odd: tableau corrupted")
        self.r[h] = total >> 1
        self.x[:, h] ^= self.x[:, i]
        self.z[:, h] ^= self.z[:, i]
        self.rowsum_count += 1

    def _batch_rowsum(self, idx: np.ndarray, src: int):
        """rowsum(i, src) for every row index in idx, vectorized over rows."""
        xt = self.x[:, idx]
        zt = self.z[:, idx]
        pos, neg = self._g_masks(src, (xt.T).copy(), (zt.T).copy())
        g = _popcount_rows(pos) - _popcount_rows(neg)
        total = (2 * self.r[idx].astype(np.int64) + 2 * int(self.r[src]) + g) % 4
        if np.any(total & 1):
            raise CorruptTableauError("rowsum phase sum is odd: tableau corrupted")
        self.r[idx] = (total >> 1).astype(np.uint64)
        self.x[:, idx] ^= self.x[:, src][:, None]
        self.z[:, idx] ^= self.z[:, src][:, None]
        self.rowsum_count += len(idx)

    # -- measurement ------------------------------------------------------------

    def _x_column(self, a: int, lo: int, hi: int) -> np.ndarray:
        wa = a >> 6
        return (self.x[wa, lo:hi] >> _SHIFTS[a & 63]) & _ONE

    def is_deterministic(self, a: int) -> bool:
        """True iff measuring qubit a gives a determinate outcome.  O(n)."""
        self._check_qubit(a)
        return not np.any(self._x_column(a, self.n, 2 * self.n))

    def _collapse(self, a: int, pivot: int, partner: int, rng) -> int:
        """Random-outcome update: sweep rowsums against `pivot`, move it to
        `partner`, and replace it by ±Z_a with a fresh random sign.

        The partner row is excluded from the sweep: it anticommutes with the
        pivot, so its product would carry an unrepresentable ±i phase, and it
        is overwritten by the copy step regardless.
        """
        xa = self._x_column(a, 0, 2 * self.n)
        idx = np.nonzero(xa)[0]
        idx = idx[(idx != pivot) & (idx != partner)]
        if idx.size:
            self._batch_rowsum(idx, pivot)
        self.x[:, partner] = self.x[:, pivot]
        self.z[:, partner] = self.z[:, pivot]
        self.r[partner] = self.r[pivot]
        outcome = rng.getrandbits(1) & 1
        wa, sa = divmod(a, 64)
        self.x[:, pivot] = 0
        self.z[:, pivot] = 0
        self.z[wa, pivot] = _ONE << _SHIFTS[sa]
        self.r[pivot] = outcome
        return outcome

    def _determinate_outcome(self, a: int, limit: int) -> int:
        """Accumulate into the scratch row the stabilizer rows indexed by
        destabilizer rows < limit that anticommute with Z_a."""
        s = self.scratch_row
        self.x[:, s] = 0
        self.z[:, s] = 0
        self.r[s] = 0
        for i in np.nonzero(self._x_column(a, 0, limit))[0]:
            self.rowsum(s, self.n + int(i))
        return int(self.r[s])

    def measure(self, a: int, rng) -> MeasurementRecord:
        """Measure qubit a in the standard basis, updating the state.

        `rng` must supply one unbiased bit via getrandbits(1) when the
        outcome is random; determinate outcomes consume no randomness.
        """
        self._check_qubit(a)
        stab_hits = np.nonzero(self._x_column(a, self.n, 2 * self.n))[0]
        if stab_hits.size:
            p = self.n + int(stab_hits[0])
            outcome = self._collapse(a, p, p - self.n, rng)
            return MeasurementRecord(a, outcome, deterministic=False)
        outcome = self._determinate_outcome(a, self.n)
        return MeasurementRecord(a, outcome, deterministic=True)

    # -- invariants ---------------------------------------------------------------

    def bit_matrix(self) -> tuple[np.ndarray, np.ndarray]:
        """Unpacked (2n, n) x and z bit matrices for rows 0..2n-1."""
        k = 2 * self.n
        xrows = np.ascontiguousarray(self.x[:, :k].T)
        zrows = np.ascontiguousarray(self.z[:, :k].T)
        return _unpack_rows(xrows, self.n), _unpack_rows(zrows, self.n)

    def anticommutation_matrix(self) -> np.ndarray:
        """(2n, 2n) matrix of symplectic products between all generator rows."""
        xb, zb = self.bit_matrix()
        xf = xb.astype(np.float64)
        zf = zb.astype(np.float64)
        m = xf @ zf.T + zf @ xf.T
        return m.astype(np.int64) & 1

    def satisfies_invariants(self) -> bool:
        """Check the commutation pattern: row i anticommutes with row j iff
        j = i±n.  This also forces the 2n x 2n bit matrix to have full rank."""
        n = self.n
        m = self.anticommutation_matrix()
        expected = np.zeros_like(m)
        for i in range(n):
            expected[i, n + i] = 1
            expected[n + i, i] = 1
        return np.array_equal(m, expected)

    # -- binary snapshots -----------------------------------------------------------

    def to_bytes(self) -> bytes:
        """Serialize: magic, version u32 LE, n u64 LE, then row-major packed
        x bits, z bits, and phase bits, all little-endian 64-bit words.  The
        scratch row is stored zeroed."""
        head = _MAGIC + _VERSION.to_bytes(4, "little") + self.n.to_bytes(8, "little")
        x = np.ascontiguousarray(self.x.T)
        z = np.ascontiguousarray(self.z.T)
        r = self.r.copy()
        x[self.scratch_row] = 0
        z[self.scratch_row] = 0
        r[self.scratch_row] = 0
        rbits = 0
        for i, bit in enumerate(int(b) for b in r):
            rbits |= bit << i
        nwords = (2 * self.n + 1 + 63) // 64
        return (
            head
            + x.astype("<u8").tobytes()
            + z.astype("<u8").tobytes()
            + rbits.to_bytes(8 * nwords, "little")
        )

    @classmethod
    def from_bytes(cls, data: bytes) -> "Tableau":
        if data[:4] != _MAGIC:
            raise ValueError("bad magic in tableau snapshot")
        version = int.from_bytes(data[4:8], "little")
        if version != _VERSION:
            raise ValueError(f"unsupported snapshot version {version}")
        n = int.from_bytes(data[8:16], "little")
        t = cls(n)
        rows = 2 * n + 1
        words = (n + 63) // 64
        off = 16
        span = rows * words * 8
        t.x = np.frombuffer(data[off:off + span], dtype="<u8").reshape(rows, words).T.copy()
        off += span
        t.z = np.frombuffer(data[off:off + span], dtype="<u8").reshape(rows, words).T.copy()
        off += span
        rbits = int.from_bytes(data[off:], "little")
        t.r = np.array([(rbits >> i) & 1 for i in range(rows)], dtype=np.uint64)
        return t


def new_zero_state(n: int) -> Tableau:
    """The standard initial tableau for |0...0>: destabilizers X_j, stabilizers Z_j."""
    return Tableau(n)
