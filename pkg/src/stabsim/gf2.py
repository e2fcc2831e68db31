"""GF(2) matrix kernels backing circuit synthesis and tableau analysis.

Rows are stored as Python ints used as bitsets (bit j = column j), so row
additions are single XORs regardless of width.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionError, SingularMatrixError


@dataclass
class BinaryMatrix:
    nrows: int
    ncols: int
    rows: list = field(default_factory=list)

    def __post_init__(self):
        if self.nrows < 1 or self.ncols < 1:
            raise DimensionError("matrix dimensions must be positive")
        if not self.rows:
            self.rows = [0] * self.nrows
        if len(self.rows) != self.nrows:
            raise DimensionError("row count mismatch")
        mask = (1 << self.ncols) - 1
        self.rows = [r & mask for r in self.rows]

    @classmethod
    def identity(cls, n: int) -> "BinaryMatrix":
        return cls(n, n, [1 << i for i in range(n)])

    @classmethod
    def from_numpy(cls, a) -> "BinaryMatrix":
        a = (np.asarray(a) & 1).astype(np.uint8)
        packed = np.packbits(a, axis=1, bitorder="little")
        rows = [int.from_bytes(row.tobytes(), "little") for row in packed]
        return cls(a.shape[0], a.shape[1], rows)

    def to_numpy(self) -> np.ndarray:
        nbytes = (self.ncols + 7) // 8
        as_bytes = np.frombuffer(
            b"".join(r.to_bytes(nbytes, "little") for r in self.rows), dtype=np.uint8
        ).reshape(self.nrows, nbytes)
        return np.unpackbits(as_bytes, axis=1, bitorder="little")[:, : self.ncols]

    def get(self, i: int, j: int) -> int:
        return (self.rows[i] >> j) & 1

    def set(self, i: int, j: int, bit: int):
        if bit:
            self.rows[i] |= 1 << j
        else:
            self.rows[i] &= ~(1 << j)

    def copy(self) -> "BinaryMatrix":
        return BinaryMatrix(self.nrows, self.ncols, list(self.rows))

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, BinaryMatrix)
            and self.nrows == other.nrows
            and self.ncols == other.ncols
            and self.rows == other.rows
        )

    def transpose(self) -> "BinaryMatrix":
        return BinaryMatrix.from_numpy(self.to_numpy().T)

    def matmul(self, other: "BinaryMatrix") -> "BinaryMatrix":
        if self.ncols != other.nrows:
            raise DimensionError("inner dimensions differ")
        prod = self.to_numpy().astype(np.float64) @ other.to_numpy().astype(np.float64)
        return BinaryMatrix.from_numpy(prod.astype(np.int64) & 1)

    def is_symmetric(self) -> bool:
        return self.nrows == self.ncols and self.rows == self.transpose().rows


def gf2_gaussian_eliminate(m: BinaryMatrix) -> tuple[BinaryMatrix, int, list]:
    """Reduced row echelon form; returns (reduced, rank, pivot column list)."""
    work = m.copy()
    pivots = []
    row = 0
    for col in range(work.ncols):
        sel = None
        for i in range(row, work.nrows):
            if (work.rows[i] >> col) & 1:
                sel = i
                break
        if sel is None:
            continue
        work.rows[row], work.rows[sel] = work.rows[sel], work.rows[row]
        for i in range(work.nrows):
            if i != row and (work.rows[i] >> col) & 1:
                work.rows[i] ^= work.rows[row]
        pivots.append(col)
        row += 1
        if row == work.nrows:
            break
    return work, row, pivots


def gf2_rank(m: BinaryMatrix) -> int:
    return gf2_gaussian_eliminate(m)[1]


def gf2_invert(m: BinaryMatrix) -> BinaryMatrix:
    """Inverse of a square full-rank matrix; raises SingularMatrixError."""
    if m.nrows != m.ncols:
        raise DimensionError("inversion requires a square matrix")
    n = m.nrows
    work = m.copy()
    inv = BinaryMatrix.identity(n)
    row = 0
    for col in range(n):
        sel = None
        for i in range(row, n):
            if (work.rows[i] >> col) & 1:
                sel = i
                break
        if sel is None:
            raise SingularMatrixError("matrix is singular over GF(2)")
        work.rows[row], work.rows[sel] = work.rows[sel], work.rows[row]
        inv.rows[row], inv.rows[sel] = inv.rows[sel], inv.rows[row]
        for i in range(n):
            if i != row and (work.rows[i] >> col) & 1:
                work.rows[i] ^= work.rows[row]
                inv.rows[i] ^= inv.rows[row]
        row += 1
    return inv


def gf2_solve(m: BinaryMatrix, b: int) -> int:
    """Solve M s = b for square invertible M; b and s are column bitsets."""
    if m.nrows != m.ncols:
        raise DimensionError("solve requires a square matrix")
    n = m.nrows
    work = [(m.rows[i], (b >> i) & 1) for i in range(n)]
    piv_of_col = {}
    row = 0
    for col in range(n):
        sel = None
        for i in range(row, n):
            if (work[i][0] >> col) & 1:
                sel = i
                break
        if sel is None:
            raise SingularMatrixError("matrix is singular over GF(2)")
        work[row], work[sel] = work[sel], work[row]
        for i in range(n):
            if i != row and (work[i][0] >> col) & 1:
                work[i] = (work[i][0] ^ work[row][0], work[i][1] ^ work[row][1])
        piv_of_col[col] = row
        row += 1
    s = 0
    for col, r in piv_of_col.items():
        s |= work[r][1] << col
    return s


def gf2_cholesky(a: BinaryMatrix) -> tuple[BinaryMatrix, list]:
    """Decompose a symmetric matrix as A + Lambda = M M^T.

    M is unit lower-triangular (hence invertible) and is determined uniquely
    by the recursion M_ij = A_ij xor sum_{k<j} M_ik M_jk for i > j; the
    diagonal Lambda absorbs whatever the recursion forces on A's diagonal.
    Returns (M, lambda_diagonal_bits_as_list).
    """
    if not a.is_symmetric():
        raise DimensionError("gf2_cholesky requires a symmetric matrix")
    n = a.nrows
    m = BinaryMatrix.identity(n)
    for i in range(n):
        for j in range(i):
            below = (m.rows[i] & m.rows[j] & ((1 << j) - 1)).bit_count() & 1
            if a.get(i, j) ^ below:
                m.rows[i] |= 1 << j
    lam = []
    mmt = m.matmul(m.transpose())
    for i in range(n):
        lam.append(a.get(i, i) ^ mmt.get(i, i))
    return m, lam


def gf2_row_ops_to_identity(m: BinaryMatrix) -> list:
    """Row-addition schedule (src, dst) meaning row_dst ^= row_src that
    reduces a full-rank square matrix to the identity, without swaps."""
    if m.nrows != m.ncols:
        raise DimensionError("reduction requires a square matrix")
    n = m.nrows
    rows = list(m.rows)
    ops = []
    for col in range(n):
        if not (rows[col] >> col) & 1:
            sel = None
            for i in range(col + 1, n):
                if (rows[i] >> col) & 1:
                    sel = i
                    break
            if sel is None:
                raise SingularMatrixError("matrix is singular over GF(2)")
            rows[col] ^= rows[sel]
            ops.append((sel, col))
        for i in range(n):
            if i != col and (rows[i] >> col) & 1:
                rows[i] ^= rows[col]
                ops.append((col, i))
    return ops
