"""Dense linear algebra over the prime field F_p.

Matrices are numpy int64 arrays with entries in [0, p).  Everything here is
exact; row operations are reduced mod p after every step.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


def as_fp(matrix, p: int) -> np.ndarray:
    arr = np.asarray(matrix, dtype=np.int64)
    return np.mod(arr, p)


@dataclass(frozen=True)
class Echelon:
    """Reduced row echelon form of a matrix over F_p."""

    matrix: np.ndarray
    pivots: tuple[int, ...]

    @property
    def rank(self) -> int:
        return len(self.pivots)

    @property
    def basis(self) -> np.ndarray:
        """Nonzero rows: a canonical basis of the row space."""
        return self.matrix[: self.rank]


def rref(matrix, p: int) -> Echelon:
    mat = as_fp(matrix, p).copy()
    if mat.ndim != 2:
        raise ValueError("expected a 2-d matrix")
    rows, cols = mat.shape
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.nonzero(mat[r:, c])[0]
        if nz.size == 0:
            continue
        piv = r + int(nz[0])
        if piv != r:
            mat[[r, piv]] = mat[[piv, r]]
        inv = pow(int(mat[r, c]), -1, p)
        mat[r] = (mat[r] * inv) % p
        col = mat[:, c].copy()
        col[r] = 0
        hit = np.nonzero(col)[0]
        if hit.size:
            mat[hit] = (mat[hit] - np.outer(col[hit], mat[r])) % p
        pivots.append(c)
        r += 1
    return Echelon(mat, tuple(pivots))


def rank(matrix, p: int) -> int:
    arr = np.asarray(matrix)
    if arr.size == 0:
        return 0
    # eliminate along the shorter side
    if arr.shape[0] > arr.shape[1]:
        arr = arr.T
    return rref(arr, p).rank


def nullspace(matrix, p: int) -> np.ndarray:
    """Basis of {v : matrix @ v = 0} as rows, in reduced echelon order."""
    arr = as_fp(matrix, p)
    n = arr.shape[1]
    if arr.shape[0] == 0:
        return np.eye(n, dtype=np.int64)
    ech = rref(arr, p)
    free = [c for c in range(n) if c not in set(ech.pivots)]
    basis = np.zeros((len(free), n), dtype=np.int64)
    for i, f in enumerate(free):
        basis[i, f] = 1
        for row, pc in enumerate(ech.pivots):
            basis[i, pc] = (-ech.matrix[row, f]) % p
    if basis.shape[0]:
        basis = rref(basis, p).basis
    return basis


def nullity(matrix, p: int) -> int:
    arr = np.asarray(matrix)
    return arr.shape[1] - rank(arr, p)


def row_space(matrix, p: int) -> np.ndarray:
    arr = np.asarray(matrix)
    if arr.shape[0] == 0:
        return as_fp(arr, p)
    return rref(arr, p).basis


def coordinates(basis, vectors, p: int) -> np.ndarray:
    """Solve ``coeffs @ basis = vectors`` for coeffs.

    ``basis`` must have linearly independent rows.  Raises ValueError if some
    vector is outside the span.
    """
    basis = as_fp(basis, p)
    vectors = as_fp(np.atleast_2d(vectors), p)
    r, n = basis.shape
    # row-reduce [basis^T | vectors^T]
    aug = np.concatenate([basis.T, vectors.T], axis=1)
    ech = rref(aug, p)
    if any(c >= r for c in ech.pivots):
        raise ValueError("vector not in span of basis")
    if ech.rank != r:
        raise ValueError("basis rows are linearly dependent")
    return ech.matrix[:r, r:].T.copy()


def in_span(basis, vector, p: int) -> bool:
    basis = np.atleast_2d(as_fp(basis, p))
    if basis.size == 0:
        return not np.any(as_fp(vector, p))
    stacked = np.vstack([basis, as_fp(vector, p)])
    return rank(stacked, p) == rank(basis, p)


__all__ = [
    "Echelon",
    "as_fp",
    "coordinates",
    "in_span",
    "nullity",
    "nullspace",
    "rank",
    "rref",
    "row_space",
]
