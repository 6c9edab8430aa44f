"""Dense linear algebra over GF(2^m).

Matrices are 2-D numpy int64 arrays of field values; the field instance is
passed explicitly.  Elimination uses partial pivoting by first nonzero row,
and all routines are exact.  The :class:`Eliminator` keeps an incrementally
extended reduced row-echelon form with value columns riding along; the
decodability oracle leans on it to amortize the cache-only part of a user's
linear system across many demand vectors.
"""

from __future__ import annotations

import numpy as np

from .field import GF2m


class LinAlgError(Exception):
    pass


class InconsistentSystemError(LinAlgError):
    """The system A x = y has no solution."""


class UnderdeterminedSystemError(LinAlgError):
    """rank(A) < number of unknowns; the solution is not unique."""


def identity(n: int) -> np.ndarray:
    return np.eye(n, dtype=np.int64)


def mat_mul(field: GF2m, a, b) -> np.ndarray:
    """Matrix product over the field."""
    a = np.asarray(a, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64)
    if a.ndim != 2 or b.ndim != 2:
        raise LinAlgError("mat_mul expects 2-D arrays")
    if a.shape[1] != b.shape[0]:
        raise LinAlgError(f"dimension mismatch: {a.shape} x {b.shape}")
    out = np.zeros((a.shape[0], b.shape[1]), dtype=np.int64)
    for k in range(a.shape[1]):
        col = a[:, k]
        if not np.any(col):
            continue
        out ^= field.mul_arr(col[:, None], b[k][None, :])
    return out


def rref(field: GF2m, mat, ncols: int | None = None):
    """Reduced row-echelon form.

    Pivoting is limited to the first ``ncols`` columns; trailing columns
    (augmented right-hand sides) are carried through the row operations.
    Returns ``(R, pivots)`` with ``pivots`` a list of (column, row) pairs.
    """
    r = np.array(mat, dtype=np.int64, copy=True)
    if r.ndim != 2:
        raise LinAlgError("rref expects a 2-D array")
    nrows, width = r.shape
    if ncols is None:
        ncols = width
    pivots = []
    row = 0
    for col in range(ncols):
        if row >= nrows:
            break
        nz = np.nonzero(r[row:, col])[0]
        if nz.size == 0:
            continue
        p = row + int(nz[0])
        if p != row:
            r[[row, p]] = r[[p, row]]
        pv = int(r[row, col])
        if pv != 1:
            r[row] = field.mul_arr(field.inv(pv), r[row])
        factors = r[:, col].copy()
        factors[row] = 0
        if np.any(factors):
            r ^= field.mul_arr(factors[:, None], r[row][None, :])
        pivots.append((col, row))
        row += 1
    return r, pivots


def mat_rank(field: GF2m, a) -> int:
    a = np.asarray(a, dtype=np.int64)
    if a.size == 0:
        return 0
    _, pivots = rref(field, a)
    return len(pivots)


def mat_solve(field: GF2m, a, y) -> np.ndarray:
    """Solve A x = y exactly.

    ``y`` may be a vector of length A.rows or a matrix (rows, L) of L
    stacked right-hand sides.  Raises :class:`InconsistentSystemError` when
    no solution exists and :class:`UnderdeterminedSystemError` when the
    solution is not unique.
    """
    a = np.asarray(a, dtype=np.int64)
    y = np.asarray(y, dtype=np.int64)
    vector = y.ndim == 1
    if vector:
        y = y[:, None]
    if a.shape[0] != y.shape[0]:
        raise LinAlgError(f"A has {a.shape[0]} rows but y has {y.shape[0]}")
    ncols = a.shape[1]
    r, pivots = rref(field, np.hstack([a, y]), ncols=ncols)
    # rows that never produced a pivot have an all-zero coefficient part
    if np.any(r[len(pivots):, ncols:]):
        raise InconsistentSystemError("no solution")
    if len(pivots) < ncols:
        raise UnderdeterminedSystemError(f"rank {len(pivots)} < {ncols} unknowns")
    x = np.zeros((ncols, y.shape[1]), dtype=np.int64)
    for col, row in pivots:
        x[col] = r[row, ncols:]
    return x[:, 0] if vector else x


def mat_inv(field: GF2m, a) -> np.ndarray:
    a = np.asarray(a, dtype=np.int64)
    if a.shape[0] != a.shape[1]:
        raise LinAlgError("inverse of a non-square matrix")
    return mat_solve(field, a, identity(a.shape[0]))


class Eliminator:
    """Incremental RREF over coefficient columns with value columns attached.

    Rows are (coeffs || values) with ``ncols`` coefficient columns.  Rows
    whose coefficients cancel to zero must have zero values too, otherwise
    the accumulated system is inconsistent (a construction bug in the
    caller); such rows are dropped.
    """

    def __init__(self, field: GF2m, ncols: int, value_width: int):
        self.field = field
        self.ncols = ncols
        self.width = ncols + value_width
        self.rows = np.zeros((0, self.width), dtype=np.int64)
        self.pivots: dict[int, int] = {}

    def copy(self) -> "Eliminator":
        other = Eliminator.__new__(Eliminator)
        other.field = self.field
        other.ncols = self.ncols
        other.width = self.width
        other.rows = self.rows.copy()
        other.pivots = dict(self.pivots)
        return other

    def add(self, rows) -> None:
        new = np.array(rows, dtype=np.int64, copy=True)
        if new.ndim == 1:
            new = new[None, :]
        if new.shape[1] != self.width:
            raise LinAlgError(f"expected width {self.width}, got {new.shape[1]}")
        # clear existing pivot columns; RREF rows do not reintroduce them
        for col, ri in self.pivots.items():
            factors = new[:, col]
            if np.any(factors):
                new ^= self.field.mul_arr(factors[:, None], self.rows[ri][None, :])
        reduced, piv = rref(self.field, new, ncols=self.ncols)
        if np.any(reduced[len(piv):, self.ncols:]):
            raise InconsistentSystemError("conflicting values for dependent rows")
        keep = reduced[: len(piv)]
        if not piv:
            return
        # back-substitute the new pivots into the existing rows
        for col, ri in piv:
            factors = self.rows[:, col]
            if np.any(factors):
                self.rows ^= self.field.mul_arr(factors[:, None], keep[ri][None, :])
        base = self.rows.shape[0]
        self.rows = np.vstack([self.rows, keep])
        for col, ri in piv:
            self.pivots[col] = base + ri
    def rank(self) -> int:
        return len(self.pivots)

    def solve_unique(self, col: int) -> np.ndarray | None:
        """Value of unknown ``col`` if it is uniquely determined, else None."""
        ri = self.pivots.get(col)
        if ri is None:
            return None
        row = self.rows[ri]
        nz = np.nonzero(row[: self.ncols])[0]
        if nz.size != 1:  # depends on free unknowns
            return None
        return row[self.ncols :].copy()
