"""Dense exact linear algebra over F_q for small matrices.

Single matrices use plain Python Gaussian elimination on integer codes.
``batch_rank`` eliminates a whole stack of matrices at once with numpy and is
what the exhaustive annihilator checks run on.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .galois import FieldSpec


@dataclass(frozen=True)
class MatrixFq:
    field: FieldSpec
    rows: int
    cols: int
    entries: tuple[int, ...]  # row-major codes

    def __post_init__(self):
        if len(self.entries) != self.rows * self.cols:
            raise ValueError("entry count does not match dimensions")

    @classmethod
    def from_rows(cls, field: FieldSpec, rows: Sequence[Sequence[int]], cols: int | None = None):
        rows = [tuple(int(x) for x in r) for r in rows]
        if cols is None:
            cols = len(rows[0]) if rows else 0
        return cls(field, len(rows), cols, tuple(x for r in rows for x in r))

    @classmethod
    def from_array(cls, field: FieldSpec, arr) -> MatrixFq:
        arr = np.asarray(arr)
        return cls(field, arr.shape[0], arr.shape[1], tuple(int(x) for x in arr.ravel()))

    def row(self, i: int) -> tuple[int, ...]:
        return self.entries[i * self.cols : (i + 1) * self.cols]

    def to_rows(self) -> list[list[int]]:
        return [list(self.row(i)) for i in range(self.rows)]

    def to_array(self) -> np.ndarray:
        return np.array(self.entries, dtype=np.int64).reshape(self.rows, self.cols)


@dataclass(frozen=True)
class SubspaceBasis:
    """A subspace of F_q^n held as its reduced row-echelon basis.

    Equal subspaces have identical ``vectors``, so ``==`` is subspace equality.
    """

    field: FieldSpec
    ambient_dim: int
    vectors: tuple[tuple[int, ...], ...]

    @property
    def dim(self) -> int:
        return len(self.vectors)

    def elements(self) -> np.ndarray:
        """All q^dim vectors of the subspace as a (q^dim, n) code array."""
        F = self.field
        k = self.dim
        out = np.zeros((F.q**k, self.ambient_dim), dtype=np.int64)
        if k == 0:
            return out
        basis = np.array(self.vectors, dtype=np.int64)
        idx = np.arange(F.q**k)
        for j in range(k):
            coeff = (idx // F.q**j) % F.q
            out = np.asarray(F.add(out, F.mul(coeff[:, None], basis[j][None, :])), dtype=np.int64)
        return out

    def contains(self, v: Sequence[int]) -> bool:
        return span(self.field, list(self.vectors) + [tuple(v)], self.ambient_dim).dim == self.dim


def _rref_rows(F: FieldSpec, rows: list[list[int]], ncols: int) -> tuple[list[list[int]], list[int]]:
    if F.has_tables:
        mul, sub, inv = F.mul_l, F.sub_l, F.inv_l
    else:
        mul = sub = inv = None
    rows = [list(r) for r in rows]
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(rows)) if rows[i][c] != 0), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        if mul is not None:
            iv = inv[rows[r][c]]
            rows[r] = [mul[x][iv] for x in rows[r]]
        else:
            iv = int(F.inv(rows[r][c]))
            rows[r] = [int(F.mul(x, iv)) for x in rows[r]]
        pr = rows[r]
        for i in range(len(rows)):
            fac = rows[i][c]
            if i != r and fac != 0:
                if mul is not None:
                    mf = mul[fac]
                    rows[i] = [sub[x][mf[y]] for x, y in zip(rows[i], pr)]
                else:
                    rows[i] = [int(F.sub(x, F.mul(fac, y))) for x, y in zip(rows[i], pr)]
        pivots.append(c)
        r += 1
        if r == len(rows):
            break
    return rows, pivots


def row_reduce(m: MatrixFq) -> tuple[MatrixFq, int]:
    """Reduced row-echelon form and rank (pivot = first nonzero, scaled to 1)."""
    rows, pivots = _rref_rows(m.field, m.to_rows(), m.cols)
    return MatrixFq.from_rows(m.field, rows, m.cols), len(pivots)


def rank(m: MatrixFq) -> int:
    return row_reduce(m)[1]


def span(F: FieldSpec, vectors: Sequence[Sequence[int]], ambient_dim: int) -> SubspaceBasis:
    rows, pivots = _rref_rows(F, [list(map(int, v)) for v in vectors], ambient_dim)
    return SubspaceBasis(F, ambient_dim, tuple(tuple(rows[i]) for i in range(len(pivots))))


def kernel_basis(m: MatrixFq) -> SubspaceBasis:
    """Canonical basis of {v : m v = 0}."""
    F = m.field
    rows, pivots = _rref_rows(F, m.to_rows(), m.cols)
    free = [c for c in range(m.cols) if c not in pivots]
    vecs = []
    for fc in free:
        v = [0] * m.cols
        v[fc] = 1
        for i, pc in enumerate(pivots):
            v[pc] = int(F.neg(rows[i][fc]))
        vecs.append(v)
    return span(F, vecs, m.cols)


def _check_same(a: SubspaceBasis, b: SubspaceBasis) -> None:
    if a.ambient_dim != b.ambient_dim or a.field != b.field:
        raise ValueError("subspaces live in different ambient spaces")


def annihilator(a: SubspaceBasis) -> SubspaceBasis:
    """{w : w . v = 0 for all v in a} under the standard dot product."""
    if a.dim == 0:
        return span(a.field, [[int(i == j) for j in range(a.ambient_dim)] for i in range(a.ambient_dim)], a.ambient_dim)
    return kernel_basis(MatrixFq.from_rows(a.field, a.vectors, a.ambient_dim))


def subspace_intersect(a: SubspaceBasis, b: SubspaceBasis) -> SubspaceBasis:
    _check_same(a, b)
    constraints = list(annihilator(a).vectors) + list(annihilator(b).vectors)
    if not constraints:
        return a
    return kernel_basis(MatrixFq.from_rows(a.field, constraints, a.ambient_dim))


def subspace_sum(a: SubspaceBasis, b: SubspaceBasis) -> SubspaceBasis:
    _check_same(a, b)
    return span(a.field, list(a.vectors) + list(b.vectors), a.ambient_dim)


def batch_rank(F: FieldSpec, mats: np.ndarray) -> np.ndarray:
    """Ranks of a stack of matrices, shape (n, rows, cols), by parallel elimination."""
    M = np.array(mats, dtype=np.uint8, copy=True)
    n, nrows, ncols = M.shape
    rk = np.zeros(n, dtype=np.int64)
    row_idx = np.arange(nrows)
    for c in range(ncols):
        cand = (M[:, :, c] != 0) & (row_idx[None, :] >= rk[:, None])
        has = cand.any(axis=1)
        if not has.any():
            continue
        sel = np.nonzero(has)[0]
        piv = cand[sel].argmax(axis=1)
        tgt = rk[sel]
        prow = M[sel, piv].copy()
        M[sel, piv] = M[sel, tgt]
        prow = F.mul_t[prow, F.inv_t[prow[:, c]][:, None]]
        M[sel, tgt] = prow
        fac = M[sel, :, c].copy()
        fac[np.arange(len(sel)), tgt] = 0
        M[sel] = F.sub_t[M[sel], F.mul_t[fac[:, :, None], prow[:, None, :]]]
        rk[sel] += 1
    return rk
