"""Hermitian 3x3 octonion matrices (the 27-dim algebra A) and the module W.

An element (l0, l0', l0'' | D, E, F) is stored as a length-27 code array:
``[l0, l0', l0'', D(8), E(8), F(8)]``.  Its matrix is

    [[ l0      F       conj(E) ]
     [ conj(F) l0'     D       ]
     [ E       conj(D) l0''    ]]

Functions broadcast over leading axes.  W = U / (U n <I>) is realised with a
fixed coordinate basis (version ``F4-min-v1``); see :func:`wspace_make`.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import linalg
from . import octonion as oc
from .galois import FieldSpec

BASIS_VERSION = "F4-min-v1"

S0, S1, S2 = 0, 1, 2
D_SLOT = slice(3, 11)
E_SLOT = slice(11, 19)
F_SLOT = slice(19, 27)


def make(F: FieldSpec, s0, s1, s2, D, E, Fo) -> np.ndarray:
    s0, s1, s2 = (np.asarray(s, dtype=np.uint8) for s in (s0, s1, s2))
    D, E, Fo = (np.asarray(x, dtype=np.uint8) for x in (D, E, Fo))
    shape = np.broadcast_shapes(s0.shape, s1.shape, s2.shape, D.shape[:-1], E.shape[:-1], Fo.shape[:-1])
    v = np.zeros(shape + (27,), dtype=np.uint8)
    v[..., S0] = s0
    v[..., S1] = s1
    v[..., S2] = s2
    v[..., D_SLOT] = D
    v[..., E_SLOT] = E
    v[..., F_SLOT] = Fo
    return v


def identity(F: FieldSpec) -> np.ndarray:
    """I = (1, 1, 1 | 0, 0, 0)."""
    z = np.zeros(8, dtype=np.uint8)
    return make(F, 1, 1, 1, z, z, z)


def w(F: FieldSpec, i: int, slot: int = 0) -> np.ndarray:
    """Basis element w_i (slot 0), w_i' (slot 1) or w_i'' (slot 2)."""
    v = np.zeros(27, dtype=np.uint8)
    if i == 0:
        v[slot] = 1
    else:
        v[3 + 8 * slot + i - 1] = 1
    return v


def _matrix(F: FieldSpec, v: np.ndarray) -> np.ndarray:
    """(..., 3, 3, 8) octonion entries of the Hermitian matrix of v."""
    v = np.asarray(v, dtype=np.uint8)
    D, E, Fo = v[..., D_SLOT], v[..., E_SLOT], v[..., F_SLOT]
    M = np.empty(v.shape[:-1] + (3, 3, 8), dtype=np.uint8)
    M[..., 0, 0, :] = oc.scalar(F, v[..., S0])
    M[..., 0, 1, :] = Fo
    M[..., 0, 2, :] = oc.conj(F, E)
    M[..., 1, 0, :] = oc.conj(F, Fo)
    M[..., 1, 1, :] = oc.scalar(F, v[..., S1])
    M[..., 1, 2, :] = D
    M[..., 2, 0, :] = E
    M[..., 2, 1, :] = oc.conj(F, D)
    M[..., 2, 2, :] = oc.scalar(F, v[..., S2])
    return M


def _matmul(F: FieldSpec, X: np.ndarray, Y: np.ndarray) -> np.ndarray:
    out = np.empty(np.broadcast_shapes(X.shape, Y.shape), dtype=np.uint8)
    for i in range(3):
        for j in range(3):
            acc = oc.mul(F, X[..., i, 0, :], Y[..., 0, j, :])
            for k in (1, 2):
                acc = oc.add(F, acc, oc.mul(F, X[..., i, k, :], Y[..., k, j, :]))
            out[..., i, j, :] = acc
    return out


def _from_matrix(F: FieldSpec, M: np.ndarray) -> np.ndarray:
    """Read back (l0, l0', l0'' | D, E, F), asserting the matrix is Hermitian."""
    for i in range(3):
        d = M[..., i, i, :]
        assert (d[..., [0, 1, 2, 5, 6, 7]] == 0).all() and (d[..., 3] == d[..., 4]).all(), (
            "diagonal entry is not a scalar"
        )
    D, E, Fo = M[..., 1, 2, :], M[..., 2, 0, :], M[..., 0, 1, :]
    assert (M[..., 2, 1, :] == oc.conj(F, D)).all(), "D slot not Hermitian"
    assert (M[..., 0, 2, :] == oc.conj(F, E)).all(), "E slot not Hermitian"
    assert (M[..., 1, 0, :] == oc.conj(F, Fo)).all(), "F slot not Hermitian"
    return make(F, M[..., 0, 0, 3], M[..., 1, 1, 3], M[..., 2, 2, 3], D, E, Fo)


def jordan_product(F: FieldSpec, u, v) -> np.ndarray:
    """u o v = uv + vu with literal 3x3 octonion matrix products."""
    U, V = _matrix(F, u), _matrix(F, v)
    S = oc.add(F, _matmul(F, U, V), _matmul(F, V, U))
    return _from_matrix(F, S)


def add(F: FieldSpec, u, v) -> np.ndarray:
    return F.add_t[np.asarray(u, dtype=np.uint8), np.asarray(v, dtype=np.uint8)]


def smul(F: FieldSpec, c, v) -> np.ndarray:
    c = np.asarray(c, dtype=np.uint8)
    return F.mul_t[c[..., None], np.asarray(v, dtype=np.uint8)]


def albert_trace(F: FieldSpec, v) -> np.ndarray:
    v = np.asarray(v, dtype=np.uint8)
    return F.add_t[F.add_t[v[..., S0], v[..., S1]], v[..., S2]]


def _q0_raw(F: FieldSpec, v: np.ndarray) -> np.ndarray:
    mt, at = F.mul_t, F.add_t
    a, b = v[..., S0], v[..., S1]
    acc = at[at[mt[a, a], mt[a, b]], mt[b, b]]
    for sl in (D_SLOT, E_SLOT, F_SLOT):
        acc = at[acc, oc.norm(F, v[..., sl])]
    return acc


def q0_eval(F: FieldSpec, v) -> np.ndarray:
    """Q_0 on the trace-zero subspace U."""
    v = np.asarray(v, dtype=np.uint8)
    if (albert_trace(F, v) != 0).any():
        raise ValueError("Q_0 is only defined on trace-zero elements")
    return _q0_raw(F, v)


def b0_eval(F: FieldSpec, u, v) -> np.ndarray:
    """Polarization Q_0(u+v) - Q_0(u) - Q_0(v)."""
    u = np.asarray(u, dtype=np.uint8)
    v = np.asarray(v, dtype=np.uint8)
    return F.sub_t[F.sub_t[q0_eval(F, add(F, u, v)), q0_eval(F, u)], q0_eval(F, v)]


@dataclass(frozen=True, eq=False)
class AlbertElement:
    """Scalar wrapper around one length-27 code array."""

    field: FieldSpec
    data: tuple[int, ...]

    @classmethod
    def of(cls, F: FieldSpec, arr) -> AlbertElement:
        return cls(F, tuple(int(c) for c in np.asarray(arr)))

    @property
    def array(self) -> np.ndarray:
        return np.array(self.data, dtype=np.uint8)

    @property
    def scalars(self) -> tuple[int, int, int]:
        return self.data[0], self.data[1], self.data[2]

    @property
    def d(self) -> oc.Octonion:
        return oc.Octonion(self.field, self.data[D_SLOT])

    @property
    def e(self) -> oc.Octonion:
        return oc.Octonion(self.field, self.data[E_SLOT])

    @property
    def f(self) -> oc.Octonion:
        return oc.Octonion(self.field, self.data[F_SLOT])

    def __eq__(self, other):
        return isinstance(other, AlbertElement) and self.field == other.field and self.data == other.data

    def __hash__(self):
        return hash(self.data)

    def jordan(self, other: AlbertElement) -> AlbertElement:
        if self.field != other.field:
            raise ValueError("elements over different fields")
        return AlbertElement.of(self.field, jordan_product(self.field, self.array, other.array))

    def trace(self) -> int:
        return int(albert_trace(self.field, self.array))


# -- the minimal module W -----------------------------------------------------------


class WSpace:
    """Coordinates, Gram matrix and quadratic form of W.

    p != 3: basis w0-w0', w0'-w0'', then w_1..w_8, w_1'..w_8', w_1''..w_8''
    (dim 26).  p = 3: w0-w0' followed by the same 24 octonion-slot vectors
    (dim 25); a trace-zero v is first moved to its coset representative
    v - l0''*I, whose third scalar is zero.
    """

    def __init__(self, F: FieldSpec):
        if F.p != 3 and F.q % 3 != 2:
            raise ValueError(
                f"q = {F.q} is neither a power of 3 nor 2 mod 3; W is only built for those cases"
            )
        self.field = F
        self.char3 = F.p == 3
        self.dim = 25 if self.char3 else 26
        self.basis_version = BASIS_VERSION
        one = 1
        minus = int(F.neg(1))
        rows = [make(F, one, minus, 0, *(np.zeros(8, np.uint8),) * 3)]
        if not self.char3:
            rows.append(make(F, 0, one, minus, *(np.zeros(8, np.uint8),) * 3))
        for slot in range(3):
            for i in range(1, 9):
                rows.append(w(F, i, slot))
        self.basis = np.stack(rows)
        self.n_scalar = 1 if self.char3 else 2
        assert (albert_trace(F, self.basis) == 0).all()

        n = self.dim
        Bi = self.basis[:, None, :]
        Bj = self.basis[None, :, :]
        self.gram = np.asarray(b0_eval(F, Bi, Bj), dtype=np.uint8)
        self.qdiag = np.asarray(q0_eval(F, self.basis), dtype=np.uint8)
        assert (self.gram == self.gram.T).all()
        r = linalg.rank(linalg.MatrixFq.from_array(F, self.gram))
        assert r == n, f"Gram matrix of W has rank {r} < {n}"
        # sparse quadratic-form terms: (i, j, coeff) with i <= j
        self.q_terms = [(i, i, int(self.qdiag[i])) for i in range(n) if self.qdiag[i]]
        self.q_terms += [(i, j, int(self.gram[i, j])) for i in range(n) for j in range(i + 1, n) if self.gram[i, j]]

    @property
    def p(self) -> int:
        return self.field.p

    @property
    def f(self) -> int:
        return self.field.f

    def project(self, v) -> np.ndarray:
        """W coordinates of trace-zero Albert elements."""
        F = self.field
        v = np.asarray(v, dtype=np.uint8)
        if (albert_trace(F, v) != 0).any():
            raise ValueError("only trace-zero elements project to W")
        out = np.empty(v.shape[:-1] + (self.dim,), dtype=np.uint8)
        if self.char3:
            out[..., 0] = F.sub_t[v[..., S0], v[..., S2]]
        else:
            out[..., 0] = v[..., S0]
            out[..., 1] = F.neg_t[v[..., S2]]
        out[..., self.n_scalar :] = v[..., 3:]
        return out

    def lift(self, c) -> np.ndarray:
        """Trace-zero representative of W coordinates (inverse of project)."""
        F = self.field
        c = np.asarray(c, dtype=np.uint8)
        v = np.zeros(c.shape[:-1] + (27,), dtype=np.uint8)
        v[..., S0] = c[..., 0]
        if self.char3:
            v[..., S1] = F.neg_t[c[..., 0]]
        else:
            v[..., S1] = F.sub_t[c[..., 1], c[..., 0]]
            v[..., S2] = F.neg_t[c[..., 1]]
        v[..., 3:] = c[..., self.n_scalar :]
        return v

    def q_eval(self, c) -> np.ndarray:
        """Q on W coordinates via the Gram/diagonal terms."""
        F = self.field
        c = np.asarray(c, dtype=np.uint8)
        acc = np.zeros(c.shape[:-1], dtype=np.uint8)
        mt, at = F.mul_t, F.add_t
        for i, j, k in self.q_terms:
            acc = at[acc, mt[k, mt[c[..., i], c[..., j]]]]
        return acc

    def b_eval(self, c, d) -> np.ndarray:
        F = self.field
        c = np.asarray(c, dtype=np.uint8)
        d = np.asarray(d, dtype=np.uint8)
        t = gram_apply(F, self.gram, d)
        return dot(F, c, t)

    def form_space(self):
        from .polarcheck import FormSpace

        family = "Q" if self.char3 else ("Q-" if self.field.q % 3 == 2 else "Q+")
        return FormSpace(
            field=self.field,
            dim=self.dim,
            gram=self.gram,
            q_terms=tuple(self.q_terms),
            family=family,
            basis_version=self.basis_version,
        )


def gram_apply(F: FieldSpec, gram: np.ndarray, c) -> np.ndarray:
    """t = G c over F_q for (..., n) coordinate arrays."""
    c = np.asarray(c, dtype=np.uint8)
    n = gram.shape[0]
    out = np.zeros(c.shape, dtype=np.uint8)
    for i in range(n):
        for j in np.nonzero(gram[i])[0]:
            out[..., i] = F.add_t[out[..., i], F.mul_t[gram[i, j], c[..., j]]]
    return out


def dot(F: FieldSpec, a, b) -> np.ndarray:
    a = np.asarray(a, dtype=np.uint8)
    b = np.asarray(b, dtype=np.uint8)
    acc = np.zeros(np.broadcast_shapes(a.shape, b.shape)[:-1], dtype=np.uint8)
    for i in range(a.shape[-1]):
        acc = F.add_t[acc, F.mul_t[a[..., i], b[..., i]]]
    return acc


_WSPACES: dict = {}


def wspace_make(F: FieldSpec) -> WSpace:
    key = (F.p, F.f, F.modulus)
    if key not in _WSPACES:
        _WSPACES[key] = WSpace(F)
    return _WSPACES[key]


def w_project(v, ws: WSpace) -> np.ndarray:
    return ws.project(v)
