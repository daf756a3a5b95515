"""Split octonions over F_q in the basis x_1..x_8, plus counting oracles.

Octonions are handled as code arrays with a trailing axis of length 8 (index
i holds the coefficient of x_{i+1}); every function here broadcasts over the
leading axes.  :class:`Octonion` is a thin scalar wrapper for readability in
tests and small computations.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from . import linalg
from .galois import FieldSpec, absolute_trace, is_square, nonsquare, trace_one_element

# (left, right, sign, result), 1-based, one entry per nonzero cell of the table
# x_left * x_right = sign * x_result.  Blank cells are zero.
# x3*x8 = -x7 (not +x7): x3, x8 lie in 1-perp, so x3*x8 = -(x8*x3) = -x7.
STRUCTURE = (
    (1, 5, +1, 1), (1, 6, +1, 2), (1, 7, -1, 3), (1, 8, -1, 4),
    (2, 3, -1, 1), (2, 4, +1, 2), (2, 7, -1, 5), (2, 8, +1, 6),
    (3, 2, +1, 1), (3, 4, +1, 3), (3, 6, -1, 5), (3, 8, -1, 7),
    (4, 1, +1, 1), (4, 4, +1, 4), (4, 6, +1, 6), (4, 7, +1, 7),
    (5, 2, +1, 2), (5, 3, +1, 3), (5, 5, +1, 5), (5, 8, +1, 8),
    (6, 1, -1, 2), (6, 3, -1, 4), (6, 5, +1, 6), (6, 7, +1, 8),
    (7, 1, +1, 3), (7, 2, -1, 4), (7, 5, +1, 7), (7, 6, -1, 8),
    (8, 1, -1, 5), (8, 2, -1, 6), (8, 3, +1, 7), (8, 4, +1, 8),
)  # fmt: skip

# per output coordinate: the (left, right, sign) terms feeding it, 0-based
_TERMS = [[(i - 1, j - 1, s) for i, j, s, k in STRUCTURE if k == out] for out in range(1, 9)]


def structure_table() -> np.ndarray:
    """8 x 8 x 8 integer tensor T with x_i x_j = sum_k T[i, j, k] x_k."""
    T = np.zeros((8, 8, 8), dtype=np.int64)
    for i, j, s, k in STRUCTURE:
        T[i - 1, j - 1, k - 1] = s
    return T


def _self_check() -> None:
    """Integer-level checks of the table: identity, polarized norm, composition."""
    T = structure_table()
    one = np.zeros(8, dtype=np.int64)
    one[3] = one[4] = 1
    eye = np.eye(8, dtype=np.int64)
    assert (np.einsum("i,ijk->jk", one, T) == eye).all(), "x4+x5 is not a left identity"
    assert (np.einsum("j,ijk->ik", one, T) == eye).all(), "x4+x5 is not a right identity"

    flip = -np.eye(8, dtype=np.int64)
    flip[3, 3] = flip[4, 4] = 0
    flip[3, 4] = flip[4, 3] = 1
    gram = np.zeros((8, 8), dtype=np.int64)
    for i in range(8):
        gram[i, 7 - i] = 1

    def prod(x, y):
        return np.einsum("i,j,ijk->k", x, y, T)

    def norm_int(v):
        return int(sum(v[i] * v[7 - i] for i in range(4)))

    for i in range(8):
        for j in range(8):
            # x_i conj(x_j) + x_j conj(x_i) = B(x_i, x_j) * 1
            s = prod(eye[i], flip @ eye[j]) + prod(eye[j], flip @ eye[i])
            assert (s == gram[i, j] * one).all(), f"polarized norm fails on x{i + 1}, x{j + 1}"
    pairs = [eye[i] + eye[j] for i in range(8) for j in range(i, 8)]
    for x in pairs:
        for y in pairs:
            assert norm_int(prod(x, y)) == norm_int(x) * norm_int(y), "norm not multiplicative"


_self_check()


def basis(F: FieldSpec, i: int) -> np.ndarray:
    """x_i (1-based) as a code vector."""
    v = np.zeros(8, dtype=np.uint8)
    v[i - 1] = 1
    return v


def identity(F: FieldSpec) -> np.ndarray:
    v = np.zeros(8, dtype=np.uint8)
    v[3] = v[4] = 1
    return v


def scalar(F: FieldSpec, k) -> np.ndarray:
    """k * (x_4 + x_5), broadcast over the shape of k."""
    k = np.asarray(k, dtype=np.uint8)
    v = np.zeros(k.shape + (8,), dtype=np.uint8)
    v[..., 3] = k
    v[..., 4] = k
    return v


def mul(F: FieldSpec, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=np.uint8)
    y = np.asarray(y, dtype=np.uint8)
    shape = np.broadcast_shapes(x.shape, y.shape)
    out = np.empty(shape, dtype=np.uint8)
    mt, at, st = F.mul_t, F.add_t, F.sub_t
    for k, terms in enumerate(_TERMS):
        acc = None
        for i, j, s in terms:
            prod = mt[x[..., i], y[..., j]]
            if acc is None:
                acc = prod if s > 0 else F.neg_t[prod]
            else:
                acc = at[acc, prod] if s > 0 else st[acc, prod]
        out[..., k] = acc
    return out


def add(F: FieldSpec, x, y) -> np.ndarray:
    return F.add_t[np.asarray(x, dtype=np.uint8), np.asarray(y, dtype=np.uint8)]


def sub(F: FieldSpec, x, y) -> np.ndarray:
    return F.sub_t[np.asarray(x, dtype=np.uint8), np.asarray(y, dtype=np.uint8)]


def smul(F: FieldSpec, c, x) -> np.ndarray:
    """Scalar multiple c * x; c broadcasts against the leading axes of x."""
    c = np.asarray(c, dtype=np.uint8)
    return F.mul_t[c[..., None], np.asarray(x, dtype=np.uint8)]


def conj(F: FieldSpec, x) -> np.ndarray:
    x = np.asarray(x, dtype=np.uint8)
    out = F.neg_t[x]
    out[..., 3] = x[..., 4]
    out[..., 4] = x[..., 3]
    return out


def trace(F: FieldSpec, x) -> np.ndarray:
    x = np.asarray(x, dtype=np.uint8)
    return F.add_t[x[..., 3], x[..., 4]]


def norm(F: FieldSpec, x) -> np.ndarray:
    x = np.asarray(x, dtype=np.uint8)
    mt, at = F.mul_t, F.add_t
    acc = mt[x[..., 0], x[..., 7]]
    for i in range(1, 4):
        acc = at[acc, mt[x[..., i], x[..., 7 - i]]]
    return acc


def bilinear(F: FieldSpec, x, y) -> np.ndarray:
    """B(x, y) = N(x + y) - N(x) - N(y)."""
    return F.sub_t[F.sub_t[norm(F, add(F, x, y)), norm(F, x)], norm(F, y)]


def all_octonions(F: FieldSpec) -> np.ndarray:
    """Every element of O as a (q^8, 8) array; x_1 varies fastest."""
    q = F.q
    idx = np.arange(q**8, dtype=np.int64)
    return np.stack([(idx // q**i) % q for i in range(8)], axis=1).astype(np.uint8)


def is_zero(x) -> np.ndarray:
    return ~np.asarray(x).any(axis=-1)


# -- scalar wrapper -------------------------------------------------------------


@dataclass(frozen=True)
class Octonion:
    field: FieldSpec
    coords: tuple[int, ...]

    @classmethod
    def of(cls, F: FieldSpec, arr) -> Octonion:
        return cls(F, tuple(int(c) for c in np.asarray(arr)))

    @classmethod
    def x(cls, F: FieldSpec, i: int) -> Octonion:
        return cls.of(F, basis(F, i))

    @classmethod
    def one(cls, F: FieldSpec) -> Octonion:
        return cls.of(F, identity(F))

    @property
    def array(self) -> np.ndarray:
        return np.array(self.coords, dtype=np.uint8)

    def _check(self, other: Octonion) -> None:
        if self.field != other.field:
            raise ValueError("octonions over different fields")

    def __mul__(self, other: Octonion) -> Octonion:
        self._check(other)
        return Octonion.of(self.field, mul(self.field, self.array, other.array))

    def __add__(self, other: Octonion) -> Octonion:
        self._check(other)
        return Octonion.of(self.field, add(self.field, self.array, other.array))

    def __sub__(self, other: Octonion) -> Octonion:
        self._check(other)
        return Octonion.of(self.field, sub(self.field, self.array, other.array))

    def __neg__(self) -> Octonion:
        return Octonion.of(self.field, self.field.neg_t[self.array])

    def scale(self, c: int) -> Octonion:
        return Octonion.of(self.field, smul(self.field, c, self.array))

    def conj(self) -> Octonion:
        return Octonion.of(self.field, conj(self.field, self.array))

    def trace(self) -> int:
        return int(trace(self.field, self.array))

    def norm(self) -> int:
        return int(norm(self.field, self.array))

    def __bool__(self) -> bool:
        return any(self.coords)


def oct_mul(x: Octonion, y: Octonion) -> Octonion:
    return x * y


def oct_conj(x: Octonion) -> Octonion:
    return x.conj()


def oct_trace(x: Octonion) -> int:
    return x.trace()


def oct_norm(x: Octonion) -> int:
    return x.norm()


def oct_bilinear(x: Octonion, y: Octonion) -> int:
    x._check(y)
    return int(bilinear(x.field, x.array, y.array))


# -- annihilators ---------------------------------------------------------------


def left_mult_matrix(F: FieldSpec, a) -> np.ndarray:
    """Matrix of v -> a v (columns are a x_j); broadcasts over leading axes of a."""
    a = np.asarray(a, dtype=np.uint8)
    cols = [mul(F, a, np.broadcast_to(basis(F, j), a.shape)) for j in range(1, 9)]
    return np.stack(cols, axis=-1)


def right_mult_matrix(F: FieldSpec, a) -> np.ndarray:
    """Matrix of v -> v a."""
    a = np.asarray(a, dtype=np.uint8)
    cols = [mul(F, np.broadcast_to(basis(F, j), a.shape), a) for j in range(1, 9)]
    return np.stack(cols, axis=-1)


def ann_left(a: Octonion) -> linalg.SubspaceBasis:
    """{x : x a = 0}."""
    return linalg.kernel_basis(linalg.MatrixFq.from_array(a.field, right_mult_matrix(a.field, a.array)))


def ann_right(a: Octonion) -> linalg.SubspaceBasis:
    """{x : a x = 0}."""
    return linalg.kernel_basis(linalg.MatrixFq.from_array(a.field, left_mult_matrix(a.field, a.array)))


# -- counting oracles -------------------------------------------------------------


@dataclass(frozen=True)
class Census:
    """An enumerated count next to its closed-form value."""

    name: str
    enumerated: int
    formula: int

    @property
    def ok(self) -> bool:
        return self.enumerated == self.formula


ENUMERATION_BOUND = 10**8


def _iverson(b: bool) -> int:
    return 1 if b else 0


def nk_formula(q: int, k: int, a_is_zero: bool) -> int:
    return q ** (2 * k - 1) - q ** (k - 1) + q**k * _iverson(a_is_zero)


def census_nk(F: FieldSpec, k: int, a: int, chunk: int = 1 << 20) -> Census:
    """Count tuples in F_q^{2k} with a_1 a_2 + ... + a_{2k-1} a_{2k} = a."""
    q = F.q
    if not 1 <= k <= 4:
        raise ValueError("k must be in 1..4")
    total = q ** (2 * k)
    if total > ENUMERATION_BOUND:
        raise ValueError(f"enumeration of {total} tuples exceeds the bound")
    count = 0
    for start in range(0, total, chunk):
        idx = np.arange(start, min(start + chunk, total), dtype=np.int64)
        acc = np.zeros(len(idx), dtype=np.uint8)
        for j in range(k):
            u = ((idx // q ** (2 * j)) % q).astype(np.uint8)
            v = ((idx // q ** (2 * j + 1)) % q).astype(np.uint8)
            acc = F.add_t[acc, F.mul_t[u, v]]
        count += int((acc == a).sum())
    return Census(f"N_{k}({a})", count, nk_formula(q, k, a == 0))


def norm_fiber_formula(q: int, a_is_zero: bool, constrain_x1: bool) -> int:
    if constrain_x1:
        return q**6 - q**3 + q**4 * _iverson(a_is_zero)
    return q**7 - q**3 + q**4 * _iverson(a_is_zero)


def x1_pairing(F: FieldSpec, alpha) -> np.ndarray:
    """Tr(x_1 * conj(alpha)), computed through the product."""
    alpha = np.asarray(alpha, dtype=np.uint8)
    return trace(F, mul(F, np.broadcast_to(basis(F, 1), alpha.shape), conj(F, alpha)))


def census_norm_fiber(F: FieldSpec, a: int, constrain_x1: bool, octs: np.ndarray | None = None) -> Census:
    """Octonions of norm a, optionally with Tr(x_1 conj(alpha)) = 0."""
    if F.q**8 > ENUMERATION_BOUND:
        raise ValueError("q^8 exceeds the enumeration bound")
    octs = all_octonions(F) if octs is None else octs
    mask = norm(F, octs) == a
    if constrain_x1:
        mask &= x1_pairing(F, octs) == 0
    name = f"#{{N={a}{', Tr(x1 conj)=0' if constrain_x1 else ''}}}"
    return Census(name, int(mask.sum()), norm_fiber_formula(F.q, a == 0, constrain_x1))


def de_pairs_formula(q: int) -> int:
    return (q**6 - q**3 + q**4 - 1) * (q**4 - 1)


def census_de_pairs(F: FieldSpec, octs: np.ndarray | None = None) -> tuple[Census, bool]:
    """Pairs of nonzero (D, E) with DE = 0 and Tr(x_1 conj(D)) = 0.

    E is searched over the whole algebra for each candidate D (no annihilator
    shortcut), so the count is an independent oracle.  Also returns whether
    N(D) = N(E) = 0 held for every counted pair.
    """
    if F.q > 3:
        raise ValueError("full pair enumeration is limited to q <= 3")
    octs = all_octonions(F) if octs is None else octs
    nonzero = ~is_zero(octs)
    d_cand = octs[nonzero & (x1_pairing(F, octs) == 0)]
    e_all = octs[nonzero]
    e_norm_zero = norm(F, e_all) == 0
    count = 0
    singular = True
    for D in d_cand:
        hit = is_zero(mul(F, D[None, :], e_all))
        n_hit = int(hit.sum())
        if n_hit:
            count += n_hit
            singular &= int(norm(F, D)) == 0 and bool(e_norm_zero[hit].all())
    return Census("#{(D,E): DE=0, Tr(x1 conj D)=0}", count, de_pairs_formula(F.q)), singular


def table2_expected(F: FieldSpec) -> dict[tuple[int, int], int]:
    """(trace, norm) -> summed orbit size, built from the orbit representatives.

    Each representative's trace and norm are evaluated with the octonion
    arithmetic, not read off the table.
    """
    q = F.q
    if q <= 2:
        raise ValueError("Lemma 2.2 requires q>2")
    reps: list[tuple[np.ndarray, int]] = []
    one = identity(F)

    def plus_k(v, k):
        return add(F, v, smul(F, k, one))

    x1, x4, x5, x8 = (basis(F, i) for i in (1, 4, 5, 8))
    for k in F.elements():
        reps.append((smul(F, k, one), 1))
        reps.append((plus_k(x1, k), q**6 - 1))
    if q % 2:
        alpha = nonsquare(F)
        T = []
        for a in F.nonzero():
            if int(F.neg(a)) not in T:
                T.append(a)
        u = sub(F, x4, x5)
        v = sub(F, x1, smul(F, alpha, x8))
        for a in T:
            for k in F.elements():
                reps.append((plus_k(smul(F, a, u), k), q**6 + q**3))
                reps.append((plus_k(smul(F, a, v), k), q**6 - q**3))
    else:
        beta = trace_one_element(F)
        S = []
        for k in F.elements():
            if int(F.add(k, 1)) not in S:
                S.append(k)
        for a in F.nonzero():
            for k in S:
                reps.append((smul(F, a, plus_k(x4, k)), q**6 + q**3))
                w = add(F, add(F, x4, x1), smul(F, beta, x8))
                reps.append((smul(F, a, plus_k(w, k)), q**6 - q**3))
    expected: dict[tuple[int, int], int] = {}
    for rep, size in reps:
        key = (int(trace(F, rep)), int(norm(F, rep)))
        expected[key] = expected.get(key, 0) + size
    return expected


def census_g2_fibers(F: FieldSpec, octs: np.ndarray | None = None) -> tuple[dict, dict]:
    """Bin all q^8 octonions by (trace, norm); returns (observed, expected)."""
    if F.q <= 2:
        raise ValueError("Lemma 2.2 requires q>2")
    if F.q**8 > ENUMERATION_BOUND:
        raise ValueError("q^8 exceeds the enumeration bound")
    octs = all_octonions(F) if octs is None else octs
    key = trace(F, octs).astype(np.int64) * F.q + norm(F, octs)
    counts = np.bincount(key, minlength=F.q * F.q)
    observed = {(t, n): int(counts[t * F.q + n]) for t in F.elements() for n in F.elements() if counts[t * F.q + n]}
    return observed, table2_expected(F)


def fiber_size_rule(F: FieldSpec, t: int, n: int) -> int:
    """Closed-form fiber size, independent of the orbit representatives."""
    q = F.q
    if q % 2:
        k = int(F.mul(t, F.inv(2)))
        disc = int(F.sub(F.mul(k, k), n))
        if disc == 0:
            return q**6
        return q**6 + q**3 if is_square(F.element(disc)) else q**6 - q**3
    if t == 0:
        return q**6
    ratio = int(F.mul(n, F.inv(F.mul(t, t))))
    return q**6 + q**3 if absolute_trace(F.element(ratio)) == 0 else q**6 - q**3


def subspace_dims_lemma23(F: FieldSpec, octs: np.ndarray | None = None) -> dict[str, object]:
    """Exhaustive annihilator dimensions over every nonzero singular D.

    Returns tallies keyed by what was measured; the caller compares against
    4/4, 3-or-1 by B(D, 1), and 3 for every DE = 0 pair.
    """
    octs = all_octonions(F) if octs is None else octs
    sing = octs[(~is_zero(octs)) & (norm(F, octs) == 0)]
    R = right_mult_matrix(F, sing)  # kernel = ann_L
    L = left_mult_matrix(F, sing)  # kernel = ann_R
    dim_l = 8 - linalg.batch_rank(F, R)
    dim_r = 8 - linalg.batch_rank(F, L)
    dim_lr = 8 - linalg.batch_rank(F, np.concatenate([R, L], axis=1))
    on_perp = trace(F, sing) == 0  # B(D, 1) = Tr(D)
    expected_lr = np.where(on_perp, 3, 1)

    # ann_R(D) enumerated per D from its canonical basis; pairs with E != 0
    pair_dims: dict[int, int] = {}
    n_pairs = 0
    batch_D, batch_E = [], []

    def flush():
        nonlocal n_pairs
        if not batch_D:
            return
        D = np.concatenate(batch_D)
        E = np.concatenate(batch_E)
        assert is_zero(mul(F, D, E)).all()
        stacked = np.concatenate([right_mult_matrix(F, D), left_mult_matrix(F, E)], axis=1)
        dims = 8 - linalg.batch_rank(F, stacked)
        for d, c in zip(*np.unique(dims, return_counts=True)):
            pair_dims[int(d)] = pair_dims.get(int(d), 0) + int(c)
        n_pairs += len(D)
        batch_D.clear()
        batch_E.clear()

    pending = 0
    for D in sing:
        ann = ann_right(Octonion.of(F, D)).elements().astype(np.uint8)
        E = ann[~is_zero(ann)]
        batch_D.append(np.broadcast_to(D, E.shape))
        batch_E.append(E)
        pending += len(E)
        if pending > 200_000:
            flush()
            pending = 0
    flush()
    return {
        "singular_count": len(sing),
        "ann_left_dims": {int(k): int(v) for k, v in zip(*np.unique(dim_l, return_counts=True))},
        "ann_right_dims": {int(k): int(v) for k, v in zip(*np.unique(dim_r, return_counts=True))},
        "intersection_ok": bool((dim_lr == expected_lr).all()),
        "intersection_dims": {int(k): int(v) for k, v in zip(*np.unique(dim_lr, return_counts=True))},
        "pair_count": n_pairs,
        "pair_dims": pair_dims,
    }


def random_octonions(F: FieldSpec, rng: np.random.Generator, n: int) -> np.ndarray:
    return rng.integers(0, F.q, size=(n, 8), dtype=np.uint8)


def basis_products() -> list[tuple[int, int]]:
    return list(itertools.product(range(1, 9), repeat=2))
