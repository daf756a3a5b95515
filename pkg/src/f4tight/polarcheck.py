"""Polar-space parameters and the tight-set verification engine.

The certificate for an i-tight set M is that |P^perp n M| = h1 for every
P in M; nonmember sampling (value h2) is corroborating evidence only.
Perp counts run through the packed-code kernels in :mod:`f4tight._kernels`.
"""

from __future__ import annotations

import time
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from . import _kernels, linalg
from .albert import dot, gram_apply
from .galois import FieldSpec, field_from_order
from .pointset import PointSet, bits_per_coord, canonicalize, pack, unpack

FAMILIES = ("W", "Q+", "Q-", "Q", "H")
FULL_BUDGET = 10**5
NONMEMBER_RETRIES = 10**4


# -- Table 1 -------------------------------------------------------------------------


@dataclass(frozen=True)
class PolarParams:
    family: str
    d: int
    q: int
    rank: int
    ovoid_number: int

    @property
    def point_count(self) -> int:
        return self.ovoid_number * (self.q**self.rank - 1) // (self.q - 1)

    @property
    def generator_size(self) -> int:
        return (self.q**self.rank - 1) // (self.q - 1)

    @property
    def ovoid_number_below(self) -> int:
        """Ovoid number of the rank r-1 space of the same type."""
        return (self.ovoid_number - 1) // self.q + 1


def _sqrt_int(q: int) -> int:
    s = int(round(q**0.5))
    assert s * s == q
    return s


def polar_params(family: str, d: int, q: int) -> PolarParams:
    """Rank and ovoid number of the polar space of the given family on F_q^d."""
    F = field_from_order(q)
    if family not in FAMILIES:
        raise ValueError(f"unknown family {family!r}; expected one of {FAMILIES}")
    even = d % 2 == 0
    if family == "W":
        if not even:
            raise ValueError("W(d-1,q) requires d even")
        r, theta = d // 2, q ** (d // 2) + 1
    elif family == "Q+":
        if not even:
            raise ValueError("Q+(d-1,q) requires d even")
        r, theta = d // 2, q ** (d // 2 - 1) + 1
    elif family == "Q-":
        if not even:
            raise ValueError("Q-(d-1,q) requires d even")
        r, theta = d // 2 - 1, q ** (d // 2) + 1
    elif family == "Q":
        if even:
            raise ValueError("Q(d-1,q) requires d odd")
        r, theta = (d - 1) // 2, q ** ((d - 1) // 2) + 1
    else:
        if F.f % 2:
            raise ValueError("H(d-1,q) requires q to be a square (f even)")
        s = _sqrt_int(q)
        if even:
            r, theta = d // 2, s ** (d - 1) + 1
        else:
            r, theta = (d - 1) // 2, s**d + 1
    if r < 1:
        raise ValueError(f"{family} with d={d} has rank {r} < 1")
    return PolarParams(family, d, q, r, theta)


@dataclass(frozen=True)
class TightTarget:
    i: int
    q: int
    rank: int

    @property
    def set_size(self) -> int:
        return self.i * (self.q**self.rank - 1) // (self.q - 1)

    @property
    def h2(self) -> int:
        return self.i * (self.q ** (self.rank - 1) - 1) // (self.q - 1)

    @property
    def h1(self) -> int:
        return self.q ** (self.rank - 1) + self.h2


@dataclass(frozen=True)
class OvoidTarget:
    m: int
    params: PolarParams

    @property
    def set_size(self) -> int:
        return self.m * self.params.ovoid_number

    @property
    def h1(self) -> int:
        return (self.m - 1) * self.params.ovoid_number_below + 1

    @property
    def h2(self) -> int:
        return self.m * self.params.ovoid_number_below


def tight_target(i: int, params: PolarParams) -> TightTarget:
    if i < 1:
        raise ValueError("tight parameter i must be >= 1")
    return TightTarget(i, params.q, params.rank)


def ovoid_target(m: int, params: PolarParams) -> OvoidTarget:
    if m < 1:
        raise ValueError("m must be >= 1")
    return OvoidTarget(m, params)


@dataclass(frozen=True)
class SizeHypothesis:
    tight_i: int | None
    ovoid_m: int | None


def classify_size(n: int, params: PolarParams) -> SizeHypothesis:
    q, r = params.q, params.rank
    tight = n * (q - 1) // (q**r - 1) if n * (q - 1) % (q**r - 1) == 0 else None
    ovoid = n // params.ovoid_number if n % params.ovoid_number == 0 else None
    return SizeHypothesis(tight, ovoid)


# -- quadratic / alternating spaces ----------------------------------------------------


@dataclass(frozen=True, eq=False)
class FormSpace:
    """F_q^dim with a Gram matrix and (unless alternating) a quadratic form.

    ``q_terms`` lists (i, j, c) with i <= j for Q(x) = sum c x_i x_j; ``None``
    means every vector is isotropic (symplectic space).
    """

    field: FieldSpec
    dim: int
    gram: np.ndarray
    q_terms: tuple | None
    family: str
    basis_version: str

    @property
    def q(self) -> int:
        return self.field.q

    @property
    def params(self) -> PolarParams:
        return polar_params(self.family, self.dim, self.q)

    @property
    def bits(self) -> int:
        return bits_per_coord(self.q)

    def q_eval(self, c) -> np.ndarray:
        F = self.field
        c = np.asarray(c, dtype=np.uint8)
        acc = np.zeros(c.shape[:-1], dtype=np.uint8)
        if self.q_terms is None:
            return acc
        for i, j, k in self.q_terms:
            acc = F.add_t[acc, F.mul_t[k, F.mul_t[c[..., i], c[..., j]]]]
        return acc

    def b_eval(self, c, d) -> np.ndarray:
        return dot(self.field, c, gram_apply(self.field, self.gram, d))

    def empty(self) -> PointSet:
        return PointSet(self.field.p, self.field.f, self.dim, self.basis_version, np.zeros(0, np.uint64))

    def pointset(self, codes) -> PointSet:
        return PointSet.from_codes(self.field, self.dim, self.basis_version, codes)

    def check(self, S: PointSet) -> None:
        if (S.p, S.f, S.dim, S.basis) != (self.field.p, self.field.f, self.dim, self.basis_version):
            raise ValueError(
                f"point set ({S.basis}, dim {S.dim}, q={S.q}) does not live in "
                f"this space ({self.basis_version}, dim {self.dim}, q={self.q})"
            )

    def all_points(self, limit: int = 10**6) -> PointSet:
        """Every singular projective point, by enumerating canonical vectors."""
        q, n = self.q, self.dim
        total = (q**n - 1) // (q - 1)
        if total > limit:
            raise ValueError(f"{total} projective points exceed the enumeration limit {limit}")
        codes = []
        for lead in range(n):
            # canonical vectors: zeros before `lead`, 1 at `lead`, anything after
            tail = n - lead - 1
            idx = np.arange(q**tail, dtype=np.int64)
            C = np.zeros((len(idx), n), dtype=np.uint8)
            C[:, lead] = 1
            for j in range(tail):
                C[:, lead + 1 + j] = (idx // q**j) % q
            C = C[self.q_eval(C) == 0]
            codes.append(pack(C, self.bits))
        return self.pointset(np.concatenate(codes))


def _gram_from_terms(F: FieldSpec, n: int, terms) -> np.ndarray:
    G = np.zeros((n, n), dtype=np.uint8)
    for i, j, c in terms:
        if i == j:
            G[i, i] = F.add_t[G[i, i], F.mul_t[c, F.from_int(2)]]
        else:
            G[i, j] = F.add_t[G[i, j], c]
            G[j, i] = F.add_t[G[j, i], c]
    return G


def _irreducible_binary(F: FieldSpec) -> tuple[int, int]:
    """(b, c) with x^2 + b x y + c y^2 anisotropic over F_q."""
    for b in F.elements():
        for c in F.nonzero():
            if all(int(F.add(F.add(F.mul(x, x), F.mul(b, x)), c)) != 0 for x in F.elements()):
                return b, c
    raise AssertionError("no anisotropic binary form found")


def standard_space(family: str, d: int, q: int) -> FormSpace:
    """Standard forms for small test spaces.

    W:  sum x_{2i} y_{2i+1} - x_{2i+1} y_{2i}
    Q+: sum x_{2i} x_{2i+1}
    Q:  x_0^2 + sum x_{2i-1} x_{2i}
    Q-: sum x_{2i} x_{2i+1} + (x^2 + b x y + c y^2) on the last two coordinates
    """
    F = field_from_order(q)
    polar_params(family, d, q)
    tag = f"std-{family}-{d}"
    if family == "W":
        G = np.zeros((d, d), dtype=np.uint8)
        for i in range(0, d, 2):
            G[i, i + 1] = 1
            G[i + 1, i] = F.neg(1)
        return FormSpace(F, d, G, None, family, tag)
    if family == "Q+":
        terms = [(i, i + 1, 1) for i in range(0, d, 2)]
    elif family == "Q":
        terms = [(0, 0, 1)] + [(i, i + 1, 1) for i in range(1, d, 2)]
    elif family == "Q-":
        b, c = _irreducible_binary(F)
        terms = [(i, i + 1, 1) for i in range(0, d - 2, 2)]
        terms += [(d - 2, d - 2, 1), (d - 1, d - 1, c)]
        if b:
            terms.append((d - 2, d - 1, b))
    else:
        raise ValueError("Hermitian spaces are parameter-only")
    terms = [(i, j, int(k)) for i, j, k in terms]
    return FormSpace(F, d, _gram_from_terms(F, d, terms), tuple(terms), family, tag)


# -- perp counting -----------------------------------------------------------------------


def perp_counts(points: np.ndarray, S: PointSet, space: FormSpace) -> np.ndarray:
    """|{z in S : B(P, z) = 0}| for each packed point P."""
    space.check(S)
    F = space.field
    points = np.atleast_1d(np.asarray(points, dtype=np.uint64))
    P = unpack(points, space.dim, space.bits)
    T = gram_apply(F, space.gram, P)
    if F.q == 2:
        return _kernels.perp_counts_q2(pack(T, 1), S.codes)
    if F.q == 3:
        even = np.uint64(int("01" * space.dim, 2))
        t1 = pack((T == 1).astype(np.uint8), 2)
        t2 = pack((T == 2).astype(np.uint8), 2)
        return _kernels.perp_counts_p3(t1, t2, S.codes, even)
    return _kernels.perp_counts_generic(
        T, S.codes, space.bits, F.add_t.astype(np.int64), F.mul_t.astype(np.int64)
    )


def perp_counts_reference(points: np.ndarray, S: PointSet, space: FormSpace) -> np.ndarray:
    """Same as :func:`perp_counts` but with plain numpy table arithmetic."""
    space.check(S)
    F = space.field
    Z = S.decode()
    out = []
    for code in np.atleast_1d(np.asarray(points, dtype=np.uint64)):
        P = unpack(code, space.dim, space.bits)
        t = gram_apply(F, space.gram, P)
        out.append(int((dot(F, Z, t) == 0).sum()))
    return np.array(out, dtype=np.int64)


def perp_count(P: int, S: PointSet, space: FormSpace) -> int:
    return int(perp_counts(np.array([P], dtype=np.uint64), S, space)[0])


# -- verification --------------------------------------------------------------------------


MODES = ("full", "member_sample", "nonmember_sample")


@dataclass
class TightReport:
    mode: str
    expected: int
    checked: int
    histogram: dict[int, int]
    wall_time: float
    seed: int | None = None
    samples: np.ndarray | None = field(default=None, repr=False)

    @property
    def passed(self) -> bool:
        return self.checked > 0 and set(self.histogram) == {self.expected}

    def as_dict(self) -> dict:
        return {
            "mode": self.mode,
            "expected": self.expected,
            "checked": self.checked,
            "histogram": {str(k): v for k, v in sorted(self.histogram.items())},
            "pass": self.passed,
            "wall_time": round(self.wall_time, 3),
            "seed": self.seed,
        }


def random_nonmembers(S: PointSet, space: FormSpace, n: int, seed: int, retries: int = NONMEMBER_RETRIES) -> np.ndarray:
    """n distinct uniformly random singular points outside S (rejection sampling)."""
    F = space.field
    rng = np.random.default_rng(seed)
    found: list[int] = []
    seen: set[int] = set()
    trials = 0
    batch = max(256, 4 * n * F.q)
    while len(found) < n:
        if trials > retries * n:
            raise RuntimeError(f"found only {len(found)} of {n} nonmembers after {trials} trials")
        V = rng.integers(0, F.q, size=(batch, space.dim), dtype=np.uint8)
        trials += batch
        V = V[V.any(axis=1)]
        V = V[space.q_eval(V) == 0]
        if not len(V):
            continue
        codes = pack(canonicalize(F, V), space.bits)
        codes = codes[~S.contains(codes)]
        for c in codes.tolist():
            if c not in seen:
                seen.add(c)
                found.append(c)
                if len(found) == n:
                    break
    return np.array(found, dtype=np.uint64)


def verify_tight(
    S: PointSet,
    target: TightTarget | OvoidTarget,
    space: FormSpace,
    mode: str = "full",
    sample_size: int = 100,
    seed: int | None = None,
    budget: int = FULL_BUDGET,
) -> TightReport:
    """Histogram of perp counts for members (h1 expected) or nonmembers (h2)."""
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}")
    if not len(S):
        raise ValueError("empty point set")
    space.check(S)
    t0 = time.perf_counter()
    if mode == "full":
        if len(S) > budget:
            raise ValueError(f"full mode needs |S| <= {budget}, got {len(S)}")
        pts = S.codes
        expected = target.h1
    else:
        if seed is None:
            raise ValueError("sampled modes need an explicit seed")
        if mode == "member_sample":
            rng = np.random.default_rng(seed)
            pts = S.codes[np.sort(rng.choice(len(S), size=min(sample_size, len(S)), replace=False))]
            expected = target.h1
        else:
            pts = random_nonmembers(S, space, sample_size, seed)
            expected = target.h2
    counts = perp_counts(pts, S, space)
    hist = dict(Counter(counts.tolist()))
    return TightReport(mode, expected, len(pts), hist, time.perf_counter() - t0, seed, pts)


def intriguing_profile(S: PointSet, space: FormSpace) -> tuple[dict[int, int], dict[int, int]]:
    """Perp-count histograms over all members and all nonmembers (small spaces)."""
    everything = space.all_points()
    counts = perp_counts(everything.codes, S, space)
    inside = S.contains(everything.codes)
    return dict(Counter(counts[inside].tolist())), dict(Counter(counts[~inside].tolist()))


# -- singular census -------------------------------------------------------------------------


@dataclass(frozen=True)
class SingularCensus:
    points: int
    elliptic: int
    hyperbolic: int
    seconds: float

    @property
    def is_elliptic(self) -> bool:
        return self.points == self.elliptic


def singular_points_q2(space: FormSpace) -> int:
    """Projective singular points of a quadratic form over F_2 (all 2^dim vectors)."""
    if space.q != 2 or space.q_terms is None:
        raise ValueError("the packed singular census needs a quadratic form over F_2")
    n = space.dim
    rows = np.array([int(pack(space.gram[i], 1)) for i in range(n)], dtype=np.uint64)
    qdiag = np.zeros(n, dtype=np.uint64)
    for i, j, c in space.q_terms:
        if i == j:
            qdiag[i] ^= np.uint64(c & 1)
    return int(_kernels.singular_vectors_q2(rows, qdiag, n))


def singular_census(ws) -> SingularCensus:
    """Count singular points of (W, Q) at q = 2 against both Table 1 candidates."""
    space = ws.form_space() if hasattr(ws, "form_space") else ws
    if space.q != 2:
        raise ValueError(f"singular census enumerates 2^dim vectors; q={space.q} is out of reach")
    t0 = time.perf_counter()
    n = singular_points_q2(space)
    ell = polar_params("Q-", space.dim, 2).point_count
    hyp = polar_params("Q+", space.dim, 2).point_count
    return SingularCensus(n, ell, hyp, time.perf_counter() - t0)


# -- set algebra and generators -----------------------------------------------------------------


def combine_union(a: PointSet, b: PointSet) -> PointSet:
    if not a.same_space(b):
        raise ValueError("point sets live in different spaces")
    if np.intersect1d(a.codes, b.codes).size:
        raise ValueError("union requires disjoint point sets")
    return a.with_codes(np.union1d(a.codes, b.codes))


def combine_difference(a: PointSet, b: PointSet) -> PointSet:
    """b minus a, for a contained in b."""
    if not a.same_space(b):
        raise ValueError("point sets live in different spaces")
    if not b.contains(a.codes).all():
        raise ValueError("difference requires a to be a subset of b")
    return b.with_codes(np.setdiff1d(b.codes, a.codes))


def _span_points(F: FieldSpec, basis: list[np.ndarray], bits: int) -> np.ndarray:
    sub = linalg.span(F, [list(map(int, v)) for v in basis], len(basis[0]))
    els = sub.elements().astype(np.uint8)
    els = els[els.any(axis=1)]
    return np.unique(pack(canonicalize(F, els), bits))


def find_generator(space: FormSpace, seed: int = 0, avoid: PointSet | None = None, attempts: int = 1000) -> PointSet:
    """Greedy maximal totally singular subspace, returned as its point set.

    Points are visited in a seeded random order; a point joins when it is
    perpendicular to everything chosen so far and outside their span.  With
    ``avoid`` the search is retried with fresh orders until the generator
    misses that set.
    """
    F = space.field
    r = space.params.rank
    pts = space.all_points()
    coords = pts.decode()
    rng = np.random.default_rng(seed)
    for _ in range(attempts):
        order = rng.permutation(len(coords))
        chosen: list[np.ndarray] = []
        for k in order:
            c = coords[k]
            if any(int(space.b_eval(c, b)) for b in chosen):
                continue
            if chosen and linalg.span(F, [list(map(int, v)) for v in chosen + [c]], space.dim).dim == len(chosen):
                continue
            chosen.append(c)
            if len(chosen) == r:
                break
        assert len(chosen) == r, "greedy extension stopped below the rank"
        gen = space.pointset(_span_points(F, chosen, space.bits))
        if avoid is None or not np.intersect1d(gen.codes, avoid.codes).size:
            return gen
    raise RuntimeError("no generator disjoint from the given set was found")
