"""White vectors of U by type, the point set M_1, and the perp-slice census.

The three families of trace-zero white vectors:

* type I   f * (N(A), N(B), 1 | conj(B), A, conj(A) B),  N(A) + N(B) + 1 = 0
* type II  e * (N(C), 1, 0 | A, conj(C A), C),           N(C) = -1, N(A) = 0
* type III (0, 0, 0 | D, E, F) with N(D) = N(E) = N(F) = 0 and DE = EF = FD = 0

Each stream yields chunks of Albert elements as (n, 27) code arrays.  Every
emitted vector is checked to be trace-zero and Q_0-singular as it is made.
"""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field
from typing import Iterator

import numpy as np

from . import albert
from . import octonion as oc
from .albert import WSpace
from .galois import FieldSpec
from .pointset import PointSet, bits_per_coord, canonicalize, pack

log = logging.getLogger(__name__)

TYPES = ("I", "II", "III")
CHUNK = 1 << 18

_FIBERS: dict = {}


class CountMismatch(AssertionError):
    """A vector or point total disagrees with its closed form."""

    def __init__(self, message: str, subtotals: dict):
        super().__init__(f"{message}; per-type subtotals: {subtotals}")
        self.subtotals = subtotals


def norm_fibers(F: FieldSpec) -> dict[int, np.ndarray]:
    """{a: all octonions of norm a}, cached per field."""
    key = (F.p, F.f)
    if key not in _FIBERS:
        octs = oc.all_octonions(F)
        norms = oc.norm(F, octs)
        _FIBERS[key] = {a: octs[norms == a] for a in F.elements()}
    return _FIBERS[key]


def _check_white(F: FieldSpec, v: np.ndarray, kind: str) -> None:
    if (albert.albert_trace(F, v) != 0).any():
        raise AssertionError(f"type {kind} emitted a vector with nonzero trace")
    if (albert.q0_eval(F, v) != 0).any():
        raise AssertionError(f"type {kind} emitted a non-singular vector")


def _all_multiples(F: FieldSpec, base: np.ndarray) -> np.ndarray:
    return np.concatenate([albert.smul(F, c, base) for c in F.nonzero()])


def _pairs(X: np.ndarray, Y: np.ndarray, step: int) -> Iterator[tuple[np.ndarray, np.ndarray]]:
    """Chunks of the Cartesian product X x Y, X-major."""
    per = max(1, step // max(len(Y), 1))
    for s in range(0, len(X), per):
        xs = X[s : s + per]
        yield np.repeat(xs, len(Y), axis=0), np.tile(Y, (len(xs), 1))


def enum_type1(ws: WSpace, scale: bool = True, chunk: int = CHUNK) -> Iterator[np.ndarray]:
    F = ws.field
    fib = norm_fibers(F)
    minus_one = int(F.neg(1))
    for a in F.elements():
        for A, B in _pairs(fib[a], fib[int(F.sub(minus_one, a))], chunk):
            base = albert.make(
                F, oc.norm(F, A), oc.norm(F, B), 1, oc.conj(F, B), A, oc.mul(F, oc.conj(F, A), B)
            )
            v = _all_multiples(F, base) if scale else base
            _check_white(F, v, "I")
            yield v


def type2_e_slot(F: FieldSpec, C: np.ndarray, A: np.ndarray, bracket: str = "conj(CA)") -> np.ndarray:
    if bracket == "conj(CA)":
        return oc.conj(F, oc.mul(F, C, A))
    if bracket == "conj(C)A":
        return oc.mul(F, oc.conj(F, C), A)
    raise ValueError(f"unknown bracketing {bracket!r}")


def enum_type2(ws: WSpace, scale: bool = True, chunk: int = CHUNK, bracket: str = "conj(CA)") -> Iterator[np.ndarray]:
    F = ws.field
    fib = norm_fibers(F)
    for C, A in _pairs(fib[int(F.neg(1))], fib[0], chunk):
        base = albert.make(F, oc.norm(F, C), 1, 0, A, type2_e_slot(F, C, A, bracket), C)
        v = _all_multiples(F, base) if scale else base
        _check_white(F, v, "II")
        yield v


def _check_eq31(F: FieldSpec, D, E, Fo) -> None:
    for X in (D, E, Fo):
        assert (oc.norm(F, X) == 0).all(), "type III component is not singular"
    for X, Y in ((D, E), (E, Fo), (Fo, D)):
        assert oc.is_zero(oc.mul(F, X, Y)).all(), "type III components do not annihilate"


def enum_type3(ws: WSpace, chunk: int = CHUNK) -> Iterator[np.ndarray]:
    """All nonzero (0,0,0|D,E,F) with singular, mutually annihilating D, E, F.

    D = 0: E runs over singular octonions and F over ann_R(E) (or all singular
    F when E = 0).  D != 0: E runs over ann_R(D), F over ann_L(D), and the
    pairs with EF = 0 are kept.
    """
    F = ws.field
    sing = norm_fibers(F)[0]
    sing_nz = sing[~oc.is_zero(sing)]
    z8 = np.zeros(8, dtype=np.uint8)

    def emit(D, E, Fo):
        _check_eq31(F, D, E, Fo)
        v = albert.make(F, 0, 0, 0, D, E, Fo)
        _check_white(F, v, "III")
        return v

    # D = 0, E = 0
    yield emit(np.broadcast_to(z8, sing_nz.shape), np.broadcast_to(z8, sing_nz.shape), sing_nz)

    # D = 0, E != 0
    buf_E, buf_F, n = [], [], 0
    for E in sing_nz:
        Fs = oc.ann_right(oc.Octonion.of(F, E)).elements().astype(np.uint8)
        buf_E.append(np.broadcast_to(E, Fs.shape))
        buf_F.append(Fs)
        n += len(Fs)
        if n >= chunk:
            Es, Fs_ = np.concatenate(buf_E), np.concatenate(buf_F)
            yield emit(np.zeros_like(Es), Es, Fs_)
            buf_E, buf_F, n = [], [], 0
    if buf_E:
        Es, Fs_ = np.concatenate(buf_E), np.concatenate(buf_F)
        yield emit(np.zeros_like(Es), Es, Fs_)

    # D != 0
    bufs: list[tuple[np.ndarray, np.ndarray, np.ndarray]] = []
    n = 0
    for D in sing_nz:
        Do = oc.Octonion.of(F, D)
        Es = oc.ann_right(Do).elements().astype(np.uint8)
        Fs = oc.ann_left(Do).elements().astype(np.uint8)
        E2 = np.repeat(Es, len(Fs), axis=0)
        F2 = np.tile(Fs, (len(Es), 1))
        keep = oc.is_zero(oc.mul(F, E2, F2))
        E2, F2 = E2[keep], F2[keep]
        bufs.append((np.broadcast_to(D, E2.shape), E2, F2))
        n += len(E2)
        if n >= chunk:
            yield emit(*(np.concatenate(x) for x in zip(*bufs)))
            bufs, n = [], 0
    if bufs:
        yield emit(*(np.concatenate(x) for x in zip(*bufs)))


def m1_vector_total(q: int) -> int:
    return (q**4 + 1) * (q**12 - 1)


def m1_point_total(q: int) -> int:
    return m1_vector_total(q) // (q - 1)


def type_vector_totals(q: int) -> dict[str, int]:
    """Per-type vector counts implied by the norm-fiber sizes."""
    sing = q**7 - q**3 + q**4
    t1 = (q - 1) * (q**15 - q**7)  # pairs (A, B): N_8(-1)
    t2 = (q - 1) * (q**7 - q**3) * sing
    s = sing - 1
    t3 = s * (q**4 - 1) * (q**3 - 1) + 3 * s * (q**4 - 1) + 3 * s
    return {"I": t1, "II": t2, "III": t3}


@dataclass
class BuildResult:
    pointset: PointSet
    vectors: dict[str, int]
    points: dict[str, int]
    seconds: float
    disjoint_types: bool = field(default=True)


def build_m1(ws: WSpace, max_q: int = 3) -> BuildResult:
    """Enumerate all white vectors of U, project to W, and deduplicate points."""
    F = ws.field
    q = F.q
    if q > max_q:
        est = m1_point_total(q)
        raise MemoryError(
            f"M_1 at q={q} has {est:,} points (~{8 * est / 2**30:.0f} GiB packed); "
            f"materialization is limited to q <= {max_q}"
        )
    t0 = time.perf_counter()
    bits = bits_per_coord(q)
    vectors: dict[str, int] = {}
    per_type: dict[str, np.ndarray] = {}
    streams = {"I": enum_type1(ws), "II": enum_type2(ws), "III": enum_type3(ws)}
    for kind, stream in streams.items():
        parts = []
        total = 0
        for v in stream:
            c = canonicalize(F, ws.project(v))
            if (ws.q_eval(c) != 0).any():
                raise AssertionError(f"type {kind}: projected point is not singular")
            parts.append(np.unique(pack(c, bits)))
            total += len(v)
        vectors[kind] = total
        per_type[kind] = np.unique(np.concatenate(parts))
        del parts
        log.info("type %s: %d vectors, %d points", kind, total, len(per_type[kind]))
    points = {k: len(v) for k, v in per_type.items()}
    want = m1_vector_total(q)
    if sum(vectors.values()) != want:
        raise CountMismatch(f"vector total {sum(vectors.values())} != (q^4+1)(q^12-1) = {want}", vectors)
    codes = np.unique(np.concatenate([per_type.pop(k) for k in TYPES]))
    disjoint = len(codes) == sum(points.values())
    if len(codes) != m1_point_total(q):
        raise CountMismatch(
            f"point total {len(codes)} != (q^4+1)(q^12-1)/(q-1) = {m1_point_total(q)}", points
        )
    ps = PointSet(F.p, F.f, ws.dim, ws.basis_version, codes)
    return BuildResult(ps, vectors, points, time.perf_counter() - t0, disjoint)


# -- perp slice through <(0,0,0|x_1,0,0)> -------------------------------------------


def base_point(ws: WSpace) -> np.ndarray:
    """W coordinates of (0,0,0|x_1,0,0)."""
    return ws.project(albert.w(ws.field, 1, 0))


def slice_formulas(q: int) -> dict[str, int]:
    s6 = q**6 - q**3 + q**4 - 1  # nonzero singular D with Tr(x1 conj D) = 0
    s7 = (q**3 + 1) * (q**4 - 1)  # nonzero singular octonions
    qq = q - 1
    return {
        "I": q**7 * (q**7 - 1),
        "II": (q**7 - q**3) * (q**6 - q**3 + q**4),
        "III.1": (q**4 - 1) // qq * s6 * (q**3 - 1),
        "III.2[F=0]": s6 * (q**4 - 1),
        "III.2[E=0]": s6 * (q**4 - 1),
        "III.2[D=0]": s7 * (q**4 - 1),
        "III.2": (q**4 - 1) // qq * (2 * s6 + s7),
        "III.3[D]": s6,
        "III.3[E]": s7,
        "III.3[F]": s7,
        "III.3": (s6 + 2 * s7) // qq,
        "total": q**11 + (q**4 + 1) * (q**11 - 1) // qq,
    }


@dataclass
class SliceRow:
    name: str
    enumerated: int
    formula: int
    unit: str

    @property
    def ok(self) -> bool:
        return self.enumerated == self.formula


def perp_slice_census(ws: WSpace) -> list[SliceRow]:
    """Count white points perpendicular to the base point, by type and case.

    Perpendicularity is decided with the Gram form of W on projected
    coordinates.  Types I and II are counted as parameter pairs (scalar fixed
    to 1); type III as vectors, with the case totals converted to points.
    Sub-rows marked [..] are vector counts for the sub-case named.
    """
    F = ws.field
    q = F.q
    if q > 3:
        raise ValueError("perp slice census is limited to q in {2, 3}")
    t = albert.gram_apply(F, ws.gram, base_point(ws))

    def perp(v):
        return albert.dot(F, ws.project(v), t) == 0

    counts = {k: 0 for k in ("I", "II")}
    for v in enum_type1(ws, scale=False):
        counts["I"] += int(perp(v).sum())
    for v in enum_type2(ws, scale=False):
        counts["II"] += int(perp(v).sum())
    sub = {k: 0 for k in ("III.1", "III.2[F=0]", "III.2[E=0]", "III.2[D=0]", "III.3[D]", "III.3[E]", "III.3[F]")}
    for v in enum_type3(ws):
        m = perp(v)
        nzD = ~oc.is_zero(v[:, albert.D_SLOT])
        nzE = ~oc.is_zero(v[:, albert.E_SLOT])
        nzF = ~oc.is_zero(v[:, albert.F_SLOT])
        k = nzD.astype(int) + nzE + nzF
        sub["III.1"] += int((m & (k == 3)).sum())
        sub["III.2[F=0]"] += int((m & (k == 2) & ~nzF).sum())
        sub["III.2[E=0]"] += int((m & (k == 2) & ~nzE).sum())
        sub["III.2[D=0]"] += int((m & (k == 2) & ~nzD).sum())
        sub["III.3[D]"] += int((m & (k == 1) & nzD).sum())
        sub["III.3[E]"] += int((m & (k == 1) & nzE).sum())
        sub["III.3[F]"] += int((m & (k == 1) & nzF).sum())

    def points(n: int) -> int:
        assert n % (q - 1) == 0, "type III vector count not divisible by q-1"
        return n // (q - 1)

    c2 = sub["III.2[F=0]"] + sub["III.2[E=0]"] + sub["III.2[D=0]"]
    c3 = sub["III.3[D]"] + sub["III.3[E]"] + sub["III.3[F]"]
    observed = {
        "I": counts["I"],
        "II": counts["II"],
        "III.1": points(sub["III.1"]),
        "III.2[F=0]": sub["III.2[F=0]"],
        "III.2[E=0]": sub["III.2[E=0]"],
        "III.2[D=0]": sub["III.2[D=0]"],
        "III.2": points(c2),
        "III.3[D]": sub["III.3[D]"],
        "III.3[E]": sub["III.3[E]"],
        "III.3[F]": sub["III.3[F]"],
        "III.3": points(c3),
    }
    observed["total"] = (
        observed["I"] + observed["II"] + observed["III.1"] + observed["III.2"] + observed["III.3"]
    )
    formulas = slice_formulas(q)
    units = {"I": "pairs (A,B)", "II": "pairs (A,C)", "total": "points"}
    rows = []
    for name, val in observed.items():
        unit = units.get(name, "vectors" if "[" in name else "points")
        rows.append(SliceRow(name, val, formulas[name], unit))
    return rows
