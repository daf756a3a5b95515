import numpy as np
import pytest

from f4tight import albert, polarcheck, whiteset
from f4tight import octonion as oc
from f4tight.galois import field_from_order
from f4tight.pointset import point_codes


@pytest.fixture(scope="module")
def ws2():
    return albert.wspace_make(field_from_order(2))


def _all(stream):
    return np.concatenate(list(stream))


def test_type_counts_q2(ws2):
    F = ws2.field
    octs = oc.all_octonions(F)
    n = oc.norm(F, octs).astype(np.int64)
    # direct double loop over all 256 x 256 octonion pairs
    assert sum(len(v) for v in whiteset.enum_type1(ws2)) == int(((n[:, None] + n[None, :] + 1) % 2 == 0).sum()) == 32640
    assert sum(len(v) for v in whiteset.enum_type2(ws2)) == 120 * 136 == 16320
    assert whiteset.type_vector_totals(2) == {"I": 32640, "II": 16320, "III": 20655}


def test_type3_against_brute_force(ws2):
    """All (D, E, F) with the six conditions, by a filtered triple loop."""
    F = ws2.field
    octs = oc.all_octonions(F)
    sing = octs[oc.norm(F, octs) == 0]  # the norm conditions prune 256 -> 136 per slot
    k = len(sing)
    DE = oc.is_zero(oc.mul(F, sing[:, None], sing[None, :]))  # DE[i, j]: s_i s_j = 0
    i, j, l = np.nonzero(DE[:, :, None] & DE[None, :, :] & DE.T[:, None, :])
    brute = albert.make(F, 0, 0, 0, sing[i], sing[j], sing[l])
    brute = brute[brute.any(axis=1)]
    got = _all(whiteset.enum_type3(ws2))
    assert len(got) == len(brute) == 20655
    key = lambda a: np.sort(a.astype(np.int64) @ (1 << np.arange(27, dtype=np.int64)))  # noqa: E731
    assert np.array_equal(key(got), key(brute))
    assert k == 136


def test_base_vector_in_type3(ws2):
    got = _all(whiteset.enum_type3(ws2))
    assert (got == albert.w(ws2.field, 1, 0)).all(axis=1).any()


@pytest.mark.parametrize("q", (2, 3))
def test_types_split_by_scalar_signature(q):
    ws = albert.wspace_make(field_from_order(q))
    for v in whiteset.enum_type1(ws, scale=True, chunk=1 << 14):
        assert (v[:, albert.S2] != 0).all()
        break
    for v in whiteset.enum_type2(ws, chunk=1 << 14):
        assert (v[:, albert.S2] == 0).all() and (v[:, albert.S1] != 0).all()
        break
    for v in whiteset.enum_type3(ws):
        assert (v[:, :3] == 0).all()


def test_build_m1_q2(ws2):
    res = whiteset.build_m1(ws2)
    S = res.pointset
    assert len(S) == 69615 == whiteset.m1_point_total(2)
    assert res.vectors == whiteset.type_vector_totals(2)
    assert res.disjoint_types
    C = S.decode()
    assert (ws2.q_eval(C) == 0).all()
    assert (C[np.arange(len(C)), (C != 0).argmax(axis=1)] == 1).all()
    assert whiteset.build_m1(ws2).pointset == S


def test_build_m1_refuses_large_q():
    with pytest.raises(MemoryError):
        whiteset.build_m1(albert.wspace_make(field_from_order(5)))


def test_point_totals_formula():
    assert whiteset.m1_point_total(3) == 21_789_040
    for q in (2, 3, 4, 5, 8, 9):
        assert sum(whiteset.type_vector_totals(q).values()) == whiteset.m1_vector_total(q)


def test_slice_census_q2(ws2):
    rows = {r.name: r for r in whiteset.perp_slice_census(ws2)}
    assert all(r.ok for r in rows.values()), [r for r in rows.values() if not r.ok]
    assert rows["I"].enumerated == 16256
    assert rows["total"].enumerated == 36847
    S = whiteset.build_m1(ws2).pointset
    base = point_codes(ws2.field, whiteset.base_point(ws2)[None])[0]
    assert polarcheck.perp_count(base, S, ws2.form_space()) == 36847


def test_slice_formulas_q3():
    assert whiteset.slice_formulas(3)["total"] == 7_440_133


def test_other_bracketing_is_not_tight(ws2):
    """conj(C) A also gives white vectors, but the resulting set is not tight."""
    F = ws2.field
    sp = ws2.form_space()
    parts = [whiteset.enum_type1(ws2), whiteset.enum_type2(ws2, bracket="conj(C)A"), whiteset.enum_type3(ws2)]
    S = sp.pointset(np.concatenate([point_codes(F, ws2.project(v)) for it in parts for v in it]))
    target = polarcheck.tight_target(17, sp.params)
    rep = polarcheck.verify_tight(S, target, sp, "member_sample", 300, seed=5)
    assert not rep.passed and len(rep.histogram) > 1
    with pytest.raises(ValueError):
        whiteset.type2_e_slot(F, oc.identity(F), oc.identity(F), bracket="C(A)")


def test_count_mismatch_carries_subtotals():
    err = whiteset.CountMismatch("bad", {"I": 1})
    assert isinstance(err, AssertionError) and err.subtotals == {"I": 1}
