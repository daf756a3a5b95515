import numpy as np
import pytest

from f4tight import _kernels, albert, polarcheck as pc
from f4tight.galois import field_from_order
from f4tight.pointset import PointSet


def test_polar_params_examples():
    p = pc.polar_params("Q-", 26, 2)
    assert (p.rank, p.ovoid_number, p.point_count) == (12, 8193, 33_550_335)
    p = pc.polar_params("Q", 25, 3)
    assert (p.rank, p.ovoid_number) == (12, 3**12 + 1)
    p = pc.polar_params("Q-", 6, 2)
    assert (p.rank, p.ovoid_number, p.point_count) == (2, 9, 27)
    assert pc.polar_params("H", 4, 4).ovoid_number == 2**3 + 1
    assert pc.polar_params("H", 5, 4).ovoid_number == 2**5 + 1


@pytest.mark.parametrize(
    "family, d, q", [("Q", 26, 3), ("Q-", 25, 2), ("W", 5, 2), ("Q+", 7, 2), ("H", 4, 2), ("X", 4, 2), ("Q-", 2, 2)]
)
def test_polar_params_rejects(family, d, q):
    with pytest.raises(ValueError):
        pc.polar_params(family, d, q)


@pytest.mark.parametrize("q", (2, 3, 4, 5))
def test_ovoid_number_recursion(q):
    for family in pc.FAMILIES:
        if family == "H" and q not in (4,):
            continue
        for d in range(3, 14):
            try:
                hi = pc.polar_params(family, d, q)
                lo = pc.polar_params(family, d - 2, q)
            except ValueError:
                continue
            assert hi.rank == lo.rank + 1
            assert hi.ovoid_number - 1 == q * (lo.ovoid_number - 1)
            assert hi.ovoid_number_below == lo.ovoid_number


def test_tight_targets():
    t = pc.tight_target(17, pc.polar_params("Q-", 26, 2))
    assert (t.set_size, t.h1, t.h2) == (69615, 36847, 34799)
    t = pc.tight_target(82, pc.polar_params("Q", 25, 3))
    assert (t.set_size, t.h1, t.h2) == (21_789_040, 7_440_133, 7_262_986)
    for q in (2, 3, 4):
        params = pc.polar_params("Q+", 8, q)
        t = pc.tight_target(1, params)
        assert t.h1 - t.h2 == q ** (params.rank - 1)
    with pytest.raises(ValueError):
        pc.tight_target(0, params)
    o = pc.ovoid_target(1, pc.polar_params("Q-", 6, 2))
    assert (o.set_size, o.h1, o.h2) == (9, 1, 5)


def test_classify_size():
    params = pc.polar_params("Q-", 26, 2)
    h = pc.classify_size(69615, params)
    assert h.tight_i == 17 and h.ovoid_m is None
    assert pc.classify_size(params.ovoid_number, params).ovoid_m == 1
    assert pc.classify_size(params.generator_size, params).tight_i == 1
    assert pc.classify_size(7, params) == pc.SizeHypothesis(None, None)


@pytest.mark.parametrize("family, d, q", [("Q-", 6, 2), ("Q+", 6, 2), ("Q", 5, 3), ("W", 4, 2), ("Q-", 6, 3), ("Q", 5, 4), ("Q-", 4, 5)])
def test_standard_spaces_have_table_point_counts(family, d, q):
    sp = pc.standard_space(family, d, q)
    assert len(sp.all_points()) == sp.params.point_count


def _space_and_generator(family, d, q, seed=0):
    sp = pc.standard_space(family, d, q)
    return sp, pc.find_generator(sp, seed=seed)


@pytest.mark.parametrize("family, d, q", [("Q-", 6, 2), ("W", 4, 2), ("Q", 5, 3), ("Q+", 6, 3)])
def test_generators_are_one_tight(family, d, q):
    sp, G = _space_and_generator(family, d, q)
    assert len(G) == sp.params.generator_size
    rep = pc.verify_tight(G, pc.tight_target(1, sp.params), sp)
    assert rep.passed and rep.histogram == {rep.expected: len(G)}


def test_perp_count_basics():
    sp, G = _space_and_generator("Q-", 6, 2)
    P = int(G.codes[0])
    assert pc.perp_count(P, G.with_codes([P]), sp) == 1
    other = pc.standard_space("Q+", 6, 2)
    with pytest.raises(ValueError):
        pc.perp_count(P, other.pointset(G.codes), sp)


@pytest.mark.parametrize("family, d, q", [("Q-", 8, 2), ("Q", 7, 3), ("Q-", 6, 4), ("Q", 5, 5), ("W", 6, 3)])
def test_kernels_match_reference(family, d, q):
    sp = pc.standard_space(family, d, q)
    pts = sp.all_points()
    rng = np.random.default_rng(d + q)
    S = pts.with_codes(np.sort(rng.choice(pts.codes, size=len(pts) // 3, replace=False)))
    probe = pts.codes[rng.choice(len(pts), 40, replace=False)]
    want = pc.perp_counts_reference(probe, S, sp)
    assert (pc.perp_counts(probe, S, sp) == want).all()
    # storage order and thread count do not matter
    n = _kernels.set_threads(None)
    _kernels.set_threads(1)
    assert (pc.perp_counts(probe[::-1], S, sp) == want[::-1]).all()
    _kernels.set_threads(n)


def test_lemma21_smoke():
    sp, G = _space_and_generator("Q-", 6, 2)
    t = pc.tight_target(1, sp.params)
    members, nonmembers = pc.intriguing_profile(G, sp)
    assert members == {t.h1: len(G)}
    assert nonmembers == {t.h2: sp.params.point_count - len(G)}
    # three pairwise non-collinear points: same size, not tight
    pts = sp.all_points()
    chosen = []
    for c in pts.codes:
        if all(pc.perp_count(int(c), pts.with_codes([x]), sp) == 0 for x in chosen):
            chosen.append(int(c))
        if len(chosen) == 3:
            break
    T = pts.with_codes(sorted(chosen))
    assert not pc.verify_tight(T, t, sp).passed


def _mutations(sp, S):
    """One point removed, and one point swapped for an outside point."""
    pts = sp.all_points()
    outside = pts.codes[~S.contains(pts.codes)]
    yield S.with_codes(S.codes[1:])
    yield S.with_codes(np.sort(np.append(S.codes[1:], outside[0])))


@pytest.mark.parametrize("family, d, q", [("Q-", 6, 2), ("W", 4, 2), ("Q", 5, 3)])
def test_unions_and_mutations(family, d, q):
    sp, A = _space_and_generator(family, d, q)
    B = pc.find_generator(sp, seed=1, avoid=A)
    U = pc.combine_union(A, B)
    assert len(U) == 2 * sp.params.generator_size
    assert pc.verify_tight(U, pc.tight_target(2, sp.params), sp).passed
    assert pc.combine_difference(A, U) == B
    for i, S in ((1, A), (2, U)):
        for bad in _mutations(sp, S):
            rep = pc.verify_tight(bad, pc.tight_target(i, sp.params), sp)
            assert not rep.passed
    with pytest.raises(ValueError):
        pc.combine_union(A, U)
    with pytest.raises(ValueError):
        pc.combine_difference(U, A)


def test_verify_guards():
    sp, G = _space_and_generator("Q-", 6, 2)
    t = pc.tight_target(1, sp.params)
    with pytest.raises(ValueError):
        pc.verify_tight(G.with_codes([]), t, sp)
    with pytest.raises(ValueError):
        pc.verify_tight(G, t, sp, "member_sample")
    with pytest.raises(ValueError):
        pc.verify_tight(G, t, sp, "bogus")
    with pytest.raises(ValueError):
        pc.verify_tight(G, t, sp, budget=2)
    rep = pc.verify_tight(G, t, sp, "nonmember_sample", 10, seed=3)
    assert rep.passed and rep.checked == 10 and not G.contains(rep.samples).any()
    again = pc.verify_tight(G, t, sp, "nonmember_sample", 10, seed=3)
    assert np.array_equal(rep.samples, again.samples)
    full = sp.pointset(sp.all_points().codes)
    with pytest.raises(RuntimeError):
        pc.random_nonmembers(full, sp, 1, seed=0, retries=2)


def test_singular_census_q2():
    ws = albert.wspace_make(field_from_order(2))
    c = pc.singular_census(ws)
    assert c.points == 33_550_335 and c.is_elliptic and c.hyperbolic == 33_558_527
    with pytest.raises(ValueError):
        pc.singular_census(albert.wspace_make(field_from_order(3)))
    sp = pc.standard_space("Q+", 8, 2)
    assert pc.singular_points_q2(sp) == len(sp.all_points())
