"""Acceptance criteria 1-8, one test each.

Every test records a PASS/FAIL line (shown in the terminal summary) before
asserting, so a red criterion still reports what it observed.
"""

import contextlib
import io
import json
import resource
import time

import numpy as np
import pytest

from f4tight import albert, cli, polarcheck, whiteset
from f4tight import octonion as oc
from f4tight.galois import field_from_order
from f4tight.linalg import MatrixFq, rank
from f4tight.pointset import PointSet, point_codes

N_RANDOM = 10_000


def run_cli(*argv):
    buf = io.StringIO()
    with contextlib.redirect_stdout(buf):
        code = cli.main([*argv, "--report", "structured"])
    return code, json.loads(buf.getvalue())


def observed(doc):
    return {c["name"]: c["observed"] for c in doc["checks"]}


@pytest.fixture(scope="session")
def m1_files(tmp_path_factory):
    """cmd_construct at q = 2 and q = 3, run once per session."""
    root = tmp_path_factory.mktemp("m1")
    out = {}
    for q in (2, 3):
        path = root / f"m1_q{q}.tsb"
        t0 = time.perf_counter()
        code, doc = run_cli("construct", "--q", str(q), "--out", str(path))
        out[q] = (path, code, doc, time.perf_counter() - t0)
    return out


def test_criterion_1_full_certificate_q2(m1_files, acceptance):
    path, code, doc, _ = m1_files[2]
    points = observed(doc)["points"]
    t0 = time.perf_counter()
    vcode, vdoc = run_cli("verify", "--in", str(path), "--mode", "full", "--nonmember-samples", "1000", "--seed", "2024")
    secs = time.perf_counter() - t0
    full, non = vdoc["checks"][1], vdoc["checks"][2]
    ok = (
        code == 0 and points == 69615 and vcode == 0
        and full["observed"] == {"36847": 69615}
        and non["observed"] == {"34799": 1000}
        and secs <= 600
    )
    acceptance(1, ok, f"|M_1|={points}, members {full['observed']}, nonmembers {non['observed']}, {secs:.1f}s")
    assert ok


def test_criterion_2_sampled_evidence_q3(m1_files, acceptance):
    path, code, doc, build_secs = m1_files[3]
    obs = observed(doc)
    vectors = obs["vector total (q^4+1)(q^12-1)"]
    t0 = time.perf_counter()
    mcode, mdoc = run_cli("verify", "--in", str(path), "--mode", "member-sample", "--samples", "100", "--seed", "11")
    ncode, ndoc = run_cli("verify", "--in", str(path), "--mode", "nonmember-sample", "--samples", "100", "--seed", "12")
    secs = build_secs + time.perf_counter() - t0
    peak_gb = resource.getrusage(resource.RUSAGE_SELF).ru_maxrss / 2**20
    mem, non = mdoc["checks"][1]["observed"], ndoc["checks"][1]["observed"]
    ok = (
        code == 0 and obs["points"] == 21_789_040 and vectors == 82 * (3**12 - 1)
        and mcode == 0 and mem == {"7440133": 100}
        and ncode == 0 and non == {"7262986": 100}
        and secs <= 1800 and peak_gb <= 2.0
    )
    acceptance(2, ok, f"|M_1|={obs['points']}, vectors={vectors}, members {mem}, nonmembers {non}, "
                      f"{secs:.0f}s, peak {peak_gb:.2f} GiB")
    assert ok


def test_criterion_3_perp_slice_census(m1_files, acceptance):
    details, ok = [], True
    for q in (2, 3):
        ws = albert.wspace_make(field_from_order(q))
        rows = whiteset.perp_slice_census(ws)
        bad = [r.name for r in rows if not r.ok]
        total = next(r.enumerated for r in rows if r.name == "total")
        S = PointSet.read(m1_files[q][0])
        base = point_codes(ws.field, whiteset.base_point(ws)[None])[0]
        direct = polarcheck.perp_count(base, S, ws.form_space())
        want = q**11 + (q**4 + 1) * (q**11 - 1) // (q - 1)
        ok &= not bad and total == direct == want
        details.append(f"q={q}: {len(rows) - len(bad)}/{len(rows)} rows, total {total}, perp_count {direct}")
    acceptance(3, ok, "; ".join(details))
    assert ok


def test_criterion_4_lemma_oracles(acceptance):
    t0 = time.perf_counter()
    failures, n = [], 0
    for q in (2, 3, 4, 5):
        F = field_from_order(q)
        octs = oc.all_octonions(F)
        checks = []
        if q <= 3:
            checks += [oc.census_nk(F, k, a) for k in range(1, 5) for a in F.elements()]
            c, singular = oc.census_de_pairs(F, octs)
            checks.append(c)
            if not singular:
                failures.append(f"q={q} DE pair not singular")
            d = oc.subspace_dims_lemma23(F, octs)
            s = d["singular_count"]
            if not (
                s == (q**3 + 1) * (q**4 - 1)
                and d["ann_left_dims"] == {4: s} == d["ann_right_dims"]
                and d["intersection_ok"]
                and d["pair_dims"] == {3: d["pair_count"]}
            ):
                failures.append(f"q={q} Lemma 2.3 {d}")
            n += 1
        checks += [oc.census_norm_fiber(F, a, c, octs) for a in F.elements() for c in (False, True)]
        failures += [f"q={q} {c.name}: {c.enumerated} != {c.formula}" for c in checks if not c.ok]
        n += len(checks)
    secs = time.perf_counter() - t0
    ok = not failures and secs <= 300
    acceptance(4, ok, f"{n} checks, {len(failures)} failures, {secs:.1f}s")
    assert ok, failures


def test_criterion_5_table2(acceptance):
    failures = []
    for q in (3, 4, 5):
        F = field_from_order(q)
        obs, exp = oc.census_g2_fibers(F)
        allowed = {q**6, q**6 + q**3, q**6 - q**3}
        if obs != exp or sum(obs.values()) != q**8 or not set(obs.values()) <= allowed:
            failures.append(q)
        if any(obs[k] != oc.fiber_size_rule(F, *k) for k in obs):
            failures.append(q)
    ok = not failures
    acceptance(5, ok, f"q in (3,4,5): bins match orbit aggregates and sum to q^8; failures {failures}")
    assert ok


def test_criterion_6_singular_census(acceptance):
    c = polarcheck.singular_census(albert.wspace_make(field_from_order(2)))
    ok = c.points == 33_550_335 and c.points != 33_558_527 and c.seconds <= 120
    acceptance(6, ok, f"{c.points} singular points (hyperbolic would be {c.hyperbolic}), {c.seconds:.1f}s")
    assert ok


def _octonion_properties(F, rng):
    x, y = oc.random_octonions(F, rng, N_RANDOM), oc.random_octonions(F, rng, N_RANDOM)
    B = np.stack([oc.basis(F, i) for i in range(1, 9)])
    bx, by = np.repeat(B, 8, axis=0), np.tile(B, (8, 1))
    out = {}
    for tag, a, b in (("random", x, y), ("basis", bx, by)):
        ab = oc.mul(F, a, b)
        out[f"composition/{tag}"] = (oc.norm(F, ab) == F.mul(oc.norm(F, a), oc.norm(F, b))).all()
        out[f"left alternative/{tag}"] = (oc.mul(F, oc.mul(F, a, a), b) == oc.mul(F, a, oc.mul(F, a, b))).all()
        out[f"right alternative/{tag}"] = (oc.mul(F, oc.mul(F, b, a), a) == oc.mul(F, b, oc.mul(F, a, a))).all()
        rel = oc.add(F, oc.sub(F, oc.mul(F, a, a), oc.smul(F, oc.trace(F, a), a)), oc.scalar(F, oc.norm(F, a)))
        out[f"quadratic relation/{tag}"] = oc.is_zero(rel).all()
        out[f"anti-isomorphism/{tag}"] = (oc.conj(F, ab) == oc.mul(F, oc.conj(F, b), oc.conj(F, a))).all()
    return out


def test_criterion_7_algebraic_properties(acceptance):
    rng = np.random.default_rng(7)
    results = {}
    for q in (2, 3, 4, 5):
        F = field_from_order(q)
        for k, v in _octonion_properties(F, rng).items():
            results[f"q={q} {k}"] = bool(v)
        u = rng.integers(0, q, size=(N_RANDOM, 27), dtype=np.uint8)
        v = rng.integers(0, q, size=(N_RANDOM, 27), dtype=np.uint8)
        I = np.broadcast_to(albert.identity(F), u.shape)
        results[f"q={q} Jordan symmetry"] = bool((albert.jordan_product(F, u, v) == albert.jordan_product(F, v, u)).all())
        results[f"q={q} I o a = 2a"] = bool((albert.jordan_product(F, I, u) == albert.smul(F, 2 % F.p, u)).all())
    F3 = field_from_order(3)
    v = rng.integers(0, 3, size=(N_RANDOM, 27), dtype=np.uint8)
    v[:, albert.S2] = F3.neg_t[F3.add_t[v[:, albert.S0], v[:, albert.S1]]]
    I = albert.identity(F3)
    for t in (1, 2):
        shifted = albert.add(F3, v, albert.smul(F3, t, I)[None])
        results[f"p=3 Q0(v+{t}I)=Q0(v)"] = bool((albert.q0_eval(F3, shifted) == albert.q0_eval(F3, v)).all())
    results["p=3 B0(I,v)=0"] = bool((albert.b0_eval(F3, np.broadcast_to(I, v.shape), v) == 0).all())
    for q in (2, 3, 5):
        ws = albert.wspace_make(field_from_order(q))
        results[f"q={q} Gram rank = dim W ({ws.dim})"] = rank(MatrixFq.from_array(ws.field, ws.gram)) == ws.dim
    bad = [k for k, v in results.items() if not v]
    acceptance(7, not bad, f"{len(results) - len(bad)}/{len(results)} property checks ({N_RANDOM} random cases each)")
    assert not bad, bad


def test_criterion_8_small_spaces(acceptance):
    results = {}
    for label, (family, d, q) in {"Q-(5,2)": ("Q-", 6, 2), "W(3,2)": ("W", 4, 2), "Q(4,3)": ("Q", 5, 3)}.items():
        sp = polarcheck.standard_space(family, d, q)
        A = polarcheck.find_generator(sp, seed=0)
        B = polarcheck.find_generator(sp, seed=1, avoid=A)
        U = polarcheck.combine_union(A, B)
        pts = sp.all_points()
        for i, S in ((1, A), (2, U)):
            t = polarcheck.tight_target(i, sp.params)
            results[f"{label} {i}-tight passes"] = polarcheck.verify_tight(S, t, sp).passed
            outside = pts.codes[~S.contains(pts.codes)]
            removed = S.with_codes(S.codes[1:])
            swapped = S.with_codes(np.sort(np.append(S.codes[1:], outside[0])))
            results[f"{label} {i}-tight minus a point rejected"] = not polarcheck.verify_tight(removed, t, sp).passed
            results[f"{label} {i}-tight swapped point rejected"] = not polarcheck.verify_tight(swapped, t, sp).passed
    bad = [k for k, v in results.items() if not v]
    acceptance(8, not bad, f"{len(results) - len(bad)}/{len(results)} generator/union/mutation checks")
    assert not bad, bad
