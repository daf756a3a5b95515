"""Command-line entry point: ``f4tight {params,lemmas,construct,verify,census}``.

Exit codes: 0 pass, 1 verification failure, 2 usage or configuration error,
3 internal assertion.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from dataclasses import dataclass, field

from . import albert, galois, octonion, polarcheck, whiteset
from ._kernels import set_threads
from .pointset import FormatError, PointSet

EXIT_PASS, EXIT_FAIL, EXIT_USAGE, EXIT_INTERNAL = 0, 1, 2, 3

FAMILY_FLAGS = {"w": "W", "qplus": "Q+", "qminus": "Q-", "q": "Q", "h": "H"}
LEMMA_CHECKS = ("2.3", "2.4", "2.5", "2.6", "table2")
CENSUS_KINDS = ("singular", "slice")


class UsageError(Exception):
    pass


@dataclass
class Report:
    """Accumulates check lines; rendered as text or as one JSON document."""

    command: str
    config: dict
    checks: list[dict] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)

    def check(self, name: str, observed, expected, ok: bool | None = None, **extra) -> bool:
        ok = observed == expected if ok is None else ok
        self.checks.append({"name": name, "observed": observed, "expected": expected, "pass": bool(ok), **extra})
        return bool(ok)

    def note(self, text: str) -> None:
        self.notes.append(text)

    @property
    def passed(self) -> bool:
        return all(c["pass"] for c in self.checks)

    def render(self, fmt: str) -> str:
        if fmt == "structured":
            doc = {"command": self.command, "config": self.config, "checks": self.checks, "notes": self.notes, "pass": self.passed}
            return json.dumps(doc, indent=2, default=str)
        lines = [f"# {n}" for n in self.notes]
        for c in self.checks:
            extra = "".join(f" {k}={v}" for k, v in c.items() if k not in ("name", "observed", "expected", "pass"))
            lines.append(
                f"{'PASS' if c['pass'] else 'FAIL'}  {c['name']}: observed {_fmt(c['observed'])}, "
                f"expected {_fmt(c['expected'])}{extra}"
            )
        lines.append("overall: " + ("PASS" if self.passed else "FAIL"))
        return "\n".join(lines)


def _fmt(v) -> str:
    if isinstance(v, int) and not isinstance(v, bool):
        return f"{v:,}"
    return str(v)


# -- argument handling --------------------------------------------------------------


def _field(args) -> galois.FieldSpec:
    if args.q is not None:
        if args.p is not None or args.f is not None:
            raise UsageError("give either --q or --p/--f, not both")
        return galois.field_from_order(args.q)
    if args.p is None:
        raise UsageError("a field is required: --q Q or --p P [--f F]")
    return galois.field_make(args.p, args.f or 1)


def _field_in(args, allowed: tuple[int, ...]) -> galois.FieldSpec:
    F = _field(args)
    if F.q not in allowed:
        raise UsageError(f"{args.command} supports q in {set(allowed)}, got q={F.q}")
    return F


def _which(text: str | None, allowed: tuple[str, ...]) -> list[str]:
    if not text:
        return list(allowed)
    items = [w.strip() for w in text.split(",") if w.strip()]
    bad = [w for w in items if w not in allowed]
    if bad:
        raise UsageError(f"unknown selection {bad}; choose from {','.join(allowed)}")
    return items


# -- subcommands -------------------------------------------------------------------------


def cmd_params(args, rep: Report) -> None:
    F = _field(args)
    params = polarcheck.polar_params(FAMILY_FLAGS[args.family], args.d, F.q)
    target = polarcheck.tight_target(F.q**4 + 1, params)
    rep.config.update(family=params.family, d=params.d, q=params.q)
    for name, val in (
        ("rank r", params.rank),
        ("ovoid number theta_r", params.ovoid_number),
        ("points |P_r|", params.point_count),
        ("tight i = q^4+1", target.i),
        ("set size", target.set_size),
        ("h1", target.h1),
        ("h2", target.h2),
    ):
        rep.check(name, val, val)


def cmd_lemmas(args, rep: Report) -> None:
    F = _field_in(args, (2, 3, 4, 5))
    which = _which(args.which, LEMMA_CHECKS)
    rep.config.update(q=F.q, which=which)
    octs = octonion.all_octonions(F)

    if "2.4" in which:
        for k in range(1, 5):
            if F.q ** (2 * k) > octonion.ENUMERATION_BOUND:
                rep.note(f"Lemma 2.4 k={k} skipped at q={F.q}: q^{2 * k} tuples exceed the enumeration bound")
                continue
            for a in F.elements():
                c = octonion.census_nk(F, k, a)
                rep.check(f"Lemma 2.4 {c.name}", c.enumerated, c.formula)
    if "2.5" in which:
        for constrain in (False, True):
            for a in F.elements():
                c = octonion.census_norm_fiber(F, a, constrain, octs)
                rep.check(f"Lemma 2.5 {c.name}", c.enumerated, c.formula)
    if "2.6" in which:
        if F.q > 3:
            rep.note(f"Lemma 2.6 skipped at q={F.q}: pair enumeration is limited to q<=3")
        else:
            c, singular = octonion.census_de_pairs(F, octs)
            rep.check(f"Lemma 2.6 {c.name}", c.enumerated, c.formula)
            rep.check("Lemma 2.6 N(D)=N(E)=0 on every pair", singular, True)
    if "2.3" in which:
        if F.q > 3:
            rep.note(f"Lemma 2.3 skipped at q={F.q}: exhaustive check is limited to q<=3")
        else:
            d = octonion.subspace_dims_lemma23(F, octs)
            n = d["singular_count"]
            rep.check("Lemma 2.3 nonzero singular D", n, (F.q**3 + 1) * (F.q**4 - 1))
            rep.check("Lemma 2.3 dim ann_L(D)", d["ann_left_dims"], {4: n})
            rep.check("Lemma 2.3 dim ann_R(D)", d["ann_right_dims"], {4: n})
            rep.check("Lemma 2.3 dim ann_L(D)^ann_R(D) = 3 or 1 by B(D,1)", d["intersection_ok"], True,
                      dims=d["intersection_dims"])
            rep.check("Lemma 2.3 dim ann_L(D)^ann_R(E), DE=0", d["pair_dims"], {3: d["pair_count"]})
    if "table2" in which:
        if F.q <= 2:
            rep.note("Table 2 fiber census skipped: Lemma 2.2 requires q>2")
        else:
            observed, expected = octonion.census_g2_fibers(F, octs)
            for key in sorted(set(observed) | set(expected)):
                rep.check(f"Table 2 bin (trace,norm)={key}", observed.get(key, 0), expected.get(key, 0))
            rep.check("Table 2 bins sum to q^8", sum(observed.values()), F.q**8)


def cmd_construct(args, rep: Report) -> None:
    F = _field_in(args, (2, 3))
    if not args.out:
        raise UsageError("construct needs --out PATH")
    ws = albert.wspace_make(F)
    res = whiteset.build_m1(ws)
    res.pointset.write(args.out)
    rep.config.update(q=F.q, out=args.out)
    want = whiteset.type_vector_totals(F.q)
    for kind in whiteset.TYPES:
        rep.check(f"type {kind} vectors", res.vectors[kind], want[kind], points=res.points[kind])
    rep.check("vector total (q^4+1)(q^12-1)", sum(res.vectors.values()), whiteset.m1_vector_total(F.q))
    rep.check("types give disjoint point sets", res.disjoint_types, True)
    rep.check("points", len(res.pointset), whiteset.m1_point_total(F.q))
    rep.note(f"construct q={F.q}: wrote {args.out} in {res.seconds:.1f}s")


def _load(path: str) -> tuple[PointSet, polarcheck.FormSpace]:
    S = PointSet.read(path)
    if S.basis != albert.BASIS_VERSION:
        raise FormatError(f"basis {S.basis!r} is not {albert.BASIS_VERSION!r}")
    ws = albert.wspace_make(S.field)
    if S.dim != ws.dim:
        raise FormatError(f"header dim {S.dim} does not match W (dim {ws.dim}) at q={S.q}")
    return S, ws.form_space()


def cmd_verify(args, rep: Report) -> None:
    if not args.input:
        raise UsageError("verify needs --in PATH")
    S, space = _load(args.input)
    q = S.q
    params = space.params
    target = polarcheck.tight_target(q**4 + 1, params)
    mode = args.mode.replace("-", "_")
    rep.config.update(input=args.input, q=q, mode=mode, samples=args.samples, seed=args.seed, threads=set_threads(args.threads))
    rep.check("set size (q^4+1)(q^12-1)/(q-1)", len(S), target.set_size)
    if mode != "full" and args.seed is None:
        raise UsageError("sampled modes need --seed")
    res = polarcheck.verify_tight(S, target, space, mode, args.samples, args.seed)
    h = "h2" if mode == "nonmember_sample" else "h1"
    d = res.as_dict()
    rep.check(f"{mode} perp counts all equal {h}", d["histogram"], {str(res.expected): res.checked},
              ok=res.passed, checked=res.checked, wall_time=d["wall_time"])
    if args.nonmember_samples:
        seed = 0 if args.seed is None else args.seed
        nm = polarcheck.verify_tight(S, target, space, "nonmember_sample", args.nonmember_samples, seed)
        dn = nm.as_dict()
        rep.check("nonmember_sample perp counts all equal h2", dn["histogram"], {str(nm.expected): nm.checked},
                  ok=nm.passed, checked=nm.checked, seed=seed, wall_time=dn["wall_time"])
    pairs = res.checked * len(S)
    rep.note(f"verify q={q} {mode}: {pairs:,} pairs in {res.wall_time:.2f}s ({pairs / max(res.wall_time, 1e-9):.3g}/s)")


def cmd_census(args, rep: Report) -> None:
    F = _field_in(args, (2, 3))
    which = _which(args.which, CENSUS_KINDS)
    rep.config.update(q=F.q, which=which)
    ws = albert.wspace_make(F)
    if "singular" in which:
        if F.q != 2:
            rep.note(f"singular census skipped at q={F.q}: it enumerates q^dim vectors")
        else:
            c = polarcheck.singular_census(ws)
            rep.check("singular points (elliptic value)", c.points, c.elliptic, seconds=round(c.seconds, 2))
            rep.check("differs from hyperbolic value", c.points != c.hyperbolic, True, hyperbolic=c.hyperbolic)
    if "slice" in which:
        for row in whiteset.perp_slice_census(ws):
            rep.check(f"perp slice {row.name} [{row.unit}]", row.enumerated, row.formula)


COMMANDS = {
    "params": cmd_params,
    "lemmas": cmd_lemmas,
    "construct": cmd_construct,
    "verify": cmd_verify,
    "census": cmd_census,
}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="f4tight", description="Build and verify the tight set M_1 in W.")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, field=True):
        if field:
            p.add_argument("--q", type=int, help="field order")
            p.add_argument("--p", type=int, help="characteristic (with --f)")
            p.add_argument("--f", type=int, help="extension degree")
        p.add_argument("--threads", type=int, help="worker threads for the perp kernels")
        p.add_argument("--report", choices=("human", "structured"), default="human")
        p.add_argument("-v", "--verbose", action="store_true")

    p = sub.add_parser("params", help="polar-space parameters and the (q^4+1)-tight targets")
    common(p)
    p.add_argument("--family", choices=sorted(FAMILY_FLAGS), required=True)
    p.add_argument("--d", type=int, required=True, help="vector-space dimension")

    p = sub.add_parser("lemmas", help="octonion counting oracles")
    common(p)
    p.add_argument("--which", help=f"comma list from {','.join(LEMMA_CHECKS)} (default all)")

    p = sub.add_parser("construct", help="build M_1 and write it as a point-set file")
    common(p)
    p.add_argument("--out", help="output path")

    p = sub.add_parser("verify", help="check perp counts of a point-set file")
    common(p, field=False)
    p.add_argument("--in", dest="input", help="input point-set file")
    p.add_argument("--mode", choices=("full", "member-sample", "nonmember-sample"), default="full")
    p.add_argument("--samples", type=int, default=100)
    p.add_argument("--seed", type=int)
    p.add_argument("--nonmember-samples", type=int, default=0, help="extra nonmember corroboration")

    p = sub.add_parser("census", help="singular-point census and perp-slice census")
    common(p)
    p.add_argument("--which", help=f"comma list from {','.join(CENSUS_KINDS)} (default all)")
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    rep = Report(args.command, {})
    t0 = time.perf_counter()
    try:
        if args.threads:
            set_threads(args.threads)
        COMMANDS[args.command](args, rep)
    except (UsageError, ValueError, FormatError, OSError) as exc:
        print(f"f4tight {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (AssertionError, MemoryError) as exc:
        print(f"f4tight {args.command}: internal check failed: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    rep.config["seconds"] = round(time.perf_counter() - t0, 3)
    print(rep.render(args.report))
    return EXIT_PASS if rep.passed else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
