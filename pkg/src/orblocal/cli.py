"""Command-line front end.

Commands: analyze (full germ pipeline), sard (regular-value density
sampling), strata (chart stratification), obstruct (existence
certificates), classify1 (compact 1-orbifold components), retraction
(no-retraction argument on an atlas), corpus (built-in regression
scenarios).  Outputs are UTF-8 JSON with a human summary on stdout.

Exit codes: 0 success, 1 input/schema error, 2 failed mathematical check.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from . import __version__, corpus, serialize
from .charts import stratify
from .germs import (
    cocycle_identities,
    faithfulness_check,
    invariant_projection,
    is_regular_value,
    obstruction_certificate,
    preimage_model,
    preimage_model_boundary,
    recenter_germ,
    sard_sample,
)
from .onedim import boundary_parity, classify_1_orbifold, retraction_contradiction
from .serialize import SchemaError

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_MATH = 2


class MathCheckFailure(Exception):
    """A scenario is well-formed but fails a mathematical check."""


def _load(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as e:
        raise SchemaError("$", "cannot read %s (%s)" % (path, e)) from None
    except json.JSONDecodeError as e:
        raise SchemaError("$", "invalid JSON in %s (%s)" % (path, e)) from None


def _emit(report: dict, out_path: str | None, summary_lines: list[str]):
    for line in summary_lines:
        print(line)
    blob = json.dumps(report, indent=2, sort_keys=True)
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(blob + "\n")
    else:
        print(blob)


def _base_report(meta: dict) -> dict:
    return {"scenario": meta["name"], "anchor": meta["anchor"],
            "version": __version__, "checks": [], "derived": {}}


def _expect_kind(meta: dict, kind: str):
    if meta["kind"] != kind:
        raise SchemaError("$.kind", "expected a %r scenario, got %r"
                          % (kind, meta["kind"]))


def cmd_analyze(args) -> int:
    meta = serialize.parse_scenario(_load(args.file))
    _expect_kind(meta, "germ")
    germ, p, lifts = serialize.parse_germ_payload(meta["payload"], "$.payload")
    report = _base_report(meta)
    checks = report["checks"]
    checks.append({"name": "germ-equivariance", "passed": True,
                   "elements_checked": germ.source.group.order})
    reg = is_regular_value(germ, p, lifts)
    checks.append({
        "name": "regular-value", "passed": reg.regular,
        "needed_rank": reg.needed_rank,
        "point_ranks": [[serialize.vector_json(pt), rank]
                        for pt, rank in reg.point_ranks],
        "empty_preimage": reg.empty_preimage,
    })
    proj = invariant_projection(germ)
    report["derived"]["n_order"] = proj.n_group.order
    report["derived"]["projection"] = serialize.matrix_json(proj.projection)
    report["derived"]["projection_kernel"] = [
        serialize.vector_json(b) for b in proj.proj_kernel.basis]
    checks.append({"name": "invariant-projection", "passed": True,
                   "n_order": proj.n_group.order})
    cc = cocycle_identities(proj)
    checks.append({"name": "cocycle-identities", "passed": cc.ok,
                   "pairs_checked": cc.pairs_checked})
    faith = faithfulness_check(germ)
    checks.append({"name": "faithfulness", "passed": True,
                   "n_order": faith.n_order, "g_order": faith.g_order})
    if not reg.regular:
        summary = ["FAIL %s: not a regular value" % meta["name"]]
        _emit(report, args.out, summary)
        return EXIT_MATH
    models = []
    for pt in lifts:
        g, point = germ, pt
        if any(m.apply(pt) != pt for m in germ.source.group.elements):
            g = recenter_germ(germ, pt)
            point = (Fraction(0),) * g.source.dim
        model = (preimage_model_boundary if g.source.boundary
                 else preimage_model)(g, p, point)
        models.append({
            "lift_point": serialize.vector_json(pt),
            "recentered": g is not germ,
            "kernel": [serialize.vector_json(b) for b in model.kernel.basis],
            "gamma_s_order": model.gamma_s.order,
            "g_order": model.g_group.order,
            "dim": model.dim,
            "boundary_kind": model.boundary_kind,
        })
    report["derived"]["preimage_models"] = models
    checks.append({"name": "preimage-models", "passed": True,
                   "count": len(models)})
    summary = ["PASS %s: regular value, %d preimage model(s)"
               % (meta["name"], len(models))]
    _emit(report, args.out, summary)
    return EXIT_OK


def cmd_sard(args) -> int:
    meta = serialize.parse_scenario(_load(args.file))
    _expect_kind(meta, "germ")
    germ, _, _ = serialize.parse_germ_payload(meta["payload"], "$.payload")
    if len(args.box) != germ.target.dim:
        raise SchemaError("$.box", "need %d --box intervals, got %d"
                          % (germ.target.dim, len(args.box)))
    box = []
    for i, (lo, hi) in enumerate(args.box):
        lo, hi = Fraction(lo), Fraction(hi)
        if not lo < hi:
            raise SchemaError("$.box[%d]" % i, "empty interval")
        box.append((lo, hi))
    sard = sard_sample(germ, box, args.samples, args.seed)
    report = _base_report(meta)
    report["seed"] = args.seed
    report["derived"]["sard"] = sard.to_jsonable()
    report["checks"].append({"name": "sard-sampling", "passed": True,
                             "regular_fraction": str(sard.regular_fraction)})
    summary = ["PASS %s: regular fraction %s over %d samples"
               % (meta["name"], sard.regular_fraction, args.samples)]
    _emit(report, args.out, summary)
    return EXIT_OK


def cmd_strata(args) -> int:
    doc = _load(args.file)
    if "kind" in doc:
        meta = serialize.parse_scenario(doc)
        _expect_kind(meta, "chart")
        payload, name = meta["payload"], meta["name"]
    else:
        payload, name = doc, "chart"
    chart = serialize.parse_chart(payload, "$.payload")
    rep = stratify(chart)
    strata = [{
        "dimension": s.dimension,
        "codimension": s.codimension,
        "isotropy_order": s.isotropy.order,
        "singular": s.singular,
        "in_boundary": s.in_boundary,
        "fixed_space": [serialize.vector_json(b) for b in s.fixed_space.basis],
    } for s in rep.strata]
    report = {"scenario": name, "version": __version__,
              "derived": {"strata": strata,
                          "singular_count": sum(1 for s in strata if s["singular"])}}
    summary = ["%s: %d singular stratum/strata of dims %s"
               % (name, report["derived"]["singular_count"],
                  [s["dimension"] for s in strata if s["singular"]])]
    _emit(report, args.out, summary)
    return EXIT_OK


def cmd_obstruct(args) -> int:
    doc = _load(args.file)
    if "kind" in doc:
        meta = serialize.parse_scenario(doc)
        _expect_kind(meta, "obstruction")
        payload, name = meta["payload"], meta["name"]
    else:
        payload, name = doc, "obstruction"
    source, target, theta = serialize.parse_obstruction_payload(payload, "$.payload")
    cert = obstruction_certificate(source, target, theta)
    derived = {"verdict": cert.verdict, "reason": cert.reason_code,
               "detail": cert.detail}
    if cert.witness_lift is not None:
        derived["witness_lift"] = serialize.poly_json(cert.witness_lift)
    if cert.invariant_search is not None:
        derived["invariant_search"] = {
            "status": cert.invariant_search.status,
            "reason": cert.invariant_search.reason,
        }
    report = {"scenario": name, "version": __version__, "derived": derived}
    _emit(report, args.out, ["%s: %s (%s)" % (name, cert.verdict, cert.reason_code)])
    return EXIT_OK


def cmd_classify1(args) -> int:
    doc = _load(args.file)
    if "kind" in doc:
        meta = serialize.parse_scenario(doc)
        _expect_kind(meta, "component-list")
        payload, name = meta["payload"], meta["name"]
    else:
        payload, name = doc, "components"
    if not isinstance(payload, dict) or "components" not in payload:
        raise SchemaError("$.payload.components", "missing required field")
    comps = [serialize.parse_component(cj, "$.payload.components[%d]" % i)
             for i, cj in enumerate(payload["components"])]
    types = [classify_1_orbifold(c) for c in comps]
    derived = {"types": types}
    if all(t in ("a", "b") for t in types):
        parity = boundary_parity(comps)
        derived["boundary_points"] = parity.boundary_points
        derived["even"] = parity.even
    else:
        derived["boundary_points"] = None
        derived["note"] = "mirror components present; parity theorem not applicable"
    report = {"scenario": name, "version": __version__, "derived": derived}
    _emit(report, args.out, ["%s: types %s" % (name, types)])
    return EXIT_OK


def cmd_retraction(args) -> int:
    doc = _load(args.file)
    if "kind" in doc:
        meta = serialize.parse_scenario(doc)
        _expect_kind(meta, "atlas")
        payload, name = meta["payload"], meta["name"]
    else:
        payload, name = doc, "atlas"
    scenario = serialize.parse_atlas_payload(payload, "$.payload")
    rep = retraction_contradiction(scenario)
    derived = {
        "status": rep.status,
        "contradiction_kind": rep.contradiction_kind,
        "detail": rep.detail,
        "components": [serialize.component_json(c.component)
                       for c in rep.components],
        "hypothesis_holds": rep.hypothesis.holds,
    }
    report = {"scenario": name, "version": __version__, "derived": derived}
    _emit(report, args.out, ["%s: %s" % (name, rep.status)])
    return EXIT_OK


def cmd_corpus(args) -> int:
    if args.action != "run":
        raise SchemaError("$", "unknown corpus action %r" % args.action)
    results = list(corpus.run_corpus(anchor=args.anchor, corrupt=args.corrupt))
    failures = 0
    for name, anchor, ok, detail in results:
        status = "PASS" if ok else "FAIL"
        if not ok:
            failures += 1
        print("%s %-34s [%s]%s" % (status, name, anchor,
                                   "" if ok else " " + str(detail.get("error"))))
    print("corpus: %d/%d passed" % (len(results) - failures, len(results)))
    if args.out:
        blob = {
            "version": __version__,
            "results": [{"name": n, "anchor": a, "passed": ok, "detail": d}
                        for n, a, ok, d in results],
        }
        with open(args.out, "w", encoding="utf-8") as fh:
            json.dump(blob, fh, indent=2, sort_keys=True, default=str)
            fh.write("\n")
    return EXIT_OK if failures == 0 else EXIT_MATH


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="orblocal",
        description="exact local calculus of smooth orbifold charts and germs")
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="run the full germ pipeline on a scenario")
    p.add_argument("file")
    p.add_argument("--out", help="write the JSON report here")
    p.set_defaults(fn=cmd_analyze)

    p = sub.add_parser("sard", help="sample target values and classify them")
    p.add_argument("file")
    p.add_argument("--samples", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--box", nargs=2, action="append", required=True,
                   metavar=("LO", "HI"),
                   help="interval per target coordinate (repeatable)")
    p.add_argument("--out")
    p.set_defaults(fn=cmd_sard)

    p = sub.add_parser("strata", help="stratify a chart by isotropy type")
    p.add_argument("file")
    p.add_argument("--out")
    p.set_defaults(fn=cmd_strata)

    p = sub.add_parser("obstruct", help="existence certificate for a germ problem")
    p.add_argument("file")
    p.add_argument("--out")
    p.set_defaults(fn=cmd_obstruct)

    p = sub.add_parser("classify1", help="classify compact 1-orbifold components")
    p.add_argument("file")
    p.add_argument("--out")
    p.set_defaults(fn=cmd_classify1)

    p = sub.add_parser("retraction", help="run the no-retraction argument on an atlas")
    p.add_argument("file")
    p.add_argument("--out")
    p.set_defaults(fn=cmd_retraction)

    p = sub.add_parser("corpus", help="run the built-in scenario corpus")
    p.add_argument("action", choices=["run"])
    p.add_argument("--anchor", help="only scenarios whose anchor/name match")
    p.add_argument("--corrupt", action="store_true", help=argparse.SUPPRESS)
    p.add_argument("--out")
    p.set_defaults(fn=cmd_corpus)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except SchemaError as e:
        print("input error: %s" % e, file=sys.stderr)
        return EXIT_INPUT
    except (ValueError, ArithmeticError, AssertionError, RuntimeError) as e:
        print("check failed: %s: %s" % (type(e).__name__, e), file=sys.stderr)
        return EXIT_MATH


if __name__ == "__main__":
    sys.exit(main())
