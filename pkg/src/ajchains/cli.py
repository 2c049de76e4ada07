"""Command-line front end: load fixtures, run verification suites, and
emit machine-readable reports.

Subcommands: cohomology (rank/torsion tables and the inclusion
comparison), cauchy-stokes (boundary-pairing identity on built-in or
user-supplied cases), polylog (the cycle-family evaluator against the
series oracle), verify-all (every suite, with a summary table).

Exit codes are a stable contract: 0 pass, 1 verification failure, 2
usage or input error.  Reports are byte-stable across runs for fixed
configuration: all sampling is seeded and report assembly is ordered.
"""

import argparse
import json
import os
import random
import sys
from concurrent.futures import ThreadPoolExecutor

import sympy

from . import analytic
from . import config
from . import polylog
from .admissible import (
    admissible_chain_basis,
    build_ac_double_complex,
    configuration_of,
    face_map_commutation_check,
    quasi_isomorphism_report,
    random_admissible_chains,
    relative_cohomology_report,
    thom_face_cache,
)
from .cubical import build_cubical_ac_complex, sigma_quasi_iso_report
from .errors import ChainCalcError
from .homology import check_differential
from .models import get_point_model, model_registry


# ---------------------------------------------------------------------------
# input loading


def _fixture_dir():
    return os.path.join(os.path.dirname(__file__), "fixtures")


def _load_input(path):
    """Load a JSON input; fall back to the packaged fixture of the same
    basename so the shipped examples work from any directory."""
    if not os.path.exists(path):
        packaged = os.path.join(_fixture_dir(), os.path.basename(path))
        if os.path.basename(path) == path and os.path.exists(packaged):
            path = packaged
        else:
            raise IOError("input file not found: %s" % path)
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)


def _symbols(names):
    out = []
    for name in names:
        if not isinstance(name, str) or not name.isidentifier():
            raise ValueError("bad parameter name %r" % (name,))
        out.append(sympy.Symbol(name, real=True))
    return out


def _sympify(expr, local):
    return sympy.sympify(expr, locals=local)


def _chain_from_json(data):
    """ParamChain from a JSON description: {"n": int, "cells": [{"name",
    "params", "bounds", "coords", "closed", "coeff", "on_faces"}, ...],
    "on_faces": [...]}.  Bounds and coordinates are sympy expressions in
    the declared parameters."""
    n = int(data["n"])
    cells = []
    for spec in data.get("cells", ()):
        params = _symbols(spec.get("params", ()))
        local = {str(s): s for s in params}
        bounds = [(_sympify(lo, local), _sympify(hi, local))
                  for lo, hi in spec.get("bounds", ())]
        coords = [_sympify(c, local) for c in spec.get("coords", ())]
        cell = analytic.ParamCell(
            str(spec.get("name", "cell")), params, bounds, coords,
            on_faces=tuple(spec.get("on_faces", ())),
            closed=tuple(spec.get("closed", ())))
        cells.append((cell, sympy.Rational(str(spec.get("coeff", 1)))))
    return analytic.ParamChain(n, cells,
                               on_faces=tuple(data.get("on_faces", ())))


def _form_from_json(data):
    """LogForm from JSON: {"n": int, "log_axes": [ints], "prefactor":
    rational string, "twopii_power": int}."""
    return analytic.LogForm(
        int(data["n"]), tuple(int(a) for a in data.get("log_axes", ())),
        prefactor=sympy.Rational(str(data.get("prefactor", 1))),
        twopii_power=int(data.get("twopii_power", 0)))


# ---------------------------------------------------------------------------
# output helpers


def _emit_json(obj, out):
    out.write(json.dumps(obj, sort_keys=True, indent=2))
    out.write("\n")


def _emit_csv(rows, header, out):
    out.write(",".join(header) + "\n")
    for row in rows:
        out.write(",".join(str(v) for v in row) + "\n")


def _parse_degrees(text):
    if text is None:
        return None
    try:
        return {int(text)}
    except ValueError:
        lo, _, hi = text.partition("-")
        return set(range(int(lo), int(hi) + 1))


# ---------------------------------------------------------------------------
# cohomology


def cmd_cohomology(args, out):
    data = _load_input(args.input)
    kind = data.get("kind")
    degrees = _parse_degrees(args.degree)

    if kind == "cubical-ac":
        base = data.get("base", "point")
        if base == "point":
            y_model = get_point_model()
        else:
            registry = model_registry()
            if base not in registry:
                raise ValueError("unknown base model %r" % (base,))
            y_model = registry[base]()
        n = int(data["cubes"])
        complex_ = build_cubical_ac_complex(y_model, n)
        ranks = complex_.cohomology_ranks()
        rows = [{"degree": j, "rank": ranks[j], "over": "Q"}
                for j in sorted(ranks) if degrees is None or j in degrees]
        report = {"input": {"base": base, "cubes": n},
                  "complex": "alternating-cubical",
                  "square_zero": complex_.is_complex(),
                  "rows": rows}
        _emit_json(report, out)
        return 0 if report["square_zero"] else 1

    if kind != "simplicial-model":
        raise ValueError("unknown input kind %r" % (kind,))
    if args.alt:
        raise ValueError("--alt needs a cubical fixture")
    registry = model_registry()
    name = data.get("model")
    if name not in registry:
        raise ValueError("unknown model %r" % (name,))
    model = registry[name]()

    if args.relative is not None:
        report = relative_cohomology_report(model, rel=args.relative)
        if degrees is not None:
            report["rows"] = [r for r in report["rows"]
                              if r["degree"] in degrees]
        _emit_json(report, out)
        return 0

    report = quasi_isomorphism_report(model)
    rows = []
    for j in sorted(report["ac_ranks"]):
        row = {"degree": j, "ac_rank": report["ac_ranks"][j],
               "c_rank": report["c_ranks"].get(j)}
        if degrees is None or j in degrees:
            rows.append(row)
    out_report = {
        "model": model.name,
        "rows": rows,
        "square_zero": report["ac_square_zero"] and report["c_square_zero"],
        "chain_map": report["chain_map"],
        "cone_exact": report["cone_exact"],
        "quasi_isomorphism": report["quasi_isomorphism"],
    }
    _emit_json(out_report, out)
    return 0 if report["quasi_isomorphism"] else 1


# ---------------------------------------------------------------------------
# cauchy-stokes


def cmd_cauchy_stokes(args, out):
    case = args.case
    if case.startswith("builtin:"):
        name = case[len("builtin:"):]
        if name in analytic.builtin_cs_cases():
            report = analytic.run_cs_case(name, tol=args.tol,
                                          budget=args.budget)
            _emit_json(report, out)
            return 0 if report["pass"] else 1
        if name in analytic.builtin_probe_cases():
            report = analytic.run_probe_case(name, budget=args.budget)
            _emit_json(report, out)
            return 0 if report["diverged"] == report["expected"] else 1
        raise ValueError("unknown builtin case %r" % (name,))
    data = _load_input(case)
    gamma = _chain_from_json(data["gamma"])
    phi = _form_from_json(data["phi"])
    dh_gamma = _chain_from_json(data["dh_gamma"])
    report = analytic.verify_cauchy_stokes(gamma, phi, dh_gamma,
                                           tol=args.tol, budget=args.budget)
    report["case"] = os.path.basename(case)
    _emit_json(report, out)
    return 0 if report["pass"] else 1


# ---------------------------------------------------------------------------
# polylog


def _parse_j(text):
    if not text:
        return []
    return [int(part) for part in text.split(",") if part.strip() != ""]


def cmd_polylog(args, out):
    result = polylog.aj_evaluate(args.p, _parse_j(args.J), args.a,
                                 tol=args.tol, budget=args.budget)
    if args.format == "csv":
        rows = [("term", t["i"], t["value"][0], t["value"][1])
                for t in result["terms"]]
        rows.append(("total", "", result["total"][0], result["total"][1]))
        rows.append(("oracle", "", result["oracle"][0], result["oracle"][1]))
        rows.append(("rel_err", "", result["rel_err"], ""))
        rows.append(("pass", "", int(result["pass"]), ""))
        _emit_csv(rows, ("field", "i", "re", "im"), out)
    else:
        _emit_json(result, out)
    return 0 if result["pass"] else 1


# ---------------------------------------------------------------------------
# verify-all


def _suite_cubical_point():
    details = []
    ok = True
    for n in (1, 2):
        ranks = build_cubical_ac_complex(get_point_model(),
                                         n).cohomology_ranks()
        expect = {j: (1 if j == n else 0) for j in ranks}
        good = ranks == expect
        ok = ok and good
        details.append("n=%d:%s" % (n, "ok" if good else "ranks=%r" % ranks))
    return ok, " ".join(details)


def _suite_quasi_iso(model_name):
    def run():
        model = model_registry()[model_name]()
        report = quasi_isomorphism_report(model)
        ranks = " ".join("H%d=%d" % (j, report["ac_ranks"][j])
                         for j in sorted(report["ac_ranks"]))
        return report["quasi_isomorphism"], ranks
    return run


def _suite_thom_independence():
    model = model_registry()["p1"]()
    cfg = configuration_of(model)
    basis = admissible_chain_basis(cfg, 2)
    rng = random.Random(config.SAMPLE_SEED)
    chains = []
    while len(chains) < 20:
        chain = {}
        for j in range(len(basis)):
            c = rng.randrange(-2, 3)
            if not c:
                continue
            for s, v in basis.chain(j).items():
                acc = chain.get(s, 0) + c * v
                if acc:
                    chain[s] = acc
                elif s in chain:
                    del chain[s]
        if chain:
            chains.append(chain)
    checked = 0
    for face in model.faces:
        caches = [thom_face_cache(model, face, var, alt)
                  for var in (0, 1) for alt in (False, True)]
        for chain in chains:
            images = [c.apply_via_matrix(chain, 2) for c in caches]
            if any(img != images[0] for img in images[1:]):
                return False, "disagree on %s" % face.name
            checked += 1
    return True, "%d chains x 2 cocycles x 2 orderings" % checked


def _suite_face_commutation():
    model = model_registry()["p1xp1"]()
    rng = random.Random(config.SAMPLE_SEED)
    pairs = [(0, 2), (0, 3), (1, 2), (1, 3)]
    count = 0
    for _, chain in random_admissible_chains(model, 6, rng):
        for a, b in pairs:
            rep = face_map_commutation_check(model, a, b, chain)
            if not rep["equal"]:
                return False, "faces %d,%d disagree" % (a, b)
            count += 1
    return True, "%d composite pairs" % count


def _suite_cauchy_stokes():
    details = []
    ok = True
    for name in sorted(analytic.builtin_cs_cases()):
        report = analytic.run_cs_case(name)
        ok = ok and report["pass"]
        details.append("%s:%s" % (name, "ok" if report["pass"] else "FAIL"))
    return ok, " ".join(details)


def _suite_divergence_probe():
    details = []
    ok = True
    for name in sorted(analytic.builtin_probe_cases()):
        report = analytic.run_probe_case(name)
        good = report["diverged"] == report["expected"]
        ok = ok and good
        details.append("%s:%s" % (name,
                                  "diverged" if report["diverged"]
                                  else "converged"))
    return ok, " ".join(details)


def _suite_structural():
    point = get_point_model()
    checks = {}
    cube2 = build_cubical_ac_complex(point, 2)
    checks["cubical-square-zero"] = cube2.is_complex()
    model = model_registry()["p1"]()
    cfg = configuration_of(model)
    ac = build_ac_double_complex(cfg)
    checks["ac-square-zero"] = check_differential(ac.chain_dims, ac.diff)
    sig = sigma_quasi_iso_report(1)
    checks["comparison-chain-map"] = sig["chain_map"]
    ok = all(checks.values())
    return ok, " ".join("%s:%s" % (k, "ok" if v else "FAIL")
                        for k, v in sorted(checks.items()))


def _suite_polylog():
    details = []
    ok = True
    for p, a in ((2, 0.3), (3, 0.5)):
        result = polylog.aj_evaluate(p, [], a)
        ok = ok and result["pass"]
        details.append("p=%d:rel_err=%.2e" % (p, result["rel_err"]))
    return ok, " ".join(details)


def _suite_boundary_relations():
    details = []
    ok = True
    for p, a in ((2, 0.3), (3, 0.5)):
        report = polylog.check_boundary_relations(p, a)
        ok = ok and report["pass"]
        bad = [r["relation"] for r in report["relations"] if not r["pass"]]
        details.append("p=%d:%s" % (p, "ok" if report["pass"]
                                    else ";".join(bad)))
    return ok, " ".join(details)


def verification_suites():
    """Ordered list of (name, callable) verification suites; each
    callable returns (passed, detail)."""
    return [
        ("cubical-point-cohomology", _suite_cubical_point),
        ("quasi-isomorphism-p1", _suite_quasi_iso("p1")),
        ("quasi-isomorphism-p1xp1", _suite_quasi_iso("p1xp1")),
        ("thom-independence", _suite_thom_independence),
        ("face-commutation", _suite_face_commutation),
        ("cauchy-stokes", _suite_cauchy_stokes),
        ("divergence-probe", _suite_divergence_probe),
        ("structural-invariants", _suite_structural),
        ("polylog-aj", _suite_polylog),
        ("boundary-relations", _suite_boundary_relations),
    ]


def _thread_count(n_suites):
    env = os.environ.get("AJCHAINS_THREADS", "").strip()
    if env:
        return max(1, int(env))
    return max(1, min(n_suites, os.cpu_count() or 1))


def cmd_verify_all(args, out):
    suites = verification_suites()
    workers = _thread_count(len(suites))

    def run(entry):
        name, fn = entry
        try:
            passed, detail = fn()
        except ChainCalcError as exc:
            return name, False, "error: %s" % exc
        return name, bool(passed), detail

    if workers == 1:
        results = [run(entry) for entry in suites]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run, suites))

    all_pass = all(passed for _, passed, _ in results)
    if args.format == "csv":
        _emit_csv([(name, "PASS" if passed else "FAIL", detail)
                   for name, passed, detail in results],
                  ("check", "status", "detail"), out)
    elif args.format == "json":
        _emit_json({"checks": [{"check": name, "pass": passed,
                                "detail": detail}
                               for name, passed, detail in results],
                    "pass": all_pass}, out)
    else:
        width = max(len(name) for name, _, _ in results)
        for name, passed, detail in results:
            out.write("%-*s  %s  %s\n"
                      % (width, name, "PASS" if passed else "FAIL", detail))
        out.write("overall: %s\n" % ("PASS" if all_pass else "FAIL"))
    return 0 if all_pass else 1


# ---------------------------------------------------------------------------
# entry point


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="ajchains",
        description="chain-calculus verification front end")
    sub = parser.add_subparsers(dest="command", required=True)

    p_coh = sub.add_parser("cohomology",
                           help="rank/torsion tables and the inclusion "
                                "comparison")
    p_coh.add_argument("--input", required=True,
                       help="fixture path or packaged fixture name")
    p_coh.add_argument("--relative", nargs="?", const="H", default=None,
                       help="relative cohomology: H for the whole face "
                            "divisor, or one face name")
    p_coh.add_argument("--alt", action="store_true",
                       help="the input names an alternating cubical "
                            "complex")
    p_coh.add_argument("--degree", default=None,
                       help="restrict rows to one degree or a range a-b")

    p_cs = sub.add_parser("cauchy-stokes",
                          help="boundary-pairing identity on one case")
    p_cs.add_argument("--case", required=True,
                      help="builtin:<name> or a case JSON path")
    p_cs.add_argument("--tol", type=float, default=None)
    p_cs.add_argument("--budget", type=int, default=None)

    p_pl = sub.add_parser("polylog",
                          help="cycle-family evaluator against the "
                               "series oracle")
    p_pl.add_argument("--p", type=int, required=True)
    p_pl.add_argument("--a", type=float, required=True)
    p_pl.add_argument("--J", default="",
                      help="comma-separated divisor positions")
    p_pl.add_argument("--tol", type=float, default=None)
    p_pl.add_argument("--budget", type=int, default=None)
    p_pl.add_argument("--format", choices=("json", "csv"), default="json")

    p_all = sub.add_parser("verify-all", help="run every suite")
    p_all.add_argument("--format", choices=("table", "json", "csv"),
                       default="table")
    return parser


def main(argv=None):
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    out = sys.stdout
    try:
        if args.command == "cohomology":
            return cmd_cohomology(args, out)
        if args.command == "cauchy-stokes":
            return cmd_cauchy_stokes(args, out)
        if args.command == "polylog":
            return cmd_polylog(args, out)
        return cmd_verify_all(args, out)
    except (IOError, OSError, ValueError, KeyError,
            json.JSONDecodeError) as exc:
        sys.stderr.write("error: %s\n" % exc)
        return 2
    except ChainCalcError as exc:
        kind = type(exc).__name__
        if kind in ("BadParameter", "BadIndex"):
            sys.stderr.write("error: %s\n" % exc)
            return 2
        sys.stderr.write("verification error: %s\n" % exc)
        return 1


if __name__ == "__main__":
    sys.exit(main())
