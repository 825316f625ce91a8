"""Manifest-driven front end: curvature, classification, warped verification.

Manifest grammar (line oriented):
  - blank lines and '#' comment lines are ignored
  - a section header line is one of [chart], [warped], [check]
  - every other line reads 'key = value', split at the first '='; the key
    part is whitespace-tokenized
  - [chart]  keys: coords = x1 x2 ...
                   g <i> <j> = <expression>      (1-based; symmetric fill)
                   param <name> = <rational>
                   box <coord> = <lo> .. <hi>
                   seed = <integer>
  - [warped] keys: base = <path>, fiber = <path> (relative to the manifest),
                   warp = <expression>, L1 = <expression>, L2 = <expression>,
                   seed = <integer>
  - [check]  keys: name = <catalog row name>, scalar <key> = <expression>

A manifest defines exactly one chart or one warped product.  [check]
sections request catalog verdicts during classification.  Reports are
deterministic given (manifest, seed): sampled values are fixed-precision
strings and JSON is emitted with sorted keys; no wall-clock data is
included.  Exit codes: 0 pass, 1 verdict failure, 2 input error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from itertools import product as iproduct

import mpmath

from . import expr as ex
from .actions import cached_derivation, cached_tachibana
from .conditions import (
    CATALOG, check_identity, constant_type_check, fit_pseudosymmetry,
)
from .curvature import bundle
from .expr import DEFAULT_SEED, DomainError, PointEval, zero_threshold
from .tensor import Chart, ChartError
from .warped import (
    _base_scalar, assemble_product, auxiliaries, block_actions,
    block_curvature, dichotomy_check, make_spec, trichotomy_report,
    verify_conditions,
)

SCHEMA = "warpcurv-report/1"


class ManifestError(Exception):
    """Unreadable, malformed, or inconsistent manifest input."""


@dataclass
class CheckRequest:
    name: str = ""
    scalars: dict = field(default_factory=dict)


@dataclass
class Manifest:
    path: str
    kind: str = ""
    lines: list = field(default_factory=list)
    coords: tuple = ()
    params: dict = field(default_factory=dict)
    box: dict = field(default_factory=dict)
    entries: dict = field(default_factory=dict)   # (i, j) -> expression string
    base: str = ""
    fiber: str = ""
    warp: str = ""
    L1: str = ""
    L2: str = ""
    seed: int | None = None
    checks: list = field(default_factory=list)


def fixture_path(name):
    """Filesystem path of a bundled fixture manifest."""
    return str(resources.files("warpcurv").joinpath("fixtures", name))


# ---------------------------------------------------------------------------
# Manifest parsing


def load_manifest(path):
    try:
        with open(path, encoding="utf-8") as fh:
            raw = fh.read()
    except OSError as err:
        raise ManifestError(f"cannot read {path}: {err}") from None
    m = Manifest(path=str(path))
    section = None
    chk = None

    def bad(lineno, msg):
        raise ManifestError(f"{path}:{lineno}: {msg}")

    for lineno, line in enumerate(raw.splitlines(), 1):
        text = line.strip()
        if not text or text.startswith("#"):
            continue
        m.lines.append(text)
        if text.startswith("["):
            if text in ("[chart]", "[warped]"):
                if m.kind:
                    bad(lineno, "a manifest defines exactly one chart or "
                                "warped product")
                m.kind = text[1:-1]
                section = m.kind
            elif text == "[check]":
                chk = CheckRequest()
                m.checks.append(chk)
                section = "check"
            else:
                bad(lineno, f"unknown section {text}")
            continue
        if section is None:
            bad(lineno, "entry before any section header")
        key, sep, value = text.partition("=")
        if not sep:
            bad(lineno, "expected 'key = value'")
        toks = key.split()
        value = value.strip()
        if not toks:
            bad(lineno, "missing key before '='")
        if section == "chart":
            _chart_entry(m, toks, value, bad, lineno)
        elif section == "warped":
            _warped_entry(m, toks, value, bad, lineno)
        else:
            _check_entry(chk, toks, value, bad, lineno)
    if not m.kind:
        raise ManifestError(f"{path}: no [chart] or [warped] section")
    return m


def _chart_entry(m, toks, value, bad, lineno):
    key = toks[0]
    if key == "coords" and len(toks) == 1:
        if m.coords:
            bad(lineno, "coords already declared")
        m.coords = tuple(value.split())
        if not m.coords:
            bad(lineno, "coords must list at least one name")
    elif key == "g" and len(toks) == 3:
        try:
            i, j = int(toks[1]), int(toks[2])
        except ValueError:
            bad(lineno, f"metric index must be an integer, got "
                        f"{' '.join(toks[1:])!r}")
        if i < 1 or j < 1:
            bad(lineno, "metric index is 1-based")
        pair = (min(i, j) - 1, max(i, j) - 1)
        if pair in m.entries and m.entries[pair] != value:
            bad(lineno, f"conflicting duplicate entry for "
                        f"g {pair[0] + 1} {pair[1] + 1}")
        m.entries[pair] = value
    elif key == "param" and len(toks) == 2:
        try:
            m.params[toks[1]] = Fraction(value)
        except (ValueError, ZeroDivisionError):
            bad(lineno, f"parameter value must be rational, got {value!r}")
    elif key == "box" and len(toks) == 2:
        lo, sep, hi = value.partition("..")
        if not sep:
            bad(lineno, "box range must read 'lo .. hi'")
        try:
            m.box[toks[1]] = (Fraction(lo.strip()), Fraction(hi.strip()))
        except (ValueError, ZeroDivisionError):
            bad(lineno, "box bounds must be rational")
    elif key == "seed" and len(toks) == 1:
        try:
            m.seed = int(value)
        except ValueError:
            bad(lineno, f"seed must be an integer, got {value!r}")
    else:
        bad(lineno, f"unknown key {' '.join(toks)!r} in [chart]")


def _warped_entry(m, toks, value, bad, lineno):
    key = toks[0]
    if len(toks) != 1 or key not in ("base", "fiber", "warp", "L1", "L2",
                                     "seed"):
        bad(lineno, f"unknown key {' '.join(toks)!r} in [warped]")
    if key == "seed":
        try:
            m.seed = int(value)
        except ValueError:
            bad(lineno, f"seed must be an integer, got {value!r}")
    else:
        setattr(m, key, value)


def _check_entry(chk, toks, value, bad, lineno):
    if toks == ["name"]:
        chk.name = value
    elif toks[0] == "scalar" and len(toks) == 2:
        chk.scalars[toks[1]] = value
    else:
        bad(lineno, f"unknown key {' '.join(toks)!r} in [check]")


# ---------------------------------------------------------------------------
# Building charts and warped specs from manifests


def build_chart(m):
    if m.kind != "chart":
        raise ManifestError(f"{m.path}: expected a chart manifest")
    if not m.coords:
        raise ManifestError(f"{m.path}: coords not declared")
    n = len(m.coords)
    for i, j in m.entries:
        if j >= n:
            raise ManifestError(f"{m.path}: metric index g {i + 1} {j + 1} "
                                f"exceeds dimension {n}")
    for c in m.box:
        if c not in m.coords:
            raise ManifestError(f"{m.path}: box names unknown coordinate "
                                f"{c!r}")
    metric = [[m.entries.get((min(i, j), max(i, j)), "0") for j in range(n)]
              for i in range(n)]
    try:
        return Chart(m.coords, metric, params=m.params, box=m.box)
    except (ChartError, ex.ExprError) as err:
        raise ManifestError(f"{m.path}: {err}") from None


def build_spec(m):
    if m.kind != "warped":
        raise ManifestError(f"{m.path}: expected a warped manifest")
    if not (m.base and m.fiber and m.warp):
        raise ManifestError(f"{m.path}: [warped] needs base, fiber, and warp")
    root = os.path.dirname(os.path.abspath(m.path))
    charts = []
    for ref in (m.base, m.fiber):
        subm = load_manifest(os.path.join(root, ref))
        if subm.kind != "chart":
            raise ManifestError(f"{subm.path}: expected a chart manifest")
        charts.append(build_chart(subm))
    try:
        return make_spec(charts[0], charts[1], m.warp)
    except (ChartError, ex.ExprError) as err:
        raise ManifestError(f"{m.path}: {err}") from None


# ---------------------------------------------------------------------------
# Report plumbing


def _zc(e):
    return isinstance(e, ex.Const) and e.value == 0


def _numstr(v, dps=50, digits=20):
    with mpmath.workdps(dps):
        if isinstance(v, Fraction):
            v = mpmath.mpf(v.numerator) / mpmath.mpf(v.denominator)
        else:
            v = mpmath.mpf(v)
        return mpmath.nstr(v, digits)


def _ptstr(pt, coords):
    return {c: str(pt[c]) for c in coords}


def _resolve_seed(m, seed):
    if seed is not None:
        return seed
    if m.seed is not None:
        return m.seed
    return DEFAULT_SEED


def _orbit_reps4(n):
    """Canonical index tuples, one per symmetry orbit of a curvature tensor."""
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    for a, pi in enumerate(pairs):
        for pj in pairs[a:]:
            yield (*pi, *pj)


def _scaffold(m, seed, points):
    rep = {
        "schema": SCHEMA,
        "manifest": {"file": os.path.basename(m.path), "lines": list(m.lines)},
        "kind": m.kind,
        "seed": str(seed),
        "points": points,
    }
    if m.kind == "chart":
        chart = build_chart(m)
        spec = None
    else:
        spec = build_spec(m)
        chart = assemble_product(spec)
        rep["fiber_map"] = dict(spec.fiber_map)
    rep["coords"] = list(chart.coords)
    rep["params"] = {k: str(v) for k, v in chart.params.items()}
    rep["n"] = chart.n
    return chart, spec, rep


# ---------------------------------------------------------------------------
# Commands


def curvature_report(path, seed=None, points=8):
    m = load_manifest(path)
    seed = _resolve_seed(m, seed)
    chart, _, rep = _scaffold(m, seed, points)
    b = bundle(chart)
    n = chart.n
    nz_r = {}
    for t in _orbit_reps4(n):
        e = b.R.comp(t)
        if _zc(e) or chart.is_zero(e, trials=points, seed=seed):
            continue
        nz_r[" ".join(str(i + 1) for i in t)] = str(e)
    nz_s = {}
    for i in range(n):
        for j in range(i, n):
            e = b.S.comps[i][j]
            if _zc(e) or chart.is_zero(e, trials=points, seed=seed):
                continue
            nz_s[f"{i + 1} {j + 1}"] = str(e)
    samples = []
    for pt in chart.sample_points(points, seed):
        pe = PointEval(pt)
        try:
            samples.append(_numstr(pe.eval(b.kappa)))
        except DomainError:
            samples.append("undefined")
    rep["command"] = "curvature"
    rep["curvature"] = {
        "kappa": str(b.kappa),
        "kappa_samples": samples,
        "nonzero_R": nz_r,
        "nonzero_S": nz_s,
        "flat": not nz_r,
    }
    return 0, rep


def classify_report(path, seed=None, points=8):
    m = load_manifest(path)
    seed = _resolve_seed(m, seed)
    chart, _, rep = _scaffold(m, seed, points)
    b = bundle(chart)
    n = chart.n
    rep["command"] = "classify"
    rcomps = [b.R.comp(t) for t in _orbit_reps4(n)]
    rcomps = [e for e in rcomps if not _zc(e)]
    flat = not rcomps or all(chart.is_zero_many(rcomps, trials=points,
                                                seed=seed))
    fit = fit_pseudosymmetry(b, chart.sample_points(max(points, 5), seed))
    with mpmath.workdps(50):
        residual_zero = all(
            rec["residual"] <= zero_threshold(rec["data_scale"])
            for rec in fit.records)
    requested = {}
    for chk in m.checks:
        if not chk.name:
            raise ManifestError(f"{m.path}: [check] section missing its name")
        if chk.name not in CATALOG:
            raise ManifestError(f"{m.path}: unknown identity in [check]: "
                                f"{chk.name!r}")
        requested[chk.name] = chk.scalars
    catalog = {}
    code = 0
    for name, row in CATALOG.items():
        if name in requested or not row.parametric:
            try:
                v = check_identity(name, b, scalars=requested.get(name),
                                   trials=points, seed=seed)
            except ValueError as err:
                raise ManifestError(f"{m.path}: {err}") from None
            v["requested"] = name in requested
            v["skipped"] = False
            if name in requested:
                v["scalars"] = dict(requested[name])
                if not v["holds"]:
                    code = 1
            catalog[name] = v
        else:
            catalog[name] = {"name": name, "skipped": True,
                             "requested": False,
                             "reason": "needs candidate scalars",
                             "qualifier": row.qualifier}
    rep["fit"] = {
        "rank": fit.rank,
        "family": fit.family,
        "trivial": fit.trivial,
        "max_residual": _numstr(fit.max_residual),
        "residual_zero": bool(residual_zero),
        "constant_type": bool(constant_type_check(fit)),
        "records": [{"point": _ptstr(rec["point"], chart.coords),
                     "rank": rec["rank"],
                     "L1": _numstr(rec["L1"]),
                     "L2": _numstr(rec["L2"]),
                     "residual": _numstr(rec["residual"])}
                    for rec in fit.records],
    }
    rep["catalog"] = catalog
    rep["summary"] = {
        "flat": bool(flat),
        "semisymmetric": bool(catalog["R.R = 0"]["holds"]),
        "ricci_semisymmetric": bool(catalog["R.S = 0"]["holds"]),
        # pseudosymmetric type: R.R solvable as L1 Q(g,R) + L2 Q(S,R)
        # at every sampled point
        "pseudosymmetric": bool(residual_zero and fit.rank >= 1),
    }
    return code, rep


def warped_verify_report(path, L1=None, L2=None, seed=None, points=8):
    m = load_manifest(path)
    if m.kind != "warped":
        raise ManifestError(f"{m.path}: warped-verify needs a warped manifest")
    seed = _resolve_seed(m, seed)
    chart, spec, rep = _scaffold(m, seed, points)
    L1 = L1 if L1 is not None else (m.L1 or "0")
    L2 = L2 if L2 is not None else (m.L2 or "0")
    rep["command"] = "warped-verify"
    rep["p"], rep["q"] = spec.p, spec.q
    rep["warp"] = str(spec.f)
    rep["L1"], rep["L2"] = L1, L2
    aux = auxiliaries(spec)
    rep["auxiliaries"] = {
        "T": {f"{a + 1} {c + 1}": str(aux.T.comps[a][c])
              for a in range(spec.p) for c in range(a, spec.p)},
        "trT": str(aux.trT),
        "Delta": str(aux.Delta),
        "Omega": str(aux.Omega),
    }
    b = bundle(chart)
    curv = block_curvature(spec)
    acts = block_actions(spec)
    n = spec.n
    oracle = {}
    diffs = [ex.sub(b.R.comp(t), curv["R"].comp(t))
             for t in iproduct(range(n), repeat=4)]
    oracle["R"] = all(chart.is_zero_many(diffs, trials=points, seed=seed))
    diffs = [ex.sub(b.S.comps[i][j], curv["S"].comps[i][j])
             for i in range(n) for j in range(n)]
    oracle["S"] = all(chart.is_zero_many(diffs, trials=points, seed=seed))
    oracle["kappa"] = chart.is_zero(ex.sub(b.kappa, curv["kappa"]),
                                    trials=points, seed=seed)
    for key, direct in (("RR", cached_derivation(b, "R", "R")),
                        ("QgR", cached_tachibana(b, "g", "R")),
                        ("QSR", cached_tachibana(b, "S", "R"))):
        diffs = [ex.sub(direct.comp(t), acts[key].comp(t))
                 for t in iproduct(range(n), repeat=6)]
        oracle[key] = all(chart.is_zero_many(diffs, trials=points, seed=seed))
    rep["oracle"] = oracle
    try:
        conds = dict(verify_conditions(spec, L1, L2, trials=points, seed=seed))
        l2e = _base_scalar(spec, L2, "L2")
    except ValueError as err:
        raise ManifestError(f"{m.path}: {err}") from None
    conds["witnesses"] = {k: {"index": list(v["index"]), "defect": v["defect"]}
                          for k, v in conds["witnesses"].items()}
    rep["conditions"] = conds
    tri = trichotomy_report(spec, L1, trials=points, seed=seed)
    rep["trichotomy"] = {
        "labels": list(tri["labels"]),
        "all_covered": bool(tri["all_covered"]),
        "records": [{"point": _ptstr(r["point"], chart.coords),
                     "label": r["label"]} for r in tri["records"]],
    }
    if _zc(l2e):
        rep["dichotomy"] = {"skipped": True,
                            "reason": "L2 is identically zero; "
                                      "no branch forced"}
        dich_ok = True
    else:
        try:
            d = dichotomy_check(spec, L2, conditions_hold=False,
                                trials=points, seed=seed)
        except ValueError as err:
            raise ManifestError(f"{m.path}: dichotomy: {err}") from None
        consistent = ((not conds["all_hold"]) or d["base_flat"]
                      or d["fiber_einstein"])
        rep["dichotomy"] = {"skipped": False,
                            "base_flat": d["base_flat"],
                            "fiber_einstein": d["fiber_einstein"],
                            "consistent": consistent}
        dich_ok = consistent
    ok = all(oracle.values()) and conds["all_hold"] and dich_ok
    return (0 if ok else 1), rep


def selftest_report(seed=DEFAULT_SEED):
    items = []

    def item(name, fn):
        try:
            ok, note = fn()
        except Exception as err:    # selftest reports failures, never raises
            ok, note = False, f"{type(err).__name__}: {err}"
        items.append({"name": name, "ok": bool(ok), "note": str(note)})

    def flat_zero():
        code, rep = curvature_report(fixture_path("flat.mf"), seed=seed,
                                     points=3)
        return (code == 0 and rep["curvature"]["flat"],
                "kappa = " + rep["curvature"]["kappa"])

    def fiber_kappa():
        code, rep = curvature_report(fixture_path("ex1_fiber.mf"), seed=seed,
                                     points=3)
        chart = build_chart(load_manifest(fixture_path("ex1_fiber.mf")))
        k = ex.parse(rep["curvature"]["kappa"], coords=chart.coords)
        return (code == 0 and chart.is_zero(ex.sub(k, ex.const(-12)),
                                            seed=seed),
                "scalar curvature equals -12")

    def warped_kappa():
        spec = build_spec(load_manifest(fixture_path("ex2_warped.mf")))
        prod = assemble_product(spec)
        want = ex.parse("6*exp(x1)*(1 + exp(x1))/(1 + 2*exp(x1))^3",
                        coords=prod.coords)
        return (prod.is_zero(ex.sub(bundle(prod).kappa, want), seed=seed),
                "scalar curvature matches the closed form")

    def sphere_semisym():
        code, rep = classify_report(fixture_path("sphere.mf"), seed=seed,
                                    points=5)
        v = rep["catalog"]["R.R = 0"]
        return (code == 0 and v["holds"] and not v["vacuous"],
                "R.R = 0 holds non-vacuously")

    def verify(name, points, expect_code, expect_failed):
        def fn():
            code, rep = warped_verify_report(fixture_path(name), seed=seed,
                                             points=points)
            ok = (code == expect_code and all(rep["oracle"].values())
                  and rep["conditions"]["failed"] == expect_failed)
            return ok, f"failed = {rep['conditions']['failed']}"
        return fn

    def corrupt():
        try:
            load_manifest(fixture_path("corrupt.mf"))
        except ManifestError:
            return True, "rejected as expected"
        return False, "corrupt manifest was accepted"

    def seed_invariance():
        outs = []
        for s in (1, 2):
            code, rep = warped_verify_report(fixture_path("fs_warped.mf"),
                                             seed=s, points=3)
            outs.append((code, tuple(rep["conditions"]["failed"]),
                         tuple(sorted(rep["oracle"].items())),
                         tuple(rep["trichotomy"]["labels"])))
        return outs[0] == outs[1], "verdicts agree across seeds"

    def json_roundtrip():
        _, rep = curvature_report(fixture_path("sphere2.mf"), seed=seed,
                                  points=3)
        blob = json.dumps(rep, sort_keys=True, indent=2)
        stable = json.dumps(json.loads(blob), sort_keys=True,
                            indent=2) == blob
        return stable, "emit-parse-emit stable"

    item("flat chart has zero curvature", flat_zero)
    item("fiber chart scalar curvature", fiber_kappa)
    item("warped product scalar curvature", warped_kappa)
    item("sphere chart is semisymmetric", sphere_semisym)
    item("warped verify: conformally flat product",
         verify("ex2_warped.mf", 3, 0, []))
    item("warped verify: sphere fiber product",
         verify("fs_warped.mf", 3, 0, []))
    item("warped verify: curved base with zero candidates",
         verify("cf_warped.mf", 3, 1, ["I", "II"]))
    item("warped verify: five-dimensional product",
         verify("ex1_warped.mf", 2, 0, []))
    item("corrupt manifest rejected", corrupt)
    item("seed invariance", seed_invariance)
    item("json round trip", json_roundtrip)

    code = 0 if all(i["ok"] for i in items) else 1
    return code, {"schema": SCHEMA, "command": "selftest",
                  "seed": str(seed), "items": items}


# ---------------------------------------------------------------------------
# Rendering and entry point


def _render(code, rep):
    lines = []
    cmd = rep["command"]
    if cmd == "curvature":
        c = rep["curvature"]
        lines.append(f"curvature report: {rep['manifest']['file']} "
                     f"({rep['kind']}, n = {rep['n']})")
        lines.append(f"kappa = {c['kappa']}")
        lines.append("kappa samples: " + ", ".join(c["kappa_samples"]))
        if c["flat"]:
            lines.append("all curvature components zero")
        else:
            lines.append("nonzero R components (orbit representatives):")
            for key in sorted(c["nonzero_R"]):
                lines.append(f"  R[{key}] = {c['nonzero_R'][key]}")
            if c["nonzero_S"]:
                lines.append("nonzero S components:")
                for key in sorted(c["nonzero_S"]):
                    lines.append(f"  S[{key}] = {c['nonzero_S'][key]}")
    elif cmd == "classify":
        lines.append(f"classify report: {rep['manifest']['file']} "
                     f"({rep['kind']}, n = {rep['n']})")
        s = rep["summary"]
        f = rep["fit"]
        flags = [k for k in ("flat", "semisymmetric", "ricci_semisymmetric",
                             "pseudosymmetric") if s[k]]
        lines.append("summary: " + (", ".join(flags) if flags else "none"))
        lines.append(f"fit: rank {f['rank']}, max residual "
                     f"{f['max_residual']}, family = {f['family']}, "
                     f"constant type = {f['constant_type']}")
        lines.append("catalog:")
        for name, v in rep["catalog"].items():
            if v["skipped"]:
                status = "skipped (" + v["reason"] + ")"
            elif v["vacuous"]:
                status = "vacuous (all points excluded by qualifier)"
            elif v["holds"]:
                status = "holds"
            else:
                status = "fails"
            mark = " [requested]" if v.get("requested") else ""
            lines.append(f"  {name:35s} {status}{mark}")
    elif cmd == "warped-verify":
        lines.append(f"warped-verify report: {rep['manifest']['file']} "
                     f"(p = {rep['p']}, q = {rep['q']}, n = {rep['n']})")
        lines.append(f"warp f = {rep['warp']}")
        lines.append(f"candidates: L1 = {rep['L1']}, L2 = {rep['L2']}")
        lines.append("fiber relabeling: " + ", ".join(
            f"{k} -> {v}" for k, v in rep["fiber_map"].items()))
        ora = rep["oracle"]
        lines.append("oracle equivalence (blocks vs direct): " + ", ".join(
            f"{k} {'ok' if v else 'MISMATCH'}" for k, v in ora.items()))
        conds = rep["conditions"]
        for name in ("I", "II", "III", "IV", "V"):
            status = "holds" if conds[name] else "fails"
            extra = ""
            if name == "IV":
                extra = (f" (base factor zero: "
                         f"{conds['IV_base_factor_zero']}, fiber factor "
                         f"zero: {conds['IV_fiber_factor_zero']})")
            if not conds[name] and name in conds["witnesses"]:
                w = conds["witnesses"][name]
                excerpt = w["defect"]
                if len(excerpt) > 70:
                    excerpt = excerpt[:67] + "..."
                extra = (f" (witness index {tuple(w['index'])}: "
                         f"{excerpt})")
            lines.append(f"condition ({name}): {status}{extra}")
        lines.append(f"corollary R.T equation: "
                     f"{'holds' if conds['corollary_ii'] else 'fails'}")
        tri = rep["trichotomy"]
        lines.append(f"trichotomy labels: {', '.join(tri['labels'])} "
                     f"(all points covered: {tri['all_covered']})")
        d = rep["dichotomy"]
        if d["skipped"]:
            lines.append("dichotomy: skipped, " + d["reason"])
        else:
            lines.append(f"dichotomy: base flat = {d['base_flat']}, fiber "
                         f"Einstein = {d['fiber_einstein']}, consistent = "
                         f"{d['consistent']}")
    elif cmd == "selftest":
        for it in rep["items"]:
            mark = "ok  " if it["ok"] else "FAIL"
            lines.append(f"{mark} {it['name']}: {it['note']}")
        good = sum(1 for it in rep["items"] if it["ok"])
        lines.append(f"{good}/{len(rep['items'])} selftest items passed")
    outcome = {0: "pass", 1: "verdict failure", 2: "input error"}[code]
    lines.append(f"result: {outcome}")
    return "\n".join(lines)


def _common_args(sp):
    sp.add_argument("--seed", type=int, default=None,
                    help="sampling seed (overrides the manifest)")
    sp.add_argument("--points", type=int, default=8,
                    help="number of sample points per zero test")
    sp.add_argument("--json", default=None, metavar="OUT",
                    help="also write the report as JSON to OUT")


def main(argv=None):
    ap = argparse.ArgumentParser(
        prog="warpcurv",
        description="curvature, classification, and warped-product "
                    "verification for coordinate metrics")
    sub = ap.add_subparsers(dest="cmd", required=True)
    for name in ("curvature", "classify"):
        sp = sub.add_parser(name)
        sp.add_argument("manifest")
        _common_args(sp)
    sp = sub.add_parser("warped-verify")
    sp.add_argument("manifest")
    sp.add_argument("--L1", default=None,
                    help="candidate L1 (overrides the manifest)")
    sp.add_argument("--L2", default=None,
                    help="candidate L2 (overrides the manifest)")
    _common_args(sp)
    sp = sub.add_parser("selftest")
    sp.add_argument("--seed", type=int, default=None)
    args = ap.parse_args(argv)
    try:
        if args.cmd == "curvature":
            code, rep = curvature_report(args.manifest, seed=args.seed,
                                         points=args.points)
        elif args.cmd == "classify":
            code, rep = classify_report(args.manifest, seed=args.seed,
                                        points=args.points)
        elif args.cmd == "warped-verify":
            code, rep = warped_verify_report(args.manifest, L1=args.L1,
                                             L2=args.L2, seed=args.seed,
                                             points=args.points)
        else:
            code, rep = selftest_report(
                seed=args.seed if args.seed is not None else DEFAULT_SEED)
    except ManifestError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    except (ChartError, ex.ExprError, ValueError, OSError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    print(_render(code, rep))
    if getattr(args, "json", None):
        with open(args.json, "w", encoding="utf-8") as fh:
            fh.write(json.dumps(rep, sort_keys=True, indent=2) + "\n")
    return code


if __name__ == "__main__":
    sys.exit(main())
