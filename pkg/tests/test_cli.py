"""Manifest grammar, command reports, exit codes, and bundled fixtures."""

import json
from fractions import Fraction

import pytest

import helpers
from warpcurv import expr as ex
from warpcurv.cli import (
    ManifestError, build_chart, build_spec, classify_report, curvature_report,
    fixture_path, load_manifest, main, selftest_report, warped_verify_report,
)

FIXTURES = [
    "flat.mf", "flat1.mf", "flat2.mf", "flat3.mf", "sphere.mf", "sphere2.mf",
    "aniso3.mf", "hyper2.mf", "ex1_base.mf", "ex1_fiber.mf", "ex1_warped.mf",
    "ex2_base.mf", "ex2_warped.mf", "fs_warped.mf", "cf_warped.mf",
    "product.mf",
]


def _write(tmp_path, name, text):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


def test_load_manifest_chart(tmp_path):
    path = _write(tmp_path, "c.mf", """
# sample chart
[chart]
coords = x1 x2
param a = 3/2
box x1 = 1/2 .. 3
g 1 1 = a
g 1 2 = x1*x2
g 2 2 = 1
""")
    m = load_manifest(path)
    assert m.kind == "chart"
    assert m.coords == ("x1", "x2")
    assert m.params == {"a": Fraction(3, 2)}
    assert m.box == {"x1": (Fraction(1, 2), Fraction(3))}
    chart = build_chart(m)
    assert chart.n == 2
    assert str(chart.metric[0][0]) == "a"
    # lower triangle is filled symmetrically
    assert chart.is_zero(ex.sub(chart.metric[0][1], chart.metric[1][0]))


def test_manifest_errors(tmp_path):
    cases = [
        ("coords = x1\n", "before any section"),
        ("[weird]\n", "unknown section"),
        ("[chart]\ncoords = x1\ng 1 1 : 1\n", "key = value"),
        ("[chart]\ncoords = x1\ng 0 1 = 1\n", "index"),
        ("[chart]\ncoords = x1\ng 1 1 = 1\ng 1 1 = 2\n", "conflict"),
        ("[chart]\ncoords = x1\nparam a = pi\ng 1 1 = 1\n", "rational"),
        ("[chart]\ncoords = x1\nbox x1 = 1 2\ng 1 1 = 1\n", "lo .. hi"),
        ("[chart]\ncoords = x1\nfoo = 1\ng 1 1 = 1\n", "unknown key"),
        ("[chart]\ncoords = x1\ng 1 1 = 1\n[chart]\ncoords = y\n", "one"),
        ("[chart]\ng 1 1 = 1\n", "coords"),
        ("[chart]\ncoords = x1\ng 1 1 = exp(zz)\n", "zz"),
    ]
    for text, frag in cases:
        path = _write(tmp_path, "bad.mf", text)
        with pytest.raises(ManifestError) as err:
            build_chart(load_manifest(path))
        assert frag in str(err.value), text

    path = _write(tmp_path, "bad.mf", "[chart]\ncoords = x1\ng 1 1 : 1\n")
    with pytest.raises(ManifestError, match="bad.mf:3"):
        load_manifest(path)


def test_load_manifest_warped(tmp_path):
    _write(tmp_path, "b.mf", "[chart]\ncoords = x1\ng 1 1 = 1\n")
    _write(tmp_path, "f.mf", "[chart]\ncoords = y1\ng 1 1 = 1\n")
    w = _write(tmp_path, "w.mf", """
[warped]
base = b.mf
fiber = f.mf
warp = exp(x1)

[check]
name = R.R = 0
""")
    m = load_manifest(w)
    assert m.kind == "warped"
    assert m.checks[0].name == "R.R = 0"
    spec = build_spec(m)
    assert spec.p == 1 and spec.q == 1
    assert spec.fiber_map == {"y1": "x2"}

    missing = _write(tmp_path, "m.mf",
                     "[warped]\nbase = nope.mf\nfiber = f.mf\nwarp = 1\n")
    with pytest.raises(ManifestError, match="nope.mf"):
        build_spec(load_manifest(missing))

    notchart = _write(tmp_path, "n.mf",
                      "[warped]\nbase = w.mf\nfiber = f.mf\nwarp = 1\n")
    with pytest.raises(ManifestError, match="chart"):
        build_spec(load_manifest(notchart))


def test_bundled_fixtures_load():
    for name in FIXTURES:
        m = load_manifest(fixture_path(name))
        if m.kind == "chart":
            build_chart(m)
        else:
            build_spec(m)
    with pytest.raises(ManifestError):
        load_manifest(fixture_path("corrupt.mf"))


def test_curvature_flat():
    code, rep = curvature_report(fixture_path("flat.mf"))
    assert code == 0
    assert rep["curvature"]["flat"] is True
    assert rep["curvature"]["nonzero_R"] == {}
    assert rep["curvature"]["kappa"] == "0"


def test_curvature_fiber_scalar():
    code, rep = curvature_report(fixture_path("ex1_fiber.mf"), points=4)
    assert code == 0
    chart = build_chart(load_manifest(fixture_path("ex1_fiber.mf")))
    k = ex.parse(rep["curvature"]["kappa"], coords=chart.coords,
                 params=tuple(chart.params))
    assert chart.is_zero(ex.sub(k, ex.const(-12)))
    assert rep["curvature"]["flat"] is False
    assert rep["curvature"]["nonzero_R"]


def test_curvature_warped_product():
    code, rep = curvature_report(fixture_path("ex2_warped.mf"), points=4)
    assert code == 0
    assert rep["kind"] == "warped"
    assert rep["fiber_map"] == {"x1": "x2", "x2": "x3", "x3": "x4"}
    chart = helpers.ex2_chart()
    k = ex.parse(rep["curvature"]["kappa"], coords=chart.coords)
    want = helpers.chart_parse(chart)(
        "6*exp(x1)*(1 + exp(x1))/(1 + 2*exp(x1))^3")
    assert chart.is_zero(ex.sub(k, want))


def test_classify_sphere():
    code, rep = classify_report(fixture_path("sphere.mf"), points=6)
    assert code == 0
    cat = rep["catalog"]
    assert cat["R.R = 0"]["holds"] is True
    assert cat["R.R = 0"]["vacuous"] is False
    assert rep["summary"]["semisymmetric"] is True
    assert rep["summary"]["flat"] is False
    # constant curvature: the fit sees zero data in all three columns
    assert rep["fit"]["rank"] == 0 and rep["fit"]["trivial"] is True


def test_classify_requested_checks():
    code, rep = classify_report(fixture_path("ex2_warped.mf"), points=6)
    assert code == 0
    cat = rep["catalog"]
    assert cat["R.R = L1 Q(g,R)"]["holds"] is True
    assert cat["R.R = L1 Q(g,R)"]["requested"] is True
    assert cat["P.R = L1 Q(g,R)"]["holds"] is True
    assert cat["R.R = Q(S,R)"]["holds"] is True
    assert cat["R.R = 0"]["holds"] is False
    assert cat["W.R = L2 Q(S,R)"]["skipped"] is True
    assert rep["fit"]["rank"] == 1 and rep["fit"]["family"] is True
    assert rep["summary"]["pseudosymmetric"] is True


def test_classify_requested_failure_exit_code(tmp_path):
    path = _write(tmp_path, "aniso.mf", """
[chart]
coords = x1 x2 x3
g 1 1 = 1
g 2 2 = exp(2*x1)
g 3 3 = exp(4*x1)

[check]
name = R.S = 0
""")
    code, rep = classify_report(path, points=5)
    assert code == 1
    assert rep["catalog"]["R.S = 0"]["holds"] is False


def test_warped_verify_pass():
    code, rep = warped_verify_report(fixture_path("fs_warped.mf"), points=4)
    assert code == 0
    assert rep["L1"] == "0" and rep["L2"] == "1"
    assert rep["conditions"]["failed"] == []
    assert rep["conditions"]["all_hold"] is True
    assert all(rep["oracle"].values())
    assert set(rep["oracle"]) == {"R", "S", "kappa", "RR", "QgR", "QSR"}
    assert rep["trichotomy"]["labels"] == ["fiber-Einstein"]
    assert rep["dichotomy"]["base_flat"] is True
    assert rep["dichotomy"]["fiber_einstein"] is True
    assert rep["dichotomy"]["consistent"] is True


def test_warped_verify_failure_report():
    code, rep = warped_verify_report(fixture_path("cf_warped.mf"), points=4)
    assert code == 1
    assert rep["conditions"]["failed"] == ["I", "II"]
    wit = rep["conditions"]["witnesses"]
    assert "I" in wit and wit["I"]["defect"]
    # the block assembly itself still matches the direct computation
    assert all(rep["oracle"].values())
    assert rep["dichotomy"]["skipped"] is True


def test_warped_verify_flag_overrides_manifest():
    code, rep = warped_verify_report(fixture_path("ex2_warped.mf"),
                                     L1="0", points=4)
    assert code == 1
    assert rep["L1"] == "0" and rep["L2"] == "0"
    assert rep["conditions"]["failed"] == ["III"]
    assert rep["trichotomy"]["labels"] == ["fiber-Einstein"]


def test_warped_verify_requires_warped_manifest():
    with pytest.raises(ManifestError, match="warped"):
        warped_verify_report(fixture_path("flat.mf"))


def test_main_exit_codes(tmp_path, capsys):
    assert main(["curvature", fixture_path("flat.mf")]) == 0
    assert main(["curvature", str(tmp_path / "missing.mf")]) == 2
    # numerically zero everywhere but not structurally zero, so the
    # dichotomy cannot pick a branch and must reject the input
    code = main(["warped-verify", fixture_path("fs_warped.mf"),
                 "--L2", "sin(x1)^2 + cos(x1)^2 - 1", "--points", "3"])
    assert code == 2
    err = capsys.readouterr().err
    assert "error:" in err


def test_main_json_output(tmp_path, capsys):
    out_file = str(tmp_path / "r.json")
    code = main(["curvature", fixture_path("flat.mf"), "--json", out_file])
    assert code == 0
    with open(out_file) as fh:
        raw = fh.read()
    data = json.loads(raw)
    assert data["schema"] == "warpcurv-report/1"
    assert data["curvature"]["flat"] is True
    assert raw == json.dumps(data, sort_keys=True, indent=2) + "\n"
    assert "all curvature components zero" in capsys.readouterr().out


def test_reports_deterministic():
    _, r1 = curvature_report(fixture_path("sphere.mf"), points=4)
    _, r2 = curvature_report(fixture_path("sphere.mf"), points=4)
    assert json.dumps(r1, sort_keys=True) == json.dumps(r2, sort_keys=True)


def test_selftest_passes():
    code, rep = selftest_report()
    assert code == 0
    assert rep["items"] and all(item["ok"] for item in rep["items"])
    names = [item["name"] for item in rep["items"]]
    assert "corrupt manifest rejected" in names
    assert "seed invariance" in names
