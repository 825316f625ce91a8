"""Shared test utilities: random expression trees and symmetry-orbit tables."""

import random
from fractions import Fraction

import mpmath

from warpcurv import expr as ex


def random_expr(rng, coords, depth=3):
    """A random expression that is domain-safe on positive boxes.

    log is only applied to 2 + (...)^2 and denominators are 1 + (...)^2,
    so any point with positive rational coordinates evaluates cleanly.
    """
    if depth == 0 or rng.random() < 0.25:
        if rng.random() < 0.5:
            return ex.Coord(rng.choice(coords))
        return ex.const(Fraction(rng.randint(-6, 6), rng.randint(1, 5)))
    op = rng.choice(["add", "mul", "pow", "neg", "div", "exp", "log", "sin", "cos"])
    a = random_expr(rng, coords, depth - 1)
    if op == "add":
        return ex.add(a, random_expr(rng, coords, depth - 1))
    if op == "mul":
        return ex.mul(a, random_expr(rng, coords, depth - 1))
    if op == "pow":
        return ex.pow_(a, rng.randint(1, 3))
    if op == "neg":
        return ex.neg(a)
    if op == "div":
        den = ex.add(ex.const(1), ex.pow_(random_expr(rng, coords, depth - 1), 2))
        return ex.div(a, den)
    if op == "exp":
        # keep magnitudes sane for finite differencing
        return ex.exp_(ex.div(a, ex.const(4)))
    if op == "log":
        return ex.log_(ex.add(ex.const(2), ex.pow_(a, 2)))
    if op == "sin":
        return ex.sin_(a)
    return ex.cos_(a)


def rational_points(rng, coords, k, lo=Fraction(1, 3), hi=Fraction(2)):
    pts = []
    for _ in range(k):
        pts.append({c: lo + (hi - lo) * Fraction(rng.randint(0, 1024), 1024) for c in coords})
    return pts


# ---------------------------------------------------------------------------
# Reference charts used across the test modules.  These mirror the bundled
# fixture manifests; tests build them directly to stay independent of the CLI.

def chart_parse(chart):
    pnames = tuple(chart.params)
    return lambda s: ex.parse(s, coords=chart.coords, params=pnames)


def flat_chart(n):
    from warpcurv.tensor import Chart
    coords = tuple(f"x{i + 1}" for i in range(n))
    return Chart(coords, [[1 if i == j else 0 for j in range(n)] for i in range(n)])


def polar_chart():
    from warpcurv.tensor import Chart
    return Chart(("r", "th"), [["1", "0"], ["0", "r^2"]])


def sphere3_chart():
    """Round unit 3-sphere patch; the sampling box keeps both angles in (0, pi)."""
    from warpcurv.tensor import Chart
    return Chart(
        ("t1", "t2", "t3"),
        [["1", "0", "0"],
         ["0", "sin(t1)^2", "0"],
         ["0", "0", "sin(t1)^2*sin(t2)^2"]])


def ex2_chart():
    """Conformally flat 4-chart: g = (1 + 2 e^{x1}) * identity."""
    from warpcurv.tensor import Chart
    phi = "1 + 2*exp(x1)"
    return Chart(("x1", "x2", "x3", "x4"),
                 [[phi if i == j else "0" for j in range(4)] for i in range(4)])


def ex1_base_chart(a=1):
    """One-dimensional base segment with metric (1 + a(1+x1)^2)^(-1) dx1^2."""
    from warpcurv.tensor import Chart
    return Chart(("x1",), [["1/(1 + a*(1 + x1)^2)"]], params={"a": a})


def ex1_fiber_chart():
    """Lorentzian 4-fiber with a null direction; E abbreviates e^{2 x1}."""
    from warpcurv.tensor import Chart
    e2 = "exp(2*x1)"
    return Chart(
        ("x1", "x2", "x3", "x4"),
        [["-1", "0", "0", "0"],
         ["0", f"{e2}*x4^2", e2, "0"],
         ["0", e2, "0", "0"],
         ["0", "0", "0", e2]])


def ex2_base_chart():
    """One-dimensional base whose metric coefficient doubles as the warp."""
    from warpcurv.tensor import Chart
    return Chart(("x1",), [["1 + 2*exp(x1)"]])


def sphere2_chart():
    """Round unit 2-sphere patch."""
    from warpcurv.tensor import Chart
    return Chart(("t1", "t2"), [["1", "0"], ["0", "sin(t1)^2"]])


def aniso3_chart():
    """Curved 3-chart with two distinct exponential factors; not Einstein."""
    from warpcurv.tensor import Chart
    return Chart(("x1", "x2", "x3"),
                 [["1", "0", "0"],
                  ["0", "exp(2*x1)", "0"],
                  ["0", "0", "exp(4*x1)"]])


def hyper2_chart():
    """Hyperbolic 2-chart: dx1^2 + e^{2 x1} dx2^2."""
    from warpcurv.tensor import Chart
    return Chart(("x1", "x2"), [["1", "0"], ["0", "exp(2*x1)"]])


def ex1_warped_chart(a=1):
    """Direct 5-chart for the segment-times-fiber warped product, f = (1+x1)^2."""
    from warpcurv.tensor import Chart
    F = "(1 + x1)^2"
    E = "exp(2*x2)"
    rows = [["0"] * 5 for _ in range(5)]
    rows[0][0] = "1/(1 + a*(1 + x1)^2)"
    rows[1][1] = f"-{F}"
    rows[2][2] = f"{F}*{E}*x5^2"
    rows[2][3] = rows[3][2] = f"{F}*{E}"
    rows[4][4] = f"{F}*{E}"
    return Chart(("x1", "x2", "x3", "x4", "x5"), rows, params={"a": a})


# ---------------------------------------------------------------------------
# Finite-difference reconstruction of the connection and curvature directly
# from metric samples.  Used as an independent numerical oracle against the
# symbolic pipeline.  Step sizes are Fractions so shifted points stay exact.

def to_mpf(v):
    if isinstance(v, Fraction):
        return mpmath.mpf(v.numerator) / mpmath.mpf(v.denominator)
    return mpmath.mpf(v)


def _num_metric(chart, env, dps):
    pe = ex.PointEval(env, dps=dps)
    return [[to_mpf(pe.eval(entry)) for entry in row] for row in chart.metric]


def fd_christoffel(chart, env, h=Fraction(1, 10**15), dps=60):
    n = chart.n
    with mpmath.workdps(dps):
        hh = to_mpf(h)
        dg = []
        for c in chart.coords:
            up = dict(env)
            dn = dict(env)
            up[c] = env[c] + h
            dn[c] = env[c] - h
            gp = _num_metric(chart, up, dps)
            gm = _num_metric(chart, dn, dps)
            dg.append([[(gp[i][j] - gm[i][j]) / (2 * hh) for j in range(n)]
                       for i in range(n)])
        g0 = mpmath.matrix(_num_metric(chart, env, dps))
        gi = g0 ** -1
        gamma = [[[
            sum(gi[k, l] * (dg[i][j][l] + dg[j][i][l] - dg[l][i][j])
                for l in range(n)) / 2
            for j in range(n)] for i in range(n)] for k in range(n)]
    return gamma


def fd_riemann(chart, env, h=Fraction(1, 10**8), h_inner=Fraction(1, 10**15), dps=60):
    """Lowered curvature from nested finite differences of the metric alone."""
    n = chart.n
    with mpmath.workdps(dps):
        hh = to_mpf(h)
        dgam = []
        for c in chart.coords:
            up = dict(env)
            dn = dict(env)
            up[c] = env[c] + h
            dn[c] = env[c] - h
            gp = fd_christoffel(chart, up, h=h_inner, dps=dps)
            gm = fd_christoffel(chart, dn, h=h_inner, dps=dps)
            dgam.append([[[(gp[m][i][j] - gm[m][i][j]) / (2 * hh)
                          for j in range(n)] for i in range(n)] for m in range(n)])
        g0 = _num_metric(chart, env, dps)
        gam = fd_christoffel(chart, env, h=h_inner, dps=dps)
        R = [[[[None] * n for _ in range(n)] for _ in range(n)] for _ in range(n)]
        for i in range(n):
            for j in range(n):
                for k in range(n):
                    up = [dgam[i][m][j][k] - dgam[j][m][i][k]
                          + sum(gam[e][j][k] * gam[m][i][e]
                                - gam[e][i][k] * gam[m][j][e] for e in range(n))
                          for m in range(n)]
                    for l in range(n):
                        # lowering orientation matches the engine convention
                        R[i][j][k][l] = -sum(g0[l][m] * up[m] for m in range(n))
    return R


# ---------------------------------------------------------------------------
# Symmetry-orbit closure for frozen component tables.
#
# Curvature-type (0,4) tensors: antisymmetric in (1,2) and (3,4), symmetric
# under pair exchange.  The (0,6) outputs of the derivation and Tachibana
# operators inherit those symmetries in their first four slots and are
# antisymmetric in the last pair.  Frozen tables list one generator per orbit;
# these helpers expand them to full dense arrays.

def _close(entries, gens):
    table = dict(entries)
    frontier = list(table)
    while frontier:
        nxt = []
        for idx in frontier:
            val_sign_base = table[idx]
            for gen in gens:
                jdx, sgn = gen(idx)
                v = (val_sign_base[0], val_sign_base[1] * sgn)
                if jdx not in table:
                    table[jdx] = v
                    nxt.append(jdx)
                else:
                    have = table[jdx]
                    if have[0] != v[0] or have[1] != v[1]:
                        raise AssertionError(f"orbit conflict at {jdx}")
        frontier = nxt
    return table


def _gens4():
    return [
        lambda t: ((t[1], t[0], t[2], t[3]), -1),
        lambda t: ((t[0], t[1], t[3], t[2]), -1),
        lambda t: ((t[2], t[3], t[0], t[1]), +1),
    ]


def _gens6():
    return [
        lambda t: ((t[1], t[0], t[2], t[3], t[4], t[5]), -1),
        lambda t: ((t[0], t[1], t[3], t[2], t[4], t[5]), -1),
        lambda t: ((t[2], t[3], t[0], t[1], t[4], t[5]), +1),
        lambda t: ((t[0], t[1], t[2], t[3], t[5], t[4]), -1),
    ]


def expected_array(n, rank, generators, parse_fn):
    """Dense expected array from {index-string: expression-string} generators.

    Index strings are 1-based digit strings, e.g. "122414".  Unlisted entries
    are zero.  Returns a nested list of Expr.
    """
    entries = {}
    for key, sval in generators.items():
        idx = tuple(int(ch) - 1 for ch in key)
        assert len(idx) == rank
        entries[idx] = (sval, +1)
    gens = _gens4() if rank == 4 else _gens6()
    table = _close(entries, gens)
    zero = parse_fn("0")

    def build(prefix):
        if len(prefix) == rank:
            hit = table.get(prefix)
            if hit is None:
                return zero
            e = parse_fn(hit[0])
            return e if hit[1] > 0 else ex.neg(e)
        return [build(prefix + (i,)) for i in range(n)]

    return build(())
