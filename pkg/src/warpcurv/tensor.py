"""Charts and valence-typed component tensors over them.

A Chart is a coordinate system with a symmetric, non-degenerate metric whose
entries are expression trees, plus declared parameters (with rational test
values) and a per-coordinate sampling box for the randomized zero test.

TensorFields are dense nested component arrays.  Storage is deliberately
dense: at n <= 5 the largest array is 5^6 entries, and dense indexing keeps
cross-checks against independent loop oracles trivial.
"""

from __future__ import annotations

from fractions import Fraction

import mpmath

from . import expr as ex
from .expr import (
    DEFAULT_SEED, DomainError, Expr, PointEval, is_zero_many,
    parse, sample_box_points, zero_threshold,
)


class ChartError(Exception):
    pass


def _as_expr(entry, coords, params):
    if isinstance(entry, Expr):
        bad_c = ex.free_coords(entry) - set(coords)
        bad_p = ex.free_params(entry) - set(params)
        if bad_c or bad_p:
            raise ChartError(f"undeclared names in entry: {sorted(bad_c | bad_p)}")
        return entry
    if isinstance(entry, (int, Fraction)):
        return ex.const(entry)
    if isinstance(entry, str):
        try:
            return parse(entry, coords=coords, params=params)
        except ex.ParseError as err:
            raise ChartError(f"bad expression {entry!r}: {err}") from None
    raise ChartError(f"unsupported entry type: {type(entry).__name__}")


class Chart:
    """Coordinates + metric + parameters + sampling box."""

    def __init__(self, coords, metric, params=None, box=None, validate=True):
        coords = tuple(coords)
        if not coords or len(set(coords)) != len(coords):
            raise ChartError("coordinates must be non-empty and distinct")
        self.coords = coords
        self.n = len(coords)
        self.params = {k: Fraction(v) for k, v in (params or {}).items()}
        if set(self.params) & set(coords):
            raise ChartError("parameter names collide with coordinates")
        self.box = dict(box or {})
        if len(metric) != self.n or any(len(row) != self.n for row in metric):
            raise ChartError(f"metric must be {self.n}x{self.n}")
        pnames = tuple(self.params)
        self.metric = [
            [_as_expr(entry, coords, pnames) for entry in row] for row in metric
        ]
        self._cache = {}
        if validate:
            self._validate()

    # -- sampling ----------------------------------------------------------

    def sample_points(self, k=8, seed=DEFAULT_SEED, params=None):
        merged = dict(self.params)
        if params:
            merged.update(params)
        return sample_box_points(self.coords, self.box, k, seed, params=merged)

    def is_zero(self, e, trials=8, seed=DEFAULT_SEED, params=None, dps=50):
        merged = dict(self.params)
        if params:
            merged.update(params)
        return ex.is_zero(e, coords=self.coords, box=self.box, params=merged,
                          trials=trials, seed=seed, dps=dps)

    def is_zero_many(self, exprs, trials=8, seed=DEFAULT_SEED, params=None, dps=50):
        merged = dict(self.params)
        if params:
            merged.update(params)
        return is_zero_many(exprs, self.coords, box=self.box, params=merged,
                            trials=trials, seed=seed, dps=dps)

    # -- validation --------------------------------------------------------

    def _validate(self):
        for i in range(self.n):
            for j in range(i + 1, self.n):
                d = ex.sub(self.metric[i][j], self.metric[j][i])
                try:
                    if not self.is_zero(d):
                        raise ChartError(f"metric not symmetric at ({i + 1},{j + 1})")
                except ex.InconclusiveError:
                    raise ChartError("metric symmetry check inconclusive") from None
        pts = self.sample_points()
        valid = 0
        for pt in pts:
            pe = PointEval(pt)
            try:
                mat = [[_to_mpf(pe.eval(entry)) for entry in row] for row in self.metric]
            except DomainError:
                continue
            valid += 1
            det, scale = _numeric_det(mat)
            if abs(det) <= zero_threshold(scale):
                raise ChartError(f"metric degenerate at sampled point {pt}")
        if valid == 0:
            raise ChartError("metric undefined everywhere on the sampling box")

    # -- derived fields ----------------------------------------------------

    def metric_field(self):
        if "metric_field" not in self._cache:
            self._cache["metric_field"] = TensorField(self, (0, 2), self.metric, sym="sym2")
        return self._cache["metric_field"]


def _to_mpf(v):
    if isinstance(v, Fraction):
        return mpmath.mpf(v.numerator) / mpmath.mpf(v.denominator)
    return mpmath.mpf(v)


def _numeric_det(mat):
    """LU determinant with partial pivoting; returns (det, max intermediate)."""
    n = len(mat)
    a = [row[:] for row in mat]
    det = mpmath.mpf(1)
    scale = max((abs(x) for row in a for x in row), default=mpmath.mpf(0))
    for col in range(n):
        piv = max(range(col, n), key=lambda r: abs(a[r][col]))
        if a[piv][col] == 0:
            return mpmath.mpf(0), scale
        if piv != col:
            a[col], a[piv] = a[piv], a[col]
            det = -det
        det *= a[col][col]
        for r in range(col + 1, n):
            f = a[r][col] / a[col][col]
            for c2 in range(col, n):
                a[r][c2] -= f * a[col][c2]
                if abs(a[r][c2]) > scale:
                    scale = abs(a[r][c2])
    if abs(det) > scale:
        scale = abs(det)
    return det, scale


class TensorField:
    """Dense component tensor on a chart.

    valence is a (contravariant, covariant) pair; comps is a nested list with
    one level per index.  sym is an advisory tag: "sym2" is verified at
    construction (cheap), "curvature" is checked on demand via
    is_generalized_curvature.
    """

    VALENCES = {(0, 2), (0, 4), (0, 6), (1, 3), (2, 0)}

    def __init__(self, chart, valence, comps, sym="none"):
        if tuple(valence) not in self.VALENCES:
            raise ChartError(f"unsupported valence {valence}")
        self.chart = chart
        self.valence = tuple(valence)
        self.rank = sum(self.valence)
        self.sym = sym
        pnames = tuple(chart.params)
        self.comps = self._coerce(comps, self.rank, chart.coords, pnames)
        if sym == "sym2":
            if self.rank != 2:
                raise ChartError("sym2 tag requires a rank-2 tensor")
            self._check_sym2()

    def _coerce(self, comps, depth, coords, pnames):
        if depth == 0:
            return _as_expr(comps, coords, pnames)
        if not isinstance(comps, (list, tuple)) or len(comps) != self.chart.n:
            raise ChartError("component array extent mismatch")
        return [self._coerce(c, depth - 1, coords, pnames) for c in comps]

    def _check_sym2(self):
        n = self.chart.n
        defects = []
        for i in range(n):
            for j in range(i + 1, n):
                defects.append(ex.sub(self.comps[i][j], self.comps[j][i]))
        if defects and not all(self.chart.is_zero_many(defects)):
            raise ChartError("components tagged sym2 are not symmetric")

    def comp(self, idx):
        v = self.comps
        for i in idx:
            v = v[i]
        return v

    def __getitem__(self, idx):
        return self.comp(idx)

    def flatten(self):
        out = []

        def walk(v, depth):
            if depth == 0:
                out.append(v)
                return
            for c in v:
                walk(c, depth - 1)

        walk(self.comps, self.rank)
        return out


def _require_same_chart(*fields):
    charts = {id(f.chart) for f in fields}
    if len(charts) != 1:
        raise ChartError("tensor fields live on different charts")


def _require(field, valence, sym=None):
    if field.valence != valence:
        raise ChartError(f"expected valence {valence}, got {field.valence}")
    if sym is not None and field.sym != sym:
        raise ChartError(f"expected symmetry tag {sym!r}")


# ---------------------------------------------------------------------------
# Metric inverse


def metric_inverse(chart):
    """Inverse metric as a (2,0) field; exact cofactor for n <= 5, else
    fraction-free elimination with zero-tested pivots."""
    if "metric_inverse" in chart._cache:
        return chart._cache["metric_inverse"]
    if chart.n <= 5:
        out = _cofactor_inverse(chart)
    else:
        out = _elimination_inverse(chart)
    chart._cache["metric_inverse"] = out
    return out


def _det_expr(mat):
    n = len(mat)
    if n == 1:
        return mat[0][0]
    acc = []
    for j in range(n):
        minor = [row[:j] + row[j + 1:] for row in mat[1:]]
        term = ex.mul(mat[0][j], _det_expr(minor))
        acc.append(term if j % 2 == 0 else ex.neg(term))
    return ex.add(*acc)


def _cofactor_inverse(chart):
    g = chart.metric
    n = chart.n
    det = _det_expr(g)
    inv = [[None] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            minor = [
                [g[r][c] for c in range(n) if c != i]
                for r in range(n) if r != j
            ]
            cof = _det_expr(minor) if n > 1 else ex.const(1)
            signed = cof if (i + j) % 2 == 0 else ex.neg(cof)
            inv[i][j] = ex.div(signed, det)
    return TensorField(chart, (2, 0), inv, sym="sym2")


def _elimination_inverse(chart):
    n = chart.n
    a = [row[:] + [ex.const(1 if r == c else 0) for c in range(n)]
         for r, row in enumerate(chart.metric)]
    for col in range(n):
        piv = None
        for r in range(col, n):
            if not chart.is_zero(a[r][col]):
                piv = r
                break
        if piv is None:
            raise ChartError("metric singular during elimination")
        if piv != col:
            a[col], a[piv] = a[piv], a[col]
        pivot = a[col][col]
        a[col] = [ex.div(v, pivot) for v in a[col]]
        for r in range(n):
            if r == col:
                continue
            f = a[r][col]
            if isinstance(f, ex.Const) and f.value == 0:
                continue
            a[r] = [ex.sub(a[r][c], ex.mul(f, a[col][c])) for c in range(2 * n)]
    inv = [row[n:] for row in a]
    return TensorField(chart, (2, 0), inv, sym="sym2")


# ---------------------------------------------------------------------------
# Kulkarni-Nomizu product and the Gaussian tensor


def kulkarni_nomizu(A, E):
    """(A ^ E)_ijkl = A_il E_jk + A_jk E_il - A_ik E_jl - A_jl E_ik."""
    _require_same_chart(A, E)
    _require(A, (0, 2))
    _require(E, (0, 2))
    n = A.chart.n
    a = A.comps
    e = E.comps
    comps = [[[[
        ex.add(
            ex.mul(a[i][l], e[j][k]),
            ex.mul(a[j][k], e[i][l]),
            ex.neg(ex.mul(a[i][k], e[j][l])),
            ex.neg(ex.mul(a[j][l], e[i][k])),
        )
        for l in range(n)] for k in range(n)] for j in range(n)] for i in range(n)]
    return TensorField(A.chart, (0, 4), comps, sym="curvature")


def gaussian(chart):
    """G = (1/2) g ^ g, i.e. G_ijkl = g_il g_jk - g_ik g_jl."""
    if "gaussian" in chart._cache:
        return chart._cache["gaussian"]
    g = chart.metric
    n = chart.n
    comps = [[[[
        ex.sub(ex.mul(g[i][l], g[j][k]), ex.mul(g[i][k], g[j][l]))
        for l in range(n)] for k in range(n)] for j in range(n)] for i in range(n)]
    out = TensorField(chart, (0, 4), comps, sym="curvature")
    chart._cache["gaussian"] = out
    return out


# ---------------------------------------------------------------------------
# Index raising and symmetry classification


def raise_first(D):
    """Associated (1,3) tensor: D^l_ijk = g^lm D_ijkm."""
    _require(D, (0, 4))
    chart = D.chart
    gi = metric_inverse(chart).comps
    n = chart.n
    d = D.comps
    comps = [[[[
        ex.add(*[ex.mul(gi[l][m], d[i][j][k][m]) for m in range(n)])
        for k in range(n)] for j in range(n)] for i in range(n)] for l in range(n)]
    return TensorField(chart, (1, 3), comps)


def is_generalized_curvature(D, trials=8, seed=DEFAULT_SEED):
    """True iff D is antisymmetric in its first pair, symmetric under pair
    exchange, and satisfies the first Bianchi identity (all under the zero
    test).  Antisymmetry in the last pair follows from these."""
    _require(D, (0, 4))
    n = D.chart.n
    d = D.comps
    defects = []
    for i in range(n):
        for j in range(i, n):
            for k in range(n):
                for l in range(n):
                    defects.append(ex.add(d[i][j][k][l], d[j][i][k][l]))
    for i in range(n):
        for j in range(n):
            for k in range(n):
                for l in range(n):
                    defects.append(ex.sub(d[i][j][k][l], d[k][l][i][j]))
                    defects.append(ex.add(d[i][j][k][l], d[j][k][i][l], d[k][i][j][l]))
    return all(D.chart.is_zero_many(defects, trials=trials, seed=seed))


# ---------------------------------------------------------------------------
# Pointwise linear dependence


def linear_dependence_check(A, E, point, dps=50, rel_tol="1e-20"):
    """Are the flattened component vectors of A and E parallel at `point`?

    Returns {"dependent": bool, "ratio": value or None}; the ratio r satisfies
    A = r E and is only reported when both tensors are nonzero there.
    """
    _require_same_chart(A, E)
    if A.valence != E.valence:
        raise ChartError("valence mismatch")
    pe = PointEval(point, dps=dps)
    with mpmath.workdps(dps):
        va = [_to_mpf(pe.eval(c)) for c in A.flatten()]
        vb = [_to_mpf(pe.eval(c)) for c in E.flatten()]
        tol = mpmath.mpf(rel_tol)
        na = mpmath.sqrt(sum(x * x for x in va))
        nb = mpmath.sqrt(sum(x * x for x in vb))
        scale = max(na, nb)
        if scale == 0:
            return {"dependent": True, "ratio": None}
        if na <= tol * scale or nb <= tol * scale:
            return {"dependent": True, "ratio": None}
        dot = sum(x * y for x, y in zip(va, vb))
        gram = na * na * nb * nb - dot * dot
        if gram < 0:
            gram = mpmath.mpf(0)
        dependent = mpmath.sqrt(gram) <= tol * na * nb
        ratio = dot / (nb * nb) if dependent else None
    return {"dependent": bool(dependent), "ratio": ratio}
