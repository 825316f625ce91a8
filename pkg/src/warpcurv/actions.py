"""The two (0,k+2) operators built from a curvature-type tensor.

derivation_action turns a (0,4) tensor D into the endomorphism-valued form
D(X,Y) by raising its first slot and lets it act as a derivation on (0,k)
tensors.  tachibana does the same with the metric-wedge endomorphism X ^_A Y
of a symmetric (0,2) tensor A.  Both accept k in {2, 4}.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import product as iproduct

import mpmath

from . import expr as ex
from .expr import PointEval, zero_threshold
from .tensor import ChartError, TensorField, raise_first

_K_ALLOWED = {2, 4}


def _is_zero_const(e):
    return isinstance(e, ex.Const) and e.value == 0


def _alloc(n, rank):
    if rank == 1:
        return [None] * n
    return [_alloc(n, rank - 1) for _ in range(n)]


def _get(arr, idx):
    for i in idx:
        arr = arr[i]
    return arr


def _set(arr, idx, val):
    for i in idx[:-1]:
        arr = arr[i]
    arr[idx[-1]] = val


def _check_pair(D_valence_ok, D, H):
    if not D_valence_ok:
        raise ChartError("first operand has the wrong valence")
    if H.valence not in {(0, 2), (0, 4)}:
        raise ChartError("H must be a (0,2) or (0,4) tensor")
    if D.chart is not H.chart:
        raise ChartError("operands live on different charts")


def derivation_action(D: TensorField, H: TensorField) -> TensorField:
    """(D.H)_{i1..ik u v} = -sum_m D^t_{u v i_m} H_{i1.. t ..ik}."""
    _check_pair(D.valence == (0, 4), D, H)
    chart = D.chart
    n = chart.n
    k = H.rank
    dup = raise_first(D).comps
    h = H.comps
    out = _alloc(n, k + 2)
    for idx in iproduct(range(n), repeat=k):
        for u in range(n):
            for v in range(n):
                terms = []
                for m in range(k):
                    for t in range(n):
                        c = dup[t][u][v][idx[m]]
                        if _is_zero_const(c):
                            continue
                        hv = _get(h, idx[:m] + (t,) + idx[m + 1:])
                        if _is_zero_const(hv):
                            continue
                        terms.append(ex.mul(c, hv))
                _set(out, idx + (u, v), ex.neg(ex.add(*terms)))
    return TensorField(chart, (0, k + 2), out)


def tachibana(A: TensorField, H: TensorField) -> TensorField:
    """Q(A,H)_{i1..ik u v} = sum_m [A_{u i_m} H(..v..) - A_{v i_m} H(..u..)]."""
    _check_pair(A.valence == (0, 2) and A.sym == "sym2", A, H)
    chart = A.chart
    n = chart.n
    k = H.rank
    a = A.comps
    h = H.comps
    out = _alloc(n, k + 2)
    for idx in iproduct(range(n), repeat=k):
        for u in range(n):
            for v in range(n):
                terms = []
                for m in range(k):
                    au = a[u][idx[m]]
                    if not _is_zero_const(au):
                        hv = _get(h, idx[:m] + (v,) + idx[m + 1:])
                        if not _is_zero_const(hv):
                            terms.append(ex.mul(au, hv))
                    av = a[v][idx[m]]
                    if not _is_zero_const(av):
                        hu = _get(h, idx[:m] + (u,) + idx[m + 1:])
                        if not _is_zero_const(hu):
                            terms.append(ex.neg(ex.mul(av, hu)))
                _set(out, idx + (u, v), ex.add(*terms))
    return TensorField(chart, (0, k + 2), out)


# ---------------------------------------------------------------------------
# Per-bundle caching of the commonly used action tables


def _resolve(b, name):
    if name == "g":
        return b.chart.metric_field()
    return getattr(b, name)


def cached_derivation(b, dname: str, hname: str) -> TensorField:
    key = ("D", dname, hname)
    if key not in b._d:
        b._d[key] = derivation_action(_resolve(b, dname), _resolve(b, hname))
    return b._d[key]


def cached_tachibana(b, aname: str, hname: str) -> TensorField:
    key = ("Q", aname, hname)
    if key not in b._d:
        b._d[key] = tachibana(_resolve(b, aname), _resolve(b, hname))
    return b._d[key]


# ---------------------------------------------------------------------------
# Deszcz sectional ratio


def _exact_vec(vec, n):
    v = [Fraction(x) for x in vec]
    if len(v) != n:
        raise ValueError("plane vector has the wrong dimension")
    return v


def _span_rank2(v, w):
    n = len(v)
    return any(v[i] * w[j] - v[j] * w[i] for i in range(n) for j in range(i + 1, n))


def deszcz_ratio(b, point, pi1, pi2, dps=50):
    """Pointwise ratio (R.R)/(Q(g,R)) on the plane pair (pi1, pi2).

    Each plane is a pair of exact-rational spanning vectors.  Returns a dict
    with "defined", "ratio", "numerator", "denominator"; the ratio is None
    when the Tachibana denominator vanishes within the zero-test tolerance
    (curvature-degenerate plane pair).
    """
    n = b.chart.n
    v, w = (_exact_vec(x, n) for x in pi1)
    x, y = (_exact_vec(t, n) for t in pi2)
    if not _span_rank2(v, w) or not _span_rank2(x, y):
        raise ValueError("degenerate plane span")
    rr = cached_derivation(b, "R", "R").comps
    qgr = cached_tachibana(b, "g", "R").comps
    pe = PointEval(point, dps=dps)
    weights = (v, w, v, w, x, y)

    def contract(comps):
        total = mpmath.mpf(0)
        scale = mpmath.mpf(0)
        for idx in iproduct(*(range(n),) * 6):
            wt = Fraction(1)
            for slot, i in enumerate(idx):
                wt *= weights[slot][i]
                if wt == 0:
                    break
            if wt == 0:
                continue
            e = _get(comps, idx)
            if _is_zero_const(e):
                continue
            val, sub = pe.eval_scaled(e)
            wtm = mpmath.mpf(wt.numerator) / mpmath.mpf(wt.denominator)
            term = _to_mpf(val) * wtm
            total += term
            for s in (abs(term), sub * abs(wtm)):
                if s > scale:
                    scale = s
        return total, scale

    with mpmath.workdps(dps):
        num, s1 = contract(rr)
        den, s2 = contract(qgr)
        thr = zero_threshold(max(s1, s2), dps=dps)
        if abs(den) <= thr:
            return {"defined": False, "ratio": None,
                    "numerator": num, "denominator": den}
        return {"defined": True, "ratio": num / den,
                "numerator": num, "denominator": den}


def _to_mpf(v):
    if isinstance(v, Fraction):
        return mpmath.mpf(v.numerator) / mpmath.mpf(v.denominator)
    return mpmath.mpf(v)
