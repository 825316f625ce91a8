"""Warped-product charts built from a base, a fiber, and a warping function.

The metric is block diagonal: the base block is untouched, the fiber block is
scaled by f(base).  Every curvature-level and action-level tensor of the
product then decomposes into closed-form blocks over base and fiber data.
This module computes those blocks, assembles them into full product tensors
(the direct computation on the assembled chart is the oracle they are tested
against), and checks the five block conditions (I)-(V) that characterize
R.R = L1 Q(g,R) + L2 Q(S,R) on such a product, together with the associated
trichotomy and dichotomy classification of where the conditions can hold.

Index bookkeeping: product coordinates are the base coordinates followed by
the fiber coordinates renamed x{p+1}..x{n}.  Reports carry both labelings.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product as iproduct

import mpmath

from . import expr as ex
from .actions import (
    cached_derivation, cached_tachibana, derivation_action, tachibana,
)
from .conditions import einstein_check
from .curvature import bundle, covariant_hessian
from .expr import DEFAULT_SEED, DomainError, PointEval, zero_threshold
from .tensor import Chart, ChartError, TensorField, _as_expr, gaussian, metric_inverse

LABEL_T = "T = L1 g"
LABEL_FIBER = "fiber-Einstein"
LABEL_BASE = "base-flat"
LABEL_NONE = "none"

CONDITION_NAMES = ("I", "II", "III", "IV", "V")


class WarpedSpec:
    """A base chart, a fiber chart (renamed into product coordinates), and f.

    f must be a base-coordinate expression, positive on the base sampling
    box.  The renamed fiber coordinate x{p+alpha} corresponds to the fiber's
    alpha-th original coordinate; `fiber_map` records the correspondence.
    """

    def __init__(self, base, fiber, f):
        self.base = base
        self.p = base.n
        self.q = fiber.n
        self.n = self.p + self.q
        self.f = _as_expr(f, base.coords, tuple(base.params))
        mapping = {fiber.coords[i]: f"x{self.p + i + 1}" for i in range(fiber.n)}
        new_names = tuple(mapping[c] for c in fiber.coords)
        clash = set(new_names) & set(base.coords)
        if clash:
            raise ChartError(f"renamed fiber coordinates collide with base: {sorted(clash)}")
        self.fiber_map = mapping
        for k, v in fiber.params.items():
            if k in base.params and base.params[k] != v:
                raise ChartError(f"parameter {k!r} has conflicting values")
        self.params = dict(fiber.params)
        self.params.update(base.params)
        fmetric = [[ex.rename(fiber.metric[i][j], mapping) for j in range(fiber.n)]
                   for i in range(fiber.n)]
        fbox = {mapping.get(k, k): v for k, v in fiber.box.items()}
        self.fiber = Chart(new_names, fmetric, params=fiber.params, box=fbox)
        self._check_f_positive()
        self._cache = {}

    def _check_f_positive(self):
        valid = 0
        with mpmath.workdps(50):
            for pt in self.base.sample_points():
                pe = PointEval(pt)
                try:
                    v = pe.eval(self.f)
                except DomainError:
                    continue
                valid += 1
                if not v > 0:
                    raise ChartError(f"warping function must be positive on the box, got {v} at {pt}")
        if valid == 0:
            raise ChartError("warping function not evaluable on the sampling box")


def make_spec(base, fiber, f):
    return WarpedSpec(base, fiber, f)


def assemble_product(spec):
    """Product chart: base block as-is, fiber block scaled by f, mixed zero."""
    if "product" not in spec._cache:
        p, q, n = spec.p, spec.q, spec.n
        rows = [[ex.const(0) for _ in range(n)] for _ in range(n)]
        for i in range(p):
            for j in range(p):
                rows[i][j] = spec.base.metric[i][j]
        for i in range(q):
            for j in range(q):
                rows[p + i][p + j] = ex.mul(spec.f, spec.fiber.metric[i][j])
        coords = tuple(spec.base.coords) + tuple(spec.fiber.coords)
        box = dict(spec.base.box)
        box.update(spec.fiber.box)
        spec._cache["product"] = Chart(coords, rows, params=spec.params, box=box)
    return spec._cache["product"]


@dataclass
class WarpedAux:
    T: TensorField          # (1/2f)(Hess f - (1/2f) df x df), sym2 on base
    trT: ex.Expr
    Delta: ex.Expr          # |df|^2 / 4f^2
    Omega: ex.Expr          # -f((q-1) Delta + tr T)
    T2: TensorField         # T^t_a T_ts, sym2 on base
    Traised: list           # T^t_s = gbar^{ta} T_as


def auxiliaries(spec):
    if "aux" in spec._cache:
        return spec._cache["aux"]
    b = spec.base
    p, q, f = spec.p, spec.q, spec.f
    H = covariant_hessian(b, f)
    fa = [ex.diff(f, c) for c in b.coords]
    inv2f = ex.div(ex.const(1), ex.mul(ex.const(2), f))
    T = [[ex.mul(inv2f, ex.sub(H.comps[a][c], ex.mul(inv2f, ex.mul(fa[a], fa[c]))))
          for c in range(p)] for a in range(p)]
    gi = metric_inverse(b).comps
    trT = ex.add(*[ex.mul(gi[a][c], T[a][c]) for a in range(p) for c in range(p)])
    Delta = ex.mul(ex.div(ex.const(1), ex.mul(ex.const(4), ex.mul(f, f))),
                   ex.add(*[ex.mul(gi[a][c], ex.mul(fa[a], fa[c]))
                            for a in range(p) for c in range(p)]))
    Omega = ex.neg(ex.mul(f, ex.add(ex.mul(ex.const(q - 1), Delta), trT)))
    Traised = [[ex.add(*[ex.mul(gi[t][a], T[a][s]) for a in range(p)])
                for s in range(p)] for t in range(p)]
    T2 = [[ex.add(*[ex.mul(Traised[t][a], T[t][s]) for t in range(p)])
           for s in range(p)] for a in range(p)]
    aux = WarpedAux(
        T=TensorField(b, (0, 2), T, sym="sym2"),
        trT=trT, Delta=Delta, Omega=Omega,
        T2=TensorField(b, (0, 2), T2, sym="sym2"),
        Traised=Traised,
    )
    spec._cache["aux"] = aux
    return aux


# ---------------------------------------------------------------------------
# Shared block context


def _z(e):
    return isinstance(e, ex.Const) and e.value == 0


def _mulnz(*fs):
    if any(_z(e) for e in fs):
        return ex.const(0)
    return ex.mul(*fs)


def _subnz(a, b):
    if _z(b):
        return a
    if _z(a):
        return ex.neg(b)
    return ex.sub(a, b)


def _addnz(a, b):
    if _z(a):
        return b
    if _z(b):
        return a
    return ex.add(a, b)


class _Ctx:
    """Bundles plus every base/fiber action tensor the block formulas use."""

    def __init__(self, spec, aux):
        p, q = spec.p, spec.q
        bb = bundle(spec.base)
        fb = bundle(spec.fiber)
        self.bb, self.fb = bb, fb
        T = aux.T.comps
        self.Shat = [[ex.add(bb.S.comps[a][c], ex.mul(ex.const(q), T[a][c]))
                      for c in range(p)] for a in range(p)]
        self.Scheck = [[ex.sub(fb.S.comps[al][be],
                               ex.mul(aux.Omega, spec.fiber.metric[al][be]))
                        for be in range(q)] for al in range(q)]
        ShatF = TensorField(spec.base, (0, 2), self.Shat, sym="sym2")
        gbarF = TensorField(spec.base, (0, 2),
                            [[spec.base.metric[i][j] for j in range(p)]
                             for i in range(p)], sym="sym2")
        self.RRb = cached_derivation(bb, "R", "R")
        self.QgRb = cached_tachibana(bb, "g", "R")
        self.QSRhat = tachibana(ShatF, bb.R)
        self.RTb = derivation_action(bb.R, aux.T)
        self.QgTb = tachibana(gbarF, aux.T)
        self.QSTb = tachibana(bb.S, aux.T)
        self.RRf = cached_derivation(fb, "R", "R")
        self.QgRf = cached_tachibana(fb, "g", "R")
        self.QSRf = cached_tachibana(fb, "S", "R")
        self.QgSf = cached_tachibana(fb, "g", "S")
        self.Gf = gaussian(spec.fiber)
        self.QSGf = tachibana(fb.S, self.Gf)
        fD = ex.mul(spec.f, aux.Delta)
        self.RfDG = [[[[_addnz(fb.R.comps[a][b][c][d],
                               _mulnz(fD, self.Gf.comps[a][b][c][d]))
                        for d in range(q)] for c in range(q)]
                      for b in range(q)] for a in range(q)]


def _ctx(spec):
    if "ctx" not in spec._cache:
        spec._cache["ctx"] = _Ctx(spec, auxiliaries(spec))
    return spec._cache["ctx"]


def _normalize6(t, p):
    """Sort a six-index tuple into block-canonical form.

    Within the first and third pairs a fiber index may precede a base index;
    swapping costs a sign (pair antisymmetry).  The first two pairs may be
    exchanged freely.  Returns (signature, normalized pairs, sign) where the
    signature counts fiber indices per pair.
    """
    pairs = [[t[0], t[1]], [t[2], t[3]], [t[4], t[5]]]
    sign = 1
    norm = []
    for i, j in pairs:
        ci = (i >= p) + (j >= p)
        if ci == 1 and i >= p:
            i, j = j, i
            sign = -sign
        norm.append((ci, i, j))
    if norm[0][0] > norm[1][0]:
        norm[0], norm[1] = norm[1], norm[0]
    sig = (norm[0][0], norm[1][0], norm[2][0])
    return sig, norm, sign


def _entry6(system, spec, aux, c, t):
    """One component of the block-assembled R.R / Q(g,R) / Q(S,R)."""
    p, q, f = spec.p, spec.q, spec.f
    sig, norm, sign = _normalize6(t, p)
    sgn = ex.const(sign)
    gt = spec.fiber.metric
    gb = spec.base.metric
    T = aux.T.comps

    def fi(i):
        return i - p

    if sig == (0, 0, 0):
        idx = tuple(x for pr in norm for x in pr[1:])
        src = {"RR": c.RRb, "QgR": c.QgRb, "QSR": c.QSRhat}[system]
        return _mulnz(sgn, src.comp(idx))

    if sig == (1, 1, 0):
        a, al = norm[0][1], fi(norm[0][2])
        b, be = norm[1][1], fi(norm[1][2])
        s, u = norm[2][1], norm[2][2]
        src = {"RR": c.RTb, "QgR": c.QgTb, "QSR": c.QSTb}[system]
        return _mulnz(ex.const(-sign), f, gt[al][be], src.comp((a, b, s, u)))

    if sig == (0, 1, 1):
        a, b = norm[0][1], norm[0][2]
        d, al = norm[1][1], fi(norm[1][2])
        s, et = norm[2][1], fi(norm[2][2])
        if system == "RR":
            contr = [_mulnz(aux.Traised[tt][s], c.bb.R.comps[a][b][d][tt])
                     for tt in range(p)]
            acc = ex.const(0)
            for term in contr:
                acc = _addnz(acc, term)
            core = _subnz(_subnz(_mulnz(T[a][s], T[b][d]),
                                 _mulnz(T[a][d], T[b][s])), acc)
            return _mulnz(sgn, f, gt[al][et], core)
        if system == "QgR":
            core = _subnz(_subnz(_mulnz(gb[a][s], T[b][d]),
                                 _mulnz(gb[b][s], T[a][d])),
                          c.bb.R.comps[a][b][d][s])
            return _mulnz(sgn, f, gt[al][et], core)
        core = _subnz(_mulnz(c.Shat[a][s], T[b][d]),
                      _mulnz(c.Shat[b][s], T[a][d]))
        return _mulnz(sgn, _subnz(_mulnz(f, gt[al][et], core),
                                  _mulnz(c.bb.R.comps[a][b][d][s],
                                         c.Scheck[al][et])))

    if sig == (1, 2, 1):
        a, al = norm[0][1], fi(norm[0][2])
        be, ga = fi(norm[1][1]), fi(norm[1][2])
        s, et = norm[2][1], fi(norm[2][2])
        if system == "RR":
            t1 = _mulnz(f, T[a][s], c.RfDG[et][al][be][ga])
            t2 = _mulnz(f, f, aux.T2.comps[a][s], c.Gf.comps[et][al][be][ga])
            return _mulnz(sgn, _subnz(t1, t2))
        if system == "QgR":
            t1 = _mulnz(f, gb[a][s], c.fb.R.comps[et][al][be][ga])
            coef = _subnz(_mulnz(aux.Delta, gb[a][s]), T[a][s])
            t2 = _mulnz(f, f, coef, c.Gf.comps[et][al][be][ga])
            return _mulnz(sgn, _addnz(t1, t2))
        t1 = _mulnz(f, c.Shat[a][s], c.RfDG[et][al][be][ga])
        core = _subnz(_mulnz(gt[al][ga], c.Scheck[be][et]),
                      _mulnz(gt[al][be], c.Scheck[ga][et]))
        t2 = _mulnz(f, T[a][s], core)
        return _mulnz(sgn, _addnz(t1, t2))

    if sig == (1, 1, 2):
        if system != "QSR":
            return ex.const(0)
        a, al = norm[0][1], fi(norm[0][2])
        b, be = norm[1][1], fi(norm[1][2])
        mu, et = fi(norm[2][1]), fi(norm[2][2])
        return _mulnz(sgn, f, T[a][b], c.QgSf.comp((al, be, mu, et)))

    if sig == (2, 2, 2):
        idx = tuple(fi(x) for pr in norm for x in pr[1:])
        if system == "RR":
            return _mulnz(sgn, _addnz(_mulnz(f, c.RRf.comp(idx)),
                                      _mulnz(f, f, aux.Delta, c.QgRf.comp(idx))))
        if system == "QgR":
            return _mulnz(sgn, f, f, c.QgRf.comp(idx))
        inner = _addnz(_subnz(c.QSRf.comp(idx),
                              _mulnz(aux.Omega, c.QgRf.comp(idx))),
                       _mulnz(f, aux.Delta, c.QSGf.comp(idx)))
        return _mulnz(sgn, f, inner)

    return ex.const(0)


def _entry4(spec, aux, c, t):
    """One component of the block-assembled curvature tensor."""
    p, f = spec.p, spec.f
    i, j, k, l = t
    m = [x >= p for x in t]
    if not any(m):
        return c.bb.R.comps[i][j][k][l]
    if all(m):
        a, b, d, e = (x - p for x in t)
        return _mulnz(f, c.RfDG[a][b][d][e])
    if m[0] != m[1] and m[2] != m[3]:
        sign = 1
        a, al = (i, j) if not m[0] else (j, i)
        if m[0]:
            sign = -sign
        b, be = (k, l) if not m[2] else (l, k)
        if m[2]:
            sign = -sign
        return _mulnz(ex.const(-sign), f, aux.T.comps[a][b],
                      spec.fiber.metric[al - p][be - p])
    return ex.const(0)


def block_curvature(spec):
    """Assembled curvature tensor, Ricci tensor, and scalar from the blocks."""
    if "curv" in spec._cache:
        return spec._cache["curv"]
    aux = auxiliaries(spec)
    c = _ctx(spec)
    prod = assemble_product(spec)
    p, q, n = spec.p, spec.q, spec.n
    R = [[[[_entry4(spec, aux, c, (i, j, k, l)) for l in range(n)]
           for k in range(n)] for j in range(n)] for i in range(n)]
    S = [[ex.const(0) for _ in range(n)] for _ in range(n)]
    for a in range(p):
        for b in range(p):
            S[a][b] = c.Shat[a][b]
    for al in range(q):
        for be in range(q):
            S[p + al][p + be] = c.Scheck[al][be]
    kappa = ex.add(c.bb.kappa, ex.div(c.fb.kappa, spec.f),
                   ex.mul(ex.const(q),
                          ex.add(ex.mul(ex.const(q - 1), aux.Delta),
                                 ex.mul(ex.const(2), aux.trT))))
    out = {
        "R": TensorField(prod, (0, 4), R),
        "S": TensorField(prod, (0, 2), S, sym="sym2"),
        "kappa": kappa,
    }
    spec._cache["curv"] = out
    return out


def block_actions(spec):
    """Assembled R.R, Q(g,R), Q(S,R) on the product chart from the blocks."""
    if "acts" in spec._cache:
        return spec._cache["acts"]
    aux = auxiliaries(spec)
    c = _ctx(spec)
    prod = assemble_product(spec)
    n = spec.n
    out = {}
    for system in ("RR", "QgR", "QSR"):
        comps = _alloc6(n)
        for t in iproduct(range(n), repeat=6):
            _set6(comps, t, _entry6(system, spec, aux, c, t))
        out[system] = TensorField(prod, (0, 6), comps)
    spec._cache["acts"] = out
    return out


def _alloc6(n):
    def lvl(k):
        if k == 0:
            return ex.const(0)
        return [lvl(k - 1) for _ in range(n)]
    return lvl(6)


def _set6(comps, t, v):
    comps[t[0]][t[1]][t[2]][t[3]][t[4]][t[5]] = v


# ---------------------------------------------------------------------------
# Conditions (I)-(V)


def _base_scalar(spec, val, what):
    e = _as_expr(val, assemble_product(spec).coords, tuple(spec.params))
    bad = ex.free_coords(e) - set(spec.base.coords)
    if bad:
        raise ValueError(f"{what} may only use base coordinates, found {sorted(bad)}")
    return e


def verify_conditions(spec, L1, L2, trials=8, seed=DEFAULT_SEED):
    """Check the five block conditions for R.R = L1 Q(g,R) + L2 Q(S,R).

    (I) is the base-block equation, (II) and (III) the two mixed-block
    equations, (IV) the vanishing of L2 T Q(gf,Sf) decided per factor, and
    (V) the fiber-block equation.  Verdicts are claims over the sampling
    box only.  The corollary equation R.T = L1 Q(g,T) + L2 Q(S,T) on the
    base is reported alongside.  For every failed equation, "witnesses"
    records one offending component (1-based index and defect expression).
    """
    L1 = _base_scalar(spec, L1, "L1")
    L2 = _base_scalar(spec, L2, "L2")
    aux = auxiliaries(spec)
    c = _ctx(spec)
    prod = assemble_product(spec)
    p, q, f = spec.p, spec.q, spec.f
    out = {"witnesses": {}}

    def combo(t):
        return _subnz(_entry6("RR", spec, aux, c, t),
                      _addnz(_mulnz(L1, _entry6("QgR", spec, aux, c, t)),
                             _mulnz(L2, _entry6("QSR", spec, aux, c, t))))

    def judge(name, chart, tuples, exprs):
        flags = chart.is_zero_many(exprs, trials=trials, seed=seed)
        out[name] = all(flags)
        if not out[name]:
            k = flags.index(False)
            out["witnesses"][name] = {
                "index": tuple(i + 1 for i in tuples[k]),
                "defect": str(exprs[k]),
            }

    tup = list(iproduct(range(p), repeat=6))
    judge("I", spec.base,
          tup,
          [_subnz(c.RRb.comp(t),
                  _addnz(_mulnz(L1, c.QgRb.comp(t)),
                         _mulnz(L2, c.QSRhat.comp(t)))) for t in tup])

    tup = [(a, b, d_, al + p, s, et + p)
           for a, b, d_, s in iproduct(range(p), repeat=4)
           for al, et in iproduct(range(q), repeat=2)]
    judge("II", prod, tup, [combo(t) for t in tup])

    tup = [(a, al + p, be + p, ga + p, s, et + p)
           for a, s in iproduct(range(p), repeat=2)
           for al, be, ga, et in iproduct(range(q), repeat=4)]
    judge("III", prod, tup, [combo(t) for t in tup])

    # product of a base factor and a fiber factor vanishes iff one factor does
    base_zero = all(spec.base.is_zero_many(
        [_mulnz(L2, aux.T.comps[a][b]) for a in range(p) for b in range(p)],
        trials=trials, seed=seed))
    fiber_zero = all(spec.fiber.is_zero_many(
        [c.QgSf.comp(t) for t in iproduct(range(q), repeat=4)],
        trials=trials, seed=seed))
    out["IV"] = base_zero or fiber_zero
    out["IV_base_factor_zero"] = base_zero
    out["IV_fiber_factor_zero"] = fiber_zero

    c1 = _subnz(ex.mul(f, _subnz(L1, aux.Delta)), _mulnz(L2, aux.Omega))
    c2 = _mulnz(L2, f, aux.Delta)
    tup = list(iproduct(range(q), repeat=6))
    # witness indices are reported in product labels, hence the +p shift
    judge("V", prod, [tuple(i + p for i in t) for t in tup],
          [_subnz(c.RRf.comp(t),
                  _addnz(_addnz(_mulnz(c1, c.QgRf.comp(t)),
                                _mulnz(L2, c.QSRf.comp(t))),
                         _mulnz(c2, c.QSGf.comp(t)))) for t in tup])

    tup = list(iproduct(range(p), repeat=4))
    judge("corollary_ii", spec.base, tup,
          [_subnz(c.RTb.comp(t),
                  _addnz(_mulnz(L1, c.QgTb.comp(t)),
                         _mulnz(L2, c.QSTb.comp(t)))) for t in tup])

    out["failed"] = [k for k in CONDITION_NAMES if not out[k]]
    out["all_hold"] = not out["failed"]
    return out


# ---------------------------------------------------------------------------
# Trichotomy / dichotomy


def _holds_at(pe, comps, dps=50):
    for e in comps:
        v, s = pe.eval_scaled(e)
        if abs(_mpf(v)) > zero_threshold(s, dps=dps):
            return False
    return True


def _mpf(v):
    if isinstance(v, Fraction):
        return mpmath.mpf(v.numerator) / mpmath.mpf(v.denominator)
    return mpmath.mpf(v)


def trichotomy_report(spec, L1, trials=8, seed=DEFAULT_SEED, dps=50):
    """Pointwise labels: T = L1 g, fiber-Einstein, base-flat, or none.

    The three defining sets can overlap; the label reports the first match
    in that order.  A "none" label flags a point where the union hypothesis
    fails on the sampled box.
    """
    L1 = _base_scalar(spec, L1, "L1")
    aux = auxiliaries(spec)
    bb, fb = bundle(spec.base), bundle(spec.fiber)
    prod = assemble_product(spec)
    p, q = spec.p, spec.q
    flat_comps = [e for t in iproduct(range(p), repeat=4)
                  for e in [bb.R.comp(t)] if not _z(e)]
    t_comps = [_subnz(aux.T.comps[a][b], _mulnz(L1, spec.base.metric[a][b]))
               for a in range(p) for b in range(p)]
    kq = ex.div(fb.kappa, ex.const(q))
    e_comps = [_subnz(fb.S.comps[al][be], _mulnz(kq, spec.fiber.metric[al][be]))
               for al in range(q) for be in range(q)]
    records = []
    with mpmath.workdps(dps):
        for pt in prod.sample_points(trials, seed):
            pe = PointEval(pt, dps=dps)
            try:
                rec = {
                    "point": pt,
                    "T_matches": _holds_at(pe, t_comps, dps),
                    "fiber_einstein": _holds_at(pe, e_comps, dps),
                    "base_flat": _holds_at(pe, flat_comps, dps),
                }
            except DomainError:
                continue
            if rec["T_matches"]:
                rec["label"] = LABEL_T
            elif rec["fiber_einstein"]:
                rec["label"] = LABEL_FIBER
            elif rec["base_flat"]:
                rec["label"] = LABEL_BASE
            else:
                rec["label"] = LABEL_NONE
            records.append(rec)
    labels = sorted({r["label"] for r in records})
    return {
        "records": records,
        "labels": labels,
        "all_covered": bool(records) and LABEL_NONE not in labels,
    }


def dichotomy_check(spec, L2, conditions_hold=False, trials=8, seed=DEFAULT_SEED,
                    dps=50):
    """Which branch holds when L2 is nowhere zero: flat base or Einstein fiber.

    The same check serves the constant-L2 specializations (L2 = 1 and
    L2 = 1/(n-2)).  If the caller claims the five conditions hold, at least
    one branch must come out true; otherwise a consistency violation is
    raised rather than returned.
    """
    L2 = _base_scalar(spec, L2, "L2")
    bb, fb = bundle(spec.base), bundle(spec.fiber)
    valid = 0
    with mpmath.workdps(dps):
        for pt in spec.base.sample_points(trials, seed):
            pe = PointEval(pt, dps=dps)
            try:
                v, s = pe.eval_scaled(L2)
            except DomainError:
                continue
            valid += 1
            if abs(_mpf(v)) <= zero_threshold(s, dps=dps):
                raise ValueError(f"L2 vanishes on the sampling box at {pt}")
    if valid == 0:
        raise ValueError("L2 not evaluable on the sampling box")
    p = spec.p
    base_flat = all(spec.base.is_zero_many(
        [bb.R.comp(t) for t in iproduct(range(p), repeat=4)],
        trials=trials, seed=seed))
    fiber_einstein = einstein_check(fb, trials=trials, seed=seed)
    if conditions_hold and not (base_flat or fiber_einstein):
        raise ValueError(
            "consistency violation: conditions claimed to hold but the base "
            "is not flat and the fiber is not Einstein on the sampled box")
    return {"base_flat": base_flat, "fiber_einstein": fiber_einstein}
