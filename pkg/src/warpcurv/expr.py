"""Scalar expression trees with exact differentiation and high-precision evaluation.

Grammar (infix, standard precedence, `^` binds tightest, no power chains):

    expr     := ['-'] term { ('+'|'-') term }
    term     := factor { ('*'|'/') factor }
    factor   := base ['^' exponent]
    base     := integer | ident | '(' expr ')' | func '(' expr ')'
    func     := 'exp' | 'log' | 'sin' | 'cos'
    exponent := ['-'] integer | '(' ['-'] integer ['/' integer] ')'

Identifiers must be declared coordinates or parameters.  Rational literals are
written with '/' and fold to exact constants.  Fractional exponents require
parentheses; an unparenthesized `x^1/2` is `(x^1)/2` by precedence.

Constants are exact rationals throughout.  Evaluation uses an exact rational
fast path when the tree is rational and mpmath at >= 50 significant digits
otherwise.  The zero test samples deterministic rational points from a box
(default [1/3, 2] per coordinate) and accepts `|value| <= 1e-30 * (1 + m)`
where m is the largest intermediate magnitude seen while evaluating.
"""

from __future__ import annotations

import random
import sys
from fractions import Fraction

import mpmath

sys.setrecursionlimit(max(sys.getrecursionlimit(), 100000))

DEFAULT_SEED = 0xC0FFEE
DEFAULT_BOX = (Fraction(1, 3), Fraction(2))
_ZERO_TOL = "1e-30"
_GRID = 1024  # denominator of sampled rational offsets

_FUNC_NAMES = ("exp", "log", "sin", "cos")


class ExprError(Exception):
    pass


class ParseError(ExprError):
    def __init__(self, message, offset):
        super().__init__(f"{message} (offset {offset})")
        self.message = message
        self.offset = offset


class EvalError(ExprError):
    pass


class DomainError(ExprError):
    pass


class InconclusiveError(ExprError):
    pass


# ---------------------------------------------------------------------------
# Node types


class Expr:
    __slots__ = ("_hash",)

    def _key(self):
        raise NotImplementedError

    def __eq__(self, other):
        if self is other:
            return True
        if type(self) is not type(other):
            return NotImplemented if not isinstance(other, Expr) else False
        return self._key() == other._key()

    def __hash__(self):
        h = getattr(self, "_hash", None)
        if h is None:
            h = hash(self._key())
            self._hash = h
        return h

    def __str__(self):
        return to_str(self)

    def __repr__(self):
        return f"<{type(self).__name__} {to_str(self)}>"


class Const(Expr):
    __slots__ = ("value",)

    def __init__(self, value):
        self.value = Fraction(value)

    def _key(self):
        return ("c", self.value)


class Coord(Expr):
    __slots__ = ("name",)

    def __init__(self, name):
        self.name = name

    def _key(self):
        return ("x", self.name)


class Param(Expr):
    __slots__ = ("name",)

    def __init__(self, name):
        self.name = name

    def _key(self):
        return ("p", self.name)


class Add(Expr):
    __slots__ = ("terms",)

    def __init__(self, terms):
        self.terms = tuple(terms)

    def _key(self):
        return ("+",) + self.terms


class Mul(Expr):
    __slots__ = ("factors",)

    def __init__(self, factors):
        self.factors = tuple(factors)

    def _key(self):
        return ("*",) + self.factors


class Pow(Expr):
    __slots__ = ("base", "exponent")

    def __init__(self, base, exponent):
        self.base = base
        self.exponent = Fraction(exponent)

    def _key(self):
        return ("^", self.base, self.exponent)


class Neg(Expr):
    __slots__ = ("child",)

    def __init__(self, child):
        self.child = child

    def _key(self):
        return ("neg", self.child)


class Div(Expr):
    __slots__ = ("num", "den")

    def __init__(self, num, den):
        self.num = num
        self.den = den

    def _key(self):
        return ("/", self.num, self.den)


class _Func(Expr):
    __slots__ = ("child",)
    fname = "?"

    def __init__(self, child):
        self.child = child

    def _key(self):
        return (self.fname, self.child)


class Exp(_Func):
    __slots__ = ()
    fname = "exp"


class Log(_Func):
    __slots__ = ()
    fname = "log"


class Sin(_Func):
    __slots__ = ()
    fname = "sin"


class Cos(_Func):
    __slots__ = ()
    fname = "cos"


_FUNC_CLASSES = {"exp": Exp, "log": Log, "sin": Sin, "cos": Cos}

ZERO = Const(0)
ONE = Const(1)


# ---------------------------------------------------------------------------
# Smart constructors.  Simplification is deliberately limited to constant
# folding, 0/1 absorption, and power merging; nothing downstream relies on it.


def const(v):
    return Const(v)


def add(*terms):
    flat = []
    for t in terms:
        if isinstance(t, Add):
            flat.extend(t.terms)
        else:
            flat.append(t)
    out = []
    const_pos = None
    acc = Fraction(0)
    for t in flat:
        if isinstance(t, Const):
            if t.value == 0 and const_pos is not None:
                continue
            acc += t.value
            if const_pos is None:
                const_pos = len(out)
                out.append(None)  # placeholder
        else:
            out.append(t)
    if const_pos is not None:
        if acc == 0 and len(out) > 1:
            out.pop(const_pos)
        else:
            out[const_pos] = Const(acc)
    if not out:
        return ZERO
    if len(out) == 1:
        return out[0]
    return Add(out)


def mul(*factors):
    flat = []
    for f in factors:
        if isinstance(f, Mul):
            flat.extend(f.factors)
        else:
            flat.append(f)
    coeff = Fraction(1)
    rest = []
    for f in flat:
        if isinstance(f, Const):
            coeff *= f.value
        else:
            rest.append(f)
    if coeff == 0:
        return ZERO
    sign = 1
    if coeff < 0:
        sign = -1
        coeff = -coeff
    if not rest:
        core = Const(coeff)
    else:
        items = rest if coeff == 1 else [Const(coeff)] + rest
        core = items[0] if len(items) == 1 else Mul(items)
    return neg(core) if sign < 0 else core


def neg(x):
    if isinstance(x, Const):
        return Const(-x.value)
    if isinstance(x, Neg):
        return x.child
    return Neg(x)


def sub(a, b):
    return add(a, neg(b))


def div(a, b):
    if isinstance(b, Const):
        if b.value == 0:
            raise DomainError("division by literal zero")
        if isinstance(a, Const):
            return Const(a.value / b.value)
        if b.value < 0:
            return neg(div(a, Const(-b.value)))
        if b.value == 1:
            return a
    if isinstance(a, Const) and a.value == 0:
        return ZERO
    if isinstance(a, Const) and a.value < 0:
        return neg(div(Const(-a.value), b))
    if isinstance(a, Neg):
        return neg(div(a.child, b))
    if isinstance(b, Neg):
        return neg(div(a, b.child))
    return Div(a, b)


def pow_(base, exponent):
    e = Fraction(exponent)
    if e == 1:
        return base
    if e == 0:
        return ONE
    if isinstance(base, Const):
        v = base.value
        if e.denominator == 1:
            if v == 0 and e < 0:
                raise DomainError("zero base with negative exponent")
            return Const(v ** int(e))
        if v == 0:
            return ZERO if e > 0 else _raise_domain()
        if v == 1:
            return ONE
    if isinstance(base, Pow) and e.denominator == 1:
        return pow_(base.base, base.exponent * e)
    return Pow(base, e)


def _raise_domain():
    raise DomainError("zero base with negative exponent")


def exp_(x):
    if isinstance(x, Const) and x.value == 0:
        return ONE
    return Exp(x)


def log_(x):
    if isinstance(x, Const):
        if x.value == 1:
            return ZERO
        if x.value <= 0:
            raise DomainError("log of non-positive constant")
    return Log(x)


def sin_(x):
    if isinstance(x, Const) and x.value == 0:
        return ZERO
    return Sin(x)


def cos_(x):
    if isinstance(x, Const) and x.value == 0:
        return ONE
    return Cos(x)


# ---------------------------------------------------------------------------
# Parsing


def _tokenize(text):
    toks = []
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch in " \t\r\n":
            i += 1
            continue
        if ch.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            toks.append(("INT", text[i:j], i))
            i = j
            continue
        if ch.isalpha() or ch == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            toks.append(("IDENT", text[i:j], i))
            i = j
            continue
        if ch in "+-*/^()":
            toks.append((ch, ch, i))
            i += 1
            continue
        raise ParseError(f"unexpected character {ch!r}", i)
    toks.append(("END", "", n))
    return toks


class _Parser:
    def __init__(self, toks, coords, params):
        self.toks = toks
        self.pos = 0
        self.coords = coords
        self.params = params

    def peek(self):
        return self.toks[self.pos]

    def take(self):
        t = self.toks[self.pos]
        self.pos += 1
        return t

    def accept(self, kind):
        if self.toks[self.pos][0] == kind:
            return self.take()
        return None

    def fail(self, message):
        tok = self.peek()
        if tok[0] == "END":
            raise ParseError(message + ", got end of input", tok[2])
        raise ParseError(message + f", got {tok[1]!r}", tok[2])

    def expr(self):
        items = []
        if self.accept("-"):
            items.append(neg(self.term()))
        else:
            items.append(self.term())
        while True:
            if self.accept("+"):
                items.append(self.term())
            elif self.accept("-"):
                items.append(neg(self.term()))
            else:
                break
        return add(*items)

    def term(self):
        cur = self.factor()
        while True:
            if self.accept("*"):
                cur = mul(cur, self.factor())
            elif self.accept("/"):
                rhs = self.factor()
                if isinstance(rhs, Const) and rhs.value == 0:
                    raise ParseError("division by zero literal", self.toks[self.pos - 1][2])
                cur = div(cur, rhs)
            else:
                break
        return cur

    def factor(self):
        b = self.base()
        if self.accept("^"):
            return pow_(b, self.exponent())
        return b

    def base(self):
        tok = self.peek()
        if tok[0] == "INT":
            self.take()
            return Const(int(tok[1]))
        if tok[0] == "IDENT":
            self.take()
            name = tok[1]
            if name in _FUNC_CLASSES:
                if not self.accept("("):
                    self.fail(f"expected '(' after {name}")
                inner = self.expr()
                if not self.accept(")"):
                    self.fail("expected ')'")
                ctor = {"exp": exp_, "log": log_, "sin": sin_, "cos": cos_}[name]
                try:
                    return ctor(inner)
                except DomainError as err:
                    raise ParseError(str(err), tok[2]) from None
            if name in self.coords:
                return Coord(name)
            if name in self.params:
                return Param(name)
            raise ParseError(
                f"unknown identifier {name!r} (not a coordinate or declared parameter)",
                tok[2],
            )
        if self.accept("("):
            inner = self.expr()
            if not self.accept(")"):
                self.fail("expected ')'")
            return inner
        self.fail("expected a number, identifier, or '('")

    def exponent(self):
        tok = self.peek()
        if tok[0] == "INT":
            self.take()
            return Fraction(int(tok[1]))
        if tok[0] == "-":
            self.take()
            t2 = self.accept("INT")
            if t2 is None:
                self.fail("expected integer after '-' in exponent")
            return Fraction(-int(t2[1]))
        if tok[0] == "(":
            self.take()
            sign = -1 if self.accept("-") else 1
            t2 = self.accept("INT")
            if t2 is None:
                self.fail("expected integer in exponent")
            num = sign * int(t2[1])
            den = 1
            if self.accept("/"):
                t3 = self.accept("INT")
                if t3 is None:
                    self.fail("expected denominator integer in exponent")
                den = int(t3[1])
                if den == 0:
                    raise ParseError("zero denominator in exponent", t3[2])
            if not self.accept(")"):
                self.fail("expected ')' in exponent")
            return Fraction(num, den)
        self.fail("expected an integer or rational exponent")


def parse(text, coords=(), params=()):
    """Parse `text` into an Expr; identifiers must appear in coords/params."""
    toks = _tokenize(text)
    p = _Parser(toks, frozenset(coords), frozenset(params))
    try:
        e = p.expr()
    except DomainError as err:
        raise ParseError(str(err), p.peek()[2]) from None
    tok = p.peek()
    if tok[0] != "END":
        raise ParseError(f"unexpected {tok[1]!r}", tok[2])
    return e


# ---------------------------------------------------------------------------
# Printing (round-trips through parse structurally)


def _fmt_number(v):
    if v.denominator == 1:
        return str(v.numerator)
    return f"{v.numerator}/{v.denominator}"


def _needs_parens_as_factor(f, first):
    if isinstance(f, (Add, Neg)):
        return True
    if isinstance(f, Const):
        if f.value < 0:
            return True
        return f.value.denominator != 1 and not first
    if isinstance(f, Div):
        return not first
    return False


def _fmt_factor(f, first):
    if _needs_parens_as_factor(f, first):
        return "(" + _fmt_sum(f) + ")"
    return _fmt_atom(f)


def _fmt_atom(e):
    if isinstance(e, Const):
        return _fmt_number(e.value)
    if isinstance(e, Coord) or isinstance(e, Param):
        return e.name
    if isinstance(e, _Func):
        return f"{e.fname}({_fmt_sum(e.child)})"
    if isinstance(e, Pow):
        return _fmt_pow(e)
    if isinstance(e, Mul):
        return "*".join(_fmt_factor(f, i == 0) for i, f in enumerate(e.factors))
    if isinstance(e, Div):
        return _fmt_div(e)
    raise TypeError(f"unexpected node in factor position: {e!r}")


def _fmt_pow(e):
    b = e.base
    if isinstance(b, (Add, Mul, Div, Neg, Pow)) or (
        isinstance(b, Const) and (b.value < 0 or b.value.denominator != 1)
    ):
        bs = "(" + _fmt_sum(b) + ")"
    else:
        bs = _fmt_atom(b)
    exp = e.exponent
    if exp.denominator == 1 and exp >= 0:
        return f"{bs}^{exp.numerator}"
    return f"{bs}^({_fmt_number(exp)})"


def _fmt_div(e):
    left = e.num
    if isinstance(left, (Add, Neg)) or (isinstance(left, Const) and left.value < 0):
        ls = "(" + _fmt_sum(left) + ")"
    else:
        ls = _fmt_atom(left)
    right = e.den
    naked = (
        isinstance(right, (Coord, Param, _Func, Pow))
        or (isinstance(right, Const) and right.value >= 0 and right.value.denominator == 1)
    )
    rs = _fmt_atom(right) if naked else "(" + _fmt_sum(right) + ")"
    return f"{ls}/{rs}"


def _fmt_signed_term(t):
    """Render a term in leading position; leading '-' applies to the whole term."""
    if isinstance(t, Neg):
        c = t.child
        if isinstance(c, Add):
            return "-(" + _fmt_sum(c) + ")"
        return "-" + _fmt_atom(c)
    if isinstance(t, Const) and t.value < 0:
        return "-" + _fmt_number(-t.value)
    if isinstance(t, Add):
        return "(" + _fmt_sum(t) + ")"
    return _fmt_atom(t)


def _fmt_sum(e):
    if not isinstance(e, Add):
        return _fmt_signed_term(e)
    parts = [_fmt_signed_term(e.terms[0])]
    for t in e.terms[1:]:
        if isinstance(t, Neg):
            c = t.child
            parts.append(" - " + ("(" + _fmt_sum(c) + ")" if isinstance(c, Add) else _fmt_atom(c)))
        elif isinstance(t, Const) and t.value < 0:
            parts.append(" - " + _fmt_number(-t.value))
        else:
            parts.append(" + " + _fmt_signed_term(t))
    return "".join(parts)


def to_str(e):
    return _fmt_sum(e)


# ---------------------------------------------------------------------------
# Differentiation (exact)


def diff(e, name, _memo=None):
    if _memo is None:
        _memo = {}
    hit = _memo.get(id(e))
    if hit is not None:
        return hit
    if isinstance(e, (Const, Param)):
        out = ZERO
    elif isinstance(e, Coord):
        out = ONE if e.name == name else ZERO
    elif isinstance(e, Add):
        out = add(*[diff(t, name, _memo) for t in e.terms])
    elif isinstance(e, Mul):
        pieces = []
        fs = e.factors
        for i in range(len(fs)):
            d = diff(fs[i], name, _memo)
            if d is ZERO or d == ZERO:
                continue
            pieces.append(mul(*fs[:i], d, *fs[i + 1:]))
        out = add(*pieces)
    elif isinstance(e, Neg):
        out = neg(diff(e.child, name, _memo))
    elif isinstance(e, Div):
        du = diff(e.num, name, _memo)
        dv = diff(e.den, name, _memo)
        out = div(sub(mul(du, e.den), mul(e.num, dv)), pow_(e.den, 2))
    elif isinstance(e, Pow):
        db = diff(e.base, name, _memo)
        out = mul(Const(e.exponent), pow_(e.base, e.exponent - 1), db)
    elif isinstance(e, Exp):
        out = mul(e, diff(e.child, name, _memo))
    elif isinstance(e, Log):
        out = div(diff(e.child, name, _memo), e.child)
    elif isinstance(e, Sin):
        out = mul(cos_(e.child), diff(e.child, name, _memo))
    elif isinstance(e, Cos):
        out = neg(mul(sin_(e.child), diff(e.child, name, _memo)))
    else:
        raise TypeError(f"cannot differentiate {e!r}")
    _memo[id(e)] = out
    return out


# ---------------------------------------------------------------------------
# Name utilities


def _walk_names(e, coords, params, seen):
    if id(e) in seen:
        return
    seen.add(id(e))
    if isinstance(e, Coord):
        coords.add(e.name)
    elif isinstance(e, Param):
        params.add(e.name)
    elif isinstance(e, Add):
        for t in e.terms:
            _walk_names(t, coords, params, seen)
    elif isinstance(e, Mul):
        for f in e.factors:
            _walk_names(f, coords, params, seen)
    elif isinstance(e, Pow):
        _walk_names(e.base, coords, params, seen)
    elif isinstance(e, Neg):
        _walk_names(e.child, coords, params, seen)
    elif isinstance(e, Div):
        _walk_names(e.num, coords, params, seen)
        _walk_names(e.den, coords, params, seen)
    elif isinstance(e, _Func):
        _walk_names(e.child, coords, params, seen)


def free_coords(e):
    coords, params = set(), set()
    _walk_names(e, coords, params, set())
    return coords


def free_params(e):
    coords, params = set(), set()
    _walk_names(e, coords, params, set())
    return params


def rename(e, mapping, _memo=None):
    """Rename coordinate/parameter leaves according to `mapping`."""
    if _memo is None:
        _memo = {}
    hit = _memo.get(id(e))
    if hit is not None:
        return hit
    if isinstance(e, Const):
        out = e
    elif isinstance(e, Coord):
        out = Coord(mapping.get(e.name, e.name))
    elif isinstance(e, Param):
        out = Param(mapping.get(e.name, e.name))
    elif isinstance(e, Add):
        out = add(*[rename(t, mapping, _memo) for t in e.terms])
    elif isinstance(e, Mul):
        out = mul(*[rename(f, mapping, _memo) for f in e.factors])
    elif isinstance(e, Pow):
        out = pow_(rename(e.base, mapping, _memo), e.exponent)
    elif isinstance(e, Neg):
        out = neg(rename(e.child, mapping, _memo))
    elif isinstance(e, Div):
        out = div(rename(e.num, mapping, _memo), rename(e.den, mapping, _memo))
    elif isinstance(e, _Func):
        out = _FUNC_CLASSES[e.fname](rename(e.child, mapping, _memo))
    else:
        raise TypeError(f"cannot rename {e!r}")
    _memo[id(e)] = out
    return out


# ---------------------------------------------------------------------------
# Evaluation


def _to_mpf(v):
    if isinstance(v, Fraction):
        return mpmath.mpf(v.numerator) / mpmath.mpf(v.denominator)
    return mpmath.mpf(v)


def _mag(v):
    return abs(_to_mpf(v))


def _num_add(a, b):
    if isinstance(a, Fraction) and isinstance(b, Fraction):
        return a + b
    return _to_mpf(a) + _to_mpf(b)


def _num_mul(a, b):
    if isinstance(a, Fraction) and isinstance(b, Fraction):
        return a * b
    return _to_mpf(a) * _to_mpf(b)


def _num_div(a, b):
    if isinstance(b, Fraction):
        if b == 0:
            raise DomainError("division by zero")
        if isinstance(a, Fraction):
            return a / b
    else:
        if b == 0:
            raise DomainError("division by zero")
    return _to_mpf(a) / _to_mpf(b)


def _num_pow(b, e):
    if e.denominator == 1:
        k = int(e)
        if isinstance(b, Fraction):
            if b == 0 and k < 0:
                raise DomainError("zero base with negative exponent")
            return b ** k
        if b == 0 and k < 0:
            raise DomainError("zero base with negative exponent")
        return _to_mpf(b) ** k
    # fractional exponent
    if isinstance(b, Fraction):
        if b < 0:
            raise DomainError("negative base with fractional exponent")
        if b == 0:
            if e < 0:
                raise DomainError("zero base with negative exponent")
            return Fraction(0)
        return mpmath.power(_to_mpf(b), _to_mpf(e))
    if b < 0:
        raise DomainError("negative base with fractional exponent")
    if b == 0 and e < 0:
        raise DomainError("zero base with negative exponent")
    return mpmath.power(b, _to_mpf(e))


class PointEval:
    """Memoizing evaluator bound to one point (shared across expressions).

    Values are exact Fractions when the subtree is rational, mpmath floats
    otherwise.  Each memo entry records the largest intermediate magnitude in
    its subtree so zero tests can scale their tolerance.
    """

    def __init__(self, env, dps=50):
        self.env = {}
        for k, v in env.items():
            if isinstance(v, int):
                v = Fraction(v)
            self.env[k] = v
        self.dps = dps
        self._memo = {}

    def eval_scaled(self, e):
        with mpmath.workdps(self.dps):
            return self._walk(e)

    def eval(self, e):
        return self.eval_scaled(e)[0]

    def _walk(self, e):
        hit = self._memo.get(id(e))
        if hit is not None:
            return hit
        if isinstance(e, Const):
            v = e.value
            out = (v, _mag(v))
        elif isinstance(e, (Coord, Param)):
            try:
                v = self.env[e.name]
            except KeyError:
                raise EvalError(f"unbound variable {e.name!r}") from None
            out = (v, _mag(v))
        elif isinstance(e, Add):
            v = Fraction(0)
            m = mpmath.mpf(0)
            for t in e.terms:
                tv, tm = self._walk(t)
                v = _num_add(v, tv)
                if tm > m:
                    m = tm
            mg = _mag(v)
            out = (v, m if m > mg else mg)
        elif isinstance(e, Mul):
            v = Fraction(1)
            m = mpmath.mpf(0)
            for f in e.factors:
                fv, fm = self._walk(f)
                v = _num_mul(v, fv)
                if fm > m:
                    m = fm
            mg = _mag(v)
            out = (v, m if m > mg else mg)
        elif isinstance(e, Neg):
            cv, cm = self._walk(e.child)
            v = -cv
            out = (v, cm)
        elif isinstance(e, Div):
            nv, nm = self._walk(e.num)
            dv, dm = self._walk(e.den)
            v = _num_div(nv, dv)
            m = max(nm, dm, _mag(v))
            out = (v, m)
        elif isinstance(e, Pow):
            bv, bm = self._walk(e.base)
            v = _num_pow(bv, e.exponent)
            m = max(bm, _mag(v))
            out = (v, m)
        elif isinstance(e, Exp):
            cv, cm = self._walk(e.child)
            v = mpmath.exp(_to_mpf(cv))
            out = (v, max(cm, abs(v)))
        elif isinstance(e, Log):
            cv, cm = self._walk(e.child)
            if (isinstance(cv, Fraction) and cv <= 0) or (not isinstance(cv, Fraction) and cv <= 0):
                raise DomainError("log of non-positive value")
            v = mpmath.log(_to_mpf(cv))
            out = (v, max(cm, abs(v)))
        elif isinstance(e, Sin):
            cv, cm = self._walk(e.child)
            v = mpmath.sin(_to_mpf(cv))
            out = (v, max(cm, abs(v)))
        elif isinstance(e, Cos):
            cv, cm = self._walk(e.child)
            v = mpmath.cos(_to_mpf(cv))
            out = (v, max(cm, abs(v)))
        else:
            raise TypeError(f"cannot evaluate {e!r}")
        self._memo[id(e)] = out
        return out


def evaluate(e, env, dps=50):
    """Evaluate at a point; exact Fraction when possible, else mpmath float."""
    return PointEval(env, dps=dps).eval(e)


# ---------------------------------------------------------------------------
# Sampling and the zero test


def sample_box_points(coords, box, k, seed, params=None):
    """Deterministic rational sample points from a per-coordinate box.

    Returns a list of env dicts (coordinates plus fixed parameter values).
    Missing box entries fall back to DEFAULT_BOX.
    """
    box = box or {}
    rng = random.Random(seed)
    pts = []
    for _ in range(k):
        env = {}
        for c in coords:
            lo, hi = box.get(c, DEFAULT_BOX)
            lo = Fraction(lo)
            hi = Fraction(hi)
            env[c] = lo + (hi - lo) * Fraction(rng.randint(0, _GRID), _GRID)
        if params:
            env.update({k2: Fraction(v) for k2, v in params.items()})
        pts.append(env)
    return pts


def zero_threshold(scale, dps=50):
    """Tolerance used by the zero test for a given intermediate magnitude."""
    with mpmath.workdps(dps):
        return mpmath.mpf(_ZERO_TOL) * (1 + scale)


def is_zero(e, coords=None, box=None, params=None, trials=8, seed=DEFAULT_SEED, dps=50):
    """Randomized high-precision zero test over a sampling box.

    True iff every domain-valid sampled point evaluates within the scaled
    tolerance.  Raises InconclusiveError if every sampled point violates a
    domain constraint.
    """
    if coords is None:
        coords = tuple(sorted(free_coords(e)))
    pts = sample_box_points(coords, box, trials, seed, params=params)
    valid = 0
    for pt in pts:
        pe = PointEval(pt, dps=dps)
        try:
            v, m = pe.eval_scaled(e)
        except DomainError:
            continue
        valid += 1
        with mpmath.workdps(dps):
            if abs(_to_mpf(v)) > zero_threshold(m, dps=dps):
                return False
    if valid == 0:
        raise InconclusiveError("all sampled points violated domain constraints")
    return True


def is_zero_many(exprs, coords, box=None, params=None, trials=8, seed=DEFAULT_SEED, dps=50):
    """Componentwise zero test sharing sample points and evaluation memo.

    Returns a list of booleans, one per expression.  Raises InconclusiveError
    if some expression had no domain-valid point.
    """
    pts = sample_box_points(coords, box, trials, seed, params=params)
    evals = [PointEval(pt, dps=dps) for pt in pts]
    out = []
    for e in exprs:
        nonzero = False
        valid = 0
        for pe in evals:
            try:
                v, m = pe.eval_scaled(e)
            except DomainError:
                continue
            valid += 1
            with mpmath.workdps(dps):
                if abs(_to_mpf(v)) > zero_threshold(m, dps=dps):
                    nonzero = True
                    break
        if valid == 0 and not nonzero:
            raise InconclusiveError("all sampled points violated domain constraints")
        out.append(not nonzero)
    return out
