"""Exact symbolic scalars over a coordinate chart.

Every coefficient function handled by the engine (anchor entries, structure
functions, presymplectic coefficients, connection coefficients, momentum
components) is an immutable expression tree with exact rational constants.
The module provides parsing, differentiation, IEEE evaluation, best-effort
simplification, and a two-tier zero test: exact multivariate-polynomial
normalization over the rationals when the tree is polynomial, probabilistic
sampling otherwise.

Sampling uses a counter-based generator keyed on (seed, sample index,
coordinate), so results do not depend on evaluation order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Optional, Sequence, Union

__all__ = [
    "Expression", "Rat", "Coord", "Sum", "Product", "IntPow", "Neg", "Quot",
    "Sin", "Cos", "Exp", "ZERO", "ONE", "rat", "add", "sub", "mul", "neg",
    "quot", "intpow", "sin_", "cos_", "exp_", "parse", "to_string",
    "differentiate", "evaluate", "evaluate_with_magnitude", "exact_eval",
    "interval_evaluate",
    "is_polynomial", "expand_polynomial", "poly_add", "poly_mul", "poly_eval",
    "poly_to_expression", "simplify", "coords_used",
    "SamplePoint", "SampleDomain", "Verdict", "is_identically_zero",
    "ExprError", "ParseError", "SamplingExhausted", "sample_unit",
]

Number = Union[int, Fraction]


class ExprError(Exception):
    """Base error for the expression kernel."""


class ParseError(ExprError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


class SamplingExhausted(ExprError):
    """All resampling attempts hit non-finite evaluations."""


# ---------------------------------------------------------------------------
# Expression trees


class Expression:
    """Marker base class; instances are immutable after construction."""

    __slots__ = ()


@dataclass(frozen=True)
class Rat(Expression):
    value: Fraction


@dataclass(frozen=True)
class Coord(Expression):
    index: int


@dataclass(frozen=True)
class Sum(Expression):
    terms: tuple


@dataclass(frozen=True)
class Product(Expression):
    factors: tuple


@dataclass(frozen=True)
class IntPow(Expression):
    base: Expression
    exponent: int


@dataclass(frozen=True)
class Neg(Expression):
    arg: Expression


@dataclass(frozen=True)
class Quot(Expression):
    num: Expression
    den: Expression


@dataclass(frozen=True)
class Sin(Expression):
    arg: Expression


@dataclass(frozen=True)
class Cos(Expression):
    arg: Expression


@dataclass(frozen=True)
class Exp(Expression):
    arg: Expression


ZERO = Rat(Fraction(0))
ONE = Rat(Fraction(1))


def rat(x: Union[Number, str]) -> Rat:
    return Rat(Fraction(x))


def _is_zero(e: Expression) -> bool:
    return isinstance(e, Rat) and e.value == 0


def _is_one(e: Expression) -> bool:
    return isinstance(e, Rat) and e.value == 1


def add(*terms: Expression) -> Expression:
    """Sum with flattening, constant folding, and like-term merging."""
    flat: list[Expression] = []
    const = Fraction(0)
    stack = list(terms)
    while stack:
        t = stack.pop(0)
        if isinstance(t, Sum):
            stack = list(t.terms) + stack
        elif isinstance(t, Rat):
            const += t.value
        elif not _is_zero(t):
            flat.append(t)
    # merge structurally identical terms c1*e + c2*e -> (c1+c2)*e
    merged: dict[Expression, Fraction] = {}
    order: list[Expression] = []
    for t in flat:
        coeff, core = _split_coefficient(t)
        if core not in merged:
            merged[core] = coeff
            order.append(core)
        else:
            merged[core] += coeff
    out: list[Expression] = []
    for core in order:
        c = merged[core]
        if c == 0:
            continue
        out.append(_with_coefficient(c, core))
    if const != 0:
        out.append(Rat(const))
    if not out:
        return ZERO
    if len(out) == 1:
        return out[0]
    return Sum(tuple(out))


def _split_coefficient(e: Expression) -> tuple[Fraction, Expression]:
    if isinstance(e, Neg):
        c, core = _split_coefficient(e.arg)
        return -c, core
    if isinstance(e, Product):
        consts = [f.value for f in e.factors if isinstance(f, Rat)]
        rest = tuple(f for f in e.factors if not isinstance(f, Rat))
        if consts:
            c = Fraction(1)
            for v in consts:
                c *= v
            if not rest:
                return c, ONE
            if len(rest) == 1:
                return c, rest[0]
            return c, Product(rest)
    return Fraction(1), e


def _with_coefficient(c: Fraction, core: Expression) -> Expression:
    if _is_one(core):
        return Rat(c)
    if c == 1:
        return core
    if c == -1:
        return Neg(core)
    return Product((Rat(c), core))


def mul(*factors: Expression) -> Expression:
    """Product with flattening and constant folding."""
    flat: list[Expression] = []
    const = Fraction(1)
    stack = list(factors)
    while stack:
        f = stack.pop(0)
        if isinstance(f, Product):
            stack = list(f.factors) + stack
        elif isinstance(f, Rat):
            const *= f.value
        elif isinstance(f, Neg):
            const = -const
            stack.insert(0, f.arg)
        else:
            flat.append(f)
    if const == 0:
        return ZERO
    if not flat:
        return Rat(const)
    out = flat if const == 1 else [Rat(const)] + flat
    if len(out) == 1:
        return out[0]
    return Product(tuple(out))


def neg(e: Expression) -> Expression:
    if isinstance(e, Rat):
        return Rat(-e.value)
    if isinstance(e, Neg):
        return e.arg
    return Neg(e)


def sub(a: Expression, b: Expression) -> Expression:
    return add(a, neg(b))


def quot(a: Expression, b: Expression) -> Expression:
    if isinstance(b, Rat):
        if b.value == 0:
            raise ExprError("division by exact zero")
        return mul(a, Rat(Fraction(1) / b.value))
    if _is_zero(a):
        return ZERO
    return Quot(a, b)


def intpow(e: Expression, k: int) -> Expression:
    if k == 0:
        return ONE
    if k == 1:
        return e
    if k < 0:
        return quot(ONE, intpow(e, -k))
    if isinstance(e, Rat):
        return Rat(e.value ** k)
    return IntPow(e, k)


def sin_(e: Expression) -> Expression:
    return Sin(e)


def cos_(e: Expression) -> Expression:
    return Cos(e)


def exp_(e: Expression) -> Expression:
    return Exp(e)


def coords_used(e: Expression) -> set[int]:
    out: set[int] = set()
    _collect_coords(e, out)
    return out


def _collect_coords(e: Expression, out: set[int]) -> None:
    if isinstance(e, Coord):
        out.add(e.index)
    elif isinstance(e, Sum):
        for t in e.terms:
            _collect_coords(t, out)
    elif isinstance(e, Product):
        for f in e.factors:
            _collect_coords(f, out)
    elif isinstance(e, IntPow):
        _collect_coords(e.base, out)
    elif isinstance(e, Neg):
        _collect_coords(e.arg, out)
    elif isinstance(e, Quot):
        _collect_coords(e.num, out)
        _collect_coords(e.den, out)
    elif isinstance(e, (Sin, Cos, Exp)):
        _collect_coords(e.arg, out)


# ---------------------------------------------------------------------------
# Parser
#
# expr   := term (("+"|"-") term)*
# term   := factor (("*"|"/") factor)*
# factor := base ("^" integer)?
# base   := number | ident | "(" expr ")" | ("sin"|"cos"|"exp") "(" expr ")"
#         | "-" factor

_FUNCTIONS = {"sin": sin_, "cos": cos_, "exp": exp_}


class _Scanner:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def skip_ws(self) -> None:
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self) -> str:
        self.skip_ws()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def take(self) -> str:
        c = self.peek()
        self.pos += 1
        return c

    def match(self, c: str) -> bool:
        if self.peek() == c:
            self.pos += 1
            return True
        return False

    def ident(self) -> Optional[str]:
        self.skip_ws()
        start = self.pos
        if self.pos < len(self.text) and (self.text[self.pos].isalpha() or self.text[self.pos] == "_"):
            self.pos += 1
            while self.pos < len(self.text) and (self.text[self.pos].isalnum() or self.text[self.pos] == "_"):
                self.pos += 1
            return self.text[start:self.pos]
        return None

    def number(self) -> Optional[str]:
        self.skip_ws()
        start = self.pos
        seen_digit = False
        seen_dot = False
        while self.pos < len(self.text):
            c = self.text[self.pos]
            if c.isdigit():
                seen_digit = True
                self.pos += 1
            elif c == "." and not seen_dot:
                seen_dot = True
                self.pos += 1
            else:
                break
        if not seen_digit:
            self.pos = start
            return None
        return self.text[start:self.pos]


def parse(text: str, chart: Sequence[str]) -> Expression:
    """Parse ``text`` over the named coordinates.

    Numbers become exact rationals (decimal literals included); exponents
    must be integer literals, negative ones normalizing to quotients.
    """
    sc = _Scanner(text)
    names = {name: i for i, name in enumerate(chart)}
    e = _parse_expr(sc, names)
    sc.skip_ws()
    if sc.pos != len(text):
        raise ParseError(f"unexpected character {text[sc.pos]!r}", sc.pos)
    return e


def _parse_expr(sc: _Scanner, names: dict) -> Expression:
    terms = [_parse_term(sc, names)]
    while True:
        if sc.match("+"):
            terms.append(_parse_term(sc, names))
        elif sc.match("-"):
            terms.append(neg(_parse_term(sc, names)))
        else:
            break
    return add(*terms)


def _parse_term(sc: _Scanner, names: dict) -> Expression:
    e = _parse_factor(sc, names)
    while True:
        if sc.match("*"):
            e = mul(e, _parse_factor(sc, names))
        elif sc.match("/"):
            e = quot(e, _parse_factor(sc, names))
        else:
            break
    return e


def _parse_factor(sc: _Scanner, names: dict) -> Expression:
    base = _parse_base(sc, names)
    if sc.match("^"):
        sc.skip_ws()
        pos = sc.pos
        sign = 1
        if sc.match("-"):
            sign = -1
        elif sc.match("+"):
            pass
        digits = sc.number()
        if digits is None or "." in digits:
            raise ParseError("non-integer exponent", pos)
        return intpow(base, sign * int(digits))
    return base


def _parse_base(sc: _Scanner, names: dict) -> Expression:
    sc.skip_ws()
    pos = sc.pos
    if sc.match("-"):
        return neg(_parse_factor(sc, names))
    if sc.match("("):
        e = _parse_expr(sc, names)
        if not sc.match(")"):
            raise ParseError("expected ')'", sc.pos)
        return e
    num = sc.number()
    if num is not None:
        return Rat(Fraction(num))
    name = sc.ident()
    if name is not None:
        if name in _FUNCTIONS:
            if not sc.match("("):
                raise ParseError(f"expected '(' after {name}", sc.pos)
            arg = _parse_expr(sc, names)
            if not sc.match(")"):
                raise ParseError("expected ')'", sc.pos)
            return _FUNCTIONS[name](arg)
        if name in names:
            return Coord(names[name])
        raise ParseError(f"unknown identifier {name!r}", pos)
    raise ParseError("expected expression", pos)


# ---------------------------------------------------------------------------
# Printing (round-trips through parse)

_PREC_SUM, _PREC_PROD, _PREC_UNARY, _PREC_POW, _PREC_ATOM = 1, 2, 3, 4, 5


def to_string(e: Expression, chart: Sequence[str]) -> str:
    return _print(e, chart, 0)


def _print(e: Expression, chart: Sequence[str], parent_prec: int) -> str:
    if isinstance(e, Rat):
        if e.value.denominator == 1:
            s = str(e.value.numerator)
            prec = _PREC_UNARY if e.value < 0 else _PREC_ATOM
        else:
            s = f"{e.value.numerator}/{e.value.denominator}"
            prec = _PREC_PROD
        return _paren(s, prec, parent_prec)
    if isinstance(e, Coord):
        return chart[e.index]
    if isinstance(e, Sum):
        parts = [_print(e.terms[0], chart, _PREC_SUM)]
        for t in e.terms[1:]:
            if isinstance(t, Neg):
                parts.append(" - " + _print(t.arg, chart, _PREC_SUM + 1))
            elif isinstance(t, Rat) and t.value < 0:
                parts.append(" - " + _print(Rat(-t.value), chart, _PREC_SUM + 1))
            else:
                parts.append(" + " + _print(t, chart, _PREC_SUM + 1))
        return _paren("".join(parts), _PREC_SUM, parent_prec)
    if isinstance(e, Product):
        s = "*".join(_print(f, chart, _PREC_PROD + 0) for f in e.factors)
        return _paren(s, _PREC_PROD, parent_prec)
    if isinstance(e, IntPow):
        s = _print(e.base, chart, _PREC_POW + 1) + f"^{e.exponent}"
        return _paren(s, _PREC_POW, parent_prec)
    if isinstance(e, Neg):
        return _paren("-" + _print(e.arg, chart, _PREC_UNARY), _PREC_UNARY, parent_prec)
    if isinstance(e, Quot):
        s = _print(e.num, chart, _PREC_PROD + 1) + "/" + _print(e.den, chart, _PREC_PROD + 1)
        return _paren(s, _PREC_PROD, parent_prec)
    if isinstance(e, Sin):
        return f"sin({_print(e.arg, chart, 0)})"
    if isinstance(e, Cos):
        return f"cos({_print(e.arg, chart, 0)})"
    if isinstance(e, Exp):
        return f"exp({_print(e.arg, chart, 0)})"
    raise TypeError(f"unknown node {e!r}")


def _paren(s: str, prec: int, parent: int) -> str:
    return f"({s})" if prec < parent else s


# ---------------------------------------------------------------------------
# Differentiation


def differentiate(e: Expression, coord: int) -> Expression:
    """Exact symbolic partial derivative with respect to coordinate ``coord``."""
    if isinstance(e, Rat):
        return ZERO
    if isinstance(e, Coord):
        return ONE if e.index == coord else ZERO
    if isinstance(e, Sum):
        return add(*(differentiate(t, coord) for t in e.terms))
    if isinstance(e, Product):
        terms = []
        fs = e.factors
        for i in range(len(fs)):
            d = differentiate(fs[i], coord)
            if _is_zero(d):
                continue
            terms.append(mul(*fs[:i], d, *fs[i + 1:]))
        return add(*terms)
    if isinstance(e, IntPow):
        d = differentiate(e.base, coord)
        if _is_zero(d):
            return ZERO
        return mul(Rat(Fraction(e.exponent)), intpow(e.base, e.exponent - 1), d)
    if isinstance(e, Neg):
        return neg(differentiate(e.arg, coord))
    if isinstance(e, Quot):
        du = differentiate(e.num, coord)
        dv = differentiate(e.den, coord)
        return quot(sub(mul(du, e.den), mul(e.num, dv)), intpow(e.den, 2))
    if isinstance(e, Sin):
        return mul(Cos(e.arg), differentiate(e.arg, coord))
    if isinstance(e, Cos):
        return neg(mul(Sin(e.arg), differentiate(e.arg, coord)))
    if isinstance(e, Exp):
        return mul(e, differentiate(e.arg, coord))
    raise TypeError(f"unknown node {e!r}")


# ---------------------------------------------------------------------------
# Evaluation


def evaluate(e: Expression, point: Sequence[float]) -> float:
    """IEEE evaluation; division by zero and overflow yield non-finite values."""
    return evaluate_with_magnitude(e, point)[0]


def evaluate_with_magnitude(e: Expression, point: Sequence[float]) -> tuple[float, float]:
    """Evaluate and also report the largest absolute intermediate value.

    The magnitude feeds the relative tolerance of the numeric zero test.
    """
    if isinstance(e, Rat):
        v = float(e.value)
        return v, abs(v)
    if isinstance(e, Coord):
        v = float(point[e.index])
        return v, abs(v)
    if isinstance(e, Sum):
        v, m = 0.0, 0.0
        for t in e.terms:
            tv, tm = evaluate_with_magnitude(t, point)
            v += tv
            m = max(m, tm)
        return v, max(m, abs(v))
    if isinstance(e, Product):
        v, m = 1.0, 0.0
        for f in e.factors:
            fv, fm = evaluate_with_magnitude(f, point)
            v *= fv
            m = max(m, fm)
        return v, max(m, abs(v))
    if isinstance(e, IntPow):
        bv, bm = evaluate_with_magnitude(e.base, point)
        try:
            v = bv ** e.exponent
        except (OverflowError, ZeroDivisionError):
            v = math.inf
        return v, max(bm, abs(v))
    if isinstance(e, Neg):
        v, m = evaluate_with_magnitude(e.arg, point)
        return -v, m
    if isinstance(e, Quot):
        nv, nm = evaluate_with_magnitude(e.num, point)
        dv, dm = evaluate_with_magnitude(e.den, point)
        if dv == 0.0:
            return math.nan, max(nm, dm)
        v = nv / dv
        return v, max(nm, dm, abs(v))
    if isinstance(e, Sin):
        av, am = evaluate_with_magnitude(e.arg, point)
        v = math.sin(av) if math.isfinite(av) else math.nan
        return v, max(am, abs(v))
    if isinstance(e, Cos):
        av, am = evaluate_with_magnitude(e.arg, point)
        v = math.cos(av) if math.isfinite(av) else math.nan
        return v, max(am, abs(v))
    if isinstance(e, Exp):
        av, am = evaluate_with_magnitude(e.arg, point)
        if not math.isfinite(av):
            v = math.nan if math.isnan(av) else (0.0 if av < 0 else math.inf)
        else:
            try:
                v = math.exp(av)
            except OverflowError:
                v = math.inf
        return v, max(am, abs(v))
    raise TypeError(f"unknown node {e!r}")


def interval_evaluate(e: Expression, boxes: Sequence[tuple]) -> tuple:
    """Conservative interval bounds of ``e`` over a coordinate box.

    Plain interval arithmetic: bounds are valid but not tight. Quotients
    whose denominator interval straddles zero widen to the whole line;
    sine and cosine use the [-1, 1] envelope.
    """
    if isinstance(e, Rat):
        v = float(e.value)
        return (v, v)
    if isinstance(e, Coord):
        lo, hi = boxes[e.index]
        return (float(lo), float(hi))
    if isinstance(e, Sum):
        lo = hi = 0.0
        for t in e.terms:
            tl, th = interval_evaluate(t, boxes)
            lo += tl
            hi += th
        return (lo, hi)
    if isinstance(e, Product):
        lo, hi = 1.0, 1.0
        for f in e.factors:
            fl, fh = interval_evaluate(f, boxes)
            cands = (lo * fl, lo * fh, hi * fl, hi * fh)
            lo, hi = min(cands), max(cands)
        return (lo, hi)
    if isinstance(e, IntPow):
        bl, bh = interval_evaluate(e.base, boxes)
        k = e.exponent
        if k % 2 == 0 and bl < 0 < bh:
            return (0.0, max(abs(bl), abs(bh)) ** k)
        cands = (bl ** k, bh ** k)
        return (min(cands), max(cands))
    if isinstance(e, Neg):
        lo, hi = interval_evaluate(e.arg, boxes)
        return (-hi, -lo)
    if isinstance(e, Quot):
        nl, nh = interval_evaluate(e.num, boxes)
        dl, dh = interval_evaluate(e.den, boxes)
        if dl <= 0 <= dh:
            return (-math.inf, math.inf)
        cands = (nl / dl, nl / dh, nh / dl, nh / dh)
        return (min(cands), max(cands))
    if isinstance(e, (Sin, Cos)):
        return (-1.0, 1.0)
    if isinstance(e, Exp):
        al, ah = interval_evaluate(e.arg, boxes)
        try:
            lo = math.exp(al)
        except OverflowError:
            lo = math.inf
        try:
            hi = math.exp(ah)
        except OverflowError:
            hi = math.inf
        return (lo, hi)
    raise TypeError(f"unknown node {e!r}")


def exact_eval(e: Expression, point: Sequence[Fraction]) -> Fraction:
    """Evaluate over the rationals; raises on transcendental nodes."""
    if isinstance(e, Rat):
        return e.value
    if isinstance(e, Coord):
        return Fraction(point[e.index])
    if isinstance(e, Sum):
        return sum((exact_eval(t, point) for t in e.terms), Fraction(0))
    if isinstance(e, Product):
        v = Fraction(1)
        for f in e.factors:
            v *= exact_eval(f, point)
        return v
    if isinstance(e, IntPow):
        return exact_eval(e.base, point) ** e.exponent
    if isinstance(e, Neg):
        return -exact_eval(e.arg, point)
    if isinstance(e, Quot):
        d = exact_eval(e.den, point)
        if d == 0:
            raise ZeroDivisionError("exact evaluation hit a zero denominator")
        return exact_eval(e.num, point) / d
    raise ExprError("exact evaluation is only defined for rational trees")


# ---------------------------------------------------------------------------
# Polynomial canonical form
#
# A polynomial is a map from monomials to rational coefficients. Monomials
# are tuples of (coordinate index, positive exponent) pairs sorted by index.

Monomial = tuple
Poly = dict


def is_polynomial(e: Expression) -> bool:
    if isinstance(e, (Rat, Coord)):
        return True
    if isinstance(e, Sum):
        return all(is_polynomial(t) for t in e.terms)
    if isinstance(e, Product):
        return all(is_polynomial(f) for f in e.factors)
    if isinstance(e, IntPow):
        return e.exponent >= 0 and is_polynomial(e.base)
    if isinstance(e, Neg):
        return is_polynomial(e.arg)
    return False


def expand_polynomial(e: Expression) -> Poly:
    """Canonical expansion over the rationals; caller must check is_polynomial."""
    if isinstance(e, Rat):
        return {(): e.value} if e.value != 0 else {}
    if isinstance(e, Coord):
        return {((e.index, 1),): Fraction(1)}
    if isinstance(e, Sum):
        out: Poly = {}
        for t in e.terms:
            poly_add_inplace(out, expand_polynomial(t))
        return out
    if isinstance(e, Product):
        out = {(): Fraction(1)}
        for f in e.factors:
            out = poly_mul(out, expand_polynomial(f))
        return out
    if isinstance(e, IntPow):
        base = expand_polynomial(e.base)
        out = {(): Fraction(1)}
        for _ in range(e.exponent):
            out = poly_mul(out, base)
        return out
    if isinstance(e, Neg):
        return {m: -c for m, c in expand_polynomial(e.arg).items()}
    raise ExprError("expression is not polynomial")


def poly_add_inplace(a: Poly, b: Poly) -> None:
    for m, c in b.items():
        v = a.get(m, Fraction(0)) + c
        if v == 0:
            a.pop(m, None)
        else:
            a[m] = v


def poly_add(a: Poly, b: Poly) -> Poly:
    out = dict(a)
    poly_add_inplace(out, b)
    return out


def poly_mul(a: Poly, b: Poly) -> Poly:
    out: Poly = {}
    for ma, ca in a.items():
        for mb, cb in b.items():
            m = _mono_mul(ma, mb)
            v = out.get(m, Fraction(0)) + ca * cb
            if v == 0:
                out.pop(m, None)
            else:
                out[m] = v
    return out


def _mono_mul(a: Monomial, b: Monomial) -> Monomial:
    exps: dict[int, int] = {}
    for i, k in a:
        exps[i] = exps.get(i, 0) + k
    for i, k in b:
        exps[i] = exps.get(i, 0) + k
    return tuple(sorted(exps.items()))


def poly_eval(p: Poly, point: Sequence[Fraction]) -> Fraction:
    total = Fraction(0)
    for m, c in p.items():
        v = c
        for i, k in m:
            v *= Fraction(point[i]) ** k
        total += v
    return total


def poly_to_expression(p: Poly) -> Expression:
    terms = []
    for m in sorted(p.keys()):
        factors: list[Expression] = [Rat(p[m])]
        for i, k in m:
            factors.append(intpow(Coord(i), k))
        terms.append(mul(*factors))
    return add(*terms)


def simplify(e: Expression) -> Expression:
    """Best-effort tidy-up; correctness of the engine never relies on it."""
    if is_polynomial(e):
        return poly_to_expression(expand_polynomial(e))
    if isinstance(e, Sum):
        return add(*(simplify(t) for t in e.terms))
    if isinstance(e, Product):
        return mul(*(simplify(f) for f in e.factors))
    if isinstance(e, IntPow):
        return intpow(simplify(e.base), e.exponent)
    if isinstance(e, Neg):
        return neg(simplify(e.arg))
    if isinstance(e, Quot):
        return quot(simplify(e.num), simplify(e.den))
    if isinstance(e, Sin):
        return sin_(simplify(e.arg))
    if isinstance(e, Cos):
        return cos_(simplify(e.arg))
    if isinstance(e, Exp):
        return exp_(simplify(e.arg))
    return e


# ---------------------------------------------------------------------------
# Sampling and the zero test

_M64 = (1 << 64) - 1


def _mix(z: int) -> int:
    z = (z + 0x9E3779B97F4A7C15) & _M64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _M64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _M64
    return z ^ (z >> 31)


def sample_unit(seed: int, index: int, coord: int) -> float:
    """Counter-based uniform sample in [0, 1); independent of call order."""
    h = _mix(_mix(_mix(seed & _M64) ^ ((index * 0xD1B54A32D192ED03) & _M64))
             ^ ((coord * 0x8CB92BA72F3D8DD7) & _M64))
    return h / 2.0 ** 64


@dataclass(frozen=True)
class SamplePoint:
    values: tuple

    def __iter__(self) -> Iterator[float]:
        return iter(self.values)

    def __getitem__(self, i: int) -> float:
        return self.values[i]

    def __len__(self) -> int:
        return len(self.values)


@dataclass(frozen=True)
class SampleDomain:
    """Per-coordinate closed intervals with sampling parameters.

    A degenerate interval pins its coordinate to a single value.
    """

    intervals: tuple
    n_samples: int = 32
    seed: int = 0
    tol: float = 1e-9

    def __post_init__(self):
        if self.n_samples < 1:
            raise ValueError("n_samples must be at least 1")
        if self.tol <= 0:
            raise ValueError("tol must be positive")
        for lo, hi in self.intervals:
            if hi < lo:
                raise ValueError(f"empty interval ({lo}, {hi})")

    @property
    def dim(self) -> int:
        return len(self.intervals)

    def point(self, index: int) -> SamplePoint:
        vals = []
        for j, (lo, hi) in enumerate(self.intervals):
            u = sample_unit(self.seed, index, j)
            vals.append(lo + u * (hi - lo))
        return SamplePoint(tuple(vals))

    def points(self) -> list[SamplePoint]:
        return [self.point(k) for k in range(self.n_samples)]

    def with_(self, n_samples: Optional[int] = None, seed: Optional[int] = None,
              tol: Optional[float] = None) -> "SampleDomain":
        return SampleDomain(
            self.intervals,
            self.n_samples if n_samples is None else n_samples,
            self.seed if seed is None else seed,
            self.tol if tol is None else tol,
        )


EXACT_ZERO = "ExactZero"
NUMERICALLY_ZERO = "NumericallyZero"
NONZERO = "NonZero"


@dataclass(frozen=True)
class Verdict:
    kind: str
    witness: Optional[SamplePoint] = None
    value: Optional[float] = None

    @property
    def is_zero(self) -> bool:
        return self.kind in (EXACT_ZERO, NUMERICALLY_ZERO)

    @property
    def exact(self) -> bool:
        return self.kind == EXACT_ZERO

    def __str__(self) -> str:
        if self.kind == NONZERO:
            pt = tuple(round(v, 6) for v in self.witness.values) if self.witness else None
            return f"NonZero(at {pt}, value {self.value:.3g})"
        return self.kind


def is_identically_zero(e: Expression, domain: SampleDomain) -> Verdict:
    """Two-tier zero test.

    Polynomial trees are expanded exactly; the zero polynomial certifies
    ExactZero. Everything else (and nonzero polynomials, to produce a
    witness) is sampled on the domain, rejecting non-finite evaluations and
    resampling up to 10x the requested count.
    """
    if is_polynomial(e):
        if not expand_polynomial(e):
            return Verdict(EXACT_ZERO)
    accepted = 0
    for k in range(10 * domain.n_samples):
        p = domain.point(k)
        v, mag = evaluate_with_magnitude(e, p.values)
        if not math.isfinite(v):
            continue
        accepted += 1
        if abs(v) > domain.tol * (1.0 + mag):
            return Verdict(NONZERO, witness=p, value=v)
        if accepted >= domain.n_samples:
            break
    if accepted < domain.n_samples:
        raise SamplingExhausted(
            f"only {accepted}/{domain.n_samples} finite samples after "
            f"{10 * domain.n_samples} attempts")
    return Verdict(NUMERICALLY_ZERO)
