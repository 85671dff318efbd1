"""Text syntax for elements and polynomials.

Grammar (whitespace ignored)::

    expr    := term (('+' | '-') term)*
    term    := ['-'] factor ('*' factor)*
    factor  := atom ['^' exponent]
    atom    := NUMBER ['/' NUMBER] | SYMBOL | '(' expr ')'
    exponent:= ['-'] INT ['/' INT] | '(' ['-'] INT ['/' INT] ')'
    element := expr ['@prec' precision]
    precision := VALUE | P '^' INT          (the latter for p-adics)

Symbols: ``t`` (and ``u`` for rank 2) are the series variables, ``g`` is the
generator of F_q over F_p, and one optional polynomial variable (``x``, ``z``,
``X`` ...) produces a polynomial.
"""

from __future__ import annotations

import re
from fractions import Fraction

from ..errors import ParseError
from ..ordval import Value, parse_value
from .models import PadicElement, PadicField, SeriesElement, SeriesField

__all__ = ["format_element", "format_poly", "parse_element", "parse_poly", "parse_precision"]


# -- formatting -------------------------------------------------------------


def _fmt_exp(e: Fraction) -> str:
    if e.denominator == 1 and e >= 0:
        return str(e.numerator)
    if e.denominator == 1:
        return str(e.numerator)
    return f"({e})"


def _fmt_coeff(F, c) -> str:
    if F.k == 1:
        return str(c)
    digits = F._vec(c)
    parts = []
    for i, d in enumerate(digits):
        if not d:
            continue
        mon = "" if i == 0 else ("g" if i == 1 else f"g^{i}")
        if not mon:
            parts.append(str(d))
        else:
            parts.append(mon if d == 1 else f"{d}*{mon}")
    s = " + ".join(parts)
    return f"({s})" if len(parts) > 1 else s


def _fmt_monomial(model, key, c) -> str:
    vars_ = []
    if model.rank == 1:
        e = key[0]
        if e != 0:
            vars_.append("t" if e == 1 else f"t^{_fmt_exp(e)}")
    else:
        te, ue = key
        if ue != 0:
            vars_.append("u" if ue == 1 else f"u^{_fmt_exp(ue)}")
        if te != 0:
            vars_.append("t" if te == 1 else f"t^{_fmt_exp(te)}")
    coeff = _fmt_coeff(model.F, c)
    if not vars_:
        return coeff
    if coeff == "1":
        return "*".join(vars_)
    return "*".join([coeff] + vars_)


def _fmt_prec(el) -> str:
    if el.prec is None:
        return ""
    if isinstance(el, PadicElement):
        return f" @prec {el.model.p}^{el.prec}"
    return f" @prec {el.prec}"


def _fmt_body(el) -> str:
    if isinstance(el, SeriesElement):
        if not el.terms:
            return "0"
        return " + ".join(_fmt_monomial(el.model, k, c) for k, c in el.sorted_terms())
    if el.u == 0:
        return "0"
    p = el.model.p
    if el.e >= 0:
        return str(el.u * p**el.e)
    return f"{el.u}*{p}^{el.e}"


def format_element(el) -> str:
    return _fmt_body(el) + _fmt_prec(el)


def format_poly(poly, var="x") -> str:
    parts = []
    for i, c in enumerate(poly.coeffs):
        if c.is_zero_at_prec():
            continue
        body = _fmt_body(c)
        if " + " in body or body.startswith("-") and i:
            body = f"({body})"
        mon = "" if i == 0 else (var if i == 1 else f"{var}^{i}")
        if not mon:
            parts.append(body)
        elif body == "1":
            parts.append(mon)
        else:
            parts.append(f"{body}*{mon}")
    return " + ".join(parts) if parts else "0"


# -- parsing ----------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_]\w*)|(.))")


def _tokenize(text):
    pos, out = 0, []
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            break
        num, name, sym = m.groups()
        col = m.start() + (len(m.group(0)) - len(m.group(0).lstrip()))
        if num is not None:
            out.append(("num", int(num), col))
        elif name is not None:
            out.append(("name", name, col))
        elif sym.strip():
            out.append(("sym", sym, col))
        pos = m.end()
    out.append(("end", None, len(text)))
    return out


class _Parser:
    def __init__(self, text, model, var):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0
        self.model = model
        self.var = var

    def peek(self):
        return self.toks[self.i]

    def take(self, kind=None, val=None):
        tok = self.toks[self.i]
        if (kind and tok[0] != kind) or (val is not None and tok[1] != val):
            self.fail(f"expected {val or kind}")
        self.i += 1
        return tok

    def fail(self, msg):
        col = self.peek()[2]
        raise ParseError(f"{msg} at column {col + 1}: {self.text!r}", column=col + 1)

    # polynomials are dicts degree -> element (exact)
    def const(self, el):
        return {0: el}

    def add(self, a, b):
        out = dict(a)
        for k, v in b.items():
            out[k] = out[k] + v if k in out else v
        return out

    def mul(self, a, b):
        out = {}
        for i, x in a.items():
            for j, y in b.items():
                out[i + j] = out[i + j] + x * y if i + j in out else x * y
        return out

    def neg(self, a):
        return {k: -v for k, v in a.items()}

    def expr(self):
        acc = self.term()
        while self.peek()[0] == "sym" and self.peek()[1] in "+-":
            op = self.take()[1]
            t = self.term()
            acc = self.add(acc, t if op == "+" else self.neg(t))
        return acc

    def term(self):
        negate = False
        if self.peek()[:2] == ("sym", "-"):
            self.take()
            negate = True
        acc = self.factor()
        while self.peek()[:2] == ("sym", "*"):
            self.take()
            acc = self.mul(acc, self.factor())
        return self.neg(acc) if negate else acc

    def exponent(self):
        paren = False
        if self.peek()[:2] == ("sym", "("):
            self.take()
            paren = True
        sign = 1
        if self.peek()[:2] == ("sym", "-"):
            self.take()
            sign = -1
        num = Fraction(self.take("num")[1])
        if self.peek()[:2] == ("sym", "/"):
            self.take()
            num /= self.take("num")[1]
        if paren:
            self.take("sym", ")")
        return sign * num

    def factor(self):
        tok = self.peek()
        model = self.model
        if tok[0] == "num":
            self.take()
            n = Fraction(tok[1])
            if self.peek()[:2] == ("sym", "/"):
                self.take()
                n /= self.take("num")[1]
            if self.peek()[:2] == ("sym", "^"):
                self.take()
                n = n ** int(self.exponent())
            if isinstance(model, PadicField):
                base = model.element(n)
            else:
                if n.denominator != 1:
                    self.fail("fractions are not allowed in characteristic p")
                base = model.element(int(n))
            return self.const(base)
        if tok[0] == "name":
            self.take()
            name = tok[1]
            if name == self.var:
                base = {1: model.one()}
                if self.peek()[:2] == ("sym", "^"):
                    self.take()
                    e = self.exponent()
                    if e.denominator != 1 or e < 0:
                        self.fail("polynomial exponents must be non-negative integers")
                    return {int(e): model.one()}
                return base
            if isinstance(model, SeriesField) and name in model.symbols:
                e = Fraction(1)
                if self.peek()[:2] == ("sym", "^"):
                    self.take()
                    e = self.exponent()
                key = (e,) if model.rank == 1 else ((e, 0) if name == "t" else (0, e))
                return self.const(model.monomial(1, key))
            if isinstance(model, SeriesField) and name == "g" and model.k > 1:
                e = 1
                if self.peek()[:2] == ("sym", "^"):
                    self.take()
                    e = int(self.exponent())
                c = model.F.pow(model.F.p, e)  # the int p encodes the class of g
                return self.const(model.residue_lift(c))
            self.fail(f"unknown symbol {name!r}")
        if tok[:2] == ("sym", "("):
            self.take()
            inner = self.expr()
            self.take("sym", ")")
            if self.peek()[:2] == ("sym", "^"):
                self.take()
                e = self.exponent()
                if e.denominator != 1 or e < 0:
                    self.fail("only non-negative integer powers of subexpressions")
                acc = {0: model.one()}
                for _ in range(int(e)):
                    acc = self.mul(acc, inner)
                return acc
            return inner
        self.fail("unexpected token")


def parse_precision(text: str, model):
    s = text.strip()
    m = re.fullmatch(r"(\d+)\s*\^\s*(-?\d+)", s)
    if m and isinstance(model, PadicField):
        if int(m.group(1)) != model.p:
            raise ParseError(f"precision base {m.group(1)} does not match p={model.p}")
        return Value((int(m.group(2)),))
    return parse_value(s)


def _split_prec(text):
    if "@prec" in text:
        body, prec = text.split("@prec", 1)
        return body, prec
    return text, None


def parse_poly(text: str, model, var="x"):
    """Parse into a ``Poly`` in ``var``; ``@prec`` applies to every coefficient."""
    from .poly import Poly

    body, prec = _split_prec(text)
    if not body.strip():
        raise ParseError(f"empty expression: {text!r}")
    parser = _Parser(body, model, var)
    d = parser.expr()
    parser.take("end")
    if prec is not None:
        pv = parse_precision(prec, model)
        d = {k: v.with_prec(pv) for k, v in d.items()}
    n = max(d) if d else 0
    return Poly(model, [d.get(i, model.zero()) for i in range(n + 1)])


def parse_element(text: str, model):
    poly = parse_poly(text, model, var=None)
    return poly.coeff(0)
