"""Exact truncated power series in p = q^{1/2} and Laurent series in e^{i theta}.

Integrals over [0, pi] of products of h-kernels are reduced to constant
Fourier coefficients: every factor (u e^{+-i theta}; q)_inf or its
reciprocal is expanded with Euler's formulas, the expansions are multiplied
as Laurent series in e^{i theta} with exact rational p-series coefficients,
and only the degree-0 coefficient survives integration.

Parameters must be graded, i.e. of the form r * p^m with rational r, so
that every expansion is finite below a fixed p-order.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping

from .errors import InvalidArgument, ResourceError, UnsupportedId

MAX_ORDER = 200
MAX_COEFFS = 2_000_000


class PSeries:
    """Truncated series sum_e c_e p^e, known exactly for exponents < order.

    Exponents may be negative (intermediate reciprocals of factors such as
    1 - r p^{-j}); the ``order`` always records the absolute precision.
    """

    __slots__ = ("_c", "order")

    def __init__(self, coeffs: Mapping[int, object] | None = None, order: int = 0):
        self.order = int(order)
        c = {}
        if coeffs:
            for e, v in coeffs.items():
                if e < self.order and v:
                    c[int(e)] = Fraction(v)
        self._c = c

    @classmethod
    def _raw(cls, c: dict, order: int) -> PSeries:
        s = cls.__new__(cls)
        s._c = c
        s.order = order
        return s

    @classmethod
    def one(cls, order: int) -> PSeries:
        return cls({0: 1}, order)

    @classmethod
    def zero(cls, order: int) -> PSeries:
        return cls({}, order)

    @classmethod
    def monomial(cls, coeff, exp: int, order: int) -> PSeries:
        return cls({exp: coeff}, order)

    @property
    def val(self):
        """Lowest exponent with a nonzero coefficient (None for zero)."""
        return min(self._c) if self._c else None

    def coeff(self, e: int) -> Fraction:
        if e >= self.order:
            raise InvalidArgument(f"coefficient p^{e} lies beyond the series order {self.order}")
        return self._c.get(e, Fraction(0))

    def items(self):
        return sorted(self._c.items())

    def coefficients(self, K: int) -> list:
        """Dense list of coefficients of p^0 .. p^{K-1}."""
        return [self.coeff(e) for e in range(K)]

    def __len__(self):
        return len(self._c)

    def __bool__(self):
        return bool(self._c)

    def __repr__(self):
        body = " + ".join(f"({c})*p^{e}" for e, c in self.items()) or "0"
        return f"PSeries({body} + O(p^{self.order}))"

    def __eq__(self, other):
        if not isinstance(other, PSeries):
            return NotImplemented
        return self.order == other.order and self._c == other._c

    __hash__ = None

    def truncate(self, order: int) -> PSeries:
        order = min(order, self.order)
        return PSeries._raw({e: c for e, c in self._c.items() if e < order}, order)

    def __neg__(self):
        return PSeries._raw({e: -c for e, c in self._c.items()}, self.order)

    def __add__(self, other):
        if not isinstance(other, PSeries):
            other = PSeries({0: other}, self.order)
        order = min(self.order, other.order)
        c = {e: v for e, v in self._c.items() if e < order}
        for e, v in other._c.items():
            if e < order:
                s = c.get(e, 0) + v
                if s:
                    c[e] = s
                else:
                    c.pop(e, None)
        return PSeries._raw(c, order)

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def _scale(self, k):
        k = Fraction(k)
        if not k:
            return PSeries._raw({}, self.order)
        return PSeries._raw({e: v * k for e, v in self._c.items()}, self.order)

    def __mul__(self, other):
        if not isinstance(other, PSeries):
            return self._scale(other)
        va, vb = self.val, other.val
        if va is None or vb is None:
            oa = self.order + (vb if vb is not None else other.order)
            ob = other.order + (va if va is not None else self.order)
            return PSeries._raw({}, min(oa, ob))
        order = min(self.order + vb, other.order + va)
        b = other.items()
        acc: dict = {}
        for ea, ca in self.items():
            lim = order - ea
            for eb, cb in b:
                if eb >= lim:
                    break
                e = ea + eb
                acc[e] = acc.get(e, 0) + ca * cb
        if len(acc) > MAX_COEFFS:
            raise ResourceError("p-series coefficient budget exceeded")
        return PSeries._raw({e: v for e, v in acc.items() if v}, order)

    __rmul__ = __mul__

    def shift(self, e: int) -> PSeries:
        """Multiply by p^e."""
        return PSeries._raw({k + e: v for k, v in self._c.items()}, self.order + e)

    def reciprocal(self) -> PSeries:
        v = self.val
        if v is None:
            raise ZeroDivisionError("reciprocal of a zero p-series")
        lead = self._c[v]
        rel = self.order - v               # relative precision
        u = [Fraction(0)] * rel            # self / (lead p^v), leading coefficient 1
        for e, c in self._c.items():
            u[e - v] = c / lead
        inv = [Fraction(0)] * rel
        inv[0] = Fraction(1)
        nz = [(i, u[i]) for i in range(1, rel) if u[i]]
        for n in range(1, rel):
            s = Fraction(0)
            for i, ui in nz:
                if i > n:
                    break
                if inv[n - i]:
                    s += ui * inv[n - i]
            inv[n] = -s
        c = {i - v: x / lead for i, x in enumerate(inv) if x}
        return PSeries._raw(c, rel - v)

    def __truediv__(self, other):
        if isinstance(other, PSeries):
            return self * other.reciprocal()
        return self._scale(Fraction(1) / Fraction(other))

    def evaluate(self, p):
        """Numerical value of the truncated series at p."""
        return sum(float(c) * p**e for e, c in self.items())

    def first_mismatch(self, other: PSeries, K: int):
        """Lowest exponent below K where the coefficients differ, or None."""
        exps = sorted(set(self._c) | set(other._c))
        for e in exps:
            if e < K and self._c.get(e, 0) != other._c.get(e, 0):
                return e
        return None


class LaurentPSeries:
    """Finite Laurent series in e^{i theta} with PSeries coefficients."""

    __slots__ = ("terms", "order")

    def __init__(self, terms: Mapping[int, PSeries] | None = None, order: int = 0):
        self.order = order
        self.terms = {d: s for d, s in (terms or {}).items() if s}

    @classmethod
    def one(cls, order: int) -> LaurentPSeries:
        return cls({0: PSeries.one(order)}, order)

    def term(self, degree: int) -> PSeries:
        return self.terms.get(degree, PSeries.zero(self.order))

    def degrees(self):
        return sorted(self.terms)

    def __mul__(self, other: LaurentPSeries) -> LaurentPSeries:
        order = min(self.order, other.order)
        acc: dict = {}
        for d1, s1 in self.terms.items():
            for d2, s2 in other.terms.items():
                prod = s1 * s2
                if prod:
                    d = d1 + d2
                    acc[d] = acc[d] + prod if d in acc else prod
        return LaurentPSeries({d: s.truncate(order) for d, s in acc.items()}, order)

    def reflect(self) -> LaurentPSeries:
        """Substitute e^{i theta} -> e^{-i theta}."""
        return LaurentPSeries({-d: s for d, s in self.terms.items()}, self.order)

    def constant_term(self) -> PSeries:
        return self.term(0)

    def constant_term_of_product(self, other: LaurentPSeries) -> PSeries:
        """Degree-0 coefficient of self * other without forming the product."""
        order = min(self.order, other.order)
        out = PSeries.zero(order)
        for d, s in self.terms.items():
            t = other.terms.get(-d)
            if t is not None:
                out = out + s * t
        return out.truncate(order)


@dataclass(frozen=True)
class GradedParam:
    """The parameter value r * p^m (m may be 0 or negative for derived monomials)."""

    r: Fraction
    m: int = 1

    def __post_init__(self):
        object.__setattr__(self, "r", Fraction(self.r))
        object.__setattr__(self, "m", int(self.m))

    @property
    def is_zero(self) -> bool:
        return self.r == 0

    def __mul__(self, other):
        if isinstance(other, GradedParam):
            return GradedParam(self.r * other.r, self.m + other.m)
        return GradedParam(self.r * Fraction(other), self.m)

    __rmul__ = __mul__

    def __truediv__(self, other: GradedParam):
        if other.is_zero:
            raise ZeroDivisionError("division by a zero graded parameter")
        return GradedParam(self.r / other.r, self.m - other.m)

    def __neg__(self):
        return GradedParam(-self.r, self.m)

    def __pow__(self, k: int):
        return GradedParam(self.r ** k, self.m * k)

    def as_pseries(self, order: int) -> PSeries:
        return PSeries.monomial(self.r, self.m, order)

    def value(self, p):
        return float(self.r) * p**self.m

    def __str__(self):
        if self.is_zero:
            return "0"
        return f"{self.r}*p^{self.m}"


ONE = GradedParam(1, 0)
P = GradedParam(1, 1)
Q = GradedParam(1, 2)

_GPARAM_RE = re.compile(
    r"^\s*(?:(?P<r>[+-]?\d+(?:/\d+)?)\s*\*?\s*)?(?P<sign>[+-])?\s*(?:p(?:\s*\^\s*(?P<m>\d+))?)?\s*$")


def parse_gparam(text: str) -> GradedParam:
    """Parse 'r*p^m' forms such as '1/2*p^3', '-p', 'p^2', '3*p', '0'."""
    s = text.strip().replace("**", "^")
    m = _GPARAM_RE.match(s)
    if not m or not s:
        raise InvalidArgument(f"cannot parse graded parameter {text!r} (expected r*p^m)")
    has_p = "p" in s
    r = Fraction(m.group("r")) if m.group("r") else Fraction(1)
    if m.group("sign") == "-":
        r = -r
    if not has_p:
        if r != 0:
            raise InvalidArgument(f"graded parameter {text!r} needs a positive power of p")
        return GradedParam(0, 1)
    exp = int(m.group("m")) if m.group("m") else 1
    if exp < 1:
        raise InvalidArgument(f"graded parameter {text!r}: exponent must be >= 1")
    return GradedParam(r, exp)


def _check_order(K: int):
    if K < 1:
        raise InvalidArgument("order K must be positive")
    if K > MAX_ORDER:
        raise ResourceError(f"order K={K} exceeds the configured limit {MAX_ORDER}")


@lru_cache(maxsize=None)
def _inv_qq_counts(k: int, K: int) -> tuple:
    """Coefficients in p of 1/(q;q)_k below p^K (partitions into parts <= k)."""
    c = [0] * K
    c[0] = 1
    for part in range(1, k + 1):
        step = 2 * part
        for n in range(step, K):
            c[n] += c[n - step]
    return tuple(c)


def _inv_qq(k: int, K: int, shift: int, scale: Fraction) -> dict:
    """scale * p^shift / (q;q)_k below p^K."""
    return {e + shift: scale * c for e, c in enumerate(_inv_qq_counts(k, K - shift)) if c}


def expand_numerator_factor(u: GradedParam, K: int) -> LaurentPSeries:
    """(u e^{i theta}; q)_inf = sum_k (-1)^k q^C(k,2) u^k e^{ik theta} / (q;q)_k below p^K."""
    _check_order(K)
    if u.m < 0:
        raise InvalidArgument("numerator factor needs a nonnegative p-grade")
    terms = {0: PSeries.one(K)}
    if u.is_zero:
        return LaurentPSeries(terms, K)
    k = 1
    while k * (k - 1) + u.m * k < K:
        grade = k * (k - 1) + u.m * k
        terms[k] = PSeries._raw(_inv_qq(k, K, grade, (-u.r) ** k), K)
        k += 1
    return LaurentPSeries(terms, K)


def expand_denominator_factor(u: GradedParam, K: int) -> LaurentPSeries:
    """1/(u e^{i theta}; q)_inf = sum_k u^k e^{ik theta} / (q;q)_k below p^K."""
    _check_order(K)
    if u.is_zero:
        return LaurentPSeries.one(K)
    if u.m < 1:
        raise InvalidArgument("denominator parameters must carry a positive p-grade (r*p^m, m >= 1)")
    terms = {}
    k = 0
    while u.m * k < K:
        grade = u.m * k
        terms[k] = PSeries._raw(_inv_qq(k, K, grade, u.r ** k), K)
        k += 1
    return LaurentPSeries(terms, K)


# Integrand of each exactly-checkable identity: (numerator kernel params, denominator names).
_WEIGHT = (ONE, -ONE, P, -P)
ORACLE_IDS = {
    "AW": (_WEIGHT, ("a", "b", "c", "d")),
    "AW-sub1": ((P,), ("a",)),
    "AW-sub2": ((P, -P), ("a",)),
    "AW-sub3": ((ONE, P, -P), ("a",)),
    "AW-1p": (_WEIGHT, ("a",)),
    "AW-2p": (_WEIGHT, ("a", "b")),
    "AW-3p": (_WEIGHT, ("a", "b", "c")),
    "ISV": (_WEIGHT, ("a", "b", "c", "d", "f")),
    "Prop6": (_WEIGHT, ("a", "b", "c", "d", "f", "g")),
}


def _resolve(idv: str, gparams: Mapping[str, GradedParam]):
    if idv not in ORACLE_IDS:
        raise UnsupportedId(f"identity {idv!r} is outside the exact oracle's scope "
                            f"(supported: {', '.join(ORACLE_IDS)})")
    num, names = ORACLE_IDS[idv]
    for k, v in gparams.items():
        if k not in names:
            raise InvalidArgument(f"{idv} takes graded parameters {names}, got unexpected {k!r}")
        if not isinstance(v, GradedParam):
            raise InvalidArgument(f"parameter {k} must be a GradedParam")
        if not v.is_zero and v.m < 1:
            raise InvalidArgument(f"parameter {k} is not graded (needs r*p^m with m >= 1)")
    vals = {k: gparams.get(k, GradedParam(0, 1)) for k in names}
    return num, vals


def constant_term_integral(idv: str, gparams: Mapping[str, GradedParam], K: int) -> PSeries:
    """(1/pi) * integral over [0, pi] of the integrand of ``idv``, exactly below p^K."""
    _check_order(K)
    num, vals = _resolve(idv, gparams)
    side = LaurentPSeries.one(K)
    for u in num:
        side = side * expand_numerator_factor(u, K)
    for u in vals.values():
        side = side * expand_denominator_factor(u, K)
    # every kernel is (u e^{it})(u e^{-it}), so the integrand is side * side(e^{-it})
    return side.constant_term_of_product(side.reflect())


def _qpoch_ps(x: GradedParam, order: int, n=None) -> PSeries:
    """(x;q)_n as a p-series (n=None: infinite product)."""
    out = PSeries.one(order)
    if x.is_zero:
        return out
    k = 0
    while (k < n) if n is not None else (x.m + 2 * k < order):
        e = x.m + 2 * k
        if e == 0:
            out = out * PSeries({0: 1 - x.r}, order)
        elif e < order:
            out = out * PSeries({0: 1, e: -x.r}, order)
        k += 1
    return out


def _ratio_ps(num: Iterable[GradedParam], den: Iterable[GradedParam], order: int, n=None) -> PSeries:
    out = PSeries.one(order)
    for x in num:
        out = out * _qpoch_ps(x, order, n)
    for x in den:
        d = _qpoch_ps(x, order, n)
        if not d:
            raise ZeroDivisionError(f"({x};q) vanishes identically")
        out = out * d.reciprocal()
    return out


def _phi_ps(upper, lower, z: GradedParam, order: int) -> PSeries:
    """_{s+1}phi_s(upper; lower; q, z) with z of positive grade, below p^order."""
    out = PSeries.zero(order)
    if z.is_zero:
        return PSeries.one(order)
    if z.m < 1:
        raise InvalidArgument("series argument must carry a positive p-grade")
    k = 0
    while z.m * k < order:
        term = (z ** k).as_pseries(order) * _ratio_ps(upper, [Q, *lower], order, n=k)
        out = out + term
        k += 1
    return out


def _rhs_at(idv: str, v: Mapping[str, GradedParam], W: int) -> PSeries:
    two = Fraction(2)
    if idv == "AW":
        a, b, c, d = (v[k] for k in "abcd")
        return _ratio_ps([a * b * c * d], [Q, a * b, a * c, a * d, b * c, b * d, c * d], W) * two
    if idv == "AW-sub1":
        a = v["a"]
        return _ratio_ps([P * a, P * a], [Q, a * a], W)
    if idv == "AW-sub2":
        a = v["a"]
        return _ratio_ps([P, -P], [Q, a, -a], W)
    if idv == "AW-sub3":
        return _ratio_ps([], [Q, -v["a"]], W) * two
    if idv == "AW-1p":
        return _ratio_ps([], [Q], W) * two
    if idv == "AW-2p":
        a, b = v["a"], v["b"]
        return _ratio_ps([], [Q, a * b], W) * two
    if idv == "AW-3p":
        a, b, c = v["a"], v["b"], v["c"]
        return _ratio_ps([], [Q, a * b, a * c, b * c], W) * two
    if idv == "ISV":
        a, b, c, d, f = (v[k] for k in "abcdf")
        pre = _ratio_ps([a * b * c * d, a * b * c * f],
                        [Q, a * b, a * c, a * d, a * f, b * c, b * d, b * f, c * d, c * f], W)
        return pre * _phi_ps([a * b, a * c, b * c], [a * b * c * d, a * b * c * f], d * f, W) * two
    if idv == "Prop6":
        a, b, c, d, f, g = (v[k] for k in "abcdfg")
        if f.is_zero or g.is_zero:
            raise InvalidArgument("Prop6 needs f, g != 0")
        return _prop6_half_ps(a, b, c, d, f, g, W) + _prop6_half_ps(a, b, c, d, g, f, W)
    raise UnsupportedId(idv)  # pragma: no cover


def _prop6_half_ps(a, b, c, d, f, g, W):
    pre = _ratio_ps([a * b * c * d, a * b * c * f],
                    [Q, a * b, a * c, a * d, a * f, b * c, b * d, b * f, c * d, c * f, f * g, g / f], W)
    total = PSeries.zero(W)
    n = 0
    # q^n carries p^{2n}; 1/(q f/g; q)_n never lowers the valuation
    slack = max(0, -(pre.val or 0))
    while 2 * n < W + slack:
        qn = GradedParam(1, 2 * n)
        coef = _ratio_ps([a * f, b * f, c * f], [Q, Q * f / g, a * b * c * f], W, n=n)
        inner = _phi_ps([a * b, a * c, b * c], [a * b * c * d, a * b * c * f * qn], d * f * qn, W)
        total = total + coef * inner * qn.as_pseries(W)
        n += 1
    return pre * total * Fraction(2)


def rhs_pseries(idv: str, gparams: Mapping[str, GradedParam], K: int) -> PSeries:
    """Closed-form right side of ``idv`` divided by pi, exactly below p^K."""
    _check_order(K)
    _, vals = _resolve(idv, gparams)
    W = K
    for _ in range(8):
        out = _rhs_at(idv, vals, W)
        if out.order >= K:
            return out.truncate(K)
        W += K - out.order
    raise ResourceError(f"could not reach p-order {K} for {idv}")  # pragma: no cover
