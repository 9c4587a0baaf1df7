"""Askey-Wilson kernels h(x; lam), integrands over [0, pi] and closed forms.

``theta`` arguments may be a float, a numpy array of angles, or a
KernelPoint. Parameters travel as plain mappings (``{"a": 0.3, ...}``);
names absent from the mapping are taken as 0.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .errors import DomainError, InvalidArgument, PoleError
from .qhyper import PhiSpec, WSpec, eval_phi, eval_w, sum_series
from .qnum import QContext, as_cx, check_pole, qpoch_finite, qpoch_inf, qpoch_ratio

IDENTITY_IDS = ("AW", "AW-sub1", "AW-sub2", "AW-sub3", "AW-1p", "AW-2p", "AW-3p",
                "ISV", "NR", "Liu", "Prop6", "liu-special")

# Parameter names each integral identity reads.
PARAM_NAMES = {
    "AW": ("a", "b", "c", "d"),
    "AW-sub1": ("a",),
    "AW-sub2": ("a",),
    "AW-sub3": ("a",),
    "AW-1p": ("a",),
    "AW-2p": ("a", "b"),
    "AW-3p": ("a", "b", "c"),
    "ISV": ("a", "b", "c", "d", "f"),
    "NR": ("a", "b", "c", "d", "f", "mu"),
    "liu-special": ("a", "b", "c", "d", "f", "mu"),
    "Prop6": ("a", "b", "c", "d", "f", "g"),
    "Liu": ("a", "b", "c", "d", "f", "r", "s", "t", "z", "beta", "delta"),
}

REAL_IMAG_TOL = 1e-12
TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class KernelPoint:
    theta: float
    x: float = field(init=False)

    def __post_init__(self):
        th = float(self.theta)
        if not 0.0 <= th <= math.pi:
            raise InvalidArgument(f"theta must lie in [0, pi], got {th!r}")
        object.__setattr__(self, "theta", th)
        object.__setattr__(self, "x", math.cos(th))


@dataclass(frozen=True)
class AwParams:
    a: complex = 0j
    b: complex = 0j
    c: complex = 0j
    d: complex = 0j
    f: complex = 0j
    g: complex = 0j
    mu: complex = 0j

    def as_dict(self) -> dict:
        return {k: complex(getattr(self, k)) for k in ("a", "b", "c", "d", "f", "g", "mu")}


@dataclass(frozen=True)
class LiuParams:
    """Parameters of the twelve-parameter integral; alpha = a^2 b c d f / q."""

    a: complex
    b: complex
    c: complex
    d: complex
    f: complex
    r: complex
    s: complex
    t: complex
    z: complex
    beta: complex
    delta: complex
    q: complex
    alpha: complex = field(init=False)

    def __post_init__(self):
        for name in ("a", "b", "c", "d", "f", "r", "s", "t", "z", "beta", "delta", "q"):
            object.__setattr__(self, name, as_cx(getattr(self, name), name))
        if self.q == 0:
            raise InvalidArgument("alpha = a^2 b c d f / q needs q != 0")
        alpha = self.a * self.a * self.b * self.c * self.d * self.f / self.q
        if alpha == 0:
            raise InvalidArgument("alpha = a^2 b c d f / q vanishes; the a = 0 (alpha -> 0) case is not evaluated")
        object.__setattr__(self, "alpha", alpha)

    @classmethod
    def from_mapping(cls, params: Mapping, ctx: QContext) -> LiuParams:
        names = PARAM_NAMES["Liu"]
        return cls(*(params.get(k, 0) for k in names), q=ctx.q)


def _theta(pt):
    if isinstance(pt, KernelPoint):
        return pt.theta
    if isinstance(pt, np.ndarray):
        return pt.astype(float)
    return float(pt)


def _is_real(v) -> bool:
    return not np.any(np.imag(v))


def kernel_h(pt, lam, ctx: QContext):
    """h(x; lam) = (lam e^{i theta}, lam e^{-i theta}; q)_inf."""
    th = _theta(pt)
    lam = as_cx(lam, "lambda")
    e = np.exp(1j * th)
    einv = np.exp(-1j * th)
    val = qpoch_inf(lam * e, ctx) * qpoch_inf(lam * einv, ctx)
    if _is_real(lam) and _is_real(ctx.q):
        im = np.abs(np.imag(val))
        if np.any(im > 1e-14 * np.abs(val)):
            raise ArithmeticError("h(x; lam) lost realness for real lam, q")
        return np.real(val) if isinstance(val, np.ndarray) else float(np.real(val))
    return val


def kernel_prod(pt, lams, ctx: QContext):
    out = 1.0
    for lam in lams:
        out = out * kernel_h(pt, lam, ctx)
    return out


def aw_weight(pt, ctx: QContext):
    """h(x; 1, -1, q^{1/2}, -q^{1/2})."""
    p = ctx.p
    return kernel_prod(pt, (1.0, -1.0, p, -p), ctx)


def _get(params: Mapping, names, idv):
    allowed = PARAM_NAMES[idv]
    for k in params:
        if k not in allowed:
            raise InvalidArgument(f"{idv} takes parameters {allowed}, got unexpected {k!r}")
    return [as_cx(params.get(k, 0), k) for k in names]


def check_domain(idv: str, params: Mapping, ctx: QContext):
    """Raise DomainError when params break the hypotheses of identity ``idv``."""
    if idv not in PARAM_NAMES:
        raise InvalidArgument(f"unknown identity id {idv!r}")
    vals = dict(zip(PARAM_NAMES[idv], _get(params, PARAM_NAMES[idv], idv)))
    moduli_names = [k for k in vals if not (idv == "Liu" and k in ("beta", "delta"))]
    for k in moduli_names:
        if abs(vals[k]) >= 1:
            raise DomainError(f"modulus bound |{k}|<1 violated (|{k}| = {abs(vals[k]):.6g})")
    if idv == "AW":
        a, b, c, d = (vals[k] for k in "abcd")
        if abs(a * b * c * d / ctx.q) >= 1:
            raise DomainError("|abcd/q|<1 violated")
    if idv == "NR" and (vals["d"] == 0 or vals["f"] == 0 or vals["mu"] == 0):
        raise DomainError("NR closed form needs d, f, mu != 0 (mu/d, mu/f enter the 8W7)")
    if idv == "liu-special":
        if vals["a"] == 0 or vals["mu"] == 0:
            raise DomainError("liu-special needs a, mu != 0")
        if abs(vals["mu"] / vals["a"]) >= 1:
            raise DomainError("|mu/a|<1 violated (argument of the 8W7)")
    if idv == "Prop6" and (vals["f"] == 0 or vals["g"] == 0):
        raise DomainError("Prop6 needs f, g != 0 (g/f appears in the closed form)")
    if idv == "Liu":
        LiuParams.from_mapping(params, ctx)
    return vals


def _project_real(val, params_real: bool, ctx: QContext):
    if not (params_real and _is_real(ctx.q)):
        return val
    im = np.abs(np.imag(val))
    scale = max(float(np.max(np.abs(val))), 1e-300)
    if np.any(im > REAL_IMAG_TOL * scale):
        raise ArithmeticError(f"integrand not real for real parameters (|Im| up to {float(np.max(im)):.3g})")
    return np.real(val) if isinstance(val, np.ndarray) else float(np.real(val))


def integrand(idv: str, pt, params: Mapping, ctx: QContext):
    """Pointwise (or vectorized over theta) integrand of identity ``idv``."""
    if idv not in PARAM_NAMES:
        raise InvalidArgument(f"unknown identity id {idv!r}")
    names = PARAM_NAMES[idv]
    vals = dict(zip(names, _get(params, names, idv)))
    p = ctx.p
    if idv == "AW-sub1":
        val = kernel_h(pt, p, ctx) / kernel_h(pt, vals["a"], ctx)
    elif idv == "AW-sub2":
        val = kernel_prod(pt, (p, -p), ctx) / kernel_h(pt, vals["a"], ctx)
    elif idv == "AW-sub3":
        val = kernel_prod(pt, (1.0, p, -p), ctx) / kernel_h(pt, vals["a"], ctx)
    elif idv in ("NR", "liu-special"):
        den = [vals[k] for k in "abcdf"]
        val = aw_weight(pt, ctx) * kernel_h(pt, vals["mu"], ctx) / kernel_prod(pt, den, ctx)
    elif idv == "Liu":
        den = [vals[k] for k in "abcdf"]
        val = aw_weight(pt, ctx) / kernel_prod(pt, den, ctx)
        val = val * liu_inner_phi(pt, vals, ctx)
    else:
        # AW, AW-1p..3p, ISV, Prop6: the full weight over h(x; params)
        val = aw_weight(pt, ctx) / kernel_prod(pt, list(vals.values()), ctx)
    return _project_real(val, all(_is_real(v) for v in vals.values()), ctx)


def liu_inner_phi(pt, vals: Mapping, ctx: QContext):
    """4phi3(a e^{it}, a e^{-it}, beta, delta; r, s, t; q, bcdfz) at each theta."""
    th = _theta(pt)
    a = vals["a"]
    upper = (a * np.exp(1j * th), a * np.exp(-1j * th), vals["beta"], vals["delta"])
    lower = (vals["r"], vals["s"], vals["t"])
    z = vals["b"] * vals["c"] * vals["d"] * vals["f"] * vals["z"]
    if isinstance(th, np.ndarray):
        upper = tuple(np.broadcast_to(u, th.shape) for u in upper)
    return eval_phi(PhiSpec(upper, lower, z), ctx)


def _isv_closed(a, b, c, d, f, ctx):
    pre = qpoch_ratio(
        [a * b * c * d, a * b * c * f],
        [ctx.q, a * b, a * c, a * d, a * f, b * c, b * d, b * f, c * d, c * f],
        ctx, ["q", "ab", "ac", "ad", "af", "bc", "bd", "bf", "cd", "cf"])
    series = eval_phi(PhiSpec((a * b, a * c, b * c), (a * b * c * d, a * b * c * f), d * f), ctx)
    return TWO_PI * pre * series


def _prop6_half(a, b, c, d, f, g, ctx):
    """First summand of the f <-> g symmetric closed form; the second swaps f, g."""
    q = ctx.q
    pre = qpoch_ratio(
        [a * b * c * d, a * b * c * f],
        [q, a * b, a * c, a * d, a * f, b * c, b * d, b * f, c * d, c * f, f * g, g / f],
        ctx, ["q", "ab", "ac", "ad", "af", "bc", "bd", "bf", "cd", "cf", "fg", "g/f"])
    check_pole(q * f / g, ctx, "qf/g", n=ctx.max_terms)

    def terms():
        coef = 1.0 + 0j
        qn = 1.0 + 0j
        n = 0
        while True:
            inner = eval_phi(PhiSpec((a * b, a * c, b * c), (a * b * c * d, a * b * c * f * qn),
                                     d * f * qn), ctx)
            yield coef * inner
            coef *= ((1 - a * f * qn) * (1 - b * f * qn) * (1 - c * f * qn) * q
                     / ((1 - q * qn) * (1 - q * f / g * qn) * (1 - a * b * c * f * qn)))
            qn *= q
            n += 1

    return TWO_PI * pre * sum_series(terms(), ctx, label="Prop6 n-sum")


def rhs_closed(idv: str, params: Mapping, ctx: QContext):
    """Closed-form right-hand side of identity ``idv``."""
    if idv not in PARAM_NAMES:
        raise InvalidArgument(f"unknown identity id {idv!r}")
    names = PARAM_NAMES[idv]
    v = dict(zip(names, _get(params, names, idv)))
    q, p = ctx.q, ctx.p
    if idv == "AW":
        a, b, c, d = (v[k] for k in "abcd")
        return TWO_PI * qpoch_ratio(
            [a * b * c * d], [q, a * b, a * c, a * d, b * c, b * d, c * d], ctx,
            ["q", "ab", "ac", "ad", "bc", "bd", "cd"])
    if idv == "AW-sub1":
        a = v["a"]
        return math.pi * qpoch_ratio([p * a, p * a], [q, a * a], ctx, ["q", "a^2"])
    if idv == "AW-sub2":
        a = v["a"]
        return math.pi * qpoch_ratio([p, -p], [q, a, -a], ctx, ["q", "a", "-a"])
    if idv == "AW-sub3":
        return TWO_PI * qpoch_ratio([], [q, -v["a"]], ctx, ["q", "-a"])
    if idv == "AW-1p":
        return TWO_PI / qpoch_inf(q, ctx)
    if idv == "AW-2p":
        a, b = v["a"], v["b"]
        return TWO_PI * qpoch_ratio([], [q, a * b], ctx, ["q", "ab"])
    if idv == "AW-3p":
        a, b, c = v["a"], v["b"], v["c"]
        return TWO_PI * qpoch_ratio([], [q, a * b, a * c, b * c], ctx, ["q", "ab", "ac", "bc"])
    if idv == "ISV":
        return _isv_closed(*(v[k] for k in "abcdf"), ctx)
    if idv == "NR":
        a, b, c, d, f, mu = (v[k] for k in ("a", "b", "c", "d", "f", "mu"))
        if d == 0 or f == 0 or mu == 0:
            raise InvalidArgument("NR closed form needs d, f, mu != 0")
        pre = qpoch_ratio(
            [a * mu, b * mu, c * mu, a * b * c * d, a * b * c * f],
            [q, a * b, a * c, a * d, a * f, b * c, b * d, b * f, c * d, c * f, a * b * c * mu],
            ctx, ["q", "ab", "ac", "ad", "af", "bc", "bd", "bf", "cd", "cf", "abc*mu"])
        w = eval_w(WSpec(a * b * c * mu / q, (a * b, a * c, b * c, mu / d, mu / f), d * f), ctx)
        return TWO_PI * pre * w
    if idv == "liu-special":
        a, b, c, d, f, mu = (v[k] for k in ("a", "b", "c", "d", "f", "mu"))
        if a == 0 or mu == 0:
            raise InvalidArgument("liu-special closed form needs a, mu != 0")
        abcdf = a * b * c * d * f
        pre = qpoch_ratio(
            [mu / a, a * mu, a * b * c * d, a * b * c * f, a * b * d * f, a * c * d * f],
            [q, a * b, a * c, a * d, a * f, b * c, b * d, b * f, c * d, c * f, d * f, a * abcdf],
            ctx, ["q", "ab", "ac", "ad", "af", "bc", "bd", "bf", "cd", "cf", "df", "a^2bcdf"])
        w = eval_w(WSpec(a * abcdf / q, (a * b, a * c, a * d, a * f, abcdf / mu), mu / a), ctx)
        return TWO_PI * pre * w
    if idv == "Prop6":
        a, b, c, d, f, g = (v[k] for k in "abcdfg")
        if f == 0 or g == 0:
            raise InvalidArgument("Prop6 closed form needs f, g != 0")
        return _prop6_half(a, b, c, d, f, g, ctx) + _prop6_half(a, b, c, d, g, f, ctx)
    if idv == "Liu":
        return liu_rhs_double_sum(LiuParams.from_mapping(v, ctx), ctx)
    raise InvalidArgument(f"no closed form for {idv!r}")  # pragma: no cover


def _liu_prefactor(P: LiuParams, ctx: QContext):
    a, b, c, d, f = P.a, P.b, P.c, P.d, P.f
    return TWO_PI * qpoch_ratio(
        [a * b * c * d, a * b * c * f, a * b * d * f, a * c * d * f],
        [ctx.q, a * b, a * c, a * d, a * f, b * c, b * d, b * f, c * d, c * f, d * f, ctx.q * P.alpha],
        ctx, ["q", "ab", "ac", "ad", "af", "bc", "bd", "bf", "cd", "cf", "df", "q*alpha"])


def liu_rhs_double_sum(P: LiuParams, ctx: QContext, inner_order: str = "auto"):
    """Right side of the twelve-parameter integral as the outer n-sum of
    terminating 4phi3(q^-n, alpha q^n, beta, delta; r, s, t; q, qz).

    ``inner_order`` picks how each terminating 4phi3 is summed. "forward"
    runs k = 0..n. "reverse" runs k = n..0 with the top term folded into the
    outer coefficient, which cancels the q^{-C(n,2)} growth of the inner terms
    against the q^{C(n,2)} of the outer ones; needed when |qz| >= 1, where
    both overflow long before the outer sum settles. "auto" reverses exactly
    when |qz| >= 1.
    """
    if inner_order not in ("auto", "forward", "reverse"):
        raise InvalidArgument(f"inner_order must be auto, forward or reverse, got {inner_order!r}")
    q, al = ctx.q, P.alpha
    a, b, c, d, f = P.a, P.b, P.c, P.d, P.f
    if abs(1 - al) < 1e-13:
        raise PoleError("1 - alpha vanishes")
    check_pole(q * al, ctx, "q*alpha")
    up = (a * b, a * c, a * d, a * f)
    lo = (a * b * c * d, a * b * c * f, a * b * d * f, a * c * d * f)
    for j, x in enumerate(lo):
        check_pole(x, ctx, ("abcd", "abcf", "abdf", "acdf")[j], n=ctx.max_terms)
    reverse = inner_order == "reverse" or (inner_order == "auto" and abs(q * P.z) >= 1)
    terms = _liu_terms_reverse(P, ctx, up, lo) if reverse else _liu_terms_forward(P, ctx, up, lo)
    return _liu_prefactor(P, ctx) * sum_series(terms, ctx, label="Liu n-sum")


def _liu_terms_forward(P, ctx, up, lo):
    q, al = ctx.q, P.alpha
    bcdf = P.b * P.c * P.d * P.f
    coef = 1.0 + 0j   # (alpha, ab, ac, ad, af)_n / (q, abcd, abcf, abdf, acdf)_n q^C(n,2) (-bcdf)^n
    qn = 1.0 + 0j
    n = 0
    while True:
        wp = (1 - al * qn * qn) / (1 - al)
        inner = eval_phi(PhiSpec((q ** -n, al * qn, P.beta, P.delta), (P.r, P.s, P.t),
                                 q * P.z, terminating_at=n), ctx)
        yield wp * coef * inner
        num = (1 - al * qn)
        den = 1 - q * qn
        for x in up:
            num *= 1 - x * qn
        for x in lo:
            den *= 1 - x * qn
        coef *= num / den * qn * (-bcdf)
        qn *= q
        n += 1


def _nonzero(v, what):
    if abs(v) < 1e-13:
        raise PoleError(f"{what} vanishes in the reversed inner sum")
    return v


def _liu_terms_reverse(P, ctx, up, lo):
    q, al = ctx.q, P.alpha
    x = P.b * P.c * P.d * P.f * P.z
    top_up = (*up, P.beta, P.delta)
    top_lo = (*lo, P.r, P.s, P.t)
    big = 1.0 + 0j   # outer coefficient times the k = n inner term
    qn = 1.0 + 0j
    n = 0
    while True:
        wp = (1 - al * qn * qn) / (1 - al)
        # S_n = sum_j t_{n-j} / t_n, stepping down with t_{k-1}/t_k
        s = 1.0 + 0j
        ratio = 1.0 + 0j
        qk1 = qn / q if n else 1.0   # q^{k-1} for k = n
        for k in range(n, 0, -1):
            m = n - k + 1            # 1/(1 - q^{-m}) = -q^m/(1 - q^m)
            qm = q ** m
            step = (1 - q * qk1) * (1 - P.r * qk1) * (1 - P.s * qk1) * (1 - P.t * qk1)
            step *= -qm / (1 - qm)
            step /= _nonzero((1 - al * qn * qk1) * (1 - P.beta * qk1) * (1 - P.delta * qk1) * q * P.z,
                             "(alpha q^n, beta, delta; q)_n or z")
            ratio *= step
            s += ratio
            qk1 /= q
        yield wp * big * s
        num = (1 - al * qn * qn) * (1 - al * qn * qn * q)
        den = 1 - q * qn
        for u in top_up:
            num *= 1 - u * qn
        for l in top_lo:
            den *= _nonzero(1 - l * qn, "a lower factor of the outer sum")
        big *= num / den * x
        qn *= q
        n += 1


def liu_rhs_relation_form(P: LiuParams, ctx: QContext):
    """Same value after the n -> n + k rearrangement: a single k-sum of
    3phi2(ab q^k, ac q^k, bc; abcd q^k, abcf q^k; q, df)."""
    q = ctx.q
    a, b, c, d, f = P.a, P.b, P.c, P.d, P.f
    if abs(d * f) >= 1:
        raise DomainError("|df|<1 violated")
    rearranged = qpoch_ratio([q * P.alpha, d * f], [a * b * d * f, a * c * d * f], ctx,
                             ["abdf", "acdf"])
    up = (a * b, a * c, a * d, a * f, P.beta, P.delta)
    lo = (a * b * c * d, a * b * c * f, P.r, P.s, P.t)
    x = b * c * d * f * P.z

    def terms():
        coef = 1.0 + 0j
        qk = 1.0 + 0j
        while True:
            if coef == 0:
                yield 0j
            else:
                inner = eval_phi(PhiSpec((a * b * qk, a * c * qk, b * c),
                                         (a * b * c * d * qk, a * b * c * f * qk), d * f), ctx)
                yield coef * inner
            num = 1.0 + 0j
            den = 1 - q * qk
            for u in up:
                num *= 1 - u * qk
            for j, l in enumerate(lo):
                fac = 1 - l * qk
                if abs(fac) < 1e-13:
                    raise PoleError("lower parameter of the k-sum hits q^-k")
                den *= fac
            coef *= num / den * x
            qk *= q

    return _liu_prefactor(P, ctx) * rearranged * sum_series(terms(), ctx, label="relation k-sum")
