"""Registry of every identity the harness can check.

Each entry knows how to evaluate its two sides, which parameters it takes,
where those parameters may live, and how to draw random admissible points.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Callable, Mapping, Optional

import numpy as np

from . import awkernel
from .awkernel import (LiuParams, aw_weight, integrand, kernel_h, kernel_prod, liu_rhs_double_sum,
                       liu_rhs_relation_form, rhs_closed)
from .errors import DomainError, QSeriesError, UnsupportedId
from .qhyper import (PhiSpec, WSpec, closed_form_q_binomial, closed_form_q_gauss, eval_phi, eval_w,
                     phi, sum_series)
from .qnum import QContext, qpoch_inf, qpoch_ratio
from .quadrature import integrate_even_periodic

DOMAIN_MARGIN = 1e-12   # pole distance accepted from callers
SAMPLE_MARGIN = 0.05    # pole distance demanded of random samples
MAX_SAMPLE_CONDITION = 1e4


def near_neg_qpower(x: complex, q: complex, margin: float) -> bool:
    """True if x lies within ``margin`` (relative) of q^-m for some m >= 0."""
    if abs(x) == 0:
        return False
    xq = complex(x)
    for _ in range(2000):
        if abs(1 - xq) <= margin:
            return True
        if abs(xq) < 0.5 or abs(q) == 0:
            return False
        xq *= q
    return False


@dataclass(frozen=True)
class IdentityEntry:
    id: str
    kind: str                      # integral | series | transformation | rearrangement
    params: tuple
    lhs: Callable                  # (params, ctx) -> (value, err_estimate | None)
    rhs: Callable                  # (params, ctx) -> value
    ranges: Mapping[str, tuple]    # sampling modulus ranges
    default_tol: float
    default_samples: int
    limits: Mapping[str, float] = field(default_factory=dict)   # strict modulus bounds
    conditions: tuple = ()         # (description, fn(params, q) -> bool)
    pole_exprs: Optional[Callable] = None   # (params, q) -> {name: value avoiding q^-m}
    # sampling only: skip slowly converging corners and points where the sum
    # side cancels so badly that double precision cannot reach the tolerance
    sample_conditions: tuple = ()
    condition: Optional[Callable] = None    # (params, ctx) -> cancellation factor
    q_range: tuple = (0.1, 0.8)
    description: str = ""

    def check_domain(self, params: Mapping, ctx: QContext, margin: float = DOMAIN_MARGIN):
        """Raise DomainError naming the first violated predicate."""
        for k in self.params:
            lim = self.limits.get(k, 1.0)
            if lim is not None and abs(params[k]) >= lim:
                raise DomainError(f"modulus bound |{k}|<{lim:g} violated (|{k}| = {abs(params[k]):.6g})")
        for desc, fn in self.conditions:
            if not fn(params, ctx.q):
                raise DomainError(f"{desc} violated")
        if self.pole_exprs is not None:
            for name, x in self.pole_exprs(params, ctx.q).items():
                if near_neg_qpower(x, ctx.q, margin):
                    raise DomainError(f"pole avoidance: {name} must stay away from q^-m")
        if self.id in awkernel.PARAM_NAMES:
            names = awkernel.PARAM_NAMES[self.id]
            awkernel.check_domain(self.id, {k: params[k] for k in names}, ctx)


def _quad(f, ctx: QContext):
    res = integrate_even_periodic(f, ctx.quad_tol, ctx.max_nodes)
    return res.value, res.err_estimate


def _integral_lhs(idv):
    def lhs(p, ctx):
        return _quad(lambda th: integrand(idv, th, p, ctx), ctx)
    return lhs


def _closed_rhs(idv):
    return lambda p, ctx: rhs_closed(idv, p, ctx)


def _mods(names, lo, hi):
    return {k: (lo, hi) for k in names}


ENTRIES: dict = {}


def _register(entry: IdentityEntry):
    if entry.id in ENTRIES:
        raise ValueError(f"duplicate registry id {entry.id}")
    ENTRIES[entry.id] = entry


# ---- integrals ---------------------------------------------------------------

_INTEGRALS = [
    ("AW", 1e-9, 50, "four-parameter integral with the full weight"),
    ("AW-sub1", 1e-9, 20, "h(x;p)/h(x;a), first rung of the proof ladder"),
    ("AW-sub2", 1e-9, 20, "h(x;p,-p)/h(x;a)"),
    ("AW-sub3", 1e-9, 20, "h(x;1,p,-p)/h(x;a)"),
    ("AW-1p", 1e-9, 20, "full weight over h(x;a); value independent of a"),
    ("AW-2p", 1e-9, 20, "full weight over h(x;a,b)"),
    ("AW-3p", 1e-9, 20, "full weight over h(x;a,b,c)"),
    ("ISV", 1e-8, 30, "five parameters, 3phi2 at df on the right"),
    ("NR", 1e-8, 10, "extra numerator h(x;mu), 8W7 on the right"),
    ("Prop6", 1e-8, 15, "six denominator parameters, f <-> g symmetric right side"),
]

for _id, _tol, _n, _desc in _INTEGRALS:
    _names = awkernel.PARAM_NAMES[_id]
    _conds = ()
    _poles = None
    if _id == "AW":
        _conds = (("|abcd/q|<1", lambda p, q: abs(p["a"] * p["b"] * p["c"] * p["d"] / q) < 1),)
    if _id == "Prop6":
        _poles = lambda p, q: {"g/f": p["g"] / p["f"], "f/g": p["f"] / p["g"]}  # noqa: E731
    _register(IdentityEntry(
        id=_id, kind="integral", params=_names, lhs=_integral_lhs(_id), rhs=_closed_rhs(_id),
        ranges=_mods(_names, 0.05, 0.6), default_tol=_tol, default_samples=_n,
        conditions=_conds, pole_exprs=_poles, description=_desc))

_LIU_NAMES = awkernel.PARAM_NAMES["Liu"]

_register(IdentityEntry(
    id="Liu", kind="integral", params=_LIU_NAMES, lhs=_integral_lhs("Liu"), rhs=_closed_rhs("Liu"),
    ranges=_mods(_LIU_NAMES, 0.05, 0.4), default_tol=1e-7, default_samples=15,
    limits={"beta": None, "delta": None},
    description="twelve-parameter integral with an embedded 4phi3"))


def _liu_special_rhs(p, ctx):
    a, mu = p["a"], p["mu"]
    abcdf = a * p["b"] * p["c"] * p["d"] * p["f"]
    P = LiuParams(a, p["b"], p["c"], p["d"], p["f"], r=a * mu, s=p["beta"], t=p["delta"],
                  z=mu / abcdf, beta=p["beta"], delta=p["delta"], q=ctx.q)
    # the collapsed inner series is h(x; mu) / (a mu, mu/a; q)_inf by q-Gauss
    return qpoch_inf(a * mu, ctx) * qpoch_inf(mu / a, ctx) * liu_rhs_double_sum(P, ctx)


def _liu_special_lhs(p, ctx):
    sub = {k: p[k] for k in awkernel.PARAM_NAMES["liu-special"]}
    return rhs_closed("liu-special", sub, ctx), None


_register(IdentityEntry(
    id="liu-special", kind="transformation",
    params=("a", "b", "c", "d", "f", "mu", "beta", "delta"),
    lhs=_liu_special_lhs, rhs=_liu_special_rhs,
    ranges={**_mods("abcdf", 0.1, 0.6), "mu": (0.02, 0.3), "beta": (0.05, 0.6), "delta": (0.05, 0.6)},
    limits={"beta": None, "delta": None},
    conditions=(("|mu/a|<1", lambda p, q: abs(p["mu"]) < abs(p["a"])),),
    sample_conditions=(("|mu/a|<0.9", lambda p, q: abs(p["mu"]) < 0.9 * abs(p["a"])),),
    default_tol=1e-8, default_samples=10,
    description="8W7 form vs the twelve-parameter right side at r=a*mu, s=beta, t=delta, z=mu/abcdf"))


def _liu_pair(p, ctx):
    return LiuParams.from_mapping(p, ctx)


_register(IdentityEntry(
    id="liu-rearrange", kind="rearrangement", params=_LIU_NAMES,
    lhs=lambda p, ctx: (liu_rhs_double_sum(_liu_pair(p, ctx), ctx), None),
    rhs=lambda p, ctx: liu_rhs_relation_form(_liu_pair(p, ctx), ctx),
    ranges=_mods(_LIU_NAMES, 0.05, 0.6), limits={"beta": None, "delta": None},
    default_tol=1e-9, default_samples=25,
    description="double n,k-sum vs the rearranged single k-sum of 3phi2"))

# ---- series identities ---------------------------------------------------------

_register(IdentityEntry(
    id="q-gauss", kind="series", params=("a", "b", "c"),
    lhs=lambda p, ctx: (phi([p["a"], p["b"]], [p["c"]], p["c"] / (p["a"] * p["b"]), ctx), None),
    rhs=lambda p, ctx: closed_form_q_gauss(p["a"], p["b"], p["c"], ctx),
    ranges={"a": (0.05, 0.7), "b": (0.05, 0.7), "c": (0.1, 0.7)},
    conditions=(("|c/ab|<0.9", lambda p, q: abs(p["a"] * p["b"]) > 0
                 and abs(p["c"] / (p["a"] * p["b"])) < 0.9),),
    default_tol=1e-11, default_samples=100,
    description="2phi1(a,b;c;q,c/ab) summed in closed form"))

_register(IdentityEntry(
    id="q-binom", kind="series", params=("a", "z"),
    lhs=lambda p, ctx: (phi([p["a"]], [], p["z"], ctx), None),
    rhs=lambda p, ctx: closed_form_q_binomial(p["a"], p["z"], ctx),
    ranges={"a": (0.05, 0.95), "z": (0.05, 0.8)},
    limits={"a": None},
    default_tol=1e-12, default_samples=100,
    description="1phi0(a;-;q,z) = (az;q)_inf/(z;q)_inf"))


def _two_term_lhs(p, ctx):
    a, b, c, q = p["a"], p["b"], p["c"], ctx.q
    return qpoch_ratio([q * a * b / c, q / c], [q * a / c, q * b / c], ctx, ["qa/c", "qb/c"]), None


def _two_term_parts(p, ctx):
    a, b, c, q = p["a"], p["b"], p["c"], ctx.q
    first = phi([a, b], [c], q, ctx)
    ratio = qpoch_ratio([a, b, q / c], [q * a / c, q * b / c, c / q], ctx, ["qa/c", "qb/c", "c/q"])
    return first, ratio * phi([q * a / c, q * b / c], [q * q / c], q, ctx)


def _two_term_rhs(p, ctx):
    return sum(_two_term_parts(p, ctx))


def _cancellation(parts_fn):
    def kappa(p, ctx):
        parts = parts_fn(p, ctx)
        return sum(abs(t) for t in parts) / abs(sum(parts))
    return kappa


_register(IdentityEntry(
    id="two-term", kind="series", params=("a", "b", "c"),
    lhs=_two_term_lhs, rhs=_two_term_rhs,
    ranges={"a": (0.1, 0.7), "b": (0.1, 0.7), "c": (0.2, 0.7)},
    pole_exprs=lambda p, q: {"c": p["c"], "qa/c": q * p["a"] / p["c"], "qb/c": q * p["b"] / p["c"],
                             "c/q": p["c"] / q, "q^2/c": q * q / p["c"]},
    condition=_cancellation(_two_term_parts),
    default_tol=1e-10, default_samples=50,
    description="two 2phi1(...;q,q) summing to a product"))


def _t3_parts(p, ctx):
    a, b, c, d, e, q = p["a"], p["b"], p["c"], p["d"], p["e"], ctx.q
    first = phi([a, b, c], [d, e], q, ctx)
    ratio = qpoch_ratio([a, b, c, q * d / e, q / e], [q * a / e, q * b / e, q * c / e, d, e / q], ctx,
                        ["qa/e", "qb/e", "qc/e", "d", "e/q"])
    return first, ratio * phi([q * a / e, q * b / e, q * c / e], [q * d / e, q * q / e], q, ctx)


def _t3_lhs(p, ctx):
    return sum(_t3_parts(p, ctx)), None


def _t3_rhs(p, ctx):
    a, b, c, d, e, q = p["a"], p["b"], p["c"], p["d"], p["e"], ctx.q
    pre = qpoch_ratio([q * a * b / e, q * a * c / e, d / a, q / e], [q * a / e, q * b / e, q * c / e, d],
                      ctx, ["qa/e", "qb/e", "qc/e", "d"])
    return pre * phi([a, q * a / e, q * a * b * c / (d * e)], [q * a * b / e, q * a * c / e], d / a, ctx)


_register(IdentityEntry(
    id="t-3phi2", kind="transformation", params=("a", "b", "c", "d", "e"),
    lhs=_t3_lhs, rhs=_t3_rhs,
    ranges={"a": (0.3, 0.7), "b": (0.1, 0.7), "c": (0.1, 0.7), "d": (0.05, 0.5), "e": (0.2, 0.7)},
    conditions=(("|d/a|<1", lambda p, q: abs(p["d"]) < abs(p["a"])),),
    pole_exprs=lambda p, q: {
        "qa/e": q * p["a"] / p["e"], "qb/e": q * p["b"] / p["e"], "qc/e": q * p["c"] / p["e"],
        "e/q": p["e"] / q, "qd/e": q * p["d"] / p["e"], "q^2/e": q * q / p["e"],
        "qab/e": q * p["a"] * p["b"] / p["e"], "qac/e": q * p["a"] * p["c"] / p["e"]},
    sample_conditions=(("|d/a|<0.9", lambda p, q: abs(p["d"]) < 0.9 * abs(p["a"])),),
    condition=_cancellation(_t3_parts),
    default_tol=1e-10, default_samples=50,
    description="three-term 3phi2(...;q,q) transformation"))


def _vwp_lhs(p, ctx):
    a, b, c, d, e, q = p["a"], p["b"], p["c"], p["d"], p["e"], ctx.q
    sa = cmath.sqrt(a)
    # (1 - a q^{2n})/(1 - a) = (q sqrt a, -q sqrt a)_n / (sqrt a, -sqrt a)_n; the extra lower 0
    # switches on the (-1)^n q^C(n,2) factor
    spec = PhiSpec((a, q * sa, -q * sa, b, c, d, e),
                   (sa, -sa, q * a / b, q * a / c, q * a / d, q * a / e, 0),
                   q * q * a * a / (b * c * d * e))
    return eval_phi(spec, ctx), None


def _vwp_rhs(p, ctx):
    a, b, c, d, e, q = p["a"], p["b"], p["c"], p["d"], p["e"], ctx.q
    pre = qpoch_ratio([q * a, q * a / (d * e)], [q * a / d, q * a / e], ctx, ["qa/d", "qa/e"])
    return pre * phi([q * a / (b * c), d, e], [q * a / b, q * a / c], q * a / (d * e), ctx)


_register(IdentityEntry(
    id="t-vwp", kind="transformation", params=("a", "b", "c", "d", "e"),
    lhs=_vwp_lhs, rhs=_vwp_rhs,
    ranges={"a": (0.05, 0.6), "b": (0.2, 0.8), "c": (0.2, 0.8), "d": (0.2, 0.8), "e": (0.2, 0.8)},
    conditions=(("|qa/de|<0.9", lambda p, q: abs(q * p["a"] / (p["d"] * p["e"])) < 0.9),),
    pole_exprs=lambda p, q: {f"qa/{k}": q * p["a"] / p[k] for k in "bcde"},
    default_tol=1e-10, default_samples=50,
    description="very-well-poised sum with q^C(n,2) factor as a product times 3phi2"))


def _w8_lhs(p, ctx):
    a, b, c, d, e, f, q = (*(p[k] for k in "abcdef"), ctx.q)
    return eval_w(WSpec(a, (b, c, d, e, f), q * q * a * a / (b * c * d * e * f)), ctx), None


def _w8_rhs(p, ctx):
    a, b, c, d, e, f, q = (*(p[k] for k in "abcdef"), ctx.q)
    lam = q * a * a / (b * c * d)
    pre = qpoch_ratio([q * a, q * a / (e * f), q * lam / e, q * lam / f],
                      [q * a / e, q * a / f, q * lam, q * lam / (e * f)], ctx,
                      ["qa/e", "qa/f", "q*lam", "q*lam/ef"])
    return pre * eval_w(WSpec(lam, (lam * b / a, lam * c / a, lam * d / a, e, f), q * a / (e * f)), ctx)


def _w8_poles(p, q):
    a, b, c, d, e, f = (p[k] for k in "abcdef")
    lam = q * a * a / (b * c * d)
    out = {f"qa/{k}": q * a / p[k] for k in "bcdef"}
    out.update({"q*lam": q * lam, "q*lam/e": q * lam / e, "q*lam/f": q * lam / f,
                "q*lam/ef": q * lam / (e * f)})
    return out


_register(IdentityEntry(
    id="t-8w7", kind="transformation", params=("a", "b", "c", "d", "e", "f"),
    lhs=_w8_lhs, rhs=_w8_rhs,
    ranges={"a": (0.01, 0.2), **_mods("bcdef", 0.3, 0.6)},
    conditions=(("|q^2a^2/bcdef|<0.9",
                 lambda p, q: abs(q * q * p["a"] ** 2 / (p["b"] * p["c"] * p["d"] * p["e"] * p["f"])) < 0.9),
                ("|qa/ef|<0.9", lambda p, q: abs(q * p["a"] / (p["e"] * p["f"])) < 0.9)),
    pole_exprs=_w8_poles,
    default_tol=1e-9, default_samples=25,
    description="8W7 to 8W7 transformation with lam = q a^2/bcd"))

# ---- expansion lemmas --------------------------------------------------------------
# The free expression of each lemma is fixed to the full weight over h(x; c1..cr).

def _free_expr(p: Mapping, ctx: QContext, r: int):
    cs = tuple(p[f"c{j}"] for j in range(1, r + 1))
    return lambda th: aw_weight(th, ctx) / kernel_prod(th, cs, ctx)


def _shifted_sum(base, lam, ratio_fn, ctx):
    """sum_k coef_k * integral of base / h(x; lam q^k), with coef_{k+1}/coef_k = ratio_fn(q^k)."""
    q = ctx.q

    def terms():
        coef = 1.0 + 0j
        qk = 1.0 + 0j
        while True:
            u = lam * qk
            val, _ = _quad(lambda th: base(th) / kernel_h(th, u, ctx), ctx)
            yield coef * val
            coef *= ratio_fn(qk)
            qk *= q

    return sum_series(terms(), ctx, label="lemma k-sum")


def _lemma_a(variant):
    def lhs(p, ctx):
        om = _free_expr(p, ctx, variant)
        return _quad(lambda th: om(th) / kernel_prod(th, (p["lam"], p["eta"]), ctx), ctx)

    def rhs(p, ctx):
        lam, eta, q = p["lam"], p["eta"], ctx.q
        om = _free_expr(p, ctx, variant)

        def half(x, y):
            pre = qpoch_ratio([], [x * y, y / x], ctx, ["lam*eta", "eta/lam"])
            s = _shifted_sum(om, x, lambda qk: q / ((1 - q * qk) * (1 - q * x / y * qk)), ctx)
            return pre * s

        return half(lam, eta) + half(eta, lam)

    return lhs, rhs


def _lemma_b(variant):
    def lhs(p, ctx):
        ps = _free_expr(p, ctx, variant)
        return _quad(lambda th: kernel_h(th, p["lam"], ctx) / kernel_h(th, p["eta"], ctx) * ps(th), ctx)

    def rhs(p, ctx):
        lam, eta, q = p["lam"], p["eta"], ctx.q
        ps = _free_expr(p, ctx, variant)
        pre = qpoch_inf(lam * eta, ctx) * qpoch_inf(lam / eta, ctx)
        s = _shifted_sum(ps, eta, lambda qk: (lam / eta) / ((1 - q * qk) * (1 - lam * eta * qk)), ctx)
        return pre * s

    return lhs, rhs


_LEMMA_PARAMS = {r: ("lam", "eta", *(f"c{j}" for j in range(1, r + 1))) for r in (1, 2, 3)}

for _v in (1, 2, 3):
    _lhs, _rhs = _lemma_a(_v)
    _names = _LEMMA_PARAMS[_v]
    _register(IdentityEntry(
        id=f"lemma-a{_v}", kind="integral", params=_names, lhs=_lhs, rhs=_rhs,
        ranges={**_mods(_names, 0.05, 0.6), "lam": (0.1, 0.6), "eta": (0.1, 0.6)},
        pole_exprs=lambda p, q: {"eta/lam": p["eta"] / p["lam"], "lam/eta": p["lam"] / p["eta"]},
        default_tol=1e-8, default_samples=10,
        description=f"splitting 1/h(x;lam,eta) into shifted single kernels, instantiation {_v}"))
    _lhs, _rhs = _lemma_b(_v)
    _register(IdentityEntry(
        id=f"lemma-b{_v}", kind="integral", params=_names, lhs=_lhs, rhs=_rhs,
        ranges={**_mods(_names, 0.05, 0.6), "lam": (0.05, 0.5), "eta": (0.3, 0.6)},
        conditions=(("|lam/eta|<1", lambda p, q: abs(p["lam"]) < abs(p["eta"])),),
        default_tol=1e-8, default_samples=10,
        description=f"h(x;lam)/h(x;eta) as a sum over shifted kernels, instantiation {_v}"))


def get_entry(idv: str) -> IdentityEntry:
    try:
        return ENTRIES[idv]
    except KeyError:
        raise UnsupportedId(f"unknown identity id {idv!r}; known: {', '.join(ENTRIES)}") from None


def _sample_ok(entry: IdentityEntry, p: Mapping, ctx: QContext) -> bool:
    if not all(fn(p, ctx.q) for _, fn in entry.sample_conditions):
        return False
    if entry.condition is not None:
        try:
            return entry.condition(p, ctx) <= MAX_SAMPLE_CONDITION
        except (QSeriesError, ArithmeticError):
            return False
    return True


def sample_params(entry: IdentityEntry, rng: np.random.Generator, ctx: QContext,
                  phases: bool = True, max_tries: int = 10_000) -> dict:
    """Rejection-sample parameters uniformly in modulus inside the entry's domain."""
    for _ in range(max_tries):
        p = {}
        for k in entry.params:
            lo, hi = entry.ranges[k]
            r = rng.uniform(lo, hi)
            if phases:
                p[k] = complex(r * cmath.exp(1j * rng.uniform(0.0, 2.0 * math.pi)))
            else:
                p[k] = complex(r if rng.random() < 0.5 else -r)
        try:
            entry.check_domain(p, ctx, margin=SAMPLE_MARGIN)
        except DomainError:
            continue
        if _sample_ok(entry, p, ctx):
            return p
    raise DomainError(f"could not sample an admissible point for {entry.id} in {max_tries} tries")
