"""Basic hypergeometric series and the classical summations built on them.

Series parameters may be numpy arrays; everything broadcasts, so a single
call evaluates the series at many points (the integrand builders use this
to evaluate an embedded series at every quadrature node at once).
"""
from __future__ import annotations

import cmath
from collections import deque
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np

from .errors import DivergenceError, DomainError, InvalidArgument, NoConvergence, PoleError
from .qnum import QContext, as_cx, check_pole, qpoch_inf, qpoch_ratio

POLE_EPS = 1e-13


def _scalar(v):
    if isinstance(v, np.ndarray) and v.ndim > 0:
        return v
    return complex(v)


def _absmax(v) -> float:
    return float(np.max(np.abs(v)))


def sum_series(terms: Iterable, ctx: QContext, label: str = "series"):
    """Sum a convergent series term by term with a geometric tail bound.

    Once three consecutive term ratios have modulus below some rho < 1, the
    remainder is bounded by |t| rho / (1 - rho); summation stops when that
    bound drops below ``ctx.tol_tail`` times the partial sum (elementwise
    for array terms). A generator that stops early means the series is
    finite and the partial sum is exact.
    """
    total = 0
    prev_mod = None
    ratios: deque = deque(maxlen=3)
    for k, t in enumerate(terms):
        if k >= ctx.max_terms:
            raise NoConvergence(f"{label}: no convergence within {ctx.max_terms} terms",
                                value=_scalar(total))
        total = total + t
        mod = np.abs(t)
        if prev_mod is not None:
            with np.errstate(divide="ignore", invalid="ignore"):
                r = np.where(mod == 0, 0.0, mod / prev_mod)
            ratios.append(r)
            if len(ratios) == 3:
                rho = np.maximum(np.maximum(ratios[0], ratios[1]), ratios[2])
                if np.all(rho < 1):
                    tail = mod * rho / (1 - rho)
                    if np.all(tail <= ctx.tol_tail * np.abs(total)):
                        return _scalar(total)
        prev_mod = mod
    return _scalar(total)


@dataclass(frozen=True, eq=False)
class PhiSpec:
    """_r phi_s(upper; lower; q, z), optionally marked terminating at n."""

    upper: tuple
    lower: tuple
    z: object
    terminating_at: Optional[int] = None

    def __post_init__(self):
        object.__setattr__(self, "upper", tuple(as_cx(a, "upper") for a in self.upper))
        object.__setattr__(self, "lower", tuple(as_cx(b, "lower") for b in self.lower))
        object.__setattr__(self, "z", as_cx(self.z, "z"))
        n = self.terminating_at
        if n is not None and (not isinstance(n, (int, np.integer)) or n < 0):
            raise InvalidArgument(f"terminating_at must be a nonnegative integer, got {n!r}")


@dataclass(frozen=True, eq=False)
class WSpec:
    """Very-well-poised _{r+1}W_r(a1; extras; q, z)."""

    a1: object
    extras: tuple
    z: object

    def __post_init__(self):
        object.__setattr__(self, "a1", as_cx(self.a1, "a1"))
        object.__setattr__(self, "extras", tuple(as_cx(e, "extras") for e in self.extras))
        object.__setattr__(self, "z", as_cx(self.z, "z"))


def _phi_terms(spec: PhiSpec, ctx: QContext, nterms: Optional[int]):
    q = ctx.q
    power = 1 + len(spec.lower) - len(spec.upper)
    shape = np.broadcast(*spec.upper, *spec.lower, spec.z).shape
    t = np.ones(shape, dtype=complex) if shape else 1.0 + 0j
    qk = 1.0 + 0j
    k = 0
    while nterms is None or k < nterms:
        yield t
        if nterms is not None and k + 1 >= nterms:
            return
        num = 1.0
        for a in spec.upper:
            num = num * (1.0 - a * qk)
        den = 1.0 - qk * q
        for j, b in enumerate(spec.lower):
            f = 1.0 - b * qk
            if np.any(np.abs(f) < POLE_EPS):
                raise PoleError(f"lower parameter b{j + 1} = q^-{k}: (b;q)_{k + 1} vanishes")
            den = den * f
        step = num / den * spec.z
        if power:
            step = step * (-qk) ** power
        t = t * step
        if not np.any(t):
            return
        qk *= q
        k += 1


def eval_phi(spec: PhiSpec, ctx: QContext, nterms: Optional[int] = None):
    """Evaluate the basic hypergeometric series described by ``spec``.

    With ``nterms`` the first ``nterms`` terms are summed blindly; a
    terminating spec sums exactly ``terminating_at + 1`` terms through the
    same code path.
    """
    r, s = len(spec.upper), len(spec.lower)
    if nterms is not None:
        return _scalar(_sum_fixed(_phi_terms(spec, ctx, nterms)))
    n = spec.terminating_at
    if n is not None:
        qn = ctx.q ** n
        if not any(not isinstance(a, np.ndarray) and abs(a * qn - 1.0) <= 1e-10 for a in spec.upper):
            raise InvalidArgument(f"terminating_at={n} but no upper parameter equals q^-{n}")
        return eval_phi(spec, ctx, nterms=n + 1)
    zmax = _absmax(spec.z)
    if zmax != 0.0:
        if r > s + 1:
            raise DivergenceError(f"non-terminating _{r}phi_{s} with z != 0 diverges")
        if r == s + 1 and zmax >= 1.0:
            raise DivergenceError(f"_{r}phi_{s} needs |z| < 1, got |z| = {zmax:.17g}")
    return sum_series(_phi_terms(spec, ctx, None), ctx, label=f"_{r}phi_{s}")


def _sum_fixed(terms):
    total = 0
    for t in terms:
        total = total + t
    return total


def phi(upper: Sequence, lower: Sequence, z, ctx: QContext, terminating_at=None):
    return eval_phi(PhiSpec(tuple(upper), tuple(lower), z, terminating_at), ctx)


def expand_w(spec: WSpec, ctx: QContext, branch: int = 1) -> PhiSpec:
    """Rewrite a very-well-poised spec as the underlying PhiSpec.

    ``branch=-1`` picks the other square root of a1; the pair +-sqrt(a1)
    makes the series independent of that choice.
    """
    if any(np.any(e == 0) for e in spec.extras):
        raise InvalidArgument("very-well-poised extras must be nonzero (q*a1/e appears as a lower parameter)")
    sa = np.sqrt(spec.a1) if isinstance(spec.a1, np.ndarray) else cmath.sqrt(spec.a1)
    sa = branch * sa
    q = ctx.q
    upper = (spec.a1, q * sa, -q * sa, *spec.extras)
    lower = (sa, -sa, *(q * spec.a1 / e for e in spec.extras))
    return PhiSpec(upper, lower, spec.z)


def eval_w(spec: WSpec, ctx: QContext):
    return eval_phi(expand_w(spec, ctx), ctx)


def closed_form_q_gauss(a, b, c, ctx: QContext):
    """(c/a, c/b; q)_inf / (c, c/ab; q)_inf, the sum of 2phi1(a, b; c; q, c/ab)."""
    a, b, c = as_cx(a, "a"), as_cx(b, "b"), as_cx(c, "c")
    if a == 0 or b == 0:
        raise InvalidArgument("q-Gauss closed form needs a, b != 0")
    z = c / (a * b)
    check_pole(c, ctx, "c")
    check_pole(z, ctx, "c/ab")
    if abs(z) >= 1:
        raise DomainError(f"q-Gauss needs |c/ab| < 1, got {abs(z):.17g}")
    return qpoch_ratio([c / a, c / b], [c, z], ctx, ["c", "c/ab"])


def closed_form_q_binomial(a, z, ctx: QContext):
    """(az; q)_inf / (z; q)_inf, the sum of 1phi0(a; -; q, z)."""
    a, z = as_cx(a, "a"), as_cx(z, "z")
    if abs(z) >= 1:
        raise DivergenceError(f"q-binomial series needs |z| < 1, got {abs(z):.17g}")
    return qpoch_inf(a * z, ctx) / qpoch_inf(z, ctx)
