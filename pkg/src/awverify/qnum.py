"""Complex q-shifted factorials.

All functions accept Python scalars or numpy arrays for the ``x`` argument;
arrays are handled elementwise and the truncation length is chosen from the
largest modulus, so an array result is never less accurate than the scalar
one for any of its entries.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, InvalidArgument, NoConvergence, PoleError

INF = math.inf


@dataclass(frozen=True)
class QContext:
    """Base ``q`` plus the numerical limits every evaluator shares.

    ``p`` is the principal square root of ``q`` and is derived, never passed.
    """

    q: complex
    tol_tail: float = 1e-16
    max_terms: int = 4000
    quad_tol: float = 1e-13
    max_nodes: int = 1 << 15
    p: complex = field(init=False)

    def __post_init__(self):
        q = complex(self.q)
        if not cmath.isfinite(q):
            raise InvalidArgument(f"non-finite q: {self.q!r}")
        if abs(q) >= 1:
            raise DomainError(f"|q| < 1 required, got |q| = {abs(q):.17g}")
        if not 0 < self.tol_tail <= 1e-10:
            raise InvalidArgument("tol_tail must lie in (0, 1e-10]")
        if self.max_terms < 64:
            raise InvalidArgument("max_terms must be at least 64")
        if not self.quad_tol > 0:
            raise InvalidArgument("quad_tol must be positive")
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "p", cmath.sqrt(q))

    def with_q(self, q) -> QContext:
        return QContext(q, self.tol_tail, self.max_terms, self.quad_tol, self.max_nodes)

    def replace(self, **changes) -> QContext:
        kw = dict(q=self.q, tol_tail=self.tol_tail, max_terms=self.max_terms,
                  quad_tol=self.quad_tol, max_nodes=self.max_nodes)
        kw.update(changes)
        return QContext(**kw)


def as_cx(x, name="x"):
    """Coerce to complex (scalar) or a complex ndarray; reject NaN/Inf."""
    if isinstance(x, np.ndarray):
        arr = x.astype(complex, copy=False)
        if not np.all(np.isfinite(arr)):
            raise InvalidArgument(f"non-finite entry in {name}")
        return arr
    try:
        v = complex(x)
    except (TypeError, ValueError) as exc:
        raise InvalidArgument(f"{name} is not a number: {x!r}") from exc
    if not cmath.isfinite(v):
        raise InvalidArgument(f"non-finite {name}: {x!r}")
    return v


def _powers(q: complex, n: int) -> np.ndarray:
    out = np.empty(n, dtype=complex)
    if n:
        out[0] = 1.0
        out[1:] = q
        np.cumprod(out, out=out)
    return out


def _product(x, qk: np.ndarray):
    if isinstance(x, np.ndarray):
        if qk.size == 0:
            return np.ones_like(x)
        return np.prod(1.0 - np.multiply.outer(x, qk), axis=-1)
    r = 1.0 + 0j
    for t in qk:
        r *= 1.0 - x * t
    return complex(r)


def qpoch_finite(x, q, n: int):
    """(x;q)_n = prod_{k<n} (1 - x q^k); the empty product for n = 0."""
    x = as_cx(x)
    q = as_cx(q, "q")
    if isinstance(n, bool) or not isinstance(n, (int, np.integer)) or n < 0:
        raise InvalidArgument(f"n must be a nonnegative integer, got {n!r}")
    if abs(q) >= 1:
        raise DomainError(f"|q| < 1 required, got |q| = {abs(q):.17g}")
    return _product(x, _powers(q, int(n)))


def truncation_index(xmod: float, ctx: QContext) -> int:
    """First K with |x| |q|^K / (1 - |q|) < tol_tail / 2.

    Past K the remaining factors multiply to within tol_tail of 1.
    """
    aq = abs(ctx.q)
    if xmod == 0.0:
        return 0
    if aq == 0.0:
        return 1
    target = 0.5 * ctx.tol_tail * (1.0 - aq) / xmod
    if target >= 1.0:
        return 0
    k = max(0, math.ceil(math.log(target) / math.log(aq)))
    # guard the log estimate against rounding at the boundary
    while k > 0 and xmod * aq ** (k - 1) / (1.0 - aq) < 0.5 * ctx.tol_tail:
        k -= 1
    while xmod * aq**k / (1.0 - aq) >= 0.5 * ctx.tol_tail:
        k += 1
    return k


def qpoch_inf(x, ctx: QContext):
    """(x;q)_inf truncated with a relative tail bound of ctx.tol_tail."""
    x = as_cx(x)
    if isinstance(x, np.ndarray):
        xmod = float(np.max(np.abs(x))) if x.size else 0.0
    else:
        xmod = abs(x)
    K = truncation_index(xmod, ctx)
    if K > ctx.max_terms:
        raise NoConvergence(
            f"(x;q)_inf needs {K} factors for |x|={xmod:.3g}, |q|={abs(ctx.q):.3g}; "
            f"max_terms={ctx.max_terms}")
    return _product(x, _powers(ctx.q, K))


def check_pole(x, ctx: QContext, name="x", n=None, eps=1e-13):
    """Raise PoleError if (x;q)_n (n=None: infinite) has a numerically zero factor."""
    if isinstance(x, np.ndarray):
        for v in x.ravel():
            check_pole(v, ctx, name, n, eps)
        return
    x = complex(x)
    if n is None:
        n = truncation_index(abs(x), ctx)
    qk = 1.0 + 0j
    for k in range(n):
        if abs(1.0 - x * qk) < eps:
            raise PoleError(f"({name};q) vanishes: factor 1 - {name}*q^{k} = 0")
        qk *= ctx.q


def qpoch_ratio(num, den, ctx: QContext, den_names=None):
    """prod (num;q)_inf / prod (den;q)_inf, naming any vanishing denominator."""
    out = qpoch_multi(num, ctx)
    for i, x in enumerate(den):
        name = den_names[i] if den_names else f"den[{i}]"
        check_pole(x, ctx, name)
        out = out / qpoch_inf(x, ctx)
    return out


def qpoch_multi(xs, ctx: QContext, n=INF):
    """(x_1,...,x_r;q)_n, with n = math.inf for the infinite product."""
    out = 1.0 + 0j
    for x in xs:
        if n == INF:
            out = out * qpoch_inf(x, ctx)
        else:
            out = out * qpoch_finite(x, ctx.q, n)
    return out
