"""Identity checking: single points, seeded random scans, and the exact oracle.

Reports serialize to JSON with every float written to 17 significant
digits, so a report read back compares equal to the one written.
"""
from __future__ import annotations

import cmath
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Mapping, Optional

import numpy as np

from . import qformal
from .errors import DomainError, InvalidArgument, QSeriesError, UnsupportedId
from .qnum import QContext, as_cx
from .registry import ENTRIES, IdentityEntry, get_entry, sample_params


@dataclass
class IdentityReport:
    id: str
    params: dict
    q: complex
    lhs: Optional[complex]
    rhs: Optional[complex]
    abs_residual: float
    rel_residual: float
    tol: float
    passed: bool
    lhs_err_estimate: Optional[float] = None
    diagnostics: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "id": self.id, "params": dict(self.params), "q": self.q,
            "lhs": self.lhs, "rhs": self.rhs,
            "abs_residual": self.abs_residual, "rel_residual": self.rel_residual,
            "tol": self.tol, "pass": self.passed,
            "lhs_err_estimate": self.lhs_err_estimate, "diagnostics": list(self.diagnostics),
        }

    @classmethod
    def from_dict(cls, d: Mapping) -> "IdentityReport":
        return cls(
            id=d["id"], params={k: _from_json(v) for k, v in d["params"].items()},
            q=_from_json(d["q"]), lhs=_from_json(d["lhs"]), rhs=_from_json(d["rhs"]),
            abs_residual=_float_or_inf(d["abs_residual"]), rel_residual=_float_or_inf(d["rel_residual"]),
            tol=d["tol"], passed=d["pass"], lhs_err_estimate=d["lhs_err_estimate"],
            diagnostics=list(d["diagnostics"]))


@dataclass
class OracleReport:
    id: str
    gparams: dict
    order: int
    match: bool
    first_mismatch: Optional[int]
    lhs_coeffs: list
    rhs_coeffs: list

    def to_dict(self) -> dict:
        return {"id": self.id, "gparams": {k: str(v) for k, v in self.gparams.items()},
                "order": self.order, "match": self.match, "first_mismatch": self.first_mismatch,
                "lhs_coeffs": [str(c) for c in self.lhs_coeffs],
                "rhs_coeffs": [str(c) for c in self.rhs_coeffs]}


# ---- JSON --------------------------------------------------------------------------

def _fmt_float(x: float) -> str:
    if not math.isfinite(x):
        return "null"
    return format(x, ".17g")


def _encode(obj) -> str:
    if obj is None or isinstance(obj, bool):
        return json.dumps(obj)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _fmt_float(float(obj))
    if isinstance(obj, (complex, np.complexfloating)):
        z = complex(obj)
        return '{"re": %s, "im": %s}' % (_fmt_float(z.real), _fmt_float(z.imag))
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, Mapping):
        return "{" + ", ".join(f"{json.dumps(str(k))}: {_encode(v)}" for k, v in obj.items()) + "}"
    if isinstance(obj, (list, tuple)):
        return "[" + ", ".join(_encode(v) for v in obj) + "]"
    if hasattr(obj, "to_dict"):
        return _encode(obj.to_dict())
    raise TypeError(f"cannot encode {type(obj).__name__}")


def to_json(obj) -> str:
    """Serialize reports (or lists of them) with round-trip exact floats."""
    return _encode(obj)


def _from_json(v):
    if isinstance(v, dict) and set(v) == {"re", "im"}:
        re = math.nan if v["re"] is None else v["re"]
        im = math.nan if v["im"] is None else v["im"]
        return complex(re, im)
    return v


def _float_or_inf(v):
    return math.inf if v is None else float(v)


def reports_from_json(text: str) -> list:
    data = json.loads(text)
    if isinstance(data, dict):
        data = [data]
    return [IdentityReport.from_dict(d) for d in data]


# ---- checking ----------------------------------------------------------------------

def _normalize(entry: IdentityEntry, params: Mapping) -> dict:
    unknown = set(params) - set(entry.params)
    if unknown:
        raise InvalidArgument(f"{entry.id} takes parameters {', '.join(entry.params)}; "
                              f"got unknown {', '.join(sorted(unknown))}")
    return {k: complex(as_cx(params.get(k, 0.0), k)) for k in entry.params}


def residuals(lhs: complex, rhs: complex) -> tuple:
    """(abs, rel) residuals, rel scaled by the larger side."""
    ab = abs(lhs - rhs)
    return ab, ab / max(abs(lhs), abs(rhs), 1e-300)


def passes(abs_residual: float, rel_residual: float, rhs: Optional[complex], tol: float) -> bool:
    """Relative test, switching to the absolute one when |rhs| < tol."""
    if rhs is None:
        return False
    return (abs_residual if abs(rhs) < tol else rel_residual) <= tol


def check_identity(idv: str, params: Mapping, ctx: QContext, tol: Optional[float] = None) -> IdentityReport:
    """Evaluate both sides of identity ``idv`` at one point.

    Domain violations raise DomainError. A numerical failure while evaluating
    a side is recorded in the diagnostics, leaves that side None and fails
    the report.
    """
    entry = get_entry(idv)
    p = _normalize(entry, params)
    tol = entry.default_tol if tol is None else float(tol)
    if not tol > 0:
        raise InvalidArgument("tol must be positive")
    entry.check_domain(p, ctx)
    diagnostics = []
    lhs = rhs = err = None
    try:
        lhs, err = entry.lhs(p, ctx)
        lhs = complex(lhs)
    except (QSeriesError, ArithmeticError) as exc:
        diagnostics.append(f"lhs: {type(exc).__name__}: {exc}")
    try:
        rhs = complex(entry.rhs(p, ctx))
    except (QSeriesError, ArithmeticError) as exc:
        diagnostics.append(f"rhs: {type(exc).__name__}: {exc}")
    if lhs is None or rhs is None:
        ab = rel = math.inf
    else:
        ab, rel = residuals(lhs, rhs)
    if err is not None and err > tol * max(1.0, abs(lhs or 0)):
        diagnostics.append(f"note: quadrature error estimate {err:.3g} is above tol")
    passed = passes(ab, rel, rhs, tol)
    return IdentityReport(idv, p, complex(ctx.q), lhs, rhs, ab, rel, tol, passed,
                          None if err is None else float(err), diagnostics)


def sample_point(idv: str, seed: int, index: int, ctx: QContext, complex_q: bool = False,
                 phases: bool = True) -> tuple:
    """Deterministic (q, params) for sample ``index`` of a scan seeded by ``seed``."""
    entry = get_entry(idv)
    rng = np.random.default_rng([seed, index])
    lo, hi = entry.q_range
    qm = rng.uniform(lo, hi)
    q = complex(qm * cmath.exp(1j * rng.uniform(-math.pi, math.pi))) if complex_q else qm
    qctx = ctx.with_q(q)
    return q, sample_params(entry, rng, qctx, phases=phases)


def scan(idv: str, n: Optional[int] = None, seed: int = 0, ctx: Optional[QContext] = None,
         tol: Optional[float] = None, complex_q: bool = False, phases: bool = True,
         workers: int = 1) -> list:
    """Check ``idv`` at n seeded random admissible points.

    Sample i depends only on (seed, i), so results are reproducible bit for
    bit and independent of ``workers``.
    """
    entry = get_entry(idv)
    n = entry.default_samples if n is None else n
    if not isinstance(n, int) or n < 1:
        raise InvalidArgument(f"scan needs n >= 1, got {n!r}")
    base = ctx if ctx is not None else QContext(0.5)

    def one(i):
        q, p = sample_point(idv, seed, i, base, complex_q, phases)
        return check_identity(idv, p, base.with_q(q), tol)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            return list(ex.map(one, range(n)))
    return [one(i) for i in range(n)]


def oracle_check(idv: str, gparams: Mapping, order: int) -> OracleReport:
    """Compare both sides of an integral identity as exact power series in p = q^(1/2)."""
    if idv not in qformal.ORACLE_IDS:
        get_entry(idv)  # unknown id -> UnsupportedId with the registry listing
        raise UnsupportedId(f"{idv} has no exact oracle; supported: {', '.join(qformal.ORACLE_IDS)}")
    gp = {k: v if isinstance(v, qformal.GradedParam) else qformal.parse_gparam(str(v))
          for k, v in gparams.items()}
    lhs = qformal.constant_term_integral(idv, gp, order)
    rhs = qformal.rhs_pseries(idv, gp, order)
    mism = lhs.first_mismatch(rhs, order)
    return OracleReport(idv, gp, order, mism is None, mism,
                        lhs.coefficients(order), rhs.coefficients(order))


def list_ids() -> list:
    return list(ENTRIES)


__all__ = ["IdentityReport", "OracleReport", "check_identity", "scan", "oracle_check", "to_json",
           "reports_from_json", "residuals", "passes", "sample_point", "list_ids", "DomainError"]
