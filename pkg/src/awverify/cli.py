"""Command line front end: ``awverify eval|verify|scan|oracle``.

Exit status: 0 success (or pass), 1 numerical failure (or a failed check),
2 invalid input.
"""
from __future__ import annotations

import argparse
import configparser
import re
import sys
from typing import Optional, Sequence

from . import awkernel, harness, qformal
from .errors import DomainError, InvalidArgument, QSeriesError
from .qhyper import PhiSpec, eval_phi
from .qnum import QContext, as_cx, qpoch_finite, qpoch_inf
from .quadrature import integrate_even_periodic

EXIT_OK, EXIT_FAIL, EXIT_INVALID = 0, 1, 2
CONFIG_KEYS = {"tol_tail": float, "max_terms": int, "max_nodes": int}

_CX = re.compile(r"^[+-]?(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?([+-](\d+\.?\d*|\.\d+)?([eE][+-]?\d+)?[ij])?$"
                 r"|^[+-]?(\d+\.?\d*|\.\d+)?([eE][+-]?\d+)?[ij]$")


def parse_complex(text: str) -> complex:
    """Parse ``re``, ``re+imi`` or ``imi`` (``j`` accepted for ``i``)."""
    s = text.strip().replace(" ", "")
    if not _CX.match(s):
        raise InvalidArgument(f"not a complex literal: {text!r}")
    s = s.replace("i", "j")
    if s.endswith("j") and (len(s) == 1 or s[-2] in "+-"):
        s = s[:-1] + "1j"
    return complex(s)


def parse_list(text: str) -> list:
    return [parse_complex(t) for t in text.split(",") if t.strip()] if text else []


def parse_params(text: Optional[str]) -> dict:
    out = {}
    for item in (text or "").split(","):
        if not item.strip():
            continue
        if "=" not in item:
            raise InvalidArgument(f"expected name=value, got {item!r}")
        k, v = item.split("=", 1)
        out[k.strip()] = parse_complex(v)
    return out


def parse_gparams(text: Optional[str]) -> dict:
    out = {}
    for item in (text or "").split(","):
        if not item.strip():
            continue
        if "=" not in item:
            raise InvalidArgument(f"expected name=r*p^m, got {item!r}")
        k, v = item.split("=", 1)
        out[k.strip()] = qformal.parse_gparam(v.strip())
    return out


def read_config(path: str) -> dict:
    """key = value lines (``#`` comments) overriding tol_tail, max_terms, max_nodes."""
    cp = configparser.ConfigParser()
    try:
        with open(path) as fh:
            cp.read_string("[awverify]\n" + fh.read())
    except (OSError, configparser.Error) as exc:
        raise InvalidArgument(f"cannot read config {path}: {exc}") from None
    out = {}
    for k, v in cp["awverify"].items():
        if k not in CONFIG_KEYS:
            raise InvalidArgument(f"unknown config key {k!r}; allowed: {', '.join(CONFIG_KEYS)}")
        try:
            out[k] = CONFIG_KEYS[k](v)
        except ValueError:
            raise InvalidArgument(f"bad value for {k}: {v!r}") from None
    return out


def make_context(args, q: complex) -> QContext:
    settings = read_config(args.config) if args.config else {}
    for k in CONFIG_KEYS:
        v = getattr(args, k, None)
        if v is not None:
            settings[k] = v
    if getattr(args, "quad_tol", None) is not None:
        settings["quad_tol"] = args.quad_tol
    return QContext(q, **settings)


def _fmt(z) -> str:
    z = complex(z)
    if z.imag == 0:
        return format(z.real, ".17g")
    return f"{z.real:.17g}{z.imag:+.17g}i"


# ---- subcommands ----------------------------------------------------------------

def cmd_pochhammer(args) -> int:
    q = parse_complex(args.q)
    x = parse_complex(args.x)
    if args.n is not None:
        if args.n < 0:
            raise InvalidArgument("--n must be nonnegative")
        print(_fmt(qpoch_finite(x, as_cx(q, "q"), args.n)))
    else:
        print(_fmt(qpoch_inf(x, make_context(args, q))))
    return EXIT_OK


def cmd_phi(args) -> int:
    ctx = make_context(args, parse_complex(args.q))
    spec = PhiSpec(tuple(parse_list(args.upper)), tuple(parse_list(args.lower)),
                   parse_complex(args.z), args.terminating)
    print(_fmt(eval_phi(spec, ctx)))
    return EXIT_OK


def cmd_integral(args) -> int:
    if args.id not in awkernel.IDENTITY_IDS:
        raise InvalidArgument(f"eval integral takes one of {', '.join(awkernel.IDENTITY_IDS)}")
    args.quad_tol = args.tol
    ctx = make_context(args, parse_complex(args.q))
    params = parse_params(args.params)
    awkernel.check_domain(args.id, params, ctx)
    res = integrate_even_periodic(lambda th: awkernel.integrand(args.id, th, params, ctx),
                                  ctx.quad_tol, ctx.max_nodes)
    print(f"value {_fmt(res.value)}")
    print(f"err_estimate {res.err_estimate:.3g}")
    print(f"nodes_used {res.nodes_used}")
    return EXIT_OK


def cmd_verify(args) -> int:
    ctx = make_context(args, parse_complex(args.q))
    rep = harness.check_identity(args.id, parse_params(args.params), ctx, args.tol)
    if args.json:
        print(harness.to_json(rep))
    else:
        print(_summary(rep))
        for d in rep.diagnostics:
            print(f"  {d}")
    return EXIT_OK if rep.passed else EXIT_FAIL


def _summary(rep) -> str:
    tag = "PASS" if rep.passed else "FAIL"
    lhs = "-" if rep.lhs is None else _fmt(rep.lhs)
    rhs = "-" if rep.rhs is None else _fmt(rep.rhs)
    return (f"{tag} {rep.id} q={_fmt(rep.q)} rel={rep.rel_residual:.3e} tol={rep.tol:.0e} "
            f"lhs={lhs} rhs={rhs}")


def cmd_scan(args) -> int:
    ctx = make_context(args, 0.5)
    reports = harness.scan(args.id, args.samples, args.seed, ctx, args.tol,
                           complex_q=args.complex_q, workers=args.workers)
    for rep in reports:
        if not args.quiet:
            print(_summary(rep))
    npass = sum(r.passed for r in reports)
    print(f"{args.id}: {npass}/{len(reports)} passed")
    if args.json:
        with open(args.json, "w") as fh:
            fh.write(harness.to_json(reports) + "\n")
    return EXIT_OK if npass == len(reports) else EXIT_FAIL


def cmd_oracle(args) -> int:
    if args.order < 1:
        raise InvalidArgument("--order must be positive")
    rep = harness.oracle_check(args.id, parse_gparams(args.gparams), args.order)
    if args.json:
        print(harness.to_json(rep))
    elif rep.match:
        print(f"MATCH {rep.id} through p^{rep.order - 1}")
    else:
        print(f"MISMATCH {rep.id} first at p^{rep.first_mismatch}")
    return EXIT_OK if rep.match else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key=value file overriding tol_tail, max_terms, max_nodes")
    common.add_argument("--tol-tail", dest="tol_tail", type=float)
    common.add_argument("--max-terms", dest="max_terms", type=int)
    common.add_argument("--max-nodes", dest="max_nodes", type=int)

    ap = argparse.ArgumentParser(prog="awverify", description="Askey-Wilson integral verification engine")
    sub = ap.add_subparsers(dest="command", required=True)

    ev = sub.add_parser("eval", help="evaluate a single object")
    evs = ev.add_subparsers(dest="what", required=True)
    p = evs.add_parser("pochhammer", parents=[common])
    p.add_argument("--x", required=True)
    p.add_argument("--q", required=True)
    g = p.add_mutually_exclusive_group()
    g.add_argument("--n", type=int)
    g.add_argument("--inf", action="store_true")
    p.set_defaults(func=cmd_pochhammer)

    p = evs.add_parser("phi", parents=[common])
    p.add_argument("--upper", default="")
    p.add_argument("--lower", default="")
    p.add_argument("--q", required=True)
    p.add_argument("--z", required=True)
    p.add_argument("--terminating", type=int)
    p.set_defaults(func=cmd_phi)

    p = evs.add_parser("integral", parents=[common])
    p.add_argument("--id", required=True)
    p.add_argument("--params", default="")
    p.add_argument("--q", required=True)
    p.add_argument("--tol", type=float, default=1e-10)
    p.set_defaults(func=cmd_integral)

    p = sub.add_parser("verify", parents=[common], help="check one identity at one point")
    p.add_argument("--id", required=True)
    p.add_argument("--params", default="")
    p.add_argument("--q", required=True)
    p.add_argument("--tol", type=float)
    p.add_argument("--json", action="store_true", help="print the report as JSON")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("scan", parents=[common], help="check one identity at seeded random points")
    p.add_argument("--id", required=True)
    p.add_argument("--samples", type=int)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tol", type=float)
    p.add_argument("--json", metavar="FILE", help="write the reports to FILE")
    p.add_argument("--complex-q", action="store_true")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--quiet", action="store_true", help="print only the summary line")
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("oracle", help="exact power-series comparison in p = q^(1/2)")
    p.add_argument("--id", required=True)
    p.add_argument("--gparams", default="")
    p.add_argument("--order", type=int, default=40)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_oracle)
    return ap


def main(argv: Optional[Sequence[str]] = None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.func(args)
    except (InvalidArgument, DomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (QSeriesError, ArithmeticError, MemoryError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
