"""Acceptance criteria, one test each.

Every test prints a single ``[PASS]``/``[FAIL]`` line; the same lines are
repeated in the terminal summary (see conftest.py). Run alone with

    pytest tests/test_acceptance.py -v
"""
import math
import time

import numpy as np
import pytest

from awverify.awkernel import integrand
from awverify.harness import scan
from awverify.qformal import GradedParam as G, constant_term_integral, rhs_pseries
from awverify.qnum import QContext
from awverify.quadrature import integrate_even_periodic, trapezoid_even_periodic
from awverify.registry import get_entry

RESULTS = []


def record(number, title, ok, detail):
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {number:>2}: {title} ({detail})"
    RESULTS.append(line)
    print(line)
    assert ok, line


def scan_summary(idv, n, tol, seed=0):
    t0 = time.perf_counter()
    reps = scan(idv, n, seed=seed, tol=tol)
    elapsed = time.perf_counter() - t0
    worst = max(r.rel_residual if abs(r.rhs or 0) >= tol else r.abs_residual for r in reps)
    npass = sum(r.passed for r in reps)
    return reps, npass, worst, elapsed


def test_01_askey_wilson():
    reps, npass, worst, dt = scan_summary("AW", 50, 1e-9)
    qs = [r.q.real for r in reps]
    in_range = all(max(abs(v) for v in r.params.values()) <= 0.6 for r in reps) and 0.1 <= min(qs) <= max(qs) <= 0.8
    record(1, "AW, 50 points at 1e-9 in < 60 s", npass == 50 and in_range and dt < 60,
           f"{npass}/50, worst {worst:.1e}, {dt:.1f} s")


def test_02_proof_ladder():
    counts, worst = [], 0.0
    for idv in ("AW-sub1", "AW-sub2", "AW-sub3", "AW-1p", "AW-2p", "AW-3p"):
        reps, npass, w, _ = scan_summary(idv, 20, 1e-9)
        counts.append(npass)
        worst = max(worst, w)
    ctx = QContext(0.5)
    vals = [integrate_even_periodic(lambda t: integrand("AW-1p", t, {"a": a}, ctx)).value
            for a in np.linspace(-0.6, 0.6, 10)]
    spread = (max(v.real for v in vals) - min(v.real for v in vals)) / abs(vals[0])
    record(2, "AW-sub1..AW-3p, 20 points each at 1e-9; AW-1p spread in a < 1e-9",
           all(c == 20 for c in counts) and spread < 1e-9,
           f"{sum(counts)}/120, worst {worst:.1e}, spread {spread:.1e}")


def test_03_isv():
    _, npass, worst, _ = scan_summary("ISV", 30, 1e-8)
    record(3, "ISV, 30 points at 1e-8", npass == 30, f"{npass}/30, worst {worst:.1e}")


def test_04_liu():
    reps, npass, worst, dt = scan_summary("Liu", 15, 1e-7)
    mods = max(abs(r.params[k]) for r in reps for k in "abcdf")
    record(4, "Liu, 15 points with moduli <= 0.4 at 1e-7 in < 10 min",
           npass == 15 and mods <= 0.4 and dt < 600, f"{npass}/15, worst {worst:.1e}, {dt:.1f} s")


def test_05_liu_rearrange():
    _, npass, worst, _ = scan_summary("liu-rearrange", 25, 1e-9)
    record(5, "liu-rearrange, 25 points at 1e-9", npass == 25, f"{npass}/25, worst {worst:.1e}")


def test_06_nr_and_liu_special():
    _, n1, w1, _ = scan_summary("NR", 10, 1e-8)
    _, n2, w2, _ = scan_summary("liu-special", 10, 1e-8)
    record(6, "NR and liu-special, 10 points each at 1e-8", n1 == 10 and n2 == 10,
           f"NR {n1}/10 worst {w1:.1e}, liu-special {n2}/10 worst {w2:.1e}")


def test_07_proposition():
    reps, npass, worst, _ = scan_summary("Prop6", 15, 1e-8)
    entry = get_entry("Prop6")
    exact = True
    for r in reps:
        swapped = dict(r.params, f=r.params["g"], g=r.params["f"])
        ctx = QContext(r.q)
        exact &= entry.rhs(r.params, ctx) == entry.rhs(swapped, ctx)
    record(7, "Prop6, 15 points at 1e-8; rhs exactly symmetric in f, g", npass == 15 and exact,
           f"{npass}/15, worst {worst:.1e}, symmetric {exact}")


def test_08_series_layer():
    plan = [("q-gauss", 100, 1e-11), ("q-binom", 100, 1e-12), ("two-term", 50, 1e-10),
            ("t-3phi2", 50, 1e-10), ("t-vwp", 50, 1e-10), ("t-8w7", 25, 1e-9)]
    parts, ok = [], True
    for idv, n, tol in plan:
        _, npass, _, _ = scan_summary(idv, n, tol)
        ok &= npass == n
        parts.append(f"{idv} {npass}/{n}")
    record(8, "series layer at the listed counts and tolerances", ok, ", ".join(parts))


def test_09_lemmas():
    parts, ok = [], True
    for r in (1, 2, 3):
        for kind in ("a", "b"):
            idv = f"lemma-{kind}{r}"
            _, npass, _, _ = scan_summary(idv, 10, 1e-8)
            ok &= npass == 10
            parts.append(f"{idv} {npass}/10")
    record(9, "lemma-a and lemma-b, 3 instantiations x 10 points at 1e-8", ok, ", ".join(parts))


def _partitions(n):
    table = [1] + [0] * n
    for part in range(1, n + 1):
        for m in range(part, n + 1):
            table[m] += table[m - part]
    return table


def test_10_exact_oracle():
    t0 = time.perf_counter()
    cases = [("AW", dict(a=G(1, 1), b=G(1, 2), c=G(1, 3), d=G(1, 4))),
             ("AW", dict(a=G(-1, 1), b=G(2, 1), c=G(1, 2), d=G(-3, 3))),
             ("AW-2p", dict(a=G(1, 1), b=G(1, 1))),
             ("AW-sub1", dict(a=G(1, 2))),
             ("ISV", dict(a=G(1, 1), b=G(1, 2), c=G(-1, 1), d=G(1, 3), f=G(2, 2)))]
    matches = sum(constant_term_integral(i, g, 40) == rhs_pseries(i, g, 40) for i, g in cases)
    zero = constant_term_integral("AW", {}, 21).coefficients(21)
    parts = _partitions(10)
    partitions_ok = all(zero[2 * n] == 2 * parts[n] and zero[2 * n + 1] == 0 for n in range(10)) \
        and zero[20] == 2 * parts[10]
    dt = time.perf_counter() - t0
    record(10, "exact oracle through p^40 on 5 tuples; 2 x partitions through q^10; < 2 min",
           matches == len(cases) and partitions_ok and dt < 120,
           f"{matches}/{len(cases)} match, partitions {partitions_ok}, {dt:.1f} s")


def test_11_quadrature_suite():
    exact = all(abs(trapezoid_even_periodic(lambda t, k=k: np.cos(k * t), n)) < 1e-13
                for k in range(1, 11) for n in range(2 * k + 1, 2 * k + 40))
    const = all(trapezoid_even_periodic(lambda t: 0 * t + 1.7, n) == pytest.approx(1.7 * math.pi, abs=1e-14)
                for n in range(1, 70))
    ctx = QContext(0.5)
    rng = np.random.default_rng(11)
    decays = []
    for _ in range(5):
        p = {k: rng.uniform(0, 0.5) * np.exp(2j * np.pi * rng.uniform()) for k in "abcd"}
        f = lambda t, p=p: integrand("AW", t, p, ctx)  # noqa: E731
        ref = trapezoid_even_periodic(f, 512)
        e64, e128 = abs(trapezoid_even_periodic(f, 64) - ref), abs(trapezoid_even_periodic(f, 128) - ref)
        decays.append(e128 <= e64 / 1e3 if e64 >= 1e-12 else e128 < 1e-12)
    record(11, "trig-polynomial exactness and spectral decay", exact and const and all(decays),
           f"cos(k t) exact {exact}, constants exact {const}, decay {sum(decays)}/5")
