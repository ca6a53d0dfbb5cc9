"""Acceptance suite: one test per criterion, each printing a single verdict line.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the verdicts.
"""

from __future__ import annotations

import math
import time

import numpy as np
import pytest

from fiberlab import operators as ops
from fiberlab.bumps import BumpProfile, make_family
from fiberlab.decomp import cone_decompose, cone_reconstruct, cz_verify, fiberwise_cz, telescoping_check
from fiberlab.grid import GridFunction2D, random_field
from fiberlab.lab import (
    ExponentTuple,
    OpSpec,
    SweepConfig,
    counterexample_experiment,
    known_range,
    refinement_study,
    sweep,
)

pytestmark = pytest.mark.acceptance


def verdict(number: int, ok: bool, detail: str) -> None:
    print(f"\nACCEPTANCE {number}: {'PASS' if ok else 'FAIL'} - {detail}")


def rel_err(a: GridFunction2D, b: GridFunction2D) -> float:
    scale = max(float(np.max(np.abs(b.samples))), 1e-300)
    return float(np.max(np.abs(a.samples - b.samples))) / scale


# six profiles sharing the scale window [0, 0] at n = 8 and [0, 1] at n = 16
PROFILES = [BumpProfile(1.0, 2.0), BumpProfile(0.9, 2.1), BumpProfile(1.1, 2.5),
            BumpProfile(0.8, 2.2), BumpProfile(1.2, 2.8), BumpProfile(1.0, 3.0)]


def random_symbol(rng, n):
    return ops.Symbol2D(rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)))


# --------------------------------------------------------------------------
# 1. oracle equivalence


def _oracle_pairs(n, rng):
    fams = [make_family(p, n) for p in PROFILES]
    assert len({f.window for f in fams}) == 1
    m1, m2 = random_symbol(rng, n), random_symbol(rng, n)
    roles = ((ops.FiberRole("Q", 2, 1), ops.FiberRole("P", 1, 0)), (ops.FiberRole("Q", 1, 2), ops.FiberRole("P", 2, 1)))
    return {
        "T1": (lambda F: ops.T1(F[0], F[1], fams[0], fams[1]), ops.t1_symbol(fams[0], fams[1])),
        "T2": (lambda F: ops.T2(F[0], F[1], fams[0], fams[1]), ops.t2_symbol(fams[0], fams[1])),
        "twisted": (lambda F: ops.twisted_paraproduct(F[0], F[1], m1), ops.twisted_symbol(m1)),
        "tensor": (lambda F: ops.tensor_bilinear(F[0], F[1], m1, m2), ops.tensor_symbol(m1, m2)),
        **{
            f"case7_{v}": (lambda F, v=v: ops.case7_operator(F[0], F[1], v, fams[:3]), ops.case7_symbol(v, fams[:3]))
            for v in (1, 2, 3)
        },
        "one_param_generic": (lambda F: ops.one_param_generic(F[0], F[1], roles, fams[:3]), ops.one_param_symbol(roles, fams[:3])),
        "U1": (lambda F: ops.U1(F[0], F[1], F[2], fams), ops.u1_symbol(fams)),
        "U2": (lambda F: ops.U2(F[0], F[1], F[2], fams), ops.u2_symbol(fams)),
    }


def test_1_oracle_equivalence():
    start = time.perf_counter()
    worst = {}
    for n in (8, 16):
        pairs = _oracle_pairs(n, np.random.default_rng(n))
        for seed in range(25):
            F = [random_field(1000 * seed + i, n) for i in range(3)]
            for name, (fast, symbol) in pairs.items():
                if isinstance(symbol, ops.Symbol6D):
                    ref = ops.trilinear_direct(F[0], F[1], F[2], symbol)
                else:
                    ref = ops.bilinear_direct(F[0], F[1], symbol)
                worst[name] = max(worst.get(name, 0.0), rel_err(fast(F), ref))
    elapsed = time.perf_counter() - start
    top = max(worst.values())
    ok = top <= 1e-10 and elapsed <= 300
    verdict(1, ok, f"max relative error {top:.2e} over {len(worst)} operators, 25 seeds, n=8,16 in {elapsed:.1f} s")
    assert top <= 1e-10, worst
    assert elapsed <= 300


# --------------------------------------------------------------------------
# 2. identity suite


def test_2_identities():
    rng = np.random.default_rng(2)
    twist = 0.0
    for n in (8, 16, 64):
        F1, F2 = random_field(1, n), random_field(2, n)
        twist = max(twist, rel_err(ops.twisted_paraproduct(F1, F2, ops.Symbol2D.constant(n)), F1 * F2))
    triple = 0.0
    for n in (8, 16):
        F1, F2, F3 = (random_field(s, n) for s in (3, 4, 5))
        one = ops.Symbol2D.constant(n)
        triple = max(triple, rel_err(ops.tripletwist(F1, F2, F3, one, one, one), F1 * F2 * F3))
    tele = 0.0
    for _ in range(20):
        n = int(rng.choice([32, 64, 128]))
        fam = make_family(BumpProfile(), n)
        k0 = int(rng.integers(fam.k_min, fam.k_max + 1))
        k1 = int(rng.integers(k0, fam.k_max + 1))
        f = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        g = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        r = telescoping_check(f, g, fam, fam, k0, k1)
        tele = max(tele, r / (np.max(np.abs(f)) * np.max(np.abs(g))))
    ok = twist <= 1e-12 and triple <= 1e-10 and tele <= 1e-12
    verdict(2, ok, f"twisted m=1 {twist:.2e}, tripletwist m=1 {triple:.2e}, telescoping {tele:.2e} (20 triples)")
    assert twist <= 1e-12
    assert triple <= 1e-10
    assert tele <= 1e-12


# --------------------------------------------------------------------------
# 3. eigen-action, scalar oracles written from the profiles directly


def _phi(profile, k, x):
    return float(profile.evaluate(2.0**-k * x))


def _psi(profile, k, x):
    return _phi(profile, k, x) - _phi(profile, k - 1, x)


def _lp(kind, profile, k, x):
    return _phi(profile, k, x) if kind == "P" else _psi(profile, k, x)


def _eigen_cases(n, rng):
    P = PROFILES
    K = make_family(P[0], n).scales
    m1, m2, m3 = (random_symbol(rng, n) for _ in range(3))
    fams = [make_family(p, n) for p in P]
    roles = ((ops.FiberRole("Q", 2, 1), ops.FiberRole("P", 1, 0)), (ops.FiberRole("Q", 1, 2), ops.FiberRole("P", 2, 1)))

    def t1(a, b):
        return sum(_psi(P[0], k, a[0]) * _phi(P[1], l, a[1]) * _psi(P[1], l, b[0]) * _phi(P[0], k, b[1])
                   for k in K for l in K if k <= l)

    def t2(a, b):
        return sum(_phi(P[0], k, a[0]) * _phi(P[1], l, a[1]) * _psi(P[1], l, b[0]) * _psi(P[0], k, b[1])
                   for k in K for l in K if k <= l)

    def one_param(slots):
        def value(a, b):
            total = 0.0
            for k in K:
                term = 1.0
                for slot, x in zip(slots, (a, b)):
                    for kind, axis, fi in slot:
                        term *= _lp(kind, P[fi], k, x[axis - 1])
                total += term
            return total
        return value

    case7 = {
        1: ([("Q", 1, 2), ("P", 2, 0)], [("P", 1, 1)]),
        2: ([("P", 1, 0), ("P", 2, 1)], [("Q", 1, 2)]),
        3: ([("P", 1, 0), ("Q", 2, 2)], [("P", 1, 1)]),
    }

    def u1(a, b, c):
        return sum(_psi(P[0], k, a[0]) * _phi(P[3], m, a[1]) * _psi(P[1], l, b[0]) * _phi(P[4], k, b[1])
                   * _psi(P[2], m, c[0]) * _phi(P[5], l, c[1]) for k in K for l in K for m in K)

    def u2(a, b, c):
        return sum(_phi(P[4], k, a[0]) * _phi(P[3], m, a[1]) * _psi(P[1], l, b[0]) * _psi(P[0], k, b[1])
                   * _psi(P[2], m, c[0]) * _phi(P[5], l, c[1]) for k in K for l in K for m in K)

    riesz4 = ops.Symbol4D(n, lambda a1, a2, b1, b2: ops.riesz_symbol(a1, b2) * ops.riesz_symbol(a2, b1))
    cases = {
        "bilinear_direct": (lambda F: ops.bilinear_direct(F[0], F[1], riesz4),
                            lambda a, b: ops.riesz_symbol(a[0], b[1]) * ops.riesz_symbol(a[1], b[0]), 2),
        "twisted": (lambda F: ops.twisted_paraproduct(F[0], F[1], m1), lambda a, b: m1.at(a[0], b[1]), 2),
        "tensor": (lambda F: ops.tensor_bilinear(F[0], F[1], m1, m2), lambda a, b: m1.at(a[0], b[1]) * m2.at(a[1], b[0]), 2),
        "T1": (lambda F: ops.T1(F[0], F[1], fams[0], fams[1]), t1, 2),
        "T2": (lambda F: ops.T2(F[0], F[1], fams[0], fams[1]), t2, 2),
        "one_param_generic": (lambda F: ops.one_param_generic(F[0], F[1], roles, fams[:3]),
                              one_param(([("Q", 2, 1), ("P", 1, 0)], [("Q", 1, 2), ("P", 2, 1)])), 2),
        "U1": (lambda F: ops.U1(F[0], F[1], F[2], fams), u1, 3),
        "U2": (lambda F: ops.U2(F[0], F[1], F[2], fams), u2, 3),
        "tripletwist": (lambda F: ops.tripletwist(F[0], F[1], F[2], m1, m2, m3),
                        lambda a, b, c: m1.at(a[0], b[1]) * m2.at(b[0], c[1]) * m3.at(c[0], a[1]), 3),
    }
    for v, slots in case7.items():
        cases[f"case7_{v}"] = (lambda F, v=v: ops.case7_operator(F[0], F[1], v, fams[:3]), one_param(slots), 2)
    return cases


def test_3_eigen_action():
    worst = {}
    for n in (8, 16):
        rng = np.random.default_rng(30 + n)
        for name, (op, scalar, arity) in _eigen_cases(n, rng).items():
            if name == "tripletwist" and n > 8:
                continue
            for _ in range(50 if n == 16 or name == "tripletwist" else 10):
                freqs = [tuple(int(v) for v in rng.integers(-n // 2, n // 2, 2)) for _ in range(arity)]
                amps = rng.standard_normal(arity) + 1j * rng.standard_normal(arity)
                F = [GridFunction2D.exponential(n, *f, amplitude=c) for f, c in zip(freqs, amps)]
                total = tuple(sum(f[i] for f in freqs) for i in (0, 1))
                expected = GridFunction2D.exponential(n, *total, amplitude=complex(scalar(*freqs)) * np.prod(amps))
                err = float(np.max(np.abs(op(F).samples - expected.samples)))
                worst[name] = max(worst.get(name, 0.0), err)
    top = max(worst.values())
    verdict(3, top <= 1e-11, f"max eigen-action error {top:.2e} across {len(worst)} operators")
    assert top <= 1e-11, worst


# --------------------------------------------------------------------------
# 4. fiber-wise Calderon-Zygmund decomposition


def test_4_cz_suite():
    rng = np.random.default_rng(4)
    failures, atoms, worst_good = [], 0, 0.0
    for trial in range(100):
        n = int(rng.choice([16, 32, 64]))
        F = random_field(trial, n, decay=float(rng.uniform(0.0, 1.5)), real=bool(trial % 2))
        p2 = float(rng.uniform(1.1, 4.0))
        p3p = float(rng.uniform(0.5, 1.0))
        if p3p <= 0.5:
            p3p = 1.0
        # threshold t = level^(p3'/p2) between the largest fiber L^p2 norm and max|F|
        fiber = np.mean(np.abs(F.samples) ** p2, axis=0) ** (1.0 / p2)
        lo, hi = float(fiber.max()), float(np.abs(F.samples).max())
        t = math.exp(rng.uniform(math.log(lo), math.log(hi)))
        level = t ** (p2 / p3p)
        dec = fiberwise_cz(F, level, p2, p3p)
        rep = cz_verify(dec, F)
        atoms += sum(len(f.atoms) for f in dec.fibers)
        worst_good = max(worst_good, rep.constants["good_linf"] / 2 ** (1 / p2))
        if not rep.passed:
            failures.append((trial, rep.diagnostics[:3]))
    ok = not failures
    verdict(4, ok, f"{100 - len(failures)}/100 trials pass all checks, {atoms} atoms, "
                   f"max good-part sup / (2^(1/p2) t) = {worst_good:.4f}")
    assert ok, failures


# --------------------------------------------------------------------------
# 5. cone decomposition


def test_5_cone_decomposition():
    n = 256
    m = ops.Symbol2D.from_function(ops.riesz_symbol, n)
    results = {}
    for M in (8, 16):
        dec = cone_decompose(m, modes=M)
        _, rep = cone_reconstruct(dec, n)
        results[M] = (rep.max_residual, min(dec.decay.exponents))
    ok = results[8][0] <= 1e-3 and results[16][0] <= 1e-5 and min(r[1] for r in results.values()) >= 2.0
    verdict(5, ok, f"residual M=8 {results[8][0]:.2e}, M=16 {results[16][0]:.2e}; "
                   f"decay exponents {results[8][1]:.2f} (M=8), {results[16][1]:.2f} (M=16)")
    assert results[8][0] <= 1e-3
    assert results[16][0] <= 1e-5
    assert results[8][1] >= 2.0 and results[16][1] >= 2.0


# --------------------------------------------------------------------------
# 6. counterexample reduction


def test_6_counterexample():
    rep = counterexample_experiment()
    d = rep.discrepancies
    flat = counterexample_experiment({"mtilde": "one"})
    spread = max(abs(v - flat.limit) for v in flat.values)
    ok = rep.monotone and d[-1] <= 0.1 * d[0] and spread <= 1e-8
    verdict(6, ok, f"discrepancies {', '.join(f'{v:.2e}' for v in d)} at lambda {rep.lambdas}, "
                   f"rate {rep.rate:.2f}; m~=1 spread {spread:.1e}")
    assert rep.lambdas == [4.0, 16.0, 64.0]
    assert all(b < a for a, b in zip(d, d[1:]))
    assert d[-1] <= 0.1 * d[0]
    assert spread <= 1e-8


# --------------------------------------------------------------------------
# 7. exponent ranges


# (case, p1, p2, expected) three probes per row; inputs may be inf where the row allows it
RANGE_PROBES = [
    *[(c, *p, v) for c in ("1", "5", "8") for p, v in (((math.inf, 3.0), "inside"), ((0.5, 4.0), "outside"), ((1.0, 3.0), "boundary"))],
    *[(c, *p, v) for c in ("2", "4", "7") for p, v in (((3.0, 3.0), "inside"), ((0.9, 4.0), "outside"), ((math.inf, 3.0), "boundary"))],
    ("3", 3.0, 3.0, "inside"), ("3", 6.0, 6.0, "outside"), ("3", 4.0, 4.0, "boundary"),
    ("6", 3.0, 3.0, "inside"), ("6", 1.5, 1.5, "outside"), ("6", 4.0, 4.0, "boundary"),
]

TRIPLE_PROBES = [
    ((3.5, 3.5, 3.5), "inside"),
    ((3.2, 3.6, 3.9), "inside"),
    ((8.0, 8.0, 8.0), "outside"),
    ((3.0, 3.0, 8.0), "outside"),  # both sums with 1/p3 fall below 1/2
    ((3.0, 8.0, 3.0), "outside"),
    ((8.0, 3.0, 3.0), "outside"),
    ((1.5, 3.0, 3.0), "outside"),  # p4 < 2
    ((4.0, 4.0, 4.0), "boundary"),  # pairwise sums equal 1/2
    ((3.0, 3.0, 3.0), "boundary"),  # p4 = inf
]


def test_7_range_table():
    wrong = []
    for case, p1, p2, want in RANGE_PROBES:
        got = known_range(int(case), ExponentTuple.of(p1, p2))
        if got != want:
            wrong.append((case, p1, p2, want, got))
    for p, want in TRIPLE_PROBES:
        got = known_range("tripletwist", ExponentTuple(p))
        if got != want:
            wrong.append(("tripletwist", p, want, got))
    total = len(RANGE_PROBES) + len(TRIPLE_PROBES)
    verdict(7, not wrong, f"{total - len(wrong)}/{total} probes classified as stated (8 rows x 3 + 9 tripletwist)")
    assert not wrong


# --------------------------------------------------------------------------
# 8. refinement stability


def test_8_refinement():
    start = time.perf_counter()
    e = ExponentTuple.of(4.0, 4.0)
    growth = {}
    for name in ("T1", "twisted"):
        rep = refinement_study(OpSpec(name), e, [32, 256], range(50), threads=4)
        growth[name] = rep.total_growth
    elapsed = time.perf_counter() - start
    ok = max(growth.values()) <= 2.0 and elapsed <= 600
    verdict(8, ok, f"max-ratio growth n=32 -> 256: T1 {growth['T1']:.4f}, twisted {growth['twisted']:.4f} in {elapsed:.0f} s")
    assert max(growth.values()) <= 2.0
    assert elapsed <= 600


# --------------------------------------------------------------------------
# 9. determinism


def test_9_determinism():
    cfg = SweepConfig(
        operators=["T1", "twisted", "tensor", "case7_2", "U1", "case5"],
        exponents=[ExponentTuple.of(4, 4), ExponentTuple.of(3, 6), ExponentTuple.of(3.5, 3.5, 3.5)],
        n_values=[16, 32],
        seeds=list(range(6)),
        decays=[0.0, 1.0],
    )
    _, one = sweep(cfg, threads=1)
    _, four = sweep(cfg, threads=4)
    rows = one.count("\n") - 1
    ok = one == four and rows > 0
    verdict(9, ok, f"{rows} rows bit-identical across 1 and 4 threads")
    assert rows > 0
    assert one == four
