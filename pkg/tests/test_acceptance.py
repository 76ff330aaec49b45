"""Acceptance criteria, one test each, printing a single PASS/FAIL line.

Run directly with ``python3 tests/test_acceptance.py`` or through pytest;
the lines are repeated in the terminal summary when output is captured.
"""

import sys
import time

import numpy as np
import pytest

from gramcert._rng import keyed_rng
from gramcert.blockmat import BlockMatrix
from gramcert.douglas import range_inclusion_check, solution_set_sample, solve
from gramcert.errors import SingularPivot
from gramcert.gramfactor import gram_factor
from gramcert.positivity import (
    Verdict,
    cross_entry_check,
    min_eig_oracle,
    positivity_verdict,
    rank_one_coefficients,
    schur_chain,
    witness_form,
)
from gramcert.schwarz import (
    PowerPair,
    SchwarzProblem,
    continuity_probe,
    optimize_s,
    sampled_constant,
    schwarz_constant_exact,
)
from gramcert.spectral import CoercivityInstance, gap_certificate
from gramcert.testkit import InstanceSpec, generate, positivity_corpus

TIME_LIMIT = 60.0
ALPHAS = (0.0, 0.25, 0.5, 0.75, 1.0)
S_GRID = (-0.5, 0.0, 0.25, 0.5, 0.75, 1.0, 1.5)
PM1 = np.array([[1, 1, -1], [1, 1, 1], [-1, 1, 1]], dtype=complex)

_CORPUS = None
RESULTS = []


def corpus():
    global _CORPUS
    if _CORPUS is None:
        _CORPUS = [generate(s)[0] for s in positivity_corpus(1000, seed=0)]
    return _CORPUS


def report(name, failures, elapsed, detail=""):
    ok = not failures and elapsed < TIME_LIMIT
    line = f"{'PASS' if ok else 'FAIL'} {name} ({elapsed:.1f}s){': ' + detail if detail else ''}"
    if failures:
        line += f" [{len(failures)} failure(s), first: {failures[0]}]"
    RESULTS.append(line)
    print(line)
    assert not failures, failures[:5]
    assert elapsed < TIME_LIMIT


def test_c1_example41():
    t0 = time.perf_counter()
    fails = []
    T, _ = generate(InstanceSpec(0, "rank-one-coupled", 3, (2, 2, 2), params={"preset": "example41"}))
    c = rank_one_coefficients(T)
    closed = {(0, 1): (0.25 + 0.09) * (0.16 + 0.04) / 1.0,
              (0, 2): (0.36 + 0.01) * (0.09 + 0.25) / 2.0,
              (1, 2): (0.04 + 0.49) * (0.01 + 0.36) / 2.0}
    quoted = {(0, 1): 0.068, (0, 2): 0.0629, (1, 2): 0.09805}
    for k in closed:
        if abs(c[k] - closed[k]) > 1e-12 or abs(c[k] - quoted[k]) > 1e-12 or not c[k] < 1:
            fails.append(f"c{k} = {c[k]!r}")
    cert = positivity_verdict(T)
    if cert.verdict is not Verdict.POSITIVE:
        fails.append(f"verdict {cert.verdict}")
    F = gram_factor(T, delta=1e-8)
    res = np.linalg.norm(T.entries - F.X @ F.X.conj().T, 2)
    if res > 1e-8:
        fails.append(f"factor residual {res:.3e}")
    report("Worked three-block example", fails, time.perf_counter() - t0,
           f"c = {c[(0, 1)]:.5g}, {c[(0, 2)]:.5g}, {c[(1, 2)]:.5g}; {cert.method}; residual {res:.1e}")


def test_c2_mixed_schwarz():
    t0 = time.perf_counter()
    fails = []
    worst_exact = worst_excess = worst_spread = 0.0
    for idx in range(200):
        rng = keyed_rng(2024, "acceptance-schwarz", idx)
        m, n = (int(v) for v in rng.integers(1, 9, size=2))
        r = int(rng.integers(1, min(m, n) + 1))
        T = (rng.standard_normal((m, r)) + 1j * rng.standard_normal((m, r))) @ \
            (rng.standard_normal((r, n)) + 1j * rng.standard_normal((r, n)))
        sigma1 = np.linalg.svd(T, compute_uv=False)[0]
        for alpha in ALPHAS:
            prob = SchwarzProblem(T, alpha)
            exact = schwarz_constant_exact(prob)
            target = sigma1 ** (1 - alpha)
            err = abs(exact.constant - target)
            worst_exact = max(worst_exact, err)
            if err > 1e-10 * max(1.0, target):
                fails.append(f"exact idx={idx} alpha={alpha}: {err:.2e}")
            sam = sampled_constant(prob, PowerPair(0.5), 10000, seed=idx, probes=False)
            excess = sam.constant - exact.constant
            worst_excess = max(worst_excess, excess)
            if excess > 1e-8:
                fails.append(f"sampled idx={idx} alpha={alpha}: +{excess:.2e}")
            opt = optimize_s(prob, S_GRID, samples=40, seed=idx)
            worst_spread = max(worst_spread, opt.spread)
            if opt.spread > 1e-8:
                fails.append(f"spread idx={idx} alpha={alpha}: {opt.spread:.2e}")
    report("Mixed-Schwarz identity", fails, time.perf_counter() - t0,
           f"max |C - sigma1^(1-a)| {worst_exact:.1e}, max sampled excess {worst_excess:.1e}, "
           f"max spread {worst_spread:.1e}")


def test_c3_positivity_soundness():
    t0 = time.perf_counter()
    fails = []
    counts = {v: 0 for v in Verdict}
    worst_psd_ratio = 0.0
    for idx, T in enumerate(corpus()):
        lam = min_eig_oracle(T)
        band = 1e-8 * max(1.0, T.norm())
        cert = positivity_verdict(T, seed=idx)
        counts[cert.verdict] += 1
        if cert.verdict is Verdict.POSITIVE and lam < -band:
            fails.append(f"unsound positive idx={idx} lambda_min={lam:.3e}")
        elif cert.verdict is Verdict.NOT_POSITIVE:
            if lam > band:
                fails.append(f"unsound negative idx={idx} lambda_min={lam:.3e}")
            elif witness_form(T, cert.witness) >= 0:
                fails.append(f"witness idx={idx} does not reevaluate negative")
        elif cert.verdict is Verdict.INCONCLUSIVE:
            fails.append(f"inconclusive idx={idx} lambda_min={lam:.3e}")
        if lam >= -band and min(np.linalg.eigvalsh(b)[0] for b in T.diagonal_blocks()) >= 0:
            rep = cross_entry_check(T, samples=8, seed=idx)
            r = max(rep.ratios.values(), default=0.0)
            worst_psd_ratio = max(worst_psd_ratio, r)
            if r > 1 + 1e-8:
                fails.append(f"necessity idx={idx} ratio={r!r}")
    report("Positivity soundness", fails, time.perf_counter() - t0,
           f"{counts[Verdict.POSITIVE]} positive, {counts[Verdict.NOT_POSITIVE]} not positive, "
           f"max PSD ratio {worst_psd_ratio:.12g}")


def test_c4_counterexample():
    t0 = time.perf_counter()
    fails = []
    T = BlockMatrix.from_dense(PM1, (1, 1, 1))
    ratios = cross_entry_check(T).ratios
    if any(r != 1.0 for r in ratios.values()):
        fails.append(f"ratios {ratios}")
    w = np.linalg.eigvalsh(PM1)
    if np.max(np.abs(w - np.array([-1.0, 2.0, 2.0]))) > 1e-10:
        fails.append(f"eigenvalues {w}")
    cert = positivity_verdict(T)
    if cert.verdict is not Verdict.NOT_POSITIVE or not witness_form(T, cert.witness) < 0:
        fails.append(f"verdict {cert.verdict}")
    report("Counterexample regression", fails, time.perf_counter() - t0,
           f"ratios {sorted(ratios.values())}, eigenvalues {np.round(w, 12).tolist()}, {cert.verdict.value}")


def test_c5_schur_equivalence():
    t0 = time.perf_counter()
    fails = []
    checked = banded = 0
    for idx, T in enumerate(corpus()):
        for eps in (1e-2, 1e-4, 1e-6):
            lam = min_eig_oracle(T) + eps
            band = 1e-9 * max(1.0, T.norm())
            try:
                positive = schur_chain(T, eps).positive
            except SingularPivot:
                positive = False
            checked += 1
            if abs(lam) <= band:
                banded += 1
                continue
            if positive != (lam > 0):
                fails.append(f"idx={idx} eps={eps} chain={positive} lambda_min={lam:.3e}")
    report("Schur-chain equivalence", fails, time.perf_counter() - t0,
           f"{checked} (instance, eps) checks, {banded} inside the tolerance band")


def _douglas_sizes(idx, solvable):
    rng = keyed_rng(2024, "acceptance-douglas", idx)
    m = int(rng.integers(1 if solvable else 2, 9))
    return m, int(rng.integers(1, 9)), int(rng.integers(1, 5))


def test_c6_douglas():
    t0 = time.perf_counter()
    fails = []
    worst_term = worst_proj = 0.0
    for idx in range(200):
        inst, truth = generate(InstanceSpec(idx, "douglas-solvable", sizes=_douglas_sizes(idx, True)))
        rep = solve(inst)
        bound = np.sqrt(rep.lambda_star)
        res = rep.residuals
        for eps, nx, r, _ in rep.table:
            if nx > bound + 1e-8:
                fails.append(f"solvable idx={idx} eps={eps}: ||X|| {nx!r} > sqrt(lambda*) {bound!r}")
        if not all(b < a for a, b in zip(res, res[1:])) or res[-1] > 1e-6:
            fails.append(f"solvable idx={idx} residuals {res}")
        worst_term = max(worst_term, res[-1])
        for X in solution_set_sample(inst, truth["X0"], count=5, seed=idx):
            err = np.linalg.norm(inst.A @ X - inst.C, 2)
            if err > 1e-10 * max(1.0, np.linalg.norm(inst.C, 2)):
                fails.append(f"solution set idx={idx}: {err:.2e}")
    for idx in range(200):
        inst, truth = generate(InstanceSpec(idx, "douglas-unsolvable", sizes=_douglas_sizes(idx, False)))
        rep = solve(inst)
        included, orth = range_inclusion_check(inst)
        err = abs(rep.residuals[-1] - orth)
        worst_proj = max(worst_proj, err)
        if included or err > 1e-8:
            fails.append(f"unsolvable idx={idx}: terminal {rep.residuals[-1]!r} vs {orth!r}")
        proj = [row[3] for row in rep.table]
        if not all(b <= a * (1 + 1e-9) for a, b in zip(proj, proj[1:])):
            fails.append(f"unsolvable idx={idx}: ||AX - PC|| not decreasing {proj}")
    report("Douglas suite", fails, time.perf_counter() - t0,
           f"max terminal residual {worst_term:.1e}, max |res - ||(I-P)C||| {worst_proj:.1e}")


def test_c7_spectral_gap():
    t0 = time.perf_counter()
    fails = []
    worst_margin = np.inf
    for idx in range(1000):
        inst, truth = generate(InstanceSpec(idx, "coercive-pair"))
        cert = gap_certificate(inst, (0.0, 0.1, 1.0, 10.0))
        if cert.gamma > 0.99 + 1e-9:
            fails.append(f"idx={idx} gamma {cert.gamma}")
        worst_margin = min(worst_margin, cert.lambda_min_H - cert.delta)
        if cert.lambda_min_H < cert.delta - 1e-8:
            fails.append(f"idx={idx} lambda_min {cert.lambda_min_H!r} < delta {cert.delta!r}")
        for t, norm, _ in cert.decay_checks:
            if norm > np.exp(-cert.delta * t) * (1 + 1e-12):
                fails.append(f"idx={idx} t={t}: {norm!r} > exp(-delta t)")
    scalar = gap_certificate(CoercivityInstance([[4.0]], [[1.0]], [[1.0]], 4.0, 1.0))
    if abs(scalar.lambda_min_H - 0.6972) > 1e-4 or abs(scalar.delta - 0.25) > 1e-4 \
            or abs(scalar.gamma - 0.25) > 1e-12 or scalar.lambda_min_H < scalar.delta:
        fails.append(f"scalar case {scalar}")
    report("Spectral-gap suite", fails, time.perf_counter() - t0,
           f"min lambda_min(H) - delta {worst_margin:.3e}; scalar lambda_min {scalar.lambda_min_H:.4f} "
           f">= delta {scalar.delta:.4f}")


def test_c8_continuity():
    t0 = time.perf_counter()
    fails = []
    worst = -np.inf
    for idx in range(100):
        rng = keyed_rng(2024, "acceptance-continuity", idx)
        m, n = (int(v) for v in rng.integers(1, 9, size=2))
        T = rng.standard_normal((m, n)) + 1j * rng.standard_normal((m, n))
        scale = float(rng.uniform(0.0, 1e-3))
        for alpha in ALPHAS:
            r = continuity_probe(T, scale, alpha, seed=idx)
            bound = (1 - alpha) * max(r.sigma1_T, r.sigma1_S) ** (-alpha) * scale + 1e-8
            worst = max(worst, r.difference - bound)
            if r.difference > bound or not r.consistent:
                fails.append(f"idx={idx} alpha={alpha}: diff {r.difference:.3e} bound {bound:.3e}")
    report("Perturbation continuity", fails, time.perf_counter() - t0,
           f"max (difference - bound) {worst:.3e}")


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q"]))
