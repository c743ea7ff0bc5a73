"""Acceptance suite: one test per release criterion, each printing a
PASS/FAIL line with its runtime. Tolerances are fixed here, not configurable.

Run with `pytest tests/test_acceptance.py -v -s` to see the per-criterion
lines.
"""

import json
import math
import subprocess
import sys
import time

import numpy as np
import pytest

import rdc
from rdc.info import LN2

from helpers import clean_bayes_error, random_binary_source, random_channel

HAMMING2 = rdc.DistortionMeasure.hamming(2)
SYMBOL_CLF = rdc.BinaryClassifier(m=2, region=frozenset({0}))


def overlap_instance():
    src = rdc.MixtureSource(0.5, 0.5, [0.8, 0.2], [0.3, 0.7])
    clf = rdc.bayes_region(src, rdc.Channel.identity(2))
    return src, clf


def _finish(name: str, t0: float, failures: list, budget_s: float | None = None):
    elapsed = time.perf_counter() - t0
    if budget_s is not None and elapsed >= budget_s:
        failures.append(f"runtime {elapsed:.1f}s exceeded budget {budget_s:.0f}s")
    status = "PASS" if not failures else "FAIL"
    print(f"[acceptance] {name}: {status} ({elapsed:.2f}s)")
    assert not failures, failures


@pytest.fixture(scope="module")
def overlap_surface():
    """20x20 sweep shared by the monotonicity and convexity criteria."""
    src, clf = overlap_instance()
    t0 = time.perf_counter()
    surf = rdc.sweep_surface(src, HAMMING2, clf,
                             np.linspace(0.02, 0.40, 20), np.linspace(0.26, 0.50, 20))
    return surf, time.perf_counter() - t0, src, clf


def test_closed_form_agreement():
    """solve_constrained(D, inf) matches the binary closed form."""
    t0, failures = time.perf_counter(), []
    for p in (0.1, 0.2, 0.3, 0.5):
        src = rdc.MixtureSource.bernoulli(p)
        for d in np.linspace(0.0, p, 21)[:20]:
            got = rdc.solve_constrained(src, HAMMING2, SYMBOL_CLF, float(d), math.inf).rate_bits
            want = rdc.rd_closed_form(p, float(d))
            if abs(got - want) > 1e-3:
                failures.append(f"p={p} D={d:.4f}: |{got:.6f}-{want:.6f}| > 1e-3")
        for d in (p, p + 0.1, 2 * p):
            got = rdc.solve_constrained(src, HAMMING2, SYMBOL_CLF, float(d), math.inf).rate_bits
            if got >= 1e-4:
                failures.append(f"p={p} D={d:.4f}: rate {got:.2e} not < 1e-4")
    _finish("closed-form agreement", t0, failures, budget_s=10)


def test_oracle_equivalence():
    """Solver matches the exhaustive grid oracle on random binary instances."""
    t0, failures = time.perf_counter(), []
    rng = np.random.default_rng(2024)
    resolution = 400
    oracle_cfg = rdc.OracleConfig(resolution=resolution)
    for trial in range(20):
        src = random_binary_source(rng)
        clf = rdc.bayes_region(src, rdc.Channel.identity(2))
        floor = clean_bayes_error(src)
        for pair in range(5):
            d = float(rng.uniform(0.05, 0.55))
            e = floor + float(rng.uniform(0.01, 0.3))
            solver_pt = rdc.solve_constrained(src, HAMMING2, clf, d, e)
            oracle_pt = rdc.grid_search_rdc(src, HAMMING2, clf, d, e, oracle_cfg)
            # lattice quantization costs at most ~slope * step in rate
            grid_err = 2.0 * (solver_pt.lambda_d + solver_pt.lambda_e) / LN2 / resolution
            tol = max(1e-2, grid_err)
            gap = oracle_pt.rate_bits - solver_pt.rate_bits
            if abs(gap) > tol:
                failures.append(f"trial {trial}.{pair}: |gap|={abs(gap):.3e} > tol {tol:.3e}")
    _finish("oracle equivalence", t0, failures, budget_s=120)


def test_monotonicity(overlap_surface):
    """Tabulated rate is non-increasing along both bound axes."""
    surf, build_s, _, _ = overlap_surface
    t0, failures = time.perf_counter(), []
    report = rdc.check_monotone(surf, tol=1e-4)
    if report["violations"]:
        failures.append(f"{len(report['violations'])} monotonicity violations: "
                        f"{report['violations'][:3]}")
    if not all(pt.feasible for row in surf.points for pt in row):
        failures.append("sweep produced unexpected infeasible cells")
    elapsed_check = time.perf_counter() - t0
    if build_s + elapsed_check >= 60:
        failures.append(f"sweep+check took {build_s + elapsed_check:.1f}s (budget 60s)")
    status = "PASS" if not failures else "FAIL"
    print(f"[acceptance] monotonicity 20x20: {status} ({build_s + elapsed_check:.2f}s)")
    assert not failures, failures


def test_convexity(overlap_surface):
    """Midpoint convexity over random feasible cell pairs, midpoints solved on demand."""
    surf, _, src, clf = overlap_surface
    t0, failures = time.perf_counter(), []

    def midpoint(d, e):
        try:
            return rdc.solve_constrained(src, HAMMING2, clf, d, e)
        except rdc.InfeasibleBounds:
            return None

    report = rdc.check_convexity(surf, n_pairs=200, tol=1e-3, seed=0,
                                 midpoint_solver=midpoint)
    if report["violations"]:
        failures.append(f"{len(report['violations'])} convexity violations: "
                        f"{report['violations'][:3]}")
    if report["pairs_checked"] < 200:
        failures.append(f"only {report['pairs_checked']} of 200 pairs evaluated")
    _finish("midpoint convexity", t0, failures, budget_s=120)


def test_error_rate_linearity():
    """The classifier error functional is exactly linear in the channel."""
    t0, failures = time.perf_counter(), []
    rng = np.random.default_rng(77)
    for trial in range(100):
        n, m = (int(v) for v in rng.integers(2, 5, size=2))
        src = random_binary_source(rng) if n == 2 else None
        if src is None or src.n != n:
            p1 = rng.uniform(0.05, 1.0, size=n)
            p2 = rng.uniform(0.05, 1.0, size=n)
            prior1 = float(rng.uniform(0.2, 0.8))
            src = rdc.MixtureSource(prior1, 1 - prior1, p1 / p1.sum(), p2 / p2.sum())
        region = frozenset(int(i) for i in rng.choice(m, size=int(rng.integers(0, m + 1)),
                                                      replace=False))
        clf = rdc.BinaryClassifier(m=m, region=region)
        k1, k2 = random_channel(rng, n, m), random_channel(rng, n, m)
        lam = float(rng.uniform(0.0, 1.0))
        blend = rdc.Channel(lam * k1.k + (1 - lam) * k2.k)
        lhs = rdc.error_rate(src, blend, clf)
        rhs = lam * rdc.error_rate(src, k1, clf) + (1 - lam) * rdc.error_rate(src, k2, clf)
        if abs(lhs - rhs) > 1e-12:
            failures.append(f"trial {trial}: |{lhs!r}-{rhs!r}| > 1e-12")
    _finish("error-rate linearity", t0, failures)


def test_constraint_coincidence():
    """With the class-per-symbol weights, the tighter of the two bounds rules."""
    t0, failures = time.perf_counter(), []
    src = rdc.MixtureSource.bernoulli(0.5)
    grid = np.linspace(0.02, 0.6, 10)
    for d in grid:
        for e in grid:
            joint = rdc.solve_constrained(src, HAMMING2, SYMBOL_CLF, float(d), float(e))
            single = rdc.solve_constrained(src, HAMMING2, SYMBOL_CLF,
                                           float(min(d, e)), math.inf)
            if abs(joint.rate_bits - single.rate_bits) > 1e-3:
                failures.append(f"D={d:.2f} E={e:.2f}: "
                                f"{joint.rate_bits:.6f} vs {single.rate_bits:.6f}")
    _finish("constraint coincidence", t0, failures)


def test_bernoulli_regime_structure():
    """Regime boundaries and plateau for the class-per-symbol source, p=1/2, E=0.2."""
    t0, failures = time.perf_counter(), []
    reg = rdc.locate_regimes(rdc.MixtureSource.bernoulli(0.5), SYMBOL_CLF, 0.2,
                             sweep_points=200)
    plateau_expect = 1.0 - rdc.binary_entropy(0.2)
    if abs(reg.d1 - 0.2) > 5e-3:
        failures.append(f"d1={reg.d1:.5f} not within 5e-3 of 0.2")
    if not reg.has_plateau:
        failures.append("no plateau detected")
    if abs(reg.plateau_rate_bits - plateau_expect) > 2e-3:
        failures.append(f"plateau={reg.plateau_rate_bits:.6f} vs {plateau_expect:.6f}")
    mid = reg.rate_values[(reg.d_values > reg.d1 + 0.02) & np.isfinite(reg.rate_values)]
    if mid.size and float(mid.max() - mid.min()) >= 1e-3:
        failures.append(f"plateau spread {float(mid.max() - mid.min()):.2e} >= 1e-3")
    _finish("regime structure", t0, failures)


def test_cli_determinism(tmp_path):
    """Identical CLI invocations produce byte-identical data outputs."""
    t0, failures = time.perf_counter(), []
    source = tmp_path / "overlap.json"
    source.write_text(json.dumps({
        "prior1": 0.5, "p_x1": [0.8, 0.2], "p_x2": [0.3, 0.7],
        "distortion": "hamming", "classifier_region": "bayes",
    }))

    def cli(*argv):
        proc = subprocess.run([sys.executable, "-m", "rdc.cli", *argv],
                              capture_output=True, text=True)
        if proc.returncode != 0:
            failures.append(f"cli {' '.join(argv[:2])} exited {proc.returncode}: {proc.stderr}")
        return proc.stdout

    solve_args = ("solve", "--source", str(source), "--d", "0.07", "--e", "0.27", "--no-meta")
    if cli(*solve_args) != cli(*solve_args):
        failures.append("solve stdout differs between identical runs")

    outputs = []
    for name, jobs in (("a.csv", "1"), ("b.csv", "1"), ("c.csv", "2")):
        out = tmp_path / name
        cli("sweep", "--source", str(source), "--grid-d", "0.05:0.25:3",
            "--grid-e", "0.26:0.4:3", "--out", str(out), "--jobs", jobs, "--no-meta")
        outputs.append(out.read_bytes())
    if not (outputs[0] == outputs[1] == outputs[2]):
        failures.append("sweep outputs differ across identical runs / job counts")
    _finish("CLI determinism", t0, failures)
