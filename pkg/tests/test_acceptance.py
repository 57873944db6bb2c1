"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the lines as they
are produced; they are also collected in the terminal summary.
"""

import math
import time
from pathlib import Path

import numpy as np

from conftest import record_acceptance
from maxop.cli import main
from maxop.experiments import region_sweep
from maxop.fields import BallIndicator, Bump, FieldTuple, Gaussian
from maxop.fourier import multiplier_envelope, radial_fourier, s_alpha_fourier
from maxop.inequalities import check_chain, check_limits, check_recovery, check_slicing, random_points
from maxop.lplab import ExponentTuple, decay_fit, ratio_probe
from maxop.operators import alpha_average, hl_average, ring_profile
from maxop.quadrature import jacobi_rule, sphere_monomial_integral, sphere_rule
from maxop.special import beta, measure_constants, slicing_identity_check

ROOT = Path(__file__).resolve().parents[1]
ZERO_LEVEL = 1e-30

BALL = BallIndicator(dim=2)
GAUSS = Gaussian(dim=2)
CHAIN_TUPLES = {
    "ball": FieldTuple((BALL,)),
    "gaussian": FieldTuple((GAUSS,)),
    "ball_pair": FieldTuple((BALL, BallIndicator(dim=2, center=(0.5, 0.0)))),
    "gaussian_pair": FieldTuple((GAUSS, Gaussian(dim=2, scale=0.7, center=(0.5, 0.0)))),
}
SMOOTH_TUPLES = {
    "gaussian": FieldTuple((GAUSS,)),
    "gaussian_pair": CHAIN_TUPLES["gaussian_pair"],
    "bump_pair": FieldTuple((Bump(dim=2, radius=2.0), Bump(dim=2, radius=1.5, center=(0.5, 0.0)))),
}


def _timed(fn):
    t0 = time.perf_counter()
    out = fn()
    return out, time.perf_counter() - t0


def test_criterion_01_normalisation_identity():
    def work():
        return max(slicing_identity_check(m, n, a)
                   for m in (2, 3) for n in (2, 3, 4) for a in (0.0, 0.25, 0.5, 0.9))

    worst, secs = _timed(work)
    ok = worst <= 1e-12 and secs < 1.0
    record_acceptance(1, ok, f"max residual {worst:.2e} (<= 1e-12), {secs:.2f} s (< 1 s)")
    assert ok


def test_criterion_02_alpha_zero_collapse():
    def work():
        worst = 0.0
        for i, tup in enumerate(CHAIN_TUPLES.values()):
            for x in random_points(700 + i, 10, 2.5, 2):
                prof = ring_profile(tup, x)
                ts = np.array([0.05, 0.3, 1.0, 2.5, 4.0])
                a0, hl = alpha_average(prof, 0.0, ts), hl_average(prof, ts)
                # values below 1e-30 are zero up to rounding in the inner quadratures
                rel = np.abs(a0 - hl) / np.maximum(np.abs(hl), ZERO_LEVEL)
                worst = max(worst, float(rel.max()))
        return worst

    worst, secs = _timed(work)
    ok = worst <= 1e-10 and secs < 10.0
    record_acceptance(2, ok, f"max relative gap {worst:.2e} (<= 1e-10), {secs:.1f} s (< 10 s)")
    assert ok


def test_criterion_03_chain():
    def work():
        out = {}
        for i, (name, tup) in enumerate(CHAIN_TUPLES.items()):
            out[name] = check_chain(tup, (0.1, 0.5, 0.9), random_points(100 + i, 100, 3.0, 2), seed=100 + i)
        return out

    reports, secs = _timed(work)
    failed = [k for k, r in reports.items() if not r.passed]
    ok = not failed and secs < 300.0
    worst = max(r.worst_violation - r.tolerance for r in reports.values())
    record_acceptance(3, ok, f"4 tuples x 100 points, violations in {failed or 'none'}, "
                             f"worst excess {worst:.2e}, {secs:.0f} s (< 300 s)")
    assert ok


def test_criterion_04_alpha_limits():
    def work():
        reports = []
        for i, tup in enumerate(SMOOTH_TUPLES.values()):
            for x in [np.zeros(2)] + list(random_points(800 + i, 2, 1.5, 2)):
                reports.append(check_limits(tup, x, 0.5))
        return reports

    reports, secs = _timed(work)
    worst = max(r.worst_violation for r in reports)
    ok = all(r.passed for r in reports) and secs < 120.0
    record_acceptance(4, ok, f"{len(reports)} (tuple, x) cases at t = 0.5, worst normalised metric "
                             f"{worst:.3f} (<= 1), {secs:.0f} s (< 120 s)")
    assert ok


def test_criterion_05_slicing():
    m2 = CHAIN_TUPLES["gaussian_pair"]
    m3 = FieldTuple((GAUSS, BALL, Bump(dim=2, radius=1.5, center=(0.0, 0.5))))

    def work():
        return [check_slicing(m2, 0, random_points(201, 50, 3.0, 2), 0.5, seed=201),
                check_slicing(m3, 1, random_points(202, 50, 3.0, 2), 0.5, seed=202)]

    reports, secs = _timed(work)
    ok = all(r.passed for r in reports) and secs < 300.0
    excess = max(r.worst_violation - r.tolerance for r in reports)
    record_acceptance(5, ok, f"m=2 and m=3 batteries of 50 points, worst excess {excess:.2e}, "
                             f"{secs:.0f} s (< 300 s)")
    assert ok


def test_criterion_06_decay_exponents():
    def work():
        return [decay_fit(m, 2, a, (4, 8, 16, 32)) for m, a in ((1, 0.5), (1, 0.9), (2, 0.5))]

    fits, secs = _timed(work)
    rel = [abs(f.slope - f.target) / abs(f.target) for f in fits]
    ok = max(rel) <= 0.02 and secs < 600.0
    slopes = ", ".join(f"{f.slope:.4f} vs {f.target:.1f}" for f in fits)
    record_acceptance(6, ok, f"slopes {slopes}; max rel error {max(rel):.4f} (<= 0.02), {secs:.1f} s")
    assert ok


def test_criterion_07_region_predicate():
    (result, secs) = _timed(lambda: region_sweep(10_000, 7))
    agree, total, mismatches = result
    ok = agree == total and secs < 1.0
    record_acceptance(7, ok, f"{agree}/{total} agree, {secs:.2f} s (< 1 s)")
    assert ok, mismatches


def test_criterion_08_fourier_oracle():
    def work():
        worst = 0.0
        for n in (2, 3):
            for f in (Gaussian(dim=n, scale=1 / math.sqrt(math.pi)), Bump(dim=n, radius=3.0)):
                spec = radial_fourier(f)
                tup = FieldTuple((f,))
                for r in (0.0, 1.0, 2.0):
                    x = np.zeros(n)
                    x[0] = r
                    prof = ring_profile(tup, x)
                    for a in (0.0, 0.3, 0.7):
                        for t in (0.5, 1.0, 2.0):
                            d = alpha_average(prof, a, t)
                            worst = max(worst, abs(s_alpha_fourier(spec, a, t, x) - d) / d)
        slope_err = max(abs(e.slope - e.target) for e in
                        (multiplier_envelope(a, n) for n in (2, 3) for a in (0.0, 0.5, 0.9)))
        return worst, slope_err

    (worst, slope_err), secs = _timed(work)
    ok = worst <= 1e-3 and slope_err <= 0.05 and secs < 180.0
    record_acceptance(8, ok, f"dual-path rel error {worst:.2e} (<= 1e-3), envelope slope error "
                             f"{slope_err:.2e} (<= 0.05), {secs:.0f} s (< 180 s)")
    assert ok


def test_criterion_09_ratio_divergence_signature():
    tup = FieldTuple((BALL,))

    def ratios(p):
        return [ratio_probe(tup, 0.5, ExponentTuple((p,)), L, 2 * L / 128).ratio for L in (4, 8, 16)]

    (low, high), secs = _timed(lambda: (ratios(1.3), ratios(4.0)))
    growth = [b / a - 1 for a, b in zip(low, low[1:])]
    change = [abs(b / a - 1) for a, b in zip(high, high[1:])]
    ok = min(growth) >= 0.25 and max(change) <= 0.05 and secs < 300.0
    record_acceptance(9, ok, f"p=1.3 growth per doubling {[round(g, 4) for g in growth]} (>= 0.25 each), "
                             f"p=4 change {[round(c, 4) for c in change]} (<= 0.05), {secs:.0f} s")
    assert ok


def test_criterion_10_small_scale_recovery():
    def work():
        out = []
        for i, tup in enumerate(SMOOTH_TUPLES.values()):
            for a in (0.0, 0.5, 1.0):
                out.append(check_recovery(tup, random_points(900 + i, 20, 1.5, 2), a, (1.0, 0.1, 0.01)))
        return out

    reports, secs = _timed(work)
    worst = max(max(r.witness["errors"][-1] for r in reports), 0.0)
    ok = all(r.passed for r in reports) and secs < 60.0
    record_acceptance(10, ok, f"20 points per smooth tuple, t in (1, 0.1, 0.01); worst error at t=0.01 "
                              f"{worst:.2e} (<= 1e-2), monotone, {secs:.1f} s (< 60 s)")
    assert ok


def test_criterion_11_quadrature_certification():
    def work():
        worst = 0.0
        for order in (1, 2, 5, 16, 40):
            for a, b in ((0.0, 0.0), (-0.5, 0.0), (-0.9, 1.0), (0.5, 2.5), (2.0, -0.75)):
                rule = jacobi_rule(order, a, b)
                for k in range(2 * order):
                    exact = beta(a + 1 + k, b + 1)
                    worst = max(worst, abs(rule.integrate(rule.nodes ** k) - exact) / exact)
        for kappa in (2, 3, 4, 5, 6):
            rule = sphere_rule(kappa, 8)
            worst = max(worst, abs(rule.integrate(np.ones(rule.size)) / measure_constants(kappa).omega - 1))
            exps = np.array([e for e in np.ndindex(*([5] * kappa)) if sum(e) <= 8])
            powers = rule.points[None, :, :] ** np.arange(5)[:, None, None]
            for lo in range(0, len(exps), 256):
                block = exps[lo:lo + 256]
                mono = np.ones((len(block), rule.size))
                for i in range(kappa):
                    mono *= powers[block[:, i], :, i]
                got = mono @ rule.weights
                exact = np.array([sphere_monomial_integral(e) for e in block])
                worst = max(worst, float(np.max(np.abs(got - exact) / np.maximum(np.abs(exact), 1.0))))
        return worst

    worst, secs = _timed(work)
    ok = worst <= 1e-11 and secs < 5.0
    record_acceptance(11, ok, f"worst relative moment error {worst:.2e} (<= 1e-11), {secs:.2f} s (< 5 s)")
    assert ok


def test_criterion_12_determinism(tmp_path):
    config = ROOT / "scripts" / "configs" / "default.ini"
    codes = [main(["run", str(config), "--out", str(tmp_path / d), "--threads", th])
             for d, th in (("first", "1"), ("second", "2"))]
    files = sorted(p.name for p in (tmp_path / "first").iterdir() if p.name != "manifest.json")
    same = [(tmp_path / "first" / f).read_bytes() == (tmp_path / "second" / f).read_bytes() for f in files]
    other = sorted(p.name for p in (tmp_path / "second").iterdir() if p.name != "manifest.json")
    ok = codes == [0, 0] and files == other and all(same) and len(files) > 0
    record_acceptance(12, ok, f"{sum(same)}/{len(files)} CSV/JSON outputs byte-identical "
                              f"(threads 1 vs 2), exit codes {codes}")
    assert ok
