"""Acceptance suite: one check per criterion at its stated tolerance.

Run with ``pytest tests/test_acceptance.py`` (a summary line per criterion is
printed at the end) or directly with ``python3 tests/test_acceptance.py``.
"""

import math
import time

import numpy as np
import pytest

from group_sampler.boas import BoasConfig, boas_error
from group_sampler.calibration import tolerance
from group_sampler.coefficients import coefficient_table, analytic_tail, favard, favard_table
from group_sampler.diagnostics import jackson_ratio, kolmogorov_check, spectral_type
from group_sampler.irregular import CanonicalProduct, g_eval, g_prime_at_node, irregular_series, make_nodes
from group_sampler.models import (
    DualFunctional,
    ExpSumSignal,
    SpectralState,
    Spectrum,
    apply_generator,
    evolve,
    evolve_complex,
    pair,
    random_spectral_state,
    sample_trajectory,
)
from group_sampler.regular import (
    derivative_sampling,
    recon_trajectory,
    recon_trajectory_many,
    recover_from_shift,
    scalar_recon_trajectory,
    valiron_tschakaloff,
)
from group_sampler.schrodinger import round_trip

SIGMA = math.pi
K = 10_000
RESULTS = {}


def battery(seed=2024, count=20, band=math.pi):
    rng = np.random.default_rng(seed)
    return [random_spectral_state(rng, 8, band, include_edge=(i % 2 == 0)) for i in range(count)]


def ratio_ok(new, old, limit):
    # multiplicative form: exact (zero) errors pass
    return new <= limit * old


def criterion_1():
    worst_excess, worst_tail = 0.0, 0.0
    ok = True
    for f in battery():
        nf = f.norm()
        for r in (1, 2, 3, 4):
            err, tail, in_space = boas_error(f, BoasConfig(SIGMA, r, K))
            scaled = tail / (SIGMA ** r * nf)
            ok &= in_space and err <= tail and scaled <= 5e-3
            worst_excess = max(worst_excess, err / tail)
            worst_tail = max(worst_tail, scaled)
    return ok, f"max err/tail={worst_excess:.3g}, max tail/(sigma^r||f||)={worst_tail:.3g} (limit 5e-3)"


def criterion_2():
    ts = np.linspace(-5, 5, 41)
    ok = True
    worst = {K: 0.0, 2 * K: 0.0}
    worst_scaled = 0.0
    collapse = 0.0
    for f in battery():
        nf = f.norm()
        exact = np.array([evolve(f, t).coeffs for t in ts])
        for KK in (K, 2 * K):
            coeffs, _ = recon_trajectory_many(f, SIGMA, ts, KK)
            err = float(np.max(np.linalg.norm(coeffs - exact, axis=1)))
            worst[KK] = max(worst[KK], err / nf)
            if KK == K:
                ok &= err <= tolerance("s1", nf, K)
                worst_scaled = max(worst_scaled, err * K / nf)
        nodes = np.array([0.0, 1.0, -1.0, 2.0, -2.0]) * math.pi / SIGMA
        coeffs, _ = recon_trajectory_many(f, SIGMA, nodes, K)
        for t, c in zip(nodes, coeffs):
            collapse = max(collapse, np.linalg.norm(c - evolve(f, t).coeffs) / nf)
    ratio = worst[2 * K] / worst[K]
    ok &= ratio <= 0.7 and collapse <= 1e-12
    return ok, (f"max err*K/||f||={worst_scaled:.3g} (C=4), ratio(2K/K)={ratio:.3g} (<=0.7), "
                f"collapse={collapse:.2g} (<=1e-12)")


def criterion_3():
    ok = True
    worst = 0.0
    for f in battery():
        nf = f.norm()
        err = (recover_from_shift(f, 0.4, SIGMA, K) - f).norm()
        ok &= err <= tolerance("s1", nf, K)
        worst = max(worst, err * K / nf)
    return ok, f"max rel err*K={worst:.3g} (s1 constant 4)"


def criterion_4():
    ok = True
    worst, collapse = 0.0, 0.0
    for f in battery():
        nf = f.norm()
        for z in (0.7 + 0.5j, -1.2 + 0.25j):
            err = (valiron_tschakaloff(f, SIGMA, z, K) - evolve_complex(f, z)).norm()
            ok &= err <= tolerance("vt", nf, K)
            worst = max(worst, err * K / nf)
        for k in range(-5, 6):
            z = k * math.pi / SIGMA
            collapse = max(collapse, (valiron_tschakaloff(f, SIGMA, z, K) - evolve(f, z)).norm() / nf)
    ok &= collapse <= 1e-12
    return ok, f"max err*K/||f||={worst:.3g} (C=2), collapse={collapse:.2g}"


def criterion_5():
    ok = True
    parts = []
    states = battery()
    for n in (1, 2):
        for t in (0.0, 0.9):
            errs = {}
            for KK in (K, 2 * K):
                worst = 0.0
                for f in states:
                    target = evolve(apply_generator(f, n), t)
                    err = (derivative_sampling(f, SIGMA, n, t, KK) - target).norm() / f.norm()
                    worst = max(worst, err)
                    if KK == K:
                        ok &= err <= tolerance("s2", 1.0, K)
                errs[KK] = worst
            ok &= ratio_ok(errs[2 * K], errs[K], 0.8)
            ratio = errs[2 * K] / errs[K] if errs[K] else 0.0
            parts.append(f"n={n},t={t}: err={errs[K]:.2g}, ratio={ratio:.3g}")
    return ok, "; ".join(parts)


def criterion_6():
    ok = True
    worst_gap = 0.0
    for m in (1, 2, 3):
        r = 2 * m - 1
        table = coefficient_table("A", m, K)
        for sigma in (1.0, math.pi):
            total = (sigma / math.pi) ** r * table.abs_sum()
            gap = sigma ** r - total
            tail = analytic_tail("A", m, K, sigma)
            ok &= -1e-13 * sigma ** r <= gap <= tail
            worst_gap = max(worst_gap, gap / tail)
    violations = favard_table(12).interval_violations()
    k0, k1 = favard(0)[0], favard(1)[0]
    ok &= not violations and abs(k0 - 1) <= 1e-12 and abs(k1 - math.pi / 2) <= 1e-12
    return ok, (f"max gap/tail={worst_gap:.10f}, Favard violations={violations}, "
                f"|K0-1|={abs(k0 - 1):.2g}, |K1-pi/2|={abs(k1 - math.pi / 2):.2g}")


def criterion_7():
    ok = True
    parts = []
    errs = []
    for N in (1000, 10_000):
        cp = CanonicalProduct(make_nodes(N))
        e = abs(g_eval(cp, 0.5) - 1 / math.pi)
        errs.append(e)
        ok &= e <= 1.0 / N
        for m in (0, 1, 2, 5, 10):
            d = abs(g_prime_at_node(cp, m) - (-1) ** m)
            ok &= d <= 2.0 * (m * m + 1) / N
        ok &= g_eval(cp, 0.0) == -cp.t0
        parts.append(f"N={N}: |G(1/2)-1/pi|={e:.3g}")
    shifted = CanonicalProduct(make_nodes(1000, "const:0.1"))
    ok &= g_eval(shifted, 0.0) == -shifted.t0
    ok &= 8 <= errs[0] / errs[1] <= 12
    return ok, ", ".join(parts) + f", O(1/N) ratio={errs[0] / errs[1]:.3g}"


def criterion_8():
    zs = np.linspace(-3, 3, 301)
    states = battery(seed=88, count=5, band=0.75 * math.pi)
    errs = []
    collapse = 0.0
    for N in (250, 500, 1000, 2000):
        cp = CanonicalProduct(make_nodes(N, "sin:0.2"))
        worst = 0.0
        for f in states:
            samples = sample_trajectory(f, cp.nodes.nodes)
            err = max((irregular_series(samples, cp, z) - evolve(f, z)).norm() for z in zs)
            worst = max(worst, err / f.norm())
            for m in (-3, 0, 2):
                t = float(cp.nodes.nodes[cp.nodes.index_of(m)])
                collapse = max(collapse, (irregular_series(samples, cp, t) - evolve(f, t)).norm())
        errs.append(worst)
    ratios = [b / a for a, b in zip(errs, errs[1:])]
    ok = all(ratio_ok(b, a, 0.7) for a, b in zip(errs, errs[1:])) and collapse == 0.0
    return ok, (f"max errors={[f'{e:.2g}' for e in errs]}, ratios={[f'{r:.2g}' for r in ratios]} (<=0.7), "
                f"collapse={collapse:.2g}")


def criterion_9():
    states = battery(seed=99, count=20, band=0.75 * math.pi)
    ok = True
    worst = {}
    for N in (1000, 2000):
        w = 0.0
        for f in states:
            for via in ("l2",):
                rep = round_trip(f, N, "const:0.1", via=via)
                w = max(w, float(np.max(rep["per_coeff_error"])))
        worst[N] = w
    ok &= worst[1000] <= 1e-2
    ok &= ratio_ok(worst[2000], worst[1000], 0.7)
    return ok, (f"max rel coeff err N=1000: {worst[1000]:.2g} (<=1e-2), N=2000: {worst[2000]:.2g}, "
                f"ratio={worst[2000] / worst[1000]:.3g} (<=0.7)")


def criterion_10():
    rng = np.random.default_rng(10)
    ok = True
    worst = 0.0
    for _ in range(20):
        top = rng.uniform(0.5, 6.0)
        rest = rng.uniform(-0.9, 0.9, 7) * top
        lam = np.unique(np.append(rest, top * rng.choice([-1.0, 1.0])))
        f = SpectralState(Spectrum(lam), rng.normal(size=lam.size) + 1j * rng.normal(size=lam.size))
        rep = spectral_type(f, 500)
        rel = abs(rep.d_f - rep.sigma_f) / rep.sigma_f
        ok &= rel <= 0.01
        worst = max(worst, rel)
    exact = True
    for lam in (0.3, 2.0, -5.5):
        rep = spectral_type(SpectralState(Spectrum([lam]), [1.7 - 0.2j]), 500)
        exact &= bool(np.all(rep.sequence == abs(lam)))
    ok &= exact
    return ok, f"max |d_f-sigma_f|/sigma_f={worst:.2g} (<=1e-2), eigenvector exact={exact}"


def criterion_11():
    rng = np.random.default_rng(11)
    ok = True
    checks = 0
    equal = True
    for _ in range(1000):
        f = random_spectral_state(rng, n=int(rng.integers(1, 9)), band=float(rng.uniform(0.1, 8.0)))
        for n in range(7):
            for k in range(n + 1):
                lhs, rhs, holds = kolmogorov_check(f, k, n)
                ok &= holds
                checks += 1
                if k == n:
                    equal &= lhs == rhs
    ok &= equal
    return ok, f"{checks} inequalities checked, all hold={ok}, k=n equality={equal}"


def criterion_12():
    ok = True
    worst = 0.0
    growth = 0
    for f in battery():
        rows, w = jackson_ratio(f, 0, 2, [1, 2, 4, 8])
        ratios = [r.ratio for r in rows]
        ok &= bool(np.isfinite(w))
        if all(b > a for a, b in zip(ratios, ratios[1:])):
            growth += 1
        worst = max(worst, w)
    ok &= growth == 0
    return ok, f"max ratio={worst:.3g}, states with monotone growth={growth}"


def criterion_13():
    rng = np.random.default_rng(13)
    freqs = np.sort(rng.uniform(-0.9 * math.pi, 0.9 * math.pi, 5))
    sig = ExpSumSignal(freqs, rng.normal(size=5) + 1j * rng.normal(size=5), window=20.0)
    g = DualFunctional("point", x0=0.0)
    ks = np.arange(-K, K + 1)
    F = sig(ks * math.pi / SIGMA)
    dF0 = pair(apply_generator(sig, 1), g)
    nf = sig.norm()
    worst, agree = 0.0, 0.0
    for t in np.linspace(-5, 5, 21):
        val = scalar_recon_trajectory(F, dF0, SIGMA, t, K)
        worst = max(worst, abs(val - sig(t)))
        agree = max(agree, abs(val - pair(recon_trajectory(sig, SIGMA, t, K), g)))
    ok = worst <= tolerance("s1", nf, K) and agree <= 1e-12 * sig.norm_upper()
    return ok, f"max err={worst:.3g} vs tol={tolerance('s1', nf, K):.3g}, scalar/vector gap={agree:.2g}"


CRITERIA = [
    (1, "Boas identity", criterion_1),
    (2, "regular sampling", criterion_2),
    (3, "inverse formula at t=0.4", criterion_3),
    (4, "Valiron-Tschakaloff", criterion_4),
    (5, "derivative sampling", criterion_5),
    (6, "coefficient identities and Favard", criterion_6),
    (7, "irregular product", criterion_7),
    (8, "irregular reconstruction N-doubling", criterion_8),
    (9, "measurement recovery and round trip", criterion_9),
    (10, "spectral type limit", criterion_10),
    (11, "Stein-Kolmogorov", criterion_11),
    (12, "Jackson ratios", criterion_12),
    (13, "cross-backend scalar sampling", criterion_13),
]


def _run(number, name, fn):
    start = time.perf_counter()
    ok, detail = fn()
    elapsed = time.perf_counter() - start
    ok = bool(ok) and elapsed < 60
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {number:2d} {name}: {detail} ({elapsed:.1f}s)"
    RESULTS[number] = line
    print(line)
    return ok, line


@pytest.mark.parametrize("number,name,fn", CRITERIA, ids=[f"criterion_{c[0]:02d}" for c in CRITERIA])
def test_criterion(number, name, fn):
    ok, line = _run(number, name, fn)
    assert ok, line


if __name__ == "__main__":
    for c in CRITERIA:
        _run(*c)
