"""Calibrated truncation tolerances for the equally spaced formulas.

The regular series lose ``O(1/K)`` in the truncation, so tolerances take the
form ``C ||f|| / K``. The constants are set from :func:`decay_study` on
states with an eigenvalue at the band edge (the slowest case), rounded up
with headroom; ``python -m group_sampler sweep`` reproduces the study.
"""

import math

import numpy as np

from .models import evolve, evolve_complex, random_spectral_state
from .regular import derivative_sampling, recon_trajectory_many, recover_from_shift, valiron_tschakaloff

# measured worst err * K / ||f|| on edge batteries: s1 1.58, l0 0.13, vt 0.73, s2 3.05
DECAY_CONSTANTS = {"s1": 4.0, "l0": 4.0, "vt": 2.0, "s2": 8.0}


def tolerance(formula, f_norm, K):
    return DECAY_CONSTANTS[formula] * f_norm / K


def edge_battery(seed=0, count=20, n=8, band=math.pi):
    rng = np.random.default_rng(seed)
    return [random_spectral_state(rng, n, band, include_edge=(i % 2 == 0)) for i in range(count)]


def _worst(formula, f, sigma, K):
    nf = f.norm()
    if formula == "s1":
        ts = np.linspace(-5, 5, 41)
        coeffs, _ = recon_trajectory_many(f, sigma, ts, K)
        exact = np.array([evolve(f, t).coeffs for t in ts])
        return float(np.max(np.linalg.norm(coeffs - exact, axis=1))) / nf
    if formula == "l0":
        return (recover_from_shift(f, 0.4, sigma, K) - f).norm() / nf
    if formula == "vt":
        zs = (0.7 + 0.5j, -1.2 + 0.25j)
        return max((valiron_tschakaloff(f, sigma, z, K) - evolve_complex(f, z)).norm() for z in zs) / nf
    if formula == "s2":
        errs = []
        for n in (1, 2):
            for t in (0.0, 0.9):
                target = f.with_coeffs((1j * f.freqs) ** n * evolve(f, t).coeffs)
                errs.append((derivative_sampling(f, sigma, n, t, K) - target).norm())
        return max(errs) / nf
    raise ValueError(f"unknown formula {formula!r}")


def decay_study(formula, Ks=(1000, 2000, 4000), seed=0, count=6, sigma=math.pi):
    """Rows ``(K, worst relative error, worst * K)`` over an edge battery."""
    battery = edge_battery(seed, count)
    rows = []
    for K in Ks:
        worst = max(_worst(formula, f, sigma, K) for f in battery)
        rows.append((int(K), worst, worst * K))
    return rows
