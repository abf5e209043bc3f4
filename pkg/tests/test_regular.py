import math

import numpy as np
import pytest

from group_sampler.boas import BoasConfig, boas_error
from group_sampler.calibration import DECAY_CONSTANTS, decay_study, tolerance
from group_sampler.errors import MissingSamplesError, OverflowGuardError, PreconditionError
from group_sampler.models import (
    DualFunctional,
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
    q_operator,
    recon_trajectory,
    recon_trajectory_many,
    reconstruct,
    recover_from_shift,
    recover_state,
    recovery_times,
    scalar_recon_trajectory,
    valiron_tschakaloff,
)

from conftest import eigenvector

K = 10_000


def test_s1_collapse_and_accuracy(battery):
    for f in battery:
        nf = f.norm()
        assert recon_trajectory(f, math.pi, 0.0, 50).coeffs.tolist() == f.coeffs.tolist()
        for m in (1, -2, 7):
            assert (recon_trajectory(f, 2.0, m * math.pi / 2.0, 50) - evolve(f, m * math.pi / 2.0)).norm() <= 1e-12 * nf
        err = (recon_trajectory(f, math.pi, 1.3, K) - evolve(f, 1.3)).norm()
        assert err <= tolerance("s1", nf, K)


def test_s1_scalar_projection_equivalence(battery):
    f = battery[0]
    Ks = 200
    ks = np.arange(-Ks, Ks + 1)
    for j in range(f.coeffs.size):
        g = DualFunctional("coefficient", index=j)
        F = sample_trajectory(f, ks * 1.0).pair(g)
        scalar = scalar_recon_trajectory(F, pair(apply_generator(f, 1), g), math.pi, 0.77, Ks)
        vector = pair(recon_trajectory(f, math.pi, 0.77, Ks), g)
        assert abs(scalar - vector) <= 1e-12 * f.norm()


def test_s1_convergence_ratio(battery):
    ts = np.linspace(-5, 5, 41)
    for f in battery[:3]:
        errs = []
        for Kk in (1000, 2000):
            coeffs, _ = recon_trajectory_many(f, math.pi, ts, Kk)
            exact = np.array([evolve(f, t).coeffs for t in ts])
            errs.append(np.max(np.linalg.norm(coeffs - exact, axis=1)))
        assert errs[1] / errs[0] <= 0.7


def test_recover_state_examples(battery):
    f = battery[2]
    sigma = math.pi
    times = recovery_times(sigma, 0.0, 30)
    samples = sample_trajectory(f, times)
    got = recover_state(samples, apply_generator(f, 1), 0.0, sigma, 30)
    assert np.array_equal(got.coeffs, f.coeffs)
    err = (recover_from_shift(f, 0.4, sigma, K) - f).norm()
    assert err <= tolerance("l0", f.norm(), K)


def test_recover_state_matches_shift_form_and_is_sample_driven(battery):
    f = battery[3]
    tau, sigma, Kk = 0.4, math.pi, 300
    times = recovery_times(sigma, tau, Kk)
    perm = np.random.default_rng(0).permutation(times.size)
    samples = sample_trajectory(f, times[perm])
    deriv = apply_generator(evolve(f, tau), 1)
    a = recover_state(samples, deriv, tau, sigma, Kk)
    b = recover_from_shift(f, tau, sigma, Kk)
    assert (a - b).norm() <= 1e-12 * f.norm()
    with pytest.raises(MissingSamplesError):
        recover_state(sample_trajectory(f, times[:-1]), deriv, tau, sigma, Kk)
    with pytest.raises(PreconditionError):
        recover_state(samples, deriv, tau, 0.0, Kk)


def test_valiron_tschakaloff(battery):
    for f in battery:
        nf = f.norm()
        assert (valiron_tschakaloff(f, math.pi, 0, 40) - f).norm() <= 1e-15 * nf
        for k in (1, -3, 5):
            z = k * math.pi / 2.5
            assert (valiron_tschakaloff(f, 2.5, z, 40) - evolve(f, z)).norm() <= 1e-12 * nf
        z = 0.7 + 0.5j
        err = (valiron_tschakaloff(f, math.pi, z, K) - evolve_complex(f, z)).norm()
        assert err <= tolerance("vt", nf, K)
    with pytest.raises(OverflowGuardError):
        valiron_tschakaloff(battery[0], math.pi, 40j, 10)


def test_derivative_sampling_examples(battery):
    f = SpectralState(Spectrum([0.5]), [0])
    assert derivative_sampling(f, math.pi, 2, 0.3, 100).norm() == 0
    g = eigenvector(2.2, 1 - 1j)
    target = (1j * 2.2) ** 2 * np.exp(1j * 2.2 * 0.9) * g.coeffs
    got = derivative_sampling(g, math.pi, 2, 0.9, K)
    assert np.abs(got.coeffs - target).max() <= tolerance("s2", g.norm(), K)
    h = battery[4]
    d1 = derivative_sampling(h, math.pi, 1, 0.0, K)
    assert (d1 - apply_generator(h, 1)).norm() <= 1e-12 * h.norm() * math.pi


def test_q_operator_is_derivative_sampling_at_zero(battery):
    f = battery[1]
    for n in (1, 2, 3):
        assert np.array_equal(q_operator(f, math.pi, n, 500).coeffs,
                              derivative_sampling(f, math.pi, n, 0.0, 500).coeffs)


def test_q_and_boas_agree_with_generator(battery):
    f = battery[5]
    for n in (1, 2):
        q_err = (q_operator(f, math.pi, n, K) - apply_generator(f, n)).norm()
        b_err, b_tail, _ = boas_error(f, BoasConfig(math.pi, n, K))
        assert q_err <= tolerance("s2", f.norm(), K)
        assert b_err <= b_tail


def test_rescaled_band_derivative_sampling():
    f = random_spectral_state(np.random.default_rng(2), band=1.5)
    for n in (1, 2):
        got = derivative_sampling(f, 1.5, n, 0.9, 4000)
        target = evolve(apply_generator(f, n), 0.9)
        assert (got - target).norm() <= 1e-3 * f.norm() * 1.5 ** n


@pytest.mark.parametrize("formula", ["s1", "l0", "vt", "s2"])
def test_convergence_ratio_per_formula(formula):
    rows = decay_study(formula, Ks=(1000, 2000), count=2)
    assert rows[1][1] / rows[0][1] <= 0.7
    assert rows[1][2] <= DECAY_CONSTANTS[formula]


def test_reconstruct_reports():
    f = random_spectral_state(np.random.default_rng(4))
    rep = reconstruct("s1", f, math.pi, 100, t=0.0)
    assert rep.errors == [0.0]
    d = rep.to_dict()
    assert d["formula"] == "s1" and d["max_error"] == 0.0
    rep = reconstruct("vt", f, math.pi, 100, z=0.3 + 0.2j)
    assert rep.to_dict()["points"] == [[0.3, 0.2]]
    with pytest.raises(PreconditionError):
        reconstruct("nope", f, math.pi, 100)
