import math

import numpy as np
import pytest

from group_sampler.boas import BoasConfig, boas_apply, boas_error, boas_sigma_invariance
from group_sampler.models import ExpSumSignal, SpectralState, Spectrum, apply_generator, random_spectral_state

from conftest import eigenvector


def test_config_validation():
    for bad in [(0.0, 1, 10), (1.0, 0, 10), (1.0, 1, 0)]:
        with pytest.raises(ValueError):
            BoasConfig(*bad)


def test_zero_vector():
    f = SpectralState(Spectrum([0.5, 1.0]), [0, 0])
    res = boas_apply(f, BoasConfig(math.pi, 3, 100))
    assert res.value.norm() == 0 and res.tail_bound == 0


def test_single_eigenvector_first_order():
    f = eigenvector(1.7, 0.3 - 0.4j)
    err, tail, in_space = boas_error(f, BoasConfig(2.0, 1, 10_000))
    assert in_space and err <= tail


@pytest.mark.parametrize("order", [1, 2, 3, 4])
def test_identity_and_refinement(order, battery):
    for f in battery:
        sigma = f.spectral_radius()
        e1, t1, ok = boas_error(f, BoasConfig(sigma, order, 1000))
        e2, t2, _ = boas_error(f, BoasConfig(sigma, order, 2000))
        assert ok and e1 <= t1 and e2 <= t2
        assert 1 / 4 <= (e2 / e1) / 0.5 <= 4


def test_norm_bound_outside_the_space():
    rng = np.random.default_rng(3)
    f = random_spectral_state(rng, band=6.0)
    for order in (1, 2, 3):
        cfg = BoasConfig(1.0, order, 2000)
        res = boas_apply(f, cfg)
        assert not res.in_space
        assert res.value.norm() <= cfg.sigma ** order * f.norm() * (1 + 1e-12)


def test_translation_backend():
    g = ExpSumSignal([-2.5, 0.4, 2.9], [1.0, -0.5j, 0.25])
    res = boas_apply(g, BoasConfig(math.pi, 2, 10_000))
    diff = res.value - apply_generator(g, 2)
    assert diff.norm_upper() <= res.tail_bound


def test_sigma_invariance(battery):
    f = battery[1]
    s = f.spectral_radius()
    same = boas_sigma_invariance(f, s, s, 2, 500)
    assert same["difference"] == 0
    rep = boas_sigma_invariance(f, s, 2 * s, 3, 5000)
    assert not rep["flagged"] and rep["agree"]
    outside = boas_sigma_invariance(f, s / 3, s / 2, 1, 100)
    assert outside["flagged"] and outside["agree"] is None
