"""Tests for the message-passing column solver and channel estimator.

Oracles: the exact linear-model posterior (ridge solution) at matched
noise levels, plus identity-matrix and zero-observation limits.
"""

import numpy as np
import pytest

from risce.als import StoppingRule, nmse, remove_ambiguity
from risce.channel import SystemConfig, gen_channels, gen_training, synthesize_rx
from risce.exceptions import FeasibilityError
from risce.vamp import GaussianPrior, vamp_column, vamp_estimate


def _rand_c(rng, shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def _prior(n, var=1.0):
    return GaussianPrior(mean=np.zeros(n, dtype=complex), var=np.full(n, var))


def test_prior_rejects_nonpositive_variance():
    with pytest.raises(ValueError):
        GaussianPrior(mean=np.zeros(2), var=np.array([1.0, 0.0]))


def test_identity_matrix_low_noise_returns_observation():
    rng = np.random.default_rng(0)
    y = _rand_c(rng, 6)
    mean, var = vamp_column(y, np.eye(6), _prior(6), sigma2=1e-10)
    np.testing.assert_allclose(mean, y, atol=1e-6)
    assert np.all(var >= 0)


def test_zero_observation_returns_prior_mean():
    mean, _ = vamp_column(np.zeros(5), np.eye(5), _prior(5), sigma2=0.1)
    np.testing.assert_allclose(mean, np.zeros(5), atol=1e-8)


def test_matches_ridge_posterior_oracle():
    # with a Gaussian prior the exact posterior mean solves
    # (A^H A / sigma2 + diag(1/var)) x = A^H y / sigma2 + mean / var
    rng = np.random.default_rng(1)
    a = _rand_c(rng, (12, 5))
    x = _rand_c(rng, 5)
    sigma2 = 1e-2
    y = a @ x + np.sqrt(sigma2 / 2) * (
        rng.standard_normal(12) + 1j * rng.standard_normal(12)
    )
    prior = _prior(5, var=2.0)
    lhs = a.conj().T @ a / sigma2 + np.diag(1.0 / prior.var)
    rhs = a.conj().T @ y / sigma2 + prior.mean / prior.var
    oracle = np.linalg.solve(lhs, rhs)
    mean, _ = vamp_column(y, a, prior, sigma2, StoppingRule(kappa=1e-14, i_max=200))
    np.testing.assert_allclose(mean, oracle, atol=1e-6)


def test_ls_limit_at_small_noise():
    rng = np.random.default_rng(2)
    a = _rand_c(rng, (10, 4))
    x = _rand_c(rng, 4)
    y = a @ x
    mean, _ = vamp_column(y, a, _prior(4), sigma2=1e-6, stop=StoppingRule(kappa=1e-14, i_max=200))
    ls = np.linalg.lstsq(a, y, rcond=None)[0]
    np.testing.assert_allclose(mean, ls, atol=1e-4)


def test_posterior_variance_monotone_in_noise():
    rng = np.random.default_rng(3)
    a = _rand_c(rng, (9, 4))
    y = _rand_c(rng, 9)
    prev = None
    for sigma2 in (1e-4, 1e-2, 1.0):
        _, var = vamp_column(y, a, _prior(4), sigma2)
        assert np.all(var > 0)
        if prev is not None:
            assert np.all(var >= prev - 1e-12)
        prev = var


def test_rejects_wide_matrix_and_bad_noise():
    with pytest.raises(ValueError, match="rows"):
        vamp_column(np.zeros(2), np.zeros((2, 3)), _prior(3), 0.1)
    with pytest.raises(ValueError, match="sigma2"):
        vamp_column(np.zeros(3), np.eye(3), _prior(3), 0.0)


def test_estimate_feasibility_guard():
    with pytest.raises(FeasibilityError):
        vamp_estimate(np.zeros((2, 2, 3), complex), np.zeros((3, 3), complex), 0.1)


def test_estimate_tracks_ls_on_clean_data():
    cfg = SystemConfig(k=4, m=4, n=4, t=4, p=4, snr_db=25.0)
    rng = np.random.default_rng(4)
    ch = gen_channels(cfg, rng)
    tr = gen_training(cfg)
    rx = synthesize_rx(ch, tr, cfg, rng)
    res = vamp_estimate(rx.ztilde, tr.phi, cfg.noise_var)
    hr_fix, hs_fix = remove_ambiguity(res.hr_hat, res.hs_hat, ch)
    assert nmse(ch.hr, hr_fix) <= 5e-2
    assert nmse(ch.hs, hs_fix) <= 5e-2


def test_estimate_deterministic():
    cfg = SystemConfig(k=4, m=4, n=4, t=4, p=4, snr_db=10.0)
    outs = []
    for _ in range(2):
        rng = np.random.default_rng(5)
        ch = gen_channels(cfg, rng)
        tr = gen_training(cfg)
        rx = synthesize_rx(ch, tr, cfg, rng)
        res = vamp_estimate(rx.ztilde, tr.phi, cfg.noise_var)
        outs.append((res.hr_hat, res.hs_hat))
    np.testing.assert_array_equal(outs[0][0], outs[1][0])
    np.testing.assert_array_equal(outs[0][1], outs[1][1])
