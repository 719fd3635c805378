"""Tests for phase optimization, precoders, and downlink rates.

Oracles: exhaustive search over 8-phase quantized reflection vectors for
small surfaces, right-inverse identities for the nulling precoder, and the
closed-form rate for perfect-knowledge interference nulling.
"""

from itertools import product

import numpy as np
import pytest

from risce.precoding import (
    PhaseVector,
    PrecoderSpec,
    effective_channel,
    error_power_eps,
    normalize_columns,
    optimize_phase,
    precoder,
    rates,
    rates_perfect,
)


def _rand_c(rng, shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def _objective(hr, hs, v):
    # sum_k || h_k^r^H Phi Hs ||^2 with Phi = diag(conj(v))
    phi = np.diag(v.conj())
    return sum(
        np.linalg.norm(hr[k, :] @ phi @ hs) ** 2 for k in range(hr.shape[0])
    )


def test_phase_vector_rejects_non_unit():
    with pytest.raises(ValueError):
        PhaseVector(v=np.array([1.0, 0.5]))


def test_precoder_spec_validation():
    with pytest.raises(ValueError):
        PrecoderSpec(scheme="other")
    with pytest.raises(ValueError):
        PrecoderSpec(scheme="zf", pu=0.0)


def test_optimize_phase_single_element():
    rng = np.random.default_rng(0)
    hr = _rand_c(rng, (3, 1))
    hs = _rand_c(rng, (1, 2))
    phi, vec = optimize_phase(hr, hs)
    assert vec.v.shape == (1,)
    assert abs(abs(vec.v[0]) - 1.0) <= 1e-9
    # objective is phase-invariant for N = 1
    assert _objective(hr, hs, vec.v) == pytest.approx(
        np.linalg.norm(hr) ** 2 * np.linalg.norm(hs) ** 2 / (np.linalg.norm(hr) ** 2 / np.sum(np.abs(hr) ** 2)),
        rel=1e-6,
    )


def test_optimize_phase_identity_fixed_point():
    # a diagonal quadratic form keeps the all-ones start unchanged
    hr = np.eye(3, dtype=complex)
    hs = np.eye(3, dtype=complex)
    phi, vec = optimize_phase(hr, hs)
    np.testing.assert_allclose(vec.v, np.ones(3), atol=1e-12)


def test_optimize_phase_objective_monotone():
    rng = np.random.default_rng(1)
    hr = _rand_c(rng, (4, 4))
    hs = _rand_c(rng, (4, 4))
    c_tilde = np.zeros((4, 4), dtype=complex)
    for k in range(4):
        ck = np.diag(hr[k, :]) @ hs
        c_tilde += ck @ ck.conj().T
    v = np.ones(4, dtype=complex)
    prev = np.real(v.conj() @ c_tilde @ v)
    for _ in range(20):
        w = c_tilde @ v
        v = w / np.abs(w)
        cur = np.real(v.conj() @ c_tilde @ v)
        assert cur >= prev - 1e-9
        prev = cur
    # the fixed-point result matches the iteration's limit objective
    _, vec = optimize_phase(hr, hs, kappa=1e-12, t_max=500)
    assert np.real(vec.v.conj() @ c_tilde @ vec.v) >= prev - 1e-6


@pytest.mark.parametrize("n", [2, 3, 4])
def test_optimize_phase_near_quantized_optimum(n):
    # exhaustive search over 8-phase quantized unit-modulus vectors
    rng = np.random.default_rng(10 + n)
    hr = _rand_c(rng, (3, n))
    hs = _rand_c(rng, (n, 3))
    _, vec = optimize_phase(hr, hs)
    achieved = _objective(hr, hs, vec.v)
    alphabet = np.exp(2j * np.pi * np.arange(8) / 8)
    best = max(
        _objective(hr, hs, np.array(cand))
        for cand in product(alphabet, repeat=n)
    )
    assert achieved >= 0.95 * best


def test_effective_channel_matches_loop_oracle():
    rng = np.random.default_rng(2)
    hr = _rand_c(rng, (3, 4))
    hs = _rand_c(rng, (4, 5))
    v = np.exp(1j * rng.uniform(0, 2 * np.pi, 4))
    phi = np.diag(v)
    h = effective_channel(hr, hs, phi)
    ref = np.zeros((3, 5), dtype=complex)
    for k in range(3):
        for m in range(5):
            ref[k, m] = sum(hr[k, n] * v[n] * hs[n, m] for n in range(4))
    np.testing.assert_allclose(h, ref, atol=1e-12)
    with pytest.raises(ValueError):
        effective_channel(hr, hs, np.eye(3))


def test_error_power_identities():
    rng = np.random.default_rng(3)
    h = _rand_c(rng, (4, 6))
    np.testing.assert_allclose(error_power_eps(h, h, 2.0), 0.0, atol=1e-12)
    h_hat = h + 0.1 * _rand_c(rng, (4, 6))
    e1 = error_power_eps(h_hat, h, 1.0)
    e2 = error_power_eps(h_hat, h, 2.0)
    np.testing.assert_allclose(e2, 2.0 * e1, rtol=1e-12)
    # direct-sum oracle over the conjugated error rows
    err = h_hat - h
    ref = np.array([
        sum(abs(np.vdot(err[i, :], h_hat[k, :])) ** 2 for i in range(4))
        for k in range(4)
    ])
    np.testing.assert_allclose(e1, ref, rtol=1e-10)


def test_error_power_expansion_identity():
    # E = Er Phi Hs_hat + Hr_hat Phi Es - Er Phi Es reproduces H_hat - H
    rng = np.random.default_rng(4)
    hr_hat = _rand_c(rng, (3, 4))
    hs_hat = _rand_c(rng, (4, 5))
    er = 0.1 * _rand_c(rng, (3, 4))
    es = 0.1 * _rand_c(rng, (4, 5))
    phi = np.diag(np.exp(1j * rng.uniform(0, 2 * np.pi, 4)))
    h_true = (hr_hat - er) @ phi @ (hs_hat - es)
    h_hat = hr_hat @ phi @ hs_hat
    expansion = er @ phi @ hs_hat + hr_hat @ phi @ es - er @ phi @ es
    np.testing.assert_allclose(h_hat - h_true, expansion, atol=1e-10)


def test_mrt_precoder_definition():
    rng = np.random.default_rng(5)
    h = _rand_c(rng, (4, 6))
    g = precoder(h, PrecoderSpec(scheme="mrt"))
    np.testing.assert_array_equal(g, h.conj().T)


def test_zf_precoder_right_inverse():
    rng = np.random.default_rng(6)
    h = _rand_c(rng, (4, 6))
    g = precoder(h, PrecoderSpec(scheme="zf"))
    np.testing.assert_allclose(h @ g, np.eye(4), atol=1e-10)
    with pytest.raises(ValueError, match="K <= M"):
        precoder(_rand_c(rng, (6, 4)), PrecoderSpec(scheme="zf"))


def test_zf_precoder_singular_gram():
    h = np.ones((3, 4), dtype=complex)
    with pytest.raises(ValueError, match="singular"):
        precoder(h, PrecoderSpec(scheme="zf"))


def test_mmse_limits_to_zf():
    rng = np.random.default_rng(7)
    h = _rand_c(rng, (4, 6))
    g_zf = precoder(h, PrecoderSpec(scheme="zf"))
    g_mmse = precoder(h, PrecoderSpec(scheme="mmse", pu=1.0, sigma2=1e-10))
    np.testing.assert_allclose(g_mmse, g_zf, atol=1e-6)


def test_mmse_tall_branch_shape():
    rng = np.random.default_rng(8)
    h = _rand_c(rng, (6, 4))
    g = precoder(h, PrecoderSpec(scheme="mmse", pu=1.0, sigma2=0.5))
    assert g.shape == (4, 6)


def test_normalize_columns_unit_power():
    rng = np.random.default_rng(9)
    g = _rand_c(rng, (5, 3))
    gn = normalize_columns(g)
    np.testing.assert_allclose(np.linalg.norm(gn, axis=0), 1.0, atol=1e-12)
    gz = np.zeros((4, 2))
    np.testing.assert_array_equal(normalize_columns(gz), gz)


def test_perfect_zf_rate_closed_form():
    rng = np.random.default_rng(10)
    h = _rand_c(rng, (4, 6))
    spec = PrecoderSpec(scheme="zf", pu=2.0, sigma2=0.5)
    g = precoder(h, spec)
    rep = rates_perfect(h, g, spec)
    np.testing.assert_allclose(rep.per_user_rates, np.log2(1.0 + 2.0 / 0.5), atol=1e-12)
    assert rep.sum_rate == pytest.approx(4 * np.log2(5.0))


def test_perfect_estimation_matches_perfect_rates():
    rng = np.random.default_rng(11)
    h = _rand_c(rng, (4, 6))
    for scheme in ("mrt", "mmse"):
        spec = PrecoderSpec(scheme=scheme, pu=1.0, sigma2=0.3)
        g = precoder(h, spec)
        est = rates(h, h, g, spec)
        perf = rates_perfect(h, g, spec)
        np.testing.assert_allclose(est.per_user_rates, perf.per_user_rates, atol=1e-12)
        np.testing.assert_allclose(est.eps, 0.0, atol=1e-10)


def test_rate_report_consistency():
    rng = np.random.default_rng(12)
    h = _rand_c(rng, (4, 6))
    h_hat = h + 0.05 * _rand_c(rng, (4, 6))
    spec = PrecoderSpec(scheme="mmse", pu=1.0, sigma2=0.2)
    rep = rates(h, h_hat, precoder(h_hat, spec), spec)
    assert np.all(rep.per_user_rates >= 0)
    assert rep.sum_rate == pytest.approx(float(np.sum(rep.per_user_rates)))
    assert np.all(rep.eps > 0)


def test_mmse_beats_others_on_average():
    # regularized inversion should dominate both extremes under one power budget
    rng = np.random.default_rng(13)
    sums = {"mrt": 0.0, "zf": 0.0, "mmse": 0.0}
    for _ in range(60):
        h = _rand_c(rng, (4, 6))
        for scheme in sums:
            spec = PrecoderSpec(scheme=scheme, pu=1.0, sigma2=0.5)
            g = precoder(h, spec)
            sums[scheme] += rates(h, h, g, spec).sum_rate
    assert sums["mmse"] >= sums["mrt"]
    assert sums["mmse"] >= sums["zf"]
