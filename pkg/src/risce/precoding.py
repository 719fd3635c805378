"""Downlink phase optimization, linear precoders, and achievable rates.

The reflection phases are chosen by a fixed-point iteration maximizing
v^H C v over unit-modulus v, where C sums diag(h_k^r) Hs Gram matrices over
the receive antennas.  Precoders (matched filter, interference nulling,
regularized inverse) are then built from the effective K x M channel, and
per-user rates are evaluated both with estimated channels (including the
estimation-error interference power) and with perfect channel knowledge.
"""

import warnings
from dataclasses import dataclass

import numpy as np

_UNIT_MOD_TOL = 1e-12


@dataclass(frozen=True)
class PhaseVector:
    """Unit-modulus reflection coefficients (length N)."""

    v: np.ndarray

    def __post_init__(self):
        if np.any(np.abs(np.abs(self.v) - 1.0) > 1e-9):
            raise ValueError("phase vector entries must have unit modulus")


@dataclass(frozen=True)
class PrecoderSpec:
    """Precoding scheme ('mrt' | 'zf' | 'mmse'), transmit power, noise variance."""

    scheme: str
    pu: float = 1.0
    sigma2: float = 1.0

    def __post_init__(self):
        if self.scheme not in ("mrt", "zf", "mmse"):
            raise ValueError(f"unknown scheme {self.scheme!r}")
        if self.pu <= 0 or self.sigma2 <= 0:
            raise ValueError("pu and sigma2 must be positive")


@dataclass(frozen=True)
class RateReport:
    per_user_rates: np.ndarray
    sum_rate: float
    eps: np.ndarray


def _unt(a):
    """Project each entry onto the unit circle; zeros fall back to 1."""
    mags = np.abs(a)
    zero = mags < _UNIT_MOD_TOL
    if np.any(zero):
        warnings.warn("zero entry reached the unit projection; set to 1")
        a = np.where(zero, 1.0, a)
        mags = np.where(zero, 1.0, mags)
    return a / mags, bool(np.any(zero))


def optimize_phase(hr_hat, hs_hat, kappa=1e-5, t_max=200):
    """Fixed-point search for the reflection phases.

    Iterates v <- unt(C v) from the all-ones start until the l1 objective
    gain drops below ``kappa`` or ``t_max`` steps.  Returns the N x N
    diagonal phase matrix (conjugate of the converged vector) and the
    vector itself.
    """
    k_dim, n = hr_hat.shape
    c_tilde = np.zeros((n, n), dtype=complex)
    for k in range(k_dim):
        c_k = np.diag(hr_hat[k, :]) @ hs_hat
        c_tilde += c_k @ c_k.conj().T

    v = np.ones(n, dtype=complex)
    obj = np.sum(np.abs(c_tilde @ v))
    for _ in range(t_max):
        w = c_tilde @ v
        v, _ = _unt(w)
        obj_next = np.sum(np.abs(c_tilde @ v))
        gain = obj_next - obj
        obj = obj_next
        if gain <= kappa:
            break
    phi = np.diag(v.conj())
    return phi, PhaseVector(v=v)


def effective_channel(hr, hs, phi):
    """Composed K x M channel Hr @ Phi @ Hs for a diagonal N x N Phi."""
    n = hr.shape[1]
    if phi.shape != (n, n):
        raise ValueError(f"phi must be {n}x{n}, got {phi.shape}")
    return hr @ phi @ hs


def error_power_eps(h_hat, h_true, pu):
    """Per-user interference power caused by the channel estimation error.

    With E = H_hat - H_true, user k accumulates pu * sum_i |h_hat_k^H e_i|^2
    over the K conjugated rows e_i of E, i.e. the squared row norms of
    H_hat @ E^H.
    """
    if h_hat.shape != h_true.shape:
        raise ValueError(f"shape mismatch: {h_hat.shape} vs {h_true.shape}")
    err = h_hat - h_true
    cross = h_hat @ err.conj().T   # K x K
    return pu * np.sum(np.abs(cross) ** 2, axis=1)


def precoder(h_hat, spec):
    """Build the M x K precoding matrix for the requested scheme."""
    k_dim, m_dim = h_hat.shape
    if spec.scheme == "mrt":
        return h_hat.conj().T
    if spec.scheme == "zf":
        if k_dim > m_dim:
            raise ValueError(
                f"interference nulling needs K <= M, got K={k_dim}, M={m_dim}"
            )
        gram = h_hat @ h_hat.conj().T
        if np.linalg.cond(gram) > 1e12:
            raise ValueError("channel Gram matrix is numerically singular")
        return h_hat.conj().T @ np.linalg.inv(gram)
    # mmse
    reg = spec.sigma2 / spec.pu
    if k_dim <= m_dim:
        return h_hat.conj().T @ np.linalg.inv(
            h_hat @ h_hat.conj().T + reg * np.eye(k_dim)
        )
    return np.linalg.inv(
        h_hat.conj().T @ h_hat + reg * np.eye(m_dim)
    ) @ h_hat.conj().T


def normalize_columns(g):
    """Scale each precoding vector to unit power (zero columns untouched)."""
    norms = np.linalg.norm(g, axis=0)
    safe = np.where(norms < _UNIT_MOD_TOL, 1.0, norms)
    return g / safe[None, :]


def _sinr_rates(h_true, g, pu, sigma2):
    """Per-user log rates from the realized beamforming gains.

    Entry (k, i) of h_true @ g is h_k^H g_i with h_k the k-th column of
    the channel's conjugate transpose; the diagonal carries the intended
    signal, the off-diagonal terms the inter-user interference.
    """
    hg = h_true @ g
    diag2 = np.abs(np.diag(hg)) ** 2
    signal = pu * diag2
    interf = pu * (np.sum(np.abs(hg) ** 2, axis=1) - diag2)
    return np.log2(1.0 + signal / (interf + sigma2))


def rates(h_true, h_hat, g, spec):
    """Rates achieved on the true channel by precoders built from estimates.

    Precoding vectors are normalized to unit per-user power so the schemes
    compete under one transmit-power budget; estimation error then shows up
    as misdirected signal and residual interference.  The report also
    carries the per-user error interference power for diagnostics.
    """
    pu, sigma2 = spec.pu, spec.sigma2
    eps = error_power_eps(h_hat, h_true, pu)
    per_user = _sinr_rates(h_true, normalize_columns(g), pu, sigma2)
    return RateReport(
        per_user_rates=per_user, sum_rate=float(np.sum(per_user)), eps=eps
    )


def rates_perfect(h_true, g_true, spec):
    """Per-user rates with perfect channel knowledge.

    Interference nulling admits the closed form log2(1 + pu / sigma^2) per
    user (unit effective gain, zero interference); the other schemes reuse
    the normalized SINR evaluation with exact channel knowledge.
    """
    pu, sigma2 = spec.pu, spec.sigma2
    k_dim = h_true.shape[0]
    if spec.scheme == "zf":
        per_user = np.full(k_dim, np.log2(1.0 + pu / sigma2))
    else:
        per_user = _sinr_rates(h_true, normalize_columns(g_true), pu, sigma2)
    return RateReport(
        per_user_rates=per_user,
        sum_rate=float(np.sum(per_user)),
        eps=np.zeros(k_dim),
    )
