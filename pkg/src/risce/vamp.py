"""Vector approximate message passing column solver and channel estimator.

Each channel column satisfies a linear model y = A x + w with known A and
white noise.  The column solver alternates a Gaussian-prior linear denoiser
with an SVD-form LMMSE step exchanging extrinsic means/precisions, and is
embedded in the same alternating outer loop as the LS estimator: the SVD of
each measurement matrix is computed once per outer sweep and shared by all
columns.
"""

from dataclasses import dataclass

import numpy as np

from .als import EstimateResult, StoppingRule, _rel_change, init_estimates
from .exceptions import FeasibilityError, NumericalFailure
from .tensor3 import khatri_rao, unfold


@dataclass(frozen=True)
class GaussianPrior:
    """Independent complex Gaussian prior: per-element mean and variance."""

    mean: np.ndarray
    var: np.ndarray

    def __post_init__(self):
        if np.any(np.asarray(self.var) <= 0):
            raise ValueError("prior variances must be positive")


def _vamp_svd(y, u, s, vh, prior, sigma2, stop):
    """Run the two-part iteration given the precomputed economy SVD of A."""
    n = vh.shape[1]
    rank = int(np.count_nonzero(s > s[0] * 1e-12)) if s.size else 0
    s_full = np.zeros(n)
    s_full[: min(n, s.size)] = s[: min(n, s.size)]

    y_tilde = (s.conj() * (u.conj().T @ y)) / sigma2   # length of economy rank
    y_tilde_full = np.zeros(n, dtype=complex)
    y_tilde_full[: y_tilde.size] = y_tilde

    r1 = prior.mean.astype(complex).copy()
    gamma1 = 1.0 / float(np.mean(prior.var))
    h1 = r1
    h2 = r1
    d = np.full(n, np.mean(prior.var))

    for p in range(1, stop.i_max + 1):
        # Denoising part: linear MMSE shrinkage under the Gaussian prior.
        eta = 1.0 / prior.var + gamma1
        h1 = (prior.mean / prior.var + gamma1 * r1) / eta
        gamma2 = float(np.mean(eta)) - gamma1
        if gamma2 <= 0:
            raise NumericalFailure(
                "extrinsic precision collapsed in the denoising part", iteration=p
            )
        r2 = (h1 * eta - r1 * gamma1) / gamma2

        # LMMSE part in the SVD basis.
        d = 1.0 / (s_full**2 / sigma2 + gamma2)
        h2 = vh.conj().T @ (d[: vh.shape[0]] * (y_tilde_full[: vh.shape[0]] + gamma2 * (vh @ r2)))
        denom_rank = max(rank, 1)
        alpha = gamma2 * np.sum(d) / denom_rank
        if not 0.0 < alpha < 1.0:
            raise NumericalFailure(
                f"divergence scalar left (0, 1): alpha={alpha:.3e}", iteration=p
            )
        r1_next = (h2 - alpha * r2) / (1.0 - alpha)
        gamma1_next = gamma2 * (1.0 - alpha) / alpha
        if gamma1_next <= 0:
            raise NumericalFailure(
                "extrinsic precision collapsed in the LMMSE part", iteration=p
            )

        delta = np.linalg.norm(r1_next - r1) ** 2
        scale = np.linalg.norm(r1) ** 2
        r1 = r1_next
        gamma1 = gamma1_next
        if scale > 0 and delta < stop.kappa * scale:
            break

    post_var = (np.abs(vh.conj().T) ** 2) @ d[: vh.shape[0]]
    return h2, post_var


def vamp_column(y, a, prior, sigma2, stop=StoppingRule()):
    """Posterior mean/variance of x in y = A x + w under a Gaussian prior."""
    if sigma2 <= 0:
        raise ValueError("sigma2 must be positive")
    a = np.asarray(a, dtype=complex)
    y = np.asarray(y, dtype=complex)
    if a.shape[0] < a.shape[1]:
        raise ValueError(
            f"measurement matrix must have at least as many rows as columns, got {a.shape}"
        )
    u, s, vh = np.linalg.svd(a, full_matrices=False)
    return _vamp_svd(y, u, s, vh, prior, sigma2, stop)


def vamp_estimate(ztilde, phi, sigma2, prior=None, stop=StoppingRule()):
    """Alternating channel estimation with the column solver in place of LS.

    Outer termination matches the LS estimator: both squared relative
    channel changes below ``stop.kappa`` or ``stop.i_max`` sweeps.
    """
    k, m, _ = ztilde.shape
    n = phi.shape[1]
    if n > min(m, k):
        raise FeasibilityError(
            f"need min(M, K) >= N, got M={m}, K={k}, N={n}"
        )
    if prior is None:
        prior = GaussianPrior(mean=np.zeros(n, dtype=complex), var=np.ones(n))

    z1 = unfold(ztilde, 1)
    z2 = unfold(ztilde, 2)
    hr, hs = init_estimates(ztilde, n)

    result = EstimateResult(hr_hat=hr, hs_hat=hs, iterations=0)
    for i in range(1, stop.i_max + 1):
        a1 = khatri_rao(hs.T, phi)
        u, s, vh = np.linalg.svd(a1, full_matrices=False)
        hr_next = np.empty_like(hr)
        for c in range(k):
            mean, _ = _vamp_svd(z1[:, c], u, s, vh, prior, sigma2, stop)
            hr_next[c, :] = mean

        a2 = khatri_rao(phi, hr_next)
        u, s, vh = np.linalg.svd(a2, full_matrices=False)
        hs_next = np.empty_like(hs)
        for c in range(m):
            mean, _ = _vamp_svd(z2[:, c], u, s, vh, prior, sigma2, stop)
            hs_next[:, c] = mean

        c_r = _rel_change(hr_next, hr)
        c_s = _rel_change(hs_next, hs)
        hr, hs = hr_next, hs_next
        result.change_trace.append((c_r, c_s))
        result.iterations = i
        if c_r <= stop.kappa and c_s <= stop.kappa:
            result.converged = True
            break
    result.hr_hat = hr
    result.hs_hat = hs
    return result
