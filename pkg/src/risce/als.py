"""Alternating least-squares estimation of the two cascaded channels.

Each sweep solves two exact conditional LS problems built from the mode-1
and mode-2 unfoldings of the observation tensor,

    Z1 = (Hs^T kr Phi) Hr^T      and      Z2 = (Phi kr Hr) Hs,

starting from a dominant-eigenvector initialization.  Because the training
phases are known, the factorization is identifiable up to a diagonal
scaling, which is removed afterwards against a reference first column.
"""

from dataclasses import dataclass, field

import numpy as np

from .exceptions import AmbiguityError, FeasibilityError, SingularityError
from .tensor3 import khatri_rao, unfold

_PINV_RCOND = 1e-12
_AMBIGUITY_FLOOR = 1e-12


@dataclass(frozen=True)
class StoppingRule:
    """Termination thresholds: relative-change tolerance and iteration cap."""

    kappa: float = 1e-5
    i_max: int = 20

    def __post_init__(self):
        if self.kappa <= 0:
            raise ValueError("kappa must be positive")
        if self.i_max < 1:
            raise ValueError("i_max must be >= 1")


@dataclass
class EstimateResult:
    """Output of one estimator run.

    ``change_trace`` holds per-iteration (hr_change, hs_change) relative
    values; ``converged`` is False when the iteration cap fired first.
    """

    hr_hat: np.ndarray
    hs_hat: np.ndarray
    iterations: int
    change_trace: list = field(default_factory=list)
    converged: bool = False


def _lstsq_via_svd(a, rhs, what):
    """Minimizer of ||rhs - a @ x||_F via SVD with a relative cutoff."""
    u, s, vh = np.linalg.svd(a, full_matrices=False)
    if s[0] == 0 or s[-1] <= _PINV_RCOND * s[0]:
        raise SingularityError(
            f"rank-deficient measurement matrix in {what} "
            f"(smallest singular value {s[-1]:.3e})",
            smallest_sv=s[-1],
        )
    return vh.conj().T @ ((u.conj().T @ rhs) / s[:, None])


def _fix_eig_phase(vecs):
    """Make the largest-magnitude entry of each column real-positive."""
    idx = np.argmax(np.abs(vecs), axis=0)
    pivots = vecs[idx, np.arange(vecs.shape[1])]
    phases = pivots / np.abs(pivots)
    return vecs / phases[None, :]


def _dominant_eigvecs(gram, n):
    """Top-n eigenvectors of a Hermitian PSD matrix, descending eigenvalue."""
    w, v = np.linalg.eigh(gram)
    order = np.argsort(w)[::-1][:n]
    return _fix_eig_phase(v[:, order])


def init_estimates(ztilde, n):
    """Eigenvector initialization from the Gram matrices of the unfoldings.

    Rows of the N x M initial ``hs`` are the conjugate-transposed dominant
    eigenvectors of (Z2)^H Z2, so they span the true row space of Hs on
    noiseless data; columns of the K x N initial ``hr`` are conjugated
    dominant eigenvectors of (Z1)^H Z1 and span the true column space of Hr.
    """
    k, m, _ = ztilde.shape
    if n > min(m, k):
        raise FeasibilityError(
            f"initialization needs min(M, K) >= N, got M={m}, K={k}, N={n}"
        )
    z1 = unfold(ztilde, 1)
    z2 = unfold(ztilde, 2)
    v2 = _dominant_eigvecs(z2.conj().T @ z2, n)   # M x N
    v1 = _dominant_eigvecs(z1.conj().T @ z1, n)   # K x N
    hs0 = v2.conj().T
    hr0 = v1.conj()
    return hr0, hs0


def als_step_hr(z1, hs_prev, phi):
    """Exact LS update of Hr from the mode-1 unfolding (PM x K)."""
    a1 = khatri_rao(hs_prev.T, phi)
    return _lstsq_via_svd(a1, z1, "hr update").T


def als_step_hs(z2, hr_cur, phi):
    """Exact LS update of Hs from the mode-2 unfolding (KP x M)."""
    a2 = khatri_rao(phi, hr_cur)
    return _lstsq_via_svd(a2, z2, "hs update")


def _rel_change(cur, prev):
    denom = np.linalg.norm(cur) ** 2
    if denom == 0:
        return np.inf
    return np.linalg.norm(cur - prev) ** 2 / denom


def als_estimate(ztilde, phi, stop=StoppingRule()):
    """Alternate the two conditional LS updates until both channels settle.

    Termination: both squared relative changes fall below ``stop.kappa``,
    or ``stop.i_max`` sweeps are reached (``converged`` is then False).
    """
    n = phi.shape[1]
    z1 = unfold(ztilde, 1)
    z2 = unfold(ztilde, 2)
    hr, hs = init_estimates(ztilde, n)

    result = EstimateResult(hr_hat=hr, hs_hat=hs, iterations=0)
    for i in range(1, stop.i_max + 1):
        try:
            hr_next = als_step_hr(z1, hs, phi)
            hs_next = als_step_hs(z2, hr_next, phi)
        except SingularityError as exc:
            raise SingularityError(
                f"iteration {i}: {exc}", smallest_sv=exc.smallest_sv
            ) from exc
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


def remove_ambiguity(hr_hat, hs_hat, reference):
    """Remove the diagonal scaling ambiguity against a reference channel pair.

    The per-element scale is reference.hs[n, 0] / hs_hat[n, 0]; the composed
    product Hr diag(phi_p) Hs is unchanged for every p.
    """
    first = hs_hat[:, 0]
    if np.any(np.abs(first) < _AMBIGUITY_FLOOR):
        raise AmbiguityError(
            "near-zero entry in the first column of the estimated hs; "
            "cannot resolve the scaling ambiguity"
        )
    lam = reference.hs[:, 0] / first
    return hr_hat / lam[None, :], lam[:, None] * hs_hat


def normalize_first_column(hr_hat, hs_hat):
    """Truth-free ambiguity convention: scale so the first hs column is all ones."""
    first = hs_hat[:, 0]
    if np.any(np.abs(first) < _AMBIGUITY_FLOOR):
        raise AmbiguityError(
            "near-zero entry in the first column of the estimated hs"
        )
    return hr_hat * first[None, :], hs_hat / first[:, None]


def nmse(h_true, h_hat):
    """Squared Frobenius error normalized by the squared norm of the truth."""
    if h_true.shape != h_hat.shape:
        raise ValueError(f"shape mismatch: {h_true.shape} vs {h_hat.shape}")
    denom = np.linalg.norm(h_true) ** 2
    if denom == 0:
        raise ValueError("reference matrix has zero norm")
    return float(np.linalg.norm(h_true - h_hat) ** 2 / denom)


def genie_ls(ztilde, phi, known, truth):
    """One-shot LS benchmark given perfect knowledge of one channel.

    ``known='hs'`` estimates hr from the mode-1 system with the true hs;
    ``known='hr'`` estimates hs from the mode-2 system with the true hr.
    """
    if known == "hs":
        hr_hat = als_step_hr(unfold(ztilde, 1), truth.hs, phi)
        hs_hat = truth.hs.copy()
    elif known == "hr":
        hr_hat = truth.hr.copy()
        hs_hat = als_step_hs(unfold(ztilde, 2), truth.hr, phi)
    else:
        raise ValueError(f"known must be 'hr' or 'hs', got {known!r}")
    return EstimateResult(
        hr_hat=hr_hat, hs_hat=hs_hat, iterations=1, change_trace=[], converged=True
    )
