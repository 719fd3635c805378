"""Estimation-error lower bounds for the alternating LS channel estimator.

The complex parameter vector stacks the K rows of Hr and the last M-1
columns of Hs (the first Hs column is pinned to all-ones to remove the
scaling ambiguity).  The information matrix is block-partitioned as

    Psi = [[Psi1, Psi2], [Psi2^H, Psi3]],

with K identical N x N diagonal blocks in Psi1, M-1 identical blocks in
Psi3, and cross blocks coupling each receiver row with each user column
through the post-pilot-removal noise correlation.  Bounds on each channel
come from the partitioned Hermitian inverse (Schur complements), converted
to normalized-MSE units by trace normalization.
"""

from dataclasses import dataclass

import numpy as np

from .channel import ChannelPair
from .exceptions import SingularityError
from .tensor3 import khatri_rao

_ONES_TOL = 1e-8


@dataclass(frozen=True)
class FimBlocks:
    psi1: np.ndarray
    psi2: np.ndarray
    psi3: np.ndarray

    def full(self):
        top = np.hstack([self.psi1, self.psi2])
        bot = np.hstack([self.psi2.conj().T, self.psi3])
        return np.vstack([top, bot])


@dataclass(frozen=True)
class CrbResult:
    crb_hr: np.ndarray
    crb_hs: np.ndarray
    nmse_bound_hr: float
    nmse_bound_hs: float


def noise_cross_cov(k, m, dim_k, dim_m, dim_p, sigma2):
    """Cross-covariance of one mode-1 noise column with one mode-2 column.

    Both columns are rearrangements of the same noise tensor, so the
    (PM x KP) result is sigma^2 times a 0/1 selection with ones exactly at
    row (m-1)P + p, column (p-1)K + k for p = 1..P (1-based ``k``, ``m``).
    """
    if not 1 <= k <= dim_k:
        raise ValueError(f"k must be in 1..{dim_k}, got {k}")
    if not 1 <= m <= dim_m:
        raise ValueError(f"m must be in 1..{dim_m}, got {m}")
    cov = np.zeros((dim_p * dim_m, dim_p * dim_k))
    for p in range(dim_p):
        cov[(m - 1) * dim_p + p, p * dim_k + (k - 1)] = sigma2
    return cov


def fix_scaling(ch):
    """Absorb the first hs column into hr so that hs[:, 0] is all ones.

    Leaves every composed slice Hr diag(phi_p) Hs unchanged.
    """
    lam = ch.hs[:, 0]
    if np.any(np.abs(lam) < 1e-12):
        raise ValueError("first column of hs has a near-zero entry")
    return ChannelPair(hr=ch.hr * lam[None, :], hs=ch.hs / lam[:, None])


def build_fim(ch, phi, sigma2):
    """Assemble the information-matrix blocks at the given channel pair.

    Requires hs[:, 0] == 1 (use :func:`fix_scaling` first) and sigma2 > 0.
    The cross blocks use the closed form of the selection-matrix sandwich:
    block (k, m) has entries conj(hs[n1, m]) * (phi^H phi)[n1, n2] * hr[k, n2]
    scaled by 1 / sigma^2 (equal to the explicit noise_cross_cov assembly).
    """
    if sigma2 <= 0:
        raise ValueError("sigma2 must be positive")
    hr, hs = ch.hr, ch.hs
    k_dim, n = hr.shape
    m_dim = hs.shape[1]
    if not np.allclose(hs[:, 0], 1.0, atol=_ONES_TOL):
        raise ValueError(
            "first column of hs must be all ones; renormalize with fix_scaling()"
        )

    a1 = khatri_rao(hs.T, phi)
    a2 = khatri_rao(phi, hr)
    block1 = a1.conj().T @ a1 / sigma2
    block3 = a2.conj().T @ a2 / sigma2
    psi1 = np.kron(np.eye(k_dim), block1)
    psi3 = np.kron(np.eye(m_dim - 1), block3)

    gram_phi = phi.conj().T @ phi
    # (K, N, M-1, N) -> (KN, (M-1)N)
    blocks = np.einsum(
        "nm,nj,kj->knmj", hs[:, 1:].conj(), gram_phi, hr, optimize=True
    )
    psi2 = blocks.reshape(k_dim * n, (m_dim - 1) * n) / sigma2
    return FimBlocks(psi1=psi1, psi2=psi2, psi3=psi3)


def crb_blocks(fim, ch):
    """Invert the partitioned information matrix and normalize to NMSE units.

    ``nmse_bound_hs`` excludes the pinned first column of hs from the
    normalization (those parameters are not estimated).
    """
    psi1, psi2, psi3 = fim.psi1, fim.psi2, fim.psi3
    try:
        schur_hr = psi1 - psi2 @ np.linalg.solve(psi3, psi2.conj().T)
        crb_hr = np.linalg.inv(schur_hr)
        schur_hs = psi3 - psi2.conj().T @ np.linalg.solve(psi1, psi2)
        crb_hs = np.linalg.inv(schur_hs)
    except np.linalg.LinAlgError as exc:
        conds = ", ".join(
            f"cond({name})={np.linalg.cond(mat):.3e}"
            for name, mat in (("psi1", psi1), ("psi3", psi3))
        )
        raise SingularityError(f"singular Schur complement ({conds})") from exc

    bound_hr = float(np.real(np.trace(crb_hr)) / np.linalg.norm(ch.hr) ** 2)
    bound_hs = float(np.real(np.trace(crb_hs)) / np.linalg.norm(ch.hs[:, 1:]) ** 2)
    return CrbResult(
        crb_hr=crb_hr, crb_hs=crb_hs,
        nmse_bound_hr=bound_hr, nmse_bound_hs=bound_hs,
    )
