"""Dense complex three-way tensor machinery.

Implements the column-wise Kronecker (Khatri-Rao) product, trilinear tensor
composition from three factor matrices, the three mode unfoldings and their
inverses, and a combinatorial k-rank check for small matrices.

Index conventions (fixed throughout the library): for ``khatri_rao(A, B)``
with ``A`` of size I x R and ``B`` of size J x R, row ``(i, j)`` of the
result lives at index ``i * J + j`` (0-based).  For a K x M x P tensor the
unfoldings are

* mode-1: PM x K, row index ``m * P + p``,
* mode-2: KP x M, row index ``p * K + k``,
* mode-3: MK x P, row index ``k * M + m``.
"""

from itertools import combinations

import numpy as np

_KRANK_MAX_COLS = 8
_KRANK_REL_TOL = 1e-10


def _check_matrix(a, name):
    a = np.asarray(a)
    if a.ndim != 2:
        raise ValueError(f"{name} must be a 2-D array, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError(f"{name} contains non-finite entries")
    return a.astype(complex, copy=False)


def khatri_rao(a, b):
    """Column-wise Kronecker product of ``a`` (I x R) and ``b`` (J x R).

    Column r of the result is ``kron(a[:, r], b[:, r])``; the result has
    shape (I*J, R).
    """
    a = _check_matrix(a, "a")
    b = _check_matrix(b, "b")
    if a.shape[1] != b.shape[1]:
        raise ValueError(
            f"column count mismatch: {a.shape[1]} vs {b.shape[1]}"
        )
    i, r = a.shape
    j = b.shape[0]
    return (a[:, None, :] * b[None, :, :]).reshape(i * j, r)


def compose_tensor(hr, hs, phi):
    """Trilinear composition: entry (k, m, p) = sum_n hr[k,n] hs[n,m] phi[p,n]."""
    hr = _check_matrix(hr, "hr")
    hs = _check_matrix(hs, "hs")
    phi = _check_matrix(phi, "phi")
    n = hr.shape[1]
    if hs.shape[0] != n or phi.shape[1] != n:
        raise ValueError(
            "inner dimension mismatch: "
            f"hr is {hr.shape}, hs is {hs.shape}, phi is {phi.shape}"
        )
    return np.einsum("kn,nm,pn->kmp", hr, hs, phi, optimize=True)


def unfold(z, mode):
    """Unfold a K x M x P tensor into one of its three matrix forms.

    Mode 1 gives a PM x K matrix, mode 2 a KP x M matrix, and mode 3 an
    MK x P matrix; see the module docstring for the row-index conventions.
    """
    z = np.asarray(z)
    if z.ndim != 3:
        raise ValueError(f"expected a 3-D array, got shape {z.shape}")
    if mode == 1:
        return np.transpose(z, (1, 2, 0)).reshape(-1, z.shape[0])
    if mode == 2:
        return np.transpose(z, (2, 0, 1)).reshape(-1, z.shape[1])
    if mode == 3:
        return z.reshape(-1, z.shape[2])
    raise ValueError(f"mode must be 1, 2 or 3, got {mode!r}")


def refold(mat, mode, shape):
    """Inverse of :func:`unfold`: rebuild the (K, M, P) tensor."""
    k, m, p = shape
    mat = np.asarray(mat)
    if mode == 1:
        return np.transpose(mat.reshape(m, p, k), (2, 0, 1))
    if mode == 2:
        return np.transpose(mat.reshape(p, k, m), (1, 2, 0))
    if mode == 3:
        return mat.reshape(k, m, p)
    raise ValueError(f"mode must be 1, 2 or 3, got {mode!r}")


def kruskal_rank(a, rel_tol=_KRANK_REL_TOL):
    """Largest k such that every k-column subset of ``a`` is independent.

    Numerical rank uses the relative singular-value threshold
    ``rel_tol * s_max``, with ``s_max`` the largest singular value of the
    full matrix.  Only matrices with at most 8 columns are supported (the
    check enumerates all column subsets).
    """
    a = _check_matrix(a, "a")
    r = a.shape[1]
    if r > _KRANK_MAX_COLS:
        raise ValueError(
            f"kruskal_rank supports at most {_KRANK_MAX_COLS} columns, got {r}"
        )
    s_max = np.linalg.norm(a, 2) if a.size else 0.0
    if s_max == 0.0:
        return 0
    thresh = rel_tol * s_max
    # subsets wider than the row count are dependent by counting
    k_cap = min(r, a.shape[0])
    for k in range(1, k_cap + 1):
        for cols in combinations(range(r), k):
            s = np.linalg.svd(a[:, cols], compute_uv=False)
            if s[-1] <= thresh:
                return k - 1
    return k_cap
