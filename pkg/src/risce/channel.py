"""Channel, pilot, and training-phase generation plus received-signal synthesis.

Uplink model: a K-antenna receiver observes M single-antenna transmitters
through an N-element reflecting surface.  For each of the P surface
configurations the K x T received block is

    Y_p = Hr @ diag(phi_p) @ Hs @ X + W_p,

with X the M x T pilot matrix (X @ X^H = I_M) and W_p white complex
Gaussian noise.  Right-multiplying by X^H removes the pilots exactly and
leaves the K x M x P observation tensor processed by the estimators.
"""

from dataclasses import dataclass, field

import numpy as np

from .exceptions import FeasibilityError
from .tensor3 import compose_tensor


@dataclass(frozen=True)
class SystemConfig:
    """Dimensions and operating point of one simulated system.

    ``k``: receive antennas, ``m``: users, ``n``: surface elements,
    ``t``: pilot slots per configuration, ``p``: training configurations.
    ``snr_ref`` selects the power reference for ``noise_var``:

    * ``"received"`` (default): SNR counts the per-entry received signal
      power, which is N under unit-modulus training phases and CN(0,1)
      channels, so sigma^2 = N * 10^(-snr_db/10).  Used by the estimation
      experiments.
    * ``"transmit"``: SNR = pu / sigma^2 with unit transmit power, so
      sigma^2 = 10^(-snr_db/10).  Used by the downlink rate experiments.

    ``noiseless`` overrides either to zero.
    """

    k: int
    m: int
    n: int
    t: int
    p: int
    snr_db: float = 20.0
    snr_ref: str = "received"
    noiseless: bool = False
    seed: int = 0
    trials: int = 200

    def __post_init__(self):
        for name in ("k", "m", "n", "t", "p"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be a positive integer")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if self.snr_ref not in ("received", "transmit"):
            raise ValueError(f"unknown snr_ref {self.snr_ref!r}")

    @property
    def noise_var(self):
        if self.noiseless:
            return 0.0
        scale = self.n if self.snr_ref == "received" else 1.0
        return scale * 10.0 ** (-self.snr_db / 10.0)


@dataclass(frozen=True)
class ChannelPair:
    """True channels: ``hr`` (K x N, surface-to-receiver) and ``hs`` (N x M)."""

    hr: np.ndarray
    hs: np.ndarray


@dataclass(frozen=True)
class TrainingSet:
    """Training-phase matrix ``phi`` (P x N, unit modulus) and pilots ``x`` (M x T)."""

    phi: np.ndarray
    x: np.ndarray


@dataclass(frozen=True)
class RxTensor:
    """Pilot-removed observations ``ztilde`` (K x M x P); raw blocks optional."""

    ztilde: np.ndarray
    raw_blocks: np.ndarray | None = None


@dataclass(frozen=True)
class FeasibilityReport:
    ok: bool
    violations: tuple = ()
    partition: tuple | None = None


def complex_gaussian(rng, shape):
    """I.i.d. circularly-symmetric CN(0, 1) samples."""
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)


def gen_channels(cfg, rng):
    """Draw an independent Rayleigh-fading channel pair, CN(0,1) entries."""
    hr = complex_gaussian(rng, (cfg.k, cfg.n))
    hs = complex_gaussian(rng, (cfg.n, cfg.m))
    return ChannelPair(hr=hr, hs=hs)


def pin_reference(ch):
    """Return the pair with the first column of ``hs`` set to ones.

    The trilinear model leaves a per-element diagonal scaling between the two
    channels undetermined; the simulated ensembles remove it at the source by
    pinning user 1's surface channel, the same convention under which the
    estimation lower bounds are derived.
    """
    hs = ch.hs.copy()
    hs[:, 0] = 1.0
    return ChannelPair(hr=ch.hr, hs=hs)


def dft_matrix(n):
    """N x N DFT matrix with unit-modulus entries (no 1/sqrt(N) scaling)."""
    idx = np.arange(n)
    return np.exp(-2j * np.pi * np.outer(idx, idx) / n)


def gen_training(cfg):
    """Build the training set: DFT-based phases and orthogonal pilots.

    ``phi`` is the first P rows of the N x N unit-modulus DFT matrix (rows
    mutually orthogonal; phi^H phi = N * I_N when P == N).  ``x`` is the
    first M rows of the unitary T x T DFT, so x @ x^H = I_M.
    """
    if cfg.p > cfg.n:
        raise FeasibilityError(f"need P <= N, got P={cfg.p}, N={cfg.n}")
    if cfg.t < cfg.m:
        raise FeasibilityError(f"need T >= M, got T={cfg.t}, M={cfg.m}")
    phi = dft_matrix(cfg.n)[: cfg.p]
    x = dft_matrix(cfg.t)[: cfg.m] / np.sqrt(cfg.t)
    return TrainingSet(phi=phi, x=x)


def synthesize_rx(ch, tr, cfg, rng, keep_raw=False):
    """Simulate the P received blocks and remove the pilots.

    Returns the K x M x P tensor with slice p equal to ``Y_p @ x^H``.  With
    orthonormal pilot rows the post-removal noise stays white with per-entry
    variance ``cfg.noise_var``.
    """
    k, m, n, t, p = cfg.k, cfg.m, cfg.n, cfg.t, cfg.p
    if ch.hr.shape != (k, n) or ch.hs.shape != (n, m):
        raise ValueError("channel dimensions do not match the configuration")
    if tr.phi.shape != (p, n) or tr.x.shape != (m, t):
        raise ValueError("training dimensions do not match the configuration")

    z = compose_tensor(ch.hr, ch.hs, tr.phi)
    sigma2 = cfg.noise_var
    if sigma2 == 0.0:
        raw = None
        if keep_raw:
            raw = np.einsum("kmp,mt->ktp", z, tr.x, optimize=True)
        return RxTensor(ztilde=z, raw_blocks=raw)

    w = np.sqrt(sigma2) * complex_gaussian(rng, (k, t, p))
    ztilde = z + np.einsum("ktp,mt->kmp", w, tr.x.conj(), optimize=True)
    raw = None
    if keep_raw:
        raw = np.einsum("kmp,mt->ktp", z, tr.x, optimize=True) + w
    return RxTensor(ztilde=ztilde, raw_blocks=raw)


def feasibility_check(cfg):
    """Diagnostic check of the identifiability requirements.

    Reports whether min(M, K) >= N and P <= N hold; on a violation the
    report carries a sub-surface partition suggestion.
    """
    violations = []
    if min(cfg.m, cfg.k) < cfg.n:
        violations.append(
            f"min(M, K) = {min(cfg.m, cfg.k)} < N = {cfg.n}"
        )
    if cfg.p > cfg.n:
        violations.append(f"P = {cfg.p} > N = {cfg.n}")
    if violations:
        plan = partition_plan(cfg.n, cfg.m, cfg.k)
        return FeasibilityReport(ok=False, violations=tuple(violations), partition=plan)
    return FeasibilityReport(ok=True)


def partition_plan(n, m, k):
    """Greedy contiguous split of element indices 0..n-1 into feasible groups.

    Each group has at most min(m, k) elements; the last group may be smaller.
    Returned as (start, stop) half-open index pairs.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    size = min(m, k)
    return tuple((s, min(s + size, n)) for s in range(0, n, size))
