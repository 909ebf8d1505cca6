"""Synthetic two-class data with sparse mean shifts and Gaussian noise.

Class-1 rows are shifted by a nonnegative mean vector (the "truth"):
x_ij = mu_j * I_i + z_ij.  Noise is either i.i.d. standard normal or a
stationary first-order autoregression across the feature axis,

    z_i1 ~ N(0,1),   z_ij = rho * z_{i,j-1} + sqrt(1-rho^2) * eps_ij,

which has unit marginal variance and corr(z_j, z_k) = rho^|j-k|.

Randomness comes from counter-based Philox streams keyed by
(seed, stream id), so replicate-level parallelism cannot change results:
every quantity a config produces is a pure function of the config.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.signal import lfilter

from .data_model import DataError, LabeledMatrix

__all__ = [
    "SignalSpec",
    "NoiseSpec",
    "SimConfig",
    "rng_stream",
    "generate",
    "generate_section53",
]

# fixed substream ids; the noise stream never depends on placement, so
# grouped/randomized runs with one seed share identical noise (paired design)
_STREAM_LABELS = 1
_STREAM_MAGNITUDES = 2
_STREAM_PLACEMENT = 3
_STREAM_NOISE = 4


def rng_stream(seed: int, *path: int) -> np.random.Generator:
    """Independent deterministic generator keyed by (seed, *path)."""
    ss = np.random.SeedSequence([int(seed) & 0xFFFFFFFFFFFFFFFF, *[int(k) for k in path]])
    return np.random.Generator(np.random.Philox(ss))


def derive_seed(seed: int, *path: int) -> int:
    """Stable 64-bit child seed for nested experiment replicates."""
    ss = np.random.SeedSequence([int(seed) & 0xFFFFFFFFFFFFFFFF, *[int(k) for k in path]])
    return int(ss.generate_state(1, np.uint64)[0])


@dataclass(frozen=True)
class SignalSpec:
    """How many features carry a signal and how strong it is.

    kind="fixed" gives every signal feature magnitude ``value``;
    kind="uniform" draws magnitudes independently from [lo, hi].
    """

    count: int
    kind: str = "fixed"
    value: float = 0.0
    lo: float = 0.0
    hi: float = 0.0

    def __post_init__(self):
        if self.kind not in ("fixed", "uniform"):
            raise DataError(f"unknown signal kind {self.kind!r}")
        if self.count < 0:
            raise DataError("signal count must be >= 0")
        if self.kind == "fixed" and self.value < 0:
            raise DataError("signal magnitude must be >= 0")
        if self.kind == "uniform" and not (0 <= self.lo <= self.hi):
            raise DataError("uniform magnitude bounds need 0 <= lo <= hi")


@dataclass(frozen=True)
class NoiseSpec:
    """Noise law: "iid_standard_normal" or "serial" with |rho| < 1."""

    kind: str = "iid_standard_normal"
    rho: float = 0.0

    def __post_init__(self):
        if self.kind not in ("iid_standard_normal", "serial"):
            raise DataError(f"unknown noise kind {self.kind!r}")
        if not -1.0 < self.rho < 1.0:
            raise DataError(f"serial correlation must satisfy |rho| < 1, got {self.rho}")


@dataclass(frozen=True)
class SimConfig:
    n: int
    p: int
    pi: float
    signal: SignalSpec
    noise: NoiseSpec
    placement: str = "grouped_head"
    seed: int = 0

    def __post_init__(self):
        if self.n < 2:
            raise DataError("need n >= 2")
        if self.p < 1:
            raise DataError("need p >= 1")
        if not 0.0 < self.pi < 1.0:
            raise DataError(f"pi must be in (0, 1), got {self.pi}")
        if not 0 <= self.signal.count <= self.p:
            raise DataError("signal count must lie in [0, p]")
        if self.placement not in ("grouped_head", "randomized"):
            raise DataError(f"unknown placement {self.placement!r}")


def _noise_matrix(g: np.random.Generator, n: int, p: int, noise: NoiseSpec) -> np.ndarray:
    eps = g.standard_normal((n, p))
    if noise.kind == "iid_standard_normal" or noise.rho == 0.0:
        return eps
    w = eps * np.sqrt(1.0 - noise.rho * noise.rho)
    w[:, 0] = eps[:, 0]  # stationary start keeps every marginal N(0,1)
    return lfilter([1.0], [1.0, -noise.rho], w, axis=1)


def _labels(g: np.random.Generator, n: int, pi: float) -> np.ndarray:
    # redraw the (vanishingly rare) single-class outcome so the result is
    # always a valid two-class training set
    while True:
        lab = (g.random(n) < pi).astype(np.int64)
        if 0 < lab.sum() < n:
            return lab


def generate(config: SimConfig) -> tuple[LabeledMatrix, np.ndarray]:
    """Draw one dataset; returns (matrix, truth) with truth the p mean shifts."""
    n, p = config.n, config.p
    labels = _labels(rng_stream(config.seed, _STREAM_LABELS), n, config.pi)

    sig = config.signal
    if sig.kind == "fixed":
        mags = np.full(sig.count, float(sig.value))
    else:
        mags = rng_stream(config.seed, _STREAM_MAGNITUDES).uniform(
            sig.lo, sig.hi, size=sig.count
        )

    truth = np.zeros(p)
    if sig.count > 0:
        if config.placement == "grouped_head":
            truth[: sig.count] = mags
        else:
            pos = rng_stream(config.seed, _STREAM_PLACEMENT).permutation(p)[: sig.count]
            truth[pos] = mags

    z = _noise_matrix(rng_stream(config.seed, _STREAM_NOISE), n, p, config.noise)
    x = z + labels[:, None] * truth[None, :]
    return LabeledMatrix(x, labels), truth


def generate_section53(seed: int) -> tuple[LabeledMatrix, LabeledMatrix, np.ndarray]:
    """The large benchmark problem: n=100 (50 per class), p=10,000, a 10%
    fraction of features carrying uniform signals on (0, 0.35], i.i.d.
    standard normal noise, plus a 1,000-row test set from the same law.
    """
    n, p, n_test = 100, 10_000, 1_000
    p1 = p // 10
    g_mag = rng_stream(seed, _STREAM_MAGNITUDES)
    # 1 - U with U in [0,1) keeps every magnitude strictly positive
    mags = (1.0 - g_mag.random(p1)) * 0.35
    truth = np.zeros(p)
    pos = rng_stream(seed, _STREAM_PLACEMENT).permutation(p)[:p1]
    truth[pos] = mags

    labels_train = np.repeat(np.array([0, 1], dtype=np.int64), n // 2)
    labels_test = np.repeat(np.array([0, 1], dtype=np.int64), n_test // 2)
    g_noise = rng_stream(seed, _STREAM_NOISE)
    x_train = g_noise.standard_normal((n, p)) + labels_train[:, None] * truth[None, :]
    g_noise_test = rng_stream(seed, _STREAM_NOISE, 1)
    x_test = g_noise_test.standard_normal((n_test, p)) + labels_test[:, None] * truth[None, :]
    return (
        LabeledMatrix(x_train, labels_train),
        LabeledMatrix(x_test, labels_test),
        truth,
    )
