"""Haar-random reference mixtures and the effective environment size ``m``.

A mixture ``R = (1/m) sum_n |r_n><r_n|`` of ``m`` Haar-random register states
mimics a register coupled to an ``m``-dimensional environment.  Matching
the negativity witness of ``R`` to that of a dynamical state gives ``m``.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import entanglement as ent
from .lattice import check_size

MAX_QUBITS = 14
M_CAP_LOG2 = 14
MIN_TRIALS = 8
CHUNK = 1024


def _rng(seed) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed))


def haar_state(qubits: int, seed=None, rng: np.random.Generator | None = None) -> np.ndarray:
    """Normalized complex Gaussian vector on ``qubits`` qubits."""
    check_size(qubits, MAX_QUBITS)
    rng = rng if rng is not None else _rng(seed)
    d = 1 << qubits
    v = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    return v / np.linalg.norm(v)


@dataclass
class RandomMixture:
    """Equal-weight mixture of ``m`` Haar-random pure states."""

    qubits: int
    m: int
    seed: object
    rho: np.ndarray = field(repr=False)

    @classmethod
    def draw(cls, qubits: int, m: int, seed) -> "RandomMixture":
        check_size(qubits, MAX_QUBITS)
        if m < 1:
            raise ValueError("m must be >= 1")
        rng = _rng(seed)
        d = 1 << qubits
        rho = np.zeros((d, d), dtype=np.complex128)
        done = 0
        # columns in chunks keep memory at d x CHUNK for large m
        while done < m:
            c = min(CHUNK, m - done)
            v = rng.standard_normal((d, c)) + 1j * rng.standard_normal((d, c))
            v /= np.linalg.norm(v, axis=0)
            rho += v @ v.conj().T
            done += c
        rho /= m
        rho = 0.5 * (rho + rho.conj().T)
        return cls(qubits, m, seed, rho)


def _split(qubits: int, split):
    return ent.Partition(ent.CLUSTER_SPLIT) if split is None else split


def trial_seed(seed: int, trial: int, m: int) -> tuple[int, int, int]:
    return (int(seed), int(trial), int(m))


def mixture_spectra(qubits: int, m: int, split=None, trials: int = MIN_TRIALS,
                    seed: int = 0) -> list[np.ndarray]:
    """Negativity spectra of ``trials`` independent mixtures."""
    split = _split(qubits, split)
    out = []
    for t in range(trials):
        mix = RandomMixture.draw(qubits, m, trial_seed(seed, t, m))
        out.append(ent.negativity_report(mix.rho, split).eigenvalues)
    return out


def lambda_of_mixture(qubits: int, m: int, split=None, trials: int = MIN_TRIALS,
                      seed: int = 0) -> tuple[float, float]:
    """Sample mean and standard error of the witness ``lambda`` over mixtures."""
    if trials < MIN_TRIALS:
        raise ValueError(f"need at least {MIN_TRIALS} trials, got {trials}")
    lam = np.array([s[0] for s in mixture_spectra(qubits, m, split, trials, seed)])
    return float(lam.mean()), float(lam.std(ddof=1) / np.sqrt(trials))


@dataclass
class LambdaCurve:
    """Mean witness on the grid ``m = 2^0 .. 2^cap``."""

    qubits: int
    log2_m: np.ndarray
    mean: np.ndarray
    stderr: np.ndarray

    @property
    def cap(self) -> int:
        return int(2 ** self.log2_m[-1])


def lambda_curve(qubits: int, split=None, trials: int = MIN_TRIALS, seed: int = 0,
                 cap_log2: int = M_CAP_LOG2) -> LambdaCurve:
    ks = np.arange(cap_log2 + 1)
    stats = [lambda_of_mixture(qubits, 1 << int(k), split, trials, seed) for k in ks]
    return LambdaCurve(qubits, ks.astype(float), np.array([s[0] for s in stats]),
                       np.array([s[1] for s in stats]))


@dataclass
class MEstimate:
    """Real-valued ``m`` with the bracketing grid points; ``at_cap`` means ``m >= m_high``."""

    lambda_target: float
    m: float
    m_low: float
    m_high: float
    at_cap: bool = False
    clipped: bool = False


def estimate_m(lambda_target: float, curve: LambdaCurve, clip_low: bool = False) -> MEstimate:
    """Invert the monotone map ``m -> mean lambda(m)``.

    Bisection over the integer exponents of the grid finds the bracketing
    pair; ``log2 m`` is then linearly interpolated inside it.
    """
    # enforce monotonicity against Monte Carlo noise
    mono = np.maximum.accumulate(curve.mean)
    ks = curve.log2_m
    floor = curve.mean[0] - 2 * curve.stderr[0]
    if lambda_target > 0:
        raise ValueError(f"target {lambda_target} above the PPT limit 0")
    if lambda_target < floor:
        if not clip_low:
            raise ValueError(f"target {lambda_target:.4g} below the m=1 range {floor:.4g}")
        return MEstimate(lambda_target, 1.0, 1.0, 1.0, clipped=True)
    if lambda_target <= mono[0]:
        return MEstimate(lambda_target, 1.0, 1.0, 2.0 ** ks[min(1, len(ks) - 1)])
    if lambda_target >= mono[-1]:
        cap = 2.0 ** ks[-1]
        return MEstimate(lambda_target, cap, cap, cap, at_cap=True)
    lo, hi = 0, len(ks) - 1
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if mono[mid] <= lambda_target:
            lo = mid
        else:
            hi = mid
    span = mono[hi] - mono[lo]
    frac = 0.0 if span == 0 else (lambda_target - mono[lo]) / span
    k = ks[lo] + frac * (ks[hi] - ks[lo])
    return MEstimate(lambda_target, float(2.0**k), float(2.0 ** ks[lo]), float(2.0 ** ks[hi]))


def skewness(x: np.ndarray) -> float:
    x = np.asarray(x, dtype=float)
    c = x - x.mean()
    return float(np.mean(c**3) / np.mean(c**2) ** 1.5)
