"""Optimal beam-pair search and noisy beam-sweep measurements."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .channel import beam_amplitude
from .codebook import BeamPair, Codebook
from .errors import DimensionMismatch, EmptyCandidateSet, UnsupportedCodebook

_CHUNK = 2048


@dataclass
class NoiseModel:
    """Receiver noise power (mW) and the random stream that draws it.

    The stream is advanced by every noisy measurement, so results depend on
    the seed and on call order only.
    """

    noise_power: float
    rng: np.random.Generator

    def __post_init__(self):
        if self.noise_power < 0:
            raise ValueError("noise power must be nonnegative")

    @classmethod
    def from_seed(cls, noise_power: float, seed=None) -> "NoiseModel":
        return cls(float(noise_power), np.random.default_rng(seed))

    def draw(self, n: int) -> np.ndarray:
        """``n`` samples of CN(0, noise_power); one (re, im) normal pair each."""
        if self.noise_power == 0.0:
            return np.zeros(n, dtype=complex)
        z = self.rng.standard_normal((n, 2))
        return np.sqrt(self.noise_power / 2.0) * (z[:, 0] + 1j * z[:, 1])


@dataclass(frozen=True)
class SearchResult:
    pair: BeamPair
    gain: float


def _check(phi, V: Codebook, F: Codebook):
    phi = np.asarray(phi)
    if phi.ndim != 2 or phi.shape != (V.cfg.size, F.cfg.size):
        raise DimensionMismatch(f"Phi {phi.shape} vs codebooks {V.cfg.size}x{F.cfg.size}")
    return phi


def _argmax_pair(gains: np.ndarray) -> tuple[BeamPair, float]:
    # C-order argmax picks the first maximum: smallest (irs, bs) on ties
    k = int(np.argmax(gains))
    i, m = divmod(k, gains.shape[1])
    return BeamPair(i, m), float(gains[i, m])


def exhaustive_search(phi, V: Codebook, F: Codebook) -> SearchResult:
    """Evaluate every beam pair explicitly and return the best one."""
    phi = _check(phi, V, F)
    PF = phi @ F.matrix
    best_pair, best_gain = BeamPair(0, 0), -1.0
    for start in range(0, len(V), _CHUNK):
        amp = V.beams(start, start + _CHUNK).T @ PF
        pair, gain = _argmax_pair(amp.real ** 2 + amp.imag ** 2)
        if gain > best_gain:
            best_pair, best_gain = BeamPair(pair.irs_index + start, pair.bs_index), gain
    return SearchResult(best_pair, best_gain)


def all_pair_gains(phi, V: Codebook, F: Codebook) -> np.ndarray:
    """|V| x |F| table of beam gains via 2-D FFTs over both arrays."""
    if not (V.is_dft and F.is_dft):
        raise UnsupportedCodebook("FFT evaluation needs DFT codebooks")
    phi = _check(phi, V, F)
    # Phi @ F, computed as (F^T Phi^T)^T with an FFT over the BS grid
    PF = F.responses(phi.T).T
    amp = V.responses(PF)
    return amp.real ** 2 + amp.imag ** 2


def fft_search(phi, V: Codebook, F: Codebook) -> SearchResult:
    """Same result as :func:`exhaustive_search`, using the DFT structure."""
    gains = all_pair_gains(phi, V, F)
    pair, gain = _argmax_pair(gains)
    return SearchResult(pair, gain)


def noisy_measure(phi, v, f, P: float, noise: NoiseModel) -> float:
    """Received power ``|sqrt(P) v^T Phi f + z|^2`` for a unit pilot."""
    g = beam_amplitude(phi, v, f)
    if noise.noise_power == 0.0:
        return P * (g.real * g.real + g.imag * g.imag)
    y = np.sqrt(P) * g + noise.draw(1)[0]
    return float(y.real * y.real + y.imag * y.imag)


def noisy_powers(amplitudes: np.ndarray, P: float, noise: NoiseModel) -> np.ndarray:
    """Vectorised :func:`noisy_measure` over precomputed beam amplitudes.

    Consumes the random stream exactly as sequential single measurements do.
    """
    amplitudes = np.asarray(amplitudes, dtype=complex)
    if noise.noise_power == 0.0:
        return P * (amplitudes.real ** 2 + amplitudes.imag ** 2)
    y = np.sqrt(P) * amplitudes + noise.draw(amplitudes.shape[0])
    return y.real ** 2 + y.imag ** 2


def sweep_candidates(phi, candidates: Sequence[BeamPair], P: float, noise: NoiseModel,
                     V: Codebook, F: Codebook) -> BeamPair:
    """Measure each candidate once and keep the strongest (earliest on ties)."""
    if len(candidates) == 0:
        raise EmptyCandidateSet("no candidate beam pairs to sweep")
    phi = _check(phi, V, F)
    amps = np.array([beam_amplitude(phi, V.beam(c[0]), F.beam(c[1])) for c in candidates])
    powers = noisy_powers(amps, P, noise)
    return BeamPair(*candidates[int(np.argmax(powers))])
