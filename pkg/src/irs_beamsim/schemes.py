"""Beam-selection schemes and effective-rate accounting.

Every scheme returns a :class:`SchemeOutcome` whose rate is evaluated on the
true cascaded channel, discounted by the training symbols the scheme spent
inside the coherence block.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .beamsearch import NoiseModel, fft_search, noisy_powers, sweep_candidates
from .bim import BIMDatabase, distinct_pairs, knn, vote
from .channel import UPAConfig, beam_gain, upa_response
from .codebook import BeamPair, Codebook
from .env_model import SiteLayout, array_frame, local_angles, _vec
from .errors import DegenerateGeometry, OverheadExceedsBlock

PERFECT_CSI = "perfect_csi"
BIM_TRAINING_FREE = "bim_training_free"
BIM_LIGHT_TRAINING = "bim_light_training"
LOCATION_BASED = "location_based"
TWO_TIME_SCALE = "two_time_scale"
FULL_TRAINING_BOUND = "full_training_bound"

SCHEMES = (PERFECT_CSI, BIM_TRAINING_FREE, BIM_LIGHT_TRAINING, LOCATION_BASED, TWO_TIME_SCALE)


def dbm_to_mw(dbm: float) -> float:
    return 10.0 ** (dbm / 10.0)


@dataclass(frozen=True)
class LinkBudget:
    transmit_power: float  # mW
    noise_power: float  # mW

    def __post_init__(self):
        if not (self.transmit_power > 0 and self.noise_power > 0):
            raise ValueError("transmit and noise power must be positive")

    @property
    def transmit_snr(self) -> float:
        return self.transmit_power / self.noise_power

    @classmethod
    def from_dbm(cls, power_dbm: float, noise_power_mw: float) -> "LinkBudget":
        return cls(dbm_to_mw(power_dbm), noise_power_mw)


@dataclass(frozen=True)
class CoherenceBlock:
    S: int
    T: int = 1

    def __post_init__(self):
        if self.S < 1 or self.T < 1:
            raise ValueError("S and T must be at least 1")


@dataclass(frozen=True)
class SchemeOutcome:
    pair: BeamPair
    training_symbols: int
    rate: float
    gain: float


def overhead_prefactor(S: int, training_symbols: int) -> float:
    if not 0 <= training_symbols <= S:
        raise OverheadExceedsBlock(f"{training_symbols} training symbols in a block of {S}")
    return (S - training_symbols) / S


def effective_rate(gain: float, budget: LinkBudget, S: int, training_symbols: int) -> float:
    """((S - S_tr) / S) * log2(1 + snr * gain)."""
    return overhead_prefactor(S, training_symbols) * math.log2(1.0 + budget.transmit_snr * gain)


def outcome(phi, pair: BeamPair, V: Codebook, F: Codebook, budget: LinkBudget, S: int,
            training_symbols: int, gain: float | None = None) -> SchemeOutcome:
    if gain is None:
        gain = beam_gain(phi, V.beam(pair[0]), F.beam(pair[1]))
    pair = BeamPair(int(pair[0]), int(pair[1]))
    return SchemeOutcome(pair, training_symbols, effective_rate(gain, budget, S, training_symbols), gain)


def select_perfect_csi(phi, V: Codebook, F: Codebook, budget: LinkBudget, S: int) -> SchemeOutcome:
    res = fft_search(phi, V, F)
    return outcome(phi, res.pair, V, F, budget, S, 0)


def select_bim_training_free(db: BIMDatabase, q, K: int, phi, V: Codebook, F: Codebook,
                             budget: LinkBudget, S: int) -> SchemeOutcome:
    """Majority vote over the K nearest map entries; no online training."""
    pair = vote(knn(db, q, K), q)
    return outcome(phi, pair, V, F, budget, S, 0)


def select_bim_light_training(db: BIMDatabase, q, K: int, phi, V: Codebook, F: Codebook,
                              budget: LinkBudget, S: int, noise: NoiseModel) -> SchemeOutcome:
    """Sweep the distinct pairs of the K nearest entries and keep the strongest."""
    cands = distinct_pairs(knn(db, q, K))
    pair = sweep_candidates(phi, cands, budget.transmit_power, noise, V, F)
    return outcome(phi, pair, V, F, budget, S, len(cands))


def los_steering(layout: SiteLayout, bs_cfg: UPAConfig, irs_cfg: UPAConfig, q):
    """Geometric LoS responses: BS towards IRS, IRS from BS, IRS towards UE."""
    bs = np.asarray(layout.bs_position)
    irs = np.asarray(layout.irs_position)
    ue = np.asarray(_vec(q, "ue"))
    if np.array_equal(bs, ue) or np.array_equal(irs, ue):
        raise DegenerateGeometry("UE coincides with the BS or the IRS")
    bs_frame = array_frame(layout.bs_orientation)
    irs_frame = array_frame(layout.irs_orientation)
    a_t = upa_response(bs_cfg, *local_angles(bs_frame, irs - bs))
    a_r = upa_response(irs_cfg, *local_angles(irs_frame, bs - irs))
    a_ue = upa_response(irs_cfg, *local_angles(irs_frame, ue - irs))
    return a_t, a_r, a_ue


def location_based_pair(layout: SiteLayout, bs_cfg: UPAConfig, irs_cfg: UPAConfig, q,
                        V: Codebook, F: Codebook, alpha: complex = 1.0, beta: complex = 1.0) -> BeamPair:
    """Pick the BS and IRS beams independently from a pure-LoS channel guess.

    ``alpha`` and ``beta`` scale the assumed BS-IRS and IRS-UE channels;
    they cannot change the selection and exist so that can be checked.
    """
    a_t, a_r, a_ue = los_steering(layout, bs_cfg, irs_cfg, q)
    h_loc = beta * a_ue
    # |a_t^H f|^2 = |f^T conj(a_t)|^2
    f_scores = np.abs(F.responses(np.conj(alpha * a_t))) ** 2
    v_scores = np.abs(V.responses(np.conj(h_loc) * (alpha * a_r))) ** 2
    return BeamPair(int(np.argmax(v_scores)), int(np.argmax(f_scores)))


def select_location_based(layout: SiteLayout, bs_cfg: UPAConfig, irs_cfg: UPAConfig, q, phi,
                          V: Codebook, F: Codebook, budget: LinkBudget, S: int) -> SchemeOutcome:
    pair = location_based_pair(layout, bs_cfg, irs_cfg, q, V, F)
    return outcome(phi, pair, V, F, budget, S, 0)


def two_time_scale_bs_beam(G, F: Codebook) -> int:
    """BS beam maximising the total power delivered to the IRS, ||G f||^2."""
    GF = F.responses(np.asarray(G).T).T
    return int(np.argmax(np.sum(GF.real ** 2 + GF.imag ** 2, axis=0)))


def select_two_time_scale(G, phi, V: Codebook, F: Codebook, budget: LinkBudget, S: int,
                          noise: NoiseModel, bs_index: int | None = None) -> SchemeOutcome:
    """Fix the BS beam from G, then sweep every IRS beam with noisy pilots."""
    if bs_index is None:
        bs_index = two_time_scale_bs_beam(G, F)
    amps = V.responses(np.asarray(phi) @ F.beam(bs_index))
    powers = noisy_powers(amps, budget.transmit_power, noise)
    v_idx = int(np.argmax(powers))
    return outcome(phi, BeamPair(v_idx, bs_index), V, F, budget, S, len(V))


def full_training_bound(perfect_gain: float, n_irs: int, n_bs: int, budget: LinkBudget, S: int) -> float:
    """Upper bound on the rate of channel-estimation based selection."""
    return effective_rate(perfect_gain, budget, S, min(n_irs * n_bs, S))
