"""Array responses and channel synthesis for the BS-IRS-UE cascade.

Convention: the cascaded channel is ``Phi = diag(conj(h)) @ G`` and a beam
pair ``(v, f)`` delivers amplitude ``v.T @ Phi @ f``, which equals
``h^H diag(v) G f`` from the received-signal model.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DimensionMismatch


@dataclass(frozen=True)
class UPAConfig:
    """Uniform planar array; ``spacing`` is in wavelengths."""

    n_rows: int
    n_cols: int
    spacing: float = 0.5

    def __post_init__(self):
        if int(self.n_rows) < 1 or int(self.n_cols) < 1:
            raise ValueError("UPA needs at least one row and one column")
        if not self.spacing > 0:
            raise ValueError("element spacing must be positive")
        object.__setattr__(self, "n_rows", int(self.n_rows))
        object.__setattr__(self, "n_cols", int(self.n_cols))
        object.__setattr__(self, "spacing", float(self.spacing))

    @property
    def size(self) -> int:
        return self.n_rows * self.n_cols

    @property
    def shape(self) -> tuple[int, int]:
        return self.n_rows, self.n_cols

    def __str__(self):
        return f"{self.n_rows}x{self.n_cols}"


def upa_response(cfg: UPAConfig, zenith: float, azimuth: float) -> np.ndarray:
    """Steering vector, row-major over (row, col) element indices."""
    st = np.sin(zenith)
    n1 = np.arange(cfg.n_rows)[:, None]
    n2 = np.arange(cfg.n_cols)[None, :]
    phase = 2.0 * np.pi * cfg.spacing * (n1 * (st * np.cos(azimuth)) + n2 * (st * np.sin(azimuth)))
    return np.exp(1j * phase).reshape(-1)


def synth_channel(paths: Sequence, tx_cfg: UPAConfig | None, rx_cfg: UPAConfig | None) -> np.ndarray:
    """Sum of rank-one path contributions ``gain * a_rx(arrival) a_tx(departure)^H``.

    ``None`` stands for a single isotropic antenna; if either side is a
    single antenna the result is a vector.
    """
    n_tx = 1 if tx_cfg is None else tx_cfg.size
    n_rx = 1 if rx_cfg is None else rx_cfg.size
    out = np.zeros((n_rx, n_tx), dtype=complex)
    for p in paths:
        a_rx = np.ones(1) if rx_cfg is None else upa_response(rx_cfg, p.arrive_zenith, p.arrive_azimuth)
        a_tx = np.ones(1) if tx_cfg is None else upa_response(tx_cfg, p.depart_zenith, p.depart_azimuth)
        out += p.gain * np.outer(a_rx, a_tx.conj())
    if tx_cfg is None:
        return out[:, 0]
    if rx_cfg is None:
        return out[0, :]
    return out


def bs_irs_matrix(paths, bs_cfg: UPAConfig, irs_cfg: UPAConfig) -> np.ndarray:
    """G (N x M) from traced BS->IRS paths."""
    return synth_channel(paths, bs_cfg, irs_cfg)


def irs_ue_vector(paths, irs_cfg: UPAConfig) -> np.ndarray:
    """h (length N) from traced IRS->UE paths.

    Each path contributes ``gain * a_irs(departure angles)``, the
    reciprocal UE->IRS view of the link.
    """
    return synth_channel([p.reversed() for p in paths], None, irs_cfg)


def cascade(h: np.ndarray, G: np.ndarray) -> np.ndarray:
    h = np.asarray(h)
    G = np.asarray(G)
    if h.ndim != 1 or G.ndim != 2 or G.shape[0] != h.shape[0]:
        raise DimensionMismatch(f"h {h.shape} incompatible with G {G.shape}")
    return h.conj()[:, None] * G


def beam_amplitude(phi: np.ndarray, v: np.ndarray, f: np.ndarray) -> complex:
    phi = np.asarray(phi)
    v = np.asarray(v)
    f = np.asarray(f)
    if phi.ndim != 2 or v.shape != (phi.shape[0],) or f.shape != (phi.shape[1],):
        raise DimensionMismatch(f"beams {v.shape}, {f.shape} incompatible with Phi {phi.shape}")
    return complex(v @ (phi @ f))


def beam_gain(phi: np.ndarray, v: np.ndarray, f: np.ndarray) -> float:
    """|v^T Phi f|^2."""
    a = beam_amplitude(phi, v, f)
    return a.real * a.real + a.imag * a.imag
