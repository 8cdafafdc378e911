"""DFT codebooks for the BS (active) and IRS (passive) arrays.

Flat beam index ``k1 * n_cols + k2`` addresses beam ``(k1, k2)``. The IRS
beam ``(k1, k2)`` has element ``(n1, n2)`` equal to
``exp(j 2 pi (n1 k1 / n_rows + n2 k2 / n_cols))``; a BS beam is the same
grid vector scaled to unit norm.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .channel import UPAConfig
from .errors import DimensionMismatch, IndexOutOfRange

BS_ACTIVE = "bs_active"
IRS_PASSIVE = "irs_passive"


class BeamPair(NamedTuple):
    irs_index: int
    bs_index: int


@dataclass(frozen=True, eq=False)
class Codebook:
    """Indexed beam set.

    DFT codebooks generate beams on demand; ``explicit`` holds the beams as
    columns for codebooks without that structure.
    """

    cfg: UPAConfig
    kind: str
    explicit: np.ndarray | None = field(default=None, repr=False)

    @property
    def is_dft(self) -> bool:
        return self.explicit is None

    @property
    def scale(self) -> float:
        return 1.0 / np.sqrt(self.cfg.size) if self.kind == BS_ACTIVE else 1.0

    def __len__(self) -> int:
        return self.cfg.size if self.explicit is None else self.explicit.shape[1]

    @property
    def fingerprint(self) -> str:
        return str(self.cfg)

    def beam(self, idx: int) -> np.ndarray:
        idx = int(idx)
        if not 0 <= idx < len(self):
            raise IndexOutOfRange(f"beam {idx} outside codebook of size {len(self)}")
        if self.explicit is not None:
            return self.explicit[:, idx].copy()
        return self.beams(idx, idx + 1)[:, 0]

    def beams(self, start: int = 0, stop: int | None = None) -> np.ndarray:
        """Beams ``start..stop-1`` as matrix columns."""
        stop = len(self) if stop is None else min(stop, len(self))
        if self.explicit is not None:
            return self.explicit[:, start:stop]
        k = np.arange(start, stop)
        k1, k2 = np.divmod(k, self.cfg.n_cols)
        n1 = np.arange(self.cfg.n_rows)[:, None, None]
        n2 = np.arange(self.cfg.n_cols)[None, :, None]
        phase = 2.0 * np.pi * (n1 * k1 / self.cfg.n_rows + n2 * k2 / self.cfg.n_cols)
        return self.scale * np.exp(1j * phase).reshape(self.cfg.size, -1)

    @property
    def matrix(self) -> np.ndarray:
        """All beams as columns; only sensible for small codebooks."""
        return self.beams()

    def responses(self, x: np.ndarray) -> np.ndarray:
        """``beam_k^T x`` for every beam k (rows), for each column of ``x``."""
        x = np.asarray(x)
        if x.shape[0] != self.cfg.size:
            raise DimensionMismatch(f"input length {x.shape[0]} vs array size {self.cfg.size}")
        if self.explicit is not None:
            return self.explicit.T @ x
        grid = x.reshape(self.cfg.n_rows, self.cfg.n_cols, *x.shape[1:])
        out = np.fft.ifft2(grid, axes=(0, 1)) * (self.cfg.size * self.scale)
        return out.reshape(x.shape)


def make_irs_codebook(cfg: UPAConfig) -> Codebook:
    return Codebook(cfg, IRS_PASSIVE)


def make_bs_codebook(cfg: UPAConfig) -> Codebook:
    return Codebook(cfg, BS_ACTIVE)


def beam(cb: Codebook, idx: int) -> np.ndarray:
    return cb.beam(idx)


def codebook_from_matrix(beams: np.ndarray, kind: str, cfg: UPAConfig) -> Codebook:
    """Wrap explicit beams (columns) as a codebook without DFT structure."""
    beams = np.asarray(beams, dtype=complex)
    if beams.shape[0] != cfg.size:
        raise DimensionMismatch("beam length must match the array size")
    return Codebook(cfg, kind, beams)
