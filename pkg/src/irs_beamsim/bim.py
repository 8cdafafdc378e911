"""Beam index map: UE location -> best (IRS beam, BS beam) index pair."""
from __future__ import annotations

import math
import os
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from . import _accel
from .codebook import BeamPair
from .errors import FingerprintMismatch, FormatVersionMismatch, KTooLarge, ParseError

FORMAT_VERSION = "bim-v1"


@dataclass(frozen=True)
class BIMEntry:
    location: tuple
    pair: BeamPair


@dataclass(frozen=True)
class Candidate:
    entry: BIMEntry
    distance: float


class BIMDatabase:
    """Immutable table of labelled training locations.

    ``irs_shape`` and ``bs_shape`` are the codebook grids the labels index
    into; they are checked when a stored map is loaded.
    """

    def __init__(self, locations, pairs, irs_shape, bs_shape):
        locations = np.array(locations, dtype=float).reshape(-1, 3)
        pairs = np.array(pairs, dtype=np.int64).reshape(-1, 2)
        if locations.shape[0] < 1:
            raise ValueError("a beam index map needs at least one entry")
        if locations.shape[0] != pairs.shape[0]:
            raise ValueError("locations and pairs differ in length")
        self.irs_shape = tuple(int(c) for c in irs_shape)
        self.bs_shape = tuple(int(c) for c in bs_shape)
        n_irs = self.irs_shape[0] * self.irs_shape[1]
        n_bs = self.bs_shape[0] * self.bs_shape[1]
        if (pairs < 0).any() or (pairs[:, 0] >= n_irs).any() or (pairs[:, 1] >= n_bs).any():
            raise ValueError("beam index outside the codebook")
        locations.setflags(write=False)
        pairs.setflags(write=False)
        self.locations = np.ascontiguousarray(locations)
        self.pairs = pairs

    def __len__(self):
        return self.locations.shape[0]

    @property
    def fingerprint(self) -> str:
        return f"{self.irs_shape[0]}x{self.irs_shape[1]},{self.bs_shape[0]}x{self.bs_shape[1]}"

    def entry(self, i: int) -> BIMEntry:
        return BIMEntry(tuple(float(c) for c in self.locations[i]),
                        BeamPair(int(self.pairs[i, 0]), int(self.pairs[i, 1])))

    @property
    def entries(self) -> list[BIMEntry]:
        return [self.entry(i) for i in range(len(self))]

    def __eq__(self, other):
        if not isinstance(other, BIMDatabase):
            return NotImplemented
        return (self.fingerprint == other.fingerprint
                and np.array_equal(self.locations, other.locations)
                and np.array_equal(self.pairs, other.pairs))

    def __repr__(self):
        return f"BIMDatabase(I={len(self)}, fingerprint={self.fingerprint!r})"


def build_bim(labeler: Callable, train_locations: Sequence, irs_shape, bs_shape) -> BIMDatabase:
    """Label every training location with ``labeler(q) -> BeamPair``."""
    if len(train_locations) == 0:
        raise ValueError("need at least one training location")
    pairs = [tuple(labeler(q)) for q in train_locations]
    return BIMDatabase(train_locations, pairs, irs_shape, bs_shape)


def knn(db: BIMDatabase, q, K: int) -> list[Candidate]:
    """K nearest entries, ascending distance, ties in insertion order."""
    if K < 1:
        raise ValueError("K must be at least 1")
    if K > len(db):
        raise KTooLarge(f"K={K} exceeds database size {len(db)}")
    q = np.ascontiguousarray(q, dtype=float).reshape(3)
    idx, dist = _accel.knn_select(db.locations, q, K)
    return [Candidate(db.entry(int(i)), float(d)) for i, d in zip(idx, dist)]


def vote(candidates: Sequence[Candidate], q=None) -> BeamPair:
    """Most frequent pair; count ties go to the largest inverse-distance sum.

    A zero distance counts as an infinite inverse distance. Remaining exact
    ties go to the lexicographically smallest pair. ``q`` is unused: the
    candidate distances already refer to it.
    """
    if not candidates:
        raise ValueError("vote needs at least one candidate")
    groups: dict[BeamPair, list[float]] = {}
    for c in candidates:
        groups.setdefault(BeamPair(*c.entry.pair), []).append(c.distance)

    def inv_sum(ds):
        if any(d == 0.0 for d in ds):
            return math.inf
        return math.fsum(1.0 / d for d in ds)

    return min(groups, key=lambda p: (-len(groups[p]), -inv_sum(groups[p]), p))


def distinct_pairs(candidates: Sequence[Candidate]) -> list[BeamPair]:
    """Unique candidate pairs in first-appearance order."""
    seen = {}
    for c in candidates:
        seen.setdefault(BeamPair(*c.entry.pair), None)
    return list(seen)


def save_bim(db: BIMDatabase, file) -> None:
    lines = [f"{FORMAT_VERSION},{db.irs_shape[0]}x{db.irs_shape[1]},{db.bs_shape[0]}x{db.bs_shape[1]}"]
    for loc, pair in zip(db.locations, db.pairs):
        lines.append(",".join([repr(float(c)) for c in loc] + [str(int(pair[0])), str(int(pair[1]))]))
    text = "\n".join(lines) + "\n"
    if isinstance(file, (str, os.PathLike)):
        with open(file, "w") as fh:
            fh.write(text)
    else:
        file.write(text)


def _shape(token: str, line: int) -> tuple[int, int]:
    try:
        a, b = token.lower().split("x")
        return int(a), int(b)
    except ValueError:
        raise ParseError(f"bad grid shape {token!r}", line) from None


def load_bim(file, irs_shape=None, bs_shape=None) -> BIMDatabase:
    """Read a stored map; optional shapes are checked against its header."""
    if isinstance(file, (str, os.PathLike)):
        with open(file) as fh:
            text = fh.read()
    else:
        text = file.read()
    lines = text.splitlines()
    if not lines:
        raise ParseError("empty file", 1)
    head = lines[0].strip().split(",")
    if head[0] != FORMAT_VERSION:
        raise FormatVersionMismatch(f"expected {FORMAT_VERSION}, found {head[0]!r}")
    if len(head) != 3:
        raise ParseError("header needs version and two grid shapes", 1)
    file_irs, file_bs = _shape(head[1], 1), _shape(head[2], 1)
    if irs_shape is not None and tuple(irs_shape) != file_irs:
        raise FingerprintMismatch(f"map built for IRS {file_irs}, scenario uses {tuple(irs_shape)}")
    if bs_shape is not None and tuple(bs_shape) != file_bs:
        raise FingerprintMismatch(f"map built for BS {file_bs}, scenario uses {tuple(bs_shape)}")
    locs, pairs = [], []
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        parts = line.split(",")
        if len(parts) != 5:
            raise ParseError(f"expected 5 fields, got {len(parts)}", lineno)
        try:
            locs.append([float(c) for c in parts[:3]])
            pairs.append([int(parts[3]), int(parts[4])])
        except ValueError as exc:
            raise ParseError(str(exc), lineno) from None
    if not locs:
        raise ParseError("map has no entries", len(lines))
    try:
        return BIMDatabase(locs, pairs, file_irs, file_bs)
    except ValueError as exc:
        raise ParseError(str(exc), None) from None
