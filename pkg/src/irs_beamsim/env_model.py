"""Site description, single-bounce geometric path tracing and path-file I/O.

Angles follow the array-local convention used throughout the package: the
zenith is measured from the array boresight and the azimuth from the array's
local x axis (the axis along which the row index grows).
"""
from __future__ import annotations

import csv
import io
import math
import os
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from . import _accel
from .errors import DegenerateGeometry, LayoutError, ParseError, UnitError

SPEED_OF_LIGHT = 299792458.0
DEFAULT_WAVELENGTH = SPEED_OF_LIGHT / 28e9
DEFAULT_UE_HEIGHT = 1.5

Vec3 = tuple  # (x, y, z) in meters

PATH_CSV_HEADER = (
    "link",
    "power_db",
    "phase_deg",
    "depart_zenith_rad",
    "depart_azimuth_rad",
    "arrive_zenith_rad",
    "arrive_azimuth_rad",
    "delay_s",
)
LINKS = ("bs_irs", "irs_ue")


def _vec(p, name="point") -> tuple:
    arr = np.asarray(p, dtype=float).reshape(-1)
    if arr.shape != (3,):
        raise ValueError(f"{name} must have three components")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} must be finite")
    return tuple(float(c) for c in arr)


def _unit(p, name="orientation") -> tuple:
    v = np.asarray(_vec(p, name))
    norm = np.linalg.norm(v)
    if norm == 0.0:
        raise ValueError(f"{name} must be nonzero")
    if abs(norm - 1.0) <= 4e-16:  # already unit: keep the stored bits
        return tuple(float(c) for c in v)
    return tuple(float(c) for c in v / norm)


@dataclass(frozen=True)
class Blocker:
    """Axis-aligned box that removes any path crossing its interior."""

    min_corner: Vec3
    max_corner: Vec3

    def __post_init__(self):
        lo = _vec(self.min_corner, "min_corner")
        hi = _vec(self.max_corner, "max_corner")
        if any(a > b for a, b in zip(lo, hi)):
            raise LayoutError("blocker min_corner must not exceed max_corner")
        object.__setattr__(self, "min_corner", lo)
        object.__setattr__(self, "max_corner", hi)


@dataclass(frozen=True)
class Scatterer:
    position: Vec3
    reflectivity: float = 0.5

    def __post_init__(self):
        object.__setattr__(self, "position", _vec(self.position, "position"))
        r = float(self.reflectivity)
        if not 0.0 < r <= 1.0:
            raise LayoutError("scatterer reflectivity must lie in (0, 1]")
        object.__setattr__(self, "reflectivity", r)


@dataclass(frozen=True)
class UEArea:
    """Horizontal rectangle of candidate UE positions at a fixed height."""

    x_min: float
    x_max: float
    y_min: float
    y_max: float
    height: float = DEFAULT_UE_HEIGHT

    def __post_init__(self):
        if self.x_min > self.x_max or self.y_min > self.y_max:
            raise LayoutError("ue_area bounds are inverted")

    @property
    def center(self) -> Vec3:
        return (0.5 * (self.x_min + self.x_max), 0.5 * (self.y_min + self.y_max), self.height)

    def contains(self, p, tol=1e-9) -> bool:
        x, y, _ = p
        return (self.x_min - tol <= x <= self.x_max + tol
                and self.y_min - tol <= y <= self.y_max + tol)


@dataclass(frozen=True)
class SiteLayout:
    bs_position: Vec3
    bs_orientation: Vec3
    irs_position: Vec3
    irs_orientation: Vec3
    ue_area: UEArea
    blockers: tuple = ()
    scatterers: tuple = ()
    carrier_wavelength: float = DEFAULT_WAVELENGTH
    bs_irs_los: bool = True

    def __post_init__(self):
        object.__setattr__(self, "bs_position", _vec(self.bs_position, "bs_position"))
        object.__setattr__(self, "irs_position", _vec(self.irs_position, "irs_position"))
        object.__setattr__(self, "bs_orientation", _unit(self.bs_orientation, "bs_orientation"))
        object.__setattr__(self, "irs_orientation", _unit(self.irs_orientation, "irs_orientation"))
        object.__setattr__(self, "blockers", tuple(self.blockers))
        object.__setattr__(self, "scatterers", tuple(self.scatterers))
        if not self.carrier_wavelength > 0:
            raise LayoutError("carrier_wavelength must be positive")
        if self.bs_position == self.irs_position:
            raise DegenerateGeometry("BS and IRS coincide")
        if self.bs_irs_los and segment_blocked(self.bs_position, self.irs_position, self.blockers):
            raise LayoutError("BS-IRS line of sight is declared but blocked")

    @property
    def box_arrays(self):
        if not self.blockers:
            empty = np.empty((0, 3))
            return empty, empty
        lo = np.array([b.min_corner for b in self.blockers], dtype=float)
        hi = np.array([b.max_corner for b in self.blockers], dtype=float)
        return lo, hi


@dataclass(frozen=True)
class PathComponent:
    gain: complex
    depart_zenith: float
    depart_azimuth: float
    arrive_zenith: float
    arrive_azimuth: float
    delay: float = 0.0

    def reversed(self) -> "PathComponent":
        """Same path traversed in the opposite direction."""
        return PathComponent(self.gain, self.arrive_zenith, self.arrive_azimuth,
                             self.depart_zenith, self.depart_azimuth, self.delay)


@dataclass(frozen=True)
class PathSet:
    bs_irs_paths: tuple = field(default_factory=tuple)
    irs_ue_paths: tuple = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "bs_irs_paths", tuple(self.bs_irs_paths))
        object.__setattr__(self, "irs_ue_paths", tuple(self.irs_ue_paths))


# ---------------------------------------------------------------- geometry

def segment_blocked(p1, p2, blockers: Sequence[Blocker]) -> bool:
    """True iff the open segment (p1, p2) passes through a blocker interior."""
    if not blockers:
        return False
    lo = np.array([b.min_corner for b in blockers], dtype=float)
    hi = np.array([b.max_corner for b in blockers], dtype=float)
    a = np.array([_vec(p1)], dtype=float)
    b = np.array([_vec(p2)], dtype=float)
    return bool(_accel.segments_blocked(a, b, lo, hi)[0])


def inside_blocker(p, blockers: Sequence[Blocker]) -> bool:
    """True iff ``p`` lies strictly inside some blocker."""
    x = _vec(p)
    return any(all(lo < c < hi for c, lo, hi in zip(x, b.min_corner, b.max_corner)) for b in blockers)


def array_frame(boresight) -> np.ndarray:
    """Rows are the local x, y, z axes; z is the boresight.

    The local x axis is horizontal whenever the boresight is not vertical.
    """
    z = np.asarray(_unit(boresight), dtype=float)
    up = np.array([0.0, 0.0, 1.0])
    if abs(z @ up) > 1.0 - 1e-9:
        up = np.array([0.0, 1.0, 0.0])
    x = np.cross(up, z)
    x /= np.linalg.norm(x)
    y = np.cross(z, x)
    return np.stack([x, y, z])


def local_angles(frame: np.ndarray, direction) -> tuple[float, float]:
    """Zenith/azimuth of ``direction`` in an array frame from :func:`array_frame`."""
    d = frame @ np.asarray(direction, dtype=float)
    d = d / np.linalg.norm(d)
    zenith = math.acos(min(1.0, max(-1.0, d[2])))
    azimuth = math.atan2(d[1], d[0])
    if azimuth >= math.pi:
        azimuth = -math.pi
    return zenith, azimuth


def _free_space(length: float, wavelength: float, scale: float = 1.0) -> complex:
    amp = scale * wavelength / (4.0 * math.pi * length)
    return amp * complex(math.cos(-2.0 * math.pi * length / wavelength),
                         math.sin(-2.0 * math.pi * length / wavelength))


def _trace_link(tx, tx_frame, rx, rx_frame, layout: SiteLayout) -> list[PathComponent]:
    tx = np.asarray(tx, dtype=float)
    rx = np.asarray(rx, dtype=float)
    if np.array_equal(tx, rx):
        raise DegenerateGeometry("link endpoints coincide")
    scat = [np.asarray(s.position, dtype=float) for s in layout.scatterers]
    for s in scat:
        if np.array_equal(s, tx) or np.array_equal(s, rx):
            raise DegenerateGeometry("scatterer coincides with a link endpoint")

    # segment 0 is the direct link, then (tx->s, s->rx) per scatterer
    starts = [tx] + [p for s in scat for p in (tx, s)]
    ends = [rx] + [p for s in scat for p in (s, rx)]
    lo, hi = layout.box_arrays
    blocked = _accel.segments_blocked(np.ascontiguousarray(starts), np.ascontiguousarray(ends), lo, hi)

    lam = layout.carrier_wavelength
    paths = []
    if not blocked[0]:
        d = float(np.linalg.norm(rx - tx))
        paths.append(PathComponent(
            _free_space(d, lam),
            *local_angles(tx_frame, rx - tx),
            *local_angles(rx_frame, tx - rx),
            d / SPEED_OF_LIGHT,
        ))
    for i, (s, sc) in enumerate(zip(scat, layout.scatterers)):
        if blocked[1 + 2 * i] or blocked[2 + 2 * i]:
            continue
        d = float(np.linalg.norm(s - tx) + np.linalg.norm(rx - s))
        paths.append(PathComponent(
            _free_space(d, lam, sc.reflectivity),
            *local_angles(tx_frame, s - tx),
            *local_angles(rx_frame, s - rx),
            d / SPEED_OF_LIGHT,
        ))
    return paths


def trace_bs_irs(layout: SiteLayout) -> list[PathComponent]:
    """Paths of the fixed BS-IRS link."""
    return _trace_link(layout.bs_position, array_frame(layout.bs_orientation),
                       layout.irs_position, array_frame(layout.irs_orientation), layout)


def trace_irs_ue(layout: SiteLayout, ue) -> list[PathComponent]:
    """Paths of the IRS-UE link. The UE has a single isotropic antenna, so
    its arrival angles are reported in the world frame."""
    return _trace_link(layout.irs_position, array_frame(layout.irs_orientation),
                       _vec(ue, "ue"), np.eye(3), layout)


def trace_paths(layout: SiteLayout, ue) -> PathSet:
    """Trace the LoS and single-bounce paths of both links for one UE."""
    return PathSet(trace_bs_irs(layout), trace_irs_ue(layout, ue))


def sample_ue_locations(area: UEArea, n: int, rng_seed=None) -> list[Vec3]:
    """Draw ``n`` points uniformly over ``area`` at the fixed UE height."""
    if n < 1:
        raise ValueError("n must be at least 1")
    rng = np.random.default_rng(rng_seed)
    x = rng.uniform(area.x_min, area.x_max, n)
    y = rng.uniform(area.y_min, area.y_max, n)
    return [(float(a), float(b), float(area.height)) for a, b in zip(x, y)]


# ---------------------------------------------------------------- path files

def _path_row(link: str, p: PathComponent) -> list[str]:
    mag = abs(p.gain)
    power = 20.0 * math.log10(mag) if mag > 0 else -math.inf
    phase = math.degrees(math.atan2(p.gain.imag, p.gain.real))
    vals = [power, phase, p.depart_zenith, p.depart_azimuth,
            p.arrive_zenith, p.arrive_azimuth, p.delay]
    return [link] + [repr(float(v)) for v in vals]


def export_paths(paths: PathSet, file) -> None:
    """Write a path set in the per-location CSV format."""
    own = isinstance(file, (str, os.PathLike))
    fh = open(file, "w", newline="") if own else file
    try:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(PATH_CSV_HEADER)
        for link, group in zip(LINKS, (paths.bs_irs_paths, paths.irs_ue_paths)):
            for p in group:
                w.writerow(_path_row(link, p))
    finally:
        if own:
            fh.close()


def _check_angle(value, lo, hi, closed_hi, name, line):
    ok = lo <= value <= hi if closed_hi else lo <= value < hi
    if not ok:
        raise UnitError(f"{name}={value!r} out of range", line)


def import_paths(file) -> PathSet:
    """Parse a per-location path CSV into a :class:`PathSet`."""
    if isinstance(file, (str, os.PathLike)):
        with open(file, newline="") as fh:
            text = fh.read()
    else:
        text = file.read()
    rows = csv.reader(io.StringIO(text))
    groups = {link: [] for link in LINKS}
    header_seen = False
    for lineno, row in enumerate(rows, start=1):
        if not row or all(not c.strip() for c in row):
            continue
        if not header_seen:
            if tuple(c.strip() for c in row) != PATH_CSV_HEADER:
                raise ParseError("unexpected header", lineno)
            header_seen = True
            continue
        if len(row) != len(PATH_CSV_HEADER):
            raise ParseError(f"expected {len(PATH_CSV_HEADER)} fields, got {len(row)}", lineno)
        link = row[0].strip()
        if link not in groups:
            raise ParseError(f"unknown link {link!r}", lineno)
        try:
            power, phase, dz, da, az, aa, delay = (float(c) for c in row[1:])
        except ValueError as exc:
            raise ParseError(str(exc), lineno) from None
        if math.isnan(power) or power == math.inf:
            raise UnitError("power_db must be finite or -inf", lineno)
        if not math.isfinite(phase):
            raise UnitError("phase_deg must be finite", lineno)
        _check_angle(dz, 0.0, math.pi, True, "depart_zenith_rad", lineno)
        _check_angle(az, 0.0, math.pi, True, "arrive_zenith_rad", lineno)
        _check_angle(da, -math.pi, math.pi, False, "depart_azimuth_rad", lineno)
        _check_angle(aa, -math.pi, math.pi, False, "arrive_azimuth_rad", lineno)
        if not (delay >= 0.0 and math.isfinite(delay)):
            raise UnitError("delay_s must be finite and nonnegative", lineno)
        mag = 10.0 ** (power / 20.0)
        rad = math.radians(phase)
        gain = complex(mag * math.cos(rad), mag * math.sin(rad))
        groups[link].append(PathComponent(gain, dz, da, az, aa, delay))
    if not header_seen:
        raise ParseError("missing header", 1)
    return PathSet(groups["bs_irs"], groups["irs_ue"])


def write_locations(locations: Iterable, file) -> None:
    with open(file, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(("x", "y", "z"))
        for p in locations:
            w.writerow([repr(float(c)) for c in p])


def read_locations(file) -> list[Vec3]:
    out = []
    with open(file, newline="") as fh:
        rows = csv.reader(fh)
        header = next(rows, None)
        if header is None or [c.strip() for c in header] != ["x", "y", "z"]:
            raise ParseError("unexpected header", 1)
        for lineno, row in enumerate(rows, start=2):
            if not row:
                continue
            try:
                out.append(_vec([float(c) for c in row]))
            except ValueError as exc:
                raise ParseError(str(exc), lineno) from None
    return out
