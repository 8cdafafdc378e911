"""Scenario configuration, JSON (de)serialisation and presets."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, fields, replace

import numpy as np

from ..channel import UPAConfig
from ..env_model import DEFAULT_UE_HEIGHT, DEFAULT_WAVELENGTH, SPEED_OF_LIGHT, Blocker, Scatterer, SiteLayout, UEArea
from ..errors import BeamSimError, ConfigError


def noise_power(psd_dbm_hz: float, bandwidth_hz: float) -> float:
    """Thermal noise power in mW."""
    if not bandwidth_hz > 0:
        raise ValueError("bandwidth must be positive")
    return 10.0 ** ((psd_dbm_hz + 10.0 * math.log10(bandwidth_hz)) / 10.0)


def default_layout(seed: int = 3, n_blockers: int = 22, n_scatterers: int = 40,
                   wavelength: float = DEFAULT_WAVELENGTH) -> SiteLayout:
    """Synthetic street scene with the IRS on a wall facing the UE square.

    A large building stands beside the BS-IRS line; small boxes crowd the
    space between the IRS and the square so the IRS-UE line of sight is
    mostly blocked, and point scatterers supply the NLoS paths. Everything
    random is drawn from ``seed``.
    """
    rng = np.random.default_rng(seed)
    area = UEArea(3.0, 13.0, -5.0, 5.0, DEFAULT_UE_HEIGHT)
    irs = (0.0, 0.0, 5.0)
    bs = (20.0, 12.0, 10.0)
    blockers = [Blocker((15.0, -8.0, 0.0), (25.0, 6.0, 20.0))]
    for _ in range(n_blockers):
        cx, cy = rng.uniform(1.5, 10.0), rng.uniform(-7.0, 7.0)
        wx, wy = rng.uniform(0.8, 2.5, 2)
        hz = rng.uniform(4.0, 6.0)
        blockers.append(Blocker((cx - wx / 2, cy - wy / 2, 0.0), (cx + wx / 2, cy + wy / 2, hz)))
    scatterers = []
    for _ in range(n_scatterers):
        pos = (rng.uniform(2.0, 18.0), rng.uniform(-10.0, 10.0), rng.uniform(0.5, 4.0))
        scatterers.append(Scatterer(pos, rng.uniform(0.3, 0.9)))
    bs_dir = tuple(np.subtract(irs, bs))
    return SiteLayout(bs, bs_dir, irs, (1.0, 0.0, 0.0), area, tuple(blockers),
                      tuple(scatterers), wavelength)


@dataclass(frozen=True)
class Seeds:
    sampling: int = 1
    noise: int = 2
    error: int = 3


@dataclass(frozen=True)
class ScenarioConfig:
    layout: SiteLayout = field(default_factory=default_layout)
    bs_cfg: UPAConfig = UPAConfig(8, 8)
    irs_cfg: UPAConfig = UPAConfig(100, 100)
    noise_psd: float = -174.0
    bandwidth: float = 1e7
    power_sweep: tuple = (10.0, 15.0, 20.0, 25.0, 30.0, 35.0, 40.0)
    S: int = 20000
    K: int = 3
    n_train: int = 984
    n_test: int = 100
    location_error_mean: float = 0.0
    seeds: Seeds = Seeds()

    def __post_init__(self):
        object.__setattr__(self, "power_sweep", tuple(float(p) for p in self.power_sweep))
        self.validate()

    def validate(self):
        if not self.power_sweep:
            raise ConfigError("power_sweep", "must list at least one power level")
        if not all(math.isfinite(p) for p in self.power_sweep):
            raise ConfigError("power_sweep", "power levels must be finite")
        if not self.bandwidth > 0:
            raise ConfigError("bandwidth", "must be positive")
        if not math.isfinite(self.noise_psd):
            raise ConfigError("noise_psd", "must be finite")
        if self.S < 1:
            raise ConfigError("S", "must be at least 1")
        if self.n_train < 1:
            raise ConfigError("n_train", "must be at least 1")
        if self.n_test < 1:
            raise ConfigError("n_test", "must be at least 1")
        if self.S < max(self.irs_cfg.size, self.K):
            raise ConfigError("S", "coherence block shorter than a full IRS sweep")
        if not 1 <= self.K <= self.n_train:
            raise ConfigError("K", "must lie in [1, n_train]")
        if not self.location_error_mean >= 0:
            raise ConfigError("location_error_mean", "must be nonnegative")

    @property
    def noise_power_mw(self) -> float:
        return noise_power(self.noise_psd, self.bandwidth)

    def to_dict(self) -> dict:
        lay = self.layout
        return {
            "layout": {
                "bs_position": list(lay.bs_position),
                "bs_orientation": list(lay.bs_orientation),
                "irs_position": list(lay.irs_position),
                "irs_orientation": list(lay.irs_orientation),
                "blockers": [{"min_corner": list(b.min_corner), "max_corner": list(b.max_corner)}
                             for b in lay.blockers],
                "scatterers": [{"position": list(s.position), "reflectivity": s.reflectivity}
                               for s in lay.scatterers],
                "carrier_wavelength": lay.carrier_wavelength,
                "ue_area": {k: getattr(lay.ue_area, k) for k in ("x_min", "x_max", "y_min", "y_max", "height")},
                "bs_irs_los": lay.bs_irs_los,
            },
            "bs_cfg": _upa_dict(self.bs_cfg),
            "irs_cfg": _upa_dict(self.irs_cfg),
            "noise_psd": self.noise_psd,
            "bandwidth": self.bandwidth,
            "power_sweep": list(self.power_sweep),
            "S": self.S,
            "K": self.K,
            "n_train": self.n_train,
            "n_test": self.n_test,
            "location_error_mean": self.location_error_mean,
            "seeds": {"sampling": self.seeds.sampling, "noise": self.seeds.noise, "error": self.seeds.error},
        }

    @classmethod
    def from_dict(cls, data: dict, base: "ScenarioConfig | None" = None) -> "ScenarioConfig":
        """Build a config from JSON data; absent fields come from ``base``."""
        if not isinstance(data, dict):
            raise ConfigError("", "config must be a JSON object")
        base = base if base is not None else cls()
        known = {f.name for f in fields(cls)} | {"preset"}
        for key in data:
            if key not in known:
                raise ConfigError(key, "unknown field")
        kw = {}
        if "layout" in data:
            kw["layout"] = _layout_from(data["layout"], base.layout)
        for name in ("bs_cfg", "irs_cfg"):
            if name in data:
                kw[name] = _upa_from(data[name], name, getattr(base, name))
        for name in ("noise_psd", "bandwidth", "location_error_mean"):
            if name in data:
                kw[name] = _number(data[name], name)
        for name in ("S", "K", "n_train", "n_test"):
            if name in data:
                kw[name] = _integer(data[name], name)
        if "power_sweep" in data:
            sweep = data["power_sweep"]
            if not isinstance(sweep, list):
                raise ConfigError("power_sweep", "must be a list of dBm values")
            kw["power_sweep"] = tuple(_number(p, f"power_sweep[{i}]") for i, p in enumerate(sweep))
        if "seeds" in data:
            s = data["seeds"]
            if not isinstance(s, dict):
                raise ConfigError("seeds", "must be an object")
            for k in s:
                if k not in ("sampling", "noise", "error"):
                    raise ConfigError(f"seeds.{k}", "unknown field")
            kw["seeds"] = Seeds(**{k: _integer(v, f"seeds.{k}") for k, v in s.items()})
        return replace(base, **kw)


def _upa_dict(cfg: UPAConfig) -> dict:
    return {"n_rows": cfg.n_rows, "n_cols": cfg.n_cols, "spacing": cfg.spacing}


def _number(value, path) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(path, "must be a number")
    return float(value)


def _integer(value, path) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        if isinstance(value, float) and value.is_integer():
            return int(value)
        raise ConfigError(path, "must be an integer")
    return value


def _vector(value, path) -> tuple:
    if not isinstance(value, list) or len(value) != 3:
        raise ConfigError(path, "must be a list of three numbers")
    return tuple(_number(c, f"{path}[{i}]") for i, c in enumerate(value))


def _upa_from(data, path, base: UPAConfig) -> UPAConfig:
    if not isinstance(data, dict):
        raise ConfigError(path, "must be an object")
    for k in data:
        if k not in ("n_rows", "n_cols", "spacing"):
            raise ConfigError(f"{path}.{k}", "unknown field")
    try:
        return UPAConfig(_integer(data.get("n_rows", base.n_rows), f"{path}.n_rows"),
                         _integer(data.get("n_cols", base.n_cols), f"{path}.n_cols"),
                         _number(data.get("spacing", base.spacing), f"{path}.spacing"))
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(path, str(exc)) from None


def _layout_from(data, base: SiteLayout) -> SiteLayout:
    path = "layout"
    if not isinstance(data, dict):
        raise ConfigError(path, "must be an object")
    allowed = {"bs_position", "bs_orientation", "irs_position", "irs_orientation", "blockers",
               "scatterers", "carrier_wavelength", "ue_area", "bs_irs_los"}
    for k in data:
        if k not in allowed:
            raise ConfigError(f"{path}.{k}", "unknown field")
    kw = {}
    for k in ("bs_position", "bs_orientation", "irs_position", "irs_orientation"):
        if k in data:
            kw[k] = _vector(data[k], f"{path}.{k}")
    if "carrier_wavelength" in data:
        kw["carrier_wavelength"] = _number(data["carrier_wavelength"], f"{path}.carrier_wavelength")
    if "bs_irs_los" in data:
        if not isinstance(data["bs_irs_los"], bool):
            raise ConfigError(f"{path}.bs_irs_los", "must be a boolean")
        kw["bs_irs_los"] = data["bs_irs_los"]
    if "blockers" in data:
        items = data["blockers"]
        if not isinstance(items, list):
            raise ConfigError(f"{path}.blockers", "must be a list")
        out = []
        for i, b in enumerate(items):
            p = f"{path}.blockers[{i}]"
            if not isinstance(b, dict):
                raise ConfigError(p, "must be an object")
            try:
                out.append(Blocker(_vector(b.get("min_corner"), f"{p}.min_corner"),
                                   _vector(b.get("max_corner"), f"{p}.max_corner")))
            except BeamSimError as exc:
                if isinstance(exc, ConfigError):
                    raise
                raise ConfigError(p, str(exc)) from None
        kw["blockers"] = tuple(out)
    if "scatterers" in data:
        items = data["scatterers"]
        if not isinstance(items, list):
            raise ConfigError(f"{path}.scatterers", "must be a list")
        out = []
        for i, s in enumerate(items):
            p = f"{path}.scatterers[{i}]"
            if not isinstance(s, dict):
                raise ConfigError(p, "must be an object")
            try:
                out.append(Scatterer(_vector(s.get("position"), f"{p}.position"),
                                     _number(s.get("reflectivity", 0.5), f"{p}.reflectivity")))
            except BeamSimError as exc:
                if isinstance(exc, ConfigError):
                    raise
                raise ConfigError(p, str(exc)) from None
        kw["scatterers"] = tuple(out)
    if "ue_area" in data:
        a = data["ue_area"]
        if not isinstance(a, dict):
            raise ConfigError(f"{path}.ue_area", "must be an object")
        vals = {}
        for k, v in a.items():
            if k not in ("x_min", "x_max", "y_min", "y_max", "height"):
                raise ConfigError(f"{path}.ue_area.{k}", "unknown field")
            vals[k] = _number(v, f"{path}.ue_area.{k}")
        cur = base.ue_area
        try:
            kw["ue_area"] = replace(cur, **vals)
        except BeamSimError as exc:
            raise ConfigError(f"{path}.ue_area", str(exc)) from None
    try:
        return replace(base, **kw)
    except (BeamSimError, ValueError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(path, str(exc)) from None


# Small arrays lose ~30 dB of beamforming gain against 100x100/8x8; the
# small presets halve the carrier frequency to win back 12 dB, and shrink S
# so an IRS sweep still costs half of the coherence block.
DESK_WAVELENGTH = SPEED_OF_LIGHT / 14e9

PRESETS = {
    "full": {},
    # codebooks small enough to brute-force
    "desk": {"irs_cfg": UPAConfig(8, 8), "bs_cfg": UPAConfig(4, 4), "n_train": 200, "S": 128,
             "layout": default_layout(wavelength=DESK_WAVELENGTH)},
    "mid": {"irs_cfg": UPAConfig(16, 16), "bs_cfg": UPAConfig(4, 4), "n_train": 300, "S": 512,
             "layout": default_layout(wavelength=DESK_WAVELENGTH)},
}


def preset(name: str) -> ScenarioConfig:
    if name not in PRESETS:
        raise ConfigError("preset", f"unknown preset {name!r}; choose from {sorted(PRESETS)}")
    return replace(ScenarioConfig(), **PRESETS[name])


def load_config(path=None, preset_name: str | None = None) -> ScenarioConfig:
    """Read a JSON config. A ``preset`` key (or argument) selects the base."""
    data = {}
    if path is not None:
        with open(path) as fh:
            try:
                data = json.load(fh)
            except json.JSONDecodeError as exc:
                raise ConfigError("", f"invalid JSON: {exc}") from None
        if not isinstance(data, dict):
            raise ConfigError("", "config must be a JSON object")
    name = preset_name or data.get("preset")
    base = preset(name) if name else ScenarioConfig()
    return ScenarioConfig.from_dict(data, base)


def dump_config(cfg: ScenarioConfig, path) -> None:
    with open(path, "w") as fh:
        json.dump(cfg.to_dict(), fh, indent=2)
        fh.write("\n")
