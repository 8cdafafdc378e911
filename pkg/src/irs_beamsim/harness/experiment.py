"""Monte Carlo comparison of the beam-selection schemes."""
from __future__ import annotations

import csv
import logging
import math
import os
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from ..beamsearch import NoiseModel, fft_search
from ..bim import BIMDatabase, build_bim, distinct_pairs, knn, vote
from ..channel import beam_gain, bs_irs_matrix, cascade, irs_ue_vector
from ..codebook import BeamPair, make_bs_codebook, make_irs_codebook
from ..env_model import inside_blocker, sample_ue_locations, trace_bs_irs, trace_irs_ue
from ..errors import ConfigError, FingerprintMismatch
from .. import schemes as sc
from .config import ScenarioConfig

log = logging.getLogger(__name__)

RESULT_SCHEMES = sc.SCHEMES + (sc.FULL_TRAINING_BOUND,)
_SCHEME_ID = {name: i for i, name in enumerate(RESULT_SCHEMES)}


def apply_location_error(q, mean_error: float, rng: np.random.Generator):
    """Shift ``q`` horizontally by a Rayleigh-distributed distance.

    The Rayleigh scale is chosen so the mean offset equals ``mean_error``;
    the direction is uniform.
    """
    if mean_error < 0:
        raise ValueError("mean_error must be nonnegative")
    if mean_error == 0:
        return tuple(q)
    r = rng.rayleigh(mean_error * math.sqrt(2.0 / math.pi))
    ang = rng.uniform(-math.pi, math.pi)
    return (q[0] + r * math.cos(ang), q[1] + r * math.sin(ang), q[2])


@dataclass(frozen=True)
class TrialRecord:
    scheme: str
    power_dbm: float
    trial: int
    ue: tuple
    ue_estimate: tuple
    pair: BeamPair
    training_symbols: int
    gain: float
    rate: float


@dataclass
class ExperimentResult:
    config: ScenarioConfig
    records: list = field(default_factory=list)
    schemes: tuple = RESULT_SCHEMES

    @property
    def n_trials(self) -> int:
        return len({r.trial for r in self.records})

    def mean_rates(self) -> dict:
        """{(scheme, power_dbm): mean rate over trials}."""
        acc: dict = {}
        for r in self.records:
            acc.setdefault((r.scheme, r.power_dbm), []).append(r.rate)
        return {k: math.fsum(v) / len(v) for k, v in acc.items()}

    def rate_table(self) -> dict:
        """{scheme: np.array of mean rates in power-sweep order}."""
        m = self.mean_rates()
        powers = self.config.power_sweep
        return {s: np.array([m[(s, p)] for p in powers]) for s in self.schemes if (s, powers[0]) in m}


class Scenario:
    """Codebooks, fixed BS-IRS channel and a channel oracle for one config."""

    def __init__(self, config: ScenarioConfig):
        self.config = config
        self.layout = config.layout
        self.V = make_irs_codebook(config.irs_cfg)
        self.F = make_bs_codebook(config.bs_cfg)
        self.G = bs_irs_matrix(trace_bs_irs(self.layout), config.bs_cfg, config.irs_cfg)

    def cascaded(self, q) -> np.ndarray:
        h = irs_ue_vector(trace_irs_ue(self.layout, q), self.config.irs_cfg)
        return cascade(h, self.G)

    def label(self, q) -> BeamPair:
        return fft_search(self.cascaded(q), self.V, self.F).pair

    @property
    def irs_shape(self):
        return self.config.irs_cfg.shape

    @property
    def bs_shape(self):
        return self.config.bs_cfg.shape


def _seq(seed: int, *key: int) -> np.random.SeedSequence:
    return np.random.SeedSequence(seed, spawn_key=key)


def _free_points(config: ScenarioConfig, n: int, stream: int, exclude: Sequence = ()) -> list:
    """``n`` uniform UE positions outside every blocker and not in ``exclude``."""
    layout = config.layout
    rng = np.random.default_rng(_seq(config.seeds.sampling, stream))
    taken = {tuple(p) for p in exclude}
    out = []
    while len(out) < n:
        batch = sample_ue_locations(layout.ue_area, max(n - len(out), 16), rng)
        for p in batch:
            if p in taken or inside_blocker(p, layout.blockers):
                continue
            taken.add(p)
            out.append(p)
            if len(out) == n:
                break
    return out


def training_locations(config: ScenarioConfig) -> list:
    return _free_points(config, config.n_train, 0)


def test_locations(config: ScenarioConfig, exclude: Sequence = ()) -> list:
    """Test points drawn disjoint from ``exclude`` (collisions are redrawn)."""
    return _free_points(config, config.n_test, 1, exclude)


def build_scenario_bim(config: ScenarioConfig, scenario: Scenario | None = None,
                       locations: Sequence | None = None) -> BIMDatabase:
    scenario = scenario or Scenario(config)
    locations = training_locations(config) if locations is None else locations
    return build_bim(scenario.label, locations, scenario.irs_shape, scenario.bs_shape)


def run_experiment(config: ScenarioConfig, bim: BIMDatabase | None = None,
                   test_points: Sequence | None = None,
                   progress: Callable[[int, int], None] | None = None) -> ExperimentResult:
    """Run every scheme at every power level on every test location.

    ``bim`` reuses a prebuilt map; ``test_points`` overrides the sampled
    test set (the count then replaces ``n_test``).
    """
    scn = Scenario(config)
    if bim is None:
        train = training_locations(config)
        bim = build_scenario_bim(config, scn, train)
    else:
        if bim.irs_shape != scn.irs_shape or bim.bs_shape != scn.bs_shape:
            raise FingerprintMismatch(f"map {bim.fingerprint} does not fit the scenario codebooks")
        train = [tuple(p) for p in bim.locations]
    if config.K > len(bim):
        raise ConfigError("K", f"exceeds the map size {len(bim)}")
    tests = list(test_points) if test_points is not None else test_locations(config, train)

    V, F = scn.V, scn.F
    sigma2 = config.noise_power_mw
    budgets = [sc.LinkBudget.from_dbm(p, sigma2) for p in config.power_sweep]
    f_two = sc.two_time_scale_bs_beam(scn.G, F)
    S, K = config.S, config.K
    result = ExperimentResult(config)

    for t, q in enumerate(tests):
        q = tuple(float(c) for c in q)
        phi = scn.cascaded(q)
        q_est = apply_location_error(q, config.location_error_mean,
                                     np.random.default_rng(_seq(config.seeds.error, t)))
        best = fft_search(phi, V, F).pair
        best_gain = beam_gain(phi, V.beam(best[0]), F.beam(best[1]))
        tf_pair = vote(knn(bim, q_est, K), q_est)
        light_cands = distinct_pairs(knn(bim, q_est, K))
        loc_pair = sc.location_based_pair(config.layout, config.bs_cfg, config.irs_cfg, q_est, V, F)

        def record(name, power, out):
            result.records.append(TrialRecord(name, power, t, q, q_est, out.pair,
                                              out.training_symbols, out.gain, out.rate))

        for pi, (power, budget) in enumerate(zip(config.power_sweep, budgets)):
            def noise(name):
                return NoiseModel(sigma2, np.random.default_rng(
                    _seq(config.seeds.noise, t, _SCHEME_ID[name], pi)))

            record(sc.PERFECT_CSI, power, sc.outcome(phi, best, V, F, budget, S, 0, best_gain))
            record(sc.BIM_TRAINING_FREE, power, sc.outcome(phi, tf_pair, V, F, budget, S, 0))
            light = sc.sweep_candidates(phi, light_cands, budget.transmit_power,
                                        noise(sc.BIM_LIGHT_TRAINING), V, F)
            record(sc.BIM_LIGHT_TRAINING, power,
                   sc.outcome(phi, light, V, F, budget, S, len(light_cands)))
            record(sc.LOCATION_BASED, power, sc.outcome(phi, loc_pair, V, F, budget, S, 0))
            record(sc.TWO_TIME_SCALE, power,
                   sc.select_two_time_scale(scn.G, phi, V, F, budget, S, noise(sc.TWO_TIME_SCALE), f_two))
            n_tr = min(len(V) * len(F), S)
            bound = sc.full_training_bound(best_gain, len(V), len(F), budget, S)
            result.records.append(TrialRecord(sc.FULL_TRAINING_BOUND, power, t, q, q_est, best,
                                              n_tr, best_gain, bound))
        if progress is not None:
            progress(t + 1, len(tests))
    return result


# ---------------------------------------------------------------- output

_PLOT_SCRIPT = '''"""Plot mean effective rate versus transmit power from rates.csv."""
import csv
import os
import sys

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

here = os.path.dirname(os.path.abspath(__file__))
rows = list(csv.DictReader(open(os.path.join(here, "rates.csv"))))
curves = {}
for r in rows:
    curves.setdefault(r["scheme"], []).append((float(r["power_dbm"]), float(r["mean_rate_bpshz"])))
markers = dict(perfect_csi="o", bim_light_training="s", bim_training_free="^",
               two_time_scale="d", location_based="v", full_training_bound="x")
for name, pts in curves.items():
    pts.sort()
    plt.plot([p for p, _ in pts], [r for _, r in pts], marker=markers.get(name, "."), label=name)
plt.xlabel("BS transmit power (dBm)")
plt.ylabel("Average effective rate (bps/Hz)")
plt.grid(True, alpha=0.3)
plt.legend()
out = sys.argv[1] if len(sys.argv) > 1 else os.path.join(here, "rates.png")
plt.savefig(out, dpi=150, bbox_inches="tight")
print(out)
'''


def write_results(result: ExperimentResult, out_dir) -> dict:
    """Write rates.csv, trials.csv and plot_rates.py; returns their paths."""
    os.makedirs(out_dir, exist_ok=True)
    paths = {name: os.path.join(out_dir, name) for name in ("rates.csv", "trials.csv", "plot_rates.py")}
    means = result.mean_rates()
    counts: dict = {}
    for r in result.records:
        counts[(r.scheme, r.power_dbm)] = counts.get((r.scheme, r.power_dbm), 0) + 1
    order = {s: i for i, s in enumerate(result.schemes)}
    keys = sorted(means, key=lambda k: (order.get(k[0], len(order)), k[1]))
    with open(paths["rates.csv"], "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(("scheme", "power_dbm", "mean_rate_bpshz", "trials"))
        for k in keys:
            w.writerow((k[0], repr(k[1]), repr(means[k]), counts[k]))
    with open(paths["trials.csv"], "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(("scheme", "power_dbm", "trial", "ue_x", "ue_y", "ue_z", "est_x", "est_y", "est_z",
                    "irs_index", "bs_index", "training_symbols", "gain", "rate_bpshz"))
        for r in result.records:
            w.writerow((r.scheme, repr(r.power_dbm), r.trial, *map(repr, r.ue), *map(repr, r.ue_estimate),
                        r.pair[0], r.pair[1], r.training_symbols, repr(r.gain), repr(r.rate)))
    with open(paths["plot_rates.py"], "w") as fh:
        fh.write(_PLOT_SCRIPT)
    return paths


def read_rates(path) -> dict:
    """{(scheme, power_dbm): (mean_rate, trials)} from a rates.csv."""
    out = {}
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            out[(row["scheme"], float(row["power_dbm"]))] = (float(row["mean_rate_bpshz"]), int(row["trials"]))
    return out
