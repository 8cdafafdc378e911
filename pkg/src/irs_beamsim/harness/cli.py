"""Command line entry point: ``irs-beamsim``.

Exit codes: 0 success, 2 configuration error, 3 I/O or file-format error.
"""
from __future__ import annotations

import argparse
import glob
import logging
import os
import sys
import time

from ..beamsearch import fft_search
from ..bim import build_bim, load_bim, save_bim
from ..channel import bs_irs_matrix, cascade, irs_ue_vector
from ..codebook import make_bs_codebook, make_irs_codebook
from ..env_model import export_paths, import_paths, read_locations, trace_paths, write_locations
from ..errors import (BeamSimError, ConfigError, FingerprintMismatch, FormatVersionMismatch,
                      ParseError)
from .config import load_config
from .experiment import (build_scenario_bim, read_rates, run_experiment, test_locations,
                         training_locations, write_results)

log = logging.getLogger("irs_beamsim")

EXIT_OK, EXIT_CONFIG, EXIT_IO = 0, 2, 3


def _config(args):
    return load_config(args.config, args.preset)


def cmd_trace(args) -> int:
    cfg = _config(args)
    os.makedirs(args.out, exist_ok=True)
    train = training_locations(cfg)
    tests = test_locations(cfg, train)
    for kind, pts in (("train", train), ("test", tests)):
        write_locations(pts, os.path.join(args.out, f"{kind}_locations.csv"))
        for i, q in enumerate(pts):
            export_paths(trace_paths(cfg.layout, q), os.path.join(args.out, f"{kind}_{i:05d}.csv"))
    print(f"traced {len(train)} training and {len(tests)} test locations into {args.out}")
    return EXIT_OK


def _path_files(directory, kind, n):
    files = sorted(glob.glob(os.path.join(directory, f"{kind}_[0-9]*.csv")))
    if len(files) != n:
        raise OSError(f"{directory}: {n} {kind} locations but {len(files)} path files")
    return files


def cmd_import_paths(args) -> int:
    """Label locations from externally traced path files and optionally write a map."""
    cfg = _config(args)
    locs = read_locations(os.path.join(args.input, "train_locations.csv"))
    files = _path_files(args.input, "train", len(locs))
    V, F = make_irs_codebook(cfg.irs_cfg), make_bs_codebook(cfg.bs_cfg)
    labels = {}
    n_paths = 0
    for q, path in zip(locs, files):
        try:
            ps = import_paths(path)
        except ParseError as exc:
            err = ParseError(f"{path}: {exc}")
            err.line = exc.line
            raise err from None
        n_paths += len(ps.bs_irs_paths) + len(ps.irs_ue_paths)
        phi = cascade(irs_ue_vector(ps.irs_ue_paths, cfg.irs_cfg),
                      bs_irs_matrix(ps.bs_irs_paths, cfg.bs_cfg, cfg.irs_cfg))
        labels[q] = fft_search(phi, V, F).pair
    print(f"imported {len(files)} path files, {n_paths} paths")
    if args.out:
        db = build_bim(labels.__getitem__, locs, cfg.irs_cfg.shape, cfg.bs_cfg.shape)
        save_bim(db, args.out)
        print(f"wrote {args.out} ({len(db)} entries, {db.fingerprint})")
    return EXIT_OK


def cmd_build_bim(args) -> int:
    cfg = _config(args)
    t0 = time.perf_counter()
    db = build_scenario_bim(cfg)
    save_bim(db, args.out)
    print(f"wrote {args.out} ({len(db)} entries, {db.fingerprint}) in {time.perf_counter() - t0:.1f} s")
    return EXIT_OK


def cmd_run(args) -> int:
    cfg = _config(args)
    bim = None
    if args.bim:
        bim = load_bim(args.bim)
        if bim.irs_shape != cfg.irs_cfg.shape or bim.bs_shape != cfg.bs_cfg.shape:
            raise FingerprintMismatch(f"{args.bim} is {bim.fingerprint}, config uses "
                                      f"{cfg.irs_cfg},{cfg.bs_cfg}")

    def progress(done, total):
        if done == total or done % max(1, total // 10) == 0:
            log.info("trial %d/%d", done, total)

    t0 = time.perf_counter()
    result = run_experiment(cfg, bim, progress=progress)
    paths = write_results(result, args.out)
    print(f"{result.n_trials} trials in {time.perf_counter() - t0:.1f} s; wrote {paths['rates.csv']}")
    _print_table(read_rates(paths["rates.csv"]))
    return EXIT_OK


def _print_table(rates: dict) -> None:
    schemes = list(dict.fromkeys(s for s, _ in rates))
    powers = sorted({p for _, p in rates})
    width = max(len(s) for s in schemes)
    print(" " * width + "".join(f"{p:>9g}" for p in powers) + "  (dBm)")
    for s in schemes:
        cells = "".join(f"{rates[(s, p)][0]:9.3f}" if (s, p) in rates else " " * 9 for p in powers)
        print(f"{s:<{width}}{cells}")


def cmd_report(args) -> int:
    rates = read_rates(os.path.join(args.input, "rates.csv"))
    if not rates:
        raise OSError(f"{args.input}/rates.csv has no data rows")
    trials = {n for _, n in rates.values()}
    print(f"mean effective rate (bps/Hz), {'/'.join(map(str, sorted(trials)))} trials per point")
    _print_table(rates)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="irs-beamsim", description="IRS-aided beam selection simulator")
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="command", required=True)

    def with_config(sp):
        sp.add_argument("--config", help="JSON scenario config")
        sp.add_argument("--preset", help="named base scenario (full, desk, mid)")
        return sp

    sp = with_config(sub.add_parser("trace", help="trace path files for training and test locations"))
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=cmd_trace)

    sp = with_config(sub.add_parser("import-paths", help="label locations from path files"))
    sp.add_argument("--in", dest="input", required=True, help="directory written by trace")
    sp.add_argument("--out", help="write a beam index map built from the imported paths")
    sp.set_defaults(func=cmd_import_paths)

    sp = with_config(sub.add_parser("build-bim", help="build and save the beam index map"))
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=cmd_build_bim)

    sp = with_config(sub.add_parser("run", help="run the scheme comparison"))
    sp.add_argument("--bim", help="reuse a saved map instead of rebuilding it")
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=cmd_run)

    sp = sub.add_parser("report", help="print the rate table of a results directory")
    sp.add_argument("--in", dest="input", required=True)
    sp.set_defaults(func=cmd_report)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except (ConfigError, FingerprintMismatch) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (OSError, ParseError, FormatVersionMismatch) as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except BeamSimError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
