"""Command-line front end.

Subcommands
-----------
simulate   run one scenario, write ``samples.csv`` and ``summary.csv``
cdf        run one scenario, write plot-ready ``cdf.csv``
reproduce  rerun the cells of a published results table and compare

Exit codes: 0 success, 2 configuration error, 3 out-of-tolerance cells in
``reproduce --strict``. The worker count is taken from the
``MIMO_UPLINK_WORKERS`` environment variable (default 1).
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from importlib import resources
from pathlib import Path

import numpy as np

from .config import ScenarioConfig, config_from_mapping, load_config
from .errors import ConfigurationError
from .montecarlo import ExperimentPlan, likely_rate, run_experiment, throughput_from_se

log = logging.getLogger("mimo_uplink")

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_TOLERANCE = 3

SAMPLE_COLUMNS = ["realization_index", "user_index", "config", "power",
                  "sinr_linear", "se_bps_hz", "eta"]
SUMMARY_COLUMNS = ["config", "power", "percentile", "se", "throughput_mbps",
                   "n_samples", "seed"]

# (flag, config key, type)
_SCENARIO_FLAGS = [
    ("--morphology", "morphology", str),
    ("--deployment", "deployment", str),
    ("--decoder", "decoder", str),
    ("--power", "power", str),
    ("--M", "M", int),
    ("--K", "K", int),
    ("--tau", "tau", int),
    ("--n-largescale", "n_largescale", int),
    ("--n-smallscale", "n_smallscale", int),
    ("--seed", "seed", int),
    ("--out", "out", str),
]

REDUCED_N = 200
REDUCED_N_LARGE_M = 50
LARGE_M = 10000
FULL_N = 1000
TOLERANCE = 0.6
TOLERANCE_LARGE_M = 0.8


def _fmt(x) -> str:
    return repr(float(x))


def _header(writer_file, sc: ScenarioConfig):
    writer_file.write("# config: " + json.dumps(sc.provenance(), sort_keys=True) + "\n")


def _open_csv(path: Path):
    path.parent.mkdir(parents=True, exist_ok=True)
    return open(path, "w", newline="", encoding="utf-8")


def write_samples_csv(path, summaries: dict, sc: ScenarioConfig):
    with _open_csv(Path(path)) as f:
        _header(f, sc)
        w = csv.writer(f, lineterminator="\n")
        w.writerow(SAMPLE_COLUMNS)
        for (config, power), s in summaries.items():
            se = s.se
            for i in range(s.sinr.shape[0]):
                for k in range(s.sinr.shape[1]):
                    w.writerow([i, k, config, power, _fmt(s.sinr[i, k]),
                                _fmt(se[i, k]), _fmt(s.eta[i, k])])


def summary_rows(summaries: dict, sc: ScenarioConfig):
    for (config, power), s in summaries.items():
        for p in s.percentiles:
            se = likely_rate(s, p)
            mbps = throughput_from_se(se, sc.uplink_bandwidth_hz) / 1e6
            yield [config, power, _fmt(p), _fmt(se), _fmt(mbps), s.n_samples, sc.seed]


def write_summary_csv(path, summaries: dict, sc: ScenarioConfig):
    with _open_csv(Path(path)) as f:
        _header(f, sc)
        w = csv.writer(f, lineterminator="\n")
        w.writerow(SUMMARY_COLUMNS)
        w.writerows(summary_rows(summaries, sc))


def write_cdf_csv(path, summaries: dict, sc: ScenarioConfig):
    """Sorted SE with empirical CDF; cf-MR adds the two SINR-cap curves.

    Each SE column is sorted on its own so that every column paired with
    `cumulative_probability` is an empirical CDF.
    """
    with_bounds = any(s.bound is not None for s in summaries.values())
    cols = ["config", "power", "cumulative_probability", "se_bps_hz"]
    if with_bounds:
        cols += ["bound_se_bps_hz", "maxmin_bound_se_bps_hz"]
    with _open_csv(Path(path)) as f:
        _header(f, sc)
        w = csv.writer(f, lineterminator="\n")
        w.writerow(cols)
        for (config, power), s in summaries.items():
            se = s.samples
            n = se.size
            extra = []
            if with_bounds and s.bound is not None:
                per_user = np.sort(np.log2(1.0 + s.bound), axis=None)
                common = np.sort(np.repeat(np.log2(1.0 + s.common_bound),
                                           s.sinr.shape[1]))
                extra = [per_user, common]
            for j in range(n):
                row = [config, power, _fmt((j + 1) / n), _fmt(se[j])]
                if with_bounds:
                    row += [_fmt(e[j]) for e in extra] if extra else ["", ""]
                w.writerow(row)


def read_samples_csv(path):
    """Load a samples CSV as a list of row dicts (comment lines skipped)."""
    with open(path, newline="", encoding="utf-8") as f:
        lines = [ln for ln in f if not ln.startswith("#")]
    return list(csv.DictReader(lines))


def _scenario_from_args(args) -> ScenarioConfig:
    overrides = {key: getattr(args, key) for _, key, _ in _SCENARIO_FLAGS
                 if getattr(args, key) is not None}
    if args.config:
        return load_config(args.config, overrides)
    return config_from_mapping(overrides)


def _add_scenario_flags(p):
    p.add_argument("--config", help="JSON scenario file; flags override its values")
    for flag, key, typ in _SCENARIO_FLAGS:
        p.add_argument(flag, dest=key, type=typ, default=None)


def cmd_simulate(args) -> int:
    sc = _scenario_from_args(args)
    summaries = run_experiment(ExperimentPlan.from_scenario(sc))
    out = Path(sc.out)
    write_samples_csv(out / "samples.csv", summaries, sc)
    write_summary_csv(out / "summary.csv", summaries, sc)
    for row in summary_rows(summaries, sc):
        config, power, p, se, mbps = row[:5]
        print(f"{config:6s} {power:7s} p{float(p):<5g} SE {float(se):6.3f} bps/Hz"
              f"  {float(mbps):7.2f} Mbps")
    return EXIT_OK


def cmd_cdf(args) -> int:
    sc = _scenario_from_args(args)
    summaries = run_experiment(ExperimentPlan.from_scenario(sc))
    path = Path(sc.out) / "cdf.csv"
    write_cdf_csv(path, summaries, sc)
    print(f"wrote {path}")
    return EXIT_OK


def load_targets() -> dict:
    text = resources.files("mimo_uplink").joinpath("data/table_targets.json").read_text()
    return json.loads(text)


def reproduce_table(table: str, scale: str = "reduced", seed: int = 0,
                    n_smallscale: int = 200, morphologies=None, decoders=None):
    """Simulate every cell of a published table.

    Returns a list of dicts with the published value, the simulated value,
    their absolute difference, the tolerance applied and a pass flag.
    """
    targets = load_targets()
    if table not in targets:
        raise ConfigurationError(f"unknown table {table!r}; expected one of {sorted(targets)}")
    if scale not in ("full", "reduced"):
        raise ConfigurationError(f"scale must be 'full' or 'reduced', got {scale!r}")
    deployment = "cellular" if table == "cellular" else "cellfree"

    groups = {}
    for cell in targets[table]["cells"]:
        if morphologies and cell["morphology"] not in morphologies:
            continue
        if decoders and cell["decoder"] not in decoders:
            continue
        groups.setdefault((cell["morphology"], cell["decoder"], cell["M"]), []).append(cell)

    report = []
    for (morph, decoder, M), cells in groups.items():
        large = deployment == "cellfree" and decoder == "mr" and M >= LARGE_M
        if scale == "full":
            n, tol = FULL_N, TOLERANCE
        else:
            n = REDUCED_N_LARGE_M if large else REDUCED_N
            tol = TOLERANCE_LARGE_M if large else TOLERANCE
        sc = ScenarioConfig(morphology=morph, M=M, deployment=deployment,
                            decoder=decoder, power="both", n_largescale=n,
                            n_smallscale=n_smallscale, seed=seed)
        log.info("running %s %s %s M=%d n=%d", table, morph, decoder, M, n)
        summaries = run_experiment(ExperimentPlan.from_scenario(sc))
        for cell in cells:
            s = summaries[sc.config_tag, cell["power"]]
            sim = likely_rate(s, cell["percentile"])
            delta = abs(sim - cell["se"])
            report.append(dict(table=table, morphology=morph, decoder=decoder, M=M,
                               power=cell["power"], percentile=cell["percentile"],
                               target=cell["se"], simulated=sim, delta=delta,
                               tolerance=tol, n_largescale=n, ok=delta <= tol))
    return report


def cmd_reproduce(args) -> int:
    report = reproduce_table(args.table, args.scale, seed=args.seed or 0,
                             morphologies=args.morphology, decoders=args.decoder)
    print(f"{'morph':9s}{'dec':4s}{'M':>7s} {'power':7s}{'pct':>4s}"
          f"{'target':>7s}{'sim':>8s}{'|d|':>7s}  status")
    for r in report:
        print(f"{r['morphology']:9s}{r['decoder']:4s}{r['M']:7d} {r['power']:7s}"
              f"{r['percentile']:4d}{r['target']:7.2f}{r['simulated']:8.3f}"
              f"{r['delta']:7.3f}  {'ok' if r['ok'] else 'OUT OF TOLERANCE'}")
    if args.out:
        path = Path(args.out) / f"reproduce_{args.table}.csv"
        with _open_csv(path) as f:
            w = csv.DictWriter(f, fieldnames=list(report[0]), lineterminator="\n")
            w.writeheader()
            w.writerows(report)
    if args.strict and not all(r["ok"] for r in report):
        return EXIT_TOLERANCE
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mimo-uplink",
        description="Uplink Massive MIMO spectral-efficiency simulator")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="run a scenario and write CSV outputs")
    _add_scenario_flags(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("cdf", help="write a plot-ready CDF CSV")
    _add_scenario_flags(p)
    p.set_defaults(func=cmd_cdf)

    p = sub.add_parser("reproduce", help="compare against a published table")
    p.add_argument("--table", choices=["cellular", "cellfree"], required=True)
    p.add_argument("--scale", choices=["full", "reduced"], default="reduced")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--morphology", action="append",
                   choices=["urban", "suburban", "rural"])
    p.add_argument("--decoder", action="append", choices=["mr", "zf"])
    p.add_argument("--out", default=None)
    p.add_argument("--strict", action="store_true",
                   help="exit with status 3 if any cell is out of tolerance")
    p.set_defaults(func=cmd_reproduce)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except ConfigurationError as exc:
        print(f"error: {exc.args[0]}", file=sys.stderr)
        return EXIT_CONFIG
