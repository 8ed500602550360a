"""Command-line interface: scenario ingestion and deterministic emission.

Subcommands: ``identify``, ``predict``, ``doppler``, ``compare``,
``print-defaults``.  Exit codes: 0 success, 2 input/config error, 3
data-shape error, 4 numerical-domain error.
"""

import argparse
import csv
import json
import os
import sys

import numpy as np

from .config import load_config, load_route, ScenarioConfig
from .doppler import route_doppler, route_velocities
from .errors import ConfigError, DataShapeError, NumericalDomainError, UrbanPropError
from .geometry import load_map
from .metrics import empirical_cdf, ks_distance, rmse
from .pipeline import predict_route

MODEL_COLUMNS = ("pl_model_db", "pl_simplified_db", "pl_gpp_db",
                 "pl_free_space_db")


def _fmt(v):
    return f"{v:.10g}"


def _load_scenario(args):
    if not args.config:
        raise ConfigError("--config is required for this subcommand")
    cfg = load_config(args.config)
    if args.output:
        cfg.output_dir = args.output
    if cfg.map_path is None or cfg.route_path is None:
        raise ConfigError("config must set 'map_path' and 'route_path'")
    gmap = load_map(cfg.map_path)
    route = load_route(cfg.route_path)
    os.makedirs(cfg.output_dir, exist_ok=True)
    return cfg, gmap, route


def run_identify(args):
    cfg, gmap, route = _load_scenario(args)
    results = predict_route(cfg, gmap, route, workers=args.workers)
    path = os.path.join(cfg.output_dir, "identify.jsonl")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for res in results:
            cls = res.vis.classification
            bp = cls.breakpoint
            rec = {
                "index": res.index,
                "los": cls.los,
                "bp": None if bp is None else [bp.x, bp.y, bp.z],
                "sides": res.vis.flat_sides(),
                "visible": res.vis.flat_visible(),
            }
            fh.write(json.dumps(rec, sort_keys=True) + "\n")
    print(path)
    return 0


def run_predict(args):
    cfg, gmap, route = _load_scenario(args)
    results = predict_route(cfg, gmap, route, workers=args.workers)
    path = os.path.join(cfg.output_dir, "predict.csv")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["index", "x", "y", "z", "los", "pl_model_db",
                         "pl_free_space_db", "n_stages", "e_abs", "e_arg",
                         "pl_simplified_db", "pl_gpp_db"])
        for res in results:
            rx = res.rx
            writer.writerow([
                res.index, _fmt(rx.x), _fmt(rx.y), _fmt(rx.z),
                int(res.full.los), _fmt(res.full.pl_db),
                _fmt(res.pl_friis_db), res.full.n_stages,
                _fmt(abs(res.full.e_total)),
                _fmt(float(np.angle(res.full.e_total))),
                _fmt(res.simplified.pl_db), _fmt(res.pl_gpp_db),
            ])
    print(path)
    return 0


def run_doppler(args):
    cfg, gmap, route = _load_scenario(args)
    results = predict_route(cfg, gmap, route, workers=args.workers)
    samples = route_doppler(cfg, gmap, route, results=results)
    vels = route_velocities(route)
    path = os.path.join(cfg.output_dir, "doppler.csv")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["index", "x", "y", "speed_mps", "n_paths",
                         "f_mean_hz", "sigma_d_hz", "sigma_d_3gpp_hz",
                         "sigma_d_simplified_hz"])
        for i, (full, simp, sigma_gpp) in enumerate(samples):
            rx = route[i].position
            writer.writerow([
                i, _fmt(rx.x), _fmt(rx.y),
                _fmt(float(np.linalg.norm(vels[i]))), len(full.shifts),
                _fmt(full.weighted_mean), _fmt(full.spread), _fmt(sigma_gpp),
                _fmt(simp.spread),
            ])
    print(path)
    return 0


def _read_reference(path):
    try:
        with open(path, encoding="utf-8", newline="") as fh:
            reader = csv.DictReader(fh)
            if reader.fieldnames is None or [c.strip() for c in reader.fieldnames] != ["index", "value"]:
                raise DataShapeError(
                    f"reference {path} must have header 'index,value'")
            return [float(row["value"]) for row in reader]
    except OSError as exc:
        raise ConfigError(f"cannot read reference file {path}: {exc}") from exc
    except ValueError as exc:
        raise DataShapeError(f"bad reference value: {exc}") from exc


def _read_predictions(path):
    try:
        with open(path, encoding="utf-8", newline="") as fh:
            reader = csv.DictReader(fh)
            rows = list(reader)
    except OSError as exc:
        raise ConfigError(f"cannot read predictions file {path}: {exc}") from exc
    cols = {}
    for col in MODEL_COLUMNS:
        if rows and col in rows[0]:
            try:
                cols[col] = [float(r[col]) for r in rows]
            except ValueError as exc:
                raise DataShapeError(f"bad value in column {col}: {exc}") from exc
    if not cols:
        raise DataShapeError(f"no model columns found in {path}")
    return cols


def run_compare(args):
    if not args.reference or not args.predictions:
        raise ConfigError("compare requires --reference and --predictions")
    out_dir = args.output or "."
    os.makedirs(out_dir, exist_ok=True)
    reference = _read_reference(args.reference)
    models = _read_predictions(args.predictions)
    report = {"rmse_per_model": {}, "ks_per_model": {}}
    for name, series in sorted(models.items()):
        if len(series) != len(reference):
            raise DataShapeError(
                f"model '{name}' has {len(series)} rows, reference has "
                f"{len(reference)}")
        report["rmse_per_model"][name] = rmse(reference, series)
        report["ks_per_model"][name] = ks_distance(reference, series)
        _write_cdf(os.path.join(out_dir, f"cdf_{name}.csv"), series)
    _write_cdf(os.path.join(out_dir, "cdf_reference.csv"), reference)
    path = os.path.join(out_dir, "compare.json")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(report, fh, indent=2, sort_keys=True)
        fh.write("\n")
    print(path)
    return 0


def _write_cdf(path, series):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["x", "cdf"])
        for x, f in empirical_cdf(series):
            writer.writerow([_fmt(x), _fmt(f)])


def run_print_defaults(args):
    cfg = load_config(args.config) if args.config else ScenarioConfig()
    json.dump(cfg.defaults_dump(), sys.stdout, indent=2, sort_keys=True)
    sys.stdout.write("\n")
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="urbanprop",
        description="Site-specific urban radio propagation simulator")
    parser.add_argument("--config", help="scenario config JSON")
    parser.add_argument("--workers", type=int, default=1,
                        help="worker pool width for route evaluation")
    parser.add_argument("--output", help="output directory")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("identify", help="per-position visibility report")
    sub.add_parser("predict", help="per-position path loss CSV")
    sub.add_parser("doppler", help="per-position Doppler CSV")
    cmp_p = sub.add_parser("compare", help="metrics against a reference series")
    cmp_p.add_argument("--reference", help="reference CSV (index,value)")
    cmp_p.add_argument("--predictions", help="model predictions CSV")
    sub.add_parser("print-defaults", help="dump the effective configuration")
    return parser


COMMANDS = {
    "identify": run_identify,
    "predict": run_predict,
    "doppler": run_doppler,
    "compare": run_compare,
    "print-defaults": run_print_defaults,
}


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except NumericalDomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4
    except DataShapeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except UrbanPropError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
