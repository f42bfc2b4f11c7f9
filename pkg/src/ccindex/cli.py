"""Command-line entry point.

Exit codes: 0 success, 1 I/O error, 2 validation error (including parse and
alignment errors).  Messages go to standard error.
"""

import argparse
import csv
import os
import sys
import time
from pathlib import Path

from .errors import ValidationError
from .grid import CrsMode, GridGeometry
from .io import (
    CoverageMap,
    CoverageMeta,
    atomic_write_text,
    check_alignment,
    load_ascii_grid,
    load_bool_grid,
    save_ascii_grid,
    save_bool_grid,
    threshold_coverage,
)
from .metrics import CciReport, cci_from_rasters, concentration_curve, trend_table
from .rurality import ThresholdSet, format_cities_csv, read_cities_csv, rurality_map
from .synth import RolloutStrategy, Strategy, gen_scenario, rollout

EXIT_OK, EXIT_IO, EXIT_VALIDATION = 0, 1, 2


class _Timer:
    def __init__(self, verbose):
        self.verbose = verbose
        self.t0 = time.perf_counter()

    def __call__(self, label):
        if self.verbose:
            print(f"[{time.perf_counter() - self.t0:8.3f}s] {label}", file=sys.stderr)


def _crs(args):
    return CrsMode(args.crs)


def _workers(args):
    return -1 if args.threads is None else args.threads


def _load_mask(args, geometry):
    if not args.mask:
        return None
    mask = load_bool_grid(args.mask, _crs(args))
    check_alignment(geometry, mask.geometry)
    return mask


def cmd_rurality(args):
    tick = _Timer(args.verbose)
    crs = _crs(args)
    if args.template:
        geometry = load_ascii_grid(args.template, crs).geometry
    else:
        flags = (args.ncols, args.nrows, args.xllcorner, args.yllcorner, args.cellsize)
        if any(v is None for v in flags):
            raise ValidationError(
                "give --template or all of --ncols --nrows --xllcorner --yllcorner --cellsize")
        geometry = GridGeometry(*flags, crs)
    registry = read_cities_csv(args.cities, crs)
    thresholds = ThresholdSet.parse(args.thresholds)
    mask = _load_mask(args, geometry)
    tick("inputs loaded")
    partials = {} if args.partials_dir else None
    result = rurality_map(geometry, mask, registry, thresholds, nodata=args.nodata,
                          workers=_workers(args), partials=partials)
    tick("rurality computed")
    save_ascii_grid(result, args.out)
    if partials is not None:
        os.makedirs(args.partials_dir, exist_ok=True)
        for p, raster in partials.items():
            save_ascii_grid(raster, os.path.join(args.partials_dir, f"partial_{p}.asc"))
    tick("outputs written")
    return EXIT_OK


def _load_coverage(args, geometry):
    crs = _crs(args)
    meta = CoverageMeta(
        epoch_label=args.epoch_label or Path(args.coverage or args.rates).stem,
        generation_tag=args.generation,
        rate_threshold_mbps=args.rate_threshold,
        sensitivity_tag=args.sensitivity,
    )
    if args.coverage and args.rates:
        raise ValidationError("give only one of --coverage and --rates")
    if args.coverage:
        raster = load_bool_grid(args.coverage, crs)
        check_alignment(geometry, raster.geometry)
        return CoverageMap(raster, meta)
    if not args.rates:
        raise ValidationError("one of --coverage or --rates is required")
    if args.min_rate is None:
        raise ValidationError("--rates needs --min-rate")
    rates = load_ascii_grid(args.rates, crs)
    check_alignment(geometry, rates.geometry)
    return threshold_coverage(rates, args.min_rate, meta)


def _load_index_inputs(args):
    rurality = load_ascii_grid(args.rurality, _crs(args))
    coverage = _load_coverage(args, rurality.geometry)
    mask = _load_mask(args, rurality.geometry)
    return rurality, coverage, mask


def cmd_index(args):
    tick = _Timer(args.verbose)
    rurality, coverage, mask = _load_index_inputs(args)
    population = None
    if args.population:
        population = load_ascii_grid(args.population, _crs(args))
        check_alignment(rurality.geometry, population.geometry)
    tick("inputs loaded")
    report = cci_from_rasters(rurality, coverage, mask, population)
    tick("index computed")
    atomic_write_text(args.out, report.to_json())
    if args.curve:
        atomic_write_text(args.curve, concentration_curve(rurality, coverage, mask).to_csv())
    print(f"CCI={report.cci!r} ACR={report.acr!r}")
    return EXIT_OK


def cmd_curve(args):
    rurality, coverage, mask = _load_index_inputs(args)
    atomic_write_text(args.out, concentration_curve(rurality, coverage, mask).to_csv())
    return EXIT_OK


def _read_manifest(path):
    """Manifest CSV with header ``epoch,report``; report paths relative to the manifest."""
    base = Path(path).parent
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    if not rows or [h.strip() for h in rows[0]] != ["epoch", "report"]:
        raise ValidationError(f"{path}: manifest must start with header epoch,report")
    pairs = []
    for row in rows[1:]:
        if not row:
            continue
        if len(row) != 2:
            raise ValidationError(f"{path}: manifest rows need 2 fields")
        pairs.append((row[0], str(base / row[1])))
    return pairs


def cmd_trend(args):
    if args.manifest:
        if args.reports or args.label:
            raise ValidationError("--manifest cannot be combined with report paths or --label")
        pairs = _read_manifest(args.manifest)
        labels = [p[0] for p in pairs]
        paths = [p[1] for p in pairs]
    else:
        paths = args.reports
        labels = args.label or None
    if not paths:
        raise ValidationError("no reports given")
    reports = []
    for path in paths:
        with open(path, encoding="utf-8") as fh:
            reports.append(CciReport.from_json(fh.read()))
    table = trend_table(reports, labels)
    atomic_write_text(args.csv, table.to_csv())
    if args.svg:
        atomic_write_text(args.svg, table.to_svg(args.title))
    return EXIT_OK


def cmd_synth(args):
    scenario = gen_scenario(args.seed, args.ncols, args.nrows, args.cities,
                            args.max_population, args.cell_size)
    out = Path(args.outdir)
    out.mkdir(parents=True, exist_ok=True)
    atomic_write_text(out / "cities.csv", format_cities_csv(scenario.registry))
    save_ascii_grid(scenario.rurality, out / "rurality.asc")
    save_bool_grid(scenario.initial_coverage.raster, out / "coverage.asc")
    if args.strategy:
        strategy = RolloutStrategy(Strategy(args.strategy), args.rollout_seed)
        for cov in rollout(scenario, strategy, args.steps):
            save_bool_grid(cov.raster, out / f"coverage_{cov.meta.epoch_label}.asc")
    return EXIT_OK


def _common(p):
    p.add_argument("--crs", choices=[m.value for m in CrsMode], default="planar",
                   help="coordinate mode shared by all grids and cities (default: planar)")
    p.add_argument("--threads", type=int, default=None,
                   help="worker threads for nearest-city queries (default: all)")
    p.add_argument("--verbose", action="store_true", help="timing on standard error")


def _coverage_args(p):
    p.add_argument("--rurality", required=True, help="rurality ASCII grid")
    p.add_argument("--coverage", help="binary coverage ASCII grid (1/0/nodata)")
    p.add_argument("--rates", help="data-rate ASCII grid (Mbit/s), thresholded by --min-rate")
    p.add_argument("--min-rate", type=float, help="covered iff rate >= this many Mbit/s")
    p.add_argument("--mask", help="mask grid; only cells with value 1 are counted")
    p.add_argument("--epoch-label", help="epoch label for the report (default: coverage file stem)")
    p.add_argument("--generation", help="generation tag, e.g. 4G")
    p.add_argument("--rate-threshold", type=float, help="data-rate tag for a binary coverage map")
    p.add_argument("--sensitivity", help="sensitivity tag")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="ccindex", description="Rurality maps and cellular coverage inequality indices.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("rurality", help="compute a rurality map from a city registry")
    _common(p)
    p.add_argument("--cities", required=True, help="CSV with header name,population,x,y")
    p.add_argument("--template", help="ASCII grid whose geometry is used")
    p.add_argument("--ncols", type=int)
    p.add_argument("--nrows", type=int)
    p.add_argument("--xllcorner", type=float)
    p.add_argument("--yllcorner", type=float)
    p.add_argument("--cellsize", type=float)
    p.add_argument("--thresholds", default="200,1000,3000,30000,60000",
                   help="comma-separated population thresholds")
    p.add_argument("--mask", help="mask grid; only cells with value 1 get a value")
    p.add_argument("--nodata", type=float, default=-9999.0)
    p.add_argument("--out", required=True)
    p.add_argument("--partials-dir", help="also write each partial map here")
    p.set_defaults(func=cmd_rurality)

    p = sub.add_parser("index", help="compute the CCI report")
    _common(p)
    _coverage_args(p)
    p.add_argument("--population", help="population-count ASCII grid (adds PCR)")
    p.add_argument("--out", required=True, help="report JSON path")
    p.add_argument("--curve", help="also write the concentration curve CSV")
    p.set_defaults(func=cmd_index)

    p = sub.add_parser("curve", help="write the concentration curve CSV")
    _common(p)
    _coverage_args(p)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_curve)

    p = sub.add_parser("trend", help="tabulate and plot CCI against ACR over epochs")
    _common(p)
    p.add_argument("reports", nargs="*", help="report JSON files")
    p.add_argument("--label", action="append", help="epoch label per report, in order")
    p.add_argument("--manifest", help="CSV with header epoch,report")
    p.add_argument("--csv", required=True)
    p.add_argument("--svg")
    p.add_argument("--title")
    p.set_defaults(func=cmd_trend)

    p = sub.add_parser("synth", help="write a synthetic scenario")
    _common(p)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--ncols", type=int, required=True)
    p.add_argument("--nrows", type=int, required=True)
    p.add_argument("--cities", type=int, default=20)
    p.add_argument("--max-population", type=int, default=100_000)
    p.add_argument("--cell-size", type=float, default=250.0)
    p.add_argument("--strategy", choices=[s.value for s in Strategy])
    p.add_argument("--rollout-seed", type=int, default=0)
    p.add_argument("--steps", type=int, default=10)
    p.add_argument("--outdir", required=True)
    p.set_defaults(func=cmd_synth)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ValidationError as exc:
        print(f"ccindex {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as exc:
        print(f"ccindex {args.command}: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
