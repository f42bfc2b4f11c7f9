"""Exit criteria for the toolkit; each test reports one PASS/FAIL line."""

import json
import subprocess
import sys
import time

import numpy as np
import pytest
from conftest import coverage_map, random_registry, record_acceptance
from oracles import brute_cci, brute_nearest_km

from ccindex import (
    CciReport,
    City,
    CoverageMeta,
    CrsMode,
    GridGeometry,
    RolloutStrategy,
    ScalarRaster,
    ThresholdSet,
    cci,
    cci_from_rasters,
    concentration_curve,
    filter_cities,
    gen_scenario,
    load_ascii_grid,
    partial_rurality,
    rollout,
    rurality_map,
    save_ascii_grid,
    save_bool_grid,
    trend_table,
)
from ccindex.cli import main
from ccindex.grid import BoolRaster
from ccindex.rurality import CityRegistry, format_cities_csv


def gate(number, title, ok, detail=""):
    status = "PASS" if ok else "FAIL"
    record_acceptance(f"[{status}] AC{number:<2} {title}" + (f"  ({detail})" if detail else ""))
    assert ok, f"AC{number} {title}: {detail}"


def _report(label, n_cov, cci_value):
    return CciReport(cci=cci_value, acr=n_cov / 10000, n_cells=10000, n_covered=n_cov,
                     distinct_rurality_levels=10000, meta=CoverageMeta(label))


def test_ac01_paper_values_as_transcription_fixtures():
    finland = trend_table([_report("2024", 2739, 0.584), _report("2025", 2865, 0.579)])
    sweden = trend_table([_report("2013", 84, 0.84), _report("2019", 811, 0.52)])
    arctic = trend_table([_report("2013", 15, 0.92), _report("2019", 199, 0.23)])
    ok = (finland.to_csv() == "epoch,acr,cci\n2024,0.2739,0.584\n2025,0.2865,0.579\n"
          and sweden.to_csv() == "epoch,acr,cci\n2013,0.0084,0.84\n2019,0.0811,0.52\n"
          and arctic.to_csv() == "epoch,acr,cci\n2013,0.0015,0.92\n2019,0.0199,0.23\n")
    d = json.loads(_report("2024", 2739, 0.584).to_json())
    ok = ok and (d["acr"], d["cci"]) == (0.2739, 0.584)
    gate(1, "published figures reproduce exactly as CSV/JSON display fixtures", ok)


def test_ac02_full_coverage_is_diagonal():
    rng = np.random.default_rng(2)
    t0 = time.perf_counter()
    worst = 0.0
    for seed in range(100):
        ncols, nrows = (int(v) for v in rng.integers(1, 51, 2))
        s = gen_scenario(seed, ncols, nrows, int(rng.integers(1, 40)))
        r = s.rurality
        if seed % 2:
            # quantised ruralities add ties
            r = ScalarRaster(s.geometry, np.round(r.values, 0))
        full = coverage_map(s.geometry, np.ones(s.geometry.shape, bool))
        worst = max(worst, abs(cci_from_rasters(r, full).cci))
    elapsed = time.perf_counter() - t0
    gate(2, "full coverage gives CCI = 0 on 100 scenarios", worst <= 1e-12 and elapsed < 5.0,
         f"max |cci| = {worst:.3g}, {elapsed:.2f}s < 5s")


def test_ac03_closed_form_rollout():
    rng = np.random.default_rng(3)
    t0 = time.perf_counter()
    worst = 0.0
    scenarios = 0
    seed = 0
    while scenarios < 20:
        seed += 1
        ncols, nrows = (int(v) for v in rng.integers(2, 41, 2))
        s = gen_scenario(seed, ncols, nrows, int(rng.integers(1, 30)))
        if np.unique(s.rurality.values).size != s.geometry.n_cells:
            continue
        scenarios += 1
        for kind, sign in (("urban_first", 1.0), ("rural_first", -1.0)):
            for cov in rollout(s, RolloutStrategy(kind), 10):
                rep = cci_from_rasters(s.rurality, cov)
                worst = max(worst, abs(rep.cci - sign * (1.0 - rep.acr)))
    elapsed = time.perf_counter() - t0
    gate(3, "URBAN_FIRST CCI = 1 - ACR and RURAL_FIRST CCI = -(1 - ACR), 20 x 10 steps",
         worst <= 1e-12 and elapsed < 10.0, f"max error {worst:.3g}, {elapsed:.2f}s < 10s")


def test_ac04_cci_matches_brute_force():
    rng = np.random.default_rng(4)
    worst = 0.0
    for _ in range(500):
        nrows = int(rng.integers(1, 9))
        ncols = int(rng.integers(1, 64 // nrows + 1))
        g = GridGeometry(ncols, nrows, 0.0, 0.0, 250.0)
        n = g.n_cells
        levels = int(rng.integers(1, n + 1))
        r = rng.integers(0, levels, n) * 0.37
        covered = rng.random(n) < rng.random()
        if not covered.any():
            covered[rng.integers(n)] = True
        rep = cci_from_rasters(ScalarRaster(g, r), coverage_map(g, covered))
        worst = max(worst, abs(rep.cci - brute_cci(r.tolist(), covered.tolist())))
    gate(4, "pipeline CCI equals sort-group-integrate oracle on 500 instances",
         worst <= 1e-12, f"max error {worst:.3g}")


@pytest.mark.parametrize("mode", [CrsMode.PLANAR_METERS, CrsMode.GEOGRAPHIC_DEGREES])
def test_ac05_nearest_city_matches_exhaustive_scan(mode):
    rng = np.random.default_rng(5)
    worst = 0.0
    for _ in range(100):
        ncols, nrows = (int(v) for v in rng.integers(1, 51, 2))
        if mode is CrsMode.PLANAR_METERS:
            g = GridGeometry(ncols, nrows, rng.uniform(-1e5, 1e5), rng.uniform(-1e5, 1e5),
                             rng.uniform(10, 2000), mode)
        else:
            size = rng.uniform(0.005, 1.5)
            g = GridGeometry(ncols, nrows, rng.uniform(-180, 100),
                             rng.uniform(-89, 89 - nrows * size), size, mode)
        cities = list(random_registry(rng, g, int(rng.integers(1, 101))))
        got = partial_rurality(g, None, cities).values
        want = brute_nearest_km(g, cities, geographic=mode is CrsMode.GEOGRAPHIC_DEGREES)
        rel = np.abs(got - want) / np.maximum(np.abs(want), 1e-300)
        rel[(want == 0) & (got == 0)] = 0.0
        worst = max(worst, float(np.max(np.where(want < 1e-9, np.abs(got - want), rel))))
    gate(5, f"nearest-city distances equal exhaustive scan ({mode.value})",
         worst <= 1e-9, f"max rel error {worst:.3g}")


def test_ac06_rurality_is_mean_of_partials():
    ts = ThresholdSet()
    worst = 0.0
    for seed in range(30):
        s = gen_scenario(seed, 10 + seed, 40 - seed, 3 + seed)
        parts = [partial_rurality(s.geometry, None, filter_cities(s.registry, p)).values
                 for p in ts]
        mean = np.mean(np.stack(parts), axis=0)
        err = np.abs(s.rurality.values - mean) / np.maximum(1.0, np.abs(mean))
        worst = max(worst, float(err.max()))
    gate(6, "rurality map equals mean of the five partial maps", worst <= 1e-12,
         f"max error {worst:.3g}")


_TRANSFORMS = [
    lambda x: 2.0 * x,
    lambda x: x ** 3,
    lambda x: np.exp(x / 40.0),
    lambda x: np.sqrt(x + 1.0),
    lambda x: np.arctan(x / 100.0),
    lambda x: x + 1000.0,
]


def _curve_tuple(r, cov):
    c = concentration_curve(r, cov)
    return c.u.tobytes(), c.L.tobytes(), cci(c)


def test_ac07a_invariant_under_increasing_transforms():
    rng = np.random.default_rng(7)
    ok = True
    trials = 0
    while trials < 200:
        g = GridGeometry(int(rng.integers(1, 30)), int(rng.integers(1, 30)), 0, 0, 250)
        vals = rng.integers(0, int(rng.integers(1, 60)), g.shape) * 0.5
        f = _TRANSFORMS[trials % len(_TRANSFORMS)]
        tv = f(vals)
        # keep only transforms that stay strictly increasing in floating point
        u0, u1 = np.unique(vals), np.unique(tv)
        if u0.size != u1.size:
            continue
        trials += 1
        covered = rng.random(g.shape) < 0.4
        covered.flat[0] = True
        cov = coverage_map(g, covered)
        ok &= _curve_tuple(ScalarRaster(g, vals), cov) == _curve_tuple(ScalarRaster(g, tv), cov)
    gate(7, "curve bit-identical under strictly increasing transforms (200)", ok)


def test_ac07b_invariant_under_permutation():
    rng = np.random.default_rng(71)
    ok = True
    for trial in range(200):
        s = gen_scenario(trial, int(rng.integers(1, 25)), int(rng.integers(1, 25)),
                         int(rng.integers(1, 10)))
        g = s.geometry
        vals = s.rurality.values
        if trial % 2:
            vals = np.round(vals, 1)
        covered = rng.random(g.shape) < 0.5
        covered.flat[0] = True
        perm = rng.permutation(g.n_cells)
        base = _curve_tuple(ScalarRaster(g, vals), coverage_map(g, covered))
        shuffled = _curve_tuple(ScalarRaster(g, vals.ravel()[perm]),
                                coverage_map(g, covered.ravel()[perm]))
        ok &= base == shuffled
    gate(7, "curve bit-identical under cell permutations (200)", ok)


def test_ac08_threshold_and_city_monotonicity():
    rng = np.random.default_rng(8)
    ok = True
    for _ in range(100):
        g = GridGeometry(int(rng.integers(1, 25)), int(rng.integers(1, 25)),
                         rng.uniform(-1e4, 1e4), rng.uniform(-1e4, 1e4), 250.0)
        reg = random_registry(rng, g, int(rng.integers(2, 60)))
        present = sorted({c.population for c in reg})
        ps = sorted(rng.choice(present, size=min(3, len(present)), replace=False).tolist())
        parts = [partial_rurality(g, None, filter_cities(reg, p)).values for p in ps]
        ok &= all(np.all(a <= b) for a, b in zip(parts, parts[1:]))

        ts = ThresholdSet(ps)
        before = rurality_map(g, None, reg, ts).values
        w = g.ncols * g.cell_size
        extra = City("new", int(rng.integers(1, 150_000)), g.x_origin + rng.uniform(0, w),
                     g.y_origin + rng.uniform(0, g.nrows * g.cell_size))
        after = rurality_map(g, None, reg.with_city(extra), ts).values
        ok &= bool(np.all(after <= before))
    gate(8, "threshold monotonicity and adding cities never raises rurality (100)", ok)


def test_ac09_round_trips_and_exit_codes(tmp_path):
    rng = np.random.default_rng(9)
    ok = True
    for i in range(30):
        g = GridGeometry(int(rng.integers(1, 20)), int(rng.integers(1, 20)),
                         rng.uniform(-1e6, 1e6), rng.uniform(-1e6, 1e6), rng.uniform(0.1, 1e3))
        vals = rng.normal(0, 1e4, g.shape)
        vals[rng.random(g.shape) < 0.2] = -9999.0
        r = ScalarRaster(g, vals)
        save_ascii_grid(r, tmp_path / f"g{i}.asc")
        back = load_ascii_grid(tmp_path / f"g{i}.asc")
        ok &= back.geometry == g and bool(np.max(np.abs(back.values - vals)) <= 1e-9)
    rep = CciReport(cci=-0.123456789, acr=3 / 7, pcr=0.5, n_cells=7, n_covered=3,
                    distinct_rurality_levels=5, meta=CoverageMeta("2019", "4G", 30.0, "low"),
                    rurality_source_digest="d" * 64)
    ok &= CciReport.from_json(rep.to_json()) == rep

    d = tmp_path
    hdr = "ncols 4\nnrows 1\nxllcorner 0\nyllcorner 0\ncellsize 1\n"
    (d / "cities.csv").write_text("name,population,x,y\na,500,0,0\n")
    (d / "r.asc").write_text(hdr + "1 2 3 4\n")
    (d / "c.asc").write_text(hdr + "1 0 0 0\n")
    (d / "none.asc").write_text(hdr + "0 0 0 0\n")
    (d / "half.asc").write_text(hdr + "1 0.5 0 0\n")
    (d / "mis.asc").write_text(hdr.replace("ncols 4", "ncols 2") + "1 0\n")
    (d / "bad.asc").write_text(hdr + "1 0 0\n")
    rep_path = d / "rep.json"
    rep_path.write_text(rep.to_json())
    idx = ["index", "--rurality", str(d / "r.asc"), "--out", str(d / "o.json")]
    cases = [
        (["rurality", "--cities", str(d / "cities.csv"), "--template", str(d / "r.asc"),
          "--thresholds", "200,1000", "--out", str(d / "o.asc")], 2),
        (["rurality", "--cities", str(d / "missing.csv"), "--template", str(d / "r.asc"),
          "--out", str(d / "o.asc")], 1),
        (["rurality", "--cities", str(d / "cities.csv"), "--template", str(d / "r.asc"),
          "--thresholds", "200", "--out", str(d / "o.asc")], 0),
        (idx + ["--coverage", str(d / "c.asc")], 0),
        (idx + ["--coverage", str(d / "mis.asc")], 2),
        (idx + ["--coverage", str(d / "none.asc")], 2),
        (idx + ["--coverage", str(d / "half.asc")], 2),
        (idx + ["--coverage", str(d / "bad.asc")], 2),
        (idx + ["--coverage", str(d / "nope.asc")], 1),
        (["trend", str(rep_path), str(rep_path), "--csv", str(d / "t.csv")], 2),
        (["trend", "--csv", str(d / "t.csv")], 2),
        (["trend", str(rep_path), "--csv", str(d / "t.csv")], 0),
        (["synth", "--ncols", "0", "--nrows", "2", "--outdir", str(d / "s")], 2),
    ]
    failures = []
    for argv, expected in cases:
        got = main(argv)
        if got != expected:
            failures.append((argv[0], expected, got))
    ok &= not failures
    gate(9, "grid and JSON round-trips; CLI exit codes for every error path", ok,
         f"{len(cases)} CLI cases" + (f", mismatches {failures}" if failures else ""))


_SCALE_SCRIPT = """
import resource, sys, time
from ccindex.cli import main
d = sys.argv[1]
t0 = time.perf_counter()
rc1 = main(["rurality", "--cities", d + "/cities.csv", "--ncols", "2400", "--nrows", "3200",
            "--xllcorner", "0", "--yllcorner", "0", "--cellsize", "250",
            "--out", d + "/rurality.asc"])
rc2 = main(["index", "--rurality", d + "/rurality.asc", "--coverage", d + "/coverage.asc",
            "--out", d + "/report.json", "--epoch-label", "scale"])
elapsed = time.perf_counter() - t0
print(rc1, rc2, elapsed, resource.getrusage(resource.RUSAGE_SELF).ru_maxrss)
"""


def test_ac10_finland_scale(tmp_path):
    rng = np.random.default_rng(10)
    g = GridGeometry(2400, 3200, 0.0, 0.0, 250.0)
    w, h = g.ncols * g.cell_size, g.nrows * g.cell_size
    pops = np.exp(rng.uniform(0, np.log(250_000), 300)).astype(int) + 1
    pops[:2] = (250_000, 70_000)
    cities = tuple(City(f"c{i}", int(p), float(x), float(y)) for i, (p, x, y) in
                   enumerate(zip(pops, rng.uniform(0, w, 300), rng.uniform(0, h, 300))))
    (tmp_path / "cities.csv").write_text(format_cities_csv(CityRegistry(cities)))
    save_bool_grid(BoolRaster.from_bool(g, rng.random(g.shape) < 0.28), tmp_path / "coverage.asc")

    proc = subprocess.run([sys.executable, "-c", _SCALE_SCRIPT, str(tmp_path)],
                          capture_output=True, text=True, timeout=600)
    rc1, rc2, elapsed, maxrss_kb = proc.stdout.split()[-4:]
    elapsed, mem_gb = float(elapsed), int(maxrss_kb) / 1024 ** 2
    rep = json.loads((tmp_path / "report.json").read_text())
    ok = (rc1, rc2) == ("0", "0") and elapsed < 120 and mem_gb < 4 and rep["n_cells"] == g.n_cells
    gate(10, "rurality + index on 2400x3200 grid with 300 cities", ok,
         f"{elapsed:.1f}s < 120s, peak {mem_gb:.2f} GB < 4 GB")
