import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from ccindex import (  # noqa: E402
    BoolRaster,
    City,
    CityRegistry,
    CoverageMap,
    CoverageMeta,
    CrsMode,
    GridGeometry,
    ScalarRaster,
)

_ACCEPTANCE_LINES = []


def record_acceptance(line):
    _ACCEPTANCE_LINES.append(line)


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def rng():
    return np.random.default_rng(20240917)


def random_registry(rng, geometry, n, pad=0.2, max_pop=100_000):
    """Random cities over (and slightly beyond) the grid extent."""
    w = geometry.ncols * geometry.cell_size
    h = geometry.nrows * geometry.cell_size
    xs = geometry.x_origin + rng.uniform(-pad * w, (1 + pad) * w, n)
    ys = geometry.y_origin + rng.uniform(-pad * h, (1 + pad) * h, n)
    if geometry.crs_mode is CrsMode.GEOGRAPHIC_DEGREES:
        ys = np.clip(ys, -89.0, 89.0)
    pops = rng.integers(1, max_pop + 1, n)
    cities = tuple(City(f"c{i}", int(p), float(x), float(y))
                   for i, (p, x, y) in enumerate(zip(pops, xs, ys)))
    return CityRegistry(cities, geometry.crs_mode)


def coverage_map(geometry, covered, valid=None, label="t"):
    return CoverageMap(BoolRaster.from_bool(geometry, covered, valid), CoverageMeta(label))


def line_geometry(n):
    return GridGeometry(n, 1, 0.0, 0.0, 1.0)


def scalar(values, nodata=-9999.0):
    values = np.asarray(values, dtype=float)
    return ScalarRaster(line_geometry(values.size), values, nodata)
