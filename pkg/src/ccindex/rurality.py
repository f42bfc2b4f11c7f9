"""Distance-based rurality maps built from a registry of city centres.

A partial rurality map holds, for every cell, the distance in km to the
nearest city whose population meets one threshold.  The rurality map is the
mean of the partial maps over a set of thresholds.
"""

import csv
import io
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import cKDTree

from .errors import NoCityError, ParseError, ValidationError
from .grid import (
    DEFAULT_NODATA,
    CrsMode,
    ScalarRaster,
    _check_latitudes,
    haversine_km,
    mask_array,
)

DEFAULT_THRESHOLDS = (200, 1000, 3000, 30000, 60000)
CITY_CSV_HEADER = ("name", "population", "x", "y")

# cells per nearest-neighbour query batch; bounds peak memory on large grids
_CHUNK = 1 << 20


@dataclass(frozen=True)
class City:
    name: str
    population: int
    x: float
    y: float

    def __post_init__(self):
        pop = self.population
        if isinstance(pop, bool) or int(pop) != pop or pop < 0:
            raise ValidationError(f"city {self.name!r}: population must be a nonnegative integer")
        object.__setattr__(self, "population", int(pop))
        x, y = float(self.x), float(self.y)
        if not (np.isfinite(x) and np.isfinite(y)):
            raise ValidationError(f"city {self.name!r}: coordinates must be finite")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)


@dataclass(frozen=True)
class CityRegistry:
    cities: tuple
    crs_mode: CrsMode = CrsMode.PLANAR_METERS

    def __post_init__(self):
        cities = tuple(self.cities)
        if len(set(cities)) != len(cities):
            raise ValidationError("registry contains duplicate cities")
        object.__setattr__(self, "cities", cities)
        object.__setattr__(self, "crs_mode", CrsMode(self.crs_mode))

    def __len__(self):
        return len(self.cities)

    def __iter__(self):
        return iter(self.cities)

    def with_city(self, city):
        return CityRegistry(self.cities + (city,), self.crs_mode)


@dataclass(frozen=True)
class ThresholdSet:
    thresholds: tuple = field(default=DEFAULT_THRESHOLDS)

    def __post_init__(self):
        ts = tuple(int(p) for p in self.thresholds)
        if not ts:
            raise ValidationError("threshold set must not be empty")
        if any(p < 1 for p in ts):
            raise ValidationError("thresholds must be positive integers")
        if any(b <= a for a, b in zip(ts, ts[1:])):
            raise ValidationError("thresholds must be strictly increasing")
        object.__setattr__(self, "thresholds", ts)

    def __len__(self):
        return len(self.thresholds)

    def __iter__(self):
        return iter(self.thresholds)

    @classmethod
    def parse(cls, text):
        """Parse a comma-separated list such as ``"200,1000,3000"``."""
        try:
            return cls(tuple(int(tok) for tok in text.split(",") if tok.strip()))
        except ValueError as exc:
            if isinstance(exc, ValidationError):
                raise
            raise ValidationError(f"bad threshold list {text!r}") from None


def meets_threshold(population, p):
    # inclusive: a city of exactly p inhabitants belongs to category p
    return population >= p


def filter_cities(registry, p):
    """Cities whose population meets threshold ``p``, in registry order."""
    if p < 1:
        raise ValidationError(f"threshold must be >= 1, got {p}")
    return [c for c in registry if meets_threshold(c.population, p)]


def _unit_vectors(lon, lat):
    lon = np.radians(lon)
    lat = np.radians(lat)
    coslat = np.cos(lat)
    return np.column_stack((coslat * np.cos(lon), coslat * np.sin(lon), np.sin(lat)))


def nearest_city_distance(geometry, cities, mask=None, workers=-1):
    """Per-cell distance in km to the nearest of ``cities``.

    Returns a float array of shape ``geometry.shape``; cells outside the mask
    are NaN.  A k-d tree over the cities gives the exact nearest neighbour:
    planar mode queries Euclidean distance directly, geographic mode queries
    chord distance between unit vectors (monotone in great-circle distance)
    and then evaluates the haversine distance to the winning city.
    """
    if not cities:
        raise ValidationError("no cities given")
    mode = geometry.crs_mode
    inside = mask_array(geometry, mask)
    cx = np.array([c.x for c in cities], dtype=np.float64)
    cy = np.array([c.y for c in cities], dtype=np.float64)
    xs, ys = geometry.center_axes()
    if mode is CrsMode.GEOGRAPHIC_DEGREES:
        _check_latitudes(cy, ys)
        tree = cKDTree(_unit_vectors(cx, cy))
    else:
        tree = cKDTree(np.column_stack((cx, cy)))

    out = np.full(geometry.n_cells, np.nan)
    flat_idx = np.flatnonzero(inside.ravel())
    ncols = geometry.ncols
    for start in range(0, flat_idx.size, _CHUNK):
        idx = flat_idx[start:start + _CHUNK]
        px = xs[idx % ncols]
        py = ys[idx // ncols]
        if mode is CrsMode.GEOGRAPHIC_DEGREES:
            _, nearest = tree.query(_unit_vectors(px, py), workers=workers)
            out[idx] = haversine_km(px, py, cx[nearest], cy[nearest])
        else:
            d, _ = tree.query(np.column_stack((px, py)), workers=workers)
            out[idx] = d / 1000.0
    return out.reshape(geometry.shape)


def partial_rurality(geometry, mask, cities_p, nodata=DEFAULT_NODATA, workers=-1):
    """Partial rurality map: distance to the nearest city in ``cities_p``."""
    if not cities_p:
        raise ValidationError("no city meets threshold")
    d = nearest_city_distance(geometry, cities_p, mask, workers=workers)
    valid = ~np.isnan(d)
    return ScalarRaster.from_masked(geometry, np.where(valid, d, 0.0), valid, nodata)


def _check_registry(geometry, registry):
    if len(registry) == 0:
        raise ValidationError("city registry is empty")
    if registry.crs_mode is not geometry.crs_mode:
        raise ValidationError(
            f"registry CRS {registry.crs_mode.value} does not match grid CRS "
            f"{geometry.crs_mode.value}")


def rurality_map(geometry, mask, registry, thresholds=None, nodata=DEFAULT_NODATA,
                 workers=-1, partials=None):
    """Rurality map: per-cell mean of the partial rurality maps.

    If ``partials`` is a dict it is filled with the partial rasters keyed by
    threshold.
    """
    thresholds = ThresholdSet() if thresholds is None else thresholds
    _check_registry(geometry, registry)
    for p in thresholds:
        if not filter_cities(registry, p):
            raise NoCityError(p)
    inside = mask_array(geometry, mask)
    total = np.zeros(geometry.shape)
    for p in thresholds:
        part = partial_rurality(geometry, mask, filter_cities(registry, p), nodata, workers)
        if partials is not None:
            partials[p] = part
        total += np.where(inside, part.values, 0.0)
    total /= len(thresholds)
    return ScalarRaster.from_masked(geometry, total, inside, nodata)


def read_cities_csv(path, crs_mode=CrsMode.PLANAR_METERS):
    """Load a city registry from a ``name,population,x,y`` CSV file."""
    with open(path, newline="", encoding="utf-8") as fh:
        return parse_cities_csv(fh.read(), crs_mode, path=str(path))


def parse_cities_csv(text, crs_mode=CrsMode.PLANAR_METERS, path=None):
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise ParseError("empty city file", 1, path) from None
    if tuple(h.strip() for h in header) != CITY_CSV_HEADER:
        raise ParseError(f"expected header {','.join(CITY_CSV_HEADER)}", 1, path)
    cities = []
    for row in reader:
        lineno = reader.line_num
        if not row or all(not tok.strip() for tok in row):
            continue
        if len(row) != 4:
            raise ParseError(f"expected 4 fields, got {len(row)}", lineno, path)
        name, pop, x, y = row
        try:
            city = City(name, int(pop.strip(), 10), float(x), float(y))
        except ValidationError as exc:
            raise ParseError(str(exc), lineno, path) from None
        except ValueError:
            raise ParseError(f"non-numeric field in {row!r}", lineno, path) from None
        cities.append(city)
    return CityRegistry(tuple(cities), crs_mode)


def format_cities_csv(registry):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CITY_CSV_HEADER)
    for c in registry:
        writer.writerow((c.name, c.population, repr(c.x), repr(c.y)))
    return buf.getvalue()
