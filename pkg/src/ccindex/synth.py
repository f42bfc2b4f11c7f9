"""Deterministic synthetic scenarios and coverage-rollout simulation.

Random draws come from SplitMix64 so that any implementation can reproduce
the same scenarios bit for bit::

    state  = (state + 0x9E3779B97F4A7C15)              mod 2**64
    z      = state
    z      = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9)    mod 2**64
    z      = ((z ^ (z >> 27)) * 0x94D049BB133111EB)    mod 2**64
    output = z ^ (z >> 31)

A uniform double in [0, 1) is ``(output >> 11) * 2**-53``.

:func:`gen_scenario` draws, per city ``i`` in order: x, y (uniform over the
grid extent), then population ``round(exp(u * ln(max_population)))`` for a
uniform ``u``.  City 0 is then given exactly ``max_population`` so every
default threshold up to ``max_population`` has a qualifying city.  Initial
coverage draws one uniform per in-grid cell in row-major order and covers the
cell iff ``u < exp(-R / 10 km)``.
"""

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import ValidationError
from .grid import BoolRaster, CrsMode, GridGeometry
from .io import CoverageMap, CoverageMeta
from .rurality import City, CityRegistry, ThresholdSet, rurality_map

MASK64 = (1 << 64) - 1
GOLDEN_GAMMA = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB

INITIAL_COVERAGE_SCALE_KM = 10.0


class SplitMix64:
    def __init__(self, seed):
        if not 0 <= seed <= MASK64:
            raise ValidationError("seed must be a 64-bit unsigned integer")
        self.state = int(seed)

    def next_u64(self):
        self.state = (self.state + GOLDEN_GAMMA) & MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * _MIX1) & MASK64
        z = ((z ^ (z >> 27)) * _MIX2) & MASK64
        return z ^ (z >> 31)

    def uniform(self):
        return (self.next_u64() >> 11) * 2.0 ** -53

    def below(self, n):
        """Integer in ``[0, n)`` by modulo reduction."""
        return self.next_u64() % n


class Strategy(enum.Enum):
    URBAN_FIRST = "urban_first"
    RURAL_FIRST = "rural_first"
    UNIFORM_RANDOM = "uniform_random"


@dataclass(frozen=True)
class RolloutStrategy:
    kind: Strategy
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "kind", Strategy(self.kind))
        if not 0 <= int(self.seed) <= MASK64:
            raise ValidationError("seed must be a 64-bit unsigned integer")


@dataclass(frozen=True)
class SyntheticScenario:
    geometry: GridGeometry
    registry: CityRegistry
    rurality: object
    initial_coverage: CoverageMap


def gen_scenario(seed, ncols, nrows, n_cities, max_population=100_000,
                 cell_size=250.0, thresholds=None):
    """Random planar scenario: cities, rurality map and a starting coverage map."""
    thresholds = ThresholdSet() if thresholds is None else thresholds
    if ncols < 1 or nrows < 1:
        raise ValidationError("grid dimensions must be >= 1")
    if n_cities < 1:
        raise ValidationError("n_cities must be >= 1")
    if max_population < max(thresholds):
        raise ValidationError(
            f"max_population {max_population} below largest threshold {max(thresholds)}")
    geometry = GridGeometry(ncols, nrows, 0.0, 0.0, cell_size, CrsMode.PLANAR_METERS)
    rng = SplitMix64(seed)
    width, height = ncols * cell_size, nrows * cell_size
    log_max = math.log(max_population)
    cities = []
    for i in range(n_cities):
        x = rng.uniform() * width
        y = rng.uniform() * height
        pop = int(round(math.exp(rng.uniform() * log_max)))
        if i == 0:
            pop = int(max_population)
        cities.append(City(f"city{i:04d}", pop, x, y))
    registry = CityRegistry(tuple(cities), CrsMode.PLANAR_METERS)
    rurality = rurality_map(geometry, None, registry, thresholds)

    draws = np.array([rng.uniform() for _ in range(geometry.n_cells)]).reshape(geometry.shape)
    covered = draws < np.exp(-rurality.values / INITIAL_COVERAGE_SCALE_KM)
    coverage = CoverageMap(BoolRaster.from_bool(geometry, covered),
                           CoverageMeta("initial", sensitivity_tag="synthetic"))
    return SyntheticScenario(geometry, registry, rurality, coverage)


def rollout_order(rurality, strategy):
    """Flat (row-major) indices of eligible cells in the order they get covered."""
    values = rurality.values.ravel()
    idx = np.flatnonzero(rurality.valid.ravel())
    kind = strategy.kind
    if kind is Strategy.URBAN_FIRST:
        return idx[np.argsort(values[idx], kind="stable")]
    if kind is Strategy.RURAL_FIRST:
        return idx[np.argsort(-values[idx], kind="stable")]
    # Fisher-Yates, i from n-1 down to 1, j = next_u64() mod (i + 1)
    rng = SplitMix64(strategy.seed)
    order = idx.copy()
    for i in range(order.size - 1, 0, -1):
        j = rng.below(i + 1)
        order[i], order[j] = order[j], order[i]
    return order


def rollout(scenario, strategy, steps):
    """Coverage maps for steps 1..steps; step t covers ceil(t * n / steps) cells."""
    if steps < 1:
        raise ValidationError("steps must be >= 1")
    g = scenario.geometry
    valid = scenario.rurality.valid
    order = rollout_order(scenario.rurality, strategy)
    n = order.size
    maps = []
    for t in range(1, steps + 1):
        k = -(-t * n // steps)
        covered = np.zeros(g.n_cells, dtype=bool)
        covered[order[:k]] = True
        raster = BoolRaster.from_bool(g, covered, valid)
        meta = CoverageMeta(f"step{t:03d}", sensitivity_tag=strategy.kind.value)
        maps.append(CoverageMap(raster, meta))
    return maps
