"""Rurality maps, coverage ratios and the cellular coverage inequality (CCI) index."""

from .errors import (
    AlignmentError,
    BoundsError,
    DomainError,
    EmptyDomainError,
    NoCityError,
    NoCoverageError,
    ParseError,
    ValidationError,
)
from .grid import (
    COVERED,
    EARTH_RADIUS_KM,
    NODATA,
    UNCOVERED,
    BoolRaster,
    CellCoord,
    CrsMode,
    GridGeometry,
    ScalarRaster,
    cell_center,
    distance,
)
from .io import (
    CoverageMap,
    CoverageMeta,
    check_alignment,
    load_ascii_grid,
    load_bool_grid,
    save_ascii_grid,
    save_bool_grid,
    threshold_coverage,
)
from .metrics import (
    CciReport,
    ConcentrationCurve,
    TrendTable,
    acr,
    cci,
    cci_from_rasters,
    concentration_curve,
    pcr,
    trend_table,
)
from .rurality import (
    DEFAULT_THRESHOLDS,
    City,
    CityRegistry,
    ThresholdSet,
    filter_cities,
    partial_rurality,
    read_cities_csv,
    rurality_map,
)
from .synth import RolloutStrategy, Strategy, SyntheticScenario, gen_scenario, rollout

__version__ = "0.1.0"
