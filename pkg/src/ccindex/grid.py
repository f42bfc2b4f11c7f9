"""Raster geometry, cell addressing, distances and nodata-masked containers.

Rasters are stored as 2-D arrays of shape ``(nrows, ncols)`` in row-major
order with row 0 at the top (north), the same order rows appear in an ESRI
ASCII grid file.  Every cell is treated as equal-area.
"""

import enum
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import AlignmentError, BoundsError, DomainError, ValidationError

EARTH_RADIUS_KM = 6371.0088
DEFAULT_NODATA = -9999.0
GEOMETRY_ATOL = 1e-9

COVERED = 1
UNCOVERED = 0
NODATA = -1


class CrsMode(enum.Enum):
    PLANAR_METERS = "planar"
    GEOGRAPHIC_DEGREES = "geographic"


class CellCoord(NamedTuple):
    row: int
    col: int


@dataclass(frozen=True)
class GridGeometry:
    """Georeferencing of a regular grid.

    ``x_origin``/``y_origin`` give the lower-left corner of the grid in CRS
    units (metres for planar grids, degrees of lon/lat for geographic ones).
    """

    ncols: int
    nrows: int
    x_origin: float
    y_origin: float
    cell_size: float
    crs_mode: CrsMode = CrsMode.PLANAR_METERS

    def __post_init__(self):
        for name in ("ncols", "nrows"):
            value = getattr(self, name)
            if isinstance(value, bool) or int(value) != value or value < 1:
                raise ValidationError(f"{name} must be a positive integer, got {value!r}")
            object.__setattr__(self, name, int(value))
        for name in ("x_origin", "y_origin", "cell_size"):
            value = float(getattr(self, name))
            if not math.isfinite(value):
                raise ValidationError(f"{name} must be finite, got {value!r}")
            object.__setattr__(self, name, value)
        if self.cell_size <= 0:
            raise ValidationError(f"cell_size must be positive, got {self.cell_size!r}")
        if not isinstance(self.crs_mode, CrsMode):
            object.__setattr__(self, "crs_mode", CrsMode(self.crs_mode))

    @property
    def shape(self):
        return (self.nrows, self.ncols)

    @property
    def n_cells(self):
        return self.nrows * self.ncols

    def first_difference(self, other):
        """Name of the first field that differs from ``other``, or None."""
        for name in ("ncols", "nrows"):
            if getattr(self, name) != getattr(other, name):
                return name
        for name in ("x_origin", "y_origin", "cell_size"):
            if abs(getattr(self, name) - getattr(other, name)) > GEOMETRY_ATOL:
                return name
        if self.crs_mode != other.crs_mode:
            return "crs_mode"
        return None

    def aligned_with(self, other):
        return self.first_difference(other) is None

    def require_aligned(self, other):
        field = self.first_difference(other)
        if field is not None:
            raise AlignmentError(field, getattr(self, field), getattr(other, field))

    def center_axes(self):
        """Cell-centre coordinates along each axis.

        Returns ``(xs, ys)`` with ``xs`` of length ``ncols`` and ``ys`` of
        length ``nrows``; ``ys[0]`` is the top row.
        """
        cols = np.arange(self.ncols, dtype=np.float64)
        rows = np.arange(self.nrows, dtype=np.float64)
        xs = self.x_origin + (cols + 0.5) * self.cell_size
        ys = self.y_origin + (self.nrows - 1 - rows + 0.5) * self.cell_size
        return xs, ys


def cell_center(geometry, cell):
    """Centre point ``(x, y)`` of a cell, in CRS units."""
    row, col = cell
    if not (0 <= row < geometry.nrows and 0 <= col < geometry.ncols):
        raise BoundsError(
            f"cell (row={row}, col={col}) outside {geometry.nrows}x{geometry.ncols} grid"
        )
    x = geometry.x_origin + (col + 0.5) * geometry.cell_size
    y = geometry.y_origin + (geometry.nrows - 1 - row + 0.5) * geometry.cell_size
    return (x, y)


def _check_latitudes(*lats):
    for lat in lats:
        lat = np.asarray(lat, dtype=np.float64)
        if lat.size and not (np.all(lat >= -90.0) and np.all(lat <= 90.0)):
            raise DomainError("latitude outside [-90, 90]")


def haversine_km(lon1, lat1, lon2, lat2):
    """Great-circle distance in km between lon/lat points given in degrees.

    Works on scalars or broadcastable arrays.
    """
    lon1, lat1, lon2, lat2 = (np.radians(np.asarray(v, dtype=np.float64))
                              for v in (lon1, lat1, lon2, lat2))
    h = (np.sin((lat2 - lat1) / 2.0) ** 2
         + np.cos(lat1) * np.cos(lat2) * np.sin((lon2 - lon1) / 2.0) ** 2)
    return 2.0 * EARTH_RADIUS_KM * np.arcsin(np.sqrt(np.clip(h, 0.0, 1.0)))


def distances_km(ax, ay, bx, by, mode):
    """Vectorised :func:`distance` over broadcastable coordinate arrays."""
    mode = CrsMode(mode)
    if mode is CrsMode.PLANAR_METERS:
        return np.hypot(np.subtract(ax, bx, dtype=np.float64),
                        np.subtract(ay, by, dtype=np.float64)) / 1000.0
    _check_latitudes(ay, by)
    return haversine_km(ax, ay, bx, by)


def distance(a, b, mode):
    """Distance in kilometres between two points.

    Planar points are in metres (Euclidean / 1000); geographic points are
    ``(lon, lat)`` in degrees (haversine on a sphere of radius
    :data:`EARTH_RADIUS_KM`).
    """
    return float(distances_km(a[0], a[1], b[0], b[1], mode))


def _readonly(array):
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class ScalarRaster:
    """Real-valued raster with a nodata sentinel."""

    geometry: GridGeometry
    values: np.ndarray
    nodata: float = DEFAULT_NODATA

    def __post_init__(self):
        g = self.geometry
        values = np.array(self.values, dtype=np.float64)
        if values.size != g.n_cells:
            raise ValidationError(
                f"raster has {values.size} values, geometry needs {g.n_cells}")
        values = values.reshape(g.shape)
        nodata = float(self.nodata)
        if not math.isfinite(nodata):
            raise ValidationError("nodata sentinel must be finite")
        if not np.all(np.isfinite(values)):
            raise ValidationError("raster contains non-finite values")
        object.__setattr__(self, "values", _readonly(values))
        object.__setattr__(self, "nodata", nodata)

    @property
    def valid(self):
        """Boolean array, True where the cell holds data."""
        return self.values != self.nodata

    @classmethod
    def from_masked(cls, geometry, values, valid, nodata=DEFAULT_NODATA):
        out = np.where(valid, values, nodata)
        return cls(geometry, out, nodata)


@dataclass(frozen=True, eq=False)
class BoolRaster:
    """Covered / uncovered / nodata flag per cell.

    Flags are stored as int8 using :data:`COVERED`, :data:`UNCOVERED` and
    :data:`NODATA`.  When a BoolRaster is used as a *mask*, a cell is in the
    mask only if its flag is :data:`COVERED`.
    """

    geometry: GridGeometry
    flags: np.ndarray

    def __post_init__(self):
        g = self.geometry
        flags = np.array(self.flags, dtype=np.int8)
        if flags.size != g.n_cells:
            raise ValidationError(
                f"raster has {flags.size} flags, geometry needs {g.n_cells}")
        flags = flags.reshape(g.shape)
        if not np.all(np.isin(flags, (COVERED, UNCOVERED, NODATA))):
            raise ValidationError("flags must be COVERED, UNCOVERED or NODATA")
        object.__setattr__(self, "flags", _readonly(flags))

    @classmethod
    def from_bool(cls, geometry, covered, valid=None):
        covered = np.asarray(covered, dtype=bool).reshape(geometry.shape)
        flags = np.where(covered, COVERED, UNCOVERED).astype(np.int8)
        if valid is not None:
            flags[~np.asarray(valid, dtype=bool).reshape(geometry.shape)] = NODATA
        return cls(geometry, flags)

    @property
    def covered(self):
        return self.flags == COVERED

    @property
    def valid(self):
        return self.flags != NODATA


def mask_array(geometry, mask):
    """Boolean in-mask array for an optional mask raster."""
    if mask is None:
        return np.ones(geometry.shape, dtype=bool)
    geometry.require_aligned(mask.geometry)
    return mask.covered
