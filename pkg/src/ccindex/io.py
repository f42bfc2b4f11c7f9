"""ESRI ASCII grid reading/writing, coverage thresholding and alignment checks."""

import os
import tempfile
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import ParseError, ValidationError
from .grid import (
    COVERED,
    DEFAULT_NODATA,
    NODATA,
    UNCOVERED,
    BoolRaster,
    CrsMode,
    GridGeometry,
    ScalarRaster,
)

_HEADER_KEYS = ("ncols", "nrows", "xllcorner", "yllcorner", "cellsize", "nodata_value")
_REQUIRED = _HEADER_KEYS[:5]
BOOL_TOLERANCE = 1e-9


@dataclass(frozen=True)
class CoverageMeta:
    """Descriptive tags attached to a coverage map.

    ``generation_tag`` is e.g. ``"4G"``; ``rate_threshold_mbps`` the minimum
    data rate a covered cell enjoys; ``sensitivity_tag`` is carried opaquely.
    """

    epoch_label: str
    generation_tag: Optional[str] = None
    rate_threshold_mbps: Optional[float] = None
    sensitivity_tag: Optional[str] = None

    def __post_init__(self):
        if not isinstance(self.epoch_label, str) or not self.epoch_label:
            raise ValidationError("epoch_label must be a nonempty string")
        if self.rate_threshold_mbps is not None:
            b = float(self.rate_threshold_mbps)
            if not b > 0:
                raise ValidationError("rate_threshold_mbps must be positive")
            object.__setattr__(self, "rate_threshold_mbps", b)

    def to_dict(self):
        return {
            "generation_tag": self.generation_tag,
            "rate_threshold_mbps": self.rate_threshold_mbps,
            "sensitivity_tag": self.sensitivity_tag,
            "epoch_label": self.epoch_label,
        }

    @classmethod
    def from_dict(cls, d):
        return cls(
            epoch_label=d["epoch_label"],
            generation_tag=d.get("generation_tag"),
            rate_threshold_mbps=d.get("rate_threshold_mbps"),
            sensitivity_tag=d.get("sensitivity_tag"),
        )


@dataclass(frozen=True)
class CoverageMap:
    raster: BoolRaster
    meta: CoverageMeta

    @property
    def geometry(self):
        return self.raster.geometry


def atomic_write_text(path, text):
    """Write ``text`` to ``path`` via a temporary file and rename."""
    path = os.fspath(path)
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        # mkstemp creates 0600; give the file the mode a plain open() would
        umask = os.umask(0)
        os.umask(umask)
        os.chmod(tmp, 0o666 & ~umask)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _parse_header(lines, path):
    header = {}
    i = 0
    while i < len(lines):
        parts = lines[i].split()
        if not parts:
            i += 1
            continue
        key = parts[0].lower()
        if key not in _HEADER_KEYS:
            break
        if len(parts) != 2:
            raise ParseError(f"header line for {parts[0]} must have one value", i + 1, path)
        if key in header:
            raise ParseError(f"duplicate header key {parts[0]}", i + 1, path)
        try:
            value = int(parts[1]) if key in ("ncols", "nrows") else float(parts[1])
        except ValueError:
            raise ParseError(f"bad value {parts[1]!r} for {parts[0]}", i + 1, path) from None
        header[key] = value
        i += 1
    missing = [k for k in _REQUIRED if k not in header]
    if missing:
        raise ParseError(f"missing header key(s): {', '.join(missing)}", i + 1, path)
    return header, i


def parse_ascii_grid(text, crs_mode=CrsMode.PLANAR_METERS, path=None):
    """Parse ESRI ASCII grid text into a :class:`ScalarRaster`."""
    lines = text.splitlines()
    header, i = _parse_header(lines, path)
    try:
        geometry = GridGeometry(header["ncols"], header["nrows"], header["xllcorner"],
                                header["yllcorner"], header["cellsize"], crs_mode)
    except ValidationError as exc:
        raise ParseError(str(exc), None, path) from None
    nodata = header.get("nodata_value", DEFAULT_NODATA)
    ncols, nrows = geometry.ncols, geometry.nrows

    values = np.empty((nrows, ncols))
    row = 0
    for lineno in range(i + 1, len(lines) + 1):
        line = lines[lineno - 1]
        tokens = line.split()
        if not tokens:
            continue
        if row >= nrows:
            raise ParseError(f"more than nrows={nrows} data rows", lineno, path)
        if len(tokens) != ncols:
            raise ParseError(f"expected {ncols} values, got {len(tokens)}", lineno, path)
        try:
            values[row] = np.array(tokens, dtype=np.float64)
        except ValueError:
            bad = next(t for t in tokens if not _is_number(t))
            raise ParseError(f"non-numeric value {bad!r}", lineno, path) from None
        row += 1
    if row != nrows:
        raise ParseError(f"expected {nrows} data rows, got {row}", len(lines), path)
    if not np.all(np.isfinite(values)):
        raise ParseError("non-finite value in grid", None, path)
    return ScalarRaster(geometry, values, nodata)


def _is_number(token):
    try:
        float(token)
    except ValueError:
        return False
    return True


def load_ascii_grid(path, crs_mode=CrsMode.PLANAR_METERS):
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    return parse_ascii_grid(text, crs_mode, path=str(path))


def _format_header(geometry, nodata):
    g = geometry
    return (f"ncols {g.ncols}\n"
            f"nrows {g.nrows}\n"
            f"xllcorner {g.x_origin!r}\n"
            f"yllcorner {g.y_origin!r}\n"
            f"cellsize {g.cell_size!r}\n"
            f"NODATA_value {nodata!r}\n")


def format_ascii_grid(raster):
    """ESRI ASCII grid text for a scalar raster; reals use shortest round-trip repr."""
    rows = [" ".join(map(repr, r)) for r in raster.values.tolist()]
    return _format_header(raster.geometry, raster.nodata) + "\n".join(rows) + "\n"


def save_ascii_grid(raster, path):
    atomic_write_text(path, format_ascii_grid(raster))


def format_bool_grid(raster, nodata=int(DEFAULT_NODATA)):
    """ASCII grid text for a flag raster: 1 covered, 0 uncovered, ``nodata`` otherwise."""
    tokens = np.array(["0", "1", str(nodata)])
    lookup = np.where(raster.flags == COVERED, 1, np.where(raster.flags == UNCOVERED, 0, 2))
    rows = [" ".join(tokens[r]) for r in lookup]
    return _format_header(raster.geometry, nodata) + "\n".join(rows) + "\n"


def save_bool_grid(raster, path, nodata=int(DEFAULT_NODATA)):
    atomic_write_text(path, format_bool_grid(raster, nodata))


def bool_raster_from_scalar(raster, path=None):
    """Interpret 0/1 values as uncovered/covered; sentinel cells become nodata."""
    v = raster.values
    valid = raster.valid
    is_one = np.abs(v - 1.0) <= BOOL_TOLERANCE
    is_zero = np.abs(v) <= BOOL_TOLERANCE
    bad = valid & ~is_one & ~is_zero
    if bad.any():
        r, c = map(int, np.argwhere(bad)[0])
        where = f"{path}: " if path else ""
        raise ValidationError(
            f"{where}cell (row={r}, col={c}) has value {v[r, c]!r}; expected 0 or 1")
    flags = np.where(is_one, COVERED, UNCOVERED).astype(np.int8)
    flags[~valid] = NODATA
    return BoolRaster(raster.geometry, flags)


def load_bool_grid(path, crs_mode=CrsMode.PLANAR_METERS):
    return bool_raster_from_scalar(load_ascii_grid(path, crs_mode), path=str(path))


def threshold_coverage(rates, b, meta):
    """Binary coverage from a data-rate raster: covered iff rate >= b Mbit/s."""
    b = float(b)
    if not b > 0:
        raise ValidationError(f"rate threshold must be positive, got {b!r}")
    valid = rates.valid
    flags = np.where(rates.values >= b, COVERED, UNCOVERED).astype(np.int8)
    flags[~valid] = NODATA
    meta = CoverageMeta(meta.epoch_label, meta.generation_tag, b, meta.sensitivity_tag)
    return CoverageMap(BoolRaster(rates.geometry, flags), meta)


def check_alignment(*geometries):
    """Raise :class:`AlignmentError` naming the first field that differs."""
    if len(geometries) < 2:
        raise ValidationError("check_alignment needs at least two geometries")
    for i, left in enumerate(geometries):
        for right in geometries[i + 1:]:
            left.require_aligned(right)
