"""Coverage ratios, the coverage concentration curve and the CCI index.

Cells are ordered from least to most rural.  The concentration curve plots
the cumulative share of covered cells ``L`` against the cumulative share of
all cells ``u``; cells with equal rurality form one group and contribute a
single breakpoint, which makes the curve independent of how ties are
enumerated.  The CCI is ``2 * A - 1`` where ``A`` is the trapezoid area
under the curve: 0 when coverage is independent of rurality, approaching 1
when coverage is concentrated in the least rural cells, and negative when
it favours rural cells (the sign is kept, not clamped).
"""

import csv
import hashlib
import io
import json
import math
from dataclasses import dataclass, field
from typing import NamedTuple, Optional

import numpy as np

from .errors import EmptyDomainError, NoCoverageError, ValidationError
from .grid import mask_array
from .io import CoverageMeta


def _eligible(coverage, mask, *rasters):
    g = coverage.geometry
    inside = mask_array(g, mask)
    eligible = inside & coverage.raster.valid
    for r in rasters:
        g.require_aligned(r.geometry)
        eligible &= r.valid
    return eligible


def acr(coverage, mask=None):
    """Areal coverage ratio: covered share of the eligible cells."""
    eligible = _eligible(coverage, mask)
    n = int(np.count_nonzero(eligible))
    if n == 0:
        raise EmptyDomainError("no eligible cells for ACR")
    return int(np.count_nonzero(eligible & coverage.raster.covered)) / n


def pcr(coverage, population, mask=None):
    """Population coverage ratio: share of the population living in covered cells."""
    eligible = _eligible(coverage, mask, population)
    pop = population.values[eligible]
    if pop.size and pop.min() < 0:
        raise ValidationError("population grid contains negative values")
    total = math.fsum(pop)
    if not total > 0:
        raise EmptyDomainError("total population over eligible cells is zero")
    covered = coverage.raster.covered[eligible]
    return math.fsum(pop[covered]) / total


@dataclass(frozen=True, eq=False)
class ConcentrationCurve:
    """Breakpoints ``(u, L)`` of a piecewise-linear concentration curve.

    ``levels``, ``group_cells`` and ``group_covered`` describe the rurality
    groups behind each interior breakpoint when the curve was built from
    rasters; they are None for curves constructed directly from points.
    """

    u: np.ndarray
    L: np.ndarray
    levels: Optional[np.ndarray] = None
    group_cells: Optional[np.ndarray] = None
    group_covered: Optional[np.ndarray] = None

    def __post_init__(self):
        u = np.array(self.u, dtype=np.float64)
        L = np.array(self.L, dtype=np.float64)
        if u.ndim != 1 or u.shape != L.shape or u.size < 2:
            raise ValidationError("curve needs matching u and L arrays with >= 2 points")
        if not (np.all(np.isfinite(u)) and np.all(np.isfinite(L))):
            raise ValidationError("curve breakpoints must be finite")
        if u[0] != 0.0 or L[0] != 0.0 or u[-1] != 1.0 or L[-1] != 1.0:
            raise ValidationError("curve must start at (0, 0) and end at (1, 1)")
        if np.any(np.diff(u) <= 0):
            raise ValidationError("u must be strictly increasing")
        if np.any(np.diff(L) < 0) or L.min() < 0 or L.max() > 1:
            raise ValidationError("L must be nondecreasing within [0, 1]")
        for arr in (u, L):
            arr.setflags(write=False)
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "L", L)

    @property
    def breakpoints(self):
        return list(zip(self.u.tolist(), self.L.tolist()))

    def __len__(self):
        return self.u.size

    def to_csv(self):
        lines = ["u,L"]
        lines += [f"{u!r},{L!r}" for u, L in self.breakpoints]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_csv(cls, text):
        rows = list(csv.reader(io.StringIO(text)))
        if not rows or [h.strip() for h in rows[0]] != ["u", "L"]:
            raise ValidationError("curve CSV must start with header u,L")
        pts = [(float(a), float(b)) for a, b in (r for r in rows[1:] if r)]
        u, L = zip(*pts) if pts else ((), ())
        return cls(u, L)


def concentration_curve(rurality, coverage, mask=None):
    """Concentration curve of ``coverage`` with cells sorted least-rural first.

    Eligible cells are in the mask and hold data in both rasters.
    """
    eligible = _eligible(coverage, mask, rurality)
    r = rurality.values[eligible]
    covered = coverage.raster.covered[eligible]
    n = r.size
    if n == 0:
        raise EmptyDomainError("no eligible cells for the concentration curve")
    n_cov = int(np.count_nonzero(covered))
    if n_cov == 0:
        raise NoCoverageError()
    levels, group = np.unique(r, return_inverse=True)
    cells = np.bincount(group, minlength=levels.size)
    cov = np.bincount(group[covered], minlength=levels.size)
    u = np.concatenate(([0.0], np.cumsum(cells) / n))
    L = np.concatenate(([0.0], np.cumsum(cov) / n_cov))
    return ConcentrationCurve(u, L, levels, cells, cov)


def cci(curve):
    """CCI index ``2 * A - 1`` from the trapezoid area ``A`` under ``curve``."""
    if not isinstance(curve, ConcentrationCurve):
        raise ValidationError("cci expects a ConcentrationCurve")
    u, L = curve.u, curve.L
    area = math.fsum((np.diff(u) * (L[1:] + L[:-1])).tolist()) / 2.0
    return 2.0 * area - 1.0


def raster_digest(raster):
    """SHA-256 hex digest of a scalar raster's geometry, sentinel and values."""
    g = raster.geometry
    h = hashlib.sha256()
    h.update(repr((g.ncols, g.nrows, g.x_origin, g.y_origin, g.cell_size,
                   g.crs_mode.value, raster.nodata)).encode())
    h.update(np.ascontiguousarray(raster.values, dtype="<f8").tobytes())
    return h.hexdigest()


_REPORT_FIELDS = ("cci", "acr", "pcr", "n_cells", "n_covered",
                  "distinct_rurality_levels", "meta", "rurality_source_digest")


@dataclass(frozen=True)
class CciReport:
    cci: float
    acr: float
    n_cells: int
    n_covered: int
    distinct_rurality_levels: int
    meta: CoverageMeta
    rurality_source_digest: str = ""
    pcr: Optional[float] = None

    def __post_init__(self):
        if not -1.0 <= self.cci <= 1.0:
            raise ValidationError(f"cci {self.cci!r} outside [-1, 1]")
        if not 0 <= self.n_covered <= self.n_cells or self.n_cells < 1:
            raise ValidationError("need 0 <= n_covered <= n_cells and n_cells >= 1")
        if self.acr != self.n_covered / self.n_cells:
            raise ValidationError("acr must equal n_covered / n_cells")
        if self.pcr is not None and not 0.0 <= self.pcr <= 1.0:
            raise ValidationError(f"pcr {self.pcr!r} outside [0, 1]")

    def to_dict(self):
        return {
            "cci": self.cci,
            "acr": self.acr,
            "pcr": self.pcr,
            "n_cells": self.n_cells,
            "n_covered": self.n_covered,
            "distinct_rurality_levels": self.distinct_rurality_levels,
            "meta": self.meta.to_dict(),
            "rurality_source_digest": self.rurality_source_digest,
        }

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2) + "\n"

    @classmethod
    def from_dict(cls, d):
        missing = [k for k in _REPORT_FIELDS if k not in d]
        if missing:
            raise ValidationError(f"report is missing field(s): {', '.join(missing)}")
        return cls(
            cci=float(d["cci"]),
            acr=float(d["acr"]),
            pcr=None if d["pcr"] is None else float(d["pcr"]),
            n_cells=int(d["n_cells"]),
            n_covered=int(d["n_covered"]),
            distinct_rurality_levels=int(d["distinct_rurality_levels"]),
            meta=CoverageMeta.from_dict(d["meta"]),
            rurality_source_digest=str(d["rurality_source_digest"]),
        )

    @classmethod
    def from_json(cls, text):
        try:
            d = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ValidationError(f"invalid report JSON: {exc}") from None
        if not isinstance(d, dict):
            raise ValidationError("report JSON must be an object")
        return cls.from_dict(d)


def cci_from_rasters(rurality, coverage, mask=None, population=None):
    """Full report for one rurality/coverage pair.

    ``acr`` here is measured over the cells that enter the curve (in the
    mask, data in both rasters) so that ``acr == n_covered / n_cells``.
    """
    curve = concentration_curve(rurality, coverage, mask)
    n_cells = int(curve.group_cells.sum())
    n_covered = int(curve.group_covered.sum())
    return CciReport(
        cci=cci(curve),
        acr=n_covered / n_cells,
        pcr=None if population is None else pcr(coverage, population, mask),
        n_cells=n_cells,
        n_covered=n_covered,
        distinct_rurality_levels=int(curve.levels.size),
        meta=coverage.meta,
        rurality_source_digest=raster_digest(rurality),
    )


class TrendRow(NamedTuple):
    epoch: str
    acr: float
    cci: float


@dataclass(frozen=True)
class TrendTable:
    rows: tuple = field(default_factory=tuple)

    def __post_init__(self):
        rows = tuple(TrendRow(str(e), float(a), float(c)) for e, a, c in self.rows)
        labels = [r.epoch for r in rows]
        if len(set(labels)) != len(labels):
            dup = next(x for x in labels if labels.count(x) > 1)
            raise ValidationError(f"duplicate epoch label {dup!r}")
        object.__setattr__(self, "rows", rows)

    def __len__(self):
        return len(self.rows)

    def to_csv(self):
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(("epoch", "acr", "cci"))
        for r in self.rows:
            writer.writerow((r.epoch, repr(r.acr), repr(r.cci)))
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text):
        rows = list(csv.reader(io.StringIO(text)))
        if not rows or rows[0] != ["epoch", "acr", "cci"]:
            raise ValidationError("trend CSV must start with header epoch,acr,cci")
        return cls(tuple((e, float(a), float(c)) for e, a, c in (r for r in rows[1:] if r)))

    def to_svg(self, title=None):
        return trend_svg(self, title)


def trend_table(reports, labels=None):
    """Trend rows ``(epoch, acr, cci)`` in input order.

    Epoch labels come from each report's metadata unless ``labels`` is given.
    """
    reports = list(reports)
    if not reports:
        raise ValidationError("trend table needs at least one report")
    if labels is None:
        labels = [r.meta.epoch_label for r in reports]
    elif len(labels) != len(reports):
        raise ValidationError(f"{len(labels)} labels for {len(reports)} reports")
    return TrendTable(tuple((lab, r.acr, r.cci) for lab, r in zip(labels, reports)))


def _nice_ticks(lo, hi, n=5):
    return [lo + (hi - lo) * i / n for i in range(n + 1)]


def _esc(text):
    return (str(text).replace("&", "&amp;").replace("<", "&lt;")
            .replace(">", "&gt;").replace('"', "&quot;"))


def trend_svg(table, title=None):
    """Standalone SVG scatter of CCI against ACR, joined in row order."""
    width, height = 800, 600
    left, right, top, bottom = 90, 40, 50, 80
    pw, ph = width - left - right, height - top - bottom

    acrs = [r.acr for r in table.rows]
    ccis = [r.cci for r in table.rows]
    x_hi = max(acrs) * 1.1 if max(acrs) > 0 else 1.0
    x_hi = min(x_hi, 1.0) if max(acrs) <= 1.0 else x_hi
    y_lo, y_hi = min(0.0, min(ccis)), max(1.0, max(ccis))

    def sx(v):
        return left + pw * v / x_hi

    def sy(v):
        return top + ph * (y_hi - v) / (y_hi - y_lo)

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {width} {height}" '
        f'width="{width}" height="{height}" font-family="sans-serif" font-size="14">',
        f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>',
    ]
    if title:
        out.append(f'<text x="{width / 2:.2f}" y="28" text-anchor="middle" '
                   f'font-size="18">{_esc(title)}</text>')
    x0, y0 = sx(0.0), sy(y_lo)
    out.append(f'<line class="axis" x1="{x0:.2f}" y1="{y0:.2f}" x2="{sx(x_hi):.2f}" '
               f'y2="{y0:.2f}" stroke="black"/>')
    out.append(f'<line class="axis" x1="{x0:.2f}" y1="{y0:.2f}" x2="{x0:.2f}" '
               f'y2="{sy(y_hi):.2f}" stroke="black"/>')
    for v in _nice_ticks(0.0, x_hi):
        out.append(f'<line x1="{sx(v):.2f}" y1="{y0:.2f}" x2="{sx(v):.2f}" '
                   f'y2="{y0 + 6:.2f}" stroke="black"/>')
        out.append(f'<text x="{sx(v):.2f}" y="{y0 + 22:.2f}" '
                   f'text-anchor="middle">{v:.3g}</text>')
    for v in _nice_ticks(y_lo, y_hi):
        out.append(f'<line x1="{x0 - 6:.2f}" y1="{sy(v):.2f}" x2="{x0:.2f}" '
                   f'y2="{sy(v):.2f}" stroke="black"/>')
        out.append(f'<text x="{x0 - 10:.2f}" y="{sy(v) + 5:.2f}" '
                   f'text-anchor="end">{v:.3g}</text>')
    out.append(f'<text x="{left + pw / 2:.2f}" y="{height - 25}" '
               f'text-anchor="middle">ACR</text>')
    out.append(f'<text x="25" y="{top + ph / 2:.2f}" text-anchor="middle" '
               f'transform="rotate(-90 25 {top + ph / 2:.2f})">CCI</text>')

    pts = " ".join(f"{sx(a):.2f},{sy(c):.2f}" for a, c in zip(acrs, ccis))
    out.append(f'<polyline class="trend" points="{pts}" fill="none" '
               f'stroke="#1f77b4" stroke-width="2"/>')
    for r in table.rows:
        cx, cy = sx(r.acr), sy(r.cci)
        out.append(f'<circle class="point" cx="{cx:.2f}" cy="{cy:.2f}" r="5" '
                   f'fill="#1f77b4"><title>{_esc(r.epoch)}: ACR={r.acr!r} '
                   f'CCI={r.cci!r}</title></circle>')
        out.append(f'<text x="{cx + 8:.2f}" y="{cy - 8:.2f}">{_esc(r.epoch)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
