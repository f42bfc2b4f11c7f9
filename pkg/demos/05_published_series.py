# %% [markdown]
# # Plotting published CCI/ACR series
#
# Published index values can be tabulated and plotted with the same trend
# tools used for computed reports.  The figures below are transcribed
# display values (the underlying regulator rasters are not distributed), so
# the reports carry ACR as a count per 10 000 cells.

# %%
import sys
import tempfile
from pathlib import Path

from ccindex import CciReport, CoverageMeta, trend_table

out_dir = Path(sys.argv[1]) if len(sys.argv) > 1 else Path(tempfile.mkdtemp(prefix="ccindex-"))
out_dir.mkdir(parents=True, exist_ok=True)


def display_report(epoch, covered_per_10k, cci, **tags):
    return CciReport(cci=cci, acr=covered_per_10k / 10_000, n_cells=10_000,
                     n_covered=covered_per_10k, distinct_rurality_levels=10_000,
                     meta=CoverageMeta(epoch, **tags))


series = {
    "sweden_national_30mbps": [display_report("2013", 84, 0.84), display_report("2019", 811, 0.52)],
    "sweden_arctic_30mbps": [display_report("2013", 15, 0.92), display_report("2019", 199, 0.23)],
    "finland_national_4g": [display_report("2024", 2739, 0.584, generation_tag="4G"),
                            display_report("2025", 2865, 0.579, generation_tag="4G")],
}

# %%
for name, reports in series.items():
    table = trend_table(reports)
    print(name)
    print(table.to_csv())
    (out_dir / f"{name}.csv").write_text(table.to_csv())
    (out_dir / f"{name}.svg").write_text(table.to_svg(name.replace("_", " ")))

print(f"wrote {len(series)} series to {out_dir}")
