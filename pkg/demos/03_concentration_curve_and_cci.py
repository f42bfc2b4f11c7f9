# %% [markdown]
# # Concentration curve and the CCI index
#
# Sort cells from least to most rural.  Walking along that order, plot the
# cumulative share of cells (u) against the cumulative share of covered
# cells (L).  If coverage ignores rurality the curve is the diagonal; if the
# least rural cells hold all the coverage it shoots up early.  The CCI index
# is twice the area under the curve minus one.

# %%
import numpy as np

from ccindex import (
    BoolRaster,
    CoverageMap,
    CoverageMeta,
    cci_from_rasters,
    concentration_curve,
    gen_scenario,
)

scenario = gen_scenario(seed=2024, ncols=60, nrows=40, n_cities=12)
geometry, rurality = scenario.geometry, scenario.rurality
n = geometry.n_cells
order = np.argsort(rurality.values.ravel(), kind="stable")


def coverage_from(indices, label):
    covered = np.zeros(n, bool)
    covered[indices] = True
    return CoverageMap(BoolRaster.from_bool(geometry, covered), CoverageMeta(label))


rng = np.random.default_rng(1)
quarter = n // 4
cases = {
    "least rural quarter": coverage_from(order[:quarter], "urban"),
    "random quarter": coverage_from(rng.choice(n, quarter, replace=False), "random"),
    "most rural quarter": coverage_from(order[-quarter:], "rural"),
    "initial synthetic map": scenario.initial_coverage,
}

# %%
for name, cov in cases.items():
    rep = cci_from_rasters(rurality, cov)
    print(f"{name:<22} ACR {rep.acr:6.3f}   CCI {rep.cci:+.3f}")

# %% [markdown]
# With distinct rurality values, covering exactly the least rural fraction
# a of cells gives CCI = 1 - a; covering the most rural fraction gives the
# mirror value -(1 - a).  Random placement lands near zero.

# %%
curve = concentration_curve(rurality, cases["least rural quarter"])
for u, L in curve.breakpoints[:: max(1, len(curve) // 8)]:
    print(f"u={u:5.3f}  L={L:5.3f}")
