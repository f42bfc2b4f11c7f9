# %% [markdown]
# # Coverage maps and the headline ratios
#
# Regulators usually publish binary coverage maps: a cell is covered if it
# enjoys at least some data rate.  From a rate grid we can derive one map per
# threshold and compute the two headline figures: the areal coverage ratio
# (ACR, share of cells covered) and the population coverage ratio (PCR,
# share of inhabitants living in covered cells).

# %%
import numpy as np

from ccindex import CoverageMeta, GridGeometry, ScalarRaster, acr, pcr, threshold_coverage

rng = np.random.default_rng(0)
geometry = GridGeometry(ncols=100, nrows=80, x_origin=0.0, y_origin=0.0, cell_size=250.0)

# Synthetic downlink rates that fall off with distance from a town at the centre.
xs, ys = geometry.center_axes()
gx, gy = np.meshgrid(xs, ys)
dist_km = np.hypot(gx - 12_500, gy - 10_000) / 1000
rates = ScalarRaster(geometry, 250 * np.exp(-dist_km / 3) * rng.uniform(0.5, 1.5, geometry.shape))

# Population concentrates in the same town.
population = ScalarRaster(geometry, np.round(800 * np.exp(-dist_km / 1.5)))

# %%
for b in (10, 30, 100):
    cov = threshold_coverage(rates, b, CoverageMeta("demo", rate_threshold_mbps=b))
    print(f">= {b:>3} Mbit/s: ACR {acr(cov):6.1%}   PCR {pcr(cov, population):6.1%}")

# %% [markdown]
# PCR is far above ACR because people live where the network is.  Neither
# figure says anything about *which* areas are left out; that is what the
# concentration curve and CCI index add (next demo).
