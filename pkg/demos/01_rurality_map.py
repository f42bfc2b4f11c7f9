# %% [markdown]
# # Rurality from a city registry
#
# Rurality here is a continuous quantity: for every grid cell we measure the
# distance to the nearest city in several population classes and average
# those distances.  A cell next to a large city scores close to zero; a cell
# that is far from every settlement scores high.

# %%
import numpy as np

from ccindex import City, CityRegistry, GridGeometry, ThresholdSet, filter_cities, rurality_map

# A 40 km x 30 km region at 250 m resolution.
geometry = GridGeometry(ncols=160, nrows=120, x_origin=0.0, y_origin=0.0, cell_size=250.0)

registry = CityRegistry((
    City("Harbour", 65_000, 4_000.0, 15_000.0),
    City("Millbrook", 4_200, 18_000.0, 22_000.0),
    City("Northfell", 1_100, 30_000.0, 27_000.0),
    City("Eastmoor", 350, 36_000.0, 6_000.0),
    City("Village", 210, 25_000.0, 9_000.0),
    # just across the eastern border; still pulls rurality down near the edge
    City("Border Town", 32_000, 41_500.0, 14_000.0),
))

# %% [markdown]
# The default population classes are 200, 1000, 3000, 30000 and 60000
# inhabitants.  A city belongs to class p if its population is at least p.

# %%
thresholds = ThresholdSet()
for p in thresholds:
    names = ", ".join(c.name for c in filter_cities(registry, p))
    print(f"p >= {p:>6}: {names}")

partials = {}
rurality = rurality_map(geometry, None, registry, thresholds, partials=partials)

# %% [markdown]
# Each partial map is the nearest-city distance for one class; the rurality
# map is their mean.

# %%
for p, part in partials.items():
    v = part.values
    print(f"partial p={p:>6}: min {v.min():6.2f} km  mean {v.mean():6.2f} km  max {v.max():6.2f} km")
v = rurality.values
print(f"rurality       : min {v.min():6.2f} km  mean {v.mean():6.2f} km  max {v.max():6.2f} km")

stack = np.stack([part.values for part in partials.values()])
assert np.allclose(stack.mean(axis=0), rurality.values)

# %% [markdown]
# A coarse text rendering: darker characters are more rural.

# %%
shades = " .:-=+*#%@"
levels = np.digitize(v, np.quantile(v, np.linspace(0, 1, len(shades) + 1)[1:-1]))
for row in levels[::10]:
    print("".join(shades[i] for i in row[::4]))
