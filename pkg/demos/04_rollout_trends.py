# %% [markdown]
# # Simulated rollouts and CCI-versus-ACR trends
#
# A new network typically starts in towns and spreads outward.  The rollout
# simulator covers cells step by step in one of three orders and we track
# how CCI moves as ACR grows.  Output: a CSV and an SVG plot per strategy.

# %%
import sys
import tempfile
from pathlib import Path

from ccindex import RolloutStrategy, Strategy, cci_from_rasters, gen_scenario, rollout, trend_table

out_dir = Path(sys.argv[1]) if len(sys.argv) > 1 else Path(tempfile.mkdtemp(prefix="ccindex-"))
out_dir.mkdir(parents=True, exist_ok=True)

scenario = gen_scenario(seed=7, ncols=80, nrows=60, n_cities=25)

# %%
for kind in Strategy:
    maps = rollout(scenario, RolloutStrategy(kind, seed=11), steps=8)
    reports = [cci_from_rasters(scenario.rurality, m) for m in maps]
    table = trend_table(reports)
    print(kind.value)
    for row in table.rows:
        print(f"  {row.epoch}: ACR {row.acr:5.3f}  CCI {row.cci:+.3f}")
    (out_dir / f"trend_{kind.value}.csv").write_text(table.to_csv())
    (out_dir / f"trend_{kind.value}.svg").write_text(table.to_svg(kind.value.replace("_", " ")))

print(f"wrote trend files to {out_dir}")

# %% [markdown]
# Urban-first expansion starts near CCI = 1 and falls to 0 as coverage
# reaches rural cells, the same direction as the Swedish national series.
# Rural-first mirrors it below zero; uniform random stays close to zero
# throughout.
