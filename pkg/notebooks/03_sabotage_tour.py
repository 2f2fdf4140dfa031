# %% [markdown]
# # Which check catches which bug
#
# Each sabotage breaks one method of a sound theory or model.  Running the
# catalogue against it should turn at least the listed checks red, with a
# witness that replays under the same seed.

# %%
from noumenal.sabotage import SABOTAGES, demonstrate

for name, s in SABOTAGES.items():
    for kind in s.kinds:
        results = demonstrate(name, kind)
        marks = ", ".join(f"{r.id}={r.status}" for r in results)
        print(f"{name:<26} {kind:<9} {marks}")

# %% [markdown]
# One witness in full: swapping the product's arguments breaks the
# interchange law on a 3x3 classical theory.

# %%
import json

(r,) = demonstrate("swapped_product", "classical")
print(json.dumps(r.witness, indent=2))

# %% [markdown]
# The same spec through the command line refuses to build a model.

# %%
from noumenal.cli import main

print("exit code:", main(["build", "sabotage_swapped_product"]))
