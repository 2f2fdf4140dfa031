# %% [markdown]
# # Noumenal classes of two classical bits
#
# Two bits, every permutation of the four configurations allowed globally.
# A class `[W]^A` is the coset `H_A W`, where `H_A` holds the operations
# that only touch the complement of `A`.

# %%
from noumenal import LocalRealisticModel
from noumenal.classical import classical_cnot
from noumenal.sabotage import full_symmetric_2x2

theory = full_symmetric_2x2()
model = LocalRealisticModel(theory)
u = theory.universe
print(len(theory.operations(u.full)), "global operations")

# %%
for a in u.systems():
    sizes = model.class_sizes(a)
    print(f"{a.name():>5}: {len(sizes):2d} classes of {sizes[0][1]} operations each")

# %% [markdown]
# CNOT changes the class of its control but not of the empty system.

# %%
cnot = classical_cnot(theory)
ident = theory.identity(u.full)
print("CNOT ~ I on s0:", model.equivalent(cnot, ident, u.system(0)))
print("CNOT ~ I on {}:", model.equivalent(cnot, ident, u.empty))
print("factor through s0:", theory.factor_classical(cnot, u.system(0)))

# %% [markdown]
# Joining an `s0` class and an `s1` class works only when some global
# operation belongs to both.  Count the pairs that do.

# %%
from noumenal.errors import IncompatibleClassesError

left, right = model.noumenal_space(u.system(0)), model.noumenal_space(u.system(1))
ok = 0
for n1 in left:
    for n2 in right:
        try:
            model.join(n1, n2)
            ok += 1
        except IncompatibleClassesError:
            pass
print(f"{ok} of {len(left) * len(right)} class pairs are compatible")
