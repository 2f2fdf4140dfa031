# %% [markdown]
# # Bell pairs: local marginals against global classes
#
# The four Bell states have identical single-qubit marginals.  Their global
# noumenal classes still differ, and a local operation on one qubit never
# moves the class of the other.

# %%
import itertools

import numpy as np

from noumenal import LocalRealisticModel, QuantumTheory

t = QuantumTheory(2)
model = LocalRealisticModel(t)
u = t.universe
q0, q1 = u.system(0), u.system(1)

h, cnot = t.embed(t.gate("H", 0)), t.gate("CNOT", 0, 1)
x1, z0 = t.embed(t.gate("X", 1)), t.embed(t.gate("Z", 0))
bell = t.compose(cnot, h)
preps = {
    "phi+": bell,
    "phi-": t.compose(z0, bell),
    "psi+": t.compose(x1, bell),
    "psi-": t.compose(z0, t.compose(x1, bell)),
}
zero = t.basis(u.full, "00")
states = {k: t.act(w, zero) for k, w in preps.items()}

# %%
for k, rho in states.items():
    m = t.project(rho, q0).matrix
    print(k, "marginal on q0:", np.round(m.real, 12).tolist())

# %%
for (k1, r1), (k2, r2) in itertools.combinations(states.items(), 2):
    d = r1.matrix - r2.matrix
    print(f"{k1} vs {k2}: frobenius {np.linalg.norm(d):.6f}, trace norm {np.abs(np.linalg.eigvalsh(d)).sum():.6f},"
          f" same class: {model.noumenal(preps[k1], u.full) == model.noumenal(preps[k2], u.full)}")

# %% [markdown]
# Apply random unitaries to q0 after preparing phi+.  The marginal and the
# class of q1 stay put.

# %%
rng = np.random.default_rng(0)
before_state = t.project(states["phi+"], q1)
before_class = model.noumenal(bell, q1)
worst_state, worst_class = 0.0, 0.0
for _ in range(200):
    local = model.pad(t.sample_operation(q0, rng))
    w = t.compose(local, bell)
    worst_state = max(worst_state, t.state_distance(t.project(t.act(w, zero), q1), before_state))
    worst_class = max(worst_class, model.class_distance(model.noumenal(w, q1), before_class))
print(f"max change on q1: state {worst_state:.1e}, class residual {worst_class:.1e}")
