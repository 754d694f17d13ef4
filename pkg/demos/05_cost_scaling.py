# ---
# jupyter:
#   jupytext:
#     formats: py:percent
#   kernelspec:
#     display_name: Python 3
#     language: python
#     name: python3
# ---

# %% [markdown]
# # Configuration cost against qubit number
#
# Standard tomography needs between 2**n and 3**n configurations per PTM
# entry; DPTM needs at most two. The counts come from the nonzero pattern of
# Kronecker products, so no state is simulated and n can be large.

# %%
from dptm.planning import scaling_table, table1

rows = scaling_table(8)
print(f"{'n':>2} {'sqpt min':>9} {'sqpt max':>9} {'dptm max':>9} {'full QPT':>12}")
for r in rows:
    print(f"{r['n']:>2} {r['sqpt_min']:>9} {r['sqpt_max']:>9} {r['dptm_max']:>9} {r['full_tomography']:>12}")

# %% [markdown]
# Full-PTM plan sizes for one and two qubits under increasing prior knowledge.

# %%
for n in (1, 2):
    print(n, table1(n))

# %%
try:
    import matplotlib.pyplot as plt
except ImportError:
    plt = None

if plt is not None:
    n = [r["n"] for r in rows]
    fig, ax = plt.subplots(figsize=(5, 3.5))
    ax.fill_between(n, [r["sqpt_min"] for r in rows], [r["sqpt_max"] for r in rows],
                    alpha=0.4, label="standard, per entry")
    ax.plot(n, [r["dptm_max"] for r in rows], "o-", label="DPTM, per entry")
    ax.plot(n, [r["full_tomography"] for r in rows], "--", label="full tomography")
    ax.set_yscale("log")
    ax.set_xlabel("qubits")
    ax.set_ylabel("configurations")
    ax.legend()
    fig.tight_layout()
