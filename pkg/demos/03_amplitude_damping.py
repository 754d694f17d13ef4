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
# # Amplitude damping: DPTM against standard tomography
#
# Four PTM entries of an amplitude-damping channel (p = 0.25) are estimated
# with 512 shots per configuration. The DPTM inputs (maximally mixed state and
# `(1 + P_k)/d`) read each entry from at most two configurations; the standard
# pure-state inputs need a linear combination of two or three.

# %%
from dptm.repro import repro_amplitude_damping

report = repro_amplitude_damping(seed=0, shots=512)
for name, result in report.results.items():
    print(name, "configurations:", result.configuration_count)
for row in report.table():
    print(f"{row['protocol']:5s} gamma[{row['i']},{row['j']}] = {row['value']:.4f} "
          f"+/- {row['std_error']:.4f}   (exact {row['analytic']:.4f})")
print("all within 4 standard errors:", report.passed)

# %% [markdown]
# Bar chart of the estimates, if matplotlib is available.

# %%
try:
    import matplotlib.pyplot as plt
except ImportError:
    plt = None

if plt is not None:
    import numpy as np

    rows = report.table()
    labels = sorted({(r["i"], r["j"]) for r in rows})
    x = np.arange(len(labels))
    fig, ax = plt.subplots(figsize=(6, 3))
    for offset, name in ((-0.2, "dptm"), (0.2, "sqpt")):
        sel = {(r["i"], r["j"]): r for r in rows if r["protocol"] == name}
        ax.bar(x + offset, [sel[k]["value"] for k in labels], 0.4,
               yerr=[sel[k]["std_error"] for k in labels], label=name, capsize=3)
    ax.scatter(x, [next(r["analytic"] for r in rows if (r["i"], r["j"]) == k) for k in labels],
               color="k", marker="_", s=400, zorder=3, label="exact")
    ax.set_xticks(x, [f"$\\Gamma_{{{i}{j}}}$" for i, j in labels])
    ax.legend()
    fig.tight_layout()
