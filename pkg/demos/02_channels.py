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
# # Channels in three representations
#
# A channel can be given as Kraus operators, as its Pauli transfer matrix
# (PTM) or as its Choi matrix. The PTM acts on vectorized states by ordinary
# matrix multiplication, which makes composition a matrix product.

# %%
import numpy as np

from dptm.channels import (
    amplitude_damping,
    choi_to_kraus,
    compose_ptm,
    kraus_apply,
    kraus_to_choi,
    kraus_to_ptm,
    ptm_apply,
    validate_cptp,
)

np.set_printoptions(precision=4, suppress=True)
ad = amplitude_damping(0.25)
print(kraus_to_ptm(ad).gamma)

# %% [markdown]
# Column 0 carries the non-unital part: the damping pushes every state
# towards |0>, so `gamma[3, 0] = p`.

# %%
rho = np.array([[0.3, 0.2 - 0.1j], [0.2 + 0.1j, 0.7]])
print(np.allclose(kraus_apply(ad, rho), ptm_apply(kraus_to_ptm(ad), rho)))

# %% [markdown]
# Two damping steps compose into one with `p + q - p q`.

# %%
twice = compose_ptm(kraus_to_ptm(ad), kraus_to_ptm(ad))
print(twice.gamma[3, 0], 0.25 + 0.25 - 0.25**2)

# %% [markdown]
# The Choi matrix is positive semidefinite exactly for completely positive
# maps; its eigendecomposition gives back a minimal Kraus set.

# %%
choi = kraus_to_choi(ad)
print("Choi eigenvalues:", choi.eigenvalues())
print("Kraus rank:", len(choi_to_kraus(choi)))
print(validate_cptp(ad))
