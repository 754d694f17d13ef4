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
# # Pauli strings and vectorized states
#
# Operators on n qubits are expanded in the 4**n Pauli strings. The index of a
# string reads its single-qubit labels (I, X, Y, Z = 0..3) as base-4 digits,
# qubit 1 most significant.

# %%
import numpy as np

from dptm.pauli import PauliString, devectorize, pauli_expectation, pauli_matrix, pure_state, vectorize

for k in (0, 4, 6, 15):
    print(k, PauliString(2, k).label)

# %% [markdown]
# A density matrix is stored as its vector of Pauli expectations
# `r_k = Tr[P_k rho]`; `r_0 = 1` for any normalized state.

# %%
ket = np.array([np.cos(0.3), np.exp(0.7j) * np.sin(0.3)])
rho = pure_state(ket)
r = vectorize(rho)
print("Bloch vector:", np.round(r[1:], 4))
print("round trip ok:", np.allclose(devectorize(r), rho))
print("<Y> =", round(pauli_expectation("Y", rho), 4))

# %% [markdown]
# The strings are orthonormal under `Tr[A B]/d`.

# %%
basis = [pauli_matrix(k, 2) for k in range(16)]
gram = np.array([[np.trace(a @ b).real / 4 for b in basis] for a in basis])
print("orthonormal:", np.allclose(gram, np.eye(16)))
