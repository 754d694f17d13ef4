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
# # Preparing the mixed DPTM inputs
#
# Hardware prepares pure states, so the mixed inputs are made by applying a
# channel to a pure seed. Each built-in preparation is a 50/50 mixture of two
# unitaries.

# %%
import numpy as np

from dptm.channels import kraus_apply, validate_cptp
from dptm.states import BUILTIN_PREP_TARGETS, dptm_state, prep_channel_builtin

for name, (seed, n, j) in BUILTIN_PREP_TARGETS.items():
    out = kraus_apply(prep_channel_builtin(name), seed)
    print(name, "-> rho_%d:" % j, np.allclose(out, dptm_state(j, n)),
          " CPTP:", validate_cptp(prep_channel_builtin(name)).is_cptp)

# %% [markdown]
# One could instead ask for a single map sending all four standard pure
# states to all four DPTM states at once. The linear conditions fix it
# uniquely, but its Choi matrix has a negative eigenvalue: no physical channel
# does all four at the same time, so each input is prepared separately.

# %%
from dptm.states import prep_channel_solve, state_family

sol = prep_channel_solve(state_family("dptm", 1), state_family("sqpt", 1))
print(np.round(sol.ptm.gamma, 12))
print("min Choi eigenvalue:", round(sol.min_choi_eigenvalue, 4), " CP:", sol.is_cp)
