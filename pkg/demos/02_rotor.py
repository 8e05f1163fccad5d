# %% [markdown]
# Negative local angular momentum of a rigid rotor
#
# psi = 1 + c cos(theta) mixes l = 0 and l = 1, so L^2/hbar^2 has eigenvalues
# 0 and 2.  Its local value 2c cos/(1 + c cos) drops below 0 in the southern
# hemisphere.

# %%
import numpy as np

from superlab.rotor import (
    RotorState,
    local_L2,
    local_L2_profile,
    rotor_exact_evolution,
    rotor_time_phase,
)

state = RotorState(0.5)
theta = np.linspace(0.1, np.pi, 8)
prof = local_L2_profile(state, theta)
for th, v, s in zip(theta, prof.real, prof.super_flags):
    print(f"theta = {th:5.3f}   local L^2 = {v:8.4f}   {'below band' if s else ''}")

# %%
edge = RotorState(1.0)
print("c = 1 at theta = pi:", local_L2(edge, np.pi), "(node of psi)")

# %% [markdown]
# For short times the exact evolution is the initial state times a local
# phase running at the local frequency; the error shrinks like t^2.

# %%
th = np.array([2.5])
psi0 = rotor_exact_evolution(state, th, 0.0)
for t in (0.1, 0.05, 0.025):
    err = abs(rotor_exact_evolution(state, th, t) - psi0 * rotor_time_phase(state, th, t))[0]
    print(f"t = {t:6.3f}   error = {err:.3e}")
