# %% [markdown]
# Local observables of a band-limited state
#
# A superposition of plane waves with wavenumbers in [-1, 1] can still
# oscillate faster than 1 somewhere.  The momentum weak value
# -i psi'/psi, postselected on position, shows it directly.

# %%
import numpy as np

from superlab.numerics import composite_rule
from superlab.weak_value import (
    detect_super_regions,
    evaluator,
    momentum_operator,
    sum_rule_check,
    superoscillating_state,
    weak_value_field,
)

a, N = 4.0, 12
state = superoscillating_state(a, N)
ev = evaluator(state)
print("wavenumber band:", state.bounds)

# %%
x = np.linspace(-6, 6, 13)
prof = weak_value_field(momentum_operator(), ev, x)
for xi, k, s in zip(x, prof.real, prof.super_flags):
    print(f"x = {xi:5.1f}   Re p_w = {k:8.4f}   {'super' if s else ''}")

# %%
fine = np.linspace(-N * np.pi, N * np.pi, 4001)
regions = detect_super_regions(weak_value_field(momentum_operator(), ev, fine))
print("super regions:", [(round(lo, 3), round(hi, 3)) for lo, hi in regions][:5])

# %% [markdown]
# Averaged with |psi|^2 over a full period, the local momentum returns the
# ordinary expectation value.

# %%
rule = composite_rule(*state.domain, 60)
lhs, rhs = sum_rule_check(state, weak_value_field(momentum_operator(), ev, rule.nodes), rule)
print(f"sum rule: {lhs:.12f} vs {rhs:.12f}")
