# %% [markdown]
# Superenergy of the oscillator sequence
#
# With omega_N = omega_0/N the N-th member sums levels up to E_N, yet near
# the origin its local energy is about hbar omega_0 N/(2g^2), well above E_N,
# over a region of half-width sqrt(N) g.

# %%
import numpy as np

from superlab.oscillator import (
    OscillatorConfig,
    Scaling,
    build_sequence_state,
    hN_closed,
    hN_spectral,
    local_energy,
    local_energy_profile,
    super_region,
)
from superlab.weak_value import detect_super_regions

g = 0.5
for N in (20, 50, 100):
    cfg = OscillatorConfig(N, g, Scaling.INVERSE_N)
    lo, hi, E_S, _ = super_region(cfg)
    x = np.linspace(2 * lo, 2 * hi, 2001)
    found = [r for r in detect_super_regions(local_energy_profile(cfg, x)) if r[0] <= 0 <= r[1]]
    print(f"N = {N:3d}  Re E(0) = {local_energy(cfg, 0.0).real:8.3f}  E_S = {E_S:6.1f}  "
          f"E_N = {cfg.E_max:6.3f}  region {found[0][1]:.3f} vs {hi:.3f}")

# %% [markdown]
# The eigenfunction sum agrees with the closed form even when its terms
# cancel by hundreds of orders of magnitude.

# %%
cfg = OscillatorConfig(400, g, Scaling.INVERSE_N2)
st = build_sequence_state(cfg)
print("largest |c_n| ~ 10^%.0f" % (st.log_mag.max() / np.log(10)))
x = np.array([0.0, 50.0, 200.0])
a, b = hN_spectral(st, x), hN_closed(cfg, x)
print("log|h| spectral:", np.round(a.log_mag, 10))
print("log|h| closed:  ", np.round(b.log_mag, 10))
