# %% [markdown]
# Quantum mimicry: low energy overall, high energy inside a window
#
# For omega_N = omega_0/N^2 the spectral energy of the sequence falls like
# 1/N, but conditioned on finding the particle in (-2, 2) the energy tends
# to hbar omega_0/(2 g^2).  The price is the postselection probability.

# %%
from superlab.energy_analysis import windowed_energy
from superlab.oscillator import OscillatorConfig, Scaling

for N in (50, 100, 200, 300, 500):
    r = windowed_energy(OscillatorConfig(N, 0.5, Scaling.INVERSE_N2), 2.0)
    print(f"N = {N:3d}  spectral {r.spectral_energy:.5f}  windowed {r.windowed_energy:.5f}  "
          f"ln P = {r.log_postselection_prob:9.2f}")
