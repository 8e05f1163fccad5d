# %% [markdown]
# Superoscillation in time
#
# Every eigenphase of h_N turns at most at omega_N (N + 1/2), which vanishes
# like 1/N for omega_N = omega_0/N^2.  Yet h_N(0, t) approaches
# exp(-i omega_0 t/(2 g^2)), which for g = 0.5 is exp(-2 i t).

# %%
import numpy as np

from superlab.oscillator import OscillatorConfig, Scaling, build_sequence_state
from superlab.time_evolution import (
    convergence_window,
    fig5_deviation,
    hN_time,
    resummed_series,
)

t = np.linspace(-1, 1, 21)
for N in (10, 100, 1000):
    cfg = OscillatorConfig(N, 0.5, Scaling.INVERSE_N2)
    dev = fig5_deviation(cfg, t)
    window = convergence_window(cfg, np.linspace(0, 3, 61))
    print(f"N = {N:4d}  max deviation on |t| <= 1: {dev.max():.4f}  window (0.05): {window:.2f}")

# %% [markdown]
# The large-N resummation captures the same value with 40 terms.

# %%
cfg = OscillatorConfig(1000, 0.5, Scaling.INVERSE_N2)
exact = hN_time(build_sequence_state(cfg), 0.0, 0.25)
approx = resummed_series(cfg, 0.0, 0.25, 40)
print("exact:   ", exact.to_complex())
print("series:  ", approx.to_complex())
print("e^{-i/2}:", np.exp(-0.5j))
