"""
Estimating the lumped disturbance
=================================

The observer is a first-order extended-state design. Its estimate obeys
``d_u_hat' = l (d_u - d_u_hat)``, a low-pass filter of the true lumped
term, so the steady error scales like ``|d_u'| / l``. Doubling ``l`` halves it.
"""
# %%
import numpy as np

from dobac import load_scenario, simulate
from dobac.analysis import sup_abs, window_mask

T_END = 20.0  # long enough to pass the start-up transient

plateaus = {}
for gain in (25.0, 50.0, 100.0):
    sc = load_scenario("msd-cubic-paper", [f"observer.gain={gain}", f"sim.t_end={T_END}"])
    log = simulate(sc)
    m = window_mask(log.t, (T_END / 2, T_END))
    plateaus[gain] = sup_abs(log["edu_norm"], m)
    print(f"l = {gain:5.0f}: sup ||d_u_hat - d_u|| = {plateaus[gain]:.4e}")

# %%
print("ratios:", plateaus[50.0] / plateaus[25.0], plateaus[100.0] / plateaus[50.0])
