"""Follow individual teleportation runs and compare their average with the closed form.

Run: python3 demos/02_single_runs.py
"""

import math

from optoport import (
    SELECTED_VARIANT,
    PhysicalParams,
    couplings_from_params,
    estimate_fidelity,
    evolve_initial,
    extract_coefficients,
    fidelity_coherent,
    run_trajectory,
    time_in_window,
)

c = couplings_from_params(PhysicalParams())
nbar = 10.0
alpha_in = 1.0 + 1.0j

# Pulse length chosen so that chi * tau = sqrt(2) inside the working window.
t = time_in_window(c, math.sqrt(2), SELECTED_VARIANT)
print(f"interaction time {t * 1e3:.4f} ms (Theta t = {c.big_theta * t:.6f}), nbar = {nbar:g}\n")

for k in range(5):
    r = run_trajectory(c, nbar, t, alpha_in, seed=1, index=k)
    x, p = r.out_state.mean
    print(f"run {k}: heterodyne {r.alpha:.3g}, Bell ({r.x_plus:+.3f}, {r.p_minus:+.3f}) "
          f"-> mirror mean ({x:+.3f}, {p:+.3f}), overlap {r.overlap:.4f}")

# Each run lands somewhere different; the average overlap is the fidelity.
exact = fidelity_coherent(extract_coefficients(evolve_initial(c, nbar, t)))
mean, se = estimate_fidelity(c, nbar, t, alpha_in, 4000, seed=1)
print(f"\nclosed form {exact:.5f}; 4000 runs give {mean:.5f} +- {se:.5f}")
