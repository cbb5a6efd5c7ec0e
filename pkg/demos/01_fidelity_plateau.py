"""How well does the mirror receive a coherent state, and for how long?

Run: python3 demos/01_fidelity_plateau.py
"""

from optoport import PhysicalParams, couplings_from_params, summarize_curve

params = PhysicalParams()
c = couplings_from_params(params)

# The two sideband couplings are almost equal; their small mismatch sets the
# slow frequency Theta that brings the state back to where it started.
print(f"chi = {c.chi:.5g} rad/s, theta = {c.theta:.5g} rad/s, Theta = {c.big_theta:.5g} rad/s")
print(f"one period of the slow oscillation lasts {2 * 3.141592653589793 / c.big_theta * 1e3:.3g} ms\n")

print("nbar     F_max     F_max(no heterodyne)   width of F > 1/2 (Theta t)   min n_eff")
for nbar in (0, 1, 10, 1000):
    s = summarize_curve(c, nbar)
    print(f"{nbar:<8g} {s.f_max:.5f}   {s.f_max_no_het:.5f}                {s.window:<12.6g}                 {s.n_eff_min:.4f}")

# The peak value does not care about the mirror's starting temperature, but a
# hot mirror leaves only a narrow slice of time in which the protocol beats
# the classical 1/2 bound. Dropping the heterodyne correction costs about 5 %.
