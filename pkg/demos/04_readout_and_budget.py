"""Reading the mirror back out, and how much time there is to do it.

Run: python3 demos/04_readout_and_budget.py
"""

import math

from optoport import PhysicalParams, couplings_from_params, summarize_curve
from optoport.budget import decoherence_time, power_sensitivity
from optoport.readout import dominance_condition, readout_coefficients

p = PhysicalParams()
c = couplings_from_params(p)

# A quarter period in, compare the combination a1 - a2^dag under the two sign
# choices for the beam-splitter coupling. With sigma = +1 the mirror term
# nearly cancels; with sigma = -1 it is large but the optical terms are larger
# still. The small dominance ratio below only appears when the optical
# coefficients of the first flow are paired with the mirror term of the second,
# which is what `optoport readout-check` reports as residuals.
t = math.pi / (2 * c.big_theta)
for sigma in (1, -1):
    r = readout_coefficients(c, t, sigma)
    print(f"sigma = {sigma:+d}, Theta t = pi/2: a1 - a2^dag = {r.c_b:.4g} b^dag {r.c_a1:+.3g} a1 {r.c_a2:+.3g} a2^dag")
print(f"dominance ratio theta(theta - chi)/[Theta(theta + chi)] = {dominance_condition(c):.3g}\n")

# Laser power noise shifts Theta, hence the timing of the pulse.
s = power_sensitivity(p)
print(f"d ln(Theta t) / d ln P = {s.slope:.6f}: a 1 % power error moves Theta t by {s.slope:.2g} %")

for nbar in (10, 1000):
    summ = summarize_curve(c, nbar)
    print(f"nbar = {nbar}: thermal decoherence after {decoherence_time(p.damping, nbar) * 1e3:.3g} ms, "
          f"pulse {summ.argmax / c.big_theta * 1e3:.3g} ms, F > 1/2 for {summ.window / c.big_theta * 1e6:.3g} us")
