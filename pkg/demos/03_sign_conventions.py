"""Why the feed-forward sign matters.

Eight sign choices (Bell mixing, momentum feed, heterodyne gain) all give the
same closed-form number but only some of them actually carry the input to
the mirror. Simulating the full linear protocol tells them apart.

Run: python3 demos/03_sign_conventions.py
"""

import math

from optoport import PhysicalParams, couplings_from_params, evolve_initial
from optoport.protocol import ALL_VARIANTS, PRINTED_VARIANT, protocol_fidelity, time_in_window

c = couplings_from_params(PhysicalParams())
for v in ALL_VARIANTS:
    t = time_in_window(c, math.sqrt(2), v)
    f = protocol_fidelity(evolve_initial(c, 10.0, t), v, 1 + 1j)
    tag = "  (literal feed-forward)" if v == PRINTED_VARIANT else ""
    print(f"variant {v.label}: fidelity at the peak {f:.4f}{tag}")

# Only two variants transport the input: +-+ (window at the end of the period)
# and its time reverse --+ (window right after t = 0). The library defaults to +-+.
