"""Choosing how much power goes to the satellite and how much to the jammer.

Three schemes:

* uniform      alpha = 0.5 always;
* optimal      per channel realization, the capacity maximizer
               1 / (1 + sqrt((g_sd + 1) / (g_re + 1)));
* statistical  one alpha per operating point, the grid point with the
               smallest closed-form outage probability.

Run:  python demos/power_split.py
"""

import numpy as np

from secsat.power_allocation import TraversalConfig, alpha_optimal, alpha_statistical, objective_f
from secsat.secrecy import SecrecyParams

# A single realization: SNR 10 on the satellite link, 100 on the jamming link.
res = alpha_optimal(10.0, 100.0)
grid = np.linspace(0.01, 0.99, 99)
print("optimal alpha        : %.6f" % res.alpha)
print("capacity at optimum  : %.4f bit/s/Hz" % res.objective)
print("best of a 0.01 grid  : %.2f" % grid[np.argmax(objective_f(grid, 10.0, 100.0))])

# Statistical traversal over alpha at several total powers.
print("\nP_dB  step   alpha  closed-form SOP")
for p_db in (8.0, 10.0, 14.0):
    for step in (0.1, 0.05, 0.01):
        cfg = TraversalConfig(step=step, big_p=10 ** (p_db / 10), n_r=4, params=SecrecyParams(1.0))
        r = alpha_statistical(cfg)
        print(f"{p_db:4g}  {step:4.2f}  {r.alpha:5.2f}  {r.objective:.4f}")
