"""Which relay should jam?

With instantaneous CSI the relay with the largest residual power at Eve is
picked for every transmission.  With only statistical CSI, the relay whose
channel to Eve is strongest on average is picked once.  Under common random
numbers the instantaneous choice is never worse on any single trial.

Run:  python demos/relay_choice.py
"""

import numpy as np

from secsat.secrecy import LinkModel, capacity_at_split, sample_residuals, sample_sat_gain
from secsat.relay_selection import select_instantaneous_batch, select_statistical
from secsat.streams import Streams

mean_powers = [0.7, 0.9, 1.1, 1.3]
trials, rate, alpha = 200_000, 2.0, 0.5
streams = Streams(3)

print("N_r  P_dB  instantaneous  statistical")
for n_r in (2, 4, 8):
    relays = [LinkModel.build(n_r, n_r, k_sd=10.0, mean_power_re=p) for p in mean_powers]
    x = sample_sat_gain(relays[0], streams.generator(n_r, "sd"), trials)
    res = np.stack(
        [sample_residuals(link, streams.generator(n_r, k, "rd"), streams.generator(n_r, k, "re"), trials)
         for k, link in enumerate(relays)]
    )
    inst = res[select_instantaneous_batch(res) - 1, np.arange(trials)]
    stat = res[select_statistical(mean_powers) - 1]
    for p_db in (10.0, 13.0):
        big_p = 10 ** (p_db / 10)
        g = big_p * x
        sop_i = np.mean(capacity_at_split(alpha, g, g, big_p * inst) < rate)
        sop_s = np.mean(capacity_at_split(alpha, g, g, big_p * stat) < rate)
        print(f"{n_r:3d}  {p_db:4g}  {sop_i:13.4f}  {sop_s:11.4f}")
