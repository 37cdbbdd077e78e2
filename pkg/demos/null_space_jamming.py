"""Null-space jamming at a multi-antenna relay.

The relay knows its channel to Bob, builds an orthonormal basis of that
channel's orthogonal complement and transmits artificial noise only along
those directions.  Bob receives none of it; Eve receives whatever part of
her own channel is not aligned with Bob's.

Run:  python demos/null_space_jamming.py
"""

import numpy as np

from secsat.channel import ChannelSpec, an_signal, null_space_basis, projected_residual_power, sample_channel
from secsat.relay_selection import residual_cdf
from secsat.streams import Streams

streams = Streams(7)
spec = ChannelSpec("rayleigh", dim=4, mean_power=1.0)

h_rd = sample_channel(spec, streams.generator("h_rd"))
h_re = sample_channel(spec, streams.generator("h_re"))
basis = null_space_basis(h_rd)
noise = an_signal(basis, streams.generator("z"))

print("relay antennas        :", spec.dim)
print("basis shape           :", basis.shape)
print("leak towards Bob      : %.2e" % abs(np.vdot(h_rd, noise)))
print("jamming seen by Eve   : %.4f" % abs(np.vdot(h_re, noise)) ** 2)

# Over many channel draws the residual power follows a central chi-square
# law with 2(N_r - 1) degrees of freedom.
n = 200_000
r = projected_residual_power(
    sample_channel(spec, streams.generator("many_re"), n),
    sample_channel(spec, streams.generator("many_rd"), n),
)
print("\n  r     empirical   analytical")
for t in (0.1, 0.3, 0.6, 1.0):
    print(f"{t:5.1f}   {np.mean(r <= t):9.4f}   {residual_cdf(t, 4, 1.0):10.4f}")
