"""
Encoding and BP decoding of a plain polar code
==============================================
"""

import numpy as np

from polaraug import assemble_input, bp_decode, construct, encode
from polaraug.channel import ChannelPoint, llr, modulate, transmit

spec = construct(1024, 512, design_snr_db=0.0)
rng = np.random.default_rng(0)

info = rng.integers(0, 2, (32, spec.k_info), dtype=np.uint8)
x = encode(assemble_input(spec, info))

# The encoder is its own inverse over GF(2).
assert np.array_equal(encode(x)[:, list(spec.info_set)], info)

###############################################################################
# BPSK over AWGN at Eb/N0 = 2.5 dB, then BP with early stopping.
point = ChannelPoint(2.5, "EbN0", rate=0.5)
y = transmit(modulate(x), point.noise_var, rng)
u_hat, iters = bp_decode(spec, llr(y, point.noise_var), max_iters=60, early_stop=True)

errors = np.count_nonzero(u_hat[:, list(spec.info_set)] != info)
print(f"bit errors: {errors} / {info.size}, mean iterations {iters.mean():.1f}")
