"""
Serial augmentation (setup 1)
=============================

A (256, 128) auxiliary polar code protects the 256 semipolarized channels of
an N = 4096 inner code. Same length and rate as the plain (4096, 2048) code.
"""

from polaraug import StopRule, System, build_setup, construct, run_point
from polaraug.channel import ChannelPoint
from polaraug.cli import rate_table

setup1 = build_setup(1)
print("\n".join(rate_table(setup1)))

###############################################################################
# A short comparison. Raise ``min_frame_errors`` for publishable numbers.
rule = StopRule(min_frame_errors=20, max_frames=2000)
for name, code in [("plain 4096", construct(4096, 2048)), ("setup 1", setup1)]:
    system = System(code, max_iters=60, early_stop=True)
    res = run_point(system, ChannelPoint(2.0, "EbN0", system.rate), rule, seed=1)
    print(f"{name:10s} frames={res.frames:5d} BER={res.ber:.2e} FER={res.fer:.2e}")
