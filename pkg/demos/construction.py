"""
Channel polarization and the three channel sets
===============================================

Bhattacharyya parameters of the 4096 synthesized channels, designed at
Es/N0 = 0 dB, and the split used by the serially augmented code.
"""

import numpy as np

from polaraug import build_reliabilities, partition_channels

rel = build_reliabilities(12, design_snr_db=0.0)
z_sorted = np.sort(rel.z)

# Most channels are already almost noiseless or almost useless; the middle
# band is what the auxiliary code protects.
for q in (0.1, 0.25, 0.5, 0.75, 0.9):
    print(f"quantile {q:4.2f}: z = {np.quantile(z_sorted, q):.3e}")

###############################################################################
# 1920 information channels, 256 semipolarized, 1920 frozen.
spec = partition_channels(rel, 1920, 256, 1920)
d1, d2 = spec.thresholds()
print(f"delta1 = {d1:.4g}, delta2 = {d2:.4g}")
print("first semipolarized indices:", spec.semi_set[:8])

###############################################################################
# Optional: plot the sorted parameters.
try:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
except ImportError:
    plt = None

if plt is not None:
    fig, ax = plt.subplots()
    ax.semilogy(z_sorted + 1e-300)
    ax.axhline(d1, ls="--")
    ax.axhline(d2, ls="--")
    ax.set_xlabel("sorted channel")
    ax.set_ylabel("Bhattacharyya parameter")
    fig.savefig("bhattacharyya_4096.png", dpi=120)
