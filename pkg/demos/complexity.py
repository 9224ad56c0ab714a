"""
Decoder complexity in processing elements
=========================================
"""

from polaraug import build_setup, pe_count

reference = pe_count([4096])
print(f"plain N=4096: {reference}")
for sid in (1, 2, 3):
    spec = build_setup(sid)
    pes = pe_count(spec.lengths)
    print(f"setup {sid} (N={spec.total_n}): {pes}  ({pes / reference:.4f} x reference)")
