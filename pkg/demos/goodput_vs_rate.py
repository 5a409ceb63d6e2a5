"""Goodput against transmission rate for direct, AF and DF transmission.

At low rate every scheme delivers on the first slot and goodput grows
with R.  At high rate outages dominate and goodput collapses, so each
curve has a single peak.  Relaying lifts and moves that peak.

Run with ``python3 demos/goodput_vs_rate.py``.
"""

import numpy as np

from relaygoodput import ChannelParams, db_to_linear, goodput_af, goodput_df, goodput_single

params = ChannelParams(db_to_linear(10.0), alpha=3.12, k=0.5)
rates = np.linspace(0.5, 12.0, 24)

print(f"{'R':>6} {'single':>8} {'AF':>8} {'DF':>8}")
for r in rates:
    print(f"{r:6.2f} {goodput_single(params.gamma, r).goodput:8.4f} "
          f"{goodput_af(params, r).goodput:8.4f} {goodput_df(params, r).goodput:8.4f}")

for name, fn in (("AF", goodput_af), ("DF", goodput_df)):
    fine = np.linspace(0.1, 12.0, 2000)
    eta = [fn(params, r).goodput for r in fine]
    i = int(np.argmax(eta))
    print(f"{name} peak near R = {fine[i]:.3f} with goodput {eta[i]:.4f}")
