"""Joint choice of rate and relay location.

Sweeps SNR and reports the best (k, R) pair for each relaying mode.
As SNR grows both modes push the rate up and the gap between them shrinks.

Run with ``python3 demos/joint_optimization.py``.
"""

from relaygoodput import db_to_linear
from relaygoodput.optimizer import optimize_joint

print(f"{'SNR dB':>6} {'mode':>4} {'k*':>7} {'R*':>7} {'eta*':>7}")
for snr_db in (0, 5, 10, 20, 30):
    for mode in ("af", "df"):
        res = optimize_joint(mode, db_to_linear(snr_db), 3.12)
        print(f"{snr_db:6d} {mode:>4} {res.best_k:7.4f} {res.best_rate:7.3f} {res.best_goodput:7.4f}")
