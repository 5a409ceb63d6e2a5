"""Where should the relay sit?

For AF the goodput is symmetric in the relay position and peaks at the
midpoint.  DF prefers a relay a little closer to the destination at low
rate; that preference fades as the rate grows.

Run with ``python3 demos/relay_placement.py``.
"""

from relaygoodput import db_to_linear
from relaygoodput.optimizer import optimize_k

gamma = db_to_linear(10.0)

print(f"{'R':>4} {'k*_AF':>8} {'eta*_AF':>9} {'k*_DF':>8} {'eta*_DF':>9}")
for rate in (1, 2, 3, 4, 5, 6, 8, 10):
    af = optimize_k("af", gamma, 3.12, rate)
    df = optimize_k("df", gamma, 3.12, rate)
    print(f"{rate:4d} {af.k:8.4f} {af.goodput:9.4f} {df.k:8.4f} {df.goodput:9.4f}")
