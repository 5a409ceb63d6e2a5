"""Check the closed-form delivery times against the protocol simulator.

The simulator draws Rayleigh link gains and runs the ARQ state machine
slot by slot, so it never evaluates the Bessel-function outage formula.
Agreement within a few standard errors is a direct check of that formula.

Run with ``python3 demos/simulation_check.py``.
"""

from relaygoodput import ChannelParams, SimConfig, db_to_linear, goodput, run_batch, safe_slot_cap

params = ChannelParams(db_to_linear(10.0), alpha=3.12, k=0.5)

print(f"{'mode':>4} {'R':>4} {'analytic':>10} {'simulated':>10} {'SE':>9} {'z':>6}")
for mode in ("af", "df"):
    for rate in (1.0, 3.0, 5.0):
        expected = goodput(mode, params, rate).expected_time
        cfg = SimConfig(mode, params, rate, trials=200_000, seed=7,
                        max_slots_per_codeword=safe_slot_cap(expected))
        rep = run_batch(cfg)
        print(f"{mode:>4} {rate:4.1f} {expected:10.5f} {rep.mean_slots:10.5f} "
              f"{rep.std_error:9.2e} {rep.z_score(expected):+6.2f}")
