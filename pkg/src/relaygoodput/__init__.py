"""Goodput of a three-node cooperative relay network with ARQ over Rayleigh fading.

Closed-form delivery times and goodput for amplify-and-forward and
decode-and-forward incremental relaying, a Monte Carlo protocol simulator
that checks them, and rate / relay-location optimizers.
"""

import logging

from .analytic import (
    GoodputResult,
    Mode,
    StateDistribution,
    expected_time_af,
    expected_time_df,
    expected_time_df_product_form,
    goodput,
    goodput_af,
    goodput_df,
    goodput_single,
    state_probs_af,
    state_probs_df,
)
from .channel import (
    DEFAULT_ALPHA,
    ChannelParams,
    OutageSet,
    db_to_linear,
    outage_af,
    outage_af_relay_path,
    outage_df_links,
    outage_single,
    sample_link_gain,
)
from .montecarlo import (
    SAMPLED_FADING,
    FixedEps,
    SimConfig,
    SimReport,
    run_af_trial,
    run_batch,
    safe_slot_cap,
    run_df_trial,
)
from .optimizer import OptResult, optimize_joint, optimize_k, optimize_rate
from .special import DomainError, bessel_k1, xi_k1_factor

logging.getLogger(__name__).addHandler(logging.NullHandler())

__version__ = "0.1.0"
