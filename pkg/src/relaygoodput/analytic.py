"""Closed-form ARQ delivery times and goodput.

Times are measured in slots of length ``T = L/R`` (one codeword over one
link), so goodput is simply ``rate / expected_time``.
"""

import enum
import logging
import math
from dataclasses import dataclass
from typing import Optional, Tuple

from .channel import (
    ChannelParams,
    OutageSet,
    outage_af,
    outage_df_links,
    success_af_relay_path,
    success_df_links,
    success_single,
)
from .special import DomainError

__all__ = [
    "Mode",
    "StateDistribution",
    "GoodputResult",
    "SUCCESS_FLOOR",
    "state_probs_af",
    "state_probs_df",
    "expected_time_af",
    "expected_time_df",
    "expected_time_df_product_form",
    "goodput_single",
    "goodput_af",
    "goodput_df",
    "goodput",
]

logger = logging.getLogger(__name__)

# Link success probabilities that underflow are raised to this floor, which
# keeps goodput positive on aggressive rate grids. Goodput is computed from
# success probabilities directly: near saturation 1 - eps has no digits left.
SUCCESS_FLOOR = 1e-300


class Mode(str, enum.Enum):
    SINGLE = "single"
    AF = "af"
    DF = "df"


@dataclass(frozen=True)
class StateDistribution:
    """Probabilities of the mutually exclusive first-round network states."""

    mode: Mode
    probs: Tuple[float, ...]

    def __iter__(self):
        return iter(self.probs)

    def __len__(self):
        return len(self.probs)

    def __getitem__(self, i):
        return self.probs[i]


@dataclass(frozen=True)
class GoodputResult:
    """Expected slots per delivered codeword and the resulting goodput."""

    mode: Mode
    rate: float
    expected_time: float
    goodput: float
    outages: Optional[OutageSet] = None
    states: Optional[StateDistribution] = None


def _check_eps(*eps):
    for e in eps:
        if not (isinstance(e, (int, float)) and math.isfinite(e) and 0.0 <= e < 1.0):
            raise DomainError(f"link error probabilities must lie in [0, 1), got {e!r}")


def _floor(success, name):
    if success < SUCCESS_FLOOR:
        logger.warning("%s success probability %r below floor; raised to %r",
                       name, success, SUCCESS_FLOOR)
        return SUCCESS_FLOOR
    return success


def _check_rate(rate):
    if not (math.isfinite(rate) and rate > 0):
        raise DomainError(f"rate must be finite and > 0, got {rate!r}")


def state_probs_af(eps1, eps2):
    """States: direct success, relay success, both fail."""
    _check_eps(eps1, eps2)
    return StateDistribution(Mode.AF, (1.0 - eps1, eps1 * (1.0 - eps2), eps1 * eps2))


def state_probs_df(eps1, eps2, eps3):
    """States: direct success, S-D and S-R fail, relay delivers at once, relay needs retries."""
    _check_eps(eps1, eps2, eps3)
    relay_has_it = eps1 * (1.0 - eps2)
    return StateDistribution(
        Mode.DF, (1.0 - eps1, eps1 * eps2, relay_has_it * (1.0 - eps3), relay_has_it * eps3)
    )


def expected_time_af(eps1, eps2):
    """Mean slots to deliver one codeword with AF incremental relaying.

    Every failed direct attempt costs a second slot for the relay; a round in
    which both fail restarts from the source.

    >>> expected_time_af(0.5, 0.5)
    2.0
    """
    p1, p2, p3 = state_probs_af(eps1, eps2)
    return (p1 + 2.0 * p2 + 2.0 * p3) / (1.0 - p3)


def expected_time_df(eps1, eps2, eps3):
    """Mean slots to deliver one codeword with DF relaying.

    Outer rounds (S-D and S-R both fail) cost one slot each; once the relay
    holds the codeword it retries on the R-D link alone, a geometric number
    of extra slots with mean ``1 / (1 - eps3)``.
    """
    p1, p2, p3, p4 = state_probs_df(eps1, eps2, eps3)
    return (p1 + p2 + 2.0 * p3 + (2.0 + 1.0 / (1.0 - eps3)) * p4) / (1.0 - p2)


def expected_time_df_product_form(eps1, eps2, eps3):
    """Same quantity as :func:`expected_time_df`, from summing the nested retry tree."""
    _check_eps(eps1, eps2, eps3)
    q = 1.0 - eps1 * eps2
    return q * (1.0 + eps1 - eps3 - eps1 * eps2) / (q * q * (1.0 - eps3))


def goodput_single(gamma, rate, sigma2=1.0):
    """Direct link only: geometric number of attempts with mean ``1/(1-eps)``.

    >>> round(goodput_single(10.0, 2.0).goodput, 4)
    1.4816
    """
    _check_rate(rate)
    s = _floor(success_single(gamma, rate, sigma2), "direct link")
    expected = 1.0 / s
    return GoodputResult(Mode.SINGLE, rate, expected, rate / expected, OutageSet(1.0 - s, 0.0))


def goodput_af(params: ChannelParams, rate):
    """AF goodput ``R (1 - eps1 eps2) / (1 + eps1)``.

    The attached ``outages`` and ``states`` are for display; the delivery
    time itself is formed from the link success probabilities.
    """
    _check_rate(rate)
    s1 = _floor(success_single(params.gamma, rate), "S-D")
    s2 = _floor(success_af_relay_path(params, rate), "S-R-D")
    eps1 = 1.0 - s1
    # 1 - eps1*eps2 == s1 + eps1*s2 and p1 + 2 p2 + 2 p3 == 1 + eps1
    expected = (1.0 + eps1) / (s1 + eps1 * s2)
    eps = OutageSet(outage_af(params, rate).eps_sd, 1.0 - s2)
    states = StateDistribution(Mode.AF, (s1, eps1 * s2, eps1 * (1.0 - s2)))
    return GoodputResult(Mode.AF, rate, expected, rate / expected, eps, states)


def goodput_df(params: ChannelParams, rate):
    """DF goodput ``R (1 - p2) / (p1 + p2 + 2 p3 + (2 + 1/(1-eps3)) p4)``."""
    _check_rate(rate)
    raw = success_df_links(params, rate)
    s1, s2, s3 = (_floor(s, name) for s, name in zip(raw, ("S-D", "S-R", "R-D")))
    eps1 = 1.0 - s1
    relay_has_it = eps1 * s2
    expected = (1.0 + relay_has_it / s3) / (s1 + relay_has_it)
    eps = outage_df_links(params, rate)
    states = StateDistribution(
        Mode.DF, (s1, eps1 * (1.0 - s2), relay_has_it * s3, relay_has_it * (1.0 - s3))
    )
    return GoodputResult(Mode.DF, rate, expected, rate / expected, eps, states)


def goodput(mode, params: ChannelParams, rate):
    """Dispatch on ``mode`` (``"single"``, ``"af"`` or ``"df"``)."""
    mode = Mode(mode)
    if mode is Mode.AF:
        return goodput_af(params, rate)
    if mode is Mode.DF:
        return goodput_df(params, rate)
    return goodput_single(params.gamma, rate)
