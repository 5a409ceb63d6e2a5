"""Physical layer: Rayleigh links, relay geometry and outage probabilities.

The source-destination link has unit mean power. A relay at normalized
distance ``k`` from the source sees mean powers ``k**-alpha`` on the
source-relay link and ``(1 - k)**-alpha`` on the relay-destination link.
All SNRs here are linear; convert with :func:`db_to_linear` at the edges.
"""

import math
from dataclasses import dataclass
from typing import Optional

from .special import DomainError, xi_k1_factor

__all__ = [
    "DEFAULT_ALPHA",
    "ChannelParams",
    "OutageSet",
    "db_to_linear",
    "outage_threshold",
    "outage_single",
    "success_single",
    "success_af_relay_path",
    "success_df_links",
    "af_xi",
    "outage_af",
    "outage_af_relay_path",
    "outage_df_links",
    "sample_link_gain",
]

DEFAULT_ALPHA = 3.12


def db_to_linear(db):
    return 10.0 ** (float(db) / 10.0)


def _require(cond, msg):
    if not cond:
        raise DomainError(msg)


def _finite(*values):
    return all(math.isfinite(float(v)) for v in values)


@dataclass(frozen=True)
class ChannelParams:
    """Operating point of the three-node network.

    Parameters
    ----------
    gamma : float
        Transmit SNR ``P_t / N_0`` (linear, > 0).
    alpha : float
        Path-loss exponent (>= 1).
    k : float
        Source-relay distance over source-destination distance, in (0, 1).
    """

    gamma: float
    alpha: float = DEFAULT_ALPHA
    k: float = 0.5

    def __post_init__(self):
        _require(_finite(self.gamma, self.alpha, self.k),
                 f"channel parameters must be finite: {self!r}")
        _require(self.gamma > 0, f"gamma must be > 0, got {self.gamma!r}")
        _require(self.alpha >= 1, f"alpha must be >= 1, got {self.alpha!r}")
        _require(0 < self.k < 1,
                 f"relay location k must lie in the open interval (0, 1), got {self.k!r}")

    @classmethod
    def from_db(cls, snr_db, alpha=DEFAULT_ALPHA, k=0.5):
        return cls(db_to_linear(snr_db), alpha, k)

    @property
    def sigma2_sr(self):
        """Mean power of the source-relay link."""
        return self.k ** -self.alpha

    @property
    def sigma2_rd(self):
        """Mean power of the relay-destination link."""
        return (1.0 - self.k) ** -self.alpha

    def _mirror_pair(self):
        # (short, long) leg fractions built so k and 1-k give bit-identical
        # pairs; keeps every k-symmetric quantity exactly symmetric in floats.
        long_leg = max(self.k, 1.0 - self.k)
        return 1.0 - long_leg, long_leg


@dataclass(frozen=True)
class OutageSet:
    """Link error probabilities for one operating point.

    ``eps_path2`` is the S-R-D path outage in AF mode and the S-R link outage
    in DF mode. ``eps_rd`` is only present for DF.
    """

    eps_sd: float
    eps_path2: float
    eps_rd: Optional[float] = None

    def __post_init__(self):
        for name in ("eps_sd", "eps_path2", "eps_rd"):
            value = getattr(self, name)
            if value is None:
                continue
            _require(math.isfinite(value) and 0.0 <= value <= 1.0,
                     f"{name} must be a probability, got {value!r}")

    def as_tuple(self):
        if self.eps_rd is None:
            return (self.eps_sd, self.eps_path2)
        return (self.eps_sd, self.eps_path2, self.eps_rd)


def outage_threshold(rate):
    """SNR threshold ``2**rate - 1`` below which a link is in outage."""
    rate = float(rate)
    _require(math.isfinite(rate) and rate >= 0, f"rate must be finite and >= 0, got {rate!r}")
    return math.expm1(rate * math.log(2.0))


def success_single(gamma, rate, sigma2=1.0):
    """Probability that one Rayleigh link with mean power ``sigma2`` is not in outage."""
    _require(_finite(gamma, sigma2), "gamma and sigma2 must be finite")
    _require(gamma > 0 and sigma2 > 0, f"gamma and sigma2 must be > 0, got {gamma!r}, {sigma2!r}")
    return math.exp(-outage_threshold(rate) / (gamma * sigma2))


def outage_single(gamma, rate, sigma2=1.0):
    """Outage probability of one Rayleigh link with mean power ``sigma2``.

    >>> round(outage_single(10.0, 1.0), 7)
    0.0951626
    """
    _require(_finite(gamma, sigma2), "gamma and sigma2 must be finite")
    _require(gamma > 0 and sigma2 > 0, f"gamma and sigma2 must be > 0, got {gamma!r}, {sigma2!r}")
    return -math.expm1(-outage_threshold(rate) / (gamma * sigma2))


def af_xi(params: ChannelParams, rate):
    """Argument ``xi`` of the Bessel factor in the AF path CDF.

    ``4 (t**2 + t) (k (1-k))**alpha / gamma**2`` with ``t = 2**rate - 1``.
    """
    t = outage_threshold(rate)
    short, long_leg = params._mirror_pair()
    return 4.0 * (t * t + t) * (short * long_leg) ** params.alpha / params.gamma ** 2


def success_af_relay_path(params: ChannelParams, rate):
    """Probability that the AF path SNR ``a*b/(a+b+1)`` clears ``2**rate - 1``.

    ``a`` and ``b`` are the exponential per-hop SNRs with means
    ``gamma k**-alpha`` and ``gamma (1-k)**-alpha``.
    """
    t = outage_threshold(rate)
    short, long_leg = params._mirror_pair()
    decay = math.exp(-t * (short ** params.alpha + long_leg ** params.alpha) / params.gamma)
    return xi_k1_factor(af_xi(params, rate)) * decay


def outage_af_relay_path(params: ChannelParams, rate):
    """Outage probability of the amplify-and-forward S-R-D path."""
    return 1.0 - success_af_relay_path(params, rate)


def success_df_links(params: ChannelParams, rate):
    """Non-outage probabilities of the S-D, S-R and R-D links."""
    t = outage_threshold(rate)
    g = params.gamma
    return (
        math.exp(-t / g),
        math.exp(-params.k ** params.alpha * t / g),
        math.exp(-(1.0 - params.k) ** params.alpha * t / g),
    )


def outage_df_links(params: ChannelParams, rate) -> OutageSet:
    """Outages of the S-D, S-R and R-D links used by decode-and-forward."""
    t = outage_threshold(rate)
    g = params.gamma
    return OutageSet(
        eps_sd=-math.expm1(-t / g),
        eps_path2=-math.expm1(-params.k ** params.alpha * t / g),
        eps_rd=-math.expm1(-(1.0 - params.k) ** params.alpha * t / g),
    )


def outage_af(params: ChannelParams, rate) -> OutageSet:
    """Outages of the direct link and the AF relay path."""
    return OutageSet(outage_single(params.gamma, rate, 1.0), outage_af_relay_path(params, rate))


def sample_link_gain(rng, sigma2=1.0, size=None):
    """Draw ``|h|**2`` for a Rayleigh link: exponential with mean ``sigma2``.

    ``rng`` is a :class:`numpy.random.Generator`; the draw is deterministic
    given its state.
    """
    _require(math.isfinite(sigma2) and sigma2 > 0, f"sigma2 must be > 0, got {sigma2!r}")
    return rng.exponential(sigma2, size=size)
