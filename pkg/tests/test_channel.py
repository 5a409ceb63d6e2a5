import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from relaygoodput.channel import (
    ChannelParams,
    OutageSet,
    af_xi,
    db_to_linear,
    outage_af_relay_path,
    outage_df_links,
    outage_single,
    sample_link_gain,
)
from relaygoodput.special import DomainError, xi_k1_factor

from conftest import SEED
from oracles import empirical_outage

N_DRAWS = 10_000_000
P10 = ChannelParams(10.0, 3.12, 0.5)


def test_db_conversion():
    assert db_to_linear(10) == 10.0
    assert db_to_linear(0) == 1.0
    assert ChannelParams.from_db(10, 3.12, 0.5) == P10


@pytest.mark.parametrize("kwargs", [
    dict(gamma=0.0), dict(gamma=-1.0), dict(gamma=math.inf), dict(alpha=0.5),
    dict(k=0.0), dict(k=1.0), dict(k=1.2), dict(k=math.nan),
])
def test_params_validation(kwargs):
    base = dict(gamma=10.0, alpha=3.12, k=0.5)
    base.update(kwargs)
    with pytest.raises(DomainError):
        ChannelParams(**base)


def test_k_error_names_interval():
    with pytest.raises(DomainError, match=r"\(0, 1\)"):
        ChannelParams(10.0, 3.12, 1.0)


def test_outage_single_values():
    assert outage_single(10.0, 0.0) == 0.0
    assert outage_single(10.0, 1.0) == pytest.approx(1 - math.exp(-0.1), rel=1e-15)
    assert outage_single(1e12, 4.0) == pytest.approx(0.0, abs=1e-10)


@pytest.mark.parametrize("args", [(0.0, 1.0, 1.0), (10.0, -1.0, 1.0), (10.0, 1.0, 0.0),
                                  (10.0, math.nan, 1.0), (math.inf, 1.0, 1.0)])
def test_outage_single_domain(args):
    with pytest.raises(DomainError):
        outage_single(*args)


def test_outage_single_monte_carlo():
    rng = np.random.default_rng(SEED)
    gamma, rate = 10.0, 1.0
    p, se = empirical_outage(rng, N_DRAWS,
                             lambda r, n: np.log2(1 + r.exponential(1.0, n) * gamma) < rate)
    assert abs(p - outage_single(gamma, rate)) < 3 * se


def _af_path_snr(rng, params, n):
    a = params.gamma * params.k ** -params.alpha * rng.exponential(1.0, n)
    b = params.gamma * (1 - params.k) ** -params.alpha * rng.exponential(1.0, n)
    return a * b / (a + b + 1)


@pytest.mark.parametrize("k, rate", [(0.5, 2.0), (0.3, 3.0), (0.8, 4.0)])
def test_af_path_outage_monte_carlo(k, rate):
    params = ChannelParams(10.0, 3.12, k)
    rng = np.random.default_rng(SEED + 1)
    p, se = empirical_outage(rng, N_DRAWS, lambda r, n: _af_path_snr(r, params, n) < 2 ** rate - 1)
    eps2 = outage_af_relay_path(params, rate)
    assert 0 < eps2 < 1
    assert abs(p - eps2) < 3 * se


def test_af_path_zero_rate():
    assert outage_af_relay_path(P10, 0.0) == 0.0


def test_af_path_prefers_midpoint():
    assert outage_af_relay_path(P10, 2.0) < outage_af_relay_path(ChannelParams(10.0, 3.12, 0.3), 2.0)


def test_af_path_composes_special_function():
    params, rate = ChannelParams(7.0, 2.5, 0.35), 2.5
    t = 2 ** rate - 1
    xi = 4 * (t * t + t) / (params.gamma ** 2 * (params.k * (1 - params.k)) ** -params.alpha)
    assert af_xi(params, rate) == pytest.approx(xi, rel=1e-14)
    direct = 1 - xi_k1_factor(xi) * math.exp(-t * (params.k ** params.alpha + (1 - params.k) ** params.alpha) / params.gamma)
    assert outage_af_relay_path(params, rate) == pytest.approx(direct, rel=1e-13)


@given(st.floats(0.001, 0.999), st.floats(0.01, 10.0), st.floats(0.1, 1000.0), st.floats(1.0, 6.0))
def test_af_path_symmetric_in_k(k, rate, gamma, alpha):
    a = outage_af_relay_path(ChannelParams(gamma, alpha, k), rate)
    b = outage_af_relay_path(ChannelParams(gamma, alpha, 1.0 - k), rate)
    assert a == b


def test_df_links_values():
    assert outage_df_links(P10, 0.0).as_tuple() == (0.0, 0.0, 0.0)
    out = outage_df_links(ChannelParams(10.0, 3.12, 0.01), 4.0)
    assert out.eps_path2 < 1e-6
    expected_rd = 1 - math.exp(-(0.99 ** 3.12) * 15 / 10)
    assert out.eps_rd == pytest.approx(expected_rd, rel=1e-14)
    assert out.eps_rd < out.eps_sd


def test_df_links_monte_carlo():
    rng = np.random.default_rng(SEED + 2)
    rate, t = 4.0, 15.0
    out = outage_df_links(P10, rate)
    for eps, sigma2 in [(out.eps_sd, 1.0), (out.eps_path2, P10.sigma2_sr), (out.eps_rd, P10.sigma2_rd)]:
        p, se = empirical_outage(rng, N_DRAWS, lambda r, n: P10.gamma * r.exponential(sigma2, n) < t)
        assert abs(p - eps) < 3 * se


def test_outage_set_validation():
    assert OutageSet(0.1, 0.2).as_tuple() == (0.1, 0.2)
    assert OutageSet(0.1, 0.2, 0.3).as_tuple() == (0.1, 0.2, 0.3)
    with pytest.raises(DomainError):
        OutageSet(1.5, 0.2)


def test_outages_monotone_on_grid():
    rates = np.linspace(0.0, 8.0, 41)
    gammas = np.geomspace(0.5, 1e3, 30)
    for k in (0.2, 0.5, 0.7):
        for g in gammas:
            p = ChannelParams(g, 3.12, k)
            af = [outage_af_relay_path(p, r) for r in rates]
            df = [outage_df_links(p, r).as_tuple() for r in rates]
            assert all(0 <= v < 1 or v == 1.0 for v in af)
            assert all(a <= b for a, b in zip(af, af[1:]))
            assert all(all(x <= y for x, y in zip(a, b)) for a, b in zip(df, df[1:]))
        for r in (1.0, 4.0):
            af = [outage_af_relay_path(ChannelParams(g, 3.12, k), r) for g in gammas]
            assert all(a >= b for a, b in zip(af, af[1:]))


def test_sample_link_gain():
    rng = np.random.default_rng(SEED)
    draws = sample_link_gain(rng, 1.0, size=1_000_000)
    assert draws.mean() == pytest.approx(1.0, abs=0.005)
    p = (draws < 0.1).mean()
    se = math.sqrt(p * (1 - p) / draws.size)
    assert abs(p - (1 - math.exp(-0.1))) < 3 * se
    a = sample_link_gain(np.random.default_rng(5), 2.0, size=10)
    b = sample_link_gain(np.random.default_rng(5), 2.0, size=10)
    assert np.array_equal(a, b)
    assert isinstance(sample_link_gain(np.random.default_rng(5), 2.0), float)
    with pytest.raises(DomainError):
        sample_link_gain(rng, 0.0)
