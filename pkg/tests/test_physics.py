import math

import mpmath
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from oatf.physics import local_processing, negotiation_cost, offload_round_trip, snr_db, uplink_rate


def test_uplink_rate_matches_high_precision(config):
    # 6 MHz * log2(1 + 0.55 * 100) = 6e6 * log2(56)
    mp = mpmath.mpf(6e6) * mpmath.log(56, 2)
    assert uplink_rate(100.0, config) == pytest.approx(float(mp), rel=1e-14)
    assert float(mp) == pytest.approx(3.4844e7, rel=1e-4)
    assert snr_db(100.0, config) == pytest.approx(10 * math.log10(55.0))


def test_offload_hand_values(config, profile):
    cost = offload_round_trip(100.0, 5, profile, config, "edge", 1)
    tx = 5 * 2**20 / (6e6 * math.log2(56))
    run = 5 * 600 * 2**20 / 4e9
    assert cost.delay == pytest.approx(tx + run, rel=1e-12)
    assert cost.delay == pytest.approx(0.936898, abs=1e-6)
    assert cost.user_energy == pytest.approx(0.55 * tx, rel=1e-12)


def test_local_hand_values(config, profile):
    one = local_processing(1, profile, config)
    assert one.delay == pytest.approx(0.6291456)
    five = local_processing(5, profile, config)
    assert five.delay == pytest.approx(3.145728)
    assert five.user_energy == pytest.approx(1e-27 * 1e18 * 5 * 600 * 2**20)


def test_compute_scales_with_slots(config, profile):
    a = offload_round_trip(250.0, 5, profile, config, "cloud", 1)
    b = offload_round_trip(250.0, 5, profile, config, "cloud", 4)
    tx = offload_round_trip(250.0, 5, profile, config, "cloud", 10**9).delay
    assert (a.delay - tx) == pytest.approx(4 * (b.delay - tx), rel=1e-6)
    assert a.user_energy == b.user_energy


@given(st.floats(100, 399), st.floats(0.1, 1.0))
def test_delay_falls_with_gain(gain, step):
    from oatf.config import LatencyEnergyProfile, MarketConfig

    cfg, prof = MarketConfig(), LatencyEnergyProfile()
    lo = offload_round_trip(gain, 5, prof, cfg)
    hi = offload_round_trip(gain + step, 5, prof, cfg)
    assert hi.delay < lo.delay and hi.user_energy < lo.user_energy


def test_vectorized(config, profile):
    g = np.array([100.0, 250.0, 400.0])
    vec = offload_round_trip(g, 5, profile, config).delay
    assert vec.shape == (3,)
    assert vec[1] == pytest.approx(offload_round_trip(250.0, 5, profile, config).delay)


def test_negotiation_cost(config):
    cost = negotiation_cost(np.array([2.0, 15.0]), 5, 2, config)
    assert cost.delay == pytest.approx([0.04, 0.3])
    assert cost.user_energy == pytest.approx([0.022, 0.165])


def test_bad_arguments(config, profile):
    with pytest.raises(ValueError):
        offload_round_trip(100.0, 0, profile, config)
    with pytest.raises(ValueError):
        offload_round_trip(100.0, 1, profile, config, "fog")
    with pytest.raises(ValueError):
        local_processing(0, profile, config)
