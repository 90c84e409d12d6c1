import numpy as np
import pytest

from oatf.config import CloudSideState, MarketConfig
from oatf.market import CloudContract, Contracts, EdgeContract
from oatf.physics import local_processing, offload_round_trip
from oatf.risk import cloud_risk, expected_cloud_utility
from oatf.utility import (
    Status,
    completion_time,
    cloud_utility,
    edge_utility,
    served_benefit,
    user_utility,
    waiting_requesters,
)

C = Contracts(EdgeContract(2, 3.0, 2.5, 0.7), CloudContract(100, 20.0, 15.0))


def test_user_utility_by_status(config, profile):
    assert user_utility(False, 200.0, Status.ABSENT, C, profile, config) == -2.5
    assert user_utility(True, 200.0, Status.COMPENSATED, C, profile, config) == 0.7
    served = user_utility(True, 200.0, Status.SERVED_EDGE, C, profile, config)
    assert served == pytest.approx(served_benefit(200.0, "edge", 2, profile, config) - 3.0)


def test_served_benefit_definition(config, profile):
    local = local_processing(5, profile, config)
    off = offload_round_trip(300.0, 5, profile, config, "cloud", 3)
    expect = (local.delay - off.delay) + 0.5 * (local.user_energy - off.user_energy)
    assert served_benefit(300.0, "cloud", 3, profile, config) == pytest.approx(expect)


def test_user_utility_rejects_inconsistent(config, profile):
    with pytest.raises(ValueError):
        user_utility(True, 200.0, Status.ABSENT, C, profile, config)
    with pytest.raises(ValueError):
        user_utility(False, 200.0, Status.SERVED_EDGE, C, profile, config)
    with pytest.raises(ValueError):
        user_utility(True, 200.0, Status.FAILED, C, profile, config)


def test_completion_time(config, profile):
    assert completion_time(200.0, Status.ABSENT, 2, profile, config) == 0.0
    assert completion_time(200.0, Status.COMPENSATED, 2, profile, config) == pytest.approx(3.145728)


def test_edge_utility_formula():
    # 10 served at 3.0, 4 absent at 2.5, 2 compensated at 0.7, backup bought for 20
    assert edge_utility(10, 4, 2, C, True) == pytest.approx(30 + 10 - 1.4 - 20)
    assert edge_utility(10, 4, 2, C, False) == pytest.approx(30 + 10 - 1.4 - 15)


def test_waiting_requesters(config):
    beta = np.arange(601)
    w = waiting_requesters(beta, 100, config)
    assert w[:501].sum() == 0 and w[600] == 100
    # uniform other demand: E[waiting] = (1 + ... + 100) / 601
    assert w.mean() == pytest.approx(5050 / 601)


def test_cloud_utility_vectorized(config):
    cs = CloudSideState(other_price=0.2, refund_rate=0.8)
    vals = cloud_utility(np.array([0, 600]), 100, np.array([True, False]), cs, C, config)
    assert vals[0] == pytest.approx(20.0)
    assert vals[1] == pytest.approx(0.2 * 600 - 0.8 * 0.2 * 100 + 15.0)
    assert isinstance(cloud_utility(10, 100, True, cs, C, config), float)


def test_cloud_risk_hand_value():
    # no backup held and payment independent of purchase: U = 0.2 * beta + const
    cfg = MarketConfig()
    c = Contracts(EdgeContract(1, 1.0, 1.0, 0.0), CloudContract(0, 5.0, 5.0))
    cs = CloudSideState()
    assert expected_cloud_utility(c, cs, cfg) == pytest.approx(0.2 * 300 + 5.0)
    assert cloud_risk(c, cs, cfg) == pytest.approx(301 / 601, abs=1e-12)
