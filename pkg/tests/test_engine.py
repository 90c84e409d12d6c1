import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oatf.config import MarketConfig
from oatf.engine import allocate_fcfs, arrival_ranks, run_campaign, run_round
from oatf.market import CloudContract, Contracts, EdgeContract, make_rng, sample_round
from oatf.risk import edge_round_values
from oatf.utility import Status

from conftest import make_sample


def test_arrival_ranks():
    att = np.array([True, False, True, True])
    order = np.array([3, 1, 0, 2])
    assert arrival_ranks(att, order).tolist() == [1, -1, 2, 0]
    batch = arrival_ranks(np.stack([att, ~att]), np.stack([order, order]))
    assert batch[1].tolist() == [-1, 0, -1, -1]


def test_fig3_usage(profile, cloud_state):
    cfg = MarketConfig(num_users=5, edge_capacity=8, cloud_capacity=10)
    sample = make_sample([1, 1, 0, 1, 1])
    oatf = Contracts(EdgeContract(2, 1.0, 1.0, 0.5), CloudContract(0, 0.0, 0.0))
    out = run_round(sample, oatf, profile, cfg, cloud_state)
    assert out.usage_rate == 1.0 and out.failed_users == 0
    cfg_cb = MarketConfig(num_users=5, edge_capacity=10, cloud_capacity=10)
    out = run_round(sample, oatf, profile, cfg_cb, cloud_state)
    assert out.usage_rate == 0.8


def test_backup_bought_only_when_needed(profile, cloud_state):
    cfg = MarketConfig(num_users=6, edge_capacity=4, cloud_capacity=10)
    c = Contracts(EdgeContract(2, 1.0, 1.0, 0.5), CloudContract(4, 3.0, 1.0))
    two = run_round(make_sample([1, 1, 0, 0, 0, 0]), c, profile, cfg, cloud_state)
    assert not two.bought_backup and two.usage_rate == 1.0
    five = run_round(make_sample([1, 1, 1, 1, 1, 0]), c, profile, cfg, cloud_state)
    assert five.bought_backup
    assert (five.served_edge_count, five.served_cloud_count, five.compensated_count) == (2, 2, 1)
    assert five.usage_rate == 1.0
    assert five.edge_utility == pytest.approx(4 * 1.0 + 1 * 1.0 - 0.5 - 3.0)


def test_fcfs_follows_arrival(profile, cloud_state):
    cfg = MarketConfig(num_users=4, edge_capacity=2, cloud_capacity=10)
    c = Contracts(EdgeContract(1, 1.0, 1.0, 0.5), CloudContract(0, 0.0, 0.0))
    alloc = allocate_fcfs(make_sample([1, 1, 1, 1], order=[2, 0, 3, 1]), c, cfg)
    assert alloc.status[2] == alloc.status[0] == Status.SERVED_EDGE
    assert alloc.status[3] == alloc.status[1] == Status.COMPENSATED


@settings(max_examples=60, deadline=None)
@given(
    seed=st.integers(0, 2**32),
    r=st.integers(1, 5),
    backup=st.integers(0, 600),
)
def test_fcfs_no_skip_and_engine_matches_risk_model(seed, r, backup):
    """The served set is a prefix of the arrival queue, and per-round edge
    utility and usage equal the closed form used by the risk module."""
    cfg = MarketConfig()
    c = Contracts(EdgeContract(r, 3.0, 2.0, 1.0), CloudContract(backup, 40.0, 30.0))
    from oatf.config import CloudSideState, LatencyEnergyProfile

    sample = sample_round(cfg, make_rng(seed))
    out = run_round(sample, c, LatencyEnergyProfile(), cfg, CloudSideState())
    queue = [u for u in sample.arrival_order if sample.attendance[u]]
    statuses = [out.user_outcomes[u].status for u in queue]
    served = [s in (Status.SERVED_EDGE, Status.SERVED_CLOUD) for s in statuses]
    m = sum(served)
    assert served == [True] * m + [False] * (len(queue) - m)
    edge_first = [s == Status.SERVED_EDGE for s in statuses[:m]]
    assert edge_first == sorted(edge_first, reverse=True)
    assert out.served_edge_count + out.served_cloud_count + out.compensated_count == sample.attendees
    assert out.attendees + out.absent_count == cfg.num_users
    assert 0.0 <= out.usage_rate <= 1.0
    util, usage = edge_round_values(sample.attendees, c, cfg)
    assert out.edge_utility == pytest.approx(float(util))
    assert out.usage_rate == pytest.approx(float(usage))


def test_run_campaign(config, profile, cloud_state):
    c = Contracts(EdgeContract(2, 3.0, 3.0, 1.0), CloudContract(100, 20.0, 20.0))
    outs = list(run_campaign(c, profile, config, cloud_state, 4))
    assert len(outs) == 4
    again = list(run_campaign(c, profile, config, cloud_state, 4))
    assert [o.edge_utility for o in outs] == [o.edge_utility for o in again]
    with pytest.raises(ValueError):
        next(run_campaign(c, profile, config, cloud_state, 0))
