import sys
from pathlib import Path

import numpy as np
import pytest

from oatf.config import CloudSideState, LatencyEnergyProfile, MarketConfig, RiskThresholds
from oatf.market import RoundSample
from oatf.negotiation import CloudQuote, EdgeQuote, QuotationGrid

sys.path.insert(0, str(Path(__file__).parent))

ROOT = Path(__file__).resolve().parents[1]
CASE_CONF = ROOT / "configs" / "case_study.conf"


@pytest.fixture
def config():
    return MarketConfig()


@pytest.fixture
def profile():
    return LatencyEnergyProfile()


@pytest.fixture
def cloud_state():
    return CloudSideState()


@pytest.fixture
def small_config():
    return MarketConfig(
        num_users=4,
        edge_capacity=6,
        cloud_capacity=10,
        risk_thresholds=RiskThresholds(0.4, 0.4, 0.4, 0.4, 0.4),
    )


@pytest.fixture
def small_grid():
    return QuotationGrid(
        edge_quotes=(
            EdgeQuote(2.6, 2.0, 0.5),
            EdgeQuote(3.0, 3.0, 0.8),
            EdgeQuote(3.4, 3.0, 1.0),
            EdgeQuote(3.8, 3.8, 1.2),
            EdgeQuote(4.2, 4.2, 0.4),
        ),
        cloud_quotes=(
            CloudQuote(0.2, 0.2),
            CloudQuote(0.3, 0.3),
            CloudQuote(0.5, 0.4),
            CloudQuote(0.8, 0.6),
            CloudQuote(1.5, 1.5),
        ),
        r_user_domain=(1, 2, 3, 4, 5),
        r_backup_domain=(0, 2, 4, 6, 8),
    )


def make_sample(attendance, order=None, gain=250.0, other_demand=0, delay_ms=5.0):
    """Hand-built round; arrival order defaults to user index order."""
    att = np.asarray(attendance, dtype=bool)
    n = att.size
    return RoundSample(
        attendance=att,
        channel_gain=np.broadcast_to(np.asarray(gain, dtype=float), (n,)).copy(),
        other_demand=other_demand,
        arrival_order=np.arange(n) if order is None else np.asarray(order),
        e2e_delay_ms=np.full(n, delay_ms),
    )
