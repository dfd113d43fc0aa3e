"""
Full-length reproductions of the two reference scenarios.

60 s of simulated time per replication and 30 replications each; run with
`pytest -m slow`. Each scenario is simulated once per module and shared.
"""

import os

import pytest

from src.models.config import SchedulerType
from src.scenario.presets import get_preset
from src.scenario.runner import run_scenario

pytestmark = pytest.mark.slow

WORKERS = max(os.cpu_count() or 1, 1)


def _run(config, tmp_path_factory):
    out = tmp_path_factory.mktemp(config.name)
    return run_scenario(config, output_dir=out, parallel=WORKERS, force=True).aggregate.metrics


@pytest.fixture(scope="module")
def scenario1(tmp_path_factory):
    return _run(get_preset("scenario1"), tmp_path_factory)


@pytest.fixture(scope="module")
def scenario2(tmp_path_factory):
    return _run(get_preset("scenario2"), tmp_path_factory)


@pytest.fixture(scope="module")
def scenario2_timeshift(tmp_path_factory):
    config = get_preset("scenario2")
    config.name = "scenario2_timeshift"
    config.aqm.scheduler = SchedulerType.TIMESHIFT
    return _run(config, tmp_path_factory)


def test_scenario1_rtt(scenario1):
    """Prague around 6 ms, Cubic around 20 ms"""
    assert scenario1['prague.rtt_ms'].mean == pytest.approx(6.0, abs=2.0)
    assert scenario1['cubic.rtt_ms'].mean == pytest.approx(20.0, abs=6.0)


def test_scenario1_throughput(scenario1):
    """Prague around 55 Mbit/s, Cubic around 45 Mbit/s"""
    assert scenario1['prague.throughput_mbps'].mean == pytest.approx(55.0, abs=8.0)
    assert scenario1['cubic.throughput_mbps'].mean == pytest.approx(45.0, abs=8.0)


def test_scenario1_fairness(scenario1):
    assert scenario1['jain_index'].mean >= 0.98


def test_scenario2_fairness(scenario2):
    assert scenario2['jain_index'].mean >= 0.97


def test_scenario2_sojourn(scenario2):
    """L4S queue stays shallow while the classic queue sits near its target"""
    assert scenario2['l4s.sojourn_ms'].mean < 2.0
    assert 10.0 <= scenario2['classic.sojourn_ms'].mean <= 18.0


def test_time_shift_leaks_classic_delay(scenario2, scenario2_timeshift):
    """The time-shifted scheduler raises L4S sojourn relative to WRR"""
    assert scenario2_timeshift['l4s.sojourn_ms'].mean > scenario2['l4s.sojourn_ms'].mean


def test_mark_rate_is_scale_invariant(scenario1, scenario2):
    """Prague sees a similar CE rate at 100 and 10 Mbit/s"""
    ratio = scenario1['prague.ce_marks_per_s'].mean / scenario2['prague.ce_marks_per_s'].mean
    assert 0.5 <= ratio <= 2.0


@pytest.mark.parametrize("flow", ["prague", "cubic"])
def test_no_starvation(scenario1, scenario2, flow):
    """Every flow keeps at least a fifth of its fair share"""
    assert scenario1[f'{flow}.throughput_mbps'].mean >= 0.2 * 100.0 / 2
    assert scenario2[f'{flow}.throughput_mbps'].mean >= 0.2 * 10.0 / 2
