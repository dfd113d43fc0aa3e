"""
Unit tests for time-series collection, statistics and CSV export
"""

import numpy as np
import pandas as pd
import pytest
from scipy import stats

from src.metrics.collector import (
    BinnedAccumulator,
    RunResult,
    TimeSeries,
    count_series,
    mean_series,
    throughput_series,
)
from src.metrics.export import (
    run_directory,
    summary_frame,
    write_gnuplot_scripts,
    write_run_artifacts,
    write_summary,
)
from src.metrics.stats import aggregate_runs, ci95_half_width, jain_index, mean
from src.models.results import FlowSummary, QueueSummary, RunSummary
from src.sim.units import milliseconds, seconds
from src.utils.exceptions import (
    EmptyThroughputException,
    InsufficientRunsException,
    MetricsException,
)

INTERVAL = milliseconds(100)


def _summary(run, prague_bps, cubic_bps, jain):
    return RunSummary(
        run_number=run,
        flows=[
            FlowSummary(name="prague", cca="prague", ecn_mode="acc_ecn",
                        mean_throughput_bps=prague_bps, mean_rtt_s=0.006, ce_marks_per_s=300.0),
            FlowSummary(name="cubic", cca="cubic", ecn_mode="classic_ecn",
                        mean_throughput_bps=cubic_bps, mean_rtt_s=0.02, retransmissions=2),
        ],
        queues=[
            QueueSummary(kind="l4s", mean_sojourn_s=0.0005, dequeued=10, marked=3),
            QueueSummary(kind="classic", mean_sojourn_s=0.015, dequeued=10, dropped=1),
        ],
        jain_index=jain,
        mean_p_prime=0.05,
    )


# ----------------------------------------------------------------------
# statistics


@pytest.mark.parametrize("values,expected", [
    ([50, 50], 1.0),
    ([100, 0], 0.5),
    ([55, 45], 10000 / 10100),
])
def test_jain_index(values, expected):
    """(sum x)^2 / (n sum x^2)"""
    assert jain_index(values) == pytest.approx(expected, abs=1e-9)


def test_jain_index_bounds():
    """Always in [1/n, 1]"""
    rng = np.random.default_rng(3)
    for _ in range(200):
        x = rng.random(int(rng.integers(1, 6))) * 100
        j = jain_index(x)
        assert 1.0 / len(x) - 1e-12 <= j <= 1.0


def test_jain_index_errors():
    """All-zero, empty and negative input are rejected"""
    with pytest.raises(EmptyThroughputException):
        jain_index([0.0, 0.0])
    with pytest.raises(MetricsException):
        jain_index([])
    with pytest.raises(MetricsException):
        jain_index([10.0, -1.0])


def test_ci_of_identical_values_is_zero():
    """Zero variance gives a zero half-width and the exact mean"""
    values = [0.99] * 30
    assert mean(values) == 0.99
    assert ci95_half_width(values) == 0.0


def test_ci_matches_student_t():
    """Half-width is t(0.975, n-1) s / sqrt(n)"""
    values = list(np.random.default_rng(11).normal(0.99, 0.005, 30))
    expected = stats.t.ppf(0.975, 29) * np.std(values, ddof=1) / np.sqrt(30)
    assert ci95_half_width(values) == pytest.approx(expected, rel=1e-9)
    assert ci95_half_width(values) == pytest.approx(0.0019, abs=0.001)


def test_ci_needs_two_runs():
    """A single value has no confidence interval"""
    with pytest.raises(InsufficientRunsException):
        ci95_half_width([1.0])


def test_aggregate_runs():
    """Mean and half-width per summary column"""
    agg = aggregate_runs([_summary(1, 55e6, 45e6, 0.99), _summary(2, 57e6, 43e6, 0.98)])
    assert agg.run_count == 2
    assert agg.metrics['prague.throughput_mbps'].mean == pytest.approx(56.0)
    assert agg.metrics['jain_index'].ci95 > 0
    assert agg.metrics['l4s.sojourn_ms'].ci95 == 0.0


def test_aggregate_single_run_has_no_ci():
    """Below two runs only the mean is reported"""
    agg = aggregate_runs([_summary(1, 55e6, 45e6, 0.99)])
    assert agg.metrics['cubic.rtt_ms'].mean == pytest.approx(20.0)
    assert agg.metrics['cubic.rtt_ms'].ci95 is None


def test_aggregate_ignores_run_order():
    """Aggregates do not depend on the order runs finished in"""
    runs = [_summary(i, 50e6 + i * 1e5, 50e6 - i * 1e5, 0.99 - i * 1e-4) for i in range(1, 8)]
    assert aggregate_runs(runs) == aggregate_runs(list(reversed(runs)))


# ----------------------------------------------------------------------
# time series


def test_throughput_series_units():
    """1.25 MB in a 100 ms bin is 100 Mbit/s; idle bins are 0"""
    ts = throughput_series([1_250_000, 0, 625_000], INTERVAL)
    assert ts.values.tolist() == [100e6, 0.0, 50e6]
    assert ts.times.tolist() == pytest.approx([0.1, 0.2, 0.3])


def test_throughput_series_conserves_bytes():
    """Sum of bins times the interval equals total delivered bits"""
    delivered = np.random.default_rng(5).integers(0, 2_000_000, 50)
    ts = throughput_series(delivered, INTERVAL)
    assert ts.values.sum() * 0.1 == pytest.approx(delivered.sum() * 8)


def test_accumulator_bins_and_steady_state():
    """Samples land in their bin; warm-up samples are kept out of the steady totals"""
    acc = BinnedAccumulator(INTERVAL, seconds(1), warmup=milliseconds(500))
    acc.add(milliseconds(50), 2.0)
    acc.add(milliseconds(650), 4.0)
    acc.add(milliseconds(660), 6.0)
    acc.add(seconds(1), 1.0)
    assert acc.nbins == 10
    assert acc.sums[0] == 2.0
    assert acc.sums[6] == 10.0
    assert acc.sums[9] == 1.0
    assert acc.steady_mean == pytest.approx(11.0 / 3)
    assert count_series(acc, 'n').values.tolist() == [1, 0, 0, 0, 0, 0, 2, 0, 0, 1]


def test_mean_series_hold_and_gaps():
    """Gauges repeat the last value; sojourn series skip empty bins"""
    acc = BinnedAccumulator(INTERVAL, milliseconds(400))
    acc.add(milliseconds(150), 2.0)
    acc.add(milliseconds(350), 4.0)

    held = mean_series(acc, 'cwnd')
    assert held.times.tolist() == pytest.approx([0.2, 0.3, 0.4])
    assert held.values.tolist() == [2.0, 2.0, 4.0]

    gaps = mean_series(acc, 'sojourn', hold=False)
    assert gaps.times.tolist() == pytest.approx([0.2, 0.4])
    assert gaps.values.tolist() == [2.0, 4.0]


def test_time_series_requires_increasing_times():
    """Timestamps must be strictly increasing"""
    with pytest.raises(ValueError):
        TimeSeries('x', INTERVAL, np.array([0.1, 0.1]), np.array([1.0, 2.0]))


# ----------------------------------------------------------------------
# export


def test_run_artifacts(tmp_path):
    """One time_s,value CSV per series plus the probability trace"""
    result = RunResult(
        run_number=3,
        summary=_summary(3, 55e6, 45e6, 0.99),
        series={'prague_throughput': throughput_series([1_250_000, 0], INTERVAL, 'prague_throughput')},
        probability_trace=pd.DataFrame({'time_s': [0.016], 'p_prime': [0.1], 'p_l': [0.2], 'p_c': [0.01]}),
    )
    run_dir = run_directory(tmp_path, 3)
    written = write_run_artifacts(run_dir, result)
    assert run_dir.name == "run_003"
    assert sorted(p.name for p in written) == ['prague_throughput.csv', 'probability.csv']
    assert (run_dir / 'prague_throughput.csv').read_text() == "time_s,value\n0.1,100000000\n0.2,0\n"
    assert (run_dir / 'probability.csv').read_text().splitlines()[1] == "0.016,0.1,0.2,0.01"


def test_summary_csv(tmp_path):
    """Run rows, then mean and ci95 rows"""
    runs = [_summary(2, 57e6, 43e6, 0.98), _summary(1, 55e6, 45e6, 0.99)]
    agg = aggregate_runs(runs)
    frame = summary_frame(runs, agg)
    assert frame['run'].tolist() == ['1', '2', 'mean', 'ci95']
    assert frame.columns[0] == 'run'
    assert list(frame.columns[1:]) == sorted(agg.metrics)

    path = write_summary(tmp_path, runs, agg)
    lines = path.read_text().splitlines()
    assert lines[0].startswith("run,")
    assert lines[3].startswith("mean,")
    assert len(lines) == 5


def test_summary_csv_single_run_leaves_ci_empty(tmp_path):
    """Undefined half-widths are written as empty cells"""
    runs = [_summary(1, 55e6, 45e6, 0.99)]
    path = write_summary(tmp_path, runs, aggregate_runs(runs))
    ci_row = path.read_text().splitlines()[-1]
    assert ci_row.startswith("ci95,")
    assert set(ci_row.split(',')[1:]) == {''}


def test_gnuplot_scripts(tmp_path):
    """A .gp script per series, pointing at its CSV"""
    written = write_gnuplot_scripts(tmp_path, ['prague_rtt', 'l_sojourn'])
    assert [p.name for p in written] == ['l_sojourn.gp', 'prague_rtt.gp']
    script = (tmp_path / 'prague_rtt.gp').read_text()
    assert "plot 'prague_rtt.csv'" in script
    assert "srtt (s)" in script
