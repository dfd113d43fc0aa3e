"""Time series, run summaries and cross-run statistics"""

from .collector import (
    BinnedAccumulator,
    FlowRecorder,
    MetricsCollector,
    RunResult,
    TimeSeries,
    count_series,
    mean_series,
    throughput_series,
)
from .export import (
    run_directory,
    summary_frame,
    write_gnuplot_scripts,
    write_run_artifacts,
    write_summary,
    write_time_series,
)
from .stats import aggregate_runs, ci95_half_width, jain_index

__all__ = [
    'BinnedAccumulator',
    'FlowRecorder',
    'MetricsCollector',
    'RunResult',
    'TimeSeries',
    'count_series',
    'mean_series',
    'throughput_series',
    'run_directory',
    'summary_frame',
    'write_gnuplot_scripts',
    'write_run_artifacts',
    'write_summary',
    'write_time_series',
    'aggregate_runs',
    'ci95_half_width',
    'jain_index',
]
