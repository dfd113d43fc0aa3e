"""
CSV and gnuplot artifacts.

Every writer goes through `_write_frame` so float formatting and line
endings are identical across platforms and runs.
"""

from pathlib import Path
from typing import Iterable, List, Sequence

import pandas as pd

from .collector import RunResult, TimeSeries
from ..models.results import Aggregate, RunSummary

FLOAT_FORMAT = "%.9g"
SUMMARY_FILE = "summary.csv"
PROBABILITY_FILE = "probability.csv"

_GNUPLOT_TEMPLATE = """\
set datafile separator ','
set key autotitle columnhead
set xlabel 'time (s)'
set ylabel '{ylabel}'
set grid
set terminal pngcairo size 1000,500
set output '{name}.png'
plot '{csv}' using 1:2 with lines title '{name}'
"""

_Y_LABELS = {
    'throughput': 'throughput (bit/s)',
    'rtt': 'srtt (s)',
    'cwnd': 'cwnd (bytes)',
    'alpha': 'alpha',
    'pacing_rate': 'pacing rate (bit/s)',
    'ce_marks': 'CE marks per bin',
    'sojourn': 'sojourn (s)',
}


def _write_frame(frame: pd.DataFrame, path: Path) -> Path:
    frame.to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator='\n')
    return path


def run_directory(out_dir: Path, run_number: int) -> Path:
    return Path(out_dir) / f"run_{run_number:03d}"


def write_time_series(run_dir: Path, series: TimeSeries) -> Path:
    return _write_frame(series.to_frame(), Path(run_dir) / f"{series.name}.csv")


def write_run_artifacts(run_dir: Path, result: RunResult) -> List[Path]:
    """One `time_s,value` CSV per metric plus the probability trace."""
    run_dir = Path(run_dir)
    run_dir.mkdir(parents=True, exist_ok=True)
    written = [write_time_series(run_dir, ts) for _, ts in sorted(result.series.items())]
    if result.probability_trace is not None:
        written.append(_write_frame(result.probability_trace, run_dir / PROBABILITY_FILE))
    return written


def summary_frame(summaries: Sequence[RunSummary], aggregate: Aggregate) -> pd.DataFrame:
    columns = sorted(aggregate.metrics)
    rows = []
    for summary in sorted(summaries, key=lambda s: s.run_number):
        values = summary.metrics()
        rows.append({'run': str(summary.run_number), **{c: values.get(c) for c in columns}})
    rows.append({'run': 'mean', **{c: aggregate.metrics[c].mean for c in columns}})
    rows.append({'run': 'ci95', **{c: aggregate.metrics[c].ci95 for c in columns}})
    return pd.DataFrame(rows, columns=['run', *columns])


def write_summary(out_dir: Path, summaries: Sequence[RunSummary], aggregate: Aggregate) -> Path:
    """summary.csv: one row per run, then `mean` and `ci95` rows."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    return _write_frame(summary_frame(summaries, aggregate), out_dir / SUMMARY_FILE)


def _y_label(series_name: str) -> str:
    for suffix, label in _Y_LABELS.items():
        if series_name.endswith(suffix):
            return label
    return 'value'


def write_gnuplot_scripts(run_dir: Path, series_names: Iterable[str]) -> List[Path]:
    """A `<series>.gp` script next to each CSV; render with `gnuplot <file>`."""
    run_dir = Path(run_dir)
    written = []
    for name in sorted(series_names):
        path = run_dir / f"{name}.gp"
        path.write_text(
            _GNUPLOT_TEMPLATE.format(name=name, csv=f"{name}.csv", ylabel=_y_label(name)),
            encoding='utf-8',
            newline='\n',
        )
        written.append(path)
    return written
