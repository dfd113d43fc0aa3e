#!/usr/bin/env python3
"""
Side-by-side comparison of two scenario result directories
"""

import sys
from pathlib import Path

import pandas as pd

# Add src to path
sys.path.insert(0, str(Path(__file__).parent.parent))

from src.metrics.export import SUMMARY_FILE
from src.utils.logger import get_logger

logger = get_logger(__name__)


def load_aggregate(result_dir: Path) -> pd.DataFrame:
    """mean and ci95 rows of a summary.csv, indexed by metric."""
    summary = pd.read_csv(result_dir / SUMMARY_FILE, dtype={'run': str})
    rows = summary.set_index('run').loc[['mean', 'ci95']]
    return rows.T


def compare_runs(baseline: str, candidate: str) -> pd.DataFrame:
    """
    Join the aggregates of two result directories.

    Args:
        baseline: Result directory, e.g. results/scenario2
        candidate: Result directory, e.g. results/scenario2-timeshift

    Returns:
        One row per metric present in both, with the difference of means
    """
    a = load_aggregate(Path(baseline))
    b = load_aggregate(Path(candidate))
    joined = a.join(b, lsuffix='_a', rsuffix='_b', how='inner')
    joined['delta'] = joined['mean_b'] - joined['mean_a']
    return joined


if __name__ == '__main__':
    if len(sys.argv) != 3:
        print("Usage: python compare_runs.py <baseline_dir> <candidate_dir>")
        print("Example: python compare_runs.py results/scenario2 results/scenario2-timeshift")
        sys.exit(1)

    for path in sys.argv[1:]:
        if not (Path(path) / SUMMARY_FILE).is_file():
            logger.error(f"No {SUMMARY_FILE} in {path}")
            sys.exit(1)

    table = compare_runs(sys.argv[1], sys.argv[2])
    with pd.option_context('display.max_rows', None, 'display.width', 120):
        print(table.to_string(float_format=lambda v: f"{v:.6g}"))
