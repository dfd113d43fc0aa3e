"""
Fairness and cross-replication statistics
"""

import math
from typing import Dict, List, Optional, Sequence

import numpy as np
from scipy import stats

from ..models.results import Aggregate, MetricAggregate, RunSummary
from ..utils.exceptions import EmptyThroughputException, InsufficientRunsException, MetricsException

CONFIDENCE = 0.95


def jain_index(throughputs: Sequence[float]) -> float:
    """(sum x)^2 / (n * sum x^2) over non-negative per-flow throughputs."""
    x = np.asarray(throughputs, dtype=float)
    if x.size == 0:
        raise MetricsException("jain index needs at least one flow", metric='jain_index')
    if np.any(x < 0):
        raise MetricsException("throughputs must be non-negative", metric='jain_index')
    squares = float(np.dot(x, x))
    if squares == 0.0:
        raise EmptyThroughputException()
    total = math.fsum(x.tolist())
    return min(total * total / (x.size * squares), 1.0)


def mean(values: Sequence[float]) -> float:
    if min(values) == max(values):
        return float(values[0])
    return math.fsum(values) / len(values)


def ci95_half_width(values: Sequence[float], confidence: float = CONFIDENCE) -> float:
    """Student-t confidence half-width of the mean."""
    n = len(values)
    if n < 2:
        raise InsufficientRunsException(n)
    if min(values) == max(values):
        return 0.0
    m = mean(values)
    variance = math.fsum((v - m) ** 2 for v in values) / (n - 1)
    if variance == 0.0:
        return 0.0
    t_crit = stats.t.ppf(0.5 + confidence / 2.0, df=n - 1)
    return float(t_crit * math.sqrt(variance / n))


def aggregate_runs(summaries: Sequence[RunSummary]) -> Aggregate:
    """
    Mean and 95% half-width per metric. Below two runs only the mean is
    reported. Values are sorted before summing, so the result does not
    depend on run order.
    """
    if not summaries:
        raise MetricsException("no run summaries to aggregate")

    columns: Dict[str, List[float]] = {}
    for summary in summaries:
        for name, value in summary.metrics().items():
            columns.setdefault(name, []).append(value)

    metrics: Dict[str, MetricAggregate] = {}
    for name in sorted(columns):
        values = sorted(columns[name])
        ci: Optional[float] = ci95_half_width(values) if len(values) >= 2 else None
        metrics[name] = MetricAggregate(mean=mean(values), ci95=ci, n=len(values))

    return Aggregate(run_count=len(summaries), metrics=metrics)
