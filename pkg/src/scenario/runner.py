"""
Scenario runner: builds one simulator per replication, runs it and writes
the artifacts.
"""

import shutil
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional

from ..aqm.dualpi2 import DualPi2Queue
from ..metrics.collector import MetricsCollector, RunResult
from ..metrics.export import run_directory, write_gnuplot_scripts, write_run_artifacts, write_summary
from ..metrics.stats import aggregate_runs
from ..models.config import CcaType, FlowConfig, ScenarioConfig
from ..models.results import Aggregate, RunSummary
from ..net.topology import build_dumbbell
from ..sim.engine import Simulator
from ..sim.units import seconds
from ..tcp.congestion.base import CongestionOps
from ..tcp.congestion.cubic import CubicCongestionControl
from ..tcp.congestion.prague import PragueCongestionControl
from ..tcp.socket import TcpReceiver, TcpSender
from ..utils.exceptions import L4sSimException, OutputDirectoryExistsException, SimulationException
from ..utils.logger import get_logger, get_structured_logger

logger = get_logger(__name__)
events = get_structured_logger(__name__)

BASE_PORT = 5000
AQM_STREAM = 1


@dataclass
class ScenarioOutcome:
    output_dir: Path
    summaries: List[RunSummary]
    aggregate: Aggregate


def build_cca(flow: FlowConfig, config: ScenarioConfig) -> CongestionOps:
    tcp = config.tcp
    if flow.cca is CcaType.PRAGUE:
        return PragueCongestionControl(config.prague, tcp.segment_size, tcp.initial_cwnd_segments)
    if flow.cca is CcaType.CUBIC:
        return CubicCongestionControl(config.cubic, tcp.segment_size, tcp.initial_cwnd_segments)
    raise ValueError(f"unsupported congestion controller {flow.cca}")


def setup_replication(config: ScenarioConfig, run_number: int) -> tuple:
    """Wire topology, AQM, flows and collectors; nothing has run yet."""
    sim = Simulator(seed=config.seed, run_number=run_number)
    duration = config.duration
    queue = DualPi2Queue(sim, config.aqm, rng=sim.rng_stream(AQM_STREAM))
    bottleneck = config.bottleneck
    topology = build_dumbbell(
        sim,
        bottleneck.rate_bps,
        bottleneck.delay,
        queue,
        pairs=config.pairs,
        delay_is_rtt=bottleneck.delay_is_rtt,
        access_rate=bottleneck.access_rate_bps,
        access_delay=bottleneck.access_delay,
    )

    collector = MetricsCollector(sim, config.metrics, duration)
    collector.attach_queue(queue)

    for flow_id, flow in enumerate(config.flows):
        client = topology.clients[flow.pair]
        server = topology.servers[flow.pair]
        port = BASE_PORT + flow_id
        receiver = TcpReceiver(sim, client, port, flow.receiver_ecn, config.tcp, flow_id=flow_id)
        stop_time = seconds(flow.start_s + flow.duration_s) if flow.duration_s else None
        sender = TcpSender(
            sim,
            server,
            port,
            client.node_id,
            port,
            build_cca(flow, config),
            flow.ecn,
            config.tcp,
            flow_id=flow_id,
            stop_time=stop_time,
        )
        collector.attach_flow(flow.name, sender, receiver)
        sim.schedule_at(seconds(flow.start_s), sender.do_handshake)

    return sim, queue, collector


def run_replication(config: ScenarioConfig, run_number: int) -> RunResult:
    """One seeded replication; identical (seed, run_number) gives identical results."""
    started = time.perf_counter()
    events.log_run_event('run_started', config.name, run_number)
    try:
        sim, queue, collector = setup_replication(config, run_number)
        sim.run_until(config.duration)
        queue.stop()
        result = collector.result(run_number)
    except L4sSimException:
        raise
    except Exception as exc:
        raise SimulationException(f"{type(exc).__name__}: {exc}", run_number=run_number) from exc

    events.log_run_event(
        'run_finished',
        config.name,
        run_number,
        duration_ms=(time.perf_counter() - started) * 1000,
        events_executed=result.events_executed,
        jain_index=result.summary.jain_index,
    )
    return result


def prepare_output_dir(path: Path, force: bool) -> Path:
    path = Path(path)
    if path.exists() and any(path.iterdir()):
        if not force:
            raise OutputDirectoryExistsException(str(path))
        for stale in path.glob("run_*"):
            if stale.is_dir():
                shutil.rmtree(stale)
        logger.info(f"overwriting results in {path}")
    path.mkdir(parents=True, exist_ok=True)
    return path


def run_scenario(
    config: ScenarioConfig,
    output_dir: Optional[Path] = None,
    parallel: int = 1,
    force: bool = False,
    emit_plots: bool = False,
) -> ScenarioOutcome:
    """Run every replication, then aggregate and write summary.csv."""
    out = prepare_output_dir(Path(output_dir or config.resolved_output_dir), force)
    run_numbers = range(1, config.run_count + 1)
    logger.info(
        f"scenario {config.name}: {config.run_count} runs of {config.duration_s:g} s, "
        f"scheduler={config.aqm.scheduler.value}, parallel={parallel}"
    )

    summaries: List[RunSummary] = []

    def collect(result: RunResult) -> None:
        run_dir = run_directory(out, result.run_number)
        write_run_artifacts(run_dir, result)
        if emit_plots:
            write_gnuplot_scripts(run_dir, result.series.keys())
        summaries.append(result.summary)

    if parallel > 1 and config.run_count > 1:
        with ProcessPoolExecutor(max_workers=parallel) as pool:
            # map yields in submission order, so artifacts are written identically
            for result in pool.map(run_replication, [config] * config.run_count, run_numbers):
                collect(result)
    else:
        for run_number in run_numbers:
            collect(run_replication(config, run_number))

    aggregate = aggregate_runs(summaries)
    write_summary(out, summaries, aggregate)
    jain = aggregate.metrics.get('jain_index')
    events.log_scenario_summary(
        scenario=config.name,
        run_count=config.run_count,
        jain_mean=jain.mean if jain else float('nan'),
        output_dir=str(out),
    )
    return ScenarioOutcome(output_dir=out, summaries=summaries, aggregate=aggregate)
