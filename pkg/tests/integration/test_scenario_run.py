"""
Integration tests for complete scenario runs: artifacts, determinism and
output-directory handling
"""

import pandas as pd
import pytest

from src.cli.main import EXIT_OK, main
from src.scenario.runner import run_replication, run_scenario
from src.utils.exceptions import OutputDirectoryExistsException


def _files(root):
    return {p.relative_to(root).as_posix(): p.read_bytes() for p in sorted(root.rglob("*")) if p.is_file()}


def test_short_scenario_artifacts(short_scenario, tmp_path):
    """summary.csv plus one directory of series per run"""
    outcome = run_scenario(short_scenario, output_dir=tmp_path / "out")
    out = outcome.output_dir

    assert (out / "summary.csv").is_file()
    for run in ("run_001", "run_002"):
        for name in ("prague_throughput", "prague_rtt", "prague_cwnd", "prague_alpha",
                     "cubic_throughput", "cubic_cwnd", "l_sojourn", "c_sojourn", "probability"):
            assert (out / run / f"{name}.csv").is_file(), f"{run}/{name}.csv missing"

    summary = pd.read_csv(out / "summary.csv")
    assert summary['run'].astype(str).tolist() == ["1", "2", "mean", "ci95"]
    assert 'jain_index' in summary.columns

    throughput = pd.read_csv(out / "run_001" / "prague_throughput.csv")
    assert list(throughput.columns) == ["time_s", "value"]
    assert len(throughput) == 30
    assert throughput['time_s'].iloc[-1] == pytest.approx(3.0)


def test_short_scenario_sanity(short_scenario):
    """Both flows get data through and the link is not oversubscribed"""
    summary = run_replication(short_scenario, 1).summary
    flows = {f.name: f for f in summary.flows}
    capacity = short_scenario.bottleneck.rate_bps
    assert flows['prague'].mean_throughput_bps > 0
    assert flows['cubic'].mean_throughput_bps > 0
    assert sum(f.mean_throughput_bps for f in summary.flows) <= 1.05 * capacity
    assert flows['prague'].ecn_mode == "acc_ecn"
    assert flows['cubic'].ecn_mode == "classic_ecn"
    assert 0.5 <= summary.jain_index <= 1.0


def test_same_seed_gives_identical_bytes(short_scenario, tmp_path):
    """Two executions with the same seed write byte-identical CSVs"""
    first = run_scenario(short_scenario, output_dir=tmp_path / "a").output_dir
    second = run_scenario(short_scenario, output_dir=tmp_path / "b").output_dir
    assert _files(first) == _files(second)


def test_runs_differ_from_each_other(short_scenario):
    """Different run numbers draw different random streams"""
    one = run_replication(short_scenario, 1)
    two = run_replication(short_scenario, 2)
    assert one.summary.metrics() != two.summary.metrics()


@pytest.mark.slow
def test_parallel_matches_sequential(short_scenario, tmp_path):
    """Worker processes produce the same artifacts as a sequential run"""
    sequential = run_scenario(short_scenario, output_dir=tmp_path / "seq").output_dir
    parallel = run_scenario(short_scenario, output_dir=tmp_path / "par", parallel=2).output_dir
    assert _files(sequential) == _files(parallel)


def test_existing_output_dir_needs_force(short_scenario, tmp_path):
    """A populated directory is only overwritten with force"""
    config = short_scenario.model_copy(update={'run_count': 1})
    out = tmp_path / "out"
    run_scenario(config, output_dir=out)
    stale = out / "run_007"
    stale.mkdir()
    keep = out / "notes.txt"
    keep.write_text("mine")

    with pytest.raises(OutputDirectoryExistsException):
        run_scenario(config, output_dir=out)

    run_scenario(config, output_dir=out, force=True)
    assert not stale.exists()
    assert keep.read_text() == "mine"
    assert (out / "run_001" / "prague_throughput.csv").is_file()


def test_emit_plots(short_scenario, tmp_path):
    """gnuplot scripts sit next to the CSVs"""
    config = short_scenario.model_copy(update={'run_count': 1})
    out = run_scenario(config, output_dir=tmp_path / "plots", emit_plots=True).output_dir
    assert (out / "run_001" / "prague_rtt.gp").is_file()
    assert (out / "run_001" / "l_sojourn.gp").is_file()


def test_cli_end_to_end(tmp_path, scenario_text, capsys):
    """A scenario file through the command line"""
    path = tmp_path / "filetest.conf"
    path.write_text(scenario_text)
    out = tmp_path / "results"
    assert main(["--scenario", str(path), "--out", str(out), "--duration", "1.5"]) == EXIT_OK
    assert (out / "summary.csv").is_file()
    assert (out / "run_001" / "l4s_throughput.csv").is_file()
    assert (out / "run_001" / "classic_throughput.csv").is_file()
    assert "jain_index" in capsys.readouterr().out
