"""Scenario presets, config files and the replication runner"""

from .config_loader import load_scenario_file, parse_scenario_text, resolve_scenario
from .presets import PRESETS, get_preset, list_presets
from .runner import ScenarioOutcome, build_cca, run_replication, run_scenario, setup_replication

__all__ = [
    'load_scenario_file',
    'parse_scenario_text',
    'resolve_scenario',
    'PRESETS',
    'get_preset',
    'list_presets',
    'ScenarioOutcome',
    'build_cca',
    'run_replication',
    'run_scenario',
    'setup_replication',
]
