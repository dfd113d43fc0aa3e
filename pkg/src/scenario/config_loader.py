"""
Scenario file loader.

Grammar (see docs/CONFIG.md):

    # comment            ; comment
    [section]
    key = value

Sections: scenario, bottleneck, aqm, tcp, prague, cubic, metrics and one
`flow.<name>` per flow. Keys of [scenario] are top-level ScenarioConfig
fields. Validation goes through the pydantic models; every error is
reported against the line of the offending key.
"""

import re
from pathlib import Path
from typing import Any, Dict, Optional, Tuple, Union

from pydantic import ValidationError

from .presets import PRESETS, get_preset
from ..models.config import ScenarioConfig
from ..utils.exceptions import ConfigurationException, ScenarioNotFoundException
from ..utils.logger import get_logger

logger = get_logger(__name__)

TOP_LEVEL = "scenario"
NESTED_SECTIONS = ("bottleneck", "aqm", "tcp", "prague", "cubic", "metrics")
FLOW_PREFIX = "flow."

_SECTION_RE = re.compile(r"^\[\s*([A-Za-z0-9_.\-]+)\s*\]$")
_KEY_RE = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*$")


class _ParsedFile:
    def __init__(self, source: str):
        self.source = source
        self.top: Dict[str, str] = {}
        self.sections: Dict[str, Dict[str, str]] = {}
        self.flows: Dict[str, Dict[str, str]] = {}
        self.section_lines: Dict[str, int] = {}
        self.key_lines: Dict[Tuple[str, str], int] = {}

    def target(self, section: str) -> Dict[str, str]:
        if section == TOP_LEVEL:
            return self.top
        if section.startswith(FLOW_PREFIX):
            return self.flows.setdefault(section[len(FLOW_PREFIX):], {})
        return self.sections.setdefault(section, {})


def _strip_comment(line: str) -> str:
    for marker in ('#', ';'):
        idx = line.find(marker)
        if idx != -1:
            line = line[:idx]
    return line.strip()


def _parse(text: str, source: str) -> _ParsedFile:
    parsed = _ParsedFile(source)
    section: Optional[str] = None

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = _strip_comment(raw)
        if not line:
            continue

        header = _SECTION_RE.match(line)
        if header:
            section = header.group(1).lower()
            valid = (
                section == TOP_LEVEL
                or section in NESTED_SECTIONS
                or (section.startswith(FLOW_PREFIX) and len(section) > len(FLOW_PREFIX))
            )
            if not valid:
                raise ConfigurationException(f"unknown section [{section}]", line=lineno, source=source)
            if section in parsed.section_lines:
                raise ConfigurationException(f"duplicate section [{section}]", line=lineno, source=source)
            parsed.section_lines[section] = lineno
            parsed.target(section)
            continue

        if '=' not in line:
            raise ConfigurationException(f"expected 'key = value', got '{line}'", line=lineno, source=source)
        if section is None:
            raise ConfigurationException("key outside of any [section]", line=lineno, source=source)

        key, value = (part.strip() for part in line.split('=', 1))
        if not _KEY_RE.match(key):
            raise ConfigurationException(f"invalid key '{key}'", line=lineno, source=source)
        target = parsed.target(section)
        if key in target:
            raise ConfigurationException(f"duplicate key '{key}'", config_key=key, line=lineno, source=source)
        target[key] = value
        parsed.key_lines[(section, key)] = lineno

    return parsed


def _to_data(parsed: _ParsedFile) -> Dict[str, Any]:
    data: Dict[str, Any] = dict(parsed.top)
    for name, values in parsed.sections.items():
        data[name] = dict(values)
    if parsed.flows:
        data['flows'] = [{'name': name, **values} for name, values in parsed.flows.items()]
    return data


def _locate(parsed: _ParsedFile, loc: Tuple[Any, ...]) -> Tuple[Optional[int], Optional[str]]:
    """Line and dotted key for a pydantic error location."""
    if not loc:
        return None, None
    head = loc[0]
    if head == 'flows' and len(loc) >= 2 and isinstance(loc[1], int):
        flow_names = list(parsed.flows)
        if loc[1] < len(flow_names):
            section = FLOW_PREFIX + flow_names[loc[1]]
            if len(loc) >= 3:
                key = str(loc[2])
                return parsed.key_lines.get((section, key), parsed.section_lines.get(section)), f"{section}.{key}"
            return parsed.section_lines.get(section), section
        return None, 'flows'
    if head in NESTED_SECTIONS:
        if len(loc) >= 2:
            key = str(loc[1])
            return parsed.key_lines.get((head, key), parsed.section_lines.get(head)), f"{head}.{key}"
        return parsed.section_lines.get(head), head
    key = str(head)
    return parsed.key_lines.get((TOP_LEVEL, key), parsed.section_lines.get(TOP_LEVEL)), key


def parse_scenario_text(text: str, source: str = "<string>") -> ScenarioConfig:
    """Parse scenario text; unset keys keep their documented defaults."""
    parsed = _parse(text, source)
    data = _to_data(parsed)

    try:
        return ScenarioConfig.model_validate(data)
    except ValidationError as exc:
        first = exc.errors()[0]
        line, key = _locate(parsed, tuple(first.get('loc', ())))
        message = first.get('msg', str(exc))
        if key:
            message = f"{key}: {message}"
        raise ConfigurationException(message, config_key=key, line=line, source=source) from exc


def load_scenario_file(path: Union[str, Path]) -> ScenarioConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding='utf-8')
    except OSError as exc:
        raise ConfigurationException(f"cannot read {path}: {exc.strerror}", source=str(path)) from exc
    config = parse_scenario_text(text, source=str(path))
    logger.debug(f"loaded scenario '{config.name}' from {path}")
    return config


def resolve_scenario(name_or_path: str) -> ScenarioConfig:
    """A built-in preset by name, otherwise a scenario file."""
    if name_or_path in PRESETS:
        return get_preset(name_or_path)
    path = Path(name_or_path)
    if path.is_file():
        return load_scenario_file(path)
    raise ScenarioNotFoundException(name_or_path)
